//! Linear-optical networks: beamsplitter/phase circuits, the two reference
//! three-mode unitaries, gauge comparison, and the phase-tunable family
//! `U(φ)` used throughout the crate.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Tolerance for fitted anchor conditions.
pub const ANCHOR_TOL: f64 = 1e-6;
/// Tolerance for algebraic identities such as unitarity.
pub const UNITARY_TOL: f64 = 1e-12;

const PAPER_NETWORK_TOML: &str = include_str!("../data/paper_network.toml");

/// One optical element. Modes are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircuitElement {
    /// Lossless beamsplitter on `modes = [a, b]` with power reflectivity
    /// `reflectivity`, symmetric convention: `[[t, ir], [ir, t]]`.
    Beamsplitter { modes: [usize; 2], reflectivity: f64 },
    /// Phase `e^{i·phase}` on one mode. A `tunable` shifter additionally
    /// receives the family phase `φ`.
    PhaseShifter {
        mode: usize,
        phase: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        tunable: bool,
    },
}

impl CircuitElement {
    pub fn beamsplitter(a: usize, b: usize, reflectivity: f64) -> Self {
        Self::Beamsplitter { modes: [a, b], reflectivity }
    }

    pub fn phase(mode: usize, phase: f64) -> Self {
        Self::PhaseShifter { mode, phase, tunable: false }
    }

    fn validate(&self, n_modes: usize) -> Result<()> {
        let check_mode = |m: usize| {
            if m == 0 || m > n_modes {
                Err(Error::ModeOutOfRange { mode: m, n_modes })
            } else {
                Ok(())
            }
        };
        match *self {
            Self::Beamsplitter { modes: [a, b], reflectivity } => {
                check_mode(a)?;
                check_mode(b)?;
                if a == b {
                    return Err(Error::InvalidElement(format!("beamsplitter acts twice on mode {a}")));
                }
                if !(reflectivity > 0.0 && reflectivity < 1.0) {
                    return Err(Error::InvalidElement(format!(
                        "reflectivity {reflectivity} outside (0, 1)"
                    )));
                }
            }
            Self::PhaseShifter { mode, phase, .. } => {
                check_mode(mode)?;
                if !phase.is_finite() {
                    return Err(Error::InvalidElement("non-finite phase".into()));
                }
            }
        }
        Ok(())
    }

    /// Left-multiplies `u` in place by this element, with `extra_phase`
    /// added to tunable shifters.
    fn apply(&self, u: &mut ComplexMatrix, extra_phase: f64) {
        let n = u.n_cols();
        match *self {
            Self::Beamsplitter { modes: [a, b], reflectivity } => {
                let (a, b) = (a - 1, b - 1);
                let t = C64::new((1.0 - reflectivity).sqrt(), 0.0);
                let r = C64::new(0.0, reflectivity.sqrt());
                for j in 0..n {
                    let (ua, ub) = (u[(a, j)], u[(b, j)]);
                    u[(a, j)] = t * ua + r * ub;
                    u[(b, j)] = r * ua + t * ub;
                }
            }
            Self::PhaseShifter { mode, phase, tunable } => {
                let p = C64::from_polar(1.0, phase + if tunable { extra_phase } else { 0.0 });
                for j in 0..n {
                    u[(mode - 1, j)] *= p;
                }
            }
        }
    }
}

/// Multiplies the elements out in order (first element acts first).
pub fn circuit_to_unitary(elements: &[CircuitElement], n_modes: usize) -> Result<ComplexMatrix> {
    build_circuit(elements, n_modes, 0.0)
}

fn build_circuit(elements: &[CircuitElement], n_modes: usize, phi: f64) -> Result<ComplexMatrix> {
    if n_modes == 0 {
        return Err(Error::InvalidElement("a circuit needs at least one mode".into()));
    }
    for e in elements {
        e.validate(n_modes)?;
    }
    let mut u = ComplexMatrix::identity(n_modes);
    for e in elements {
        e.apply(&mut u, phi);
    }
    Ok(u)
}

/// Symmetric three-mode multiport, `U_ds = e^{i2π ds/3}/√3` with 1-based `d, s`.
pub fn tritter() -> ComplexMatrix {
    let norm = 1.0 / 3f64.sqrt();
    ComplexMatrix::from_fn(3, 3, |d, s| {
        let ds = ((d + 1) * (s + 1)) as f64;
        C64::from_polar(norm, 2.0 * PI * ds / 3.0)
    })
}

/// The three-mode unitary whose permanent vanishes (the `φ = 0` setting).
pub fn u_zero() -> ComplexMatrix {
    let s3 = 3f64.sqrt();
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let entries = vec![
        re(-1.0),
        re((s3 - 1.0) / 2.0),
        im((s3 + 1.0) / 2.0),
        im(1.0),
        im((s3 + 1.0) / 2.0),
        re((1.0 - s3) / 2.0),
        re(1.0),
        re(-1.0),
        im(1.0),
    ];
    ComplexMatrix::from_rows(3, 3, entries).unwrap().scale(C64::new(1.0 / s3, 0.0))
}

fn unit_phase(z: C64) -> C64 {
    let r = z.norm();
    if r > 0.0 {
        z / r
    } else {
        C64::new(1.0, 0.0)
    }
}

/// Distance between `u` and `v` modulo diagonal phase matrices on both sides:
/// `min ‖D_L·u·D_R − v‖_max`.
///
/// Row and column phases are first aligned along a maximum-weight spanning
/// tree of the entries (the first row and column when all entries are of
/// comparable size), then polished with a few alternating phase updates.
pub fn gauge_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if !u.is_square() || u.n_rows() != v.n_rows() || u.n_cols() != v.n_cols() {
        return Err(Error::ShapeMismatch(format!(
            "gauge_distance needs equal square shapes, got {}x{} and {}x{}",
            u.n_rows(),
            u.n_cols(),
            v.n_rows(),
            v.n_cols()
        )));
    }
    let n = u.n_rows();
    let one = C64::new(1.0, 0.0);
    let mut a = vec![one; n];
    let mut b = vec![one; n];

    // Prim's algorithm on the bipartite row/column graph, rooted at row 0.
    let mut row_done = vec![false; n];
    let mut col_done = vec![false; n];
    row_done[0] = true;
    for _ in 0..(2 * n - 1) {
        let mut best: Option<(f64, usize, usize, bool)> = None;
        for i in 0..n {
            for j in 0..n {
                if row_done[i] == col_done[j] {
                    continue;
                }
                let w = u[(i, j)].norm() * v[(i, j)].norm();
                if best.is_none_or(|(bw, ..)| w > bw) {
                    best = Some((w, i, j, row_done[i]));
                }
            }
        }
        let Some((_, i, j, from_row)) = best else { break };
        let link = unit_phase(v[(i, j)] * u[(i, j)].conj());
        if from_row {
            b[j] = link * a[i].conj();
            col_done[j] = true;
        } else {
            a[i] = link * b[j].conj();
            row_done[i] = true;
        }
    }

    let residual = |a: &[C64], b: &[C64]| {
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                r = r.max((a[i] * u[(i, j)] * b[j] - v[(i, j)]).norm());
            }
        }
        r
    };
    let mut best = residual(&a, &b);
    for _ in 0..50 {
        if best == 0.0 {
            break;
        }
        for i in 0..n {
            let s: C64 = (0..n).map(|j| v[(i, j)] * (u[(i, j)] * b[j]).conj()).sum();
            a[i] = unit_phase(s);
        }
        for j in 0..n {
            let s: C64 = (0..n).map(|i| v[(i, j)] * (a[i] * u[(i, j)]).conj()).sum();
            b[j] = unit_phase(s);
        }
        let r = residual(&a, &b);
        if r >= best * (1.0 - 1e-12) {
            best = best.min(r);
            break;
        }
        best = r;
    }
    Ok(best)
}

/// Swaps output rows `a` and `b` (1-based).
pub fn swap_outputs(u: &ComplexMatrix, a: usize, b: usize) -> ComplexMatrix {
    let mut w = u.clone();
    w.swap_rows(a - 1, b - 1);
    w
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct NetworkFile {
    schema_version: u32,
    n_modes: usize,
    #[serde(default = "default_tunable_name")]
    tunable_phase: String,
    elements: Vec<CircuitElement>,
}

fn default_tunable_name() -> String {
    "phi".to_string()
}

/// A circuit with at most one tunable phase shifter.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkFamily {
    n_modes: usize,
    tunable_name: String,
    elements: Vec<CircuitElement>,
}

impl NetworkFamily {
    pub fn new(n_modes: usize, elements: Vec<CircuitElement>) -> Result<Self> {
        for e in &elements {
            e.validate(n_modes)?;
        }
        let tunables = elements
            .iter()
            .filter(|e| matches!(e, CircuitElement::PhaseShifter { tunable: true, .. }))
            .count();
        if tunables > 1 {
            return Err(Error::InvalidElement(format!("{tunables} tunable phases; at most one allowed")));
        }
        Ok(Self { n_modes, tunable_name: default_tunable_name(), elements })
    }

    /// Parses the network config format (see `data/paper_network.toml`).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: NetworkFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if file.schema_version != 1 {
            return Err(Error::Config(format!("unsupported network schema_version {}", file.schema_version)));
        }
        let mut fam = Self::new(file.n_modes, file.elements)?;
        fam.tunable_name = file.tunable_phase;
        Ok(fam)
    }

    pub fn to_toml_string(&self) -> String {
        let file = NetworkFile {
            schema_version: 1,
            n_modes: self.n_modes,
            tunable_phase: self.tunable_name.clone(),
            elements: self.elements.clone(),
        };
        toml::to_string(&file).expect("network serializes")
    }

    /// The shipped three-beamsplitter realization of the interferometer.
    pub fn paper() -> Self {
        Self::from_toml_str(PAPER_NETWORK_TOML).expect("shipped network config is valid")
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn tunable_name(&self) -> &str {
        &self.tunable_name
    }

    pub fn elements(&self) -> &[CircuitElement] {
        &self.elements
    }

    pub fn unitary(&self, phi: f64) -> ComplexMatrix {
        build_circuit(&self.elements, self.n_modes, phi).expect("elements validated at construction")
    }

    /// Evaluates the three anchor conditions of the interferometer.
    pub fn anchors(&self) -> Result<AnchorReport> {
        if self.n_modes != 3 {
            return Err(Error::ShapeMismatch("anchor checks need a three-mode network".into()));
        }
        let u0 = self.unitary(0.0);
        let zero_anchor = gauge_distance(&u0, &u_zero())?;
        let tritter_anchor = gauge_distance(&self.unitary(FRAC_PI_2), &tritter())?;
        let mut swap_anchor = 0.0f64;
        for phi in SWAP_ANCHOR_PHASES {
            let d = gauge_distance(&self.unitary(phi + PI), &swap_outputs(&self.unitary(phi), 1, 2))?;
            swap_anchor = swap_anchor.max(d);
        }
        let unitarity = SWAP_ANCHOR_PHASES
            .iter()
            .chain(&[PI, 1.5 * PI])
            .map(|&p| self.unitary(p).unitarity_defect().unwrap())
            .fold(0.0, f64::max);
        Ok(AnchorReport { zero_anchor, tritter_anchor, swap_anchor, unitarity })
    }
}

/// Phases at which the `φ → φ + π` row-swap anchor is checked.
pub const SWAP_ANCHOR_PHASES: [f64; 3] = [0.0, PI / 4.0, PI / 2.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnchorReport {
    /// `gauge_distance(U(0), U₀)`
    pub zero_anchor: f64,
    /// `gauge_distance(U(π/2), tritter)`
    pub tritter_anchor: f64,
    /// max over [`SWAP_ANCHOR_PHASES`] of `gauge_distance(U(φ+π), S₁₂·U(φ))`
    pub swap_anchor: f64,
    pub unitarity: f64,
}

impl AnchorReport {
    pub fn passes(&self) -> bool {
        self.zero_anchor <= ANCHOR_TOL
            && self.tritter_anchor <= ANCHOR_TOL
            && self.swap_anchor <= ANCHOR_TOL
            && self.unitarity <= UNITARY_TOL
    }
}

fn paper_family_checked() -> Result<&'static NetworkFamily> {
    static FAMILY: OnceLock<std::result::Result<NetworkFamily, String>> = OnceLock::new();
    FAMILY
        .get_or_init(|| {
            let fam = NetworkFamily::paper();
            let report = fam.anchors().map_err(|e| e.to_string())?;
            if report.passes() {
                Ok(fam)
            } else {
                Err(format!("{report:?}"))
            }
        })
        .as_ref()
        .map_err(|msg| Error::FitFailure(msg.clone()))
}

/// `U(φ)` of the shipped interferometer. Fails if the shipped parameters do
/// not meet the anchor conditions.
pub fn paper_network(phi: f64) -> Result<ComplexMatrix> {
    Ok(paper_family_checked()?.unitary(phi))
}

/// Layout used by [`fit_paper_family`]: a balanced beamsplitter on (2,3),
/// fixed phases on modes 1 and 3, a 1:2 beamsplitter on (1,3), the tunable
/// phase on mode 2 and a final balanced beamsplitter on (1,2).
pub fn paper_layout(fixed: [f64; 3]) -> NetworkFamily {
    let elements = vec![
        CircuitElement::beamsplitter(2, 3, 0.5),
        CircuitElement::phase(1, fixed[0]),
        CircuitElement::phase(3, fixed[1]),
        CircuitElement::beamsplitter(1, 3, 1.0 / 3.0),
        CircuitElement::PhaseShifter { mode: 2, phase: fixed[2], tunable: true },
        CircuitElement::beamsplitter(1, 2, 0.5),
    ];
    NetworkFamily::new(3, elements).expect("layout is valid")
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub family: NetworkFamily,
    pub fixed_phases: [f64; 3],
    pub cost: f64,
    pub report: AnchorReport,
}

struct AnchorCost;

impl CostFunction for AnchorCost {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let fam = paper_layout([p[0], p[1], p[2]]);
        let d0 = gauge_distance(&fam.unitary(0.0), &u_zero())?;
        let d1 = gauge_distance(&fam.unitary(FRAC_PI_2), &tritter())?;
        Ok(d0 * d0 + d1 * d1)
    }
}

/// Fits the fixed phases of [`paper_layout`] to the `φ = 0` and `φ = π/2`
/// anchors with Nelder–Mead from random starting phases.
pub fn fit_paper_family(restarts: usize, seed: u64) -> Result<FitResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..restarts.max(1) {
        let start: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let mut simplex = vec![start.clone()];
        for k in 0..3 {
            let mut v = start.clone();
            v[k] += 0.6;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-16)
            .map_err(|e| Error::FitFailure(e.to_string()))?;
        let res = Executor::new(AnchorCost, solver)
            .configure(|s| s.max_iters(4000))
            .run()
            .map_err(|e| Error::FitFailure(e.to_string()))?;
        let cost = res.state.best_cost;
        let param = res.state.best_param.clone().unwrap_or(start);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, param));
        }
    }
    let (cost, p) = best.expect("at least one restart");
    let wrap = |x: f64| x.rem_euclid(2.0 * PI);
    let fixed_phases = [wrap(p[0]), wrap(p[1]), wrap(p[2])];
    let family = paper_layout(fixed_phases);
    let report = family.anchors()?;
    if !report.passes() {
        return Err(Error::FitFailure(format!("best cost {cost:.3e}, {report:?}")));
    }
    Ok(FitResult { family, fixed_phases, cost, report })
}
