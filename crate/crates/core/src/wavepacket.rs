//! Temporal single-photon wavepackets.
//!
//! A wavepacket is a real, nonnegative, L²-normalized envelope placed at an
//! emission time `t0` and multiplied by a carrier `e^{-i·2π·ν·t}` where `ν`
//! is the detuning in MHz from a common reference. Times are in ns, so the
//! carrier phase is `2π·ν·t·10⁻³`. Only detuning differences are physical.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Detunings of the three sources (MHz, blue of the common reference).
pub const PAPER_DETUNINGS_MHZ: [f64; 3] = [72.4, 33.0, 52.4];
/// Single-photon linewidth δω/2π in MHz.
pub const LINEWIDTH_MHZ: f64 = 12.9;
/// Heralded efficiency from the atoms into the network.
pub const PAPER_EFFICIENCY: f64 = 0.45;
/// Default rise time constant of the read-out envelope (ns).
pub const DEFAULT_RISE_NS: f64 = 5.0;
/// Default fall time constant of the read-out envelope (ns).
pub const DEFAULT_FALL_NS: f64 = 100.0;

/// Largest trapezoid step used for single-photon integrals (ns).
pub const QUAD_STEP_NS: f64 = 0.0625;
/// Lead time kept before `t0` for causal envelopes (ns).
const PRE_WINDOW_NS: f64 = 5.0;
/// Window length in units of the slowest amplitude decay time; the truncated
/// intensity mass is `~e^{-24}`.
const DECAY_WINDOWS: f64 = 12.0;
const GAUSSIAN_WINDOWS: f64 = 7.0;

/// `2π × 10⁻³`: converts MHz·ns into radians.
pub(crate) const MHZ_NS_TO_RAD: f64 = 2.0 * PI * 1e-3;

/// Envelope shapes. Rates are amplitude decay rates in 1/ns, so intensity
/// decays twice as fast.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Envelope {
    /// `√(2Γ)·e^{-Γ t}` for `t ≥ 0`.
    OneSidedExponential { gamma: f64 },
    /// `A·(e^{-Γ_fall t} − e^{-Γ_rise t})` for `t ≥ 0`, `Γ_rise > Γ_fall`.
    DoubleExponential { gamma_rise: f64, gamma_fall: f64 },
    /// `(2πσ²)^{-1/4}·e^{-t²/(4σ²)}`: intensity is a normal density of width σ.
    Gaussian { sigma: f64 },
    /// Piecewise-linear amplitude through `(t, a)` samples relative to `t0`,
    /// zero outside. Rescaled to unit norm on construction.
    Tabulated { times: Vec<f64>, amplitudes: Vec<f64> },
}

impl Envelope {
    pub fn double_exponential_ns(rise_ns: f64, fall_ns: f64) -> Self {
        Self::DoubleExponential { gamma_rise: 1.0 / rise_ns, gamma_fall: 1.0 / fall_ns }
    }

    /// The default read-out profile: a fast rise and a slow exponential fall.
    pub fn paper_default() -> Self {
        Self::double_exponential_ns(DEFAULT_RISE_NS, DEFAULT_FALL_NS)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidWavepacket(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            Self::OneSidedExponential { gamma } => positive("gamma", *gamma),
            Self::DoubleExponential { gamma_rise, gamma_fall } => {
                positive("gamma_rise", *gamma_rise)?;
                positive("gamma_fall", *gamma_fall)?;
                if gamma_rise <= gamma_fall {
                    return Err(Error::InvalidWavepacket(
                        "double exponential needs gamma_rise > gamma_fall".into(),
                    ));
                }
                Ok(())
            }
            Self::Gaussian { sigma } => positive("sigma", *sigma),
            Self::Tabulated { times, amplitudes } => {
                if times.len() < 2 || times.len() != amplitudes.len() {
                    return Err(Error::InvalidWavepacket(
                        "tabulated envelope needs at least two (t, a) samples".into(),
                    ));
                }
                if times.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
                    return Err(Error::InvalidWavepacket("tabulated times must increase strictly".into()));
                }
                if amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
                    return Err(Error::InvalidWavepacket("tabulated amplitudes must be finite and >= 0".into()));
                }
                if tabulated_norm_sq(times, amplitudes) <= 0.0 {
                    return Err(Error::InvalidWavepacket("tabulated envelope is identically zero".into()));
                }
                Ok(())
            }
        }
    }

    fn normalized(self) -> Self {
        match self {
            Self::Tabulated { times, amplitudes } => {
                let norm = tabulated_norm_sq(&times, &amplitudes).sqrt();
                let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
                Self::Tabulated { times, amplitudes }
            }
            other => other,
        }
    }

    /// Envelope value at time `s` relative to the emission time.
    pub fn value(&self, s: f64) -> f64 {
        match self {
            Self::OneSidedExponential { gamma } => {
                if s < 0.0 {
                    0.0
                } else {
                    (2.0 * gamma).sqrt() * (-gamma * s).exp()
                }
            }
            Self::DoubleExponential { gamma_rise, gamma_fall } => {
                if s < 0.0 {
                    0.0
                } else {
                    double_exp_norm(*gamma_rise, *gamma_fall)
                        * ((-gamma_fall * s).exp() - (-gamma_rise * s).exp())
                }
            }
            Self::Gaussian { sigma } => {
                (2.0 * PI * sigma * sigma).powf(-0.25) * (-(s * s) / (4.0 * sigma * sigma)).exp()
            }
            Self::Tabulated { times, amplitudes } => {
                if s < times[0] || s > times[times.len() - 1] {
                    return 0.0;
                }
                let k = times.partition_point(|&t| t <= s).min(times.len() - 1).max(1);
                let (t0, t1) = (times[k - 1], times[k]);
                let w = (s - t0) / (t1 - t0);
                amplitudes[k - 1] * (1.0 - w) + amplitudes[k] * w
            }
        }
    }

    /// `(pre, post)` extent of the effective support relative to `t0`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::OneSidedExponential { gamma } => (-PRE_WINDOW_NS, DECAY_WINDOWS / gamma),
            Self::DoubleExponential { gamma_fall, .. } => (-PRE_WINDOW_NS, DECAY_WINDOWS / gamma_fall),
            Self::Gaussian { sigma } => (-GAUSSIAN_WINDOWS * sigma, GAUSSIAN_WINDOWS * sigma),
            Self::Tabulated { times, .. } => (times[0], times[times.len() - 1]),
        }
    }
}

impl Envelope {
    /// Draws an offset `s` from the intensity profile `value(s)²`.
    ///
    /// Exact for every shape: the double exponential is drawn from its slow
    /// exponential tail and thinned by `(1 − e^{-(Γ_rise−Γ_fall)s})²`; tabulated
    /// envelopes pick a segment by its exact mass and thin a uniform draw.
    pub fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::OneSidedExponential { gamma } => Exp::new(2.0 * gamma).expect("validated rate").sample(rng),
            Self::DoubleExponential { gamma_rise, gamma_fall } => {
                let tail = Exp::new(2.0 * gamma_fall).expect("validated rate");
                loop {
                    let s = tail.sample(rng);
                    let keep = 1.0 - (-(gamma_rise - gamma_fall) * s).exp();
                    if rng.gen::<f64>() < keep * keep {
                        return s;
                    }
                }
            }
            Self::Gaussian { sigma } => Normal::new(0.0, *sigma).expect("validated width").sample(rng),
            Self::Tabulated { times, amplitudes } => {
                let masses: Vec<f64> = times
                    .windows(2)
                    .zip(amplitudes.windows(2))
                    .map(|(t, a)| (t[1] - t[0]) * (a[0] * a[0] + a[0] * a[1] + a[1] * a[1]) / 3.0)
                    .collect();
                let total: f64 = masses.iter().sum();
                let mut u = rng.gen::<f64>() * total;
                let mut k = masses.len() - 1;
                for (i, m) in masses.iter().enumerate() {
                    if u < *m {
                        k = i;
                        break;
                    }
                    u -= m;
                }
                let (a0, a1) = (amplitudes[k], amplitudes[k + 1]);
                let bound = (a0 * a0).max(a1 * a1);
                loop {
                    let w: f64 = rng.gen();
                    let a = a0 * (1.0 - w) + a1 * w;
                    if rng.gen::<f64>() * bound < a * a {
                        return times[k] + w * (times[k + 1] - times[k]);
                    }
                }
            }
        }
    }
}

fn double_exp_norm(rise: f64, fall: f64) -> f64 {
    // ∫ (e^{-a t} − e^{-b t})² dt over t ≥ 0
    let integral = 1.0 / (2.0 * fall) + 1.0 / (2.0 * rise) - 2.0 / (fall + rise);
    1.0 / integral.sqrt()
}

/// Exact `∫ a(t)² dt` for a piecewise-linear `a`.
fn tabulated_norm_sq(times: &[f64], amps: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(amps.windows(2))
        .map(|(t, a)| (t[1] - t[0]) * (a[0] * a[0] + a[0] * a[1] + a[1] * a[1]) / 3.0)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wavepacket {
    #[serde(flatten)]
    envelope: Envelope,
    /// Emission time, ns.
    #[serde(default)]
    t0: f64,
    /// Carrier detuning, MHz.
    #[serde(default)]
    detuning_mhz: f64,
}

impl Wavepacket {
    pub fn new(envelope: Envelope, t0: f64, detuning_mhz: f64) -> Result<Self> {
        envelope.validate()?;
        if !t0.is_finite() || !detuning_mhz.is_finite() {
            return Err(Error::InvalidWavepacket("t0 and detuning must be finite".into()));
        }
        Ok(Self { envelope: envelope.normalized(), t0, detuning_mhz })
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn detuning_mhz(&self) -> f64 {
        self.detuning_mhz
    }

    pub fn with_detuning(&self, detuning_mhz: f64) -> Self {
        Self { detuning_mhz, ..self.clone() }
    }

    pub fn with_t0(&self, t0: f64) -> Self {
        Self { t0, ..self.clone() }
    }

    /// `ξ(t) = envelope(t − t0)·e^{-i·2π·ν·t}`.
    pub fn amplitude(&self, t: f64) -> C64 {
        let e = self.envelope.value(t - self.t0);
        if e == 0.0 {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar(e, -MHZ_NS_TO_RAD * self.detuning_mhz * t)
    }

    /// Draws a detection time from `|ξ(t)|²`.
    pub fn sample_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.t0 + self.envelope.sample_offset(rng)
    }

    pub fn intensity(&self, t: f64) -> f64 {
        let e = self.envelope.value(t - self.t0);
        e * e
    }

    /// Absolute support window `[t0 + pre, t0 + post]`.
    pub fn support(&self) -> (f64, f64) {
        let (pre, post) = self.envelope.support();
        (self.t0 + pre, self.t0 + post)
    }
}

/// `∫ ξ_a*(t) ξ_b(t) dt` by the trapezoid rule on the union of supports.
pub fn spectral_overlap(a: &Wavepacket, b: &Wavepacket) -> C64 {
    let (lo_a, hi_a) = a.support();
    let (lo_b, hi_b) = b.support();
    let lo = lo_a.min(lo_b);
    let hi = hi_a.max(hi_b);
    // Keep the emission times on nodes so envelope kinks land on grid points.
    let (lo, h, n) = aligned_nodes(lo, hi, a.t0().min(b.t0()), QUAD_STEP_NS);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let t = lo + k as f64 * h;
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        acc += w * a.amplitude(t).conj() * b.amplitude(t);
    }
    acc * h
}

/// Nodes with step `max_step` that hit `anchor` exactly, widened to cover
/// `[lo, hi]`.
pub(crate) fn aligned_nodes(lo: f64, hi: f64, anchor: f64, max_step: f64) -> (f64, f64, usize) {
    let h = max_step;
    let start = anchor - ((anchor - lo) / h).ceil() * h;
    let n = ((hi - start) / h).ceil() as usize + 1;
    (start, h, n)
}

/// Three (or more) photons entering input modes `1..=N`, with per-source
/// efficiency `η` and contamination probability `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSet {
    wavepackets: Vec<Wavepacket>,
    efficiency: Vec<f64>,
    contamination: Vec<f64>,
}

impl SourceSet {
    pub fn new(wavepackets: Vec<Wavepacket>, efficiency: Vec<f64>, contamination: Vec<f64>) -> Result<Self> {
        let n = wavepackets.len();
        if n == 0 {
            return Err(Error::InvalidWavepacket("source set is empty".into()));
        }
        if efficiency.len() != n || contamination.len() != n {
            return Err(Error::InvalidWavepacket("one efficiency and contamination value per source".into()));
        }
        if efficiency.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::InvalidWavepacket("efficiency outside [0, 1]".into()));
        }
        if contamination.iter().any(|q| !(0.0..0.5).contains(q)) {
            return Err(Error::InvalidWavepacket("contamination outside [0, 0.5)".into()));
        }
        Ok(Self { wavepackets, efficiency, contamination })
    }

    /// Lossless, contamination-free sources.
    pub fn ideal(wavepackets: Vec<Wavepacket>) -> Result<Self> {
        let n = wavepackets.len();
        Self::new(wavepackets, vec![1.0; n], vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.wavepackets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavepackets.is_empty()
    }

    pub fn wavepackets(&self) -> &[Wavepacket] {
        &self.wavepackets
    }

    pub fn get(&self, j: usize) -> &Wavepacket {
        &self.wavepackets[j]
    }

    pub fn efficiency(&self) -> &[f64] {
        &self.efficiency
    }

    pub fn contamination(&self) -> &[f64] {
        &self.contamination
    }

    pub fn detunings(&self) -> Vec<f64> {
        self.wavepackets.iter().map(Wavepacket::detuning_mhz).collect()
    }

    /// Same envelopes and times, with every detuning replaced.
    pub fn with_detunings(&self, detunings: &[f64]) -> Result<Self> {
        if detunings.len() != self.len() {
            return Err(Error::InvalidWavepacket("one detuning per source".into()));
        }
        let wavepackets = self.wavepackets.iter().zip(detunings).map(|(w, &d)| w.with_detuning(d)).collect();
        Ok(Self { wavepackets, ..self.clone() })
    }

    /// All detunings set equal: the indistinguishable-photon reference.
    pub fn identical(&self) -> Self {
        let d = self.wavepackets[0].detuning_mhz();
        self.with_detunings(&vec![d; self.len()]).expect("lengths match")
    }

    pub fn with_noise(&self, efficiency: f64, contamination: f64) -> Result<Self> {
        let n = self.len();
        Self::new(self.wavepackets.clone(), vec![efficiency; n], vec![contamination; n])
    }

    /// Union of the supports of all sources.
    pub fn support(&self) -> (f64, f64) {
        self.wavepackets
            .iter()
            .map(Wavepacket::support)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }

    /// Gram matrix `G[a][b] = ⟨ξ_a|ξ_b⟩`.
    pub fn gram(&self) -> Vec<Vec<C64>> {
        let n = self.len();
        (0..n)
            .map(|a| (0..n).map(|b| spectral_overlap(&self.wavepackets[a], &self.wavepackets[b])).collect())
            .collect()
    }
}

/// Three photons with the default envelope at the measured detunings,
/// emitted together at `t = 0`, lossless and pure.
pub fn paper_sources() -> SourceSet {
    let wps = PAPER_DETUNINGS_MHZ
        .iter()
        .map(|&nu| Wavepacket::new(Envelope::paper_default(), 0.0, nu).expect("default envelope is valid"))
        .collect();
    SourceSet::ideal(wps).expect("three valid sources")
}

/// Reads a two-column `t_ns amplitude` table (whitespace or comma separated,
/// `#` comments) into a tabulated envelope.
pub fn load_tabulated(path: &Path) -> Result<Envelope> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tabulated(&text, &path.display().to_string())
}

pub fn parse_tabulated(text: &str, origin: &str) -> Result<Envelope> {
    let mut times = Vec::new();
    let mut amplitudes = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parse_err = |msg: String| Error::Parse { path: origin.to_string(), line: k + 1, msg };
        if fields.len() != 2 {
            return Err(parse_err(format!("expected two columns, found {}", fields.len())));
        }
        let t: f64 = fields[0].parse().map_err(|_| parse_err(format!("bad time {:?}", fields[0])))?;
        let a: f64 = fields[1].parse().map_err(|_| parse_err(format!("bad amplitude {:?}", fields[1])))?;
        times.push(t);
        amplitudes.push(a);
    }
    let env = Envelope::Tabulated { times, amplitudes };
    env.validate()?;
    Ok(env.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Composite 8-point Gauss–Legendre on unit-length panels, kinks on panel
    /// edges. Independent of the trapezoid path used by the library.
    fn gauss_legendre(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
        const W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
        if hi <= lo {
            return 0.0;
        }
        let panels = (hi - lo).ceil() as usize;
        let h = (hi - lo) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * h;
            for k in 0..4 {
                let dx = 0.5 * h * X[k];
                acc += W[k] * (f(mid - dx) + f(mid + dx));
            }
        }
        acc * 0.5 * h
    }

    fn norm_oracle(w: &Wavepacket) -> f64 {
        // Split at t0 so the causal kink sits on a panel edge.
        let (lo, hi) = w.support();
        gauss_legendre(|t| w.intensity(t), lo, w.t0()) + gauss_legendre(|t| w.intensity(t), w.t0(), hi)
    }

    #[test]
    fn causal_shapes_vanish_before_emission() {
        let w = Wavepacket::new(Envelope::OneSidedExponential { gamma: 0.1 }, 10.0, 30.0).unwrap();
        assert_eq!(w.amplitude(9.99), C64::new(0.0, 0.0));
        assert!(w.amplitude(10.0).norm() > 0.0);
    }

    #[test]
    fn gaussian_peak_value() {
        let sigma = 4.0;
        let w = Wavepacket::new(Envelope::Gaussian { sigma }, 3.0, 0.0).unwrap();
        let peak = w.amplitude(3.0);
        assert!((peak.re - (2.0 * PI * sigma * sigma).powf(-0.25)).abs() < 1e-15);
        assert_eq!(peak.im, 0.0);
    }

    #[test]
    fn envelopes_are_normalized() {
        let shapes = [
            Envelope::paper_default(),
            Envelope::double_exponential_ns(5.0, 25.0),
            Envelope::OneSidedExponential { gamma: 0.05 },
            Envelope::Gaussian { sigma: 7.0 },
        ];
        for env in shapes {
            let w = Wavepacket::new(env.clone(), 2.0, 52.4).unwrap();
            let n = norm_oracle(&w);
            assert!((n - 1.0).abs() < 1e-9, "{env:?}: {n}");
        }
    }

    #[test]
    fn paper_sources_detunings() {
        let s = paper_sources();
        let d = s.detunings();
        assert!((d[0] - d[2] - 20.0).abs() < 1e-12);
        assert!((d[0] - d[1] - 39.4).abs() < 1e-12);
        for w in s.wavepackets() {
            assert!((norm_oracle(w) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn self_overlap_is_one() {
        for env in [Envelope::paper_default(), Envelope::double_exponential_ns(5.0, 25.0), Envelope::Gaussian { sigma: 3.0 }] {
            let w = Wavepacket::new(env, 0.0, 33.0).unwrap();
            let o = spectral_overlap(&w, &w);
            assert!((o.re - 1.0).abs() < 1e-9 && o.im.abs() < 1e-12, "{:?}: {o}", w.envelope());
        }
    }

    #[test]
    fn detuned_overlap_is_small() {
        // Linewidth-scale envelope: intensity decay time 1/(2π·12.9 MHz).
        let fall = 2.0 / (MHZ_NS_TO_RAD * LINEWIDTH_MHZ);
        let env = Envelope::double_exponential_ns(DEFAULT_RISE_NS, fall);
        let a = Wavepacket::new(env.clone(), 0.0, 72.4).unwrap();
        let b = Wavepacket::new(env, 0.0, 33.0).unwrap();
        let o = spectral_overlap(&a, &b);
        let oracle_re = gauss_legendre(|t| (a.amplitude(t).conj() * b.amplitude(t)).re, -5.0, 0.0)
            + gauss_legendre(|t| (a.amplitude(t).conj() * b.amplitude(t)).re, 0.0, a.support().1);
        assert!((o.re - oracle_re).abs() < 1e-6);
        assert!(o.norm() < 0.5, "{}", o.norm());
    }

    #[test]
    fn disjoint_supports_do_not_overlap() {
        let a = Wavepacket::new(Envelope::Tabulated { times: vec![0.0, 1.0, 2.0], amplitudes: vec![0.0, 1.0, 0.0] }, 0.0, 0.0).unwrap();
        let b = a.with_t0(10.0);
        assert!(spectral_overlap(&a, &b).norm() < 1e-12);
    }

    #[test]
    fn tabulated_loader() {
        let env = parse_tabulated("# t a\n0 0\n1, 2\n2 0\n", "mem").unwrap();
        let w = Wavepacket::new(env, 0.0, 0.0).unwrap();
        assert!((norm_oracle(&w) - 1.0).abs() < 1e-9);
        let err = parse_tabulated("0 0\n1 x\n", "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Wavepacket::new(Envelope::Gaussian { sigma: -1.0 }, 0.0, 0.0).is_err());
        assert!(Wavepacket::new(Envelope::DoubleExponential { gamma_rise: 0.01, gamma_fall: 0.2 }, 0.0, 0.0).is_err());
        let w = paper_sources().wavepackets().to_vec();
        assert!(SourceSet::new(w.clone(), vec![1.2; 3], vec![0.0; 3]).is_err());
        assert!(SourceSet::new(w, vec![1.0; 3], vec![0.5; 3]).is_err());
    }

    #[test]
    fn sampled_offsets_follow_the_intensity() {
        use rand::SeedableRng;
        let shapes = [
            Envelope::OneSidedExponential { gamma: 0.05 },
            Envelope::double_exponential_ns(5.0, 25.0),
            Envelope::Gaussian { sigma: 4.0 },
            Wavepacket::new(
                Envelope::Tabulated { times: vec![0.0, 3.0, 10.0, 30.0], amplitudes: vec![0.0, 1.0, 0.6, 0.0] },
                0.0,
                0.0,
            )
            .unwrap()
            .envelope()
            .clone(),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for env in shapes {
            let (lo, hi) = env.support();
            let mean = gauss_legendre(|s| s * env.value(s).powi(2), lo, hi);
            let second = gauss_legendre(|s| s * s * env.value(s).powi(2), lo, hi);
            let sd = (second - mean * mean).sqrt();
            let n = 100_000;
            let got = (0..n).map(|_| env.sample_offset(&mut rng)).sum::<f64>() / n as f64;
            assert!((got - mean).abs() < 5.0 * sd / (n as f64).sqrt(), "{env:?}: {got} vs {mean}");
        }
    }

    proptest! {
        #[test]
        fn detuning_is_a_pure_phase(nu in -200.0f64..200.0, t in -10.0f64..300.0) {
            let w = paper_sources().get(0).clone();
            let v = w.with_detuning(nu);
            prop_assert!((w.amplitude(t).norm() - v.amplitude(t).norm()).abs() < 1e-15);
        }

        #[test]
        fn time_shift_covariance(tau in -50.0f64..50.0, t in -10.0f64..300.0) {
            let w = paper_sources().get(1).clone();
            let v = w.with_t0(w.t0() + tau);
            prop_assert!((v.intensity(t + tau) - w.intensity(t)).abs() < 1e-12);
        }

        #[test]
        fn overlap_conjugate_symmetric(nu_a in 0.0f64..80.0, nu_b in 0.0f64..80.0, dt in -20.0f64..20.0) {
            let env = Envelope::double_exponential_ns(5.0, 25.0);
            let a = Wavepacket::new(env.clone(), 0.0, nu_a).unwrap();
            let b = Wavepacket::new(env, dt, nu_b).unwrap();
            let ab = spectral_overlap(&a, &b);
            let ba = spectral_overlap(&b, &a);
            prop_assert!((ab - ba.conj()).norm() < 1e-12);
            prop_assert!(ab.norm() <= 1.0 + 1e-9);
        }
    }
}
