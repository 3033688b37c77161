//! Time-resolved multiphoton detection densities.
//!
//! Photon `j` enters input mode `j` (1-based) with wavepacket `ξ_j`. For
//! detections at ports `d_i` and times `t_i` the amplitude matrix is
//! `M_ij = U[d_i, j] · ξ_j(t_i)` and the density over ordered records is
//! `p(d, t) = |perm M|² / N!`. With this convention the sum over all `n^N`
//! ordered port tuples of `∫ p dᴺt` is one for a lossless network.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, LandscapeGrid};
use crate::matrix::ComplexMatrix;
use crate::permanent::permanent_slice;
use crate::wavepacket::SourceSet;
use crate::C64;

/// Largest step of the `t₃` marginalization (ns).
pub const T3_STEP_NS: f64 = 0.5;

/// Ordered detection records: photon `i` seen at port `ports[i]` (1-based)
/// at time `times[i]` (ns).
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionConfig {
    pub ports: Vec<usize>,
    pub times: Vec<f64>,
}

impl DetectionConfig {
    pub fn new(ports: Vec<usize>, times: Vec<f64>) -> Self {
        Self { ports, times }
    }

    fn validate(&self, n_modes: usize, n_photons: usize) -> Result<()> {
        if self.ports.len() != self.times.len() {
            return Err(Error::InvalidDetection(format!(
                "{} ports but {} times",
                self.ports.len(),
                self.times.len()
            )));
        }
        if self.ports.len() != n_photons {
            return Err(Error::InvalidDetection(format!(
                "{} records for {n_photons} photons",
                self.ports.len()
            )));
        }
        if let Some(&p) = self.ports.iter().find(|&&p| p == 0 || p > n_modes) {
            return Err(Error::ModeOutOfRange { mode: p, n_modes });
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidDetection("non-finite detection time".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_network(u: &ComplexMatrix, sources: &SourceSet) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotSquare { rows: u.n_rows(), cols: u.n_cols() });
    }
    if sources.len() > u.n_rows() {
        return Err(Error::InvalidDetection(format!(
            "{} photons but only {} input modes",
            sources.len(),
            u.n_rows()
        )));
    }
    Ok(())
}

pub fn amplitude_matrix(u: &ComplexMatrix, sources: &SourceSet, cfg: &DetectionConfig) -> Result<ComplexMatrix> {
    check_network(u, sources)?;
    let n = sources.len();
    cfg.validate(u.n_rows(), n)?;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| u[(cfg.ports[i] - 1, j)] * sources.get(j).amplitude(cfg.times[i])))
}

/// `|perm M|² / N!` in units of `1/nsᴺ`.
pub fn joint_density(u: &ComplexMatrix, sources: &SourceSet, cfg: &DetectionConfig) -> Result<f64> {
    let m = amplitude_matrix(u, sources, cfg)?;
    let n = m.n_rows();
    let perm = permanent_slice(m.entries(), n);
    Ok(perm.norm_sqr() / factorial(n))
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Amplitudes of every photon on a uniform time lattice
/// `origin + k·step`, `k = 0..len`, pre-multiplied by the network column
/// for one output port.
struct PortTable {
    origin: f64,
    step: f64,
    /// `values[k * n + j] = U[d, j] · ξ_j(origin + k·step)`
    values: Vec<C64>,
}

impl PortTable {
    fn new(u: &ComplexMatrix, sources: &SourceSet, port: usize, origin: f64, step: f64, len: usize) -> Self {
        let n = sources.len();
        let mut values = Vec::with_capacity(len * n);
        for k in 0..len {
            let t = origin + k as f64 * step;
            for j in 0..n {
                values.push(u[(port - 1, j)] * sources.get(j).amplitude(t));
            }
        }
        Self { origin, step, values }
    }

    #[inline]
    fn row(&self, k: usize, n: usize) -> &[C64] {
        &self.values[k * n..(k + 1) * n]
    }
}

/// Theoretical threefold landscape for one photon per port.
///
/// `f(x, y) = ∫ |perm M|² dt₃` with port `ports[0]` at `t₃ + x`,
/// `ports[1]` at `t₃ + y` and `ports[2]` at `t₃`; this is the ordered
/// density times `3!`, i.e. the density of unordered one-per-port events.
/// The `t₃` integral is a trapezoid sum with step `≤ 0.5 ns` on a lattice
/// commensurate with the grid, so each cell is computed from tabulated
/// amplitudes and results do not depend on thread count.
pub fn landscape_theory(
    u: &ComplexMatrix,
    sources: &SourceSet,
    ports: [usize; 3],
    grid: &GridSpec,
) -> Result<LandscapeGrid> {
    grid.validate()?;
    check_network(u, sources)?;
    if sources.len() != 3 {
        return Err(Error::InvalidDetection(format!("landscape needs 3 photons, got {}", sources.len())));
    }
    let n_modes = u.n_rows();
    for &p in &ports {
        if p == 0 || p > n_modes {
            return Err(Error::ModeOutOfRange { mode: p, n_modes });
        }
    }
    if ports[0] == ports[1] || ports[1] == ports[2] || ports[0] == ports[2] {
        return Err(Error::InvalidDetection(format!("landscape ports must be distinct, got {ports:?}")));
    }

    let sub = (grid.step / T3_STEP_NS).ceil().max(1.0) as usize;
    let h = grid.step / sub as f64;
    let (s_lo, s_hi) = sources.support();
    let n_t3 = ((s_hi - s_lo) / h).ceil() as usize + 1;
    let (nx, ny) = (grid.nx(), grid.ny());
    let x_table = PortTable::new(u, sources, ports[0], s_lo + grid.x_min, h, n_t3 + (nx - 1) * sub);
    let y_table = PortTable::new(u, sources, ports[1], s_lo + grid.y_min, h, n_t3 + (ny - 1) * sub);
    let z_table = PortTable::new(u, sources, ports[2], s_lo, h, n_t3);

    let values: Vec<f64> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|jy| {
            let (x_table, y_table, z_table) = (&x_table, &y_table, &z_table);
            (0..nx).map(move |ix| {
                let x = grid.x(ix);
                let y = grid.y(jy);
                // All three times inside [s_lo, s_hi].
                let t3_lo = s_lo - x.min(y).min(0.0);
                let t3_hi = s_hi - x.max(y).max(0.0);
                if t3_hi < t3_lo {
                    return 0.0;
                }
                let k_lo = ((t3_lo - s_lo) / h - 1e-9).ceil().max(0.0) as usize;
                let k_hi = (((t3_hi - s_lo) / h + 1e-9).floor() as usize).min(n_t3 - 1);
                let mut acc = 0.0;
                let mut m = [C64::new(0.0, 0.0); 9];
                for k in k_lo..=k_hi {
                    m[0..3].copy_from_slice(x_table.row(k + ix * sub, 3));
                    m[3..6].copy_from_slice(y_table.row(k + jy * sub, 3));
                    m[6..9].copy_from_slice(z_table.row(k, 3));
                    acc += permanent_slice(&m, 3).norm_sqr();
                }
                acc * h
            })
        })
        .collect();

    debug_assert!(x_table.origin.is_finite() && y_table.step == z_table.step);
    let det = sources.detunings();
    let grid = LandscapeGrid::new(*grid, values)?
        .with_meta("ports", format!("{},{},{}", ports[0], ports[1], ports[2]))
        .with_meta("detunings_mhz", det.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
        .with_meta("envelope", format!("{:?}", sources.get(0).envelope()))
        .with_meta("t3_step_ns", h);
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{circuit_to_unitary, paper_network, CircuitElement};
    use crate::wavepacket::{paper_sources, Envelope, Wavepacket};
    use proptest::prelude::*;

    fn bs50() -> ComplexMatrix {
        circuit_to_unitary(&[CircuitElement::beamsplitter(1, 2, 0.5)], 2).unwrap()
    }

    fn pair(d_nu: f64) -> SourceSet {
        let env = Envelope::double_exponential_ns(5.0, 25.0);
        SourceSet::ideal(vec![
            Wavepacket::new(env.clone(), 0.0, 40.0 + d_nu).unwrap(),
            Wavepacket::new(env, 0.0, 40.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_photon_matrix() {
        let u = bs50();
        let s = SourceSet::ideal(vec![pair(0.0).get(0).clone()]).unwrap();
        let m = amplitude_matrix(&u, &s, &DetectionConfig::new(vec![2], vec![7.0])).unwrap();
        assert_eq!(m[(0, 0)], u[(1, 0)] * s.get(0).amplitude(7.0));
    }

    #[test]
    fn equal_records_give_equal_rows() {
        let u = paper_network(0.3).unwrap();
        let s = paper_sources().identical();
        let m = amplitude_matrix(&u, &s, &DetectionConfig::new(vec![2, 2, 1], vec![9.0, 9.0, 4.0])).unwrap();
        assert_eq!(m.row(0), m.row(1));
    }

    #[test]
    fn hom_zero_at_equal_times() {
        for d_nu in [0.0, 20.0, 39.4] {
            let s = pair(d_nu);
            for t in [0.5, 3.0, 17.0, 60.0] {
                let p = joint_density(&bs50(), &s, &DetectionConfig::new(vec![1, 2], vec![t, t])).unwrap();
                assert!(p < 1e-20, "Δν={d_nu} t={t}: {p}");
            }
        }
    }

    #[test]
    fn hom_nonzero_away_from_equal_times_for_distinct_colors() {
        let s = pair(20.0);
        let p = joint_density(&bs50(), &s, &DetectionConfig::new(vec![1, 2], vec![10.0, 22.5])).unwrap();
        assert!(p > 1e-6);
    }

    #[test]
    fn permanent_vanishes_at_equal_times_for_u_zero() {
        let u = paper_network(0.0).unwrap();
        let s = paper_sources();
        let m = amplitude_matrix(&u, &s, &DetectionConfig::new(vec![1, 2, 3], vec![0.0; 3])).unwrap();
        assert!(permanent_slice(m.entries(), 3).norm() < 1e-10);
        let m = amplitude_matrix(&u, &s, &DetectionConfig::new(vec![1, 2, 3], vec![12.0; 3])).unwrap();
        let scale = s.wavepackets().iter().map(|w| w.amplitude(12.0).norm()).product::<f64>();
        assert!(permanent_slice(m.entries(), 3).norm() < 1e-10 * scale.max(1e-300));
    }

    #[test]
    fn bad_detection_configs() {
        let u = paper_network(0.0).unwrap();
        let s = paper_sources();
        let bad_port = DetectionConfig::new(vec![1, 4, 2], vec![0.0; 3]);
        assert!(matches!(joint_density(&u, &s, &bad_port), Err(Error::ModeOutOfRange { mode: 4, .. })));
        let short = DetectionConfig::new(vec![1, 2], vec![0.0; 2]);
        assert!(joint_density(&u, &s, &short).is_err());
        let grid = GridSpec { step: -1.0, ..GridSpec::default() };
        assert!(landscape_theory(&u, &s, [1, 2, 3], &grid).is_err());
        assert!(landscape_theory(&u, &s, [1, 1, 3], &GridSpec::square(4.0, 1.0)).is_err());
    }

    #[test]
    fn identical_photons_at_u_zero_never_coincide() {
        let u = paper_network(0.0).unwrap();
        let s = paper_sources().identical();
        let g = landscape_theory(&u, &s, [1, 2, 3], &GridSpec::square(30.0, 2.0)).unwrap();
        let scale = landscape_theory(&u, &paper_sources(), [1, 2, 3], &GridSpec::square(30.0, 2.0)).unwrap().max();
        assert!(g.max() <= 1e-12 * scale, "{} vs {}", g.max(), scale);
    }

    #[test]
    fn landscape_matches_direct_integration() {
        let u = paper_network(1.0).unwrap();
        let s = paper_sources();
        let grid = GridSpec::square(20.0, 5.0);
        let g = landscape_theory(&u, &s, [1, 2, 3], &grid).unwrap();
        let (lo, hi) = s.support();
        for &(x, y) in &[(0.0, 5.0), (-15.0, 10.0), (20.0, -20.0)] {
            let h = 0.5;
            let n = ((hi - lo) / h) as usize;
            let mut acc = 0.0;
            for k in 0..=n {
                let t3 = lo + k as f64 * h;
                let cfg = DetectionConfig::new(vec![1, 2, 3], vec![t3 + x, t3 + y, t3]);
                acc += 6.0 * joint_density(&u, &s, &cfg).unwrap();
            }
            acc *= h;
            let v = g.nearest(x, y).unwrap();
            assert!((v - acc).abs() <= 1e-9 * acc.max(1e-12), "({x},{y}): {v} vs {acc}");
        }
    }

    proptest! {
        #[test]
        fn gauge_invariance(a in prop::collection::vec(0.0f64..6.3, 6), t in prop::collection::vec(0.0f64..80.0, 3), ports in prop::collection::vec(1usize..=3, 3)) {
            let u = paper_network(0.7).unwrap();
            let g = &(&ComplexMatrix::phase_diagonal(&a[..3]) * &u) * &ComplexMatrix::phase_diagonal(&a[3..]);
            let s = paper_sources();
            let cfg = DetectionConfig::new(ports, t);
            let p = joint_density(&u, &s, &cfg).unwrap();
            let q = joint_density(&g, &s, &cfg).unwrap();
            prop_assert!((p - q).abs() <= 1e-12 * p.max(1e-30));
        }

        #[test]
        fn exchange_symmetry(t in prop::collection::vec(0.0f64..80.0, 3), ports in prop::collection::vec(1usize..=3, 3), perm in 0usize..6) {
            let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
            let u = paper_network(1.9).unwrap();
            let s = paper_sources();
            let p = joint_density(&u, &s, &DetectionConfig::new(ports.clone(), t.clone())).unwrap();
            let q = joint_density(&u, &s, &DetectionConfig::new(
                order.iter().map(|&k| ports[k]).collect(),
                order.iter().map(|&k| t[k]).collect(),
            )).unwrap();
            prop_assert!((p - q).abs() <= 1e-12 * p.max(1e-30));
        }

        #[test]
        fn common_detuning_offset_is_invisible(offset in -100.0f64..100.0, t in prop::collection::vec(0.0f64..80.0, 3)) {
            let u = paper_network(0.0).unwrap();
            let s = paper_sources();
            let shifted = s.with_detunings(&s.detunings().iter().map(|d| d + offset).collect::<Vec<_>>()).unwrap();
            let cfg = DetectionConfig::new(vec![1, 2, 3], t);
            let p = joint_density(&u, &s, &cfg).unwrap();
            let q = joint_density(&u, &shifted, &cfg).unwrap();
            prop_assert!((p - q).abs() <= 1e-12 * p.max(1e-30));
        }
    }
}
