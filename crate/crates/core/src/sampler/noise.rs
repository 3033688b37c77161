//! Per-source loss and multiphoton contamination, plus detector jitter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavepacket::{SourceSet, PAPER_EFFICIENCY};

/// Typical single-photon detector timing jitter (ns).
pub const DEFAULT_JITTER_NS: f64 = 0.5;

/// Excitation probabilities at which the heralded autocorrelation was measured.
pub const G2_EXCITATION: [f64; 5] = [0.01, 0.02, 0.03, 0.04, 0.06];
/// Measured `g²` per source (rows) at each excitation probability (columns).
pub const G2_TABLE: [[f64; 5]; 3] = [
    [0.072, 0.126, 0.201, 0.233, 0.322],
    [0.094, 0.165, 0.222, 0.279, 0.335],
    [0.110, 0.142, 0.220, 0.251, 0.361],
];
/// Operating excitation probability.
pub const PAPER_EXCITATION: f64 = 0.04;

/// Two-photon contamination probability from a heralded `g²`, using
/// `g² ≈ 2q` for small `q`.
pub fn contamination_from_g2(g2: f64) -> f64 {
    g2 / 2.0
}

/// Calibrated `q` for each source at a tabulated excitation probability.
pub fn table_contamination(p_e: f64) -> Option<[f64; 3]> {
    let col = G2_EXCITATION.iter().position(|&p| (p - p_e).abs() < 1e-12)?;
    Some([0, 1, 2].map(|s| contamination_from_g2(G2_TABLE[s][col])))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Per-source transmission into detection, in `[0, 1]`.
    pub efficiency: Vec<f64>,
    /// Per-source probability of one extra (classical) photon, in `[0, 0.5)`.
    pub contamination: Vec<f64>,
    /// Gaussian timing jitter per detection (ns).
    pub jitter_ns: f64,
}

impl NoiseModel {
    /// Lossless, pure, jitter-free.
    pub fn ideal(n_sources: usize) -> Self {
        Self { efficiency: vec![1.0; n_sources], contamination: vec![0.0; n_sources], jitter_ns: 0.0 }
    }

    pub fn uniform(n_sources: usize, efficiency: f64, contamination: f64, jitter_ns: f64) -> Result<Self> {
        let m = Self {
            efficiency: vec![efficiency; n_sources],
            contamination: vec![contamination; n_sources],
            jitter_ns,
        };
        m.validate(n_sources)?;
        Ok(m)
    }

    /// The experiment's operating point: 45 % efficiency, contamination from
    /// the measured `g²` at `p_e = 0.04`, default jitter.
    pub fn paper() -> Self {
        let q = table_contamination(PAPER_EXCITATION).expect("tabulated excitation");
        Self { efficiency: vec![PAPER_EFFICIENCY; 3], contamination: q.to_vec(), jitter_ns: DEFAULT_JITTER_NS }
    }

    /// Takes efficiency and contamination from the source set.
    pub fn from_sources(sources: &SourceSet, jitter_ns: f64) -> Result<Self> {
        let m = Self {
            efficiency: sources.efficiency().to_vec(),
            contamination: sources.contamination().to_vec(),
            jitter_ns,
        };
        m.validate(sources.len())?;
        Ok(m)
    }

    pub fn validate(&self, n_sources: usize) -> Result<()> {
        if self.efficiency.len() != n_sources || self.contamination.len() != n_sources {
            return Err(Error::Sampler(format!(
                "noise model describes {}/{} sources, network has {n_sources}",
                self.efficiency.len(),
                self.contamination.len()
            )));
        }
        if self.efficiency.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::Sampler("efficiency must lie in [0, 1]".into()));
        }
        if self.contamination.iter().any(|q| !(0.0..0.5).contains(q)) {
            return Err(Error::Sampler("contamination must lie in [0, 0.5)".into()));
        }
        if !(self.jitter_ns.is_finite() && self.jitter_ns >= 0.0) {
            return Err(Error::Sampler("jitter must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operating_point_contamination_band() {
        let q = table_contamination(PAPER_EXCITATION).unwrap();
        assert!(q.iter().all(|q| (0.11..=0.14).contains(q)), "{q:?}");
        assert!(table_contamination(0.05).is_none());
    }

    #[test]
    fn validation() {
        assert!(NoiseModel::uniform(3, 1.1, 0.0, 0.0).is_err());
        assert!(NoiseModel::uniform(3, 0.5, 0.5, 0.0).is_err());
        assert!(NoiseModel::uniform(3, 0.5, 0.1, -1.0).is_err());
        assert!(NoiseModel::ideal(2).validate(3).is_err());
        NoiseModel::paper().validate(3).unwrap();
    }
}
