//! Analysis report, written either as a TOML document or as flat
//! `key=value` lines.
//!
//! TOML layout:
//!
//! ```toml
//! n_events = 100000
//! r0_ns = 3.0
//! fidelity = 0.987
//! beat_notes = []
//!
//! [beat_period_x]   # absent when no beat peak was found
//! value = 50.3
//! error = 0.25
//!
//! [symmetry_scores]
//! axis_swap = 0.71
//! mirror = 0.70
//! rotation_120 = 0.996
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::fourier::{beat_periods, Period};
use super::{fidelity, smooth_events, symmetry_score, Transform};
use crate::error::{Error, Result};
use crate::grid::LandscapeGrid;
use crate::sampler::DetectionEvent;

/// Measured average fidelity over the four network phases, for comparison.
pub const REFERENCE_AVERAGE_FIDELITY: &str = "0.936(13)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n_events: usize,
    pub r0_ns: f64,
    pub fidelity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beat_period_x: Option<Period>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beat_period_y: Option<Period>,
    /// Why a beat period is missing.
    #[serde(default)]
    pub beat_notes: Vec<String>,
    pub symmetry_scores: BTreeMap<String, f64>,
}

/// Optional pass/fail limits.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AnalysisThresholds {
    pub min_fidelity: Option<f64>,
    pub min_rotation_120: Option<f64>,
}

/// Smooths `events` onto the theory grid and compares.
pub fn analyze(events: &[DetectionEvent], theory: &LandscapeGrid, r0: f64) -> Result<AnalysisReport> {
    let smoothed = smooth_events(events, theory.spec(), r0)?;
    let fid = fidelity(&smoothed, theory)?;
    let mut notes = Vec::new();
    let (bx, by) = match beat_periods(&smoothed) {
        Ok(p) => (Some(p.x), Some(p.y)),
        Err(e @ Error::NoBeatPeak { .. }) => {
            notes.push(e.to_string());
            (None, None)
        }
        Err(e) => return Err(e),
    };
    let symmetry_scores = Transform::ALL
        .into_iter()
        .map(|t| Ok((t.name().to_string(), symmetry_score(&smoothed, t)?)))
        .collect::<Result<_>>()?;
    Ok(AnalysisReport {
        n_events: events.len(),
        r0_ns: r0,
        fidelity: fid,
        beat_period_x: bx,
        beat_period_y: by,
        beat_notes: notes,
        symmetry_scores,
    })
}

impl AnalysisReport {
    pub fn to_toml(&self) -> String {
        let mut out = toml::to_string(self).expect("report serializes");
        writeln!(out, "\n# reference: measured average fidelity {REFERENCE_AVERAGE_FIDELITY}").unwrap();
        out
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Analysis(format!("bad report: {e}")))
    }

    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n_events={}", self.n_events).unwrap();
        writeln!(out, "r0_ns={}", self.r0_ns).unwrap();
        writeln!(out, "fidelity={}", self.fidelity).unwrap();
        for (axis, p) in [("x", self.beat_period_x), ("y", self.beat_period_y)] {
            match p {
                Some(p) => {
                    writeln!(out, "beat_period_{axis}_ns={}", p.value).unwrap();
                    writeln!(out, "beat_period_{axis}_err_ns={}", p.error).unwrap();
                }
                None => writeln!(out, "beat_period_{axis}_ns=none").unwrap(),
            }
        }
        for (k, v) in &self.symmetry_scores {
            writeln!(out, "symmetry.{k}={v}").unwrap();
        }
        out
    }

    /// Descriptions of every violated threshold.
    pub fn failures(&self, limits: &AnalysisThresholds) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(min) = limits.min_fidelity {
            if self.fidelity.is_nan() || self.fidelity < min {
                out.push(format!("fidelity {:.6} < {min}", self.fidelity));
            }
        }
        if let Some(min) = limits.min_rotation_120 {
            let s = self.symmetry_scores.get("rotation_120").copied().unwrap_or(0.0);
            if s.is_nan() || s < min {
                out.push(format!("rotation_120 score {s:.6} < {min}"));
            }
        }
        out
    }
}
