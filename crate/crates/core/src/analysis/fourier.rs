//! Beat periods from the axis marginals of a landscape.
//!
//! Each marginal is mean-subtracted and transformed; the dominant spectral
//! peak (a bin exceeding both neighbours, so the monotone low-frequency lobe
//! of the envelope never qualifies) is refined by three-point quadratic
//! interpolation of the magnitudes.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::LandscapeGrid;
use crate::C64;

/// A peak must exceed this multiple of the median spectral magnitude.
pub const NOISE_FLOOR_FACTOR: f64 = 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// No taper; the landscape marginals decay towards the grid edges.
    #[default]
    Rectangular,
    Hann,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Period {
    /// ns
    pub value: f64,
    /// Half-bin uncertainty, ns.
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BeatPeriods {
    pub x: Period,
    pub y: Period,
}

/// Magnitude spectrum of one marginal.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// `|X_k|` for `k = 0..=n/2` after mean subtraction (so `magnitudes[0] ≈ 0`).
    pub magnitudes: Vec<f64>,
    /// `|X_0|` of the marginal before mean subtraction.
    pub dc: f64,
    /// Number of samples.
    pub len: usize,
    /// Sample spacing, ns.
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub bin: usize,
    /// Interpolated fractional bin.
    pub position: f64,
    pub magnitude: f64,
}

impl Spectrum {
    pub fn new(samples: &[f64], step: f64, window: Window) -> Self {
        let n = samples.len();
        let taper: Vec<f64> = match window {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|k| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n.max(2) - 1) as f64).cos())
                .collect(),
        };
        let dc: f64 = samples.iter().zip(&taper).map(|(s, w)| s * w).sum::<f64>().abs();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let mut buf: Vec<C64> = samples.iter().zip(&taper).map(|(s, w)| C64::new((s - mean) * w, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let magnitudes = buf[..=n / 2].iter().map(|z| z.norm()).collect();
        Self { magnitudes, dc, len: n, step }
    }

    /// Largest interior local maximum with `k ≥ 2`.
    pub fn dominant_peak(&self) -> Option<Peak> {
        let m = &self.magnitudes;
        let mut best: Option<Peak> = None;
        for k in 2..m.len().saturating_sub(1) {
            if m[k] > m[k - 1] && m[k] >= m[k + 1] && best.is_none_or(|p| m[k] > p.magnitude) {
                let denom = m[k - 1] - 2.0 * m[k] + m[k + 1];
                let delta = if denom != 0.0 { 0.5 * (m[k - 1] - m[k + 1]) / denom } else { 0.0 };
                best = Some(Peak { bin: k, position: k as f64 + delta, magnitude: m[k] });
            }
        }
        best
    }

    /// Median magnitude over the non-DC bins.
    pub fn noise_floor(&self) -> f64 {
        let mut v: Vec<f64> = self.magnitudes[1..].to_vec();
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    }

    pub fn frequency(&self, position: f64) -> f64 {
        position / (self.len as f64 * self.step)
    }

    /// Dominant peak magnitude relative to the DC magnitude (0 if no peak).
    pub fn peak_to_dc(&self) -> f64 {
        match self.dominant_peak() {
            Some(p) if self.dc > 0.0 => p.magnitude / self.dc,
            _ => 0.0,
        }
    }
}

fn period_of(samples: &[f64], step: f64, window: Window, axis: &'static str) -> Result<Period> {
    if samples.len() < 8 {
        return Err(Error::Analysis(format!("{axis} marginal too short for a spectrum")));
    }
    let spec = Spectrum::new(samples, step, window);
    let floor = spec.noise_floor();
    let peak = spec.dominant_peak().ok_or(Error::NoBeatPeak { axis, peak: 0.0, floor })?;
    if peak.magnitude <= NOISE_FLOOR_FACTOR * floor {
        return Err(Error::NoBeatPeak { axis, peak: peak.magnitude, floor });
    }
    let value = 1.0 / spec.frequency(peak.position);
    let error = 0.5 * value / peak.position;
    Ok(Period { value, error })
}

/// Dominant beat period along each axis.
pub fn beat_periods(f: &LandscapeGrid) -> Result<BeatPeriods> {
    beat_periods_windowed(f, Window::Rectangular)
}

pub fn beat_periods_windowed(f: &LandscapeGrid, window: Window) -> Result<BeatPeriods> {
    let step = f.spec().step;
    Ok(BeatPeriods {
        x: period_of(&f.marginal_x(), step, window, "x")?,
        y: period_of(&f.marginal_y(), step, window, "y")?,
    })
}

/// Beat-peak to DC ratios `(x, y)` of the axis marginals.
pub fn beat_contrast(f: &LandscapeGrid) -> (f64, f64) {
    let step = f.spec().step;
    (
        Spectrum::new(&f.marginal_x(), step, Window::Rectangular).peak_to_dc(),
        Spectrum::new(&f.marginal_y(), step, Window::Rectangular).peak_to_dc(),
    )
}
