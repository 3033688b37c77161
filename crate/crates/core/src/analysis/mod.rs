//! Figures of merit for landscapes and event sets: smoothing, overlap
//! fidelity, Fourier beat periods and relabelling symmetries.

mod fidelity;
pub mod fourier;
mod report;
mod smoothing;
mod symmetry;

pub use fidelity::fidelity;
pub use fourier::{beat_contrast, beat_periods, beat_periods_windowed, BeatPeriods, Period, Spectrum, Window};
pub use report::{analyze, AnalysisReport, AnalysisThresholds};
pub use smoothing::{smooth_events, DEFAULT_R0_NS};
pub use symmetry::{events_rotate_111, symmetry_score, transformed, Transform, MIN_OVERLAP};
