use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, LandscapeGrid};
use crate::sampler::DetectionEvent;

/// Coincidence-landscape smoothing radius (ns).
pub const DEFAULT_R0_NS: f64 = 3.0;
/// Kernel truncation radius in units of `r0`; the neglected weight is `e^{-49}`.
const CUTOFF: f64 = 7.0;

/// `f(x, y) = Σ_i exp(−[(x − x_i)² + (y − y_i)²] / r0²)` with
/// `(x_i, y_i) = (t₁ − t₃, t₂ − t₃)`. The kernel is left unnormalized.
pub fn smooth_events(events: &[DetectionEvent], spec: &GridSpec, r0: f64) -> Result<LandscapeGrid> {
    spec.validate()?;
    if events.is_empty() {
        return Err(Error::Analysis("no events to smooth".into()));
    }
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::Analysis(format!("smoothing radius must be positive, got {r0}")));
    }
    let points: Vec<(f64, f64)> = events
        .iter()
        .map(|e| {
            e.differences().ok_or_else(|| {
                Error::Analysis(format!("event {} lacks one record per port 1, 2, 3", e.event_id))
            })
        })
        .collect::<Result<_>>()?;
    let (nx, ny) = (spec.nx(), spec.ny());
    let reach = CUTOFF * r0;
    let inv = 1.0 / (r0 * r0);
    let values: Vec<f64> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let y = spec.y(j);
            let mut row = vec![0.0; nx];
            for &(xe, ye) in &points {
                let dy = y - ye;
                if dy.abs() > reach {
                    continue;
                }
                let wy = (-dy * dy * inv).exp();
                let lo = (((xe - reach - spec.x_min) / spec.step).ceil().max(0.0)) as usize;
                let hi = (((xe + reach - spec.x_min) / spec.step).floor()).min(nx as f64 - 1.0);
                if hi < 0.0 {
                    continue;
                }
                for (i, cell) in row.iter_mut().enumerate().take(hi as usize + 1).skip(lo) {
                    let dx = spec.x(i) - xe;
                    *cell += wy * (-dx * dx * inv).exp();
                }
            }
            row
        })
        .collect();
    Ok(LandscapeGrid::new(*spec, values)?
        .with_meta("kind", "smoothed_events")
        .with_meta("r0_ns", r0)
        .with_meta("n_events", events.len()))
}
