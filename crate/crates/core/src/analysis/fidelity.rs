use crate::error::{Error, Result};
use crate::grid::LandscapeGrid;

/// Bhattacharyya overlap `Σ√(a·b) / √(Σa · Σb)` of two landscapes on the
/// same grid.
pub fn fidelity(a: &LandscapeGrid, b: &LandscapeGrid) -> Result<f64> {
    if !a.spec().same_as(b.spec()) {
        return Err(Error::Analysis(format!("grid mismatch: {:?} vs {:?}", a.spec(), b.spec())));
    }
    overlap(a.values(), b.values())
}

pub(crate) fn overlap(a: &[f64], b: &[f64]) -> Result<f64> {
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if sa <= 0.0 || sb <= 0.0 {
        return Err(Error::Analysis("fidelity of an all-zero landscape is undefined".into()));
    }
    let cross: f64 = a.iter().zip(b).map(|(x, y)| (x * y).sqrt()).sum();
    Ok(cross / (sa * sb).sqrt())
}
