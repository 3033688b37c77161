//! Symmetries of the landscape under relabelling of the detectors.
//!
//! In difference coordinates `x = t₁ − t₃`, `y = t₂ − t₃`:
//! exchanging labels 1 and 2 is `(x, y) → (y, x)`; the cyclic relabelling
//! `(t₁, t₂, t₃) → (t₃, t₁, t₂)`, a 120° turn about `(1, 1, 1)`, is
//! `(x, y) → (−y, x − y)`; exchanging labels 2 and 3 is their composition
//! `(x, y) → (x − y, −y)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fidelity::overlap;
use crate::error::{Error, Result};
use crate::grid::LandscapeGrid;
use crate::sampler::{DetectionEvent, Record};

/// Smallest fraction of grid points that must map back into the grid.
pub const MIN_OVERLAP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    AxisSwap,
    Rotation120,
    Mirror,
}

impl Transform {
    pub const ALL: [Transform; 3] = [Transform::AxisSwap, Transform::Rotation120, Transform::Mirror];

    pub fn apply(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            Transform::AxisSwap => (y, x),
            Transform::Rotation120 => (-y, x - y),
            Transform::Mirror => (x - y, -y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Transform::AxisSwap => "axis_swap",
            Transform::Rotation120 => "rotation_120",
            Transform::Mirror => "mirror",
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transform {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Transform::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Analysis(format!("unknown transform {s:?}")))
    }
}

/// `f ∘ T` sampled on the grid of `f` (bilinear), `None` where `T` leaves it.
pub fn transformed(f: &LandscapeGrid, t: Transform) -> Vec<Option<f64>> {
    let s = f.spec();
    (0..s.ny())
        .flat_map(|j| (0..s.nx()).map(move |i| (i, j)))
        .map(|(i, j)| {
            let (u, v) = t.apply(s.x(i), s.y(j));
            f.interpolate(u, v)
        })
        .collect()
}

/// Overlap fidelity between `f` and `f ∘ T` over the points where both exist.
pub fn symmetry_score(f: &LandscapeGrid, t: Transform) -> Result<f64> {
    let g = transformed(f, t);
    let (mut a, mut b) = (Vec::with_capacity(g.len()), Vec::with_capacity(g.len()));
    for (&v, w) in f.values().iter().zip(&g) {
        if let Some(w) = w {
            a.push(v);
            b.push(*w);
        }
    }
    let frac = a.len() as f64 / g.len() as f64;
    if frac < MIN_OVERLAP {
        return Err(Error::Analysis(format!("{t} keeps only {:.0}% of the grid", 100.0 * frac)));
    }
    overlap(&a, &b)
}

/// Relabels detectors `p → p + k (mod 3)` so that `(t₁, t₂, t₃)` becomes
/// `(t₃, t₁, t₂)` for `k = 1`.
pub fn events_rotate_111(events: &[DetectionEvent], k: usize) -> Vec<DetectionEvent> {
    events
        .iter()
        .map(|e| {
            let records = e
                .records
                .iter()
                .map(|r| Record { port: if (1..=3).contains(&r.port) { (r.port - 1 + k) % 3 + 1 } else { r.port }, time: r.time })
                .collect();
            DetectionEvent::new(e.event_id, e.batch_id, records, e.contaminated)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn radial() -> LandscapeGrid {
        LandscapeGrid::from_fn(GridSpec::default(), |x, y| (-(x * x + y * y) / 800.0).exp()).unwrap()
    }

    #[test]
    fn transforms_compose() {
        let (x, y) = (3.0, -7.5);
        let r = |p: (f64, f64)| Transform::Rotation120.apply(p.0, p.1);
        assert_eq!(r(r(r((x, y)))), (x, y));
        let m = Transform::Mirror.apply(x, y);
        assert_eq!(Transform::Mirror.apply(m.0, m.1), (x, y));
        let turned = r((x, y));
        assert_eq!(Transform::AxisSwap.apply(turned.0, turned.1), m);
    }

    #[test]
    fn swap_of_radial_is_exact() {
        assert!((symmetry_score(&radial(), Transform::AxisSwap).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hexagonal_function_is_rotation_invariant() {
        // x² − xy + y² is invariant under the 120° turn and both mirrors.
        let f = LandscapeGrid::from_fn(GridSpec::default(), |x, y| (-(x * x - x * y + y * y) / 600.0).exp()).unwrap();
        for t in Transform::ALL {
            assert!(symmetry_score(&f, t).unwrap() > 0.9999, "{t}");
        }
    }

    #[test]
    fn lopsided_function_scores_lower() {
        let f = LandscapeGrid::from_fn(GridSpec::default(), |x, y| (-((x - 40.0).powi(2) + y * y) / 100.0).exp()).unwrap();
        assert!(symmetry_score(&f, Transform::AxisSwap).unwrap() < 0.1);
    }

    #[test]
    fn rotating_events() {
        let ev = vec![DetectionEvent::threefold(0, [10.0, 20.0, 30.0])];
        assert_eq!(events_rotate_111(&ev, 1)[0].times(), Some([30.0, 10.0, 20.0]));
        assert_eq!(events_rotate_111(&ev, 3), ev);
        assert_eq!(events_rotate_111(&events_rotate_111(&ev, 1), 2), ev);
    }

    #[test]
    fn names_round_trip() {
        for t in Transform::ALL {
            assert_eq!(t.name().parse::<Transform>().unwrap(), t);
        }
        assert!("spin".parse::<Transform>().is_err());
    }
}
