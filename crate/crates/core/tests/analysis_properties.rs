use std::f64::consts::PI;

use proptest::prelude::*;
use tr_boson::analysis::{events_rotate_111, fidelity, smooth_events, Transform};
use tr_boson::correlation::landscape_theory;
use tr_boson::grid::GridSpec;
use tr_boson::network::{paper_network, tritter};
use tr_boson::sampler::{sample_events, DetectionEvent, NoiseModel};
use tr_boson::wavepacket::paper_sources;

#[test]
fn fidelity_is_stable_across_grid_steps() {
    let u = paper_network(PI / 2.0).unwrap();
    let s = paper_sources();
    let events = sample_events(&u, &s, &NoiseModel::ideal(3), 40_000, 31).unwrap();
    let scores: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&step| {
            let g = GridSpec::square(100.0, step);
            let theory = landscape_theory(&u, &s, [1, 2, 3], &g).unwrap();
            fidelity(&smooth_events(&events, &g, 3.0).unwrap(), &theory).unwrap()
        })
        .collect();
    let spread = scores.iter().cloned().fold(f64::MIN, f64::max) - scores.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.01, "{scores:?}");
}

#[test]
fn tritter_events_are_cyclically_symmetric() {
    let events = sample_events(&tritter(), &paper_sources(), &NoiseModel::ideal(3), 50_000, 4).unwrap();
    let g = GridSpec::default();
    let a = smooth_events(&events, &g, 3.0).unwrap();
    let b = smooth_events(&events_rotate_111(&events, 1), &g, 3.0).unwrap();
    assert!(fidelity(&a, &b).unwrap() > 0.97);
}

fn event_list() -> impl Strategy<Value = Vec<DetectionEvent>> {
    prop::collection::vec(prop::array::uniform3(-60.0..60.0f64), 1..12)
        .prop_map(|ts| ts.into_iter().enumerate().map(|(k, t)| DetectionEvent::threefold(k as u64, t)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn smoothing_is_additive(a in event_list(), b in event_list()) {
        let g = GridSpec::square(40.0, 2.0);
        let fa = smooth_events(&a, &g, 3.0).unwrap();
        let fb = smooth_events(&b, &g, 3.0).unwrap();
        let joined: Vec<_> = a.iter().chain(&b).cloned().collect();
        let fab = smooth_events(&joined, &g, 3.0).unwrap();
        for ((x, y), z) in fa.values().iter().zip(fb.values()).zip(fab.values()) {
            prop_assert!((x + y - z).abs() <= 1e-12 * (1.0 + z.abs()));
        }
    }

    #[test]
    fn three_rotations_are_the_identity(x in -1e3..1e3f64, y in -1e3..1e3f64) {
        let r = Transform::Rotation120;
        let (a, b) = r.apply(x, y);
        let (a, b) = r.apply(a, b);
        let (a, b) = r.apply(a, b);
        prop_assert!((a - x).abs() < 1e-9 && (b - y).abs() < 1e-9);
    }

    #[test]
    fn swap_and_mirror_are_involutions(x in -1e3..1e3f64, y in -1e3..1e3f64) {
        for t in [Transform::AxisSwap, Transform::Mirror] {
            let (a, b) = t.apply(x, y);
            let (a, b) = t.apply(a, b);
            prop_assert!((a - x).abs() < 1e-9 && (b - y).abs() < 1e-9);
        }
    }

    #[test]
    fn relabelling_three_times_restores_events(times in prop::array::uniform3(-50.0..50.0f64)) {
        let e = vec![DetectionEvent::threefold(0, times)];
        let back = events_rotate_111(&events_rotate_111(&events_rotate_111(&e, 1), 1), 1);
        prop_assert_eq!(back, e);
    }
}
