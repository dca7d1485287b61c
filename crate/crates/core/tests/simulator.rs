use levyfluct::identities::{upper_passage_transform, TransformQuery};
use levyfluct::sim::{
    estimate_passage_functional, one_sided_lower_reflection, simulate_euler, simulate_event_exact,
    simulate_with, Mode, Noise, Passage, Stop, StopReason,
};
use levyfluct::{Backend, JumpComponent, ProcessSpec, ScaleEvaluator};
use proptest::prelude::*;

/// Fixed interarrival gaps and jump sizes; no Gaussian noise.
struct Script {
    gaps: Vec<f64>,
    sizes: Vec<f64>,
}

impl Noise for Script {
    fn interarrival(&mut self, _rate: f64) -> f64 {
        if self.gaps.is_empty() {
            f64::INFINITY
        } else {
            self.gaps.remove(0)
        }
    }
    fn jump_size(&mut self, _mixture: &[JumpComponent<f64>]) -> f64 {
        self.sizes.remove(0)
    }
    fn standard_normal(&mut self) -> f64 {
        0.0
    }
}

#[test]
fn hand_computed_exact_path() {
    let spec = ProcessSpec::<f64>::cramer_lundberg(2.0, 1.0, 1.0).unwrap();
    let mut noise = Script {
        gaps: vec![1.0],
        sizes: vec![3.0],
    };
    let p = simulate_with(
        &spec,
        0.0,
        1.0,
        Mode::EventExact,
        Stop::Horizon(1.2),
        &mut noise,
    )
    .unwrap();
    p.check_invariants().unwrap();
    let hit = (0..p.len()).find(|&i| p.w[i] == 1.0).unwrap();
    assert_eq!(p.times[hit], 0.5);
    // rows: start, hit B, pinned until the jump, after the jump, horizon
    assert_eq!(p.len(), 5);
    assert_eq!(p.u[2], 1.0);
    assert_eq!(p.l[2], 0.0);
    assert_eq!(p.l[3], 2.0);
    assert_eq!(p.w[3], 0.0);
    assert_eq!(p.times[3], 1.0);
}

#[test]
fn pure_drift_segment() {
    let spec = ProcessSpec::<f64>::cramer_lundberg(1.0, 1e-3, 1.0).unwrap();
    let mut noise = Script {
        gaps: vec![],
        sizes: vec![],
    };
    let p = simulate_with(
        &spec,
        0.0,
        1.0,
        Mode::EventExact,
        Stop::FirstUpperPassage,
        &mut noise,
    )
    .unwrap();
    assert_eq!(p.last().t, 1.0);
    assert!(p.l.iter().all(|&l| l == 0.0));
}

#[test]
fn seeded_paths_repeat() {
    let spec = ProcessSpec::<f64>::cramer_lundberg(2.0, 1.0, 1.0).unwrap();
    let a = simulate_event_exact(&spec, 0.3, 1.0, Stop::Horizon(20.0), 42).unwrap();
    let b = simulate_event_exact(&spec, 0.3, 1.0, Stop::Horizon(20.0), 42).unwrap();
    let c = simulate_event_exact(&spec, 0.3, 1.0, Stop::Horizon(20.0), 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let bm = ProcessSpec::<f64>::brownian(0.0, 2.0).unwrap();
    let e1 = simulate_euler(&bm, 0.5, 1.0, 1e-3, Stop::Horizon(2.0), 1).unwrap();
    let e2 = simulate_euler(&bm, 0.5, 1.0, 1e-3, Stop::Horizon(2.0), 1).unwrap();
    assert_eq!(e1, e2);
}

#[test]
fn euler_start_at_barrier_passes_at_once() {
    let bm = ProcessSpec::<f64>::brownian(0.0, 2.0).unwrap();
    let p = simulate_euler(&bm, 1.0, 1.0, 1e-4, Stop::FirstUpperPassage, 5).unwrap();
    assert_eq!(p.stop_reason, StopReason::UpperPassage);
    assert_eq!(p.last().t, 0.0);
    // the first free step above B is pushed back by u
    let p = simulate_euler(&bm, 1.0, 1.0, 1e-4, Stop::Horizon(1e-2), 5).unwrap();
    let first_u = p.u.iter().position(|&u| u > 0.0).unwrap();
    assert!(p.times[first_u] <= 1e-2);
}

#[test]
fn running_minimum_matches_reflection() {
    let spec = ProcessSpec::new(
        0.3,
        1.0,
        0.8,
        vec![JumpComponent::new(0.5, 1.0), JumpComponent::new(0.5, 4.0)],
    )
    .unwrap();
    for seed in 0..20 {
        let p = one_sided_lower_reflection(
            &spec,
            0.7,
            Stop::Horizon(10.0),
            Mode::EulerGrid(1e-3),
            seed,
        )
        .unwrap();
        let mut deepest = 0.0f64;
        for i in 0..p.len() {
            deepest = deepest.max(-(p.x0 + p.x[i]));
            assert_eq!(p.l[i], deepest, "seed {seed} row {i}");
            assert_eq!(p.u[i], 0.0);
        }
    }
}

#[test]
fn far_start_never_reflects() {
    let bm = ProcessSpec::<f64>::brownian(0.0, 1.0).unwrap();
    let p = one_sided_lower_reflection(&bm, 50.0, Stop::Horizon(1.0), Mode::EulerGrid(1e-3), 0)
        .unwrap();
    assert!(p.l.iter().all(|&l| l == 0.0));
    assert!(one_sided_lower_reflection(
        &bm,
        1.0,
        Stop::FirstUpperPassage,
        Mode::EulerGrid(1e-3),
        0
    )
    .is_err());
}

#[test]
fn trivial_lower_functional() {
    let spec = ProcessSpec::<f64>::cramer_lundberg(2.0, 1.0, 1.0).unwrap();
    let query = TransformQuery {
        q: 0.0,
        alpha: 0.0,
        theta: 0.0,
        x0: 1.0,
        b: 2.0,
    };
    let e = estimate_passage_functional(&spec, &query, Passage::Lower, 100, 3, Mode::EventExact)
        .unwrap();
    assert_eq!((e.mean, e.std_error), (1.0, 0.0));
}

#[test]
fn exact_and_euler_agree() {
    let spec = ProcessSpec::<f64>::cramer_lundberg(2.0, 1.0, 1.0).unwrap();
    let query = TransformQuery {
        q: 0.5,
        alpha: 1.0,
        theta: 0.0,
        x0: 1.5,
        b: 2.0,
    };
    let n = 10_000;
    let exact = estimate_passage_functional(&spec, &query, Passage::Upper, n, 17, Mode::EventExact)
        .unwrap();
    let dt = 1e-4;
    let grid =
        estimate_passage_functional(&spec, &query, Passage::Upper, n, 18, Mode::EulerGrid(dt))
            .unwrap();
    let se = exact.std_error.hypot(grid.std_error);
    // late detection shifts tau by at most dt, hence the functional by about q dt
    let bias = query.q * dt;
    assert!(
        (exact.mean - grid.mean).abs() <= 3.0 * se + bias,
        "{exact:?} vs {grid:?}"
    );

    let ev = ScaleEvaluator::new(&spec, query.q, Backend::ClosedForm).unwrap();
    let analytic = upper_passage_transform(&ev, &query).unwrap().value;
    assert!(
        exact.z_score(analytic).abs() <= 3.0,
        "{exact:?} vs {analytic}"
    );
}

fn arb_spec() -> impl Strategy<Value = ProcessSpec<f64>> {
    (
        0.1f64..3.0,
        prop_oneof![Just(0.0), 0.05f64..2.0],
        0.0f64..3.0,
        0.05f64..0.95,
        0.3f64..5.0,
        0.3f64..5.0,
    )
        .prop_map(|(c, s2, lam, w, m1, m2)| {
            let mixture = vec![JumpComponent::new(w, m1), JumpComponent::new(1.0 - w, m2)];
            ProcessSpec::new(c, s2, lam, mixture).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_paths_satisfy_invariants(
        spec in arb_spec(),
        frac in 0.0f64..=1.0,
        b in 0.2f64..3.0,
        seed in any::<u64>(),
    ) {
        let p = simulate_euler(&spec, frac * b, b, 1e-2, Stop::Horizon(5.0), seed).unwrap();
        prop_assert!(p.check_invariants().is_ok(), "{:?}", p.check_invariants());
        prop_assert_eq!(p.l[0], 0.0);
        prop_assert_eq!(p.u[0], 0.0);
    }

    #[test]
    fn exact_paths_satisfy_invariants(
        spec in arb_spec(),
        frac in 0.0f64..=1.0,
        b in 0.2f64..3.0,
        seed in any::<u64>(),
    ) {
        prop_assume!(spec.is_bounded_variation());
        let p = simulate_event_exact(&spec, frac * b, b, Stop::Horizon(20.0), seed).unwrap();
        prop_assert!(p.check_invariants().is_ok(), "{:?}", p.check_invariants());
        // no overshoot above B, and u only moves while pinned there
        for i in 1..p.len() {
            prop_assert!(p.w[i] <= b);
            if p.u[i] > p.u[i - 1] {
                prop_assert!(p.w[i - 1] == b && p.w[i] == b);
            }
        }
    }
}
