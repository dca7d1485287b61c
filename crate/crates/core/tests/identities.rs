use levyfluct::identities::{
    inverse_local_time_exponent, local_time_jump_rate, lower_passage_transform, two_sided_exit,
    upper_passage_transform, TransformQuery,
};
use levyfluct::{Backend, JumpComponent, ProcessSpec, ScaleEvaluator};

fn cl() -> ProcessSpec<f64> {
    ProcessSpec::cramer_lundberg(2.0, 1.0, 1.0).unwrap()
}

fn mixed() -> ProcessSpec<f64> {
    ProcessSpec::new(
        0.5,
        0.5,
        1.5,
        vec![JumpComponent::new(0.4, 0.8), JumpComponent::new(0.6, 3.0)],
    )
    .unwrap()
}

fn bm() -> ProcessSpec<f64> {
    ProcessSpec::brownian(0.0, 2.0).unwrap()
}

fn negative_mean() -> ProcessSpec<f64> {
    ProcessSpec::new(
        0.4,
        0.0,
        1.0,
        vec![JumpComponent::new(0.5, 1.0), JumpComponent::new(0.5, 2.0)],
    )
    .unwrap()
}

fn ev(spec: &ProcessSpec<f64>, q: f64) -> ScaleEvaluator<f64> {
    ScaleEvaluator::new(spec, q, Backend::ClosedForm).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// 2 specs x 3 q x 2 alpha offsets x 2 starting points = 24 points; at each,
/// the passage transforms, exponent and jump rate computed under the original
/// measure must match their tilted-measure counterparts.
#[test]
fn tilt_consistency_grid() {
    let b = 2.0;
    let mut points = 0;
    for spec in [cl(), mixed()] {
        for q in [0.1, 1.0, 3.0] {
            let orig = ev(&spec, q);
            let tilted_spec = spec.tilt(q).unwrap();
            let tilted = ev(tilted_spec.spec(), 0.0);
            let phi = orig.phi_q();
            assert_eq!(phi, tilted_spec.phi_q());
            for (i, offset) in [0.2, 1.5].into_iter().enumerate() {
                for x0 in [0.3 * b, 0.8 * b] {
                    let alpha = phi + offset;
                    let theta = [0.3, 1.0][i];
                    let query = TransformQuery::new(q, alpha, theta, x0, b);
                    let shifted = TransformQuery::new(0.0, alpha - phi, theta + phi, x0, b);

                    let lower = lower_passage_transform(&orig, &query).unwrap().value;
                    let lower_t = (phi * x0).exp()
                        * lower_passage_transform(&tilted, &shifted).unwrap().value;
                    assert!(
                        close(lower, lower_t, 1e-9),
                        "lower {lower} vs {lower_t} at {query:?}"
                    );

                    let upper = upper_passage_transform(&orig, &query).unwrap().value;
                    let upper_t = (-phi * (b - x0)).exp()
                        * upper_passage_transform(&tilted, &shifted).unwrap().value;
                    assert!(
                        close(upper, upper_t, 1e-9),
                        "upper {upper} vs {upper_t} at {query:?}"
                    );

                    let exponent = inverse_local_time_exponent(&orig, alpha, b).unwrap();
                    let exponent_t =
                        inverse_local_time_exponent(&tilted, alpha - phi, b).unwrap() - phi;
                    assert!(
                        close(exponent, exponent_t, 1e-9),
                        "exponent {exponent} vs {exponent_t}"
                    );

                    let rate = local_time_jump_rate(&orig, b).unwrap();
                    let rate_t = phi + local_time_jump_rate(&tilted, b).unwrap();
                    assert!(close(rate, rate_t, 1e-9), "rate {rate} vs {rate_t}");
                    points += 1;
                }
            }
        }
    }
    assert_eq!(points, 24);
}

#[test]
fn passage_transforms_are_probabilistic() {
    let b = 1.5;
    for spec in [cl(), mixed(), bm(), negative_mean()] {
        for q in [0.0, 0.5] {
            let e = ev(&spec, q);
            let alpha = e.phi_q() + 0.7;
            let mut prev_upper = 0.0;
            for k in 0..=10 {
                let x0 = b * k as f64 / 10.0;
                let query = TransformQuery::new(q, alpha, 0.4, x0, b);
                let upper = upper_passage_transform(&e, &query).unwrap().value;
                let lower = lower_passage_transform(&e, &query).unwrap().value;
                assert!(upper > 0.0 && upper <= 1.0 + 1e-12, "{upper}");
                assert!((-1e-12..=1.0 + 1e-12).contains(&lower), "{lower}");
                // starting higher reaches B sooner
                assert!(upper >= prev_upper - 1e-12);
                prev_upper = upper;
            }
            let exit = two_sided_exit(&e, 0.5, 1.0).unwrap();
            assert!((0.0..=1.0).contains(&exit));
        }
    }
}

#[test]
fn lower_transform_decreases_in_alpha_and_theta() {
    let e = ev(&mixed(), 0.2);
    let base = e.phi_q();
    let at = |alpha: f64, theta: f64| {
        lower_passage_transform(&e, &TransformQuery::new(0.2, alpha, theta, 0.6, 1.2))
            .unwrap()
            .value
    };
    for k in 0..10 {
        let a = base + 0.3 * k as f64;
        assert!(at(a + 0.3, 0.5) <= at(a, 0.5) + 1e-12);
        assert!(at(a, 0.5 + 0.3 * k as f64) <= at(a, 0.5) + 1e-12);
    }
}

/// Every identity at `q = 1e-6` stays within `1e-3` relative of its `q = 0` value.
#[test]
fn small_q_continuity() {
    let b = 1.5;
    let q_small = 1e-6;
    for spec in [cl(), mixed(), bm(), negative_mean()] {
        let e0 = ev(&spec, 0.0);
        let e1 = ev(&spec, q_small);
        let alpha = e1.phi_q().max(e0.phi_q()) + 0.5;
        for x0 in [0.0, 0.4, 1.1, b] {
            for theta in [0.0, 0.7] {
                let v0 =
                    lower_passage_transform(&e0, &TransformQuery::new(0.0, alpha, theta, x0, b))
                        .unwrap()
                        .value;
                let v1 = lower_passage_transform(
                    &e1,
                    &TransformQuery::new(q_small, alpha, theta, x0, b),
                )
                .unwrap()
                .value;
                assert!(close(v0, v1, 1e-3), "lower {v0} vs {v1}");
            }
            let u0 = upper_passage_transform(&e0, &TransformQuery::new(0.0, alpha, 0.0, x0, b))
                .unwrap()
                .value;
            let u1 = upper_passage_transform(&e1, &TransformQuery::new(q_small, alpha, 0.0, x0, b))
                .unwrap()
                .value;
            assert!(close(u0, u1, 1e-3), "upper {u0} vs {u1}");
        }
        let x0 = 0.6;
        assert!(close(
            two_sided_exit(&e0, x0, 1.0).unwrap(),
            two_sided_exit(&e1, x0, 1.0).unwrap(),
            1e-3
        ));
        assert!(close(
            inverse_local_time_exponent(&e0, alpha, b).unwrap(),
            inverse_local_time_exponent(&e1, alpha, b).unwrap(),
            1e-3
        ));
        assert!(close(
            local_time_jump_rate(&e0, b).unwrap(),
            local_time_jump_rate(&e1, b).unwrap(),
            1e-3
        ));
    }
}

#[test]
fn numeric_backend_reproduces_identities() {
    let spec = mixed();
    let q = 0.4;
    let cf = ev(&spec, q);
    let ni = ScaleEvaluator::new(&spec, q, Backend::NumericInversion).unwrap();
    let query = TransformQuery::new(q, cf.phi_q() + 0.8, 0.5, 0.7, 1.6);
    let a = lower_passage_transform(&cf, &query).unwrap().value;
    let b = lower_passage_transform(&ni, &query).unwrap().value;
    assert!(close(a, b, 1e-6), "{a} vs {b}");
    let a = upper_passage_transform(&cf, &query).unwrap().value;
    let b = upper_passage_transform(&ni, &query).unwrap().value;
    assert!(close(a, b, 1e-6), "{a} vs {b}");
}
