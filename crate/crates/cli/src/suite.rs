//! Analytic identities paired with their Monte Carlo counterparts.

use levyfluct::identities::{
    inverse_local_time_exponent, local_time_jump_rate, lower_passage_transform, minimum_transform,
    two_sided_exit, upper_passage_transform, TransformQuery,
};
use levyfluct::sim::{
    estimate_inverse_local_time_process, estimate_minimum_transform, estimate_passage_functional,
    estimate_two_sided_exit, Mode, Passage,
};
use levyfluct::{Backend, ProcessSpec, Result, ScaleEvaluator};

use crate::report::{ReportRow, ValidationReport};

/// Shared parameters of a validation sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteParams {
    pub q: f64,
    /// `None` selects `Phi(q) + 0.5`.
    pub alpha: Option<f64>,
    pub theta: f64,
    pub x0: f64,
    pub b: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub mode: Mode,
    pub backend: Backend,
}

/// Horizon, in units of `1 / mean`, after which the running minimum of a
/// positive-mean process is taken as final.
const MINIMUM_HORIZON: f64 = 60.0;

/// Rows of the default suite, in this order: upper and lower passage, two-sided
/// exit, local-time jump rate, inverse-local-time exponent and, for
/// positive-mean processes under exact simulation, the minimum transform.
pub const DEFAULT_SUITE: [&str; 6] = [
    "upper_passage",
    "lower_passage",
    "two_sided_exit",
    "local_time_jump_rate",
    "inverse_local_time_exponent",
    "minimum_transform",
];

pub fn default_suite(spec: &ProcessSpec<f64>, p: &SuiteParams) -> Result<ValidationReport> {
    let ev = ScaleEvaluator::new(spec, p.q, p.backend)?;
    let alpha = p.alpha.unwrap_or(ev.phi_q() + 0.5);
    let query = TransformQuery::new(p.q, alpha, p.theta, p.x0, p.b);
    let n = p.n_paths;
    let mut rows = Vec::new();

    let upper = upper_passage_transform(&ev, &query)?.value;
    let mc = estimate_passage_functional(spec, &query, Passage::Upper, n, p.seed, p.mode)?;
    rows.push(ReportRow::new(
        DEFAULT_SUITE[0],
        [Some(p.q), Some(alpha), None, Some(p.x0), Some(p.b)],
        upper,
        mc.mean,
        mc.std_error,
    ));

    let lower = lower_passage_transform(&ev, &query)?.value;
    let mc = estimate_passage_functional(spec, &query, Passage::Lower, n, p.seed + 1, p.mode)?;
    rows.push(ReportRow::new(
        DEFAULT_SUITE[1],
        [Some(p.q), Some(alpha), Some(p.theta), Some(p.x0), Some(p.b)],
        lower,
        mc.mean,
        mc.std_error,
    ));

    let exit = two_sided_exit(&ev, p.x0, p.b - p.x0)?;
    let mc = estimate_two_sided_exit(spec, p.q, p.x0, p.b - p.x0, n, p.seed + 2, p.mode)?;
    rows.push(ReportRow::new(
        DEFAULT_SUITE[2],
        [Some(p.q), None, None, Some(p.x0), Some(p.b)],
        exit,
        mc.mean,
        mc.std_error,
    ));

    // one unit of upper local time per path, started at B
    let sample = estimate_inverse_local_time_process(spec, p.b, p.b, 1.0, n, p.seed + 3, p.mode)?;
    let ev0 = ScaleEvaluator::new(spec, 0.0, p.backend)?;
    let rate = local_time_jump_rate(&ev0, p.b)?;
    let mc = sample.jump_rate()?;
    rows.push(ReportRow::new(
        DEFAULT_SUITE[3],
        [Some(0.0), None, None, None, Some(p.b)],
        rate,
        mc.mean,
        mc.std_error,
    ));

    let exponent = inverse_local_time_exponent(&ev, alpha, p.b)?;
    let mc = sample.exponent_estimate(alpha, p.q)?;
    rows.push(ReportRow::new(
        DEFAULT_SUITE[4],
        [Some(p.q), Some(alpha), None, None, Some(p.b)],
        exponent,
        mc.mean,
        mc.std_error,
    ));

    let mean = spec.mean();
    if mean > 0.0 && p.mode == Mode::EventExact {
        let a = 1.0;
        let analytic = minimum_transform(spec, a)?;
        let mc =
            estimate_minimum_transform(spec, a, MINIMUM_HORIZON / mean, n, p.seed + 4, p.mode)?;
        rows.push(ReportRow::new(
            DEFAULT_SUITE[5],
            [None, Some(a), None, None, None],
            analytic,
            mc.mean,
            mc.std_error,
        ));
    }
    Ok(ValidationReport { rows })
}
