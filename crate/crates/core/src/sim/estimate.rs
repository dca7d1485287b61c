//! Monte Carlo estimators built on the reflection engine.
//!
//! Replications run in parallel, each on its own random stream; samples are
//! collected in path order and reduced sequentially, so every estimate is a
//! deterministic function of the seed whatever the thread count.

use rayon::prelude::*;

use super::noise::{Noise, RngNoise};
use super::{Ignore, Mode, Observer, Reflector, State, Stop, StopReason};
use crate::error::{Error, Result};
use crate::identities::TransformQuery;
use crate::levy::{JumpComponent, ProcessSpec};
use rand_chacha::ChaCha8Rng;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Infinite when `n = 1`.
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::Domain("no samples".into()));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n == 1 {
            f64::INFINITY
        } else {
            let ss: f64 = samples.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        };
        Ok(Self { mean, std_error, n })
    }

    /// `(mean - reference) / std_error`; zero when both the error and the gap vanish.
    pub fn z_score(&self, reference: f64) -> f64 {
        let gap = self.mean - reference;
        if self.std_error == 0.0 {
            if gap == 0.0 {
                0.0
            } else {
                gap.signum() * f64::INFINITY
            }
        } else {
            gap / self.std_error
        }
    }
}

/// Evaluates `sample` on `n_paths` independent streams, in path order.
pub fn replicate<T, F>(n_paths: usize, seed: u64, sample: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngNoise<ChaCha8Rng>) -> Result<T> + Sync,
{
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| sample(&mut RngNoise::for_path(seed, i)))
        .collect()
}

fn check_paths(n_paths: usize) -> Result<()> {
    if n_paths < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 paths, got {n_paths}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Passage {
    /// `E[e^{-q tau - alpha L}]` at the first time `W = B`.
    Upper,
    /// `E[e^{-q tau - alpha L - theta U}]` at the first growth of `L`.
    Lower,
}

/// Passage functional at the first upper or lower barrier contact.
pub fn estimate_passage_functional(
    spec: &ProcessSpec<f64>,
    query: &TransformQuery<f64>,
    which: Passage,
    n_paths: usize,
    seed: u64,
    mode: Mode,
) -> Result<McEstimate> {
    check_paths(n_paths)?;
    let TransformQuery {
        q,
        alpha,
        theta,
        x0,
        b,
    } = *query;
    for (name, v) in [("q", q), ("alpha", alpha), ("theta", theta)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!(
                "{name} must be finite and >= 0, got {v}"
            )));
        }
    }
    let stop = match which {
        Passage::Upper => Stop::FirstUpperPassage,
        Passage::Lower => Stop::FirstLowerPassage,
    };
    Reflector::new(spec, x0, b, mode)?;
    let samples = replicate(n_paths, seed, |noise| {
        let mut engine = Reflector::new(spec, x0, b, mode)?;
        engine.run_until(stop, noise, &mut Ignore)?;
        let s = engine.state();
        let exponent = match which {
            Passage::Upper => q * s.t + alpha * s.l,
            Passage::Lower => q * s.t + alpha * s.l + theta * s.u,
        };
        Ok((-exponent).exp())
    })?;
    McEstimate::from_samples(&samples)
}

/// `E[e^{-q T}; upper barrier before lower]` for the free process started at
/// `a` with barriers `0` and `a + b`.
pub fn estimate_two_sided_exit(
    spec: &ProcessSpec<f64>,
    q: f64,
    a: f64,
    b: f64,
    n_paths: usize,
    seed: u64,
    mode: Mode,
) -> Result<McEstimate> {
    check_paths(n_paths)?;
    if !(a >= 0.0 && b >= 0.0 && q >= 0.0) {
        return Err(Error::Domain(format!(
            "need a, b, q >= 0, got {a}, {b}, {q}"
        )));
    }
    let top = a + b;
    Reflector::new(spec, a, top, mode)?;
    let samples = replicate(n_paths, seed, |noise| {
        let mut engine = Reflector::new(spec, a, top, mode)?;
        let reason = engine.run_until(Stop::EitherPassage, noise, &mut Ignore)?;
        Ok(match reason {
            StopReason::UpperPassage => (-q * engine.state().t).exp(),
            _ => 0.0,
        })
    })?;
    McEstimate::from_samples(&samples)
}

/// `E[e^{-alpha L(T)}]` for reflection at zero from `0`; approximates
/// `E[e^{alpha X_min}]` once `T` is large.
pub fn estimate_minimum_transform(
    spec: &ProcessSpec<f64>,
    alpha: f64,
    horizon: f64,
    n_paths: usize,
    seed: u64,
    mode: Mode,
) -> Result<McEstimate> {
    check_paths(n_paths)?;
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    Reflector::new(spec, 0.0, f64::INFINITY, mode)?;
    let samples = replicate(n_paths, seed, |noise| {
        let mut engine = Reflector::new(spec, 0.0, f64::INFINITY, mode)?;
        engine.run_until(Stop::Horizon(horizon), noise, &mut Ignore)?;
        Ok((-alpha * engine.state().l).exp())
    })?;
    McEstimate::from_samples(&samples)
}

/// `E[e^{-alpha X(J) - theta J}]` where `J` is the first jump epoch of a
/// compound Poisson process with the given rate and hyperexponential jumps.
pub fn estimate_first_jump_transform(
    rate: f64,
    mixture: &[JumpComponent<f64>],
    alpha: f64,
    theta: f64,
    n_paths: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_paths(n_paths)?;
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    if mixture.is_empty() {
        return Err(Error::BadMixture("no jump components".into()));
    }
    if !(alpha >= 0.0 && theta >= 0.0) {
        return Err(Error::Domain(format!(
            "need alpha, theta >= 0, got {alpha}, {theta}"
        )));
    }
    let samples = replicate(n_paths, seed, |noise| {
        let epoch = noise.interarrival(rate);
        let size = noise.jump_size(mixture);
        Ok((-alpha * size - theta * epoch).exp())
    })?;
    McEstimate::from_samples(&samples)
}

/// One path of `x -> L(tau_x^U)` where `tau_x^U = inf{t : U(t) > x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseLocalTimePath {
    /// `L(tau_0^U)`.
    pub initial: f64,
    /// `(x, size)` for each jump of the step function on `[0, x_max)`.
    pub jumps: Vec<(f64, f64)>,
    /// `L(tau_k^U)` for `k = 0, 1, ..., floor(x_max)`.
    pub l_at_level: Vec<f64>,
    /// `tau_k^U` for the same levels.
    pub tau_at_level: Vec<f64>,
}

impl InverseLocalTimePath {
    /// `L(tau_x^U)` for `x` in `[0, x_max)`.
    pub fn value_at(&self, x: f64) -> f64 {
        self.initial
            + self
                .jumps
                .iter()
                .take_while(|(at, _)| *at <= x)
                .map(|(_, s)| s)
                .sum::<f64>()
    }
}

struct LocalTimeTracker {
    exact: bool,
    last_l: Option<f64>,
    path: InverseLocalTimePath,
}

impl Observer for LocalTimeTracker {
    fn transition(&mut self, from: &State, to: &State) {
        if to.u <= from.u {
            return;
        }
        // l is constant while u grows
        match self.last_l {
            None => self.path.initial = to.l,
            Some(prev) if to.l > prev => self.path.jumps.push((from.u, to.l - prev)),
            _ => {}
        }
        self.last_l = Some(to.l);
        let mut k = self.path.l_at_level.len() as f64;
        while k >= from.u && k < to.u {
            let tau = if self.exact {
                from.t + (k - from.u) / (to.u - from.u) * (to.t - from.t)
            } else {
                to.t
            };
            self.path.l_at_level.push(to.l);
            self.path.tau_at_level.push(tau);
            k += 1.0;
        }
    }
}

/// Sampled inverse-local-time processes on `[0, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseLocalTimeSample {
    pub x_max: f64,
    pub b: f64,
    pub paths: Vec<InverseLocalTimePath>,
}

impl InverseLocalTimeSample {
    /// Number of jumps per unit of upper local time, one sample per path.
    pub fn jump_rate(&self) -> Result<McEstimate> {
        let s: Vec<f64> = self
            .paths
            .iter()
            .map(|p| p.jumps.len() as f64 / self.x_max)
            .collect();
        McEstimate::from_samples(&s)
    }

    fn unit_samples(&self, alpha: f64, q: f64) -> Vec<f64> {
        self.paths
            .iter()
            .flat_map(|p| {
                (1..p.l_at_level.len()).map(move |k| {
                    let dl = p.l_at_level[k] - p.l_at_level[k - 1];
                    let dt = p.tau_at_level[k] - p.tau_at_level[k - 1];
                    (-alpha * dl - q * dt).exp()
                })
            })
            .collect()
    }

    /// `E[e^{-alpha (L(tau_{k+1}) - L(tau_k)) - q (tau_{k+1} - tau_k)}]`, pooled over
    /// unit increments of all paths.
    pub fn increment_transform(&self, alpha: f64, q: f64) -> Result<McEstimate> {
        McEstimate::from_samples(&self.unit_samples(alpha, q))
    }

    /// Logarithm of [`Self::increment_transform`], which estimates the
    /// Laplace exponent; the error is propagated by the delta method.
    pub fn exponent_estimate(&self, alpha: f64, q: f64) -> Result<McEstimate> {
        let m = self.increment_transform(alpha, q)?;
        Ok(McEstimate {
            mean: m.mean.ln(),
            std_error: m.std_error / m.mean,
            n: m.n,
        })
    }

    /// `E[e^{-alpha size - theta x}]` over the first jump `(x, size)` of each
    /// path; paths without a jump before `x_max` contribute `0`, which is
    /// within `e^{-theta x_max}` of their true value.
    pub fn first_jump_transform(&self, alpha: f64, theta: f64) -> Result<McEstimate> {
        let s: Vec<f64> = self
            .paths
            .iter()
            .map(|p| {
                p.jumps
                    .first()
                    .map_or(0.0, |(x, size)| (-alpha * size - theta * x).exp())
            })
            .collect();
        McEstimate::from_samples(&s)
    }

    /// `integral_0^{x_max} e^{alpha (B + x - L(tau_x^U))} dx`, one sample per path.
    pub fn occupation_integral(&self, alpha: f64) -> Result<McEstimate> {
        let s: Vec<f64> = self
            .paths
            .iter()
            .map(|p| {
                let mut level = p.initial;
                let mut start = 0.0;
                let mut total = 0.0;
                let mut segment = |from: f64, to: f64, l: f64| {
                    let span = to - from;
                    let lead = (alpha * (self.b + from - l)).exp();
                    total += lead * span * crate::scalar::exprel(alpha * span);
                };
                for &(x, size) in &p.jumps {
                    segment(start, x, level);
                    level += size;
                    start = x;
                }
                segment(start, self.x_max, level);
                total
            })
            .collect();
        McEstimate::from_samples(&s)
    }
}

/// Runs reflected paths from `x0` until `U >= x_max` and records
/// `x -> L(tau_x^U)`.
pub fn estimate_inverse_local_time_process(
    spec: &ProcessSpec<f64>,
    x0: f64,
    b: f64,
    x_max: f64,
    n_paths: usize,
    seed: u64,
    mode: Mode,
) -> Result<InverseLocalTimeSample> {
    check_paths(n_paths)?;
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::Domain(format!(
            "x_max must be positive, got {x_max}"
        )));
    }
    if !(b.is_finite()) {
        return Err(Error::Domain("the upper barrier must be finite".into()));
    }
    Reflector::new(spec, x0, b, mode)?;
    let levels = x_max.floor() as usize + 1;
    let paths = replicate(n_paths, seed, |noise| {
        let mut engine = Reflector::new(spec, x0, b, mode)?;
        let mut tracker = LocalTimeTracker {
            exact: mode == Mode::EventExact,
            last_l: None,
            path: InverseLocalTimePath {
                initial: 0.0,
                jumps: Vec::new(),
                l_at_level: Vec::with_capacity(levels),
                tau_at_level: Vec::with_capacity(levels),
            },
        };
        // reach B first so that tau_0^U is observed even when x0 = B
        engine.run_until(Stop::FirstUpperPassage, noise, &mut tracker)?;
        if tracker.last_l.is_none() {
            let s = engine.state();
            tracker.last_l = Some(s.l);
            tracker.path.initial = s.l;
            tracker.path.l_at_level.push(s.l);
            tracker.path.tau_at_level.push(s.t);
        }
        engine.run_until(Stop::UpperLocalTime(x_max), noise, &mut tracker)?;
        // stopping exactly on an integer level while pinned at B
        let s = engine.state();
        if tracker.path.l_at_level.len() < levels && s.w == b {
            tracker.path.l_at_level.push(s.l);
            tracker.path.tau_at_level.push(s.t);
        }
        Ok(tracker.path)
    })?;
    Ok(InverseLocalTimeSample { x_max, b, paths })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_statistics() {
        let e = McEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e.mean, 2.5);
        assert!((e.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(
            McEstimate::from_samples(&[1.0, 1.0]).unwrap().std_error,
            0.0
        );
        assert!(McEstimate::from_samples(&[1.0])
            .unwrap()
            .std_error
            .is_infinite());
        assert!(McEstimate::from_samples(&[]).is_err());
    }

    #[test]
    fn upper_from_barrier_is_one() {
        let bm = ProcessSpec::<f64>::brownian(0.0, 2.0).unwrap();
        let query = TransformQuery {
            q: 1.0,
            alpha: 2.0,
            theta: 0.0,
            x0: 1.0,
            b: 1.0,
        };
        let e =
            estimate_passage_functional(&bm, &query, Passage::Upper, 10, 1, Mode::EulerGrid(1e-3))
                .unwrap();
        assert_eq!((e.mean, e.std_error), (1.0, 0.0));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let spec = ProcessSpec::<f64>::cramer_lundberg(2.0, 1.0, 1.0).unwrap();
        let query = TransformQuery {
            q: 0.5,
            alpha: 1.0,
            theta: 0.3,
            x0: 0.4,
            b: 1.0,
        };
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    estimate_passage_functional(
                        &spec,
                        &query,
                        Passage::Lower,
                        500,
                        11,
                        Mode::EventExact,
                    )
                    .unwrap()
                })
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(7));
    }

    #[test]
    fn rejects_single_path() {
        let spec = ProcessSpec::<f64>::cramer_lundberg(2.0, 1.0, 1.0).unwrap();
        assert!(estimate_minimum_transform(&spec, 1.0, 1.0, 1, 0, Mode::EventExact).is_err());
    }

    #[test]
    fn local_time_levels_are_complete() {
        let spec = ProcessSpec::<f64>::cramer_lundberg(2.0, 1.0, 1.0).unwrap();
        let s = estimate_inverse_local_time_process(&spec, 1.0, 1.0, 5.0, 20, 3, Mode::EventExact)
            .unwrap();
        for p in &s.paths {
            assert_eq!(p.l_at_level.len(), 6);
            assert!(p.l_at_level.windows(2).all(|w| w[0] <= w[1]));
            assert!(p.tau_at_level.windows(2).all(|w| w[0] < w[1]));
            let last = p.initial + p.jumps.iter().map(|j| j.1).sum::<f64>();
            assert!((last - p.l_at_level[5]).abs() < 1e-12);
        }
    }
}
