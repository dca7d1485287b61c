//! Recorded paths and single-path drivers.

use std::io::{self, Write};

use super::noise::{Noise, RngNoise};
use super::{Mode, Observer, Reflector, State, Stop, StopReason};
use crate::error::{Error, Result};
use crate::levy::ProcessSpec;

/// Every state visited by a run, plus the exact jump epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedPath {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub l: Vec<f64>,
    pub u: Vec<f64>,
    pub b: f64,
    pub x0: f64,
    pub mode: Mode,
    pub jump_epochs: Vec<f64>,
    pub stop_reason: StopReason,
}

impl ReflectedPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, i: usize) -> State {
        State {
            t: self.times[i],
            x: self.x[i],
            w: self.w[i],
            l: self.l[i],
            u: self.u[i],
        }
    }

    pub fn last(&self) -> State {
        self.state(self.len() - 1)
    }

    /// Increments of the free process between recorded rows.
    pub fn x_increments(&self) -> Vec<f64> {
        self.x.windows(2).map(|p| p[1] - p[0]).collect()
    }

    /// Checks range, reconstruction, monotonicity and the complementarity of
    /// `L` and `U`. Reconstruction is checked to a few ulps of the path scale.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let scale = self
            .x
            .iter()
            .chain(&self.l)
            .chain(&self.u)
            .fold(self.x0.abs().max(1.0), |m, v| m.max(v.abs()));
        let tol = 64.0 * f64::EPSILON * scale;
        for i in 0..self.len() {
            let s = self.state(i);
            if !(s.w >= 0.0 && s.w <= self.b) {
                return Err(format!("row {i}: w = {} outside [0, {}]", s.w, self.b));
            }
            let rebuilt = self.x0 + s.x + s.l - s.u;
            if (rebuilt - s.w).abs() > tol {
                return Err(format!(
                    "row {i}: w = {} but x0 + x + l - u = {rebuilt}",
                    s.w
                ));
            }
            if i == 0 {
                continue;
            }
            let p = self.state(i - 1);
            if s.t < p.t || s.l < p.l || s.u < p.u {
                return Err(format!("row {i}: t, l or u decreased"));
            }
            if s.l > p.l && s.w != 0.0 {
                return Err(format!("row {i}: l grew while w = {}", s.w));
            }
            if s.u > p.u && s.w != self.b && p.w != self.b {
                return Err(format!("row {i}: u grew away from the barrier"));
            }
        }
        Ok(())
    }

    /// Writes `t,x,w,l,u` rows with round-trip precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,w,l,u")?;
        for i in 0..self.len() {
            let s = self.state(i);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t, s.x, s.w, s.l, s.u
            )?;
        }
        Ok(())
    }
}

struct Recorder {
    path: ReflectedPath,
}

impl Recorder {
    fn new(start: State, x0: f64, b: f64, mode: Mode) -> Self {
        let mut path = ReflectedPath {
            times: Vec::new(),
            x: Vec::new(),
            w: Vec::new(),
            l: Vec::new(),
            u: Vec::new(),
            b,
            x0,
            mode,
            jump_epochs: Vec::new(),
            stop_reason: StopReason::Horizon,
        };
        push(&mut path, &start);
        Self { path }
    }
}

fn push(p: &mut ReflectedPath, s: &State) {
    p.times.push(s.t);
    p.x.push(s.x);
    p.w.push(s.w);
    p.l.push(s.l);
    p.u.push(s.u);
}

impl Observer for Recorder {
    fn transition(&mut self, _from: &State, to: &State) {
        push(&mut self.path, to);
    }

    fn jump(&mut self, epoch: f64, _size: f64) {
        self.path.jump_epochs.push(epoch);
    }
}

/// Runs one path from `x0` in `[0, b]` until `stop`, recording every state.
pub fn simulate_with<N: Noise>(
    spec: &ProcessSpec<f64>,
    x0: f64,
    b: f64,
    mode: Mode,
    stop: Stop,
    noise: &mut N,
) -> Result<ReflectedPath> {
    let mut engine = Reflector::new(spec, x0, b, mode)?;
    let mut rec = Recorder::new(engine.state(), x0, b, mode);
    rec.path.stop_reason = engine.run_until(stop, noise, &mut rec)?;
    Ok(rec.path)
}

/// Exact simulation of a bounded-variation process reflected in `[0, b]`.
pub fn simulate_event_exact(
    spec: &ProcessSpec<f64>,
    x0: f64,
    b: f64,
    stop: Stop,
    seed: u64,
) -> Result<ReflectedPath> {
    simulate_with(
        spec,
        x0,
        b,
        Mode::EventExact,
        stop,
        &mut RngNoise::for_path(seed, 0),
    )
}

/// Euler-grid simulation reflected in `[0, b]`.
pub fn simulate_euler(
    spec: &ProcessSpec<f64>,
    x0: f64,
    b: f64,
    dt: f64,
    stop: Stop,
    seed: u64,
) -> Result<ReflectedPath> {
    simulate_with(
        spec,
        x0,
        b,
        Mode::EulerGrid(dt),
        stop,
        &mut RngNoise::for_path(seed, 0),
    )
}

/// Reflection at zero only; `stop` must be a horizon or the first lower passage.
pub fn one_sided_lower_reflection(
    spec: &ProcessSpec<f64>,
    x0: f64,
    stop: Stop,
    mode: Mode,
    seed: u64,
) -> Result<ReflectedPath> {
    if !matches!(stop, Stop::Horizon(_) | Stop::FirstLowerPassage) {
        return Err(Error::Domain(format!(
            "{stop:?} is not available without an upper barrier"
        )));
    }
    simulate_with(
        spec,
        x0,
        f64::INFINITY,
        mode,
        stop,
        &mut RngNoise::for_path(seed, 0),
    )
}

/// Times and local times at the first contact with each barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageRecord {
    pub tau_upper: f64,
    pub l_at_tau_upper: f64,
    pub tau_lower: f64,
    pub l_at_tau_lower: f64,
    pub u_at_tau_lower: f64,
}

/// Runs until both barriers have been touched.
pub fn passage_record<N: Noise>(
    spec: &ProcessSpec<f64>,
    x0: f64,
    b: f64,
    mode: Mode,
    noise: &mut N,
) -> Result<PassageRecord> {
    let mut engine = Reflector::new(spec, x0, b, mode)?;
    let mut upper: Option<State> = None;
    let mut watch = |from: &State, to: &State| {
        if upper.is_none() && (to.u > from.u || (to.w == b && from.w < b)) {
            upper = Some(*to);
        }
    };
    let first = engine.run_until(Stop::EitherPassage, noise, &mut watch)?;
    let start = engine.state();
    let (upper, lower) = match first {
        StopReason::UpperPassage => {
            let up = upper.unwrap_or(start);
            engine.run_until(Stop::FirstLowerPassage, noise, &mut super::Ignore)?;
            (up, engine.state())
        }
        _ => {
            engine.run_until(Stop::FirstUpperPassage, noise, &mut super::Ignore)?;
            (engine.state(), start)
        }
    };
    Ok(PassageRecord {
        tau_upper: upper.t,
        l_at_tau_upper: upper.l,
        tau_lower: lower.t,
        l_at_tau_lower: lower.l,
        u_at_tau_lower: lower.u,
    })
}
