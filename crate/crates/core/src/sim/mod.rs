//! Two-sided Skorokhod reflection of simulated paths.
//!
//! The reflected process is `W = x0 + X + L - U` with `W` in `[0, B]`, where
//! `L` grows only while `W = 0` and `U` only while `W = B`. Two engines are
//! provided: an exact piecewise-deterministic one for bounded-variation
//! processes and an Euler grid scheme for everything else.

pub mod estimate;
pub mod noise;
pub mod path;

use crate::error::{Error, Result};
use crate::levy::ProcessSpec;

pub use estimate::{
    estimate_first_jump_transform, estimate_inverse_local_time_process, estimate_minimum_transform,
    estimate_passage_functional, estimate_two_sided_exit, replicate, InverseLocalTimePath,
    InverseLocalTimeSample, McEstimate, Passage,
};
pub use noise::{path_rng, Noise, RngNoise};
pub use path::{
    one_sided_lower_reflection, passage_record, simulate_euler, simulate_event_exact,
    simulate_with, PassageRecord, ReflectedPath,
};

/// Jump events allowed per path before giving up.
pub const MAX_JUMPS_PER_PATH: u64 = 1_000_000;
/// Grid steps allowed per path before giving up.
pub const MAX_STEPS_PER_PATH: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Piecewise-deterministic exact simulation (requires `sigma2 = 0`).
    EventExact,
    /// Euler grid with step `dt`; jump epochs are still exact.
    EulerGrid(f64),
}

impl Mode {
    /// Exact mode when `dt` is absent.
    pub fn from_dt(dt: Option<f64>) -> Self {
        dt.map_or(Mode::EventExact, Mode::EulerGrid)
    }
}

/// When a run ends. Levels and horizons are absolute (`u` and `t` values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// `W` reaches `B` (first time `U` would grow).
    FirstUpperPassage,
    /// `L` grows.
    FirstLowerPassage,
    /// Whichever of the two passages comes first.
    EitherPassage,
    /// `U >= level`.
    UpperLocalTime(f64),
    /// `t >= horizon`.
    Horizon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    UpperPassage,
    LowerPassage,
    UpperLocalTime,
    Horizon,
}

/// Snapshot of a reflected path; `x` is `X(t) - X(0)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct State {
    pub t: f64,
    pub x: f64,
    pub w: f64,
    pub l: f64,
    pub u: f64,
}

/// Receives every transition of a run.
pub trait Observer {
    fn transition(&mut self, from: &State, to: &State);

    fn jump(&mut self, _epoch: f64, _size: f64) {}
}

impl<F: FnMut(&State, &State)> Observer for F {
    fn transition(&mut self, from: &State, to: &State) {
        self(from, to)
    }
}

/// Observer that ignores everything.
pub struct Ignore;

impl Observer for Ignore {
    fn transition(&mut self, _: &State, _: &State) {}
}

/// Resumable two-sided reflection engine for one path.
#[derive(Debug, Clone)]
pub struct Reflector<'a> {
    spec: &'a ProcessSpec<f64>,
    x0: f64,
    b: f64,
    mode: Mode,
    state: State,
    next_jump: Option<f64>,
    jumps: u64,
    steps: u64,
}

impl<'a> Reflector<'a> {
    /// `b` may be `f64::INFINITY` for reflection at zero only.
    pub fn new(spec: &'a ProcessSpec<f64>, x0: f64, b: f64, mode: Mode) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Domain(format!(
                "barrier B must be positive, got {b}"
            )));
        }
        if !(x0 >= 0.0 && x0 <= b && x0.is_finite()) {
            return Err(Error::Domain(format!("x0 = {x0} outside [0, {b}]")));
        }
        match mode {
            Mode::EventExact if !spec.is_bounded_variation() => {
                return Err(Error::UnsupportedSpec(
                    "exact simulation needs sigma2 = 0".into(),
                ));
            }
            Mode::EulerGrid(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::Domain(format!("dt must be positive, got {dt}")));
            }
            _ => {}
        }
        Ok(Self {
            spec,
            x0,
            b,
            mode,
            state: State {
                t: 0.0,
                x: 0.0,
                w: x0,
                l: 0.0,
                u: 0.0,
            },
            next_jump: None,
            jumps: 0,
            steps: 0,
        })
    }

    pub fn state(&self) -> State {
        self.state
    }

    pub fn barrier(&self) -> f64 {
        self.b
    }

    pub fn start(&self) -> f64 {
        self.x0
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn next_jump<N: Noise>(&mut self, noise: &mut N) -> f64 {
        match self.next_jump {
            Some(t) => t,
            None => {
                let rate = self.spec.jump_intensity();
                let t = if rate > 0.0 {
                    self.state.t + noise.interarrival(rate)
                } else {
                    f64::INFINITY
                };
                self.next_jump = Some(t);
                t
            }
        }
    }

    fn count_jump(&mut self) -> Result<()> {
        self.jumps += 1;
        if self.jumps > MAX_JUMPS_PER_PATH {
            return Err(Error::NonTermination {
                what: "jump events",
                limit: MAX_JUMPS_PER_PATH,
            });
        }
        Ok(())
    }

    /// Stops that hold at the current state without moving.
    fn immediate(&self, stop: Stop) -> Option<StopReason> {
        let s = &self.state;
        let at_top = s.w == self.b;
        // with a Gaussian part the path leaves 0 downward at once
        let at_bottom = s.w == 0.0 && !self.spec.is_bounded_variation();
        match stop {
            Stop::FirstUpperPassage if at_top => Some(StopReason::UpperPassage),
            Stop::FirstLowerPassage if at_bottom => Some(StopReason::LowerPassage),
            Stop::EitherPassage if at_top => Some(StopReason::UpperPassage),
            Stop::EitherPassage if at_bottom => Some(StopReason::LowerPassage),
            Stop::UpperLocalTime(level) if s.u >= level => Some(StopReason::UpperLocalTime),
            Stop::Horizon(h) if s.t >= h => Some(StopReason::Horizon),
            _ => None,
        }
    }

    /// Advances until `stop` holds, reporting transitions to `observer`.
    pub fn run_until<N: Noise, O: Observer>(
        &mut self,
        stop: Stop,
        noise: &mut N,
        observer: &mut O,
    ) -> Result<StopReason> {
        match stop {
            Stop::UpperLocalTime(level) if !(level > 0.0 && level.is_finite()) => {
                return Err(Error::Domain(format!(
                    "local-time level must be positive, got {level}"
                )));
            }
            Stop::Horizon(h) if !(h >= 0.0 && h.is_finite()) => {
                return Err(Error::Domain(format!(
                    "horizon must be finite and >= 0, got {h}"
                )));
            }
            Stop::UpperLocalTime(_) | Stop::FirstUpperPassage if self.b == f64::INFINITY => {
                return Err(Error::Domain("upper stop without an upper barrier".into()));
            }
            _ => {}
        }
        if let Some(reason) = self.immediate(stop) {
            return Ok(reason);
        }
        match self.mode {
            Mode::EventExact => self.run_exact(stop, noise, observer),
            Mode::EulerGrid(dt) => self.run_euler(dt, stop, noise, observer),
        }
    }

    /// Moves along the drift for `dt`, pinned at `B` if already there.
    fn drift_to(&mut self, t_new: f64) -> State {
        let mut s = self.state;
        let dx = self.spec.drift() * (t_new - s.t);
        s.t = t_new;
        s.x += dx;
        if s.w == self.b {
            s.u += dx;
        } else {
            s.w = (s.w + dx).min(self.b);
        }
        s
    }

    fn commit<O: Observer>(&mut self, to: State, observer: &mut O) {
        observer.transition(&self.state, &to);
        self.state = to;
    }

    fn run_exact<N: Noise, O: Observer>(
        &mut self,
        stop: Stop,
        noise: &mut N,
        observer: &mut O,
    ) -> Result<StopReason> {
        let c = self.spec.drift();
        loop {
            let jump_at = self.next_jump(noise);
            let s = self.state;
            let horizon = match stop {
                Stop::Horizon(h) => h,
                _ => f64::INFINITY,
            };
            if s.w < self.b {
                let hit = s.t + (self.b - s.w) / c;
                if horizon <= hit.min(jump_at) {
                    let to = self.drift_to(horizon);
                    self.commit(to, observer);
                    return Ok(StopReason::Horizon);
                }
                if hit <= jump_at {
                    let mut to = self.drift_to(hit);
                    to.w = self.b;
                    self.commit(to, observer);
                    match stop {
                        Stop::FirstUpperPassage | Stop::EitherPassage => {
                            return Ok(StopReason::UpperPassage)
                        }
                        _ => continue,
                    }
                }
            } else {
                if let Stop::UpperLocalTime(level) = stop {
                    let reach = s.t + (level - s.u) / c;
                    if reach <= jump_at && reach <= horizon {
                        let mut to = self.drift_to(reach);
                        to.u = level;
                        self.commit(to, observer);
                        return Ok(StopReason::UpperLocalTime);
                    }
                }
                if horizon <= jump_at {
                    let to = self.drift_to(horizon);
                    self.commit(to, observer);
                    return Ok(StopReason::Horizon);
                }
            }
            // drift up to the jump epoch, then jump
            let pre = self.drift_to(jump_at);
            self.commit(pre, observer);
            self.count_jump()?;
            let size = noise.jump_size(self.spec.jump_mixture());
            observer.jump(jump_at, size);
            let mut to = self.state;
            to.x -= size;
            let dropped = to.w - size;
            if dropped < 0.0 {
                to.l += -dropped;
                to.w = 0.0;
            } else {
                to.w = dropped;
            }
            let lower_hit = to.l > self.state.l;
            self.commit(to, observer);
            self.next_jump = Some(jump_at + noise.interarrival(self.spec.jump_intensity()));
            if lower_hit && matches!(stop, Stop::FirstLowerPassage | Stop::EitherPassage) {
                return Ok(StopReason::LowerPassage);
            }
        }
    }

    fn run_euler<N: Noise, O: Observer>(
        &mut self,
        dt: f64,
        stop: Stop,
        noise: &mut N,
        observer: &mut O,
    ) -> Result<StopReason> {
        let c = self.spec.drift();
        let s2 = self.spec.gaussian_sq();
        loop {
            self.steps += 1;
            if self.steps > MAX_STEPS_PER_PATH {
                return Err(Error::NonTermination {
                    what: "grid steps",
                    limit: MAX_STEPS_PER_PATH,
                });
            }
            let from = self.state;
            let h = match stop {
                Stop::Horizon(horizon) => dt.min(horizon - from.t),
                _ => dt,
            };
            let t_new = from.t + h;
            let mut incr = c * h;
            if s2 > 0.0 {
                incr += (s2 * h).sqrt() * noise.standard_normal();
            }
            loop {
                let jump_at = self.next_jump(noise);
                if jump_at > t_new {
                    break;
                }
                self.count_jump()?;
                let size = noise.jump_size(self.spec.jump_mixture());
                observer.jump(jump_at, size);
                incr -= size;
                self.next_jump = Some(jump_at + noise.interarrival(self.spec.jump_intensity()));
            }

            // lower barrier first, then upper
            let mut to = State {
                t: t_new,
                x: from.x + incr,
                ..from
            };
            let free = self.x0 + to.x + to.l - to.u;
            if free < 0.0 {
                to.l = (to.u - self.x0 - to.x).max(from.l);
                to.w = 0.0;
            } else if free > self.b {
                to.u = (self.x0 + to.x + to.l - self.b).max(from.u);
                to.w = self.b;
            } else {
                to.w = free;
            }
            self.commit(to, observer);

            let reason = match stop {
                Stop::FirstUpperPassage if to.u > from.u => Some(StopReason::UpperPassage),
                Stop::FirstLowerPassage if to.l > from.l => Some(StopReason::LowerPassage),
                Stop::EitherPassage if to.u > from.u => Some(StopReason::UpperPassage),
                Stop::EitherPassage if to.l > from.l => Some(StopReason::LowerPassage),
                Stop::UpperLocalTime(level) if to.u >= level => Some(StopReason::UpperLocalTime),
                Stop::Horizon(horizon) if to.t >= horizon => Some(StopReason::Horizon),
                _ => None,
            };
            if let Some(r) = reason {
                return Ok(r);
            }
        }
    }
}
