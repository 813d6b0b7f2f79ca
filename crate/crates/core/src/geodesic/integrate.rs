//! Adaptive step driver.

use serde::{Deserialize, Serialize};

use crate::error::ShapeError;
use crate::immersion::{FieldAlongF, Immersion};
use crate::scalar::Real;
use crate::sobolev::OperatorConfig;

use super::diagnostics::Diagnostics;
use super::state::{step, GeodesicState, RhsForm};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct TimeConfig {
    pub t_end: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    /// Spacing of stored frames; `None` stores only the endpoints.
    #[serde(default)]
    pub output_every: Option<f64>,
    /// Per-step relative energy drift that triggers rejection.
    #[serde(default = "default_drift_tol")]
    pub drift_tol: f64,
}

fn default_dt_max() -> f64 {
    0.05
}

fn default_dt_min() -> f64 {
    1e-6
}

fn default_drift_tol() -> f64 {
    1e-5
}

impl TimeConfig {
    pub fn new(t_end: f64, dt_max: f64) -> Self {
        TimeConfig {
            t_end,
            dt_max,
            dt_min: default_dt_min(),
            output_every: None,
            drift_tol: default_drift_tol(),
        }
    }

    pub fn with_output_every(mut self, every: f64) -> Self {
        self.output_every = Some(every);
        self
    }

    pub fn with_drift_tol(mut self, tol: f64) -> Self {
        self.drift_tol = tol;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        let bad = |msg: String| Err(ShapeError::InvalidOperator(msg));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("tEnd = {} must be positive", self.t_end));
        }
        if !(self.dt_max > 0.0 && self.dt_min > 0.0 && self.dt_min <= self.dt_max) {
            return bad(format!(
                "need 0 < dtMin <= dtMax, got dtMin = {}, dtMax = {}",
                self.dt_min, self.dt_max
            ));
        }
        if let Some(e) = self.output_every {
            if !(e > 0.0) {
                return bad(format!("outputEvery = {e} must be positive"));
            }
        }
        if !(self.drift_tol > 0.0) {
            return bad(format!("driftTol = {} must be positive", self.drift_tol));
        }
        Ok(())
    }
}

/// Stored snapshot of a geodesic.
#[derive(Clone, Debug)]
pub struct Frame<T: Real> {
    pub t: f64,
    pub f: Immersion<T>,
    pub f_t: FieldAlongF<T>,
    pub b: Vec<T>,
}

impl<T: Real> Frame<T> {
    fn of(s: &GeodesicState<T>) -> Self {
        Frame {
            t: s.t,
            f: s.f.clone(),
            f_t: s.f_t.clone(),
            b: s.b.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub frames: Vec<Frame<T>>,
    /// One row per accepted step plus the initial state.
    pub diagnostics: Vec<Diagnostics>,
    pub accepted: usize,
    pub rejected: usize,
    /// Set when the driver gave up; the last frame is the last good state.
    pub abort: Option<ShapeError>,
    pub final_state: GeodesicState<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }
}

const GROW_AFTER: usize = 10;
const GROW_FACTOR: f64 = 1.5;

/// Integrates from `state0` to `time.t_end`.
pub fn integrate<T: Real>(
    cfg: &OperatorConfig,
    form: RhsForm,
    state0: GeodesicState<T>,
    time: &TimeConfig,
) -> crate::Result<Trajectory<T>> {
    time.validate()?;
    let t_end = state0.t + time.t_end;
    let mut outputs: Vec<f64> = match time.output_every {
        Some(e) => {
            let n = ((time.t_end / e) - 1e-9).ceil().max(1.0) as usize;
            (1..=n).map(|k| (state0.t + k as f64 * e).min(t_end)).collect()
        }
        None => vec![t_end],
    };
    outputs.dedup();
    let mut next_out = 0;

    let mut diag = Diagnostics::evaluate(cfg, &state0.f, &state0.geo, &state0.f_t, state0.energy(), state0.t, 0.0);
    diag.cg_iterations = state0.cg_iterations;
    let mut traj = Trajectory {
        frames: vec![Frame::of(&state0)],
        diagnostics: vec![diag],
        accepted: 0,
        rejected: 0,
        abort: None,
        final_state: state0.clone(),
    };
    let mut state = state0;
    let mut dt = time.dt_max;
    let mut streak = 0;
    let tiny = 1e-12 * time.t_end.max(1.0);

    while next_out < outputs.len() {
        let target = outputs[next_out];
        let remaining = target - state.t;
        if remaining <= tiny {
            traj.frames.push(Frame::of(&state));
            next_out += 1;
            continue;
        }
        let mut h = dt.min(remaining);
        // avoid a sliver step just before an output time
        if remaining - h < 0.25 * h {
            h = remaining;
        }
        match step(cfg, form, &state, h, Some(time.drift_tol)) {
            Ok((next, info)) => {
                traj.accepted += 1;
                state = next;
                let mut d = Diagnostics::evaluate(cfg, &state.f, &state.geo, &state.f_t, state.energy(), state.t, h);
                d.accepted = traj.accepted;
                d.rejected = traj.rejected;
                d.cg_iterations = info.cg_iterations;
                traj.diagnostics.push(d);
                streak += 1;
                if streak >= GROW_AFTER {
                    dt = (dt * GROW_FACTOR).min(time.dt_max);
                    streak = 0;
                }
            }
            Err(err) => {
                traj.rejected += 1;
                streak = 0;
                dt = 0.5 * h;
                if dt < time.dt_min {
                    traj.abort = Some(ShapeError::Aborted {
                        t: state.t,
                        reason: format!("step size fell below dtMin = {} ({err})", time.dt_min),
                    });
                    if traj.frames.last().map(|f| f.t) != Some(state.t) {
                        traj.frames.push(Frame::of(&state));
                    }
                    break;
                }
            }
        }
    }
    traj.final_state = state;
    Ok(traj)
}
