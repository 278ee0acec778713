use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{KppError, Result};
use crate::model::{beta_raw, reaction_raw, ModelParams, StateVec};

/// Tolerance below zero tolerated before a trajectory is declared non-positive.
pub const NONNEGATIVITY_TOL: f64 = 1e-9;

/// Fixed-step time scheme for the diffusionless system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Scheme {
    #[default]
    Rk4,
    /// Matches the time discretisation of the PDE solver.
    ForwardEuler,
}

impl Scheme {
    #[inline]
    pub fn step(self, v: [f64; 3], p: &ModelParams, h: f64) -> [f64; 3] {
        match self {
            Scheme::Rk4 => rk4_step(v, p, h),
            Scheme::ForwardEuler => {
                let f = reaction_raw(v, p);
                [v[0] + h * f[0], v[1] + h * f[1], v[2] + h * f[2]]
            }
        }
    }
}

#[inline]
fn axpy(v: [f64; 3], h: f64, k: [f64; 3]) -> [f64; 3] {
    [v[0] + h * k[0], v[1] + h * k[1], v[2] + h * k[2]]
}

#[inline]
pub(crate) fn rk4_step(v: [f64; 3], p: &ModelParams, h: f64) -> [f64; 3] {
    let k1 = reaction_raw(v, p);
    let k2 = reaction_raw(axpy(v, 0.5 * h, k1), p);
    let k3 = reaction_raw(axpy(v, 0.5 * h, k2), p);
    let k4 = reaction_raw(axpy(v, h, k3), p);
    let mut out = v;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Cubic Hermite interpolant on `[0, h]` at fraction `s ∈ [0, 1]`.
#[inline]
pub(crate) fn hermite(y0: [f64; 3], f0: [f64; 3], y1: [f64; 3], f1: [f64; 3], h: f64, s: f64) -> [f64; 3] {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

pub(crate) fn check_state(v: [f64; 3], t: f64, nonnegative: bool) -> Result<()> {
    if !v.iter().all(|x| x.is_finite()) {
        return Err(KppError::NonFinite {
            context: format!("in the ODE state at t = {t}"),
        });
    }
    if nonnegative {
        let min = v[0].min(v[1]).min(v[2]);
        if min < -NONNEGATIVITY_TOL {
            return Err(KppError::NegativeState { time: t, value: min });
        }
    }
    Ok(())
}

/// States of the diffusionless system sampled at every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVec>,
    pub mu: f64,
    pub step_size: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<StateVec> {
        self.states.last().copied()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.mean()).collect()
    }

    /// CSV with columns `t,u1,u2,u3,alpha,reBeta,imBeta`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_state_csv(out, &self.times, &self.states)
    }
}

pub(crate) fn write_state_csv<W: Write>(out: W, times: &[f64], states: &[StateVec]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "u1", "u2", "u3", "alpha", "reBeta", "imBeta"])?;
    for (t, s) in times.iter().zip(states) {
        let b = beta_raw(s.to_array());
        w.write_record(
            [*t, s.u1, s.u2, s.u3, s.mean(), b.re, b.im]
                .iter()
                .map(|x| format!("{x:e}")),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Classical RK4 with fixed step `dt`; the last step is shortened to land on `t_end`.
pub fn integrate(v0: StateVec, p: &ModelParams, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_with(v0, p, t_end, dt, Scheme::Rk4)
}

pub fn integrate_with(v0: StateVec, p: &ModelParams, t_end: f64, dt: f64, scheme: Scheme) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(KppError::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(KppError::InvalidParameter(format!("tEnd must be > 0, got {t_end}")));
    }
    let x0 = v0.to_array();
    let nonnegative = v0.min_component() >= 0.0;
    check_state(x0, 0.0, false)?;
    let n = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(v0);
    let mut v = x0;
    for k in 1..=n {
        let t_prev = (k - 1) as f64 * dt;
        let t = if k == n { t_end } else { k as f64 * dt };
        v = scheme.step(v, p, t - t_prev);
        check_state(v, t, nonnegative)?;
        times.push(t);
        states.push(StateVec::from_array(v));
    }
    Ok(Trajectory {
        times,
        states,
        mu: p.mu,
        step_size: dt,
    })
}
