use serde::{Deserialize, Serialize};

use super::heteroclinic::{hausdorff_distance, thin_polyline, ReferenceCycle};
use super::integrate::{check_state, hermite, write_state_csv, Scheme};
use crate::error::{KppError, Result};
use crate::model::{beta_raw, reaction_raw, ModelParams, StateVec, MU_H};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rotation {
    #[serde(rename = "CW")]
    Clockwise,
    #[serde(rename = "CCW")]
    CounterClockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CycleSettings {
    pub dt: f64,
    pub transient: f64,
    /// Total integration time allowed before giving up.
    pub max_transit: f64,
    pub rel_tol: f64,
    pub scheme: Scheme,
    pub initial: StateVec,
}

impl Default for CycleSettings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            transient: 200.0,
            max_transit: 5000.0,
            rel_tol: 1e-6,
            scheme: Scheme::Rk4,
            initial: StateVec::new(1.01, 1.01, 0.99),
        }
    }
}

/// One period of a limit cycle of the diffusionless system, starting on the
/// section `{Im β = 0, Re β > 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitCycleRecord {
    pub mu: f64,
    pub period: f64,
    /// `n + 1` samples at `times[k] = k·period/n`; the last closes the loop.
    pub times: Vec<f64>,
    pub samples: Vec<StateVec>,
    pub alpha_range: (f64, f64),
    pub beta_max: f64,
    pub beta_min: f64,
    pub min_component: f64,
    pub rotation: Rotation,
    /// Unwrapped `arg β` moves in the same direction between every pair of samples.
    pub strictly_monotone: bool,
    /// Distance between the last and the first sample.
    pub closure_error: f64,
    pub scheme: Scheme,
    pub return_times: Vec<f64>,
}

impl LimitCycleRecord {
    pub fn step(&self) -> f64 {
        self.period / (self.samples.len() - 1) as f64
    }

    /// CSV with columns `t,u1,u2,u3,alpha,reBeta,imBeta`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        write_state_csv(out, &self.times, &self.samples)
    }

    /// Closest approach of the samples to each vertex `scale·e_i`.
    pub fn vertex_distances(&self, scale: f64) -> [f64; 3] {
        let mut out = [f64::INFINITY; 3];
        for (i, d) in out.iter_mut().enumerate() {
            let vertex = StateVec::basis(i, scale);
            *d = self
                .samples
                .iter()
                .map(|s| (*s - vertex).norm())
                .fold(f64::INFINITY, f64::min);
        }
        out
    }
}

/// Largest violation of `|(60/13)(μ_H − μ) − (α − 1)| ≤ (14√3/39)|β|` over the samples;
/// non-positive when the band holds everywhere.
pub fn localization_band_violation(cycle: &LimitCycleRecord) -> f64 {
    let k = 14.0 * 3f64.sqrt() / 39.0;
    let shift = 60.0 / 13.0 * (MU_H - cycle.mu);
    cycle
        .samples
        .iter()
        .map(|s| {
            let b = beta_raw(s.to_array()).norm();
            (shift - (s.mean() - 1.0)).abs() - k * b
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn find_limit_cycle(mu: f64) -> Result<LimitCycleRecord> {
    find_limit_cycle_with(mu, &CycleSettings::default())
}

struct Crossing {
    time: f64,
    state: [f64; 3],
    re_beta: f64,
}

/// Root in `[0, 1]` of the Hermite interpolant of `Im β` (sign change guaranteed).
fn section_root(y0: [f64; 3], f0: [f64; 3], y1: [f64; 3], f1: [f64; 3], h: f64) -> f64 {
    let g = |s: f64| beta_raw(hermite(y0, f0, y1, f1, h, s)).im;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn find_limit_cycle_with(mu: f64, settings: &CycleSettings) -> Result<LimitCycleRecord> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(KppError::InvalidParameter(format!("mu must be > 0, got {mu}")));
    }
    if mu >= MU_H {
        return Err(KppError::NoHopfInstability { mu, mu_h: MU_H });
    }
    let s = settings;
    if !(s.dt > 0.0 && s.transient >= 0.0 && s.max_transit > s.transient && s.rel_tol > 0.0) {
        return Err(KppError::InvalidParameter(format!("inconsistent cycle settings {s:?}")));
    }
    if !(s.initial.is_finite() && s.initial.min_component() > 0.0) {
        return Err(KppError::InvalidParameter("initial state must be positive".into()));
    }
    let p = ModelParams::new(mu)?;
    let dt = s.dt;
    let transient_steps = (s.transient / dt).round() as u64;
    let max_steps = (s.max_transit / dt).ceil() as u64;

    let mut v = s.initial.to_array();
    let mut fv = reaction_raw(v, &p);
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut converged = false;
    for k in 1..=max_steps {
        let next = s.scheme.step(v, &p, dt);
        let t = k as f64 * dt;
        check_state(next, t, true)?;
        let fnext = reaction_raw(next, &p);
        if k > transient_steps {
            let (b0, b1) = (beta_raw(v), beta_raw(next));
            if b0.im > 0.0 && b1.im <= 0.0 {
                let frac = section_root(v, fv, next, fnext, dt);
                let state = hermite(v, fv, next, fnext, dt, frac);
                let re_beta = beta_raw(state).re;
                if re_beta > 0.0 {
                    crossings.push(Crossing {
                        time: t - dt + frac * dt,
                        state,
                        re_beta,
                    });
                    let n = crossings.len();
                    if n >= 3 {
                        let t1 = crossings[n - 1].time - crossings[n - 2].time;
                        let t0 = crossings[n - 2].time - crossings[n - 3].time;
                        let (r1, r0) = (crossings[n - 1].re_beta, crossings[n - 2].re_beta);
                        if (t1 - t0).abs() <= s.rel_tol * t1 && (r1 - r0).abs() <= s.rel_tol * r1 {
                            converged = true;
                            break;
                        }
                    }
                }
            }
        }
        v = next;
        fv = fnext;
    }
    if !converged {
        return Err(KppError::NoConvergence(format!(
            "return map at mu = {mu} did not settle within t = {} ({} section crossings)",
            s.max_transit,
            crossings.len()
        )));
    }
    let n = crossings.len();
    let return_times: Vec<f64> = crossings.windows(2).map(|w| w[1].time - w[0].time).collect();
    let period = 0.5 * (return_times[n - 2] + return_times[n - 3]);
    sample_cycle(mu, &p, period, crossings[n - 1].state, s, return_times)
}

fn sample_cycle(
    mu: f64,
    p: &ModelParams,
    period: f64,
    start: [f64; 3],
    s: &CycleSettings,
    return_times: Vec<f64>,
) -> Result<LimitCycleRecord> {
    let n = ((period / s.dt).round() as usize).max(16);
    let h = period / n as f64;
    let mut samples = Vec::with_capacity(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    let mut v = start;
    samples.push(StateVec::from_array(v));
    times.push(0.0);
    for k in 1..=n {
        v = s.scheme.step(v, p, h);
        check_state(v, k as f64 * h, true)?;
        samples.push(StateVec::from_array(v));
        times.push(k as f64 * h);
    }
    let min_component = samples.iter().map(|x| x.min_component()).fold(f64::INFINITY, f64::min);
    if min_component <= 0.0 {
        return Err(KppError::Inconsistency(format!(
            "limit cycle at mu = {mu} touches the boundary (min component {min_component:e})"
        )));
    }
    let alphas = samples.iter().map(|x| x.mean());
    let alpha_range = alphas.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
    let betas: Vec<_> = samples.iter().map(|x| beta_raw(x.to_array())).collect();
    let beta_max = betas.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let beta_min = betas.iter().map(|b| b.norm()).fold(f64::INFINITY, f64::min);
    let increments: Vec<f64> = betas.windows(2).map(|w| (w[1] / w[0]).arg()).collect();
    let winding: f64 = increments.iter().sum();
    let rotation = if winding < 0.0 {
        Rotation::Clockwise
    } else {
        Rotation::CounterClockwise
    };
    let strictly_monotone = match rotation {
        Rotation::Clockwise => increments.iter().all(|&d| d < 0.0),
        Rotation::CounterClockwise => increments.iter().all(|&d| d > 0.0),
    };
    let closure_error = samples[n].max_abs_diff(&samples[0]);
    Ok(LimitCycleRecord {
        mu,
        period,
        times,
        samples,
        alpha_range,
        beta_max,
        beta_min,
        min_component,
        rotation,
        strictly_monotone,
        closure_error,
        scheme: s.scheme,
        return_times,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyMember {
    pub mu: f64,
    pub cycle: LimitCycleRecord,
    pub hausdorff_to_c0: f64,
}

/// Cycles continued along a decreasing `μ` list with warm starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CycleFamily {
    pub members: Vec<FamilyMember>,
    /// Set when continuation stopped early; `members` then holds the cycles found so far.
    pub error: Option<String>,
    pub failed_mu: Option<f64>,
    /// Hausdorff distances decrease along the list.
    pub monotone_toward_c0: bool,
}

/// Arc-length spacing used to thin curves before Hausdorff comparisons.
const HAUSDORFF_SPACING: f64 = 0.01;

pub fn cycle_family(mu_values: &[f64], reference: &ReferenceCycle, settings: &CycleSettings) -> Result<CycleFamily> {
    if mu_values.is_empty() {
        return Err(KppError::InvalidParameter("empty mu list".into()));
    }
    if mu_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(KppError::InvalidParameter("mu values must be strictly decreasing".into()));
    }
    if let Some(&bad) = mu_values.iter().find(|&&m| !(m > 0.0 && m < MU_H)) {
        return Err(KppError::InvalidParameter(format!("mu = {bad} outside (0, mu_H)")));
    }
    let reference_curve = thin_polyline(&reference.points, HAUSDORFF_SPACING);
    let mut members: Vec<FamilyMember> = Vec::new();
    let mut local = *settings;
    let mut error = None;
    let mut failed_mu = None;
    for &mu in mu_values {
        match find_limit_cycle_with(mu, &local) {
            Ok(cycle) => {
                local.initial = cycle.samples[0];
                let curve = thin_polyline(&cycle.samples, HAUSDORFF_SPACING);
                let hausdorff_to_c0 = hausdorff_distance(&curve, &reference_curve);
                members.push(FamilyMember {
                    mu,
                    cycle,
                    hausdorff_to_c0,
                });
            }
            Err(e) => {
                error = Some(e.to_string());
                failed_mu = Some(mu);
                break;
            }
        }
    }
    let monotone_toward_c0 = members.windows(2).all(|w| w[1].hausdorff_to_c0 < w[0].hausdorff_to_c0);
    Ok(CycleFamily {
        members,
        error,
        failed_mu,
        monotone_toward_c0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_below_hopf() {
        let c = find_limit_cycle(13.0 / 120.0).unwrap();
        assert!((c.period - 10.487).abs() < 0.01, "{}", c.period);
        assert!((c.beta_max - 0.45282).abs() < 1e-3, "{}", c.beta_max);
        assert_eq!(c.rotation, Rotation::Clockwise);
        assert!(c.strictly_monotone);
        assert!(c.closure_error < 1e-5, "{}", c.closure_error);
        assert!(c.alpha_range.0 > 1.0 && c.alpha_range.1 < 10.0 / 3.0);
        assert!(localization_band_violation(&c) < 0.0);
        // samples start on the section
        let b0 = beta_raw(c.samples[0].to_array());
        assert!(b0.im.abs() < 1e-9 && b0.re > 0.0);
    }

    #[test]
    fn refuses_stable_regime() {
        assert!(matches!(find_limit_cycle(0.2), Err(KppError::NoHopfInstability { .. })));
        assert!(matches!(find_limit_cycle(MU_H), Err(KppError::NoHopfInstability { .. })));
        assert!(find_limit_cycle(0.0).is_err());
        let bad = CycleSettings {
            initial: StateVec::new(1.0, -1.0, 1.0),
            ..Default::default()
        };
        assert!(find_limit_cycle_with(0.1, &bad).is_err());
    }

    #[test]
    fn reports_missing_convergence() {
        let short = CycleSettings {
            transient: 1.0,
            max_transit: 5.0,
            ..Default::default()
        };
        assert!(matches!(find_limit_cycle_with(0.1, &short), Err(KppError::NoConvergence(_))));
    }

    #[test]
    fn section_root_is_on_the_section() {
        let y0 = [1.0, 0.9, 1.1];
        let y1 = [1.0, 1.1, 0.9];
        let f = [0.0, 0.2, -0.2];
        let s = section_root(y0, f, y1, f, 1.0);
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn family_rejects_bad_lists() {
        let r = ReferenceCycle {
            points: vec![StateVec::ZERO, StateVec::ONES],
            arc_ends: vec![],
        };
        let s = CycleSettings::default();
        assert!(cycle_family(&[], &r, &s).is_err());
        assert!(cycle_family(&[0.01, 0.1], &r, &s).is_err());
        assert!(cycle_family(&[0.2], &r, &s).is_err());
    }
}
