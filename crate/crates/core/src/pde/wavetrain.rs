use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SimulationOutput;
use crate::dynamics::{find_limit_cycle_with, CycleSettings, LimitCycleRecord, Scheme};
use crate::error::{KppError, Result};
use crate::model::beta_raw;

/// Minimum prominence of a time-series maximum.
pub const PEAK_PROMINENCE: f64 = 0.05;
/// Half-width of the neighbourhood where the spatial phase gradient is fitted.
const PHASE_HALF_WIDTH: f64 = 10.0;
/// Total phase change across the fit below which the train counts as homogeneous.
const HOMOGENEOUS_PHASE: f64 = 1e-9;

/// Local wave-train parameters at one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WaveTrainMeasurement {
    /// Observed `max|β|` over the window relative to the homogeneous cycle.
    pub gamma: f64,
    /// `None` for a spatially homogeneous train.
    pub wavelength: Option<f64>,
    pub period: f64,
    /// Signed wavenumber `±2π/Λ`; 0 for a homogeneous train.
    pub kappa: f64,
    pub sigma: f64,
    /// Phase speed `σ/κ`; `None` for a homogeneous train.
    pub speed: Option<f64>,
    pub homogeneous: bool,
    pub x0: f64,
    pub window: (f64, f64),
    /// Lag (time) maximising the correlation of `u₁(x₀ + dx, t + lag)` with `u₁(x₀, t)`.
    pub lag: f64,
    pub beta_max_observed: f64,
    pub cycle_beta_max: f64,
    pub peaks: usize,
}

/// Local maxima with at least `prominence`, as fractional indices refined by a
/// parabola through the three neighbouring samples.
pub fn find_peaks(y: &[f64], prominence: f64) -> Vec<f64> {
    let n = y.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    for i in 1..n - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        let mut left_min = y[i];
        let mut j = i;
        while j > 0 {
            j -= 1;
            if y[j] > y[i] {
                break;
            }
            left_min = left_min.min(y[j]);
        }
        let mut right_min = y[i];
        let mut j = i;
        while j + 1 < n {
            j += 1;
            if y[j] > y[i] {
                break;
            }
            right_min = right_min.min(y[j]);
        }
        if y[i] - left_min.max(right_min) < prominence {
            continue;
        }
        let denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
        let shift = if denom != 0.0 {
            (0.5 * (y[i - 1] - y[i + 1]) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        out.push(i as f64 + shift);
    }
    out
}

/// Limit cycle of the diffusionless system under the PDE's own time scheme, the
/// reference for `γ` (forward Euler inflates the cycle at practical steps).
///
/// The discrete orbit fills an invariant circle of the Euler map, so interpolated
/// section crossings jitter at `O(dt²)`; the return-map tolerance is loosened to match.
pub fn scheme_consistent_cycle(mu: f64, dt: f64) -> Result<LimitCycleRecord> {
    find_limit_cycle_with(
        mu,
        &CycleSettings {
            dt,
            scheme: Scheme::ForwardEuler,
            rel_tol: (dt * dt).max(1e-6),
            ..Default::default()
        },
    )
}

fn parabolic_offset(a: f64, b: f64, c: f64) -> f64 {
    let denom = a - 2.0 * b + c;
    if denom != 0.0 {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    }
}

fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Measures `γ`, the period, the wavelength and the signed phase speed of the
/// train passing `x0` during `window`.
///
/// The period comes from successive maxima of `u₁(·, x0)`, the wavelength from
/// the spatial gradient of `arg β` around `x0` at the latest snapshot inside the
/// window, and the direction from the lag of `u₁(x0 + dx, ·)` behind `u₁(x0, ·)`.
pub fn measure_wave_train(
    out: &SimulationOutput,
    x0: f64,
    window: (f64, f64),
    cycle: &LimitCycleRecord,
) -> Result<WaveTrainMeasurement> {
    let probe = out
        .probe(x0)
        .ok_or_else(|| KppError::InvalidParameter(format!("no probe series recorded at x = {x0}")))?;
    let idx: Vec<usize> = (0..probe.times.len())
        .filter(|&i| probe.times[i] >= window.0 - 1e-9 && probe.times[i] <= window.1 + 1e-9)
        .collect();
    if idx.len() < 8 {
        return Err(KppError::InsufficientData(format!(
            "probe at x = {x0} has {} samples in the window",
            idx.len()
        )));
    }
    let (first, last) = (idx[0], *idx.last().unwrap());
    let dt = out.config.dt;
    let here = &probe.here[first..=last];
    let right = &probe.right[first..=last];

    let beta_max_observed = here.iter().map(|u| beta_raw(*u).norm()).fold(0.0, f64::max);
    if !(cycle.beta_max > 0.0) {
        return Err(KppError::InvalidParameter("reference cycle has zero amplitude".into()));
    }
    let gamma = beta_max_observed / cycle.beta_max;

    let u1: Vec<f64> = here.iter().map(|u| u[0]).collect();
    let peaks = find_peaks(&u1, PEAK_PROMINENCE);
    if peaks.len() < 3 {
        return Err(KppError::InsufficientData(format!(
            "{} peaks of u1 at x = {x0} in the window, need at least 3",
            peaks.len()
        )));
    }
    let period = (peaks[peaks.len() - 1] - peaks[0]) * dt / (peaks.len() - 1) as f64;
    let sigma = 2.0 * PI / period;

    // cross-correlation over the last period, lags up to half a period
    let m = (period / dt).round() as usize;
    let max_lag = (m / 2).max(2);
    let len = u1.len();
    if len < m + 2 * max_lag + 1 {
        return Err(KppError::InsufficientData("window shorter than two periods".into()));
    }
    let a_start = len - max_lag - m;
    let mean_a = u1[a_start..a_start + m].iter().sum::<f64>() / m as f64;
    let b: Vec<f64> = right.iter().map(|u| u[0]).collect();
    let mean_b = b[a_start - max_lag..len].iter().sum::<f64>() / (len - a_start + max_lag) as f64;
    let corr = |lag: isize| -> f64 {
        (a_start..a_start + m)
            .map(|i| (u1[i] - mean_a) * (b[(i as isize + lag) as usize] - mean_b))
            .sum()
    };
    let lags: Vec<f64> = (-(max_lag as isize)..=max_lag as isize).map(corr).collect();
    let best = (0..lags.len()).max_by(|&i, &j| lags[i].total_cmp(&lags[j])).unwrap();
    let offset = if best > 0 && best + 1 < lags.len() {
        parabolic_offset(lags[best - 1], lags[best], lags[best + 1])
    } else {
        0.0
    };
    let lag = (best as f64 - max_lag as f64 + offset) * dt;

    let snap = out
        .snapshot_in(window)
        .ok_or_else(|| KppError::InsufficientData("no snapshot inside the wave-train window".into()))?;
    let grid = &out.grid;
    let nodes: Vec<usize> = (0..grid.n).filter(|&k| (grid.x(k) - x0).abs() <= PHASE_HALF_WIDTH).collect();
    let xs: Vec<f64> = nodes.iter().map(|&k| grid.x(k)).collect();
    let mut phase: Vec<f64> = nodes.iter().map(|&k| beta_raw(snap.field.values[k]).arg()).collect();
    for i in 1..phase.len() {
        let mut d = phase[i] - phase[i - 1];
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        phase[i] = phase[i - 1] + d;
    }
    let k_phase = linear_slope(&xs, &phase);
    let homogeneous = !(k_phase.abs() * 2.0 * PHASE_HALF_WIDTH > HOMOGENEOUS_PHASE) || lag == 0.0;
    let (wavelength, kappa, speed) = if homogeneous {
        (None, 0.0, None)
    } else {
        let wavelength = 2.0 * PI / k_phase.abs();
        let kappa = lag.signum() * 2.0 * PI / wavelength;
        (Some(wavelength), kappa, Some(sigma / kappa))
    };
    Ok(WaveTrainMeasurement {
        gamma,
        wavelength,
        period,
        kappa,
        sigma,
        speed,
        homogeneous,
        x0: probe.x,
        window,
        lag,
        beta_max_observed,
        cycle_beta_max: cycle.beta_max,
        peaks: peaks.len(),
    })
}
