use serde::{Deserialize, Serialize};

use crate::error::{KppError, Result};

const STEP: f64 = 1e-3;
const START_OFFSET: f64 = 1e-6;
const END_VALUE: f64 = 1e-12;
/// The tail is followed further than the stored profile to measure its decay rate.
const TAIL_VALUE: f64 = 1e-150;
const MAX_STEPS: usize = 50_000_000;

/// Monotone travelling wave `p(ξ)` of `p'' + c p' + p(1 − p) = 0` joining 1 to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalarFrontProfile {
    pub speed: f64,
    /// Shifted so that `p(0) = 1/2`.
    pub xi: Vec<f64>,
    pub p: Vec<f64>,
    /// Largest finite-difference residual over interior nodes.
    pub residual: f64,
    pub monotone: bool,
    /// `p'/p` at the end of the extended tail.
    pub tail_decay_rate: f64,
}

impl ScalarFrontProfile {
    /// CSV with columns `xi,p`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["xi", "p"])?;
        for (x, p) in self.xi.iter().zip(&self.p) {
            w.write_record([format!("{x:e}"), format!("{p:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[inline]
fn rhs(y: [f64; 2], c: f64) -> [f64; 2] {
    [y[1], -c * y[1] - y[0] * (1.0 - y[0])]
}

#[inline]
fn rk4(y: [f64; 2], c: f64, h: f64) -> [f64; 2] {
    let k1 = rhs(y, c);
    let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]], c);
    let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]], c);
    let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]], c);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Shoots from `1` along its unstable direction `r₊ = (−c + √(c² + 4))/2`.
/// Speeds below 2 are refused: the tail at 0 then oscillates and changes sign.
pub fn scalar_front_profile(c: f64) -> Result<ScalarFrontProfile> {
    if !c.is_finite() {
        return Err(KppError::InvalidParameter(format!("speed must be finite, got {c}")));
    }
    if c < 2.0 {
        return Err(KppError::InvalidParameter(format!(
            "no monotone front at speed c = {c} < 2: the linearisation at 0 has complex roots"
        )));
    }
    let r_plus = 0.5 * (-c + (c * c + 4.0).sqrt());
    let mut y = [1.0 - START_OFFSET, -START_OFFSET * r_plus];
    let mut p = vec![y[0]];
    let mut steps = 0;
    while y[0] >= END_VALUE {
        y = rk4(y, c, STEP);
        steps += 1;
        if !(y[0] > 0.0) || steps > MAX_STEPS {
            return Err(KppError::NoConvergence(format!("front shooting at c = {c} left (0, 1)")));
        }
        p.push(y[0]);
    }
    let mut tail = y;
    while tail[0] >= TAIL_VALUE {
        tail = rk4(tail, c, STEP);
        steps += 1;
        if !(tail[0] > 0.0) || steps > MAX_STEPS {
            return Err(KppError::NoConvergence(format!("tail at c = {c} left (0, 1)")));
        }
    }
    let tail_decay_rate = tail[1] / tail[0];

    let half = p.iter().position(|&x| x < 0.5).unwrap_or(0).max(1);
    let frac = (p[half - 1] - 0.5) / (p[half - 1] - p[half]);
    let origin = (half as f64 - 1.0 + frac) * STEP;
    let xi: Vec<f64> = (0..p.len()).map(|k| k as f64 * STEP - origin).collect();

    let residual = p
        .windows(3)
        .map(|w| {
            let d2 = (w[2] - 2.0 * w[1] + w[0]) / (STEP * STEP);
            let d1 = (w[2] - w[0]) / (2.0 * STEP);
            (d2 + c * d1 + w[1] * (1.0 - w[1])).abs()
        })
        .fold(0.0, f64::max);
    let monotone = p.windows(2).all(|w| w[1] < w[0]);
    Ok(ScalarFrontProfile {
        speed: c,
        xi,
        p,
        residual,
        monotone,
        tail_decay_rate,
    })
}
