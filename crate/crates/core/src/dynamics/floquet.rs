use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cycle::LimitCycleRecord;
use crate::error::{KppError, Result};
use crate::linalg::dense_eigenvalues;
use crate::model::{jacobian_raw, reaction_raw, ModelParams};

/// Required agreement between direct and shifted exponents.
const SHIFT_TOL: f64 = 1e-8;

/// Monodromy of `Φ' = (A(t) − ω²I)Φ` along a limit cycle, `A(t)` the Jacobian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FloquetReport {
    pub mu: f64,
    pub omega: f64,
    pub period: f64,
    pub multipliers: [Complex64; 3],
    /// `ln|m|/period`, aligned with `multipliers`.
    pub exponents: [f64; 3],
    /// Index of the multiplier tangent to the cycle (closest to `exp(−ω²·period)`).
    pub trivial_index: usize,
    /// `η_i(0) − ω²` from a separate integration at `ω = 0`, sorted like `exponents`.
    pub omega_shifted: [f64; 3],
    pub shift_error: f64,
    /// `|det Φ − exp(∫tr)| / exp(∫tr)`.
    pub liouville_error: f64,
    /// Nontrivial exponents negative at `ω = 0`, every exponent negative otherwise.
    pub strongly_stable: bool,
}

impl FloquetReport {
    pub fn nontrivial_exponents(&self) -> Vec<f64> {
        (0..3).filter(|&i| i != self.trivial_index).map(|i| self.exponents[i]).collect()
    }

    pub fn trivial_multiplier(&self) -> Complex64 {
        self.multipliers[self.trivial_index]
    }
}

struct Monodromy {
    phi: Matrix3<f64>,
    trace_integral: f64,
}

type Aug = ([f64; 3], [[f64; 3]; 3], f64);

fn rhs(y: &Aug, p: &ModelParams, shift: f64) -> Aug {
    let (v, phi, _) = y;
    let mut a = jacobian_raw(*v, p);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= shift;
    }
    let mut dphi = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            dphi[i][k] = (0..3).map(|l| a[i][l] * phi[l][k]).sum();
        }
    }
    (reaction_raw(*v, p), dphi, a[0][0] + a[1][1] + a[2][2])
}

fn add(y: &Aug, h: f64, k: &Aug) -> Aug {
    let mut out = *y;
    for i in 0..3 {
        out.0[i] += h * k.0[i];
        for l in 0..3 {
            out.1[i][l] += h * k.1[i][l];
        }
    }
    out.2 += h * k.2;
    out
}

fn monodromy(cycle: &LimitCycleRecord, p: &ModelParams, omega: f64) -> Result<Monodromy> {
    let n = cycle.samples.len() - 1;
    let h = cycle.step();
    let shift = omega * omega;
    let mut y: Aug = (
        cycle.samples[0].to_array(),
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        0.0,
    );
    for _ in 0..n {
        let k1 = rhs(&y, p, shift);
        let k2 = rhs(&add(&y, 0.5 * h, &k1), p, shift);
        let k3 = rhs(&add(&y, 0.5 * h, &k2), p, shift);
        let k4 = rhs(&add(&y, h, &k3), p, shift);
        let mut next = y;
        for i in 0..3 {
            next.0[i] += h / 6.0 * (k1.0[i] + 2.0 * k2.0[i] + 2.0 * k3.0[i] + k4.0[i]);
            for l in 0..3 {
                next.1[i][l] += h / 6.0 * (k1.1[i][l] + 2.0 * k2.1[i][l] + 2.0 * k3.1[i][l] + k4.1[i][l]);
            }
        }
        next.2 += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
        y = next;
    }
    if !y.1.iter().flatten().all(|x| x.is_finite()) {
        return Err(KppError::NonFinite {
            context: "in the monodromy matrix".into(),
        });
    }
    let phi = Matrix3::from_fn(|i, k| y.1[i][k]);
    Ok(Monodromy {
        phi,
        trace_integral: y.2,
    })
}

fn spectrum(m: &Monodromy, period: f64) -> Result<([Complex64; 3], [f64; 3])> {
    let mut mult = dense_eigenvalues(&m.phi)?;
    // sort by modulus, largest first
    mult.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let exps = mult.map(|z| z.norm().ln() / period);
    Ok((mult, exps))
}

fn validate(cycle: &LimitCycleRecord, p: &ModelParams) -> Result<()> {
    let n = cycle.samples.len();
    if n < 3 || cycle.times.len() != n {
        return Err(KppError::InvalidParameter("cycle has too few samples".into()));
    }
    let span = cycle.times[n - 1] - cycle.times[0];
    if !(cycle.period > 0.0) || (span - cycle.period).abs() > 1e-9 * cycle.period {
        return Err(KppError::InvalidParameter(format!(
            "period {} does not match the sample span {span}",
            cycle.period
        )));
    }
    if (cycle.mu - p.mu).abs() > 1e-14 * p.mu.max(1.0) {
        return Err(KppError::InvalidParameter(format!(
            "cycle computed at mu = {} but parameters have mu = {}",
            cycle.mu, p.mu
        )));
    }
    let scale = cycle.samples[0].norm().max(1.0);
    if cycle.closure_error > 1e-4 * scale {
        return Err(KppError::InvalidParameter(format!(
            "cycle does not close (error {:e})",
            cycle.closure_error
        )));
    }
    Ok(())
}

/// Floquet multipliers and exponents of a cycle for the shifted operator
/// `A(t) − ω²I`; for `ω ≠ 0` the direct exponents are checked against `η_i(0) − ω²`.
pub fn floquet(cycle: &LimitCycleRecord, p: &ModelParams, omega: f64) -> Result<FloquetReport> {
    if !omega.is_finite() {
        return Err(KppError::InvalidParameter(format!("omega must be finite, got {omega}")));
    }
    validate(cycle, p)?;
    let period = cycle.period;
    let direct = monodromy(cycle, p, omega)?;
    let (multipliers, exponents) = spectrum(&direct, period)?;
    let base = if omega == 0.0 {
        exponents
    } else {
        spectrum(&monodromy(cycle, p, 0.0)?, period)?.1
    };
    let omega_shifted = base.map(|e| e - omega * omega);
    let shift_error = exponents
        .iter()
        .zip(&omega_shifted)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if shift_error > SHIFT_TOL {
        return Err(KppError::Inconsistency(format!(
            "direct and shifted Floquet exponents differ by {shift_error:e}"
        )));
    }
    let expected_trivial = (-omega * omega * period).exp();
    let trivial_index = (0..3)
        .min_by(|&a, &b| {
            (multipliers[a] - expected_trivial)
                .norm()
                .total_cmp(&(multipliers[b] - expected_trivial).norm())
        })
        .unwrap();
    let det = direct.phi.determinant();
    let liouville = direct.trace_integral.exp();
    let liouville_error = (det - liouville).abs() / liouville;
    let strongly_stable = if omega == 0.0 {
        (0..3).filter(|&i| i != trivial_index).all(|i| exponents[i] < 0.0)
    } else {
        exponents.iter().all(|&e| e < 0.0)
    };
    Ok(FloquetReport {
        mu: p.mu,
        omega,
        period,
        multipliers,
        exponents,
        trivial_index,
        omega_shifted,
        shift_error,
        liouville_error,
        strongly_stable,
    })
}
