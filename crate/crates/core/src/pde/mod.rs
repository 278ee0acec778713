//! Explicit finite-difference solver for `∂t u = ∂xx u + u + μMu − (Cu)∘u` on
//! `[−L, L]` with zero-flux boundaries, and the front and wave-train measurements
//! made on its output.

mod config;
mod fronts;
mod simulate;
mod wavetrain;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Grid1D, Init, SimConfig, CFL_SAFETY, PAPER_SUPPORT, PAPER_VALUE};
pub use fronts::{
    detect_oscillation_front, estimate_speed, level_set_crossings, track_level_set, FrontKind, FrontTrace,
    OscillationDetector, SpeedEstimate,
};
pub use simulate::{simulate, summarize, ProbeSeries, SimulationOutput, SimulationSummary, Snapshot};
pub use wavetrain::{find_peaks, measure_wave_train, scheme_consistent_cycle, WaveTrainMeasurement, PEAK_PROMINENCE};

use crate::error::{KppError, Result};
use crate::model::{reaction_raw, ModelParams};

/// Nodal values `u(x_k)`, one `[u1, u2, u3]` per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub values: Vec<[f64; 3]>,
}

impl Field {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().map(|u| u[c]).collect()
    }
}

/// Three-point Laplacian with ghost nodes mirroring the first interior neighbour.
#[inline]
fn laplacian_at(u: &[[f64; 3]], k: usize, inv_dx2: f64) -> [f64; 3] {
    let n = u.len();
    let (left, right) = if k == 0 {
        (u[1], u[1])
    } else if k == n - 1 {
        (u[n - 2], u[n - 2])
    } else {
        (u[k - 1], u[k + 1])
    };
    let c = u[k];
    [
        (left[0] - 2.0 * c[0] + right[0]) * inv_dx2,
        (left[1] - 2.0 * c[1] + right[1]) * inv_dx2,
        (left[2] - 2.0 * c[2] + right[2]) * inv_dx2,
    ]
}

/// Discrete Laplacian of a field.
pub fn laplacian(f: &Field, dx: f64) -> Field {
    let inv = 1.0 / (dx * dx);
    Field {
        values: (0..f.len()).map(|k| laplacian_at(&f.values, k, inv)).collect(),
    }
}

/// Trapezoidal quadrature (half weights at the two boundary nodes), per component.
pub fn trapezoid_sum(f: &Field, dx: f64) -> [f64; 3] {
    let n = f.len();
    let mut s = [0.0; 3];
    for (k, u) in f.values.iter().enumerate() {
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        for c in 0..3 {
            s[c] += w * u[c] * dx;
        }
    }
    s
}

const CHUNK: usize = 512;

/// One forward Euler step `u ← u + dt·(Δu + f(u))`, writing into `out`.
///
/// Each node reads only the previous field, so the result does not depend on how
/// the nodes are split between workers.
pub(crate) fn step_into(u: &[[f64; 3]], out: &mut [[f64; 3]], p: &ModelParams, dx: f64, dt: f64) {
    let inv = 1.0 / (dx * dx);
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let base = ci * CHUNK;
        for (off, o) in chunk.iter_mut().enumerate() {
            let k = base + off;
            let lap = laplacian_at(u, k, inv);
            let r = reaction_raw(u[k], p);
            *o = [
                u[k][0] + dt * (lap[0] + r[0]),
                u[k][1] + dt * (lap[1] + r[1]),
                u[k][2] + dt * (lap[2] + r[2]),
            ];
        }
    });
}

/// Locates the first non-finite or negative node.
pub(crate) fn check_field(u: &[[f64; 3]], grid: &Grid1D, t: f64) -> Result<()> {
    let bad = u
        .par_iter()
        .position_first(|v| !v.iter().all(|x| x.is_finite() && *x >= -crate::dynamics::NONNEGATIVITY_TOL));
    match bad {
        None => Ok(()),
        Some(k) => {
            let v = u[k];
            if v.iter().all(|x| x.is_finite()) {
                Err(KppError::NegativeState {
                    time: t,
                    value: v[0].min(v[1]).min(v[2]),
                })
            } else {
                Err(KppError::NonFinite {
                    context: format!("at x = {} (node {k}), t = {t}", grid.x(k)),
                })
            }
        }
    }
}

/// Single explicit step; refuses to run when the CFL bound is violated.
pub fn step(f: &Field, cfg: &SimConfig) -> Result<Field> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if f.len() != grid.n {
        return Err(KppError::InvalidParameter(format!(
            "field has {} nodes, grid has {}",
            f.len(),
            grid.n
        )));
    }
    let p = cfg.params()?;
    let mut out = vec![[0.0; 3]; f.len()];
    step_into(&f.values, &mut out, &p, cfg.dx, cfg.dt);
    check_field(&out, &grid, cfg.dt)?;
    Ok(Field { values: out })
}
