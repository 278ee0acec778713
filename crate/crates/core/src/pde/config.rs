use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Field;
use crate::error::{KppError, Result};
use crate::model::{ModelParams, StateVec};

/// Safety factor of the explicit diffusion limit `dt ≤ safety·dx²/2`.
pub const CFL_SAFETY: f64 = 0.9;

/// Uniform node-centred grid on `[−L, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Grid1D {
    pub half_length: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(half_length: f64, dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(KppError::InvalidParameter(format!("dx must be > 0, got {dx}")));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(KppError::InvalidParameter(format!("L must be > 0, got {half_length}")));
        }
        let n = (2.0 * half_length / dx).round() as usize + 1;
        if n < 3 {
            return Err(KppError::InvalidParameter("grid needs at least 3 nodes".into()));
        }
        Ok(Self { half_length, dx, n })
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.half_length + k as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.x(k)).collect()
    }

    /// Nearest node to `x`, if inside the domain.
    pub fn node(&self, x: f64) -> Option<usize> {
        let k = ((x + self.half_length) / self.dx).round();
        (k >= 0.0 && (k as usize) < self.n).then_some(k as usize)
    }
}

/// Initial data of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum Init {
    /// `(1.01, 1.01, 0.99)` on `|x| ≤ 5`, zero elsewhere.
    Paper,
    Zero,
    Constant { value: StateVec },
    /// The `paper` data times `1 + amplitude·ξ`, `ξ` uniform in `[−1, 1]` per node and component.
    Perturbed { amplitude: f64 },
    /// One value per grid node.
    Explicit { values: Vec<StateVec> },
}

/// Support half-width of the `paper` initial data.
pub const PAPER_SUPPORT: f64 = 5.0;
pub const PAPER_VALUE: StateVec = StateVec::new(1.01, 1.01, 0.99);

/// Full simulation and measurement configuration; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct SimConfig {
    pub mu: f64,
    pub half_length: f64,
    pub dx: f64,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    /// Sampling interval of the front traces.
    pub trace_every: f64,
    pub init: Init,
    pub seed: u64,
    pub level_value: f64,
    pub level_component: usize,
    pub envelope_eps: f64,
    /// Sliding window (time units) of the oscillation detector.
    pub envelope_window: f64,
    /// Positions whose time series (node and right neighbour) are stored at every step.
    pub probes: Vec<f64>,
    pub outer_speed_window: (f64, f64),
    pub envelope_speed_window: (f64, f64),
    pub wave_train_probe: f64,
    pub wave_train_window: (f64, f64),
    /// Worker threads of the stepper; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::paper()
    }
}

impl SimConfig {
    /// Full-scale run: `L = 2000`, `tEnd = 1200`.
    pub fn paper() -> Self {
        Self {
            mu: 13.0 / 120.0,
            half_length: 2000.0,
            dx: 0.5,
            dt: 0.025,
            t_end: 1200.0,
            snapshot_every: 240.0,
            trace_every: 0.5,
            init: Init::Paper,
            seed: 0,
            level_value: 0.9,
            level_component: 0,
            envelope_eps: 0.1,
            envelope_window: 12.0,
            probes: vec![200.0],
            outer_speed_window: (100.0, 300.0),
            envelope_speed_window: (400.0, 1100.0),
            wave_train_probe: 200.0,
            wave_train_window: (800.0, 1100.0),
            threads: None,
        }
    }

    /// Desk-scale run for the outer front: `L = 400`, `tEnd = 300`.
    pub fn desk() -> Self {
        Self {
            half_length: 400.0,
            t_end: 300.0,
            snapshot_every: 60.0,
            ..Self::paper()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "desk" => Ok(Self::desk()),
            other => Err(KppError::InvalidParameter(format!(
                "unknown preset {other:?} (expected paper or desk)"
            ))),
        }
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.half_length, self.dx)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.mu)
    }

    pub fn cfl_limit(&self) -> f64 {
        CFL_SAFETY * self.dx * self.dx / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.grid()?;
        let positive = [
            ("dt", self.dt),
            ("tEnd", self.t_end),
            ("snapshotEvery", self.snapshot_every),
            ("traceEvery", self.trace_every),
            ("envelopeEps", self.envelope_eps),
            ("envelopeWindow", self.envelope_window),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(KppError::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.dt > self.cfl_limit() {
            return Err(KppError::Cfl {
                dt: self.dt,
                limit: self.cfl_limit(),
            });
        }
        if !(self.level_value > 0.0 && self.level_value < 1.0) {
            return Err(KppError::InvalidParameter(format!(
                "level value must lie in (0, 1), got {}",
                self.level_value
            )));
        }
        if self.level_component > 2 {
            return Err(KppError::InvalidParameter("level component must be 0, 1 or 2".into()));
        }
        for (name, (a, b)) in [
            ("outerSpeedWindow", self.outer_speed_window),
            ("envelopeSpeedWindow", self.envelope_speed_window),
            ("waveTrainWindow", self.wave_train_window),
        ] {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(KppError::InvalidParameter(format!("{name} must satisfy t0 < t1")));
            }
        }
        if self.threads == Some(0) {
            return Err(KppError::InvalidParameter("threads must be ≥ 1".into()));
        }
        if let Init::Perturbed { amplitude } = self.init {
            if !(0.0..1.0).contains(&amplitude) {
                return Err(KppError::InvalidParameter("perturbation amplitude must lie in [0, 1)".into()));
            }
        }
        Ok(())
    }

    pub fn initial_field(&self) -> Result<Field> {
        let grid = self.grid()?;
        let paper = |x: f64| {
            if x.abs() <= PAPER_SUPPORT {
                PAPER_VALUE.to_array()
            } else {
                [0.0; 3]
            }
        };
        let values = match &self.init {
            Init::Paper => (0..grid.n).map(|k| paper(grid.x(k))).collect(),
            Init::Zero => vec![[0.0; 3]; grid.n],
            Init::Constant { value } => vec![value.to_array(); grid.n],
            Init::Perturbed { amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..grid.n)
                    .map(|k| {
                        let base = paper(grid.x(k));
                        base.map(|u| u * (1.0 + amplitude * rng.gen_range(-1.0..=1.0)))
                    })
                    .collect()
            }
            Init::Explicit { values } => {
                if values.len() != grid.n {
                    return Err(KppError::InvalidParameter(format!(
                        "explicit initial data has {} nodes, grid has {}",
                        values.len(),
                        grid.n
                    )));
                }
                values.iter().map(|v| v.to_array()).collect()
            }
        };
        let field = Field { values };
        if let Some((k, _)) = field
            .values
            .iter()
            .enumerate()
            .find(|(_, u)| !u.iter().all(|x| x.is_finite() && *x >= 0.0))
        {
            return Err(KppError::InvalidParameter(format!(
                "initial data must be finite and nonnegative (node {k})"
            )));
        }
        Ok(field)
    }
}
