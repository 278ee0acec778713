use std::io::Write;

use serde::{Deserialize, Serialize};

use super::fronts::{estimate_speed, level_set_crossings, FrontKind, FrontTrace, OscillationDetector, SpeedEstimate};
use super::wavetrain::{measure_wave_train, scheme_consistent_cycle, WaveTrainMeasurement};
use super::{check_field, step_into, Field, Grid1D, SimConfig};
use crate::error::{KppError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub field: Field,
}

/// Time series at a node and at its right neighbour, recorded every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeSeries {
    pub requested: f64,
    pub x: f64,
    pub node: usize,
    pub times: Vec<f64>,
    pub here: Vec<[f64; 3]>,
    pub right: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationOutput {
    pub config: SimConfig,
    pub grid: Grid1D,
    pub snapshots: Vec<Snapshot>,
    pub level_trace: FrontTrace,
    pub envelope_trace: FrontTrace,
    pub probes: Vec<ProbeSeries>,
    pub steps: usize,
}

impl SimulationOutput {
    pub fn final_field(&self) -> &Field {
        &self.snapshots.last().expect("simulation stores the final field").field
    }

    pub fn probe(&self, x: f64) -> Option<&ProbeSeries> {
        self.probes.iter().find(|p| (p.requested - x).abs() < 1e-12 || (p.x - x).abs() < 1e-12)
    }

    /// Latest snapshot with `t0 ≤ t ≤ t1`.
    pub fn snapshot_in(&self, window: (f64, f64)) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .rev()
            .find(|s| s.t >= window.0 - 1e-9 && s.t <= window.1 + 1e-9)
    }

    /// CSV with header `t,x,u1,u2,u3`, one row per snapshot node.
    pub fn write_snapshots_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "u1", "u2", "u3"])?;
        for s in &self.snapshots {
            for (k, u) in s.field.values.iter().enumerate() {
                w.write_record([s.t, self.grid.x(k), u[0], u[1], u[2]].iter().map(|v| format!("{v:e}")))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Both traces in one CSV with header `t,x,kind`.
    pub fn write_traces_csv<W: Write>(&self, mut out: W) -> Result<()> {
        self.level_trace.write_csv(&mut out, true)?;
        self.envelope_trace.write_csv(&mut out, false)?;
        Ok(())
    }
}

fn step_index(t: f64, dt: f64) -> usize {
    (t / dt).round() as usize
}

/// Runs the explicit scheme to `tEnd`, storing snapshots, both front traces and
/// the probe series.
pub fn simulate(cfg: &SimConfig) -> Result<SimulationOutput> {
    cfg.validate()?;
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| KppError::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| run(cfg))
        }
        None => run(cfg),
    }
}

fn run(cfg: &SimConfig) -> Result<SimulationOutput> {
    let grid = cfg.grid()?;
    let p = cfg.params()?;
    let dt = cfg.dt;
    let n_steps = step_index(cfg.t_end, dt).max(1);
    let snap_stride = step_index(cfg.snapshot_every, dt).max(1);
    let trace_stride = step_index(cfg.trace_every, dt).max(1);
    let extra_snapshot = step_index(cfg.wave_train_window.1, dt);

    let mut probes: Vec<ProbeSeries> = cfg
        .probes
        .iter()
        .filter_map(|&x| {
            let node = grid.node(x)?;
            (node + 1 < grid.n).then(|| ProbeSeries {
                requested: x,
                x: grid.x(node),
                node,
                times: Vec::with_capacity(n_steps + 1),
                here: Vec::with_capacity(n_steps + 1),
                right: Vec::with_capacity(n_steps + 1),
            })
        })
        .collect();

    let mut u = cfg.initial_field()?.values;
    let mut next = vec![[0.0; 3]; u.len()];
    let mut snapshots = Vec::new();
    let mut level_trace = FrontTrace::new(FrontKind::LevelSet);
    let mut envelope_trace = FrontTrace::new(FrontKind::OscEnvelope);
    let mut detector = OscillationDetector::new(cfg.envelope_eps, cfg.envelope_window)?;

    for k in 0..=n_steps {
        let t = k as f64 * dt;
        if k > 0 {
            step_into(&u, &mut next, &p, cfg.dx, dt);
            std::mem::swap(&mut u, &mut next);
            if k % trace_stride == 0 || k % snap_stride == 0 || k == n_steps {
                check_field(&u, &grid, t)?;
            }
        }
        for pr in &mut probes {
            pr.times.push(t);
            pr.here.push(u[pr.node]);
            pr.right.push(u[pr.node + 1]);
        }
        if k % trace_stride == 0 {
            let field = Field { values: u.clone() };
            let x = level_set_crossings(&field, &grid, cfg.level_component, cfg.level_value).1;
            level_trace.push(t, x);
            envelope_trace.push(t, detector.push(t, &field, &grid));
        }
        if k % snap_stride == 0 || k == n_steps || (k == extra_snapshot && k > 0) {
            snapshots.push(Snapshot {
                t,
                field: Field { values: u.clone() },
            });
        }
    }
    // probe values are never checked between trace steps; a final scan catches NaN
    for pr in &probes {
        if let Some(i) = pr.here.iter().position(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(KppError::NonFinite {
                context: format!("at probe x = {}, t = {}", pr.x, pr.times[i]),
            });
        }
    }
    Ok(SimulationOutput {
        config: cfg.clone(),
        grid,
        snapshots,
        level_trace,
        envelope_trace,
        probes,
        steps: n_steps,
    })
}

/// Speeds and the wave-train measurement; entries whose window is not covered are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationSummary {
    pub outer_speed: Option<SpeedEstimate>,
    pub envelope_speed: Option<SpeedEstimate>,
    pub wave_train: Option<WaveTrainMeasurement>,
    /// Why an entry is missing.
    pub notes: Vec<String>,
}

pub fn summarize(out: &SimulationOutput) -> Result<SimulationSummary> {
    let cfg = &out.config;
    let mut notes = Vec::new();
    let mut speed = |trace: &FrontTrace, window: (f64, f64), name: &str| match estimate_speed(trace, window) {
        Ok(s) => Some(s),
        Err(KppError::InsufficientData(m)) => {
            notes.push(format!("{name}: {m}"));
            None
        }
        Err(e) => {
            notes.push(format!("{name}: {e}"));
            None
        }
    };
    let outer_speed = speed(&out.level_trace, cfg.outer_speed_window, "outer speed");
    let envelope_speed = speed(&out.envelope_trace, cfg.envelope_speed_window, "envelope speed");
    let wave_train = if cfg.t_end + 1e-9 < cfg.wave_train_window.1 {
        notes.push("wave train: run ends before the measurement window".into());
        None
    } else {
        let cycle = scheme_consistent_cycle(cfg.mu, cfg.dt)?;
        match measure_wave_train(out, cfg.wave_train_probe, cfg.wave_train_window, &cycle) {
            Ok(m) => Some(m),
            Err(e) if !matches!(e, KppError::NonFinite { .. }) => {
                notes.push(format!("wave train: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    };
    Ok(SimulationSummary {
        outer_speed,
        envelope_speed,
        wave_train,
        notes,
    })
}
