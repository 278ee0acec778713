use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Field, Grid1D, Snapshot};
use crate::error::{KppError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrontKind {
    LevelSet,
    OscEnvelope,
}

impl FrontKind {
    fn label(self) -> &'static str {
        match self {
            FrontKind::LevelSet => "LEVEL_SET",
            FrontKind::OscEnvelope => "OSC_ENVELOPE",
        }
    }
}

/// Rightmost front position per sampled time; `None` marks a gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrontTrace {
    pub kind: FrontKind,
    pub times: Vec<f64>,
    pub positions: Vec<Option<f64>>,
}

impl FrontTrace {
    pub fn new(kind: FrontKind) -> Self {
        Self {
            kind,
            times: Vec::new(),
            positions: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, x: Option<f64>) {
        self.times.push(t);
        self.positions.push(x);
    }

    pub fn gaps(&self) -> usize {
        self.positions.iter().filter(|p| p.is_none()).count()
    }

    /// CSV rows `t,x,kind`; gaps leave `x` empty.
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if header {
            w.write_record(["t", "x", "kind"])?;
        }
        for (t, x) in self.times.iter().zip(&self.positions) {
            let xs = x.map(|v| format!("{v:e}")).unwrap_or_default();
            w.write_record([format!("{t:e}"), xs, self.kind.label().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Leftmost and rightmost sign changes of `u_c − level`, linearly interpolated.
///
/// A side reports a crossing only while its domain end is still below `level`:
/// once the invasion front has left through the boundary, crossings inside the
/// oscillating core are not mistaken for it.
pub fn level_set_crossings(field: &Field, grid: &Grid1D, component: usize, level: f64) -> (Option<f64>, Option<f64>) {
    let g: Vec<f64> = field.values.iter().map(|u| u[component] - level).collect();
    let n = g.len();
    let cross = |k: usize| {
        let (a, b) = (g[k], g[k + 1]);
        if (a >= 0.0) != (b >= 0.0) {
            Some(grid.x(k) + grid.dx * a / (a - b))
        } else {
            None
        }
    };
    let left = if g[0] < 0.0 { (0..n - 1).find_map(cross) } else { None };
    let right = if g[n - 1] < 0.0 { (0..n - 1).rev().find_map(cross) } else { None };
    (left, right)
}

/// Rightmost level crossing of one component at every snapshot.
pub fn track_level_set(series: &[Snapshot], grid: &Grid1D, component: usize, level: f64) -> Result<FrontTrace> {
    if !(level > 0.0 && level < 1.0) || component > 2 {
        return Err(KppError::InvalidParameter(format!(
            "level {level} must lie in (0, 1) and component {component} in 0..3"
        )));
    }
    let mut trace = FrontTrace::new(FrontKind::LevelSet);
    for s in series {
        trace.push(s.t, level_set_crossings(&s.field, grid, component, level).1);
    }
    Ok(trace)
}

/// Streaming detector of the oscillating region behind the invasion front.
///
/// A node is oscillating when, over the sliding window, the maximum of
/// `|u − 1|∞` exceeds `eps` while the minimum of the mean `α` stays above `1 − eps`.
/// The second condition excludes the uninvaded state and the monotone front, where
/// `|u − 1|` is also large.
#[derive(Debug, Clone)]
pub struct OscillationDetector {
    eps: f64,
    window: f64,
    frames: VecDeque<(f64, Vec<f32>, Vec<f32>)>,
}

impl OscillationDetector {
    pub fn new(eps: f64, window: f64) -> Result<Self> {
        if !(eps > 0.0 && window > 0.0) {
            return Err(KppError::InvalidParameter(format!(
                "eps and window must be > 0, got {eps}, {window}"
            )));
        }
        Ok(Self {
            eps,
            window,
            frames: VecDeque::new(),
        })
    }

    /// Adds a frame and returns the rightmost oscillating node position, or `None`
    /// while the window is still filling or no node qualifies.
    pub fn push(&mut self, t: f64, field: &Field, grid: &Grid1D) -> Option<f64> {
        let dev: Vec<f32> = field
            .values
            .iter()
            .map(|u| ((u[0] - 1.0).abs().max((u[1] - 1.0).abs()).max((u[2] - 1.0).abs())) as f32)
            .collect();
        let alpha: Vec<f32> = field.values.iter().map(|u| ((u[0] + u[1] + u[2]) / 3.0) as f32).collect();
        self.frames.push_back((t, dev, alpha));
        let t_first = self.frames.front().map(|f| f.0).unwrap_or(t);
        while self.frames.len() > 1 && self.frames[1].0 <= t - self.window + 1e-9 {
            self.frames.pop_front();
        }
        if t - t_first < self.window - 1e-9 {
            return None;
        }
        let n = field.len();
        let eps = self.eps as f32;
        (0..n).rev().find_map(|k| {
            let mut max_dev = 0.0f32;
            let mut min_alpha = f32::INFINITY;
            for (_, d, a) in &self.frames {
                max_dev = max_dev.max(d[k]);
                min_alpha = min_alpha.min(a[k]);
            }
            (max_dev > eps && min_alpha >= 1.0 - eps).then(|| grid.x(k))
        })
    }
}

/// Oscillation-envelope trace over a stored series; the window is in time units.
pub fn detect_oscillation_front(series: &[Snapshot], grid: &Grid1D, eps: f64, window: f64) -> Result<FrontTrace> {
    let mut det = OscillationDetector::new(eps, window)?;
    let mut trace = FrontTrace::new(FrontKind::OscEnvelope);
    for s in series {
        let x = det.push(s.t, &s.field, grid);
        trace.push(s.t, x);
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpeedEstimate {
    pub speed: f64,
    pub intercept: f64,
    pub r2: f64,
    pub samples: usize,
}

/// Least-squares slope of position against time over `[t0, t1]`, skipping gaps.
pub fn estimate_speed(trace: &FrontTrace, window: (f64, f64)) -> Result<SpeedEstimate> {
    let pts: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.positions)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .filter_map(|(t, x)| x.map(|x| (*t, x)))
        .collect();
    if pts.len() < 10 {
        return Err(KppError::InsufficientData(format!(
            "{} front samples in [{}, {}], need at least 10",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let stx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.1 - mx).powi(2)).sum();
    let speed = stx / stt;
    let r2 = if sxx > 0.0 { stx * stx / (stt * sxx) } else { 1.0 };
    Ok(SpeedEstimate {
        speed,
        intercept: mx - speed * mt,
        r2,
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::new(10.0, 0.5).unwrap()
    }

    fn step_field(g: &Grid1D, at: f64) -> Field {
        Field {
            values: (0..g.n).map(|k| if g.x(k) < at { [1.0; 3] } else { [0.0; 3] }).collect(),
        }
    }

    #[test]
    fn level_set_of_a_step() {
        let g = grid();
        let (l, r) = level_set_crossings(&step_field(&g, 0.1), &g, 0, 0.9);
        assert!(l.is_none(), "left end is invaded");
        let r = r.unwrap();
        assert!((r - 0.05).abs() < 1e-12, "{r}");
        let none = Field { values: vec![[1.0; 3]; g.n] };
        assert_eq!(level_set_crossings(&none, &g, 0, 0.9), (None, None));
        // invaded up to the right end: a dip inside is not an outer front
        let mut dip = Field { values: vec![[1.0; 3]; g.n] };
        dip.values[g.n / 2] = [0.5; 3];
        assert_eq!(level_set_crossings(&dip, &g, 0, 0.9), (None, None));
    }

    #[test]
    fn synthetic_linear_trace() {
        let mut tr = FrontTrace::new(FrontKind::LevelSet);
        for k in 0..50 {
            let t = k as f64;
            tr.push(t, Some(2.0 * t));
        }
        tr.push(50.0, None);
        let e = estimate_speed(&tr, (0.0, 60.0)).unwrap();
        assert!((e.speed - 2.0).abs() < 1e-12);
        assert!((e.r2 - 1.0).abs() < 1e-12);
        assert_eq!(e.samples, 50);
        assert!(matches!(estimate_speed(&tr, (0.0, 5.0)), Err(KppError::InsufficientData(_))));
    }

    #[test]
    fn detector_gaps_and_thresholds() {
        let g = grid();
        let mut det = OscillationDetector::new(0.1, 2.0).unwrap();
        // uninvaded zero state: large deviation from 1 but no oscillation
        let zero = Field { values: vec![[0.0; 3]; g.n] };
        for k in 0..10 {
            assert_eq!(det.push(k as f64 * 0.5, &zero, &g), None);
        }
        // oscillation on x < 0 with amplitude 0.3
        let mut det = OscillationDetector::new(0.1, 2.0).unwrap();
        let mut last = None;
        for k in 0..10 {
            let t = k as f64 * 0.5;
            let a = 0.3 * t.sin();
            let f = Field {
                values: (0..g.n)
                    .map(|i| if g.x(i) < 0.0 { [1.0 + a, 1.0 - a, 1.1] } else { [1.0; 3] })
                    .collect(),
            };
            last = det.push(t, &f, &g);
        }
        assert_eq!(last, Some(-0.5));
        // threshold above the amplitude gives gaps
        let mut det = OscillationDetector::new(0.5, 2.0).unwrap();
        for k in 0..10 {
            let t = k as f64 * 0.5;
            let a = 0.3 * t.sin();
            let f = Field { values: vec![[1.0 + a, 1.0 - a, 1.0]; g.n] };
            assert_eq!(det.push(t, &f, &g), None);
        }
    }

    #[test]
    fn csv_marks_gaps() {
        let mut tr = FrontTrace::new(FrontKind::OscEnvelope);
        tr.push(0.0, None);
        tr.push(0.5, Some(1.0));
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,x,kind\n0e0,,OSC_ENVELOPE\n5e-1,1e0,OSC_ENVELOPE\n");
    }
}
