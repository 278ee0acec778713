use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrate::rk4_step;
use crate::model::{ModelParams, StateVec};

/// Vertex scale: the cycle connects the points `10e_i`.
const VERTEX: f64 = 10.0;
/// Radius of the entry and exit balls around the vertices.
const BALL: f64 = 1e-3;
const STEP: f64 = 0.01;
/// Hard cap on the transit time of one arc.
const MAX_ARC_TIME: f64 = 1e6;

/// Sampled heteroclinic cycle of the system with `μ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReferenceCycle {
    /// Closed polyline `10e₁ → arc → 10e₂ → arc → 10e₃ → arc → 10e₁`.
    pub points: Vec<StateVec>,
    /// `(first, last)` point index of each arc.
    pub arc_ends: Vec<(usize, usize)>,
}

/// Integrates the three connections `10e_i → 10e_{i+1}` inside the faces `e_{i+2}^⊥`.
///
/// At `μ = 0` the vertex `10e_i` is non-hyperbolic: within its face the leaving
/// direction has eigenvalue 0 and departure is algebraic, so each arc needs a long
/// but finite time once started a distance `10⁻³` along that direction.
pub fn reference_cycle_c0() -> ReferenceCycle {
    let p = ModelParams::default_rows_at(0.0);
    let norm = 65f64.sqrt();
    let mut points = Vec::new();
    let mut arc_ends = Vec::new();
    for i in 0..3 {
        let next = (i + 1) % 3;
        let vertex = StateVec::basis(i, VERTEX);
        let target = StateVec::basis(next, VERTEX);
        points.push(vertex);
        let mut v = vertex.to_array();
        v[i] -= BALL * 8.0 / norm;
        v[next] += BALL / norm;
        let first = points.len();
        points.push(StateVec::from_array(v));
        let mut last_kept = StateVec::from_array(v);
        let mut t = 0.0;
        while t < MAX_ARC_TIME {
            v = rk4_step(v, &p, STEP);
            t += STEP;
            let s = StateVec::from_array(v);
            if (s - target).norm() < BALL {
                points.push(s);
                break;
            }
            if (s - last_kept).norm() > BALL {
                points.push(s);
                last_kept = s;
            }
        }
        arc_ends.push((first, points.len() - 1));
    }
    points.push(StateVec::basis(0, VERTEX));
    ReferenceCycle { points, arc_ends }
}

/// Keeps points at least `spacing` apart in arc length, always retaining the ends.
pub(crate) fn thin_polyline(points: &[StateVec], spacing: f64) -> Vec<StateVec> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    for (k, p) in points.iter().enumerate() {
        if k == 0 {
            out.push(*p);
            continue;
        }
        acc += (*p - points[k - 1]).norm();
        if acc >= spacing || k == points.len() - 1 {
            out.push(*p);
            acc = 0.0;
        }
    }
    out
}

fn point_segment_distance(p: StateVec, a: StateVec, b: StateVec) -> f64 {
    let ab = (b - a).to_vector();
    let ap = (p - a).to_vector();
    let len2 = ab.norm_squared();
    let s = if len2 > 0.0 {
        (ap.dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (ap - ab * s).norm()
}

fn directed(from: &[StateVec], to: &[StateVec]) -> f64 {
    from.par_iter()
        .map(|&p| {
            if to.len() == 1 {
                return (p - to[0]).norm();
            }
            to.windows(2)
                .map(|w| point_segment_distance(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance between two polylines, measured from vertices to segments.
pub fn hausdorff_distance(a: &[StateVec], b: &[StateVec]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hausdorff_basics() {
        let a = vec![StateVec::ZERO, StateVec::new(1.0, 0.0, 0.0)];
        let b = vec![StateVec::new(0.0, 0.5, 0.0), StateVec::new(1.0, 0.5, 0.0)];
        assert!((hausdorff_distance(&a, &b) - 0.5).abs() < 1e-15);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
        let c = vec![StateVec::ZERO, StateVec::new(2.0, 0.0, 0.0)];
        assert!((hausdorff_distance(&a, &c) - 1.0).abs() < 1e-15);
        assert!(hausdorff_distance(&a, &[]).is_infinite());
    }

    #[test]
    fn thinning_keeps_ends() {
        let pts: Vec<_> = (0..=100).map(|k| StateVec::new(k as f64 * 1e-3, 0.0, 0.0)).collect();
        let thin = thin_polyline(&pts, 0.01);
        assert_eq!(thin.first(), pts.first());
        assert_eq!(thin.last(), pts.last());
        assert!(thin.len() >= 10 && thin.len() <= 12);
    }

    #[test]
    fn reference_cycle_shape() {
        let r = reference_cycle_c0();
        for i in 0..3 {
            let v = StateVec::basis(i, VERTEX);
            let d = r.points.iter().map(|p| (*p - v).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-3);
        }
        for (i, &(a, b)) in r.arc_ends.iter().enumerate() {
            let off = (i + 2) % 3;
            for p in &r.points[a..=b] {
                assert!(p.to_array()[off].abs() < 1e-3);
            }
            let target = StateVec::basis((i + 1) % 3, VERTEX);
            assert!((r.points[b] - target).norm() < 1e-3);
        }
        assert!((r.points[0] - *r.points.last().unwrap()).norm() < 1e-3);
    }
}
