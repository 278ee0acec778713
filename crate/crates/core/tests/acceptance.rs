//! Acceptance suite: runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use kpp_core::bifurcation::{
    first_lyapunov_coefficient, hopf_analysis, positive_steady_states, sherratt_threshold, spreading_speeds,
};
use kpp_core::dynamics::{
    cycle_family, find_limit_cycle, floquet, localization_band_violation, reference_cycle_c0, scalar_front_profile,
    CycleSettings, Rotation,
};
use kpp_core::model::{jacobian, sign_structure, ModelParams, SignClass, StateVec, MU_H};
use kpp_core::pde::{estimate_speed, simulate, summarize, SimConfig};
use nalgebra::Matrix3;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn c1_lyapunov() -> Outcome {
    let l1 = first_lyapunov_coefficient().map_err(err)?;
    let want = -13.0 * 3f64.sqrt() / 90.0;
    check((l1 - want).abs() < 1e-10, format!("l1 = {l1:.15}, expected {want:.15}"))
}

fn c2_hopf_spectrum() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=100 {
        let mu = k as f64 / 100.0;
        let rep = hopf_analysis(mu).map_err(err)?;
        let p = ModelParams::new(mu).map_err(err)?;
        let a: Matrix3<f64> = p.mutation_matrix() * mu - p.competition_matrix();
        let closed = num_complex::Complex64::new(3.0 * (7.0 / 60.0 - mu), 7.0 * 3f64.sqrt() / 20.0);
        let dense = common::dense_eigenvalues(&a);
        let nearest = dense.iter().map(|e| (e - rep.lambda).norm()).fold(f64::INFINITY, f64::min);
        let conj = dense.iter().map(|e| (e - rep.lambda.conj()).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest).max(conj).max((rep.lambda - closed).norm());
        if rep.stable != (mu > MU_H) {
            return Err(format!("stability flag wrong at mu = {mu}"));
        }
    }
    check(worst < 1e-12, format!("max deviation {worst:.2e} over 100 mu values"))
}

fn c3_uniqueness() -> Outcome {
    let mut parts = Vec::new();
    for mu in [0.05, 13.0 / 120.0, 0.2, 0.5, 0.9] {
        let cert = positive_steady_states(mu).map_err(err)?;
        let n = &cert.newton;
        let roots_ok = cert.roots == vec![StateVec::ZERO, StateVec::ONES];
        if !roots_ok {
            return Err(format!("mu = {mu}: roots {:?}", cert.roots));
        }
        if n.converged_to_one == 0 {
            return Err(format!("mu = {mu}: no seed reached 1"));
        }
        parts.push(format!(
            "mu={mu:.4}: 0:{} 1:{} neg:{} div:{} nc:{}",
            n.converged_to_zero, n.converged_to_one, n.converged_elsewhere, n.diverged, n.not_converged
        ));
    }
    Ok(parts.join("; "))
}

fn c4_limit_cycle() -> Outcome {
    let mu = 13.0 / 120.0;
    let c = find_limit_cycle(mu).map_err(err)?;
    let target = 40.0 * PI / (7.0 * 3f64.sqrt());
    let band = localization_band_violation(&c);
    let rel = (c.period - target).abs() / target;
    let ok = c.min_component > 0.0
        && c.alpha_range.0 >= 1.0 - 1e-6
        && c.alpha_range.1 <= 10.0 / 3.0 + 1e-6
        && c.rotation == Rotation::Clockwise
        && c.strictly_monotone
        && rel < 0.15
        && band <= 0.0;
    check(
        ok,
        format!(
            "period {:.4} ({:.1}% off {target:.4}), alpha [{:.4}, {:.4}], min u {:.4}, {:?} monotone={}, band slack {:.3e}",
            c.period,
            100.0 * rel,
            c.alpha_range.0,
            c.alpha_range.1,
            c.min_component,
            c.rotation,
            c.strictly_monotone,
            -band
        ),
    )
}

fn c5_amplitude_scaling() -> Outcome {
    let far = find_limit_cycle(MU_H - 4e-3).map_err(err)?;
    let near = find_limit_cycle(MU_H - 1e-3).map_err(err)?;
    let ratio = far.beta_max / near.beta_max;
    check(
        (ratio - 2.0).abs() <= 0.2,
        format!("betaMax {:.5} / {:.5} = {ratio:.4}", far.beta_max, near.beta_max),
    )
}

fn c6_heteroclinic_limit() -> Outcome {
    let reference = reference_cycle_c0();
    let fam = cycle_family(&[0.1, 0.03, 0.01, 1e-3], &reference, &CycleSettings::default()).map_err(err)?;
    if let Some(e) = &fam.error {
        return Err(format!("continuation stopped at {:?}: {e}", fam.failed_mu));
    }
    let first = fam.members.first().ok_or("empty family")?;
    let last = fam.members.last().ok_or("empty family")?;
    let d = last.cycle.vertex_distances(10.0);
    let hd: Vec<String> = fam
        .members
        .iter()
        .map(|m| format!("{}:{:.3}", m.mu, m.hausdorff_to_c0))
        .collect();
    let ok = d.iter().all(|&x| x < 0.3) && last.hausdorff_to_c0 < first.hausdorff_to_c0;
    check(
        ok,
        format!(
            "vertex distances at mu=1e-3 [{:.3}, {:.3}, {:.3}] (need < 0.3), Hausdorff {}",
            d[0],
            d[1],
            d[2],
            hd.join(" ")
        ),
    )
}

fn c7_floquet() -> Outcome {
    let mu = 13.0 / 120.0;
    let c = find_limit_cycle(mu).map_err(err)?;
    let p = ModelParams::new(mu).map_err(err)?;
    let base = floquet(&c, &p, 0.0).map_err(err)?;
    let trivial = (base.trivial_multiplier() - 1.0).norm();
    let nontrivial = base.nontrivial_exponents();
    let mut worst = 0.0f64;
    let mut sorted0 = base.exponents;
    sorted0.sort_by(f64::total_cmp);
    for w in [0.5, 1.0, 2.0] {
        let r = floquet(&c, &p, w).map_err(err)?;
        let mut s = r.exponents;
        s.sort_by(f64::total_cmp);
        for i in 0..3 {
            worst = worst.max((s[i] - (sorted0[i] - w * w)).abs());
        }
    }
    let ok = trivial < 1e-3 && nontrivial.iter().all(|&e| e < 0.0) && worst < 1e-8;
    check(
        ok,
        format!(
            "|m0 - 1| = {trivial:.2e}, nontrivial exponents [{:.5}, {:.5}], shift error {worst:.2e}",
            nontrivial[0], nontrivial[1]
        ),
    )
}

fn c8_outer_front() -> Outcome {
    let cfg = SimConfig::desk();
    let out = simulate(&cfg).map_err(err)?;
    let s = estimate_speed(&out.level_trace, (100.0, 300.0)).map_err(err)?;
    check(
        (s.speed - 2.0).abs() <= 0.1,
        format!("level-set speed {:.4} (r2 {:.6}, {} samples)", s.speed, s.r2, s.samples),
    )
}

fn c9_terrace() -> Outcome {
    let cfg = SimConfig::paper();
    let out = simulate(&cfg).map_err(err)?;
    let sum = summarize(&out).map_err(err)?;
    let env = sum.envelope_speed.ok_or_else(|| format!("no envelope speed: {:?}", sum.notes))?;
    let wt = sum.wave_train.as_ref().ok_or_else(|| format!("no wave train: {:?}", sum.notes))?;
    let c_lin = 1.0 / 10f64.sqrt();
    let speed = wt.speed.unwrap_or(f64::NAN);
    let ok = (env.speed - c_lin).abs() <= 0.15 * c_lin && wt.gamma > 0.8 && wt.gamma < 1.0 && speed < 0.0 && speed.abs() > 2.0;
    check(
        ok,
        format!(
            "envelope speed {:.4} vs {c_lin:.4}, gamma {:.4}, wavelength {:?}, period {:.3}, c_gamma {speed:.3}",
            env.speed, wt.gamma, wt.wavelength, wt.period
        ),
    )
}

/// Off-diagonal signs straight from the Jacobian.
fn raw_class(v: &StateVec, p: &ModelParams) -> &'static str {
    let j = jacobian(v, p);
    let off: Vec<f64> = (0..3)
        .flat_map(|i| (0..3).filter(move |&k| k != i).map(move |k| (i, k)))
        .map(|(i, k)| j[(i, k)])
        .collect();
    if off.iter().all(|&x| x >= 0.0) {
        "coop"
    } else if off.iter().all(|&x| x <= 0.0) {
        "comp"
    } else {
        "mixed"
    }
}

fn c10_sign_structure() -> Outcome {
    let mu = 13.0 / 120.0;
    let p = ModelParams::new(mu).map_err(err)?;
    let (lo, hi) = (13.0 / 96.0, 13.0 / 12.0);
    // ten levels per axis, straddling both thresholds
    let axis = [0.0, 0.05, 0.1, 0.13, 0.14, 0.5, 1.0, 1.08, 1.09, 2.0];
    let mut counts = [0usize; 3];
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                let v = StateVec::new(a, b, c);
                let s = sign_structure(&v, &p).map_err(err)?;
                let raw = raw_class(&v, &p);
                let in_coop = a.max(b).max(c) <= lo;
                let in_comp = a.min(b).min(c) >= hi;
                let expected = if in_coop {
                    "coop"
                } else if in_comp {
                    "comp"
                } else {
                    "mixed"
                };
                if raw != expected {
                    return Err(format!("v = {v:?}: Jacobian signs {raw}, cubes predict {expected}"));
                }
                let class_ok = match s.class {
                    SignClass::Cooperative => in_coop,
                    SignClass::Competitive => in_comp,
                    _ => !in_coop && !in_comp,
                };
                if !class_ok {
                    return Err(format!("v = {v:?}: classified {:?}", s.class));
                }
                counts[["coop", "comp", "mixed"].iter().position(|x| *x == raw).unwrap()] += 1;
            }
        }
    }
    let s = sign_structure(&StateVec::ONES, &p).map_err(err)?;
    let bounds_ok = (s.cooperative_bound - lo).abs() < 1e-15 && (s.competitive_bound - hi).abs() < 1e-15;
    // the thresholds are where the Jacobian entries change sign
    let eps = 1e-9;
    let edge = |x: f64| raw_class(&StateVec::splat(x), &p);
    let sharp = edge(lo) == "coop" && edge(lo + eps) == "mixed" && edge(hi - eps) == "mixed" && edge(hi) == "comp";
    check(
        bounds_ok && sharp && matches!(s.class, SignClass::Cyclic { .. }),
        format!(
            "1000 points: {} cooperative, {} competitive, {} mixed; bounds {:.6}, {:.6}; v = 1 {:?}",
            counts[0], counts[1], counts[2], s.cooperative_bound, s.competitive_bound, s.class
        ),
    )
}

fn c11_scalar_front() -> Outcome {
    let f = scalar_front_profile(2.0).map_err(err)?;
    let refused = scalar_front_profile(1.5).is_err();
    check(
        f.residual < 1e-6 && f.monotone && refused,
        format!("residual {:.2e}, monotone {}, c = 1.5 refused {refused}", f.residual, f.monotone),
    )
}

fn c12_identity() -> Outcome {
    let want = 7.0 * 3f64.sqrt() / 10.0;
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let mu = MU_H * k as f64 / 21.0;
        let c = spreading_speeds(mu).map_err(err)?.c_lin;
        let t = sherratt_threshold(mu).map_err(err)?;
        worst = worst.max((c * t - want).abs());
    }
    check(worst < 1e-12, format!("max |cLin·threshold − 7√3/10| = {worst:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("1 first Lyapunov coefficient", c1_lyapunov),
        ("2 Hopf spectrum", c2_hopf_spectrum),
        ("3 steady-state uniqueness", c3_uniqueness),
        ("4 limit cycle at 13/120", c4_limit_cycle),
        ("5 Hopf amplitude scaling", c5_amplitude_scaling),
        ("6 heteroclinic limit", c6_heteroclinic_limit),
        ("7 Floquet", c7_floquet),
        ("8 outer front speed", c8_outer_front),
        ("9 propagating terrace", c9_terrace),
        ("10 sign structure", c10_sign_structure),
        ("11 scalar front", c11_scalar_front),
        ("12 speed-threshold identity", c12_identity),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {name} ({:.1}s): {detail}", t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
