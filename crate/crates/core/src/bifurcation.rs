//! Bifurcation constants and certificates: Hopf eigenvalues, the first Lyapunov
//! coefficient, uniqueness of the positive steady state, speed formulas and the
//! instability criterion for general KPP matrices.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KppError, Result};
use crate::linalg::{complexify, dense_eigenvalues, hdot, solve_complex3, CMatrix3, CVector3};
use crate::model::{
    circulant_eigenpairs, jacobian, reaction_raw, Circulant3, Mode, ModelParams, StateVec, MU_H, MU_MINUS,
    MU_PLUS,
};

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(KppError::InvalidParameter(format!("mu must be finite and > 0, got {mu}")))
    }
}

/// Spectrum of the linearisation at `1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HopfReport {
    pub mu: f64,
    /// Bifurcating eigenvalue of `μM − C` with positive imaginary part,
    /// `3(7/60 − μ) + i·7√3/20`. It is carried by `z̄`; the `z` mode holds its conjugate.
    pub lambda: Complex64,
    pub stable: bool,
    pub mu_h: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
}

pub fn hopf_analysis(mu: f64) -> Result<HopfReport> {
    check_mu(mu)?;
    let row = ModelParams::new(mu)?.linearization_row_at_one();
    let pairs = circulant_eigenpairs(&row);
    let lambda = pairs[1..]
        .iter()
        .map(|p| p.value)
        .max_by(|a, b| a.im.total_cmp(&b.im))
        .unwrap();
    // the constant mode sits at −1 for every μ
    let stable = lambda.re < 0.0 && pairs[0].value.re < 0.0;
    Ok(HopfReport {
        mu,
        lambda,
        stable,
        mu_h: MU_H,
        mu_minus: MU_MINUS,
        mu_plus: MU_PLUS,
    })
}

/// Data of the normal-form formula `f(w) = A w + b(w, w)/2 + c(w, w, w)/6 + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovInputs {
    pub a: Matrix3<f64>,
    /// Competition matrix defining `b(v, w) = −w∘Cv − v∘Cw`.
    pub competition: Matrix3<f64>,
    /// Critical eigenvalue `iω`, `ω > 0`.
    pub lambda: Complex64,
    pub q: CVector3,
    pub p_adj: CVector3,
}

impl LyapunovInputs {
    /// Default system shifted to `w = v − 1` at `μ = μ_H`.
    pub fn at_hopf() -> Result<Self> {
        let params = ModelParams::new(MU_H)?;
        let row = params.linearization_row_at_one();
        let pairs = circulant_eigenpairs(&row);
        let critical = pairs[1..]
            .iter()
            .max_by(|x, y| x.value.im.total_cmp(&y.value.im))
            .copied()
            .unwrap();
        let lambda = critical.value;
        if lambda.re.abs() > 1e-12 || lambda.im <= 0.0 {
            return Err(KppError::Inconsistency(format!("no imaginary pair at mu_H: {lambda}")));
        }
        // Aᵀ is circulant with the transposed row; its eigenvector for −λ = conj(λ).
        let adj = circulant_eigenpairs(&row.transpose())
            .into_iter()
            .min_by(|x, y| (x.value + lambda).norm().total_cmp(&(y.value + lambda).norm()))
            .unwrap();
        let q = critical.vector / hdot(&critical.vector, &critical.vector).sqrt();
        let s = hdot(&adj.vector, &q);
        let p_adj = adj.vector / s.conj();
        Ok(Self {
            a: row.to_matrix(),
            competition: params.competition_matrix(),
            lambda,
            q,
            p_adj,
        })
    }

    /// `b(v, w) = −w∘Cv − v∘Cw`.
    pub fn bilinear(&self, v: &CVector3, w: &CVector3) -> CVector3 {
        let c = complexify(&self.competition);
        -(w.component_mul(&(c * v)) + v.component_mul(&(c * w)))
    }

    /// The reaction term is quadratic, so the cubic part vanishes.
    pub fn trilinear(&self, _u: &CVector3, _v: &CVector3, _w: &CVector3) -> CVector3 {
        CVector3::zeros()
    }

    /// `l₁(0) = Re[p̄ᵀc(q,q,q̄) − 2p̄ᵀb(q, A⁻¹b(q,q̄)) + p̄ᵀb(q̄, (2iω − A)⁻¹ b(q,q))] / (2ω)`.
    pub fn first_lyapunov_coefficient(&self) -> Result<f64> {
        let omega = self.lambda.im;
        let a = complexify(&self.a);
        let q = self.q;
        let qb = q.map(|x| x.conj());
        let h11 = solve_complex3(&a, &self.bilinear(&q, &qb))
            .ok_or_else(|| KppError::Singular("A in the Lyapunov formula".into()))?;
        let shifted: CMatrix3 = CMatrix3::identity() * Complex64::new(0.0, 2.0 * omega) - a;
        let h20 = solve_complex3(&shifted, &self.bilinear(&q, &q))
            .ok_or_else(|| KppError::Singular("2iω − A in the Lyapunov formula".into()))?;
        let p = &self.p_adj;
        let sum = hdot(p, &self.trilinear(&q, &q, &qb)) - hdot(p, &self.bilinear(&q, &h11)) * 2.0
            + hdot(p, &self.bilinear(&qb, &h20));
        Ok(sum.re / (2.0 * omega))
    }
}

/// First Lyapunov coefficient of the default system at the Hopf point
/// (closed form `−13√3/90`).
pub fn first_lyapunov_coefficient() -> Result<f64> {
    LyapunovInputs::at_hopf()?.first_lyapunov_coefficient()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Settings of the multi-start Newton search for steady states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewtonSweep {
    pub seeds: usize,
    pub rng_seed: u64,
    pub box_size: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub divergence_cutoff: f64,
}

impl Default for NewtonSweep {
    fn default() -> Self {
        Self {
            seeds: 1000,
            rng_seed: 0,
            box_size: 4.0,
            max_iterations: 100,
            tolerance: 1e-10,
            divergence_cutoff: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewtonSummary {
    pub converged_to_zero: usize,
    pub converged_to_one: usize,
    /// Converged to a root with a negative component (outside the biological orthant).
    pub converged_elsewhere: usize,
    pub diverged: usize,
    pub not_converged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SteadyStateCertificate {
    pub mu: f64,
    pub roots: Vec<StateVec>,
    /// `(9, 10(7 − 13(1 − 3μ)), 100(1 − 3μ)²)`: a nonzero-`β` steady state must have a
    /// positive root `α` of this quadratic.
    pub poly_coeffs: [f64; 3],
    pub discriminant_sign: Sign,
    /// Positive roots of the quadratic (always empty for `μ > 0`).
    pub positive_poly_roots: Vec<f64>,
    pub newton: NewtonSummary,
}

pub fn positive_steady_states(mu: f64) -> Result<SteadyStateCertificate> {
    positive_steady_states_with(mu, &NewtonSweep::default())
}

pub fn positive_steady_states_with(mu: f64, sweep: &NewtonSweep) -> Result<SteadyStateCertificate> {
    check_mu(mu)?;
    let s = 1.0 - 3.0 * mu;
    let coeffs = [9.0, 10.0 * (7.0 - 13.0 * s), 100.0 * s * s];
    let disc = coeffs[1] * coeffs[1] - 4.0 * coeffs[0] * coeffs[2];
    let positive_poly_roots: Vec<f64> = if disc >= 0.0 {
        let r = disc.sqrt();
        [(-coeffs[1] - r) / (2.0 * coeffs[0]), (-coeffs[1] + r) / (2.0 * coeffs[0])]
            .into_iter()
            .filter(|&x| x > 0.0)
            .collect()
    } else {
        Vec::new()
    };
    if !positive_poly_roots.is_empty() {
        return Err(KppError::Inconsistency(format!(
            "uniqueness quadratic has positive roots {positive_poly_roots:?} at mu = {mu}"
        )));
    }
    let newton = newton_sweep(&ModelParams::new(mu)?, sweep)?;
    Ok(SteadyStateCertificate {
        mu,
        roots: vec![StateVec::ZERO, StateVec::ONES],
        poly_coeffs: coeffs,
        discriminant_sign: Sign::of(disc),
        positive_poly_roots,
        newton,
    })
}

/// Newton iterations from uniform seeds in `[0, box]³`; any converged nonnegative
/// root other than `0` and `1` is an error.
pub fn newton_sweep(params: &ModelParams, sweep: &NewtonSweep) -> Result<NewtonSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(sweep.rng_seed);
    let mut summary = NewtonSummary {
        converged_to_zero: 0,
        converged_to_one: 0,
        converged_elsewhere: 0,
        diverged: 0,
        not_converged: 0,
    };
    for _ in 0..sweep.seeds {
        let seed = Vector3::from_fn(|_, _| rng.gen::<f64>() * sweep.box_size);
        match newton_solve(seed, params, sweep) {
            NewtonOutcome::Converged(root) => {
                let root = StateVec::from_vector(&root);
                if root.max_abs_diff(&StateVec::ZERO) < 1e-8 {
                    summary.converged_to_zero += 1;
                } else if root.max_abs_diff(&StateVec::ONES) < 1e-8 {
                    summary.converged_to_one += 1;
                } else if root.min_component() < -1e-8 {
                    summary.converged_elsewhere += 1;
                } else {
                    return Err(KppError::Inconsistency(format!(
                        "Newton sweep found an extra nonnegative steady state {root:?} at mu = {}",
                        params.mu
                    )));
                }
            }
            NewtonOutcome::Diverged => summary.diverged += 1,
            NewtonOutcome::Stalled => summary.not_converged += 1,
        }
    }
    Ok(summary)
}

enum NewtonOutcome {
    Converged(Vector3<f64>),
    Diverged,
    Stalled,
}

fn newton_solve(mut v: Vector3<f64>, params: &ModelParams, sweep: &NewtonSweep) -> NewtonOutcome {
    for _ in 0..sweep.max_iterations {
        let f = Vector3::from(reaction_raw([v[0], v[1], v[2]], params));
        let jac = jacobian(&StateVec::from_vector(&v), params);
        let Some(step) = jac.lu().solve(&f) else {
            return NewtonOutcome::Stalled;
        };
        v -= step;
        if !v.iter().all(|x| x.is_finite()) || v.amax() > sweep.divergence_cutoff {
            return NewtonOutcome::Diverged;
        }
        if step.amax() < sweep.tolerance {
            return NewtonOutcome::Converged(v);
        }
    }
    NewtonOutcome::Stalled
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpreadingSpeeds {
    /// Invasion speed of `0` by `1` (minimal monotone wave speed).
    pub c_zero_invasion: f64,
    /// Linearly determined invasion speed of `1` by oscillations, `2√(Re λ_μ)`.
    pub c_lin: f64,
}

pub fn spreading_speeds(mu: f64) -> Result<SpreadingSpeeds> {
    let hopf = hopf_analysis(mu)?;
    if mu >= MU_H || hopf.lambda.re <= 0.0 {
        return Err(KppError::NoHopfInstability { mu, mu_h: MU_H });
    }
    Ok(SpreadingSpeeds {
        c_zero_invasion: 2.0,
        c_lin: 2.0 * hopf.lambda.re.sqrt(),
    })
}

/// Speed of the first invasion above which small-amplitude wave trains can travel
/// as fast as the front: `7/(20√(μ_H − μ))`.
pub fn sherratt_threshold(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    if mu >= MU_H {
        return Err(KppError::NoHopfInstability { mu, mu_h: MU_H });
    }
    Ok(7.0 / (20.0 * (MU_H - mu).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LambdaOmega {
    pub lambda0: f64,
    pub omega0: f64,
    /// `μM − C` written in the basis `(1, z + z̄, i(z − z̄))`.
    pub block: [[f64; 3]; 3],
    /// Max entry deviation of `block` from `[[−1,0,0],[0,λ₀,−ω₀],[0,ω₀,λ₀]]`.
    pub basis_check: f64,
}

/// Linear part of the λ-ω normal form: `λ₀ + iω₀` is the `z`-mode eigenvalue,
/// `λ₀ = 3(7/60 − μ)`, `ω₀ = −7√3/20`.
pub fn lambda_omega_params(mu: f64) -> Result<LambdaOmega> {
    check_mu(mu)?;
    let row = ModelParams::new(mu)?.linearization_row_at_one();
    let lz = row.eigenvalue(Mode::Z);
    let (lambda0, omega0) = (lz.re, lz.im);
    let s3 = 3f64.sqrt();
    let basis = Matrix3::new(1.0, 2.0 / s3, 0.0, 1.0, -1.0 / s3, -1.0, 1.0, -1.0 / s3, 1.0);
    let inv = basis
        .try_inverse()
        .ok_or_else(|| KppError::Singular("λ-ω basis".into()))?;
    let block_m = inv * row.to_matrix() * basis;
    let expected = Matrix3::new(-1.0, 0.0, 0.0, 0.0, lambda0, -omega0, 0.0, omega0, lambda0);
    let basis_check = (block_m - expected).amax();
    let mut block = [[0.0; 3]; 3];
    for (i, r) in block.iter_mut().enumerate() {
        for (k, x) in r.iter_mut().enumerate() {
            *x = block_m[(i, k)];
        }
    }
    Ok(LambdaOmega {
        lambda0,
        omega0,
        block,
        basis_check,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstabilityReport {
    /// `L_v = L − diag(v)C − diag(Cv)`, row-major.
    pub lv: [[f64; 3]; 3],
    pub essentially_nonnegative: bool,
    pub spectral_abscissa: f64,
    /// `L_v·v = −(Cv)∘v`.
    pub lv_times_v: StateVec,
    pub steady_state_residual: f64,
}

/// Checks that an unstable positive steady state of `u̇ = Lu − (Cu)∘u` has a
/// linearisation that is not essentially nonnegative.
pub fn instability_criterion(l: &Matrix3<f64>, c: &Matrix3<f64>, v: &StateVec) -> Result<InstabilityReport> {
    if !(v.is_finite() && v.min_component() > 0.0) {
        return Err(KppError::InvalidParameter(format!("instability criterion needs v > 0, got {v:?}")));
    }
    let x = v.to_vector();
    let cv = c * x;
    let residual = (l * x - cv.component_mul(&x)).amax();
    if !(residual <= 1e-8) {
        return Err(KppError::InvalidParameter(format!(
            "v is not a steady state: |Lv − (Cv)∘v| = {residual:e}"
        )));
    }
    let lv = l - Matrix3::from_diagonal(&x) * c - Matrix3::from_diagonal(&cv);
    let essentially_nonnegative = (0..3).all(|i| (0..3).all(|k| i == k || lv[(i, k)] >= 0.0));
    let spectral_abscissa = match Circulant3::from_matrix(&lv, 1e-14) {
        Some(row) => row.eigenvalues().iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max),
        None => dense_eigenvalues(&lv)?.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max),
    };
    if spectral_abscissa >= 0.0 && essentially_nonnegative {
        return Err(KppError::Inconsistency(
            "unstable steady state with an essentially nonnegative linearisation".into(),
        ));
    }
    let lvv = lv * x;
    let mut out = [[0.0; 3]; 3];
    for (i, r) in out.iter_mut().enumerate() {
        for (k, e) in r.iter_mut().enumerate() {
            *e = lv[(i, k)];
        }
    }
    Ok(InstabilityReport {
        lv: out,
        essentially_nonnegative,
        spectral_abscissa,
        lv_times_v: StateVec::from_vector(&lvv),
        steady_state_residual: residual,
    })
}
