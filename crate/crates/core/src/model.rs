//! Reaction term, Jacobian and the circulant spectral algebra.
//!
//! Every 3×3 circulant matrix
//!
//! ```text
//! | a b c |
//! | c a b |
//! | b c a |
//! ```
//!
//! is diagonalised by the Fourier basis `(1, z, z̄)` with `z = (1, j, j̄)/√3`,
//! `j = exp(2iπ/3)`. State vectors are decomposed accordingly as
//! `v = α·1 + β·z + conj(β·z)`, `α` real and `β` complex.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KppError, Result};
use crate::linalg::CVector3;

/// Hopf bifurcation value of the default system.
pub const MU_H: f64 = 7.0 / 60.0;
/// Lower edge of the cyclic (rock–paper–scissors) sign regime at `v = 1`.
pub const MU_MINUS: f64 = 1.0 / 10.0;
/// Upper edge of the cyclic sign regime at `v = 1`.
pub const MU_PLUS: f64 = 8.0 / 10.0;

/// The cube root of unity `exp(2iπ/3)`.
pub fn j() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// The Fourier mode `z = (1, j, j̄)/√3` (unit Hermitian norm).
pub fn z_mode() -> CVector3 {
    let s = 1.0 / 3f64.sqrt();
    let j = j();
    CVector3::new(Complex64::new(s, 0.0), j * s, j.conj() * s)
}

/// A point of the phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateVec {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl StateVec {
    pub const ZERO: StateVec = StateVec::new(0.0, 0.0, 0.0);
    pub const ONES: StateVec = StateVec::new(1.0, 1.0, 1.0);

    pub const fn new(u1: f64, u2: f64, u3: f64) -> Self {
        Self { u1, u2, u3 }
    }

    pub const fn splat(value: f64) -> Self {
        Self::new(value, value, value)
    }

    /// `scale · e_i`, with `index` in `0..3`.
    pub fn basis(index: usize, scale: f64) -> Self {
        let mut a = [0.0; 3];
        a[index % 3] = scale;
        Self::from_array(a)
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.u1, self.u2, self.u3]
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.u1, self.u2, self.u3)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite() && self.u3.is_finite()
    }

    pub fn min_component(&self) -> f64 {
        self.u1.min(self.u2).min(self.u3)
    }

    pub fn max_component(&self) -> f64 {
        self.u1.max(self.u2).max(self.u3)
    }

    pub fn mean(&self) -> f64 {
        (self.u1 + self.u2 + self.u3) / 3.0
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        (self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3).sqrt()
    }

    pub fn max_abs_diff(&self, other: &StateVec) -> f64 {
        (self.u1 - other.u1)
            .abs()
            .max((self.u2 - other.u2).abs())
            .max((self.u3 - other.u3).abs())
    }

    /// Cyclic shift `(u1, u2, u3) ↦ (u3, u1, u2)`; commutes with every circulant.
    pub fn rotate(&self) -> Self {
        Self::new(self.u3, self.u1, self.u2)
    }

    fn check_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(KppError::NonFinite {
                context: format!("in {what} input {self:?}"),
            })
        }
    }
}

impl Add for StateVec {
    type Output = StateVec;
    fn add(self, rhs: StateVec) -> StateVec {
        StateVec::new(self.u1 + rhs.u1, self.u2 + rhs.u2, self.u3 + rhs.u3)
    }
}

impl Sub for StateVec {
    type Output = StateVec;
    fn sub(self, rhs: StateVec) -> StateVec {
        StateVec::new(self.u1 - rhs.u1, self.u2 - rhs.u2, self.u3 - rhs.u3)
    }
}

impl Mul<f64> for StateVec {
    type Output = StateVec;
    fn mul(self, rhs: f64) -> StateVec {
        StateVec::new(self.u1 * rhs, self.u2 * rhs, self.u3 * rhs)
    }
}

/// First row `(a, b, c)` of a 3×3 circulant matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circulant3 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// One eigenpair of a circulant matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub value: Complex64,
    pub vector: CVector3,
}

/// Fourier mode carried by an eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// The constant vector `1`.
    Constant,
    /// `z = (1, j, j̄)/√3`.
    Z,
    /// `z̄`.
    ZBar,
}

impl Circulant3 {
    pub const IDENTITY: Circulant3 = Circulant3::new(1.0, 0.0, 0.0);
    /// Default mutation row, `M = circ(−2, 1, 1)`.
    pub const MUTATION: Circulant3 = Circulant3::new(-2.0, 1.0, 1.0);
    /// Default competition row, `C = circ(1/10, 8/10, 1/10)`.
    pub const COMPETITION: Circulant3 = Circulant3::new(1.0 / 10.0, 8.0 / 10.0, 1.0 / 10.0);

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let (a, b, c) = (self.a, self.b, self.c);
        Matrix3::new(a, b, c, c, a, b, b, c, a)
    }

    /// Recovers the first row when `m` is circulant (to `tol`), `None` otherwise.
    pub fn from_matrix(m: &Matrix3<f64>, tol: f64) -> Option<Self> {
        let row = Self::new(m[(0, 0)], m[(0, 1)], m[(0, 2)]);
        let diff = (row.to_matrix() - m).amax();
        (diff <= tol).then_some(row)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s)
    }

    pub fn row_sum(&self) -> f64 {
        self.a + self.b + self.c
    }

    /// `m·v` without building the matrix.
    #[inline]
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let (a, b, c) = (self.a, self.b, self.c);
        [
            a * v[0] + b * v[1] + c * v[2],
            c * v[0] + a * v[1] + b * v[2],
            b * v[0] + c * v[1] + a * v[2],
        ]
    }

    /// Closed-form eigenvalue on a Fourier mode.
    pub fn eigenvalue(&self, mode: Mode) -> Complex64 {
        let j = j();
        match mode {
            Mode::Constant => Complex64::new(self.row_sum(), 0.0),
            Mode::Z => self.a + self.b * j + self.c * j.conj(),
            Mode::ZBar => self.a + self.b * j.conj() + self.c * j,
        }
    }

    pub fn eigenvalues(&self) -> [Complex64; 3] {
        [Mode::Constant, Mode::Z, Mode::ZBar].map(|m| self.eigenvalue(m))
    }
}

impl Add for Circulant3 {
    type Output = Circulant3;
    fn add(self, rhs: Circulant3) -> Circulant3 {
        Circulant3::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c)
    }
}

impl Sub for Circulant3 {
    type Output = Circulant3;
    fn sub(self, rhs: Circulant3) -> Circulant3 {
        Circulant3::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c)
    }
}

/// The three eigenpairs `(a+b+c, 1)`, `(a+bj+cj̄, z)`, `(a+bj̄+cj, z̄)`.
pub fn circulant_eigenpairs(m: &Circulant3) -> [Eigenpair; 3] {
    let one = Complex64::new(1.0, 0.0);
    let z = z_mode();
    [
        Eigenpair {
            value: m.eigenvalue(Mode::Constant),
            vector: CVector3::new(one, one, one),
        },
        Eigenpair {
            value: m.eigenvalue(Mode::Z),
            vector: z,
        },
        Eigenpair {
            value: m.eigenvalue(Mode::ZBar),
            vector: z.map(|x| x.conj()),
        },
    ]
}

/// Mutation strength and the two circulant rows of the reaction term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelParams {
    pub mu: f64,
    pub mutation_row: Circulant3,
    pub competition_row: Circulant3,
}

impl ModelParams {
    /// Default matrices with mutation strength `mu > 0`.
    pub fn new(mu: f64) -> Result<Self> {
        Self::with_rows(mu, Circulant3::MUTATION, Circulant3::COMPETITION)
    }

    pub fn with_rows(mu: f64, mutation_row: Circulant3, competition_row: Circulant3) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(KppError::InvalidParameter(format!("mu must be finite and > 0, got {mu}")));
        }
        Self::unchecked(mu, mutation_row, competition_row)
    }

    /// Allows `mu = 0` (the pure competition limit used for the heteroclinic cycle).
    pub(crate) fn unchecked(mu: f64, mutation_row: Circulant3, competition_row: Circulant3) -> Result<Self> {
        let finite = [mutation_row, competition_row]
            .iter()
            .all(|r| r.a.is_finite() && r.b.is_finite() && r.c.is_finite());
        if !finite || !mu.is_finite() || mu < 0.0 {
            return Err(KppError::InvalidParameter("non-finite model rows".into()));
        }
        Ok(Self {
            mu,
            mutation_row,
            competition_row,
        })
    }

    pub(crate) fn default_rows_at(mu: f64) -> Self {
        Self {
            mu,
            mutation_row: Circulant3::MUTATION,
            competition_row: Circulant3::COMPETITION,
        }
    }

    pub fn mutation_matrix(&self) -> Matrix3<f64> {
        self.mutation_row.to_matrix()
    }

    pub fn competition_matrix(&self) -> Matrix3<f64> {
        self.competition_row.to_matrix()
    }

    /// Row of `I + μM`, the linear part of the reaction term.
    pub fn linear_row(&self) -> Circulant3 {
        Circulant3::IDENTITY + self.mutation_row.scale(self.mu)
    }

    /// Row of `μM − C`, the linearisation at `1` for the default normalisation.
    pub fn linearization_row_at_one(&self) -> Circulant3 {
        self.mutation_row.scale(self.mu) - self.competition_row
    }
}

/// `u + μMu − (Cu)∘u` on raw arrays; the hot path of the integrators.
#[inline]
pub fn reaction_raw(v: [f64; 3], p: &ModelParams) -> [f64; 3] {
    let lin = p.linear_row().apply(v);
    let cv = p.competition_row.apply(v);
    [lin[0] - cv[0] * v[0], lin[1] - cv[1] * v[1], lin[2] - cv[2] * v[2]]
}

/// The reaction term `u + μMu − (Cu)∘u`.
pub fn reaction(v: &StateVec, p: &ModelParams) -> Result<StateVec> {
    v.check_finite("reaction")?;
    let out = StateVec::from_array(reaction_raw(v.to_array(), p));
    out.check_finite("reaction output")?;
    Ok(out)
}

/// `I + μM − diag(Cv) − diag(v)·C`.
pub fn jacobian(v: &StateVec, p: &ModelParams) -> Matrix3<f64> {
    let x = v.to_vector();
    let c = p.competition_matrix();
    let cv = c * x;
    Matrix3::identity() + p.mutation_matrix() * p.mu - Matrix3::from_diagonal(&cv) - Matrix3::from_diagonal(&x) * c
}

#[inline]
pub(crate) fn jacobian_raw(v: [f64; 3], p: &ModelParams) -> [[f64; 3]; 3] {
    let lin = p.linear_row();
    let c = p.competition_row;
    let cv = c.apply(v);
    let l = [[lin.a, lin.b, lin.c], [lin.c, lin.a, lin.b], [lin.b, lin.c, lin.a]];
    let cm = [[c.a, c.b, c.c], [c.c, c.a, c.b], [c.b, c.c, c.a]];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            out[i][k] = l[i][k] - v[i] * cm[i][k];
        }
        out[i][i] -= cv[i];
    }
    out
}

/// Spectral coordinates of a state: `v = α·1 + β·z + conj(β·z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirculantCoords {
    pub alpha: f64,
    pub beta: Complex64,
}

/// `α` is the component mean and `β = conj(z)ᵀ v`.
pub fn decompose(v: &StateVec) -> CirculantCoords {
    CirculantCoords {
        alpha: v.mean(),
        beta: beta_raw(v.to_array()),
    }
}

#[inline]
pub(crate) fn beta_raw(v: [f64; 3]) -> Complex64 {
    // conj(z) = (1, j̄, j)/√3, j = −1/2 + i√3/2
    let s3 = 3f64.sqrt();
    let re = (v[0] - 0.5 * (v[1] + v[2])) / s3;
    let im = 0.5 * (v[2] - v[1]);
    Complex64::new(re, im)
}

pub fn recompose(c: &CirculantCoords) -> StateVec {
    let z = z_mode();
    let w = z * c.beta;
    StateVec::new(
        c.alpha + 2.0 * w[0].re,
        c.alpha + 2.0 * w[1].re,
        c.alpha + 2.0 * w[2].re,
    )
}

/// `dα/dt` along the diffusionless flow, written in spectral coordinates.
///
/// In general `α(1 + μ·m) − s·α² − (2/3)·Re(λ_z(C))·|β|²`, with `m`, `s` the row sums
/// of `M`, `C`. For the default rows this is `α − α² + (7/30)|β|²`, independent of `μ`.
pub fn alpha_derivative(c: &CirculantCoords, p: &ModelParams) -> f64 {
    let m_sum = p.mutation_row.row_sum();
    let s = p.competition_row.row_sum();
    let lz = p.competition_row.eigenvalue(Mode::Z);
    c.alpha * (1.0 + p.mu * m_sum) - s * c.alpha * c.alpha - (2.0 / 3.0) * lz.re * c.beta.norm_sqr()
}

/// Sign regime of the linearised reaction term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignClass {
    Cooperative,
    Competitive,
    /// Rock–paper–scissors pattern; `pattern` holds the off-diagonal signs.
    Cyclic { pattern: [[i8; 3]; 3] },
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SignStructure {
    pub class: SignClass,
    /// Off-diagonal signs of `jacobian(v)` (diagonal entries are 0).
    pub signs: [[i8; 3]; 3],
    /// `μ/μ₊`: upper edge of the cooperative cube.
    pub cooperative_bound: f64,
    /// `μ/μ₋`: lower edge of the competitive region.
    pub competitive_bound: f64,
}

/// The `(• − +; + • −; − + •)` pattern of the default system.
pub const CYCLIC_PATTERN: [[i8; 3]; 3] = [[0, -1, 1], [1, 0, -1], [-1, 1, 0]];

/// Classifies `jacobian(v, p)` by the cube conditions and cross-checks the result
/// against the signs of its off-diagonal entries.
///
/// Each off-diagonal entry `(i, i+1)` equals `μ·b_M − v_i·b_C` and `(i, i+2)` equals
/// `μ·c_M − v_i·c_C`, so every row changes sign at the two thresholds
/// `μ b_M / b_C` and `μ c_M / c_C`.
pub fn sign_structure(v: &StateVec, p: &ModelParams) -> Result<SignStructure> {
    v.check_finite("sign_structure")?;
    if v.min_component() < 0.0 {
        return Err(KppError::InvalidParameter(format!("sign_structure needs v ≥ 0, got {v:?}")));
    }
    let (m, c) = (p.mutation_row, p.competition_row);
    if !(m.b > 0.0 && m.c > 0.0 && c.b > 0.0 && c.c > 0.0) {
        return Err(KppError::InvalidParameter(
            "sign_structure needs positive off-diagonal mutation and competition entries".into(),
        ));
    }
    let t_next = p.mu * m.b / c.b;
    let t_prev = p.mu * m.c / c.c;
    let lo = t_next.min(t_prev);
    let hi = t_next.max(t_prev);
    let comps = v.to_array();

    let pattern = {
        // rows where v_i lies strictly between the thresholds: the entry with the smaller
        // threshold has turned negative, the other is still positive
        let (next, prev) = if t_next < t_prev { (-1, 1) } else { (1, -1) };
        let mut pat = [[0i8; 3]; 3];
        for (i, row) in pat.iter_mut().enumerate() {
            row[(i + 1) % 3] = next;
            row[(i + 2) % 3] = prev;
        }
        pat
    };
    let class = if comps.iter().all(|&x| x <= lo) {
        SignClass::Cooperative
    } else if comps.iter().all(|&x| x >= hi) {
        SignClass::Competitive
    } else if t_next != t_prev && comps.iter().all(|&x| x > lo && x < hi) {
        SignClass::Cyclic { pattern }
    } else {
        SignClass::Other
    };

    let jac = jacobian(v, p);
    let scale = jac.amax().max(1.0);
    let mut signs = [[0i8; 3]; 3];
    for (i, row) in signs.iter_mut().enumerate() {
        for (k, s) in row.iter_mut().enumerate() {
            if i != k {
                let x = jac[(i, k)];
                *s = if x.abs() <= 1e-12 * scale { 0 } else { x.signum() as i8 };
            }
        }
    }
    let off = || (0..3).flat_map(|i| (0..3).filter(move |&k| k != i).map(move |k| (i, k)));
    let from_signs = if off().all(|(i, k)| signs[i][k] >= 0) {
        SignClass::Cooperative
    } else if off().all(|(i, k)| signs[i][k] <= 0) {
        SignClass::Competitive
    } else if signs == pattern {
        SignClass::Cyclic { pattern }
    } else {
        SignClass::Other
    };
    if from_signs != class {
        return Err(KppError::Inconsistency(format!(
            "cube classification {class:?} disagrees with Jacobian signs {signs:?} at {v:?}"
        )));
    }
    Ok(SignStructure {
        class,
        signs,
        cooperative_bound: lo,
        competitive_bound: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults(mu: f64) -> ModelParams {
        ModelParams::new(mu).unwrap()
    }

    fn fd_jacobian(v: &StateVec, p: &ModelParams, h: f64) -> Matrix3<f64> {
        let mut out = Matrix3::zeros();
        for k in 0..3 {
            let mut plus = v.to_array();
            let mut minus = v.to_array();
            plus[k] += h;
            minus[k] -= h;
            let fp = reaction_raw(plus, p);
            let fm = reaction_raw(minus, p);
            for i in 0..3 {
                out[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        out
    }

    #[test]
    fn default_rows_expand_to_the_model_matrices() {
        let m = Circulant3::MUTATION.to_matrix();
        assert_eq!(m, Matrix3::new(-2.0, 1.0, 1.0, 1.0, -2.0, 1.0, 1.0, 1.0, -2.0));
        let c = Circulant3::COMPETITION.to_matrix() * 10.0;
        let expected = Matrix3::new(1.0, 8.0, 1.0, 1.0, 1.0, 8.0, 8.0, 1.0, 1.0);
        assert!((c - expected).amax() < 1e-14);
        // rows and columns of M sum to zero, rows of C to one
        for i in 0..3 {
            assert_eq!(m.row(i).sum(), 0.0);
            assert_eq!(m.column(i).sum(), 0.0);
        }
        assert_eq!(Circulant3::COMPETITION.row_sum(), 1.0);
    }

    #[test]
    fn reaction_at_constant_states() {
        for mu in [0.05, 13.0 / 120.0, 1.0] {
            let p = defaults(mu);
            assert_eq!(reaction(&StateVec::ONES, &p).unwrap(), StateVec::ZERO);
            assert_eq!(reaction(&StateVec::ZERO, &p).unwrap(), StateVec::ZERO);
            let f = reaction(&StateVec::splat(2.0), &p).unwrap();
            // independent route: dense matrices
            let x = Vector3::new(2.0, 2.0, 2.0);
            let dense = x + p.mutation_matrix() * x * mu - (p.competition_matrix() * x).component_mul(&x);
            assert!((f.to_vector() - dense).amax() < 1e-14);
            assert!(f.max_abs_diff(&StateVec::splat(-2.0)) < 1e-14);
        }
    }

    #[test]
    fn reaction_rejects_non_finite_input() {
        let p = defaults(0.1);
        let err = reaction(&StateVec::new(f64::NAN, 0.0, 0.0), &p).unwrap_err();
        assert!(matches!(err, KppError::NonFinite { .. }));
        assert!(ModelParams::new(0.0).is_err());
        assert!(ModelParams::new(-1.0).is_err());
    }

    #[test]
    fn jacobian_at_one_is_mu_m_minus_c() {
        let mu = 13.0 / 120.0;
        let p = defaults(mu);
        let j = jacobian(&StateVec::ONES, &p);
        let expected = Matrix3::new(
            -2.0 * mu - 0.1,
            mu - 0.8,
            mu - 0.1,
            mu - 0.1,
            -2.0 * mu - 0.1,
            mu - 0.8,
            mu - 0.8,
            mu - 0.1,
            -2.0 * mu - 0.1,
        );
        assert!((j - expected).amax() < 1e-15);
        let j0 = jacobian(&StateVec::ZERO, &p);
        assert!((j0 - (Matrix3::identity() + p.mutation_matrix() * mu)).amax() < 1e-15);
    }

    #[test]
    fn jacobian_at_two_without_mutation() {
        let p = ModelParams::unchecked(0.0, Circulant3::MUTATION, Circulant3::COMPETITION).unwrap();
        let v = StateVec::splat(2.0);
        let c = p.competition_matrix();
        let expected = Matrix3::identity() - Matrix3::identity() * 2.0 - c * 2.0;
        assert!((jacobian(&v, &p) - expected).amax() < 1e-14);
        assert!((fd_jacobian(&v, &p, 1e-6) - expected).amax() < 1e-6);
    }

    #[test]
    fn raw_jacobian_agrees_with_matrix_form() {
        let p = defaults(0.3);
        let v = StateVec::new(0.2, 1.7, 3.1);
        let raw = jacobian_raw(v.to_array(), &p);
        let m = jacobian(&v, &p);
        for i in 0..3 {
            for k in 0..3 {
                assert!((raw[i][k] - m[(i, k)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let c = decompose(&StateVec::ONES);
        assert_eq!(c.alpha, 1.0);
        assert!(c.beta.norm() < 1e-15);
        let c = decompose(&StateVec::basis(0, 10.0));
        assert!((c.alpha - 10.0 / 3.0).abs() < 1e-15);
        assert!((c.beta.norm() - 10.0 / 3f64.sqrt()).abs() < 1e-12);
        let back = recompose(&CirculantCoords {
            alpha: 1.0,
            beta: Complex64::new(0.0, 0.0),
        });
        assert_eq!(back, StateVec::ONES);
    }

    #[test]
    fn ten_e1_coordinates_solve_the_linear_system() {
        // direct 3×3 solve of v = α1 + 2Re(β)Re(z) − 2Im(β)Im(z) for (α, Re β, Im β)
        let z = z_mode();
        let basis = Matrix3::new(
            1.0,
            2.0 * z[0].re,
            -2.0 * z[0].im,
            1.0,
            2.0 * z[1].re,
            -2.0 * z[1].im,
            1.0,
            2.0 * z[2].re,
            -2.0 * z[2].im,
        );
        let sol = basis.lu().solve(&Vector3::new(10.0, 0.0, 0.0)).unwrap();
        let c = decompose(&StateVec::basis(0, 10.0));
        assert!((sol[0] - c.alpha).abs() < 1e-12);
        assert!((sol[1] - c.beta.re).abs() < 1e-12);
        assert!((sol[2] - c.beta.im).abs() < 1e-12);
        assert!((sol[1] - 10.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eigenpairs_of_the_model_rows() {
        let m = Circulant3::MUTATION.eigenvalues();
        assert!((m[0] - Complex64::new(0.0, 0.0)).norm() < 1e-15);
        assert!((m[1] - Complex64::new(-3.0, 0.0)).norm() < 1e-14);
        assert!((m[2] - Complex64::new(-3.0, 0.0)).norm() < 1e-14);
        let cz = Circulant3::COMPETITION.eigenvalue(Mode::Z);
        assert!((cz - j() * 0.7).norm() < 1e-15);
        for ev in Circulant3::IDENTITY.eigenvalues() {
            assert_eq!(ev, Complex64::new(1.0, 0.0));
        }
        for row in [Circulant3::MUTATION, Circulant3::COMPETITION, Circulant3::new(0.3, -1.2, 2.5)] {
            let mat = row.to_matrix().map(|x| Complex64::new(x, 0.0));
            for pair in circulant_eigenpairs(&row) {
                let residual = mat * pair.vector - pair.vector * pair.value;
                assert!(residual.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn z_mode_identities() {
        let z = z_mode();
        let zz = z.component_mul(&z);
        let zbar = z.map(|x| x.conj());
        assert!((zz - zbar.unscale(3f64.sqrt())).norm() < 1e-15);
        let zzb = z.component_mul(&zbar);
        for x in zzb.iter() {
            assert!((x - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        }
        assert!((j() + j().conj() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn alpha_derivative_examples() {
        let p = defaults(13.0 / 120.0);
        let at = |alpha: f64| {
            alpha_derivative(
                &CirculantCoords {
                    alpha,
                    beta: Complex64::new(0.0, 0.0),
                },
                &p,
            )
        };
        assert_eq!(at(1.0), 0.0);
        assert_eq!(at(2.0), -2.0);
        let f = reaction(&StateVec::splat(2.0), &p).unwrap();
        assert!((at(2.0) - f.mean()).abs() < 1e-14);
        let c = decompose(&StateVec::basis(0, 10.0));
        assert!(alpha_derivative(&c, &p).abs() < 1e-12);
        let p0 = ModelParams::unchecked(0.0, Circulant3::MUTATION, Circulant3::COMPETITION).unwrap();
        let f0 = reaction(&StateVec::basis(0, 10.0), &p0).unwrap();
        assert!(f0.norm() < 1e-13);
        // default closed form
        let beta = Complex64::new(0.3, -1.1);
        let closed = 1.7 - 1.7 * 1.7 + 7.0 / 30.0 * beta.norm_sqr();
        assert!((alpha_derivative(&CirculantCoords { alpha: 1.7, beta }, &p) - closed).abs() < 1e-14);
    }

    #[test]
    fn sign_structure_examples() {
        let mu = 13.0 / 120.0;
        let p = defaults(mu);
        let s = sign_structure(&StateVec::ONES, &p).unwrap();
        assert_eq!(s.class, SignClass::Cyclic { pattern: CYCLIC_PATTERN });
        assert_eq!(s.signs, CYCLIC_PATTERN);
        assert_eq!(sign_structure(&StateVec::ZERO, &p).unwrap().class, SignClass::Cooperative);
        assert!((s.cooperative_bound - 13.0 / 96.0).abs() < 1e-15);
        assert!((s.competitive_bound - 13.0 / 12.0).abs() < 1e-15);
        // cube corners
        let lo = 13.0 / 96.0;
        let hi = 13.0 / 12.0;
        assert_eq!(sign_structure(&StateVec::splat(lo), &p).unwrap().class, SignClass::Cooperative);
        assert_eq!(sign_structure(&StateVec::splat(hi), &p).unwrap().class, SignClass::Competitive);
        assert_eq!(
            sign_structure(&StateVec::new(0.05, 0.5, 2.0), &p).unwrap().class,
            SignClass::Other
        );
        assert!(sign_structure(&StateVec::new(-0.1, 1.0, 1.0), &p).is_err());
    }

    #[test]
    fn cyclic_regime_at_one_spans_mu_minus_to_mu_plus() {
        for k in 1..40 {
            let mu = MU_MINUS + (MU_PLUS - MU_MINUS) * k as f64 / 40.0;
            let s = sign_structure(&StateVec::ONES, &defaults(mu)).unwrap();
            assert_eq!(s.class, SignClass::Cyclic { pattern: CYCLIC_PATTERN }, "mu = {mu}");
        }
        assert_eq!(sign_structure(&StateVec::ONES, &defaults(0.05)).unwrap().class, SignClass::Competitive);
        assert_eq!(sign_structure(&StateVec::ONES, &defaults(0.9)).unwrap().class, SignClass::Cooperative);
    }
}
