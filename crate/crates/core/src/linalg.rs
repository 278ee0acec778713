//! Small dense helpers for 3×3 problems.

use nalgebra::{Matrix3, Rotation3, Schur, Vector3};
use num_complex::Complex64;

use crate::error::{KppError, Result};

const SCHUR_MAX_ITER: usize = 500;

pub(crate) type CMatrix3 = Matrix3<Complex64>;
pub(crate) type CVector3 = Vector3<Complex64>;

/// Gaussian elimination with partial pivoting. `None` when a pivot vanishes.
pub(crate) fn solve_complex3(m: &CMatrix3, rhs: &CVector3) -> Option<CVector3> {
    let mut a = *m;
    let mut b = *rhs;
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap();
        if a[(pivot, col)].norm() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            b.swap_rows(pivot, col);
        }
        for row in col + 1..3 {
            let factor = a[(row, col)] / a[(col, col)];
            for k in col..3 {
                let delta = factor * a[(col, k)];
                a[(row, k)] -= delta;
            }
            let delta = factor * b[col];
            b[row] -= delta;
        }
    }
    let mut x = CVector3::zeros();
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[(row, k)] * x[k];
        }
        x[row] = acc / a[(row, row)];
    }
    Some(x)
}

pub(crate) fn complexify(m: &Matrix3<f64>) -> CMatrix3 {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Eigenvalues of a general real 3×3 matrix (Schur route), sorted by real part
/// then imaginary part.
pub(crate) fn dense_eigenvalues(m: &Matrix3<f64>) -> Result<[Complex64; 3]> {
    // Shifted QR can stall on exactly cyclic matrices; a fixed orthogonal
    // similarity breaks the symmetry without changing the spectrum.
    let schur = |a: Matrix3<f64>| Schur::try_new(a, f64::EPSILON, SCHUR_MAX_ITER).map(|s| s.complex_eigenvalues());
    let ev = schur(*m)
        .or_else(|| {
            let q = Rotation3::from_euler_angles(0.3, 0.7, 1.1).into_inner();
            schur(q * m * q.transpose())
        })
        .ok_or_else(|| KppError::NoConvergence(format!("Schur iteration on {m:?}")))?;
    let mut out = [ev[0], ev[1], ev[2]];
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Hermitian inner product `conj(a)ᵀ b`.
pub(crate) fn hdot(a: &CVector3, b: &CVector3) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
