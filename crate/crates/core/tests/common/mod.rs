use nalgebra::{Matrix3, Rotation3, Schur};
use num_complex::Complex64;

/// Dense eigenvalues by bounded Schur iteration, retried after an orthogonal
/// similarity when the iteration stalls on an exactly cyclic matrix.
pub fn dense_eigenvalues(m: &Matrix3<f64>) -> Vec<Complex64> {
    let schur = |a: Matrix3<f64>| Schur::try_new(a, f64::EPSILON, 500).map(|s| s.complex_eigenvalues());
    let q = Rotation3::from_euler_angles(0.3, 0.7, 1.1).into_inner();
    schur(*m)
        .or_else(|| schur(q * m * q.transpose()))
        .expect("Schur iteration failed")
        .iter()
        .copied()
        .collect()
}
