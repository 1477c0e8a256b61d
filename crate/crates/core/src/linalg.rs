//! Thin wrappers over the LAPACK-backed dense kernel shared by the
//! spectral modules: singular values, full SVD, and Hermitian
//! eigendecompositions of complex matrices.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, EighInplace, SVDInplace, UPLO};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dense kernel failure: {0}")]
    Backend(String),
}

fn backend<E: std::fmt::Display>(e: E) -> LinalgError {
    LinalgError::Backend(e.to_string())
}

/// Singular values in descending order (values only; cheap at large sizes).
pub fn svd_values(m: &Array2<Complex64>) -> Result<Vec<f64>, LinalgError> {
    let (_, s, _) = m.clone().svd_inplace(false, false).map_err(backend)?;
    Ok(s.to_vec())
}

/// Full SVD `m = u * diag(s) * vt` with descending singular values.
pub fn svd_full(
    m: &Array2<Complex64>,
) -> Result<(Array2<Complex64>, Array1<f64>, Array2<Complex64>), LinalgError> {
    let (u, s, vt) = m.clone().svd_inplace(true, true).map_err(backend)?;
    Ok((u.unwrap(), s, vt.unwrap()))
}

/// Eigenvalues of a Hermitian matrix, ascending (LAPACK order).
pub fn eigh_values(m: &Array2<Complex64>) -> Result<Vec<f64>, LinalgError> {
    let (w, _) = m.clone().eigh_inplace(UPLO::Lower).map_err(backend)?;
    Ok(w.to_vec())
}

/// Full Hermitian eigendecomposition `m = q * diag(w) * q^*`, ascending.
///
/// The backend hands back eigenvectors for the transposed (row-major)
/// layout, i.e. `m = conj(q) * diag(w) * q^T`; conjugating restores the
/// standard column convention.
pub fn eigh_full(m: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>), LinalgError> {
    let (w, q) = m.eigh(UPLO::Lower).map_err(backend)?;
    Ok((w.to_vec(), q.mapv(|z| z.conj())))
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &Array2<Complex64>) -> Result<f64, LinalgError> {
    Ok(svd_values(m)?.first().copied().unwrap_or(0.0))
}

/// Conjugate transpose.
pub fn adjoint(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// Max entrywise deviation from Hermitian symmetry.
pub fn hermitian_residual(m: &Array2<Complex64>) -> f64 {
    let n = m.nrows();
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            r = r.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    r
}
