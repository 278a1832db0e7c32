//! Decompositions backed by `nalgebra`: LU solves, Hermitian eigensystems,
//! singular values and general eigenvalues.

use nalgebra::{DVector, LU};
use num_complex::Complex64;

use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// LU factorization with partial pivoting, reusable across right-hand sides.
pub struct LuFactor {
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    dim: usize,
}

impl LuFactor {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let lu = m.to_nalgebra().lu();
        if !lu.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(Self { lu, dim: m.dim() })
    }

    pub fn solve(&self, b: &CVector) -> Result<CVector> {
        if b.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                got: b.len(),
            });
        }
        let rhs = DVector::from_column_slice(b.as_slice());
        let x = self.lu.solve(&rhs).ok_or(Error::Singular)?;
        Ok(CVector::new(x.iter().copied().collect()))
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> Result<CMatrix> {
        let x = self.lu.solve(&b.to_nalgebra()).ok_or(Error::Singular)?;
        Ok(CMatrix::from_nalgebra(&x))
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in ascending order; column `i` of the returned
/// matrix is the eigenvector for eigenvalue `i`. The input is symmetrized as
/// `(m + m†)/2` after the Hermiticity check.
pub fn hermitian_eig(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_finite() {
        return Err(Error::NonFinite("hermitian_eig input"));
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigenvalues only of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eig(m).map(|(v, _)| v)
}

/// Singular values in ascending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .to_nalgebra()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Eigenvalues of a general complex matrix via the Schur form.
pub fn eigenvalues(m: &CMatrix) -> Option<Vec<Complex64>> {
    let schur = m.to_nalgebra().schur();
    schur.eigenvalues().map(|v| v.iter().copied().collect())
}
