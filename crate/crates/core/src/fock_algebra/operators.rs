//! Bosonic operators on the truncated Fock space `{|0⟩, …, |dim−1⟩}`.
//!
//! All operators are built on the full requested dimension. Identities such as
//! `[a, a†] = 1` and unitarity of displacements hold only away from the top
//! Fock level.

use num_complex::Complex64;

use super::expm::expm;
use super::matrix::{CMatrix, ONE};
use crate::error::{Error, Result};

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidDimension(dim))
    } else {
        Ok(())
    }
}

/// `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    let mut a = CMatrix::zeros(dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

pub fn creation(dim: usize) -> Result<CMatrix> {
    Ok(annihilation(dim)?.adjoint())
}

pub fn number(dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    let diag: Vec<f64> = (0..dim).map(|n| n as f64).collect();
    Ok(CMatrix::from_real_diagonal(&diag))
}

pub fn identity(dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    Ok(CMatrix::identity(dim))
}

/// `P = exp(iπ a†a)`, i.e. `diag((−1)^n)`.
pub fn parity(dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    let diag: Vec<f64> = (0..dim)
        .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    Ok(CMatrix::from_real_diagonal(&diag))
}

/// `D(α) = exp(α a† − α* a)` on the truncated space.
pub fn displacement(dim: usize, alpha: Complex64) -> Result<CMatrix> {
    check_dim(dim)?;
    if alpha == Complex64::new(0.0, 0.0) {
        return Ok(CMatrix::identity(dim));
    }
    let a = annihilation(dim)?;
    let gen = &creation(dim)?.scale(alpha) - &a.scale(alpha.conj());
    expm(&gen)
}

/// Fock-state projector `|n⟩⟨n|`.
pub fn fock_projector(dim: usize, n: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    if n >= dim {
        return Err(Error::OutOfRange { n, m: n, dim });
    }
    let mut p = CMatrix::zeros(dim);
    p[(n, n)] = ONE;
    Ok(p)
}
