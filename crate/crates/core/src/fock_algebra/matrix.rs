//! Dense square complex matrices and vectors.
//!
//! Storage is row-major. Every operator, Hamiltonian, density matrix and
//! superoperator in the crate is a [`CMatrix`].

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = *d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if data.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.matmul_unchecked(other))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// In-place `self += s * other`.
    pub fn axpy(&mut self, s: Complex64, other: &Self) {
        assert_eq!(self.dim, other.dim, "axpy dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    fn matmul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        if n == 0 {
            return out;
        }
        // SAFETY: Complex64 is repr(C) with layout [f64; 2]; all three buffers
        // hold n*n elements in row-major order with row stride n.
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                n,
                n,
                n,
                [1.0, 0.0],
                self.data.as_ptr() as *const [f64; 2],
                n as isize,
                1,
                other.data.as_ptr() as *const [f64; 2],
                n as isize,
                1,
                [0.0, 0.0],
                out.data.as_mut_ptr() as *mut [f64; 2],
                n as isize,
                1,
            );
        }
        out
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        let data = (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v.as_slice())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        CVector::new(data)
    }

    /// Row vector times matrix, `uᵀ·M`.
    pub fn left_mul_vec(&self, u: &CVector) -> CVector {
        assert_eq!(self.dim, u.len(), "vector-matrix dimension mismatch");
        let mut out = vec![ZERO; self.dim];
        for (i, ui) in u.as_slice().iter().enumerate() {
            if *ui == ZERO {
                continue;
            }
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                *o += ui * m;
            }
        }
        CVector::new(out)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Zero-extends into the upper-left block of a `new_dim` matrix.
    pub fn embed(&self, new_dim: usize) -> Result<Self> {
        if new_dim < self.dim {
            return Err(Error::InvalidArgument(format!(
                "cannot embed dimension {} into {}",
                self.dim, new_dim
            )));
        }
        let mut out = Self::zeros(new_dim);
        for i in 0..self.dim {
            out.data[i * new_dim..i * new_dim + self.dim].copy_from_slice(self.row(i));
        }
        Ok(out)
    }

    /// Upper-left `new_dim` block.
    pub fn block(&self, new_dim: usize) -> Self {
        assert!(new_dim <= self.dim);
        Self::from_fn(new_dim, |i, j| self[(i, j)])
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        Self::from_fn(n, |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

// Operator impls panic on dimension mismatch; the `try_*` methods return errors.
impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.try_add(rhs).expect("CMatrix add")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.try_sub(rhs).expect("CMatrix sub")
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs).expect("CMatrix mul")
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    data: Vec<Complex64>,
}

impl CVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ZERO; dim])
    }

    /// Fock basis vector `|n⟩` in a `dim`-level space.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if n >= dim {
            return Err(Error::OutOfRange { n, m: n, dim });
        }
        let mut v = Self::zeros(dim);
        v.data[n] = ONE;
        Ok(v)
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self::new(data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.data.iter().map(|z| z * s).collect())
    }

    pub fn normalized(&self) -> Self {
        self.scale(Complex64::new(1.0 / self.norm(), 0.0))
    }

    pub fn axpy(&mut self, s: Complex64, other: &Self) {
        assert_eq!(self.len(), other.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|self⟩⟨self|`.
    pub fn outer(&self) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, |i, j| self.data[i] * self.data[j].conj())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn arb_matrix(dim: usize) -> impl Strategy<Value = CMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
            CMatrix::from_row_major(dim, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    #[test]
    fn matmul_matches_naive() {
        let a = CMatrix::from_fn(5, |i, j| c(i as f64 - j as f64, (i * j) as f64 * 0.1));
        let b = CMatrix::from_fn(5, |i, j| c((i + 2 * j) as f64, -(j as f64)));
        let p = &a * &b;
        for i in 0..5 {
            for j in 0..5 {
                let naive: Complex64 = (0..5).map(|k| a[(i, k)] * b[(k, j)]).sum();
                assert!((p[(i, j)] - naive).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mixed_dimension_ops_are_errors() {
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert!(matches!(
            a.try_add(&b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(a.try_mul(&b).is_err());
        assert!(CMatrix::from_row_major(2, vec![ONE; 3]).is_err());
    }

    #[test]
    fn kron_layout() {
        let a = CMatrix::from_fn(2, |i, j| c((i * 2 + j) as f64, 0.0));
        let k = a.kron(&CMatrix::identity(2));
        assert_eq!(k[(2, 0)], c(2.0, 0.0));
        assert_eq!(k[(3, 1)], c(2.0, 0.0));
        assert_eq!(k[(3, 0)], ZERO);
    }

    #[test]
    fn embed_and_block_roundtrip() {
        let a = CMatrix::from_fn(3, |i, j| c(i as f64, j as f64));
        let e = a.embed(5).unwrap();
        assert_eq!(e.block(3), a);
        assert_eq!(e[(4, 4)], ZERO);
        assert!(a.embed(2).is_err());
    }

    proptest! {
        #[test]
        fn adjoint_is_an_involution(m in arb_matrix(4)) {
            prop_assert_eq!(m.adjoint().adjoint(), m);
        }

        #[test]
        fn trace_is_cyclic(a in arb_matrix(5), b in arb_matrix(5)) {
            let ab = (&a * &b).trace();
            let ba = (&b * &a).trace();
            let scale = 1.0 + ab.norm();
            prop_assert!((ab - ba).norm() <= 1e-12 * scale);
        }
    }
}
