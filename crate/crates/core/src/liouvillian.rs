//! Density matrices, column-stacking vectorization and the Lindblad generator
//! for amplitude damping into a thermal reservoir.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock_algebra::{
    annihilation, creation, hermitian_eigenvalues, CMatrix, CVector, I, ONE, ZERO,
};
use crate::model::{hamiltonian_rot, SystemParams, TuningPoint};

/// Tolerances used when accepting a matrix as a physical state.
pub const HERMITIAN_STATE_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-8;

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if rho.dim() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if !rho.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let dev = rho.hermitian_deviation();
        if dev > HERMITIAN_STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&rho)?[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            rho: rho.hermitian_part(),
        })
    }

    /// Hermitizes and renormalizes before validating. Used on solver output.
    pub fn from_approximate(rho: &CMatrix) -> Result<Self> {
        let h = rho.hermitian_part();
        let tr = h.trace().re;
        if !(tr.abs() > 0.0) || !tr.is_finite() {
            return Err(Error::InvalidState(format!(
                "trace {tr} cannot be normalized"
            )));
        }
        Self::new(h.scale_real(1.0 / tr))
    }

    pub fn fock(dim: usize, n: usize) -> Result<Self> {
        Ok(Self {
            rho: CVector::basis(dim, n)?.outer(),
        })
    }

    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if psi.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState(
                "state vector has zero or non-finite norm".into(),
            ));
        }
        Ok(Self {
            rho: psi.normalized().outer(),
        })
    }

    /// Truncated Bose–Einstein distribution, renormalized on `dim` levels.
    pub fn thermal(dim: usize, n_th: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if !(n_th >= 0.0) || !n_th.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "n_th must be >= 0, got {n_th}"
            )));
        }
        if n_th == 0.0 {
            return Self::fock(dim, 0);
        }
        let ratio = n_th / (1.0 + n_th);
        let w: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
        let z: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / z).collect();
        Ok(Self {
            rho: CMatrix::from_real_diagonal(&p),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            rho: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    /// Zero-pads into a larger Fock space.
    pub fn embed(&self, new_dim: usize) -> Result<Self> {
        Ok(Self {
            rho: self.rho.embed(new_dim)?,
        })
    }

    /// `tr(ρ O)`.
    pub fn expect(&self, op: &CMatrix) -> Result<Complex64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: op.dim(),
            });
        }
        Ok(trace_product(&self.rho, op))
    }
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Column stacking: `vec(ρ)[c·N + r] = ρ[r][c]`.
pub fn vectorize(rho: &CMatrix) -> CVector {
    let n = rho.dim();
    let mut out = Vec::with_capacity(n * n);
    for c in 0..n {
        for r in 0..n {
            out.push(rho[(r, c)]);
        }
    }
    CVector::new(out)
}

pub fn unvectorize(v: &CVector) -> Result<CMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() || n == 0 {
        return Err(Error::Shape {
            expected: n * n,
            got: v.len(),
        });
    }
    let s = v.as_slice();
    Ok(CMatrix::from_fn(n, |r, c| s[c * n + r]))
}

/// Superoperator acting on column-stacked density matrices.
#[derive(Clone, Debug)]
pub struct SuperOp {
    dim: usize,
    matrix: CMatrix,
    step_scale: f64,
}

impl SuperOp {
    /// Wraps an `N² × N²` matrix. The step scale defaults to its 1-norm.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let big = matrix.dim();
        let dim = (big as f64).sqrt().round() as usize;
        if dim * dim != big || dim == 0 {
            return Err(Error::Shape {
                expected: dim * dim,
                got: big,
            });
        }
        let step_scale = matrix.norm_one();
        Ok(Self {
            dim,
            matrix,
            step_scale,
        })
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Rate used to bound explicit integration steps.
    pub fn step_scale(&self) -> f64 {
        self.step_scale
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.matrix.dim() {
            return Err(Error::Shape {
                expected: self.matrix.dim(),
                got: v.len(),
            });
        }
        Ok(self.matrix.mul_vec(v))
    }

    /// `L(ρ)` as a matrix.
    pub fn apply_to(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rho.dim(),
            });
        }
        unvectorize(&self.apply(&vectorize(rho))?)
    }
}

/// `vec(Aρ) = (I ⊗ A) vec(ρ)`.
pub fn spre(a: &CMatrix) -> CMatrix {
    CMatrix::identity(a.dim()).kron(a)
}

/// `vec(ρB) = (Bᵀ ⊗ I) vec(ρ)`.
pub fn spost(b: &CMatrix) -> CMatrix {
    b.transpose().kron(&CMatrix::identity(b.dim()))
}

/// `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
pub fn sprepost(a: &CMatrix, b: &CMatrix) -> CMatrix {
    b.transpose().kron(a)
}

/// Generator of `dρ/dt = −i[H,ρ] + D(ρ)` with dissipator
/// `(γ/2)n̄(2a†ρa − aa†ρ − ρaa†) + (γ/2)(n̄+1)(2aρa† − a†aρ − ρa†a)`.
pub fn build_liouvillian(params: &SystemParams, point: TuningPoint) -> Result<SuperOp> {
    let h = hamiltonian_rot(params, point)?;
    liouvillian_from_hamiltonian(&h, params.gamma, params.n_th)
}

pub fn liouvillian_from_hamiltonian(h: &CMatrix, gamma: f64, n_th: f64) -> Result<SuperOp> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if !(gamma >= 0.0) || !(n_th >= 0.0) || !gamma.is_finite() || !n_th.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rates must be finite and non-negative (gamma={gamma}, n_th={n_th})"
        )));
    }
    let a = annihilation(n)?;
    let ad = creation(n)?;
    let ada = &ad * &a;
    let aad = &a * &ad;

    let mut l = (&spre(h) - &spost(h)).scale(-I);
    let down = 0.5 * gamma * (n_th + 1.0);
    let up = 0.5 * gamma * n_th;
    if down != 0.0 {
        let d = &sprepost(&a, &ad).scale_real(2.0) - &(&spre(&ada) + &spost(&ada));
        l.axpy(Complex64::new(down, 0.0), &d);
    }
    if up != 0.0 {
        let d = &sprepost(&ad, &a).scale_real(2.0) - &(&spre(&aad) + &spost(&aad));
        l.axpy(Complex64::new(up, 0.0), &d);
    }
    let step_scale = (gamma * (n_th + 1.0) * n as f64).max(h.norm_inf());
    Ok(SuperOp {
        dim: n,
        matrix: l,
        step_scale,
    })
}

/// The Lindblad right-hand side evaluated directly with matrix products.
pub fn lindblad_rhs(h: &CMatrix, gamma: f64, n_th: f64, rho: &CMatrix) -> Result<CMatrix> {
    let n = h.dim();
    if rho.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: rho.dim(),
        });
    }
    let a = annihilation(n)?;
    let ad = creation(n)?;
    let mut out = h.commutator(rho).scale(-I);
    let half = |x: f64| Complex64::new(0.5 * x, 0.0);

    let ara = &(&a * rho) * &ad;
    let ada = &ad * &a;
    let down = &(&ara.scale_real(2.0) - &(&ada * rho)) - &(rho * &ada);
    out.axpy(half(gamma * (n_th + 1.0)), &down);

    let ada_rho_a = &(&ad * rho) * &a;
    let aad = &a * &ad;
    let up = &(&ada_rho_a.scale_real(2.0) - &(&aad * rho)) - &(rho * &aad);
    out.axpy(half(gamma * n_th), &up);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_algebra::number;
    use proptest::prelude::*;

    fn params(dim: usize) -> SystemParams {
        SystemParams::new(30.0, 5.0, 1.0, 0.01, dim).unwrap()
    }

    fn test_matrix(n: usize, seed: f64) -> CMatrix {
        CMatrix::from_fn(n, |i, j| {
            Complex64::new(
                (seed * (i + 1) as f64 + j as f64).sin(),
                (seed * (j + 2) as f64 - i as f64).cos(),
            )
        })
    }

    #[test]
    fn vectorization_layout_and_roundtrip() {
        let m = test_matrix(3, 0.7);
        let v = vectorize(&m);
        assert_eq!(v[1], m[(1, 0)]);
        assert_eq!(v[3], m[(0, 1)]);
        assert_eq!(unvectorize(&v).unwrap(), m);
        assert!(unvectorize(&CVector::zeros(5)).is_err());
    }

    #[test]
    fn superoperator_identities() {
        let (a, b, r) = (
            test_matrix(4, 0.3),
            test_matrix(4, 1.1),
            test_matrix(4, 2.3),
        );
        let lhs = vectorize(&(&(&a * &r) * &b));
        let rhs = sprepost(&a, &b).mul_vec(&vectorize(&r));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        assert!(
            spre(&a)
                .mul_vec(&vectorize(&r))
                .max_abs_diff(&vectorize(&(&a * &r)))
                < 1e-12
        );
        assert!(
            spost(&b)
                .mul_vec(&vectorize(&r))
                .max_abs_diff(&vectorize(&(&r * &b)))
                < 1e-12
        );
    }

    #[test]
    fn superoperator_matches_direct_rhs() {
        for (n_th, k) in [(0.0, 1.0), (0.3, 2.0), (0.01, 1.37)] {
            let p = params(6).with_n_th(n_th);
            let point = TuningPoint::resonant(k);
            let l = build_liouvillian(&p, point).unwrap();
            let h = hamiltonian_rot(&p, point).unwrap();
            let rho = test_matrix(6, 0.9);
            let direct = lindblad_rhs(&h, p.gamma, p.n_th, &rho).unwrap();
            assert!(l.apply_to(&rho).unwrap().max_abs_diff(&direct) < 1e-10);
        }
    }

    #[test]
    fn generator_is_trace_preserving() {
        let l = build_liouvillian(&params(5), TuningPoint::resonant(2.0)).unwrap();
        let n = l.dim();
        // The trace functional annihilates every column of L.
        for col in 0..n * n {
            let mut acc = ZERO;
            for i in 0..n {
                acc += l.matrix()[(i * n + i, col)];
            }
            assert!(acc.norm() < 1e-12, "column {col}");
        }
    }

    #[test]
    fn damping_of_fock_one_without_drive() {
        let p = params(4).with_eps(0.0).with_n_th(0.0);
        let l = build_liouvillian(&p, TuningPoint::resonant(1.0)).unwrap();
        let rho = DensityMatrix::fock(4, 1).unwrap();
        let d = l.apply_to(rho.matrix()).unwrap();
        assert!((d[(1, 1)].re + 1.0).abs() < 1e-14);
        assert!((d[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thermal_state_is_stationary_without_drive() {
        // Detailed balance holds exactly on the truncated space.
        let p = params(12).with_eps(0.0).with_n_th(0.4);
        let l = build_liouvillian(&p, TuningPoint::resonant(1.5)).unwrap();
        let th = DensityMatrix::thermal(12, 0.4).unwrap();
        assert!(l.apply_to(th.matrix()).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(CMatrix::identity(2)).is_err());
        let mut m = CMatrix::from_real_diagonal(&[1.2, -0.2]);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m = CMatrix::from_real_diagonal(&[0.5, 0.5]);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::maximally_mixed(3).is_ok());
        assert!(DensityMatrix::fock(3, 3).is_err());
        assert!(DensityMatrix::pure(&CVector::zeros(3)).is_err());
        let th = DensityMatrix::thermal(20, 0.5).unwrap();
        assert!((th.matrix().trace().re - 1.0).abs() < 1e-14);
        let mean = th.expect(&number(20).unwrap()).unwrap().re;
        assert!((mean - 0.5).abs() < 1e-3);
        assert!(DensityMatrix::from_approximate(&CMatrix::identity(3)).is_ok());
    }

    #[test]
    fn step_scale_bounds_hamiltonian_and_decay() {
        let p = params(10);
        let l = build_liouvillian(&p, TuningPoint::resonant(1.0)).unwrap();
        let h = hamiltonian_rot(&p, TuningPoint::resonant(1.0)).unwrap();
        assert!(l.step_scale() >= h.norm_inf());
        assert!(l.step_scale() >= p.gamma * (p.n_th + 1.0) * 10.0);
        let wrapped = SuperOp::from_matrix(l.matrix().clone()).unwrap();
        assert_eq!(wrapped.dim(), 10);
        assert!(SuperOp::from_matrix(CMatrix::identity(5)).is_err());
    }

    proptest! {
        #[test]
        fn generator_preserves_hermiticity(seed in 0.0f64..10.0, k in 0.5f64..3.5, n_th in 0.0f64..0.5) {
            let p = params(5).with_n_th(n_th);
            let l = build_liouvillian(&p, TuningPoint::resonant(k)).unwrap();
            let rho = test_matrix(5, seed).hermitian_part();
            let out = l.apply_to(&rho).unwrap();
            prop_assert!(out.hermitian_deviation() < 1e-10 * out.max_abs().max(1.0));
            prop_assert!(out.trace().norm() < 1e-10);
        }
    }
}
