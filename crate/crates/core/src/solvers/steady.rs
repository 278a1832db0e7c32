//! Steady state of a Lindblad generator: the normalized null vector of `L`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock_algebra::{singular_values, CMatrix, CVector, LuFactor, ONE, ZERO};
use crate::liouvillian::{unvectorize, vectorize, DensityMatrix, SuperOp};

/// Relative threshold on the second-smallest singular value of `L`.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Residual target of the inverse-power iteration.
pub const INVERSE_POWER_TOL: f64 = 1e-10;
pub const INVERSE_POWER_MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyMethod {
    /// Replace one equation of `L vec(ρ) = 0` by the trace condition and solve.
    Bordered,
    /// Inverse iteration on `L − σI` with a small shift.
    InversePower,
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// `‖L vec(ρ)‖₂` of the returned state.
    pub residual: f64,
    /// Top two Fock populations are negligible (`< 1e-10` and `< 1e-8`).
    pub dim_adequate: bool,
    pub method: SteadyMethod,
    pub iterations: usize,
}

pub fn steady_state(l: &SuperOp) -> Result<SteadyStateResult> {
    steady_state_with(l, SteadyMethod::Bordered)
}

pub fn steady_state_with(l: &SuperOp, method: SteadyMethod) -> Result<SteadyStateResult> {
    if !l.matrix().is_finite() {
        return Err(Error::NonFinite("liouvillian"));
    }
    check_unique(l)?;
    let (v, iterations) = match method {
        SteadyMethod::Bordered => (bordered(l)?, 1),
        SteadyMethod::InversePower => inverse_power(l)?,
    };
    let rho = DensityMatrix::from_approximate(&unvectorize(&v)?)?;
    let residual = l.apply(&vectorize(rho.matrix()))?.norm();
    let n = rho.dim();
    let pop = |i: usize| rho.matrix()[(i, i)].re;
    let dim_adequate = pop(n - 1) < 1e-10 && (n < 2 || pop(n - 2) < 1e-8);
    Ok(SteadyStateResult {
        rho,
        residual,
        dim_adequate,
        method,
        iterations,
    })
}

/// A second (near-)zero singular value means the stationary state is not unique.
fn check_unique(l: &SuperOp) -> Result<()> {
    let s = singular_values(l.matrix());
    if s.len() < 2 {
        return Ok(());
    }
    let s_max = *s.last().unwrap();
    if s[1] <= DEGENERACY_TOL * s_max {
        return Err(Error::DegenerateNullSpace(s[1]));
    }
    Ok(())
}

fn bordered(l: &SuperOp) -> Result<CVector> {
    let n = l.dim();
    let mut m = l.matrix().clone();
    let big = n * n;
    for j in 0..big {
        m[(0, j)] = ZERO;
    }
    for i in 0..n {
        m[(0, i * n + i)] = ONE;
    }
    let mut rhs = CVector::zeros(big);
    rhs[0] = ONE;
    LuFactor::new(&m)?.solve(&rhs)
}

fn trace_of(v: &CVector, n: usize) -> Complex64 {
    (0..n).map(|i| v[i * n + i]).sum()
}

fn inverse_power(l: &SuperOp) -> Result<(CVector, usize)> {
    let n = l.dim();
    let big = n * n;
    let sigma = 1e-6 * l.matrix().norm_one();
    let mut shifted = l.matrix().clone();
    for i in 0..big {
        shifted[(i, i)] -= Complex64::new(sigma, 0.0);
    }
    let lu = LuFactor::new(&shifted)?;
    let mut x = vectorize(&CMatrix::identity(n).scale_real(1.0 / n as f64));
    let mut residual = f64::INFINITY;
    for it in 1..=INVERSE_POWER_MAX_ITER {
        let y = lu.solve(&x)?;
        let tr = trace_of(&y, n);
        if tr.norm() == 0.0 || !tr.is_finite() {
            return Err(Error::NonFinite("inverse power iterate"));
        }
        x = y.scale(tr.inv());
        residual = l.apply(&x)?.norm();
        if residual < INVERSE_POWER_TOL {
            return Ok((x, it));
        }
    }
    Err(Error::NotConverged { residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{build_liouvillian, liouvillian_from_hamiltonian};
    use crate::model::{SystemParams, TuningPoint};

    fn params(dim: usize) -> SystemParams {
        SystemParams::new(30.0, 5.0, 1.0, 0.01, dim).unwrap()
    }

    #[test]
    fn undriven_zero_temperature_gives_vacuum() {
        let p = params(6).with_eps(0.0).with_n_th(0.0);
        let l = build_liouvillian(&p, TuningPoint::resonant(1.0)).unwrap();
        let ss = steady_state(&l).unwrap();
        assert!((ss.rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(ss.dim_adequate);
    }

    #[test]
    fn undriven_thermal_reservoir_gives_thermal_state() {
        let p = params(25).with_eps(0.0).with_n_th(0.2);
        let l = build_liouvillian(&p, TuningPoint::resonant(2.0)).unwrap();
        let ss = steady_state(&l).unwrap();
        let th = DensityMatrix::thermal(25, 0.2).unwrap();
        assert!(ss.rho.matrix().max_abs_diff(th.matrix()) < 1e-10);
    }

    #[test]
    fn driven_damped_oscillator_is_coherent() {
        // Without nonlinearity the steady state is |α⟩ with α = −iε/(iΔ + γ/2).
        let (eps, delta, gamma) = (0.7, 0.4, 1.0);
        let dim = 20;
        let h = CMatrix::from_fn(dim, |i, j| {
            if i == j {
                Complex64::new(delta * i as f64, 0.0)
            } else if i + 1 == j || j + 1 == i {
                Complex64::new(eps * (i.max(j) as f64).sqrt(), 0.0)
            } else {
                ZERO
            }
        });
        let l = liouvillian_from_hamiltonian(&h, gamma, 0.0).unwrap();
        let ss = steady_state(&l).unwrap();
        let alpha = Complex64::new(0.0, -eps) / Complex64::new(gamma / 2.0, delta);
        let mut amp = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        let mut psi = Vec::new();
        for n in 0..dim {
            psi.push(amp);
            amp = amp * alpha / ((n + 1) as f64).sqrt();
        }
        let expect = CVector::new(psi).outer();
        // The top Fock level carries the truncation error.
        assert!(ss.rho.matrix().block(12).max_abs_diff(&expect.block(12)) < 1e-9);
    }

    #[test]
    fn methods_agree_and_residuals_are_small() {
        for k in [1.0, 1.5, 2.0, 3.0] {
            let l = build_liouvillian(&params(12), TuningPoint::resonant(k)).unwrap();
            let a = steady_state_with(&l, SteadyMethod::Bordered).unwrap();
            let b = steady_state_with(&l, SteadyMethod::InversePower).unwrap();
            assert!(a.residual < 1e-10, "k={k} residual {}", a.residual);
            assert!(b.residual < 1e-10);
            assert!(b.iterations <= INVERSE_POWER_MAX_ITER);
            assert!(a.rho.matrix().max_abs_diff(b.rho.matrix()) < 1e-9);
        }
    }

    #[test]
    fn steady_state_is_fixed_by_the_generator() {
        let l = build_liouvillian(&params(10), TuningPoint::resonant(2.0)).unwrap();
        let ss = steady_state(&l).unwrap();
        assert!(l.apply_to(ss.rho.matrix()).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn small_dimension_is_flagged() {
        let p = params(4).with_eps(11.56);
        let l = build_liouvillian(&p, TuningPoint::resonant(3.0)).unwrap();
        assert!(!steady_state(&l).unwrap().dim_adequate);
        let l = build_liouvillian(&params(15), TuningPoint::resonant(1.0)).unwrap();
        assert!(steady_state(&l).unwrap().dim_adequate);
    }

    #[test]
    fn closed_system_is_degenerate() {
        let p = params(4);
        let h = crate::model::hamiltonian_rot(&p, TuningPoint::resonant(1.0)).unwrap();
        let l = liouvillian_from_hamiltonian(&h, 0.0, 0.0).unwrap();
        assert!(matches!(
            steady_state(&l),
            Err(Error::DegenerateNullSpace(_))
        ));
    }
}
