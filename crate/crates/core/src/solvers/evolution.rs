//! Time evolution: exact unitary propagation for pure states and a fixed-step
//! RK4 integrator for the master equation.
//!
//! The RK4 map of the linear equation `ẋ = Mx` is the matrix polynomial
//! `T = I + D` with `D = hM(I + hM/2(I + hM/3(I + hM/4)))`. Taking `n` steps is
//! `Tⁿ`, which is formed by binary powering in the delta form
//! `(I + A)(I + B) = I + (A + B + AB)` so that small increments are not lost
//! against the identity. This is the same map as stepping `n` times.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock_algebra::{hermitian_eig, hermitian_eigenvalues, CMatrix, CVector, I};
use crate::liouvillian::{unvectorize, vectorize, DensityMatrix, SuperOp};

/// Steps satisfy `h ≤ STEP_FACTOR / step_scale`.
pub const STEP_FACTOR: f64 = 0.01;

/// Interval lengths that agree to this relative precision share a propagator.
const CACHE_REL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(&self.states)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("time grid"));
    }
    if times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::InvalidArgument("times must be >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(
            "times must be non-decreasing".into(),
        ));
    }
    Ok(())
}

/// `|ψ(t)⟩ = e^{−iHt}|ψ₀⟩` through the eigendecomposition of `H`.
pub fn evolve_unitary(h: &CMatrix, psi0: &CVector, times: &[f64]) -> Result<Trajectory<CVector>> {
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: psi0.len(),
        });
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("time grid"));
    }
    let (vals, v) = hermitian_eig(h)?;
    let coeffs = v.adjoint().mul_vec(psi0);
    let states = times
        .iter()
        .map(|&t| {
            let phased: Vec<Complex64> = vals
                .iter()
                .zip(coeffs.as_slice())
                .map(|(lam, c)| c * (-I * lam * t).exp())
                .collect();
            v.mul_vec(&CVector::new(phased))
        })
        .collect();
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

/// Increment `D` of one RK4 step of size `h`, so that the step map is `I + D`.
pub fn rk4_step_delta(m: &CMatrix, h: f64) -> CMatrix {
    let hm = m.scale_real(h);
    let ident = CMatrix::identity(m.dim());
    let mut acc = &ident + &hm.scale_real(0.25);
    for k in [3.0, 2.0] {
        acc = &ident + &(&hm * &acc).scale_real(1.0 / k);
    }
    &hm * &acc
}

/// `E` with `I + E = (I + D)ⁿ`.
pub fn power_delta(d: &CMatrix, mut n: u64) -> CMatrix {
    let mut result = CMatrix::zeros(d.dim());
    let mut base = d.clone();
    while n > 0 {
        if n & 1 == 1 {
            let cross = &result * &base;
            result = &(&result + &base) + &cross;
        }
        n >>= 1;
        if n > 0 {
            let sq = &base * &base;
            base = &base.scale_real(2.0) + &sq;
        }
    }
    result
}

/// RK4 propagators of a fixed generator, cached by interval length.
pub struct Rk4Propagator<'a> {
    l: &'a SuperOp,
    h_max: f64,
    cache: Vec<(f64, CMatrix)>,
}

impl<'a> Rk4Propagator<'a> {
    pub fn new(l: &'a SuperOp) -> Result<Self> {
        let scale = l.step_scale();
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::StepUnderflow(scale));
        }
        let h_max = STEP_FACTOR / scale;
        if h_max < 1e-300 {
            return Err(Error::StepUnderflow(h_max));
        }
        Ok(Self {
            l,
            h_max,
            cache: Vec::new(),
        })
    }

    pub fn max_step(&self) -> f64 {
        self.h_max
    }

    /// Number of equal RK4 steps used to cover `dt`.
    pub fn steps_for(&self, dt: f64) -> u64 {
        (dt / self.h_max).ceil().max(1.0) as u64
    }

    /// Increment `E` of the propagator `I + E` over `dt`.
    pub fn delta(&mut self, dt: f64) -> Result<&CMatrix> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "interval must be >= 0, got {dt}"
            )));
        }
        let hit = self
            .cache
            .iter()
            .position(|(t, _)| (t - dt).abs() <= CACHE_REL_TOL * dt.max(*t));
        let idx = match hit {
            Some(i) => i,
            None => {
                let e = if dt == 0.0 {
                    CMatrix::zeros(self.l.matrix().dim())
                } else {
                    let n = self.steps_for(dt);
                    let d = rk4_step_delta(self.l.matrix(), dt / n as f64);
                    power_delta(&d, n)
                };
                if !e.is_finite() {
                    return Err(Error::NonFinite("propagator"));
                }
                self.cache.push((dt, e));
                self.cache.len() - 1
            }
        };
        Ok(&self.cache[idx].1)
    }

    pub fn apply(&mut self, dt: f64, v: &CVector) -> Result<CVector> {
        let e = self.delta(dt)?;
        let mut out = e.mul_vec(v);
        out.axpy(Complex64::new(1.0, 0.0), v);
        Ok(out)
    }
}

/// Propagates vectorized operators (not necessarily states) over `times`,
/// starting at `t = 0`. Output is indexed `[input][time]`.
pub fn propagate_series(
    l: &SuperOp,
    inputs: &[CVector],
    times: &[f64],
) -> Result<Vec<Vec<CVector>>> {
    check_times(times)?;
    let big = l.matrix().dim();
    if let Some(v) = inputs.iter().find(|v| v.len() != big) {
        return Err(Error::Shape {
            expected: big,
            got: v.len(),
        });
    }
    let mut prop = Rk4Propagator::new(l)?;
    let mut out: Vec<Vec<CVector>> = inputs
        .iter()
        .map(|_| Vec::with_capacity(times.len()))
        .collect();
    let mut current: Vec<CVector> = inputs.to_vec();
    let mut t_prev = 0.0;
    for &t in times {
        let dt = t - t_prev;
        if dt > 0.0 {
            for v in current.iter_mut() {
                *v = prop.apply(dt, v)?;
            }
        }
        for (series, v) in out.iter_mut().zip(&current) {
            series.push(v.clone());
        }
        t_prev = t;
    }
    Ok(out)
}

/// `ρ(t) = e^{Lt} ρ` for a single time.
pub fn propagate(l: &SuperOp, rho: &CMatrix, t: f64) -> Result<CMatrix> {
    if rho.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            left: l.dim(),
            right: rho.dim(),
        });
    }
    let series = propagate_series(l, &[vectorize(rho)], &[t])?;
    unvectorize(&series[0][0])
}

/// Master-equation trajectory from `ρ(0) = rho0`. States are returned as
/// Hermitized matrices without renormalization.
pub fn evolve_master(
    l: &SuperOp,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Trajectory<CMatrix>> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            left: l.dim(),
            right: rho0.dim(),
        });
    }
    let series = propagate_series(l, &[vectorize(rho0.matrix())], times)?;
    let states = series
        .into_iter()
        .next()
        .unwrap_or_default()
        .iter()
        .map(|v| unvectorize(v).map(|m| m.hermitian_part()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

/// `½‖A − B‖₁` for Hermitian `A`, `B`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let diff = a.try_sub(b)?;
    Ok(0.5
        * hermitian_eigenvalues(&diff)?
            .iter()
            .map(|x| x.abs())
            .sum::<f64>())
}
