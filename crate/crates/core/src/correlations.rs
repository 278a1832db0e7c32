//! Two-time quadrature covariances from the quantum regression theorem and
//! the resulting spectrum of squeezing.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock_algebra::{annihilation, creation, CMatrix, CVector, I, ZERO};
use crate::liouvillian::{trace_product, vectorize, DensityMatrix, SuperOp};
use crate::phase_space::linspace_step;
use crate::solvers::propagate_series;

/// The supplied steady state must satisfy `‖L vec ρ‖ ≤ STALE_TOL`.
pub const STALE_TOL: f64 = 1e-6;
/// The covariance tail must have decayed to this fraction of `|Cov(0)|`.
pub const WINDOW_DECAY: f64 = 1e-6;
/// Absolute floor for the decay check when `Cov(0)` itself vanishes.
pub const WINDOW_FLOOR: f64 = 1e-12;
/// Fraction of the τ window inspected by the decay check.
const TAIL_FRACTION: f64 = 0.05;

pub const DEFAULT_TAU_MAX: f64 = 40.0;
pub const DEFAULT_TAU_STEP: f64 = 0.01;
/// Wide enough for the transition lines near the first few resonances.
pub const DEFAULT_OMEGA_MAX: f64 = 100.0;
pub const DEFAULT_OMEGA_STEP: f64 = 0.05;

pub fn default_taus() -> Vec<f64> {
    linspace_step(0.0, DEFAULT_TAU_MAX, DEFAULT_TAU_STEP)
}

pub fn default_omegas() -> Vec<f64> {
    linspace_step(-DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_STEP)
}

/// `±π/Δτ` sampled at `step`: every frequency a uniform τ grid resolves.
/// Over this band `(1/2π)∫S dω` reproduces `Cov(0)` up to the ω sampling.
pub fn nyquist_omegas(tau_step: f64, step: f64) -> Vec<f64> {
    let w = PI / tau_step;
    linspace_step(-w, w, step)
}

/// `X_θ = a e^{−iθ} + a† e^{iθ}`.
pub fn quadrature(dim: usize, theta: f64) -> Result<CMatrix> {
    let a = annihilation(dim)?;
    let ad = creation(dim)?;
    let ph = Complex64::from_polar(1.0, -theta);
    Ok(&a.scale(ph) + &ad.scale(ph.conj()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceSeries {
    pub theta: f64,
    pub taus: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    pub theta: f64,
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    /// `2∫|Im Cov(τ)| dτ`, the bound on what the real-part projection discards.
    pub imag_residual: f64,
}

/// The four regression correlators and stationary moments, independent of θ.
#[derive(Clone, Debug)]
pub struct RegressionTerms {
    pub taus: Vec<f64>,
    /// `⟨a†(τ)a(0)⟩`
    pub adag_tau_a: Vec<Complex64>,
    /// `⟨a†(0)a(τ)⟩`
    pub adag_a_tau: Vec<Complex64>,
    /// `⟨a(τ)a(0)⟩`
    pub a_tau_a: Vec<Complex64>,
    /// `⟨a†(0)a†(τ)⟩`
    pub adag_adag_tau: Vec<Complex64>,
    /// `⟨a⟩`
    pub mean_a: Complex64,
}

impl RegressionTerms {
    pub fn compute(l: &SuperOp, rho_ss: &DensityMatrix, taus: &[f64]) -> Result<Self> {
        if rho_ss.dim() != l.dim() {
            return Err(Error::DimensionMismatch {
                left: l.dim(),
                right: rho_ss.dim(),
            });
        }
        if taus.first().is_some_and(|t| *t != 0.0) {
            return Err(Error::InvalidArgument("tau grid must start at 0".into()));
        }
        let rho = rho_ss.matrix();
        let residual = l.apply(&vectorize(rho))?.norm();
        if residual > STALE_TOL {
            return Err(Error::StaleSteadyState(residual));
        }
        let n = l.dim();
        let a = annihilation(n)?;
        let ad = creation(n)?;
        let inputs = [vectorize(&(&a * rho)), vectorize(&(rho * &ad))];
        let series = propagate_series(l, &inputs, taus)?;
        let tr = |op: &CMatrix, v: &CVector| trace_with_vec(op, v);
        let from_a_rho = &series[0];
        let from_rho_ad = &series[1];
        Ok(Self {
            taus: taus.to_vec(),
            adag_tau_a: from_a_rho.iter().map(|v| tr(&ad, v)).collect(),
            adag_a_tau: from_rho_ad.iter().map(|v| tr(&a, v)).collect(),
            a_tau_a: from_a_rho.iter().map(|v| tr(&a, v)).collect(),
            adag_adag_tau: from_rho_ad.iter().map(|v| tr(&ad, v)).collect(),
            mean_a: trace_product(rho, &a),
        })
    }

    /// `Cov_θ(τ) = ⟨𝒯:X_θ(τ)X_θ(0):⟩ − ⟨X_θ⟩²`.
    pub fn covariance(&self, theta: f64) -> CovarianceSeries {
        let e2 = Complex64::from_polar(1.0, -2.0 * theta);
        let mean_x = 2.0 * (self.mean_a * Complex64::from_polar(1.0, -theta)).re;
        let values = (0..self.taus.len())
            .map(|i| {
                self.adag_tau_a[i]
                    + self.adag_a_tau[i]
                    + e2 * self.a_tau_a[i]
                    + e2.conj() * self.adag_adag_tau[i]
                    - mean_x * mean_x
            })
            .collect();
        CovarianceSeries {
            theta,
            taus: self.taus.clone(),
            values,
        }
    }
}

/// `tr[A · unvec(v)]` with column stacking.
fn trace_with_vec(op: &CMatrix, v: &CVector) -> Complex64 {
    let n = op.dim();
    let s = v.as_slice();
    let mut acc = ZERO;
    for c in 0..n {
        for r in 0..n {
            acc += op[(c, r)] * s[c * n + r];
        }
    }
    acc
}

pub fn two_time_covariance(
    l: &SuperOp,
    rho_ss: &DensityMatrix,
    theta: f64,
    taus: &[f64],
) -> Result<CovarianceSeries> {
    Ok(RegressionTerms::compute(l, rho_ss, taus)?.covariance(theta))
}

/// Static normally ordered variance `⟨:X_θ²:⟩ − ⟨X_θ⟩²`.
pub fn static_covariance(rho: &DensityMatrix, theta: f64) -> Result<f64> {
    let n = rho.dim();
    let a = annihilation(n)?;
    let ad = creation(n)?;
    let e2 = Complex64::from_polar(1.0, -2.0 * theta);
    let normal =
        &(&(&a * &a).scale(e2) + &(&ad * &ad).scale(e2.conj())) + &(&ad * &a).scale_real(2.0);
    let mean_x = rho.expect(&quadrature(n, theta)?)?.re;
    Ok(rho.expect(&normal)?.re - mean_x * mean_x)
}

fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; xs.len()];
    for i in 1..xs.len() {
        let h = 0.5 * (xs[i] - xs[i - 1]);
        w[i - 1] += h;
        w[i] += h;
    }
    w
}

/// Largest `|Cov|` over the last few percent of the τ window.
pub fn tail_magnitude(series: &CovarianceSeries) -> f64 {
    let n = series.values.len();
    let count = ((n as f64 * TAIL_FRACTION).ceil() as usize).clamp(1, n.max(1));
    series.values[n - count..]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `S_θ(ω) = 2 Re ∫₀^∞ e^{−iωτ} Cov_θ(τ) dτ` by the trapezoidal rule.
pub fn squeezing_spectrum(series: &CovarianceSeries, omegas: &[f64]) -> Result<SpectrumResult> {
    if series.taus.len() < 2 || series.taus.len() != series.values.len() {
        return Err(Error::InvalidArgument(
            "covariance series needs at least two samples".into(),
        ));
    }
    if series.values.iter().any(|z| !z.is_finite()) || omegas.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("spectrum input"));
    }
    let head = series.values[0].norm();
    let tail = tail_magnitude(series);
    if tail > (WINDOW_DECAY * head).max(WINDOW_FLOOR) {
        return Err(Error::WindowTooShort { tail, head });
    }
    let w = trapezoid_weights(&series.taus);
    let weighted: Vec<(f64, Complex64)> = series
        .taus
        .iter()
        .zip(&series.values)
        .zip(&w)
        .map(|((t, c), wt)| (*t, c * wt))
        .collect();
    let values = omegas
        .par_iter()
        .map(|&om| {
            let s: Complex64 = weighted.iter().map(|(t, c)| c * (-I * om * t).exp()).sum();
            2.0 * s.re
        })
        .collect();
    let imag_residual = 2.0
        * series
            .values
            .iter()
            .zip(&w)
            .map(|(c, wt)| c.im.abs() * wt)
            .sum::<f64>();
    Ok(SpectrumResult {
        theta: series.theta,
        omegas: omegas.to_vec(),
        values,
        imag_residual,
    })
}

/// `(1/2π)∫ S(ω) dω` over the sampled ω range.
pub fn spectrum_area(spec: &SpectrumResult) -> f64 {
    let w = trapezoid_weights(&spec.omegas);
    spec.values
        .iter()
        .zip(&w)
        .map(|(s, wt)| s * wt)
        .sum::<f64>()
        / (2.0 * PI)
}
