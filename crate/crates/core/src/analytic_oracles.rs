//! Closed-form perturbative results for the truncated Kerr cavity, used as
//! independent cross-checks of the numerical solvers.
//!
//! Two different small parameters appear. For the damped steady states
//! `δ = γ/ε` and `d = ε²/(γχ)` ([`PerturbationParams`]). For the
//! dissipation-free two-photon eigensystem `δ = ε/χ` with `d = 1`, passed
//! explicitly as `delta_unitary`.
//!
//! The approximate density matrices are returned as plain matrices: cut at
//! finite order they are Hermitian but not exactly positive or normalized.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock_algebra::{CMatrix, CVector, I, ZERO};

/// Both expansion parameters must stay below this for the expansions to apply.
pub const VALIDITY_BOUND: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationParams {
    /// `γ/ε`
    pub delta: f64,
    /// `ε²/(γχ)`, so that `ε/χ = dδ`.
    pub d: f64,
}

impl PerturbationParams {
    pub fn new(delta: f64, d: f64) -> Result<Self> {
        if !(delta > 0.0) || !(d > 0.0) || !delta.is_finite() || !d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta and d must be positive (delta={delta}, d={d})"
            )));
        }
        Ok(Self { delta, d })
    }

    pub fn from_rates(chi: f64, eps: f64, gamma: f64) -> Result<Self> {
        Self::new(gamma / eps, eps * eps / (gamma * chi))
    }

    /// `δ ≪ 1` and `dδ ≪ 1`, read as both below 0.3.
    pub fn is_valid(&self) -> bool {
        self.delta < VALIDITY_BOUND && self.d * self.delta < VALIDITY_BOUND
    }

    /// `(χ, ε)` for a given `γ`.
    pub fn rates(&self, gamma: f64) -> (f64, f64) {
        let eps = gamma / self.delta;
        (eps * eps / (gamma * self.d), eps)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// First-order steady state of the four-level truncation at `k = 2`.
pub fn steady2_approx(p: PerturbationParams) -> CMatrix {
    let (d, dl) = (p.d, p.delta);
    let (d2, d3) = (d * d, d * d * d);
    let x = c(d - 2.0 * d3, -2.0 * d2);
    let y = c(-2.0 * SQRT_2 * d3, -SQRT_2 * d2);
    let z = c(0.0, 6f64.sqrt() * d2 / 3.0);
    let w = c(-2.0 * 3f64.sqrt() * d3 * dl / 3.0, 0.0);
    let s2 = SQRT_2 * d;
    let rows = [
        [
            c(1.0 + 2.0 * d2, 0.0),
            x.conj() * dl,
            c(0.0, s2),
            z.conj() * dl,
        ],
        [x * dl, c(4.0 * d2, 0.0), y.conj() * dl, ZERO],
        [c(0.0, -s2), y * dl, c(2.0 * d2, 0.0), w],
        [z * dl, ZERO, w, ZERO],
    ];
    let pre = 1.0 / (1.0 + 8.0 * d2);
    CMatrix::from_fn(4, |i, j| rows[i][j] * pre)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApproxOrder {
    Delta1,
    Delta2,
}

/// Steady state of the three-level truncation at `k = 1`.
pub fn steady1_approx(p: PerturbationParams, order: ApproxOrder) -> CMatrix {
    let (d, dl) = (p.d, p.delta);
    let rows = match order {
        ApproxOrder::Delta2 => {
            let x = c(-0.5 * d, -0.25);
            let y = c(d * d, d) * (SQRT_2 / 8.0);
            let dl2 = dl * dl;
            let e12 = c(-0.25 * SQRT_2 * d * dl, 0.0);
            [
                [
                    c(0.5 + (1.0 - 4.0 * d * d) * dl2 / 16.0, 0.0),
                    x.conj() * dl,
                    y.conj() * dl2,
                ],
                [x * dl, c(0.5 - dl2 / 16.0, 0.0), e12],
                [y * dl2, e12, c(d * d * dl2 / 4.0, 0.0)],
            ]
        }
        ApproxOrder::Delta1 => {
            let e12 = c(-0.25 * SQRT_2 * d * dl, 0.0);
            [
                [c(0.5, 0.0), c(-d, 0.5) * (0.5 * dl), ZERO],
                [c(-d, -0.5) * (0.5 * dl), c(0.5, 0.0), e12],
                [ZERO, e12, ZERO],
            ]
        }
    };
    CMatrix::from_fn(3, |i, j| rows[i][j])
}

/// Approximate eigensystem of the resonant four-level Hamiltonian at `k = 2`
/// with `ε = δχ`.
#[derive(Clone, Debug)]
pub struct Trunc2Eigensystem {
    pub chi: f64,
    pub delta_unitary: f64,
    pub lambdas: [f64; 4],
    /// Eigenvectors scaled to unit norm numerically.
    pub vectors: [CVector; 4],
    /// Unnormalized vectors as written in the expansion.
    pub raw_vectors: [CVector; 4],
    /// The closed-form `N⁻²` approximations.
    pub printed_norm_inv_sq: [f64; 4],
}

pub fn trunc2_eigensystem(chi: f64, delta_unitary: f64) -> Result<Trunc2Eigensystem> {
    if !(chi > 0.0) || !(delta_unitary >= 0.0) || !delta_unitary.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need chi > 0 and delta >= 0 (chi={chi}, delta={delta_unitary})"
        )));
    }
    let dl = delta_unitary;
    let dl2 = dl * dl;
    let (xm, xp) = (1.0 - SQRT_2, 1.0 + SQRT_2);
    let s3 = 3f64.sqrt();
    let lambdas = [
        -chi * (3.0 * dl2 + 1.0),
        chi * dl2 * xm,
        chi * dl2 * xp,
        chi * (dl2 + 3.0),
    ];
    let raw_vectors = [
        CVector::from_real(&[
            2.0 * SQRT_2 * dl,
            -2.0 * SQRT_2 * (3.0 * dl2 + 1.0),
            4.0 * dl,
            -s3 * dl2,
        ]),
        CVector::from_real(&[dl2 + 3.0, 3.0 * xm * dl, xm * dl2 - 3.0, s3 * dl]),
        CVector::from_real(&[dl2 + 3.0, 3.0 * xp * dl, -(xp * dl2 - 3.0), -s3 * dl]),
        CVector::from_real(&[0.0, dl2, 2.0 * SQRT_2 * dl, 2.0 * 6f64.sqrt()]),
    ];
    // N±⁻² ≈ 6(3 + (5 ± 2√2)δ²).
    let printed_norm_inv_sq = [
        8.0 * (1.0 + 9.0 * dl2),
        6.0 * (3.0 + (5.0 - 2.0 * SQRT_2) * dl2),
        6.0 * (3.0 + (5.0 + 2.0 * SQRT_2) * dl2),
        8.0 * (3.0 + dl2),
    ];
    let vectors = raw_vectors.clone().map(|v| v.normalized());
    Ok(Trunc2Eigensystem {
        chi,
        delta_unitary,
        lambdas,
        vectors,
        raw_vectors,
        printed_norm_inv_sq,
    })
}

impl Trunc2Eigensystem {
    /// `Σ_{j≤3} e^{−iλ_j t} ⟨λ_j|0⟩ |λ_j⟩`; the fourth vector has no vacuum
    /// component.
    pub fn psi(&self, t: f64) -> CVector {
        let mut out = CVector::zeros(4);
        for j in 0..3 {
            let v = &self.vectors[j];
            let amp = v[0].conj() * (-I * self.lambdas[j] * t).exp();
            out.axpy(amp, v);
        }
        out
    }
}

/// Approximate free evolution of `|0⟩` under the four-level Hamiltonian at `k = 2`.
pub fn psi2_evolution(chi: f64, delta_unitary: f64, t: f64) -> Result<CVector> {
    Ok(trunc2_eigensystem(chi, delta_unitary)?.psi(t))
}

/// `cos(εt)|0⟩ − i sin(εt)|1⟩` embedded in three levels.
pub fn psi1_evolution(eps: f64, t: f64) -> CVector {
    let ph = eps * t;
    CVector::new(vec![c(ph.cos(), 0.0), c(0.0, -ph.sin()), ZERO])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_algebra::hermitian_eig;
    use crate::model::{hamiltonian_trunc, SystemParams};

    fn pp(delta: f64, d: f64) -> PerturbationParams {
        PerturbationParams::new(delta, d).unwrap()
    }

    #[test]
    fn validity_and_rates() {
        assert!(pp(0.1, 1.0).is_valid());
        assert!(!pp(0.1, 4.0).is_valid());
        assert!(!pp(0.5, 0.1).is_valid());
        assert!(PerturbationParams::new(0.0, 1.0).is_err());
        let p = PerturbationParams::from_rates(30.0, 5.0, 1.0).unwrap();
        assert!((p.delta - 0.2).abs() < 1e-15);
        let (chi, eps) = p.rates(1.0);
        assert!((chi - 30.0).abs() < 1e-12 && (eps - 5.0).abs() < 1e-12);
    }

    #[test]
    fn steady2_structure() {
        for d in [0.2, 0.7, 1.0] {
            let rho = steady2_approx(pp(0.1, d));
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-15);
            assert_eq!(rho[(3, 3)], ZERO);
            assert_eq!(rho[(3, 1)], ZERO);
            assert_eq!(rho[(1, 3)], ZERO);
            assert!(rho.hermitian_deviation() < 1e-16);
        }
        let tiny = steady2_approx(pp(0.1, 1e-9));
        let mut vac = CMatrix::zeros(4);
        vac[(0, 0)] = c(1.0, 0.0);
        assert!(tiny.max_abs_diff(&vac) < 1e-8);
    }

    #[test]
    fn steady1_entries() {
        let p = pp(0.05, 0.8);
        let r1 = steady1_approx(p, ApproxOrder::Delta1);
        let diag: Vec<f64> = r1.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.5, 0.5, 0.0]);
        let r2 = steady1_approx(p, ApproxOrder::Delta2);
        assert!((r2[(2, 2)].re - 0.64 * 0.0025 / 4.0).abs() < 1e-16);
        assert!((r2.trace().re - 1.0).abs() < 1e-15);
        assert!(r1.hermitian_deviation() == 0.0 && r2.hermitian_deviation() == 0.0);
    }

    #[test]
    fn steady1_orders_differ_at_second_order() {
        for delta in [0.01, 0.03, 0.1] {
            for d in [0.3, 1.0] {
                let p = pp(delta, d);
                let diff = steady1_approx(p, ApproxOrder::Delta1)
                    .max_abs_diff(&steady1_approx(p, ApproxOrder::Delta2));
                assert!(
                    diff <= 2.0 * delta * delta,
                    "delta={delta} d={d} diff={diff}"
                );
            }
        }
    }

    #[test]
    fn unperturbed_eigensystem() {
        let es = trunc2_eigensystem(30.0, 0.0).unwrap();
        assert_eq!(es.lambdas, [-30.0, 0.0, 0.0, 90.0]);
        let h =
            hamiltonian_trunc(&SystemParams::new(30.0, 0.0, 1.0, 0.0, 4).unwrap(), 2, 4).unwrap();
        let mut diag: Vec<f64> = h.diagonal().iter().map(|z| z.re).collect();
        diag.sort_by(f64::total_cmp);
        assert_eq!(diag, vec![-30.0, 0.0, 0.0, 90.0]);
    }

    fn exact(chi: f64, delta: f64) -> (Vec<f64>, CMatrix) {
        let p = SystemParams::new(chi, chi * delta, 1.0, 0.0, 4).unwrap();
        hermitian_eig(&hamiltonian_trunc(&p, 2, 4).unwrap()).unwrap()
    }

    #[test]
    fn eigensystem_matches_exact_diagonalization() {
        let (chi, delta) = (30.0, 1.0 / 6.0);
        let es = trunc2_eigensystem(chi, delta).unwrap();
        let (vals, vecs) = exact(chi, delta);
        for i in 0..4 {
            assert!(
                (es.lambdas[i] - vals[i]).abs() <= 5.0 * chi * delta.powi(3),
                "λ{}",
                i + 1
            );
            let col = CVector::new((0..4).map(|r| vecs[(r, i)]).collect());
            let overlap = es.vectors[i].inner(&col).norm();
            assert!(
                overlap >= 1.0 - 10.0 * delta.powi(4),
                "v{} overlap {overlap}",
                i + 1
            );
        }
        let sum: f64 = es.lambdas.iter().sum();
        assert!((sum - 2.0 * chi).abs() <= 10.0 * chi * delta * delta);
    }

    #[test]
    fn eigenvalue_error_is_third_order() {
        // Halving δ should cut the eigenvalue error by about 2³ or more.
        let chi = 1.0;
        let err = |delta: f64| {
            let es = trunc2_eigensystem(chi, delta).unwrap();
            let (vals, _) = exact(chi, delta);
            (0..4)
                .map(|i| (es.lambdas[i] - vals[i]).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.04) / err(0.02);
        assert!(ratio > 7.0, "ratio {ratio}");
    }

    #[test]
    fn printed_normalizations_match_to_fourth_order() {
        for delta in [0.02, 0.05, 0.1] {
            let es = trunc2_eigensystem(1.0, delta).unwrap();
            for j in 0..4 {
                let raw = es.raw_vectors[j].norm().powi(2);
                let rel = (raw - es.printed_norm_inv_sq[j]).abs() / raw;
                // N₁⁻² drops 75δ⁴, the largest omitted term.
                assert!(
                    rel < 10.0 * delta.powi(4),
                    "N{} delta={delta} rel={rel}",
                    j + 1
                );
            }
        }
    }

    #[test]
    fn psi2_starts_in_vacuum_and_blocks_three_photons() {
        let (chi, delta) = (30.0, 0.1);
        let es = trunc2_eigensystem(chi, delta).unwrap();
        let psi0 = es.psi(0.0);
        assert!(psi0.max_abs_diff(&CVector::basis(4, 0).unwrap()) < 5.0 * delta.powi(3));
        for i in 0..=500 {
            let t = 50.0 / chi * i as f64 / 500.0;
            let psi = psi2_evolution(chi, delta, t).unwrap();
            assert!((psi.norm() - 1.0).abs() < 5.0 * delta.powi(3));
        }
    }

    #[test]
    fn psi1_examples() {
        let eps = 2.0;
        assert_eq!(psi1_evolution(eps, 0.0), CVector::basis(3, 0).unwrap());
        let quarter = psi1_evolution(eps, std::f64::consts::PI / (2.0 * eps));
        assert!((quarter[1] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(quarter[0].norm() < 1e-15);
    }
}
