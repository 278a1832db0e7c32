//! Scalar diagnostics of a density matrix: photon statistics, truncation
//! fidelities, purity and entropies, coherence and thermalization.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock_algebra::hermitian_eigenvalues;
use crate::liouvillian::DensityMatrix;

/// Below this mean photon number the Fano factor is undefined.
pub const FANO_MIN_MEAN: f64 = 1e-12;
/// Below this the thermalization denominator is treated as zero.
pub const THERMALIZATION_MIN_DENOM: f64 = 1e-12;
/// Population threshold defining the uppermost occupied Fock level.
pub const N_MAX_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct PhotonStats {
    pub probs: Vec<f64>,
    pub mean_n: f64,
    /// `None` for (numerically) vacuum states.
    pub fano: Option<f64>,
}

impl PhotonStats {
    pub fn of(rho: &DensityMatrix) -> Self {
        let probs = photon_probs(rho);
        let (mean_n, var) = moments(&probs);
        let fano = (mean_n > FANO_MIN_MEAN).then(|| var / mean_n);
        Self {
            probs,
            mean_n,
            fano,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceReport {
    pub purity: f64,
    pub vn_entropy: f64,
    pub linear_entropy: f64,
    pub coherence: f64,
    pub thermalization: Option<f64>,
    pub offdiag: BTreeMap<(usize, usize), Complex64>,
}

impl CoherenceReport {
    /// Collects all measures plus the requested off-diagonal elements.
    pub fn of(rho: &DensityMatrix, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut offdiag = BTreeMap::new();
        for &(n, m) in pairs {
            offdiag.insert((n, m), self::offdiag(rho, n, m)?);
        }
        let purity = purity(rho);
        Ok(Self {
            purity,
            vn_entropy: vn_entropy(rho)?,
            linear_entropy: 1.0 - purity,
            coherence: coherence_param(rho),
            thermalization: thermalization(rho),
            offdiag,
        })
    }
}

/// Diagonal of `ρ`, clamped to `[0, 1]`.
pub fn photon_probs(rho: &DensityMatrix) -> Vec<f64> {
    rho.matrix()
        .diagonal()
        .iter()
        .map(|z| z.re.clamp(0.0, 1.0))
        .collect()
}

fn moments(probs: &[f64]) -> (f64, f64) {
    let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let second: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| (n * n) as f64 * p)
        .sum();
    (mean, second - mean * mean)
}

/// `F_m = Σ_{n ≤ m} P_n`.
pub fn truncation_fidelity(rho: &DensityMatrix, m: usize) -> Result<f64> {
    let probs = photon_probs(rho);
    if m >= probs.len() {
        return Err(Error::OutOfRange {
            n: m,
            m,
            dim: probs.len(),
        });
    }
    Ok(probs[..=m].iter().sum())
}

pub fn mean_photon_number(rho: &DensityMatrix) -> f64 {
    moments(&photon_probs(rho)).0
}

/// `(⟨n̂²⟩ − ⟨n̂⟩²)/⟨n̂⟩`, or `None` when `⟨n̂⟩ ≤ 1e-12`.
pub fn fano(rho: &DensityMatrix) -> Option<f64> {
    PhotonStats::of(rho).fano
}

/// `μ = tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
    rho.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// `−tr(ρ ln ρ)` in nats.
pub fn vn_entropy(rho: &DensityMatrix) -> Result<f64> {
    let vals = hermitian_eigenvalues(rho.matrix())?;
    Ok(vals
        .iter()
        .map(|l| l.clamp(0.0, 1.0))
        .filter(|l| *l > 0.0)
        .map(|l| -l * l.ln())
        .sum())
}

pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - purity(rho)
}

/// `C = Σ_{n≠m} |ρ_nm|²`, computed as `μ(ρ) − μ(diag ρ)`.
pub fn coherence_param(rho: &DensityMatrix) -> f64 {
    let diag: f64 = rho.matrix().diagonal().iter().map(|z| z.norm_sqr()).sum();
    (purity(rho) - diag).max(0.0)
}

/// The same quantity as [`coherence_param`] by the explicit double sum.
pub fn coherence_direct(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc
}

/// Largest `n` with `P_n > 1e-6`.
pub fn uppermost_level(rho: &DensityMatrix) -> usize {
    photon_probs(rho)
        .iter()
        .rposition(|p| *p > N_MAX_THRESHOLD)
        .unwrap_or(0)
}

/// `T = S_L / √((1 + μ − 2p₀)(1 + μ − 2p_max))`, or `None` when the
/// denominator vanishes.
pub fn thermalization(rho: &DensityMatrix) -> Option<f64> {
    let probs = photon_probs(rho);
    let mu = purity(rho);
    let p0 = probs[0];
    let pmax = probs[uppermost_level(rho)];
    let denom = ((1.0 + mu - 2.0 * p0) * (1.0 + mu - 2.0 * pmax))
        .max(0.0)
        .sqrt();
    (denom > THERMALIZATION_MIN_DENOM).then(|| (1.0 - mu) / denom)
}

/// `⟨n|ρ|m⟩` for `n ≠ m`.
pub fn offdiag(rho: &DensityMatrix, n: usize, m: usize) -> Result<Complex64> {
    let dim = rho.dim();
    if n >= dim || m >= dim || n == m {
        return Err(Error::OutOfRange { n, m, dim });
    }
    Ok(rho.matrix()[(n, m)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_algebra::{CMatrix, CVector};
    use proptest::prelude::*;

    fn superposition() -> DensityMatrix {
        DensityMatrix::pure(&CVector::from_real(&[1.0, 1.0])).unwrap()
    }

    #[test]
    fn vacuum_statistics() {
        let vac = DensityMatrix::fock(5, 0).unwrap();
        assert_eq!(photon_probs(&vac), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        for m in 0..5 {
            assert_eq!(truncation_fidelity(&vac, m).unwrap(), 1.0);
        }
        assert!(truncation_fidelity(&vac, 5).is_err());
        assert_eq!(fano(&vac), None);
        assert_eq!(thermalization(&vac), None);
    }

    #[test]
    fn maximally_mixed_probabilities() {
        let mm = DensityMatrix::maximally_mixed(4).unwrap();
        for p in photon_probs(&mm) {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn fock_state_has_zero_fano() {
        for n in 1..4 {
            assert_eq!(fano(&DensityMatrix::fock(6, n).unwrap()), Some(0.0));
        }
    }

    #[test]
    fn thermal_fano_matches_geometric_moments() {
        // Geometric distribution P_n = n̄ⁿ/(1+n̄)^{n+1}: variance n̄² + n̄.
        for nbar in [0.05, 0.3, 1.0] {
            let th = DensityMatrix::thermal(80, nbar).unwrap();
            let f = fano(&th).unwrap();
            assert!((f - (1.0 + nbar)).abs() < 1e-8, "nbar={nbar} fano={f}");
        }
    }

    #[test]
    fn purity_and_entropies() {
        let psi = superposition();
        assert!((purity(&psi) - 1.0).abs() < 1e-14);
        assert!(vn_entropy(&psi).unwrap().abs() < 1e-12);
        assert!(linear_entropy(&psi).abs() < 1e-14);
        let mm = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((purity(&mm) - 0.5).abs() < 1e-15);
        assert!((vn_entropy(&mm).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn coherence_examples() {
        let psi = superposition();
        assert!((coherence_param(&psi) - 0.5).abs() < 1e-14);
        assert!((coherence_direct(&psi) - 0.5).abs() < 1e-14);
        assert_eq!(
            coherence_param(&DensityMatrix::thermal(5, 0.4).unwrap()),
            0.0
        );
    }

    #[test]
    fn thermalization_examples() {
        for d in 2..6 {
            let mm = DensityMatrix::maximally_mixed(d).unwrap();
            assert!((thermalization(&mm).unwrap() - 1.0).abs() < 1e-12, "d={d}");
        }
        let half = DensityMatrix::new(CMatrix::from_real_diagonal(&[0.5, 0.5, 0.0])).unwrap();
        assert_eq!(uppermost_level(&half), 1);
        assert!((thermalization(&half).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn offdiag_access() {
        let psi = superposition();
        assert!((offdiag(&psi, 0, 1).unwrap().re - 0.5).abs() < 1e-15);
        assert!(offdiag(&psi, 1, 1).is_err());
        assert!(offdiag(&psi, 0, 2).is_err());
        let th = DensityMatrix::thermal(3, 0.2).unwrap();
        assert_eq!(offdiag(&th, 2, 0).unwrap(), Complex64::new(0.0, 0.0));
        let rep = CoherenceReport::of(&psi, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(rep.offdiag[&(0, 1)], rep.offdiag[&(1, 0)].conj());
        assert!((rep.linear_entropy - (1.0 - rep.purity)).abs() < 1e-15);
    }

    fn arb_state(dim: usize) -> impl Strategy<Value = DensityMatrix> {
        // ρ = G G† / tr(G G†) from a random complex matrix G.
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
            let data = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            let g = CMatrix::from_row_major(dim, data).unwrap();
            let gg = &g * &g.adjoint();
            let tr = gg.trace().re;
            DensityMatrix::new(gg.scale_real(1.0 / tr).hermitian_part()).unwrap()
        })
    }

    fn arb_rank_one(dim: usize) -> impl Strategy<Value = DensityMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map(
            "non-zero vector",
            move |v| {
                let psi = CVector::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect());
                DensityMatrix::pure(&psi).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn entropy_bounds(rho in arb_state(5)) {
            let s = vn_entropy(&rho).unwrap();
            let sl = linear_entropy(&rho);
            let mu = purity(&rho);
            prop_assert!(s - sl >= -1e-10);
            prop_assert!(sl >= -1e-12);
            prop_assert!((1.0 / 5.0 - 1e-12..=1.0 + 1e-12).contains(&mu));
        }

        #[test]
        fn coherence_paths_agree(rho in arb_state(6)) {
            prop_assert!((coherence_param(&rho) - coherence_direct(&rho)).abs() < 1e-12);
            prop_assert!(coherence_param(&rho) >= 0.0);
        }

        #[test]
        fn fidelities_are_monotone(rho in arb_rank_one(6)) {
            let f: Vec<f64> = (0..6).map(|m| truncation_fidelity(&rho, m).unwrap()).collect();
            prop_assert!(f.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!((f[5] - 1.0).abs() < 1e-8);
            let stats = PhotonStats::of(&rho);
            prop_assert!((stats.probs.iter().sum::<f64>() - 1.0).abs() < 1e-8);
            prop_assert_eq!(stats.fano.is_none(), stats.mean_n <= FANO_MIN_MEAN);
        }
    }
}
