//! System parameters and rotating-frame Hamiltonians of the driven Kerr cavity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock_algebra::CMatrix;

/// Physical parameters, with rates in units of the damping constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Kerr nonlinearity χ.
    pub chi: f64,
    /// Driving strength ε.
    pub eps: f64,
    /// Damping constant γ; zero gives closed-system dynamics.
    pub gamma: f64,
    /// Mean thermal photon number of the reservoir.
    pub n_th: f64,
    /// Fock truncation dimension.
    pub dim: usize,
}

/// Default Fock dimension for dissipative calculations.
pub const DEFAULT_DIM: usize = 15;

impl SystemParams {
    pub fn new(chi: f64, eps: f64, gamma: f64, n_th: f64, dim: usize) -> Result<Self> {
        let p = Self {
            chi,
            eps,
            gamma,
            n_th,
            dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.chi, self.eps, self.gamma, self.n_th]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite parameter".into()));
        }
        if self.chi <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "chi must be > 0, got {}",
                self.chi
            )));
        }
        if self.eps < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eps must be >= 0, got {}",
                self.eps
            )));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if self.n_th < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "n_th must be >= 0, got {}",
                self.n_th
            )));
        }
        if self.dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "dim must be >= 2, got {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// `γ ≪ ε ≪ χ`, read as `γ < ε/3` and `ε < χ/3`. Diagnostic only.
    pub fn well_resolved(&self) -> bool {
        self.gamma < self.eps / 3.0 && self.eps < self.chi / 3.0
    }

    pub fn with_eps(self, eps: f64) -> Self {
        Self { eps, ..self }
    }

    pub fn with_n_th(self, n_th: f64) -> Self {
        Self { n_th, ..self }
    }

    pub fn with_dim(self, dim: usize) -> Self {
        Self { dim, ..self }
    }
}

/// Lab-frame cavity and drive frequencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveSpec {
    pub omega0: f64,
    pub omega_d: f64,
}

/// Tuning parameter `k` and detuning `Δ_k = ω₀ + χ(k−1) − ω_d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TuningPoint {
    pub k: f64,
    pub delta_k: f64,
}

impl TuningPoint {
    /// The `k`-photon resonance, `Δ_k = 0`.
    pub fn resonant(k: f64) -> Self {
        Self { k, delta_k: 0.0 }
    }

    /// Detuning of a drive with respect to the `k`-photon resonance.
    pub fn from_drive(drive: DriveSpec, chi: f64, k: f64) -> Self {
        Self {
            k,
            delta_k: drive.omega0 + chi * (k - 1.0) - drive.omega_d,
        }
    }
}

/// The `k` for which the given drive is resonant: `k = (ω_d − ω₀)/χ + 1`.
pub fn k_from_frequencies(drive: DriveSpec, chi: f64) -> Result<TuningPoint> {
    if !(chi > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "chi must be > 0, got {chi}"
        )));
    }
    if !drive.omega0.is_finite() || !drive.omega_d.is_finite() {
        return Err(Error::InvalidParameter("non-finite drive frequency".into()));
    }
    Ok(TuningPoint::resonant(
        (drive.omega_d - drive.omega0) / chi + 1.0,
    ))
}

fn kerr_hamiltonian(dim: usize, chi: f64, eps: f64, k: f64, delta_k: f64) -> CMatrix {
    let mut h = CMatrix::zeros(dim);
    for n in 0..dim {
        let nf = n as f64;
        h[(n, n)] = Complex64::new(delta_k * nf + chi * nf * (nf - k), 0.0);
        if n + 1 < dim {
            let off = Complex64::new(eps * ((n + 1) as f64).sqrt(), 0.0);
            h[(n, n + 1)] = off;
            h[(n + 1, n)] = off;
        }
    }
    h
}

/// `H = Δ_k n̂ + χ n̂(n̂ − k) + ε(a + a†)` on `params.dim` levels.
pub fn hamiltonian_rot(params: &SystemParams, point: TuningPoint) -> Result<CMatrix> {
    params.validate()?;
    if !point.k.is_finite() || !point.delta_k.is_finite() {
        return Err(Error::InvalidParameter("non-finite tuning point".into()));
    }
    Ok(kerr_hamiltonian(
        params.dim,
        params.chi,
        params.eps,
        point.k,
        point.delta_k,
    ))
}

/// The resonant Hamiltonian truncated to `trunc_dim` levels, ignoring `params.dim`.
pub fn hamiltonian_trunc(params: &SystemParams, k: u32, trunc_dim: usize) -> Result<CMatrix> {
    if trunc_dim <= k as usize {
        return Err(Error::InvalidTruncation { k, trunc_dim });
    }
    hamiltonian_rot(
        &params.with_dim(trunc_dim.max(2)),
        TuningPoint::resonant(k as f64),
    )
    .map(|h| h.block(trunc_dim))
}
