//! Photon blockade in a coherently driven Kerr cavity.
//!
//! The crate builds the rotating-frame Hamiltonian
//! `H = Δ n̂ + χ n̂(n̂ − k) + ε(a + a†)`, the thermal amplitude-damping
//! Liouvillian, and solves for steady states and time evolution on a
//! truncated Fock space. On top of that it provides photon statistics,
//! entropic and coherence measures, Wigner functions, two-time quadrature
//! covariances with their squeezing spectra, and closed-form perturbative
//! solutions used as independent cross-checks.
//!
//! Units: `ħ = 1`; rates and frequencies are usually expressed in units of
//! the damping constant `γ`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock_algebra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub mod analytic_oracles;
pub mod cli;
pub mod correlations;
pub mod liouvillian;
pub mod model;
pub mod observables;
pub mod phase_space;
pub mod solvers;
