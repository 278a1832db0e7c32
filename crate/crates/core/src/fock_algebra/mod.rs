//! Dense complex linear algebra and bosonic operators on a truncated Fock space.

mod expm;
mod linalg;
mod matrix;
mod operators;

pub use expm::expm;
pub use linalg::{
    eigenvalues, hermitian_eig, hermitian_eigenvalues, singular_values, LuFactor, HERMITIAN_TOL,
};
pub use matrix::{CMatrix, CVector, I, ONE, ZERO};
pub use operators::{
    annihilation, creation, displacement, fock_projector, identity, number, parity,
};
