//! Variational quantum response toolkit.
//!
//! Frequency-dependent linear response functions `χ(ω)` of qubit Hamiltonians
//! are obtained by variationally solving the shifted response equation
//! `(H₀ − E₀ − ω − iγ)|Ψ(ω)⟩ = V|Ψ₀⟩` with parameterized circuits, alongside
//! exact classical references, noisy density-matrix emulation and
//! symmetry-projection error mitigation.

pub mod circuits;
pub mod error;
pub mod mitigation;
pub mod oracle;
pub mod pauli;
pub mod solvers;
pub mod spectrum;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use pauli::{jordan_wigner, pauli_mul, FermionTerm, Ladder, Pauli, PauliSum, PauliTerm};
