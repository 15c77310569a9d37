//! Exactly solvable model of a two-frequency photon beam coupled to a
//! quantized spinless electron medium, with and without a constant magnetic
//! field along the beam.
//!
//! The library computes
//!
//! - quasi-photon frequencies from the transcendental characteristic
//!   equations of the dressed quadratic Hamiltonian ([`spectrum`]),
//! - the Bogoliubov coefficient matrices that map free photons to
//!   quasi-photons, together with their canonical-condition residuals
//!   ([`bogoliubov`]),
//! - two-photon entanglement measures (von Neumann and Schmidt) of the
//!   cross-frequency photon pair extracted from the dressed two-quasi-photon
//!   state ([`entangle`], built on the generic two-qubit toolkit
//!   [`twoqubit`]),
//! - and an independent brute-force verifier that assembles the same
//!   Hamiltonians in a truncated multimode Fock basis and diagonalizes them
//!   numerically ([`fock`]).
//!
//! All analytic results are cross-checked against the Fock-space oracle in
//! the test suite; `tests/acceptance.rs` runs the full acceptance gate.
//!
//! Internal unit system: inverse meters throughout (ħ = c = 1). Laboratory
//! inputs (wavelengths, tesla, densities) are converted by [`params`].

pub mod bogoliubov;
pub mod entangle;
mod error;
pub mod fock;
pub mod params;
mod solve;
pub mod spectrum;
pub mod sweep;
pub mod twoqubit;

pub use error::Error;
pub use params::{ModelParams, PhysicalInput, ValidateOptions};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
