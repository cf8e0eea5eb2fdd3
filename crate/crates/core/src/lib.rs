//! Simulation and analysis of joint measurements of the qubit observables X and Y.
//!
//! The crate builds the symmetric four-outcome POVM, simulates it on
//! eigenstate inputs and on singlet pairs, estimates the resolutions `V_x`,
//! `V_y` and the error correlation `C²` (negative for every quantum device),
//! and reconstructs Kirkwood-Dirac quasi-probabilities from outcome tables.
//!
//! Modules, bottom-up:
//! - [`qubit`]: 2×2 and 4×4 complex operators, Pauli matrices, eigenstates, the singlet
//! - [`povm`]: POVM construction and exact outcome probabilities
//! - [`sim`]: seeded, chunk-parallel Monte-Carlo runs
//! - [`analysis`]: estimators and error-model algebra
//! - [`kd`]: Kirkwood-Dirac distributions and their reconstruction

pub mod analysis;
pub mod error;
pub mod kd;
pub mod povm;
pub mod qubit;
pub mod random;
pub mod sim;

pub use error::{Error, Result};
pub use num_complex::Complex64;
