//! Spectra of pseudo-Hermitian (non-Hermitian) model Hamiltonians by two
//! independent routes: generalized Gutzwiller quantization over periodic
//! orbits in complexified phase space, and dense diagonalization of the
//! discretized quantum operators. Every level is classified as real
//! (self-symmetric orbit) or complex-conjugate-paired (symmetric orbit pair).

pub mod action;
pub mod config;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod models;
pub mod output;
pub mod quantizer;
pub mod quantum;
pub mod spin;
pub mod verify;

pub use error::Error;

/// Complex scalar used throughout; all model units are dimensionless (hbar = 1).
pub type C64 = num_complex::Complex64;

/// Shorthand for a complex number from parts.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
