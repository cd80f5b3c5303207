//! Imaginary-time critical dynamics of the 1D transverse-field Ising chain
//! on simulated quantum circuits.
//!
//! The crate provides a dense statevector engine ([`qsim`]), the TFIM model
//! with exact oracles ([`tfim`]), hardware-efficient circuit families
//! ([`ansatz`]), McLachlan variational imaginary-time evolution ([`varqite`]),
//! variational ground-state search ([`vqe`]), order-parameter observables and
//! imaginary-time correlators ([`observables`]), finite-size/finite-depth
//! data-collapse fitting ([`collapse`]), and a noisy-readout emulator with
//! readout and Clifford-data-regression mitigation ([`noisemit`]).

pub mod ansatz;
pub mod collapse;
pub mod error;
pub mod noisemit;
pub mod observables;
pub mod qsim;
pub mod tfim;
pub mod varqite;
pub mod vqe;

pub use error::{Error, Result};
