//! Symbolic dynamics toolkit: subshifts of finite type and β-shifts, entropy,
//! Birkhoff spectra, invariant measures, witness-orbit synthesis by exact
//! orbit gluing, and finite-horizon recurrence evidence.

pub mod beta;
pub mod classify;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod minimal;
pub mod oracle;
pub mod par;
pub mod potential;
pub mod shift;
pub mod spectrum;
pub mod synthesis;

pub use error::{Error, Result};
pub use potential::Potential;
pub use shift::{ShiftSpace, Symbol, Word};
