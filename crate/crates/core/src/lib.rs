//! Position, spin and orbital angular momentum operators of the free Dirac
//! electron: canonical, energy-projected and Newton-Wigner-Foldy-Wouthuysen
//! families, with numerical cross-checks and beam observables.

pub mod algebra;
pub mod cli;
pub mod beams;
pub mod error;
pub mod format;
pub mod numeric;
pub mod operators;
pub mod pauli_limit;

pub use error::{Error, Result};
