//! Nonrelativistic expansions: the covariant-coordinate origin of the
//! spin-orbit energy and the FW/Pauli wavefunction correspondence.

mod expansion;
mod report;
mod soi;

pub use expansion::{
    exact_lower_block_residual, pauli_correspondence, pauli_residual, r_squared_identity, r_squared_residual,
    square_coefficients, MomentumPacket, SquareCoefficients, HALVING_LEVELS, MAX_RATIO, PAULI_MIN_ORDER,
    R_SQUARED_MIN_ORDER,
};
pub use report::{halving_study, observed_order, ExpansionReport};
pub use soi::{
    soi_potential_term, EvenPolynomial, SoiComparison, SoiPacket, BOX_WIDTHS, DEFAULT_GRID, DEFAULT_WIDTH,
    SOI_TOLERANCE, SUPPORT_LEAK,
};
