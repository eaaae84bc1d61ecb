//! Fixed-momentum building blocks: Dirac matrices, kinematics, plane-wave
//! bispinors, the Foldy-Wouthuysen unitary, energy projectors and boosts.

pub mod dirac;
mod kinematics;
mod matrix_function;
mod transforms;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

pub type Mat4 = Matrix4<Complex64>;
pub type Spinor4 = Vector4<Complex64>;

pub use dirac::{alpha, beta, dirac_constants, hamiltonian, spin, DiracConstants};
pub use kinematics::{energy, Bispinor, EnergySign, Kinematics, PolarizationSpinor};
pub use matrix_function::MatrixFunction;
pub use transforms::{
    boost_matrix, fw_unitary, generic_boost, negative_energy_bispinor, plane_wave_bispinor,
    projectors, try_fw_unitary, LorentzBoost,
};
