//! Standard-representation Dirac matrices.

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;

use super::{MatrixFunction, Mat4};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli matrix σ_i, i ∈ {0, 1, 2} for x, y, z.
pub fn pauli(i: usize) -> Matrix2<Complex64> {
    match i {
        0 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        1 => Matrix2::new(ZERO, -I, I, ZERO),
        2 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index out of range: {i}"),
    }
}

/// σ·v for a real 3-vector.
pub fn pauli_dot(v: &Vector3<f64>) -> Matrix2<Complex64> {
    (0..3).fold(Matrix2::zeros(), |acc, i| acc + pauli(i) * Complex64::from(v[i]))
}

/// Assembles a 4×4 matrix from 2×2 blocks [[a, b], [c, d]].
pub fn block(
    a: &Matrix2<Complex64>,
    b: &Matrix2<Complex64>,
    c: &Matrix2<Complex64>,
    d: &Matrix2<Complex64>,
) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

pub fn alpha(i: usize) -> Mat4 {
    let z = Matrix2::zeros();
    block(&z, &pauli(i), &pauli(i), &z)
}

pub fn beta() -> Mat4 {
    let one = Matrix2::identity();
    block(&one, &Matrix2::zeros(), &Matrix2::zeros(), &(-one))
}

/// Canonical spin S_i = diag(σ_i, σ_i)/2.
pub fn spin(i: usize) -> Mat4 {
    let half = pauli(i) * Complex64::from(0.5);
    block(&half, &Matrix2::zeros(), &Matrix2::zeros(), &half)
}

pub fn identity() -> Mat4 {
    Mat4::identity()
}

/// α·v.
pub fn alpha_dot(v: &Vector3<f64>) -> Mat4 {
    (0..3).fold(Mat4::zeros(), |acc, i| acc + alpha(i) * Complex64::from(v[i]))
}

/// S·v.
pub fn spin_dot(v: &Vector3<f64>) -> Mat4 {
    (0..3).fold(Mat4::zeros(), |acc, i| acc + spin(i) * Complex64::from(v[i]))
}

/// Free Dirac Hamiltonian H = α·p + βm.
pub fn hamiltonian(p: &Vector3<f64>, m: f64) -> Mat4 {
    alpha_dot(p) + beta() * Complex64::from(m)
}

/// Levi-Civita symbol ε_ijk.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The constant Dirac matrices packaged as matrix functions.
pub struct DiracConstants {
    pub alpha: [MatrixFunction; 3],
    pub beta: MatrixFunction,
    pub spin: [MatrixFunction; 3],
}

pub fn dirac_constants() -> DiracConstants {
    let axis = ["x", "y", "z"];
    DiracConstants {
        alpha: std::array::from_fn(|i| {
            MatrixFunction::constant(format!("alpha_{}", axis[i]), alpha(i)).hermitian()
        }),
        beta: MatrixFunction::constant("beta", beta()).hermitian(),
        spin: std::array::from_fn(|i| {
            MatrixFunction::constant(format!("S_{}", axis[i]), spin(i)).hermitian()
        }),
    }
}
