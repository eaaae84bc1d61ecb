//! Berry connection and curvature, the Pauli-Lubanski vector and the
//! center-of-energy operator.

use num_complex::Complex64;

use super::calculus::commutator;
use super::families::projected_position;
use super::operator::{matrix_partial, MomentumOperator, OperatorValue, Representation};
use crate::algebra::{dirac, Kinematics, Mat4, MatrixFunction};
use crate::error::Result;
use crate::numeric::{self, RELATIVE_STEP};

fn connection_function(i: usize) -> MatrixFunction {
    projected_position(Representation::Fw)[i].matrix_part().clone()
}

/// A(p): the matrix part of the FW projected position.
pub fn berry_connection(kin: &Kinematics) -> [Mat4; 3] {
    std::array::from_fn(|i| connection_function(i).raw(kin))
}

/// F_k = ε_kij ∂_iA_j − (i/2) ε_kij [A_i, A_j], by finite differences of A.
pub fn berry_curvature(kin: &Kinematics) -> [Mat4; 3] {
    let h = numeric::default_step(kin.momentum());
    let funcs: [MatrixFunction; 3] = std::array::from_fn(connection_function);
    let a = berry_connection(kin);
    std::array::from_fn(|k| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let curl = matrix_partial(&funcs[j], kin, i, h) - matrix_partial(&funcs[i], kin, j, h);
        curl - (a[i] * a[j] - a[j] * a[i]) * Complex64::i()
    })
}

/// F_k = −(i/2) ε_kij [𝓡_i, 𝓡_j] from the numeric commutator of the FW
/// projected position.
pub fn berry_curvature_from_commutator(kin: &Kinematics) -> Result<[Mat4; 3]> {
    curvature_of(&projected_position(Representation::Fw), kin)
}

/// −(i/2) ε_kij [X_i, X_j] for any position-like triple.
pub fn curvature_of(pos: &[MomentumOperator; 3], kin: &Kinematics) -> Result<[Mat4; 3]> {
    let mut out = [Mat4::zeros(); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let c = commutator(&pos[i], &pos[j], kin, RELATIVE_STEP)?;
        *slot = c.matrix * Complex64::new(0.0, -1.0);
    }
    Ok(out)
}

/// Pauli-Lubanski four-vector W⁰ = p·S, 𝓦 = (SH + HS)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliLubanski {
    pub w0: Mat4,
    pub w: [Mat4; 3],
}

impl PauliLubanski {
    /// W⁰² − 𝓦·𝓦.
    pub fn invariant(&self) -> Mat4 {
        self.w0 * self.w0 - self.w.iter().fold(Mat4::zeros(), |acc, x| acc + x * x)
    }
}

pub fn pauli_lubanski(kin: &Kinematics) -> PauliLubanski {
    let h = dirac::hamiltonian(kin.momentum(), kin.mass());
    PauliLubanski {
        w0: dirac::spin_dot(kin.momentum()),
        w: std::array::from_fn(|i| {
            let s = dirac::spin(i);
            (s * h + h * s) * Complex64::from(0.5)
        }),
    }
}

/// N_i = ½(r_i H + H r_i) = H ∘ i∂_i + (i/2)α_i. Its derivative
/// coefficient is the matrix H(p), so it is kept apart from
/// [`MomentumOperator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterOfEnergy {
    /// Matrix coefficient of i∂/∂p_i (identical for all i).
    pub derivative_matrix: Mat4,
    pub matrix: [Mat4; 3],
}

pub fn center_of_energy(kin: &Kinematics) -> CenterOfEnergy {
    CenterOfEnergy {
        derivative_matrix: dirac::hamiltonian(kin.momentum(), kin.mass()),
        matrix: std::array::from_fn(|i| dirac::alpha(i) * Complex64::new(0.0, 0.5)),
    }
}

/// Pryce's q = ½(H⁻¹N + NH⁻¹), expanded as
/// r_i + ½(H⁻¹M_i + M_iH⁻¹) + (i/2) H ∂_i(H⁻¹) with ∂ by finite differences.
pub fn pryce_position() -> [MomentumOperator; 3] {
    let inverse = MatrixFunction::new("H⁻¹", |k: &Kinematics| {
        dirac::hamiltonian(k.momentum(), k.mass()) * Complex64::from(1.0 / (k.energy() * k.energy()))
    });
    let axes = ["x", "y", "z"];
    std::array::from_fn(|i| {
        let inverse = inverse.clone();
        let label = format!("q_{}", axes[i]);
        let m = MatrixFunction::new(label.clone(), move |k: &Kinematics| {
            let n = center_of_energy(k);
            let hinv = inverse.raw(k);
            let h = numeric::default_step(k.momentum());
            let sym = (hinv * n.matrix[i] + n.matrix[i] * hinv) * Complex64::from(0.5);
            sym + n.derivative_matrix * matrix_partial(&inverse, k, i, h) * Complex64::new(0.0, 0.5)
        });
        MomentumOperator::position_like(label, Representation::Standard, i, m)
    })
}

/// Value of q_i at `kin`.
pub fn pryce_value(kin: &Kinematics, i: usize) -> Result<OperatorValue> {
    pryce_position()[i].evaluate(kin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{plane_wave_bispinor, projectors, PolarizationSpinor};
    use crate::numeric::max_abs;
    use nalgebra::Vector3;

    fn kin(p: [f64; 3], m: f64) -> Kinematics {
        Kinematics::new(Vector3::from(p), m).unwrap()
    }

    #[test]
    fn connection_vanishes_at_rest_and_curvature_is_minus_spin() {
        let k = kin([0.0; 3], 1.0);
        assert!(berry_connection(&k).iter().all(|a| max_abs(a) == 0.0));
        let f = berry_curvature(&k);
        let (plus, _) = projectors(&k);
        for i in 0..3 {
            let target = -(plus * dirac::spin(i) * plus);
            assert!(max_abs(&(plus * f[i] * plus - target)) < 1e-6);
        }
    }

    #[test]
    fn curvature_expectation_on_longitudinal_state() {
        let k = kin([0.0, 0.0, 3f64.sqrt()], 1.0);
        let u = crate::algebra::fw_unitary(&k);
        let w = u * plane_wave_bispinor(&k, &PolarizationSpinor::up()).components;
        let f = berry_curvature(&k);
        assert!(((w.adjoint() * f[2] * w)[(0, 0)].re + 0.125).abs() < 1e-8);
    }

    #[test]
    fn curvature_routes_agree() {
        let k = kin([0.3, -0.8, 1.4], 0.6);
        let a = berry_curvature(&k);
        let b = berry_curvature_from_commutator(&k).unwrap();
        for i in 0..3 {
            assert!(max_abs(&(a[i] - b[i])) < 1e-6);
        }
    }

    #[test]
    fn pauli_lubanski_examples() {
        let k = kin([0.0; 3], 1.0);
        let pl = pauli_lubanski(&k);
        for i in 0..3 {
            assert!(max_abs(&(pl.w[i] - dirac::beta() * dirac::spin(i))) < 1e-15);
        }
        let k = kin([0.0, 0.0, 3f64.sqrt()], 1.0);
        let pl = pauli_lubanski(&k);
        let w = plane_wave_bispinor(&k, &PolarizationSpinor::up()).components;
        assert!(((w.adjoint() * pl.w0 * w)[(0, 0)].re - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(((w.adjoint() * pl.invariant() * w)[(0, 0)].re + 0.75).abs() < 1e-10);
    }

    #[test]
    fn center_of_energy_at_rest() {
        let n = center_of_energy(&kin([0.0; 3], 1.0));
        assert_eq!(n.matrix[0], dirac::alpha(0) * Complex64::new(0.0, 0.5));
    }

    #[test]
    fn pryce_q_equals_projected_position() {
        let k = kin([0.7, 0.2, -1.1], 1.3);
        let closed = projected_position(Representation::Standard);
        for i in 0..3 {
            let dev = pryce_value(&k, i).unwrap().deviation(&closed[i].evaluate(&k).unwrap());
            assert!(dev < 1e-8, "{dev}");
        }
    }
}
