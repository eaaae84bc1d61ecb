//! Projection, FW conjugation, commutators and Heisenberg derivatives.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{ensure_same_rep, matrix_partial, MomentumOperator, Operator, OperatorValue, Representation};
use crate::algebra::{dirac, fw_unitary, projectors, Kinematics, Mat4, MatrixFunction};
use crate::error::{Error, Result};
use crate::numeric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToFw,
    FromFw,
}

/// Directional derivative c·∂ of a matrix function at `kin`.
fn directional(f: &MatrixFunction, kin: &Kinematics, c: &Vector3<Complex64>) -> Mat4 {
    let h = numeric::default_step(kin.momentum());
    let mut acc = Mat4::zeros();
    for (k, ck) in c.iter().enumerate() {
        if *ck != Complex64::new(0.0, 0.0) {
            acc += matrix_partial(f, kin, k, h) * *ck;
        }
    }
    acc
}

/// Π⁺ O Π⁺ + Π⁻ O Π⁻, with the derivative part passed through the
/// p-dependent projectors by the product rule.
pub fn project_operator<O: Operator>(op: &O) -> Result<O> {
    let g = op.to_general();
    if g.representation() != Representation::Standard {
        return Err(Error::Representation(format!(
            "projection of {} requires the standard representation",
            g.label()
        )));
    }
    let inner = g.clone();
    let plus = MatrixFunction::new("Π⁺", |k: &Kinematics| projectors(k).0);
    let matrix = MatrixFunction::new(format!("P[{}]", g.label()), move |k: &Kinematics| {
        let (pp, pm) = projectors(k);
        let m = inner.matrix_part().raw(k);
        let mut out = pp * m * pp + pm * m * pm;
        if inner.has_derivative() {
            let d = directional(&plus, k, &inner.coefficients(k.momentum()));
            out += (pp - pm) * d;
        }
        out
    });
    O::from_general(MomentumOperator::new(
        format!("P[{}]", g.label()),
        Representation::Standard,
        g.coefficient_fields().cloned(),
        matrix,
    ))
}

/// O ↦ U O U† (to FW) or U† O U (from FW), including the connection terms
/// U (c·∂U†) or U† (c·∂U) generated by the derivative part.
pub fn fw_conjugate<O: Operator>(op: &O, direction: Direction) -> Result<O> {
    let g = op.to_general();
    let (from, to) = match direction {
        Direction::ToFw => (Representation::Standard, Representation::Fw),
        Direction::FromFw => (Representation::Fw, Representation::Standard),
    };
    if g.representation() != from {
        return Err(Error::Representation(format!(
            "{:?} expects a {} operator, got {} ({})",
            direction,
            from,
            g.label(),
            g.representation()
        )));
    }
    let inner = g.clone();
    // the factor that is differentiated: U† for to_fw, U for from_fw
    let diffed = match direction {
        Direction::ToFw => MatrixFunction::new("U†", |k: &Kinematics| fw_unitary(k).adjoint()),
        Direction::FromFw => MatrixFunction::new("U", fw_unitary),
    };
    let label = match direction {
        Direction::ToFw => format!("U[{}]U†", g.label()),
        Direction::FromFw => format!("U†[{}]U", g.label()),
    };
    let matrix = MatrixFunction::new(label.clone(), move |k: &Kinematics| {
        let u = fw_unitary(k);
        let (left, right) = match direction {
            Direction::ToFw => (u, u.adjoint()),
            Direction::FromFw => (u.adjoint(), u),
        };
        let mut out = left * inner.matrix_part().raw(k) * right;
        if inner.has_derivative() {
            out += left * directional(&diffed, k, &inner.coefficients(k.momentum()));
        }
        out
    });
    O::from_general(MomentumOperator::new(label, to, g.coefficient_fields().cloned(), matrix))
}

/// [A, B] at `kin` as a first-order operator value. `h` is the relative
/// finite-difference step (scaled by max(1, |p|)).
pub fn commutator<A: Operator, B: Operator>(a: &A, b: &B, kin: &Kinematics, h: f64) -> Result<OperatorValue> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidStep(h));
    }
    let (a, b) = (a.to_general(), b.to_general());
    ensure_same_rep(&a, &b)?;
    let p = kin.momentum();
    let step = h * p.norm().max(1.0);
    let (ca, cb) = (a.coefficients(p), b.coefficients(p));

    let grad_coeffs = |op: &MomentumOperator, dir: &Vector3<Complex64>| -> Vector3<Complex64> {
        let mut out = Vector3::zeros();
        if let Some(fields) = op.coefficient_fields() {
            for (k, dk) in dir.iter().enumerate() {
                if *dk == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (j, f) in fields.iter().enumerate() {
                    out[j] += numeric::partial(&|q: &Vector3<f64>| f(q), p, k, step) * *dk;
                }
            }
        }
        out
    };
    let grad_matrix = |op: &MomentumOperator, dir: &Vector3<Complex64>| -> Mat4 {
        let mut out = Mat4::zeros();
        for (k, dk) in dir.iter().enumerate() {
            if *dk != Complex64::new(0.0, 0.0) {
                out += matrix_partial(op.matrix_part(), kin, k, step) * *dk;
            }
        }
        out
    };

    let (ma, mb) = (a.matrix_part().raw(kin), b.matrix_part().raw(kin));
    Ok(OperatorValue {
        deriv: grad_coeffs(&b, &ca) - grad_coeffs(&a, &cb),
        matrix: grad_matrix(&b, &ca) - grad_matrix(&a, &cb) + ma * mb - mb * ma,
    })
}

/// ∂H/∂p_k: α_k (standard) or βp_k/E (FW).
fn hamiltonian_gradient(rep: Representation, kin: &Kinematics, k: usize) -> Mat4 {
    match rep {
        Representation::Standard => dirac::alpha(k),
        Representation::Fw => dirac::beta() * Complex64::from(kin.momentum()[k] / kin.energy()),
    }
}

/// H in the given representation at `kin`.
pub fn hamiltonian_matrix(rep: Representation, kin: &Kinematics) -> Mat4 {
    match rep {
        Representation::Standard => dirac::hamiltonian(kin.momentum(), kin.mass()),
        Representation::Fw => dirac::beta() * Complex64::from(kin.energy()),
    }
}

/// dO/dt = i[H, O] at `kin`. The derivative part contributes −i c_k ∂_kH.
pub fn heisenberg_velocity<O: Operator>(op: &O, kin: &Kinematics) -> Result<Mat4> {
    let g = op.to_general();
    let rep = g.representation();
    let h = hamiltonian_matrix(rep, kin);
    let m = g.matrix_part().evaluate(kin)?;
    let c = g.coefficients(kin.momentum());
    let mut out = (h * m - m * h) * Complex64::i();
    for (k, ck) in c.iter().enumerate() {
        out -= hamiltonian_gradient(rep, kin, k) * (Complex64::i() * *ck);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PolarizationSpinor;
    use crate::operators::families::*;
    use crate::operators::SpinOperator;
    use crate::numeric::{max_abs, RELATIVE_STEP};

    fn kin(p: [f64; 3], m: f64) -> Kinematics {
        Kinematics::new(Vector3::from(p), m).unwrap()
    }

    #[test]
    fn canonical_pair() {
        let k = kin([0.3, 0.2, -0.1], 1.0);
        let r = canonical_position();
        let p = momentum(Representation::Standard);
        let c = commutator(&r[0], &p[0], &k, RELATIVE_STEP).unwrap();
        assert!(max_abs(&(c.matrix - Mat4::identity() * Complex64::i())) < 1e-10);
        assert!(c.deriv.norm() < 1e-12);
        assert!(commutator(&r[0], &r[1], &k, RELATIVE_STEP).unwrap().norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_step_and_mixed_tags() {
        let k = kin([0.3, 0.2, -0.1], 1.0);
        let r = canonical_position();
        assert_eq!(commutator(&r[0], &r[1], &k, 0.0), Err(Error::InvalidStep(0.0)));
        let fw = canonical_position_in(Representation::Fw);
        assert!(matches!(commutator(&r[0], &fw[1], &k, 1e-5), Err(Error::Representation(_))));
        assert!(matches!(project_operator(&fw[0]), Err(Error::Representation(_))));
        assert!(matches!(fw_conjugate(&r[0], Direction::FromFw), Err(Error::Representation(_))));
    }

    #[test]
    fn velocity_of_canonical_position_is_alpha() {
        let k = kin([0.5, -1.0, 2.0], 1.0);
        for (i, r) in canonical_position().iter().enumerate() {
            assert!(max_abs(&(heisenberg_velocity(r, &k).unwrap() - dirac::alpha(i))) < 1e-15);
        }
    }

    #[test]
    fn velocity_of_projected_position() {
        let k = kin([0.0, 0.0, 3f64.sqrt()], 1.0);
        let r = projected_position(Representation::Standard);
        let v = heisenberg_velocity(&r[2], &k).unwrap();
        let h = dirac::hamiltonian(k.momentum(), 1.0);
        let expected = h.try_inverse().unwrap() * Complex64::from(3f64.sqrt());
        assert!(max_abs(&(v - expected)) < 1e-12);
        let w = crate::algebra::plane_wave_bispinor(&k, &PolarizationSpinor::up()).components;
        assert!(((w.adjoint() * v * w)[(0, 0)].re - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn spin_is_not_conserved() {
        let k = kin([1.0, 0.0, 0.0], 1.0);
        let s = canonical_spin_in(Representation::Standard);
        assert!(max_abs(&heisenberg_velocity(&s[2], &k).unwrap()) > 0.1);
    }

    #[test]
    fn projection_examples() {
        let k = kin([0.4, -0.3, 0.9], 0.8);
        for p in momentum(Representation::Standard) {
            let pp = project_operator(&p).unwrap();
            assert!(pp.evaluate(&k).unwrap().deviation(&p.evaluate(&k).unwrap()) < 1e-10);
        }
        let j = canonical_spin_oam_total().total;
        let pj = project_operator(&j[2]).unwrap();
        assert!(pj.evaluate(&k).unwrap().deviation(&j[2].evaluate(&k).unwrap()) < 1e-10);
        let s = canonical_spin_in(Representation::Standard);
        let ps: SpinOperator = project_operator(&s[2]).unwrap();
        let closed = projected_spin(Representation::Standard);
        assert!(max_abs(&(ps.evaluate(&k).unwrap() - closed[2].evaluate(&k).unwrap())) < 1e-10);
    }

    #[test]
    fn fw_hamiltonian() {
        let k = kin([0.4, -0.3, 0.9], 0.8);
        let h = hamiltonian_operator(Representation::Standard);
        let hfw = fw_conjugate(&h, Direction::ToFw).unwrap();
        let expected = dirac::beta() * Complex64::from(k.energy());
        assert!(max_abs(&(hfw.evaluate(&k).unwrap() - expected)) < 1e-12);
        assert_eq!(hfw.representation(), Representation::Fw);
    }

    #[test]
    fn conjugating_canonical_position_gives_nwfw_position() {
        let k = kin([0.4, -0.3, 0.9], 0.8);
        let r = canonical_position_in(Representation::Fw);
        let closed = nwfw_position(Representation::Standard);
        for i in 0..3 {
            let rt = fw_conjugate(&r[i], Direction::FromFw).unwrap();
            let dev = rt.evaluate(&k).unwrap().deviation(&closed[i].evaluate(&k).unwrap());
            assert!(dev < 1e-8, "{dev}");
        }
    }
}
