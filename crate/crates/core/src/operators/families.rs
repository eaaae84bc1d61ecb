//! Canonical, projected and NWFW operator families in closed form.

use nalgebra::Vector3;
use num_complex::Complex64;

use super::operator::{add_triples, cross_with_momentum, MomentumOperator, Representation, SpinOperator};
use crate::algebra::{dirac, Kinematics, Mat4, MatrixFunction};

const AXES: [&str; 3] = ["x", "y", "z"];

fn c(x: f64) -> Complex64 {
    Complex64::from(x)
}

/// (p × S)_i
fn p_cross_s(p: &Vector3<f64>, i: usize) -> Mat4 {
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    dirac::spin(k) * c(p[j]) - dirac::spin(j) * c(p[k])
}

/// (α × p)_i
fn alpha_cross_p(p: &Vector3<f64>, i: usize) -> Mat4 {
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    dirac::alpha(j) * c(p[k]) - dirac::alpha(k) * c(p[j])
}

fn position_triple(
    name: &str,
    rep: Representation,
    f: impl Fn(&Kinematics, usize) -> Mat4 + Send + Sync + Clone + 'static,
) -> [MomentumOperator; 3] {
    std::array::from_fn(|i| {
        let f = f.clone();
        let label = format!("{name}_{}", AXES[i]);
        let m = MatrixFunction::new(label.clone(), move |k: &Kinematics| f(k, i)).hermitian();
        MomentumOperator::position_like(label, rep, i, m)
    })
}

fn spin_triple(
    name: &str,
    rep: Representation,
    f: impl Fn(&Kinematics, usize) -> Mat4 + Send + Sync + Clone + 'static,
) -> [SpinOperator; 3] {
    std::array::from_fn(|i| {
        let f = f.clone();
        let label = format!("{name}_{}", AXES[i]);
        SpinOperator::new(label.clone(), rep, MatrixFunction::new(label, move |k: &Kinematics| f(k, i)).hermitian())
    })
}

fn general(s: &[SpinOperator; 3]) -> [MomentumOperator; 3] {
    std::array::from_fn(|i| s[i].clone().into())
}

/// r_i = i ∂/∂p_i in the given representation.
pub fn canonical_position_in(rep: Representation) -> [MomentumOperator; 3] {
    position_triple("r", rep, |_, _| Mat4::zeros())
}

/// Canonical position r in the standard representation.
pub fn canonical_position() -> [MomentumOperator; 3] {
    canonical_position_in(Representation::Standard)
}

pub fn canonical_spin_in(rep: Representation) -> [SpinOperator; 3] {
    spin_triple("S", rep, |_, i| dirac::spin(i))
}

/// Multiplication by p_i.
pub fn momentum(rep: Representation) -> [MomentumOperator; 3] {
    std::array::from_fn(|i| MomentumOperator::momentum_component(rep, i))
}

/// The free Hamiltonian: α·p + βm (standard) or βE (FW).
pub fn hamiltonian_operator(rep: Representation) -> SpinOperator {
    let f = match rep {
        Representation::Standard => {
            MatrixFunction::new("H", |k: &Kinematics| dirac::hamiltonian(k.momentum(), k.mass()))
        }
        Representation::Fw => MatrixFunction::new("H_FW", |k: &Kinematics| dirac::beta() * c(k.energy())),
    };
    SpinOperator::new(f.label().to_string(), rep, f.hermitian())
}

/// Canonical S, L = r × p and J = L + S.
#[derive(Debug, Clone)]
pub struct AngularMomentum {
    pub spin: [SpinOperator; 3],
    pub orbital: [MomentumOperator; 3],
    pub total: [MomentumOperator; 3],
}

pub fn canonical_spin_oam_total_in(rep: Representation) -> AngularMomentum {
    let spin = canonical_spin_in(rep);
    let orbital = cross_with_momentum(&canonical_position_in(rep), "L").expect("uniform representation");
    let total = add_triples(&orbital, &general(&spin))
        .expect("uniform representation")
        .map(|op| {
            let axis = op.label().chars().nth(2).unwrap_or('?');
            op.relabel(format!("J_{axis}"))
        });
    AngularMomentum { spin, orbital, total }
}

pub fn canonical_spin_oam_total() -> AngularMomentum {
    canonical_spin_oam_total_in(Representation::Standard)
}

/// 𝓡 = r + p×S/E² + imβα/(2E²) (standard) or r + p×S/(E(E+m)) (FW).
pub fn projected_position(rep: Representation) -> [MomentumOperator; 3] {
    match rep {
        Representation::Standard => position_triple("R", rep, |k, i| {
            let (p, e, m) = (k.momentum(), k.energy(), k.mass());
            p_cross_s(p, i) * c(1.0 / (e * e)) + dirac::beta() * dirac::alpha(i) * Complex64::new(0.0, m / (2.0 * e * e))
        }),
        Representation::Fw => position_triple("R_FW", rep, |k, i| {
            let (p, e, m) = (k.momentum(), k.energy(), k.mass());
            p_cross_s(p, i) * c(1.0 / (e * (e + m)))
        }),
    }
}

/// 𝓢 = (m²/E²)S + (p·S)p/E² − imβ(α×p)/(2E²) (standard) or
/// (m/E)S + (p·S)p/(E(E+m)) (FW).
pub fn projected_spin(rep: Representation) -> [SpinOperator; 3] {
    match rep {
        Representation::Standard => spin_triple("𝓢", rep, |k, i| {
            let (p, e, m) = (k.momentum(), k.energy(), k.mass());
            let e2 = e * e;
            dirac::spin(i) * c(m * m / e2) + dirac::spin_dot(p) * c(p[i] / e2)
                - dirac::beta() * alpha_cross_p(p, i) * Complex64::new(0.0, m / (2.0 * e2))
        }),
        Representation::Fw => spin_triple("𝓢_FW", rep, |k, i| {
            let (p, e, m) = (k.momentum(), k.energy(), k.mass());
            dirac::spin(i) * c(m / e) + dirac::spin_dot(p) * c(p[i] / (e * (e + m)))
        }),
    }
}

/// 𝓛 = 𝓡 × p.
pub fn projected_oam(rep: Representation) -> [MomentumOperator; 3] {
    let name = if rep == Representation::Fw { "𝓛_FW" } else { "𝓛" };
    cross_with_momentum(&projected_position(rep), name).expect("uniform representation")
}

/// r̃: canonical r in the FW representation, otherwise
/// r + p×S/(E(E+m)) + iβα/(2E) − iβ(α·p)p/(2E²(E+m)).
pub fn nwfw_position(rep: Representation) -> [MomentumOperator; 3] {
    match rep {
        Representation::Fw => position_triple("r~_FW", rep, |_, _| Mat4::zeros()),
        Representation::Standard => position_triple("r~", rep, |k, i| {
            let (p, e, m) = (k.momentum(), k.energy(), k.mass());
            let b = dirac::beta();
            p_cross_s(p, i) * c(1.0 / (e * (e + m))) + b * dirac::alpha(i) * Complex64::new(0.0, 0.5 / e)
                - b * dirac::alpha_dot(p) * Complex64::new(0.0, p[i] / (2.0 * e * e * (e + m)))
        }),
    }
}

/// S̃: canonical S in the FW representation, otherwise
/// (m/E)S + (p·S)p/(E(E+m)) − iβ(α×p)/(2E).
pub fn nwfw_spin(rep: Representation) -> [SpinOperator; 3] {
    match rep {
        Representation::Fw => spin_triple("S~_FW", rep, |_, i| dirac::spin(i)),
        Representation::Standard => spin_triple("S~", rep, |k, i| {
            let (p, e, m) = (k.momentum(), k.energy(), k.mass());
            dirac::spin(i) * c(m / e) + dirac::spin_dot(p) * c(p[i] / (e * (e + m)))
                - dirac::beta() * alpha_cross_p(p, i) * Complex64::new(0.0, 0.5 / e)
        }),
    }
}

/// L̃ = r̃ × p.
pub fn nwfw_oam(rep: Representation) -> [MomentumOperator; 3] {
    let name = if rep == Representation::Fw { "L~_FW" } else { "L~" };
    cross_with_momentum(&nwfw_position(rep), name).expect("uniform representation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::max_abs;

    fn kin(p: [f64; 3], m: f64) -> Kinematics {
        Kinematics::new(Vector3::from(p), m).unwrap()
    }

    #[test]
    fn rest_frame_forms() {
        let k = kin([0.0; 3], 1.0);
        let r = projected_position(Representation::Standard);
        let expected = dirac::beta() * dirac::alpha(0) * Complex64::new(0.0, 0.5);
        assert!(max_abs(&(r[0].evaluate(&k).unwrap().matrix - expected)) < 1e-15);
        let rfw = projected_position(Representation::Fw);
        assert_eq!(rfw[0].evaluate(&k).unwrap().matrix, Mat4::zeros());
        let s = projected_spin(Representation::Standard);
        for (i, op) in s.iter().enumerate() {
            assert!(max_abs(&(op.evaluate(&k).unwrap() - dirac::spin(i))) < 1e-15);
        }
        let rt = nwfw_position(Representation::Standard);
        assert!(max_abs(&(rt[0].evaluate(&k).unwrap().matrix - expected)) < 1e-15);
    }

    #[test]
    fn longitudinal_fw_spin_is_unchanged() {
        let k = kin([0.0, 0.0, 3f64.sqrt()], 1.0);
        let s = projected_spin(Representation::Fw);
        assert!(max_abs(&(s[2].evaluate(&k).unwrap() - dirac::spin(2))) < 1e-14);
    }

    #[test]
    fn orbital_angular_momentum_coefficients() {
        let am = canonical_spin_oam_total();
        let p = Vector3::new(0.3, -0.4, 0.5);
        let cz = am.orbital[2].coefficients(&p);
        assert!((cz[0] - Complex64::new(0.0, p[1])).norm() < 1e-15);
        assert!((cz[1] - Complex64::new(0.0, -p[0])).norm() < 1e-15);
        assert_eq!(cz[2], Complex64::new(0.0, 0.0));
        assert_eq!(am.total[2].label(), "J_z");
        let v = am.orbital[2].evaluate(&kin([0.3, -0.4, 0.5], 1.0)).unwrap();
        assert_eq!(v.matrix, Mat4::zeros());
    }

    #[test]
    fn closed_forms_are_hermitian() {
        let k = kin([0.3, -1.2, 2.5], 0.7);
        for rep in [Representation::Standard, Representation::Fw] {
            for op in projected_position(rep).iter().chain(&nwfw_position(rep)).chain(&projected_oam(rep)) {
                assert!(op.hermiticity_defect(&k).unwrap() < 1e-9, "{}", op.label());
            }
            for op in projected_spin(rep).iter().chain(&nwfw_spin(rep)) {
                op.evaluate(&k).unwrap();
            }
        }
    }
}
