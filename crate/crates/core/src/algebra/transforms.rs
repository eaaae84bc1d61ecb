//! Pointwise transformations: plane-wave bispinors, the Foldy-Wouthuysen
//! unitary, energy projectors and Lorentz boosts.

use nalgebra::Vector3;
use num_complex::Complex64;

use super::{dirac, Bispinor, EnergySign, Kinematics, Mat4, PolarizationSpinor, Spinor4};
use crate::error::{Error, Result};

fn real(x: f64) -> Complex64 {
    Complex64::from(x)
}

/// Positive-energy plane-wave bispinor W(p) for rest-frame spin state `w`.
pub fn plane_wave_bispinor(kin: &Kinematics, w: &PolarizationSpinor) -> Bispinor {
    let (e, m) = (kin.energy(), kin.mass());
    let w = w.as_vector();
    let upper = w * real(((e + m) / (2.0 * e)).sqrt());
    // the √(E − m) factor vanishes at p = 0, where p̄ is undefined
    let lower = match kin.direction() {
        Some(dir) => dirac::pauli_dot(dir) * w * real(((e - m) / (2.0 * e)).sqrt()),
        None => nalgebra::Vector2::zeros(),
    };
    Bispinor {
        components: Spinor4::new(upper[0], upper[1], lower[0], lower[1]),
        kinematics: *kin,
        sign: EnergySign::Positive,
    }
}

/// Negative-energy bispinor V(p) = U_FW†(p) (0, w).
pub fn negative_energy_bispinor(kin: &Kinematics, w: &PolarizationSpinor) -> Bispinor {
    let w = w.as_vector();
    let lower = Spinor4::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), w[0], w[1]);
    Bispinor {
        components: fw_unitary(kin).adjoint() * lower,
        kinematics: *kin,
        sign: EnergySign::Negative,
    }
}

/// U_FW = (E + m + βα·p) / √(2E(E + m)).
pub fn fw_unitary(kin: &Kinematics) -> Mat4 {
    let (e, m) = (kin.energy(), kin.mass());
    let norm = (2.0 * e * (e + m)).sqrt();
    (Mat4::identity() * real(e + m) + dirac::beta() * dirac::alpha_dot(kin.momentum())) / real(norm)
}

/// Checked variant of [`fw_unitary`]; E + m = 0 cannot occur for valid kinematics.
pub fn try_fw_unitary(kin: &Kinematics) -> Result<Mat4> {
    if kin.energy() + kin.mass() <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    Ok(fw_unitary(kin))
}

/// Energy projectors (Π⁺, Π⁻) = (1 ± (m/E)β)/2 ± α·p/(2E).
pub fn projectors(kin: &Kinematics) -> (Mat4, Mat4) {
    let (e, m) = (kin.energy(), kin.mass());
    let half = Mat4::identity() * real(0.5);
    let odd = dirac::beta() * real(m / (2.0 * e)) + dirac::alpha_dot(kin.momentum()) * real(0.5 / e);
    (half + odd, half - odd)
}

/// Spinor boost to the rest frame, Λ = (E + m − α·p) / √(2m(E + m)).
///
/// Hermitian and non-unitary; maps W(p) to √(m/E)(w, 0). Equals the spinor part
/// of [`generic_boost`] with v = p/E.
pub fn boost_matrix(kin: &Kinematics) -> Result<Mat4> {
    let (e, m) = (kin.energy(), kin.mass());
    if m <= 0.0 {
        return Err(Error::Massless);
    }
    let norm = (2.0 * m * (e + m)).sqrt();
    Ok((Mat4::identity() * real(e + m) - dirac::alpha_dot(kin.momentum())) / real(norm))
}

/// Result of transforming to a frame moving with velocity v.
#[derive(Debug, Clone, Copy)]
pub struct LorentzBoost {
    pub velocity: Vector3<f64>,
    pub gamma: f64,
    pub rapidity: f64,
    /// Transformed energy γ(E − v·p), kept separately from the mass-shell value.
    pub energy: f64,
    pub kinematics: Kinematics,
    /// Spinor transform exp(−(η/2) α·v̂).
    pub spinor: Mat4,
}

impl LorentzBoost {
    /// Boosts a bispinor and renormalizes it.
    pub fn apply(&self, w: &Bispinor) -> Bispinor {
        let b = self.spinor * w.components;
        let n = b.norm();
        Bispinor {
            components: b / real(n),
            kinematics: self.kinematics,
            sign: w.sign,
        }
    }
}

/// Passive Lorentz transformation to a frame moving with velocity `v`.
pub fn generic_boost(kin: &Kinematics, v: &Vector3<f64>) -> Result<LorentzBoost> {
    let speed = v.norm();
    if !speed.is_finite() || speed >= 1.0 {
        return Err(Error::Superluminal(speed));
    }
    if speed == 0.0 {
        return Ok(LorentzBoost {
            velocity: *v,
            gamma: 1.0,
            rapidity: 0.0,
            energy: kin.energy(),
            kinematics: *kin,
            spinor: Mat4::identity(),
        });
    }
    let gamma = 1.0 / (1.0 - speed * speed).sqrt();
    let rapidity = speed.atanh();
    let n = v / speed;
    let (p, e) = (kin.momentum(), kin.energy());
    let energy = gamma * (e - v.dot(p));
    let p_boost = p + n * ((gamma - 1.0) * p.dot(&n)) - v * (gamma * e);
    let spinor = Mat4::identity() * real((0.5 * rapidity).cosh())
        - dirac::alpha_dot(&n) * real((0.5 * rapidity).sinh());
    Ok(LorentzBoost {
        velocity: *v,
        gamma,
        rapidity,
        energy,
        kinematics: kin.with_momentum(p_boost)?,
        spinor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::max_abs;

    fn kin(p: [f64; 3], m: f64) -> Kinematics {
        Kinematics::new(Vector3::from(p), m).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rest_frame_bispinor() {
        let w = plane_wave_bispinor(&kin([0.0; 3], 1.0), &PolarizationSpinor::up());
        assert_eq!(w.components, Spinor4::new(c(1.0), c(0.0), c(0.0), c(0.0)));
    }

    #[test]
    fn longitudinal_bispinor_values() {
        let k = kin([0.0, 0.0, 3f64.sqrt()], 1.0);
        let w = plane_wave_bispinor(&k, &PolarizationSpinor::up());
        let expected = Spinor4::new(c(3f64.sqrt() / 2.0), c(0.0), c(0.5), c(0.0));
        assert!((w.components - expected).norm() < 1e-15);
        assert!(w.eigen_residual() < 1e-10);
        assert!((w.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_energy_bispinor_properties() {
        let v = negative_energy_bispinor(&kin([0.0; 3], 1.0), &PolarizationSpinor::up());
        assert_eq!(v.components, Spinor4::new(c(0.0), c(0.0), c(1.0), c(0.0)));

        let k = kin([0.0, 0.0, 3f64.sqrt()], 1.0);
        let (_, minus) = projectors(&k);
        for w in [PolarizationSpinor::up(), PolarizationSpinor::down()] {
            let v = negative_energy_bispinor(&k, &w);
            assert!(v.eigen_residual() < 1e-10);
            assert!(((minus * v.components) - v.components).norm() < 1e-12);
            for w2 in [PolarizationSpinor::up(), PolarizationSpinor::down()] {
                let e = plane_wave_bispinor(&k, &w2);
                assert!(e.components.dotc(&v.components).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fw_unitary_examples() {
        assert_eq!(fw_unitary(&kin([0.0; 3], 1.0)), Mat4::identity());
        let k = kin([0.0, 0.0, 3f64.sqrt()], 1.0);
        let fw = fw_unitary(&k) * plane_wave_bispinor(&k, &PolarizationSpinor::up()).components;
        assert!((fw - Spinor4::new(c(1.0), c(0.0), c(0.0), c(0.0))).norm() < 1e-12);
        let u = fw_unitary(&kin([0.0, 0.0, 1.0], 0.0));
        assert!(max_abs(&(u * u.adjoint() - Mat4::identity())) < 1e-12);
    }

    #[test]
    fn projector_examples() {
        let (plus, minus) = projectors(&kin([0.0; 3], 1.0));
        let half = Mat4::identity() * c(0.5);
        assert!(max_abs(&(plus - (half + dirac::beta() * c(0.5)))) < 1e-15);
        assert!(max_abs(&(minus - (half - dirac::beta() * c(0.5)))) < 1e-15);
        let (plus, _) = projectors(&kin([1.0, 0.0, 0.0], 1.0));
        assert!((plus.trace() - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn boost_matrix_examples() {
        assert_eq!(boost_matrix(&kin([0.0; 3], 1.0)).unwrap(), Mat4::identity());
        let k = kin([0.0, 0.0, 3f64.sqrt()], 1.0);
        let l = boost_matrix(&k).unwrap();
        let w = l * plane_wave_bispinor(&k, &PolarizationSpinor::up()).components;
        assert!((w - Spinor4::new(c(0.5f64.sqrt()), c(0.0), c(0.0), c(0.0))).norm() < 1e-12);
        assert!(max_abs(&(l - l.adjoint())) < 1e-12);
        assert!(max_abs(&(l * l.adjoint() - Mat4::identity())) > 0.1);
        assert_eq!(boost_matrix(&kin([1.0, 0.0, 0.0], 0.0)), Err(Error::Massless));
        let rest = generic_boost(&k, &(k.momentum() / k.energy())).unwrap();
        assert!(max_abs(&(rest.spinor - l)) < 1e-12);
        assert!(rest.kinematics.momentum().norm() < 1e-12);
    }

    #[test]
    fn generic_boost_examples() {
        let k = kin([0.2, -0.3, 0.5], 1.0);
        let b = generic_boost(&k, &Vector3::zeros()).unwrap();
        assert_eq!(b.kinematics, k);
        assert_eq!(b.spinor, Mat4::identity());

        let eta: f64 = 0.7;
        let b = generic_boost(&kin([0.0; 3], 1.0), &Vector3::new(0.0, 0.0, eta.tanh())).unwrap();
        assert!((b.kinematics.momentum()[2] + eta.sinh()).abs() < 1e-12);
        assert!((b.energy - eta.cosh()).abs() < 1e-12);
        let p2 = b.kinematics.momentum().norm_squared();
        assert!((b.energy * b.energy - p2 - 1.0).abs() < 1e-12);

        assert!(matches!(
            generic_boost(&k, &Vector3::new(1.0, 0.0, 0.0)),
            Err(Error::Superluminal(_))
        ));
    }

    #[test]
    fn boosted_bispinor_stays_positive_energy() {
        let k = kin([0.4, 0.1, 1.2], 0.7);
        let w = plane_wave_bispinor(&k, &PolarizationSpinor::normalized(c(0.3), Complex64::new(0.1, 0.8)).unwrap());
        let b = generic_boost(&k, &Vector3::new(0.3, -0.2, 0.1)).unwrap();
        let out = b.apply(&w);
        assert!(out.eigen_residual() < 1e-10);
        assert!((out.norm_squared() - 1.0).abs() < 1e-12);
    }
}
