use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{dirac, Spinor4};
use crate::error::{Error, Result};

/// On-shell kinematics of a free particle (ħ = c = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    p: Vector3<f64>,
    m: f64,
    e: f64,
    direction: Option<Vector3<f64>>,
}

impl Kinematics {
    pub fn new(p: Vector3<f64>, m: f64) -> Result<Self> {
        if !m.is_finite() || p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("momentum or mass"));
        }
        let e = energy(&p, m)?;
        let norm = p.norm();
        let direction = (norm > 0.0).then(|| p / norm);
        Ok(Self { p, m, e, direction })
    }

    pub fn at_rest(m: f64) -> Result<Self> {
        Self::new(Vector3::zeros(), m)
    }

    pub fn momentum(&self) -> &Vector3<f64> {
        &self.p
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn energy(&self) -> f64 {
        self.e
    }

    /// Unit momentum direction, `None` at p = 0.
    pub fn direction(&self) -> Option<&Vector3<f64>> {
        self.direction.as_ref()
    }

    /// Same mass, different momentum.
    pub fn with_momentum(&self, p: Vector3<f64>) -> Result<Self> {
        Self::new(p, self.m)
    }
}

/// E = √(m² + |p|²), rejecting negative mass and the massless particle at rest.
pub fn energy(p: &Vector3<f64>, m: f64) -> Result<f64> {
    if m < 0.0 {
        return Err(Error::NegativeMass(m));
    }
    let e = (m * m + p.norm_squared()).sqrt();
    if e == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    Ok(e)
}

/// Normalized two-component spin state w.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct PolarizationSpinor(Vector2<Complex64>);

impl PolarizationSpinor {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self(Vector2::new(a, b)))
    }

    /// Normalizes an arbitrary nonzero pair.
    pub fn normalized(a: Complex64, b: Complex64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Ok(Self(Vector2::new(a / n, b / n)))
    }

    /// w⁺ = (1, 0), s_z = +1/2.
    pub fn up() -> Self {
        Self(Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)))
    }

    /// w⁻ = (0, 1), s_z = −1/2.
    pub fn down() -> Self {
        Self(Vector2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)))
    }

    pub fn as_vector(&self) -> &Vector2<Complex64> {
        &self.0
    }

    /// Rest-frame spin ⟨s⟩ = w†σw/2.
    pub fn rest_spin(&self) -> Vector3<f64> {
        Vector3::from_fn(|i, _| 0.5 * (self.0.adjoint() * dirac::pauli(i) * self.0)[(0, 0)].re)
    }
}

impl TryFrom<[f64; 4]> for PolarizationSpinor {
    type Error = Error;

    fn try_from(v: [f64; 4]) -> Result<Self> {
        Self::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
    }
}

impl From<PolarizationSpinor> for [f64; 4] {
    fn from(w: PolarizationSpinor) -> Self {
        [w.0[0].re, w.0[0].im, w.0[1].re, w.0[1].im]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn factor(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }
}

/// Plane-wave amplitude with its kinematics and energy branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bispinor {
    pub components: Spinor4,
    pub kinematics: Kinematics,
    pub sign: EnergySign,
}

impl Bispinor {
    pub fn norm_squared(&self) -> f64 {
        self.components.norm_squared()
    }

    /// ‖H W ∓ E W‖.
    pub fn eigen_residual(&self) -> f64 {
        let k = &self.kinematics;
        let h = dirac::hamiltonian(k.momentum(), k.mass());
        let target = self.components * Complex64::from(self.sign.factor() * k.energy());
        (h * self.components - target).norm()
    }
}
