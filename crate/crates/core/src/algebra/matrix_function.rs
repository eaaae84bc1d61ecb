use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{Kinematics, Mat4};
use crate::error::{Error, Result};
use crate::numeric::max_abs;

type Evaluator = dyn Fn(&Kinematics) -> Mat4 + Send + Sync;

/// A labelled 4×4 complex-matrix-valued function of the kinematics.
///
/// Optional Hermiticity and unitarity flags are checked on every evaluation,
/// relative to the matrix scale, at [`MatrixFunction::TOLERANCE`].
#[derive(Clone)]
pub struct MatrixFunction {
    label: String,
    eval: Arc<Evaluator>,
    hermitian: bool,
    unitary: bool,
}

impl MatrixFunction {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Kinematics) -> Mat4 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            eval: Arc::new(f),
            hermitian: false,
            unitary: false,
        }
    }

    pub fn constant(label: impl Into<String>, m: Mat4) -> Self {
        Self::new(label, move |_| m)
    }

    pub fn zero() -> Self {
        Self::constant("0", Mat4::zeros())
    }

    pub fn hermitian(mut self) -> Self {
        self.hermitian = true;
        self
    }

    pub fn unitary(mut self) -> Self {
        self.unitary = true;
        self
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Evaluates and checks the declared flags.
    pub fn evaluate(&self, kin: &Kinematics) -> Result<Mat4> {
        let m = self.raw(kin);
        let scale = max_abs(&m).max(1.0);
        if self.hermitian {
            let dev = max_abs(&(m - m.adjoint()));
            if dev > Self::TOLERANCE * scale {
                return Err(self.violation("Hermiticity", dev));
            }
        }
        if self.unitary {
            let dev = max_abs(&(m * m.adjoint() - Mat4::identity()));
            if dev > Self::TOLERANCE * scale {
                return Err(self.violation("unitarity", dev));
            }
        }
        Ok(m)
    }

    /// Evaluates without checks; used inside finite-difference stencils.
    pub fn raw(&self, kin: &Kinematics) -> Mat4 {
        (self.eval)(kin)
    }

    fn violation(&self, property: &'static str, deviation: f64) -> Error {
        Error::PropertyViolated {
            label: self.label.clone(),
            property,
            deviation,
        }
    }

    pub fn add(&self, other: &MatrixFunction) -> MatrixFunction {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let mut out = MatrixFunction::new(format!("({} + {})", self.label, other.label), move |k| {
            a(k) + b(k)
        });
        out.hermitian = self.hermitian && other.hermitian;
        out
    }

    pub fn sub(&self, other: &MatrixFunction) -> MatrixFunction {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let mut out = MatrixFunction::new(format!("({} - {})", self.label, other.label), move |k| {
            a(k) - b(k)
        });
        out.hermitian = self.hermitian && other.hermitian;
        out
    }

    pub fn mul(&self, other: &MatrixFunction) -> MatrixFunction {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        MatrixFunction::new(format!("{}·{}", self.label, other.label), move |k| a(k) * b(k))
    }

    pub fn scale(&self, c: Complex64) -> MatrixFunction {
        let a = self.eval.clone();
        let mut out = MatrixFunction::new(format!("{}·{}", c, self.label), move |k| a(k) * c);
        out.hermitian = self.hermitian && c.im == 0.0;
        out
    }
}

impl fmt::Debug for MatrixFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixFunction")
            .field("label", &self.label)
            .field("hermitian", &self.hermitian)
            .field("unitary", &self.unitary)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::dirac;
    use nalgebra::Vector3;

    #[test]
    fn flags_are_checked_on_evaluation() {
        let kin = Kinematics::at_rest(1.0).unwrap();
        let bad = MatrixFunction::constant("i beta", dirac::beta() * Complex64::i()).hermitian();
        assert!(matches!(
            bad.evaluate(&kin),
            Err(Error::PropertyViolated { property: "Hermiticity", .. })
        ));
        let not_unitary = MatrixFunction::constant("2", Mat4::identity() * Complex64::from(2.0)).unitary();
        assert!(not_unitary.evaluate(&kin).is_err());
    }

    #[test]
    fn algebra_combinators() {
        let kin = Kinematics::new(Vector3::new(0.1, 0.2, 0.3), 1.0).unwrap();
        let c = dirac::dirac_constants();
        let sum = c.alpha[0].add(&c.beta);
        assert!(sum.is_hermitian());
        assert_eq!(sum.evaluate(&kin).unwrap(), dirac::alpha(0) + dirac::beta());
        let prod = c.beta.mul(&c.beta);
        assert_eq!(prod.raw(&kin), Mat4::identity());
        assert!(!c.beta.scale(Complex64::i()).is_hermitian());
    }
}
