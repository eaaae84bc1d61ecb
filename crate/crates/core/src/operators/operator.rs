use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{dirac, Kinematics, Mat4, MatrixFunction};
use crate::error::{Error, Result};
use crate::numeric::{self, max_abs};

/// Frame in which an operator acts on momentum-space wavefunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Standard,
    Fw,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::Standard => write!(f, "standard"),
            Representation::Fw => write!(f, "FW"),
        }
    }
}

/// Scalar coefficient field c(p) multiplying ∂/∂p_k (times the identity).
pub type ScalarField = Arc<dyn Fn(&Vector3<f64>) -> Complex64 + Send + Sync>;

pub fn constant_field(c: Complex64) -> ScalarField {
    Arc::new(move |_| c)
}

/// First-order differential operator Σ_k c_k(p) ∂/∂p_k + M(p) on four-component
/// momentum-space wavefunctions. The c_k are scalar multiples of the identity.
#[derive(Clone)]
pub struct MomentumOperator {
    label: String,
    rep: Representation,
    coeffs: Option<[ScalarField; 3]>,
    matrix: MatrixFunction,
}

/// Purely multiplicative operator (spin-like, Hamiltonian-like).
#[derive(Clone, Debug)]
pub struct SpinOperator {
    label: String,
    rep: Representation,
    matrix: MatrixFunction,
}

/// A first-order operator frozen at one momentum: derivative coefficients and
/// matrix part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorValue {
    pub deriv: Vector3<Complex64>,
    pub matrix: Mat4,
}

impl OperatorValue {
    pub fn multiplicative(matrix: Mat4) -> Self {
        Self {
            deriv: Vector3::zeros(),
            matrix,
        }
    }

    /// Max-abs difference over derivative coefficients and matrix entries.
    pub fn deviation(&self, other: &OperatorValue) -> f64 {
        let d = (self.deriv - other.deriv).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        d.max(max_abs(&(self.matrix - other.matrix)))
    }

    pub fn norm(&self) -> f64 {
        self.deviation(&OperatorValue::multiplicative(Mat4::zeros()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            deriv: self.deriv * c,
            matrix: self.matrix * c,
        }
    }
}

impl std::ops::Add for OperatorValue {
    type Output = OperatorValue;
    fn add(self, rhs: Self) -> Self {
        Self {
            deriv: self.deriv + rhs.deriv,
            matrix: self.matrix + rhs.matrix,
        }
    }
}

impl std::ops::Sub for OperatorValue {
    type Output = OperatorValue;
    fn sub(self, rhs: Self) -> Self {
        Self {
            deriv: self.deriv - rhs.deriv,
            matrix: self.matrix - rhs.matrix,
        }
    }
}

/// Evaluates a matrix function at shifted momentum with the same mass.
/// Invalid shifts (massless particle displaced onto p = 0) yield NaN entries.
pub(crate) fn eval_shifted(f: &MatrixFunction, kin: &Kinematics, q: &Vector3<f64>) -> Mat4 {
    match kin.with_momentum(*q) {
        Ok(k) => f.raw(&k),
        Err(_) => Mat4::from_element(Complex64::new(f64::NAN, f64::NAN)),
    }
}

/// ∂M/∂p_axis by Richardson-extrapolated central differences.
pub(crate) fn matrix_partial(f: &MatrixFunction, kin: &Kinematics, axis: usize, h: f64) -> Mat4 {
    numeric::partial(&|q: &Vector3<f64>| eval_shifted(f, kin, q), kin.momentum(), axis, h)
}

impl MomentumOperator {
    pub fn new(
        label: impl Into<String>,
        rep: Representation,
        coeffs: Option<[ScalarField; 3]>,
        matrix: MatrixFunction,
    ) -> Self {
        Self {
            label: label.into(),
            rep,
            coeffs,
            matrix,
        }
    }

    /// r_axis + M(p): derivative part i ∂/∂p_axis.
    pub fn position_like(label: impl Into<String>, rep: Representation, axis: usize, matrix: MatrixFunction) -> Self {
        let coeffs = std::array::from_fn(|k| {
            constant_field(if k == axis { Complex64::i() } else { Complex64::new(0.0, 0.0) })
        });
        Self::new(label, rep, Some(coeffs), matrix)
    }

    /// Multiplication by p_axis.
    pub fn momentum_component(rep: Representation, axis: usize) -> Self {
        let f = MatrixFunction::new(format!("p_{axis}"), move |k: &Kinematics| {
            Mat4::identity() * Complex64::from(k.momentum()[axis])
        })
        .hermitian();
        Self::new(format!("p_{axis}"), rep, None, f)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn matrix_part(&self) -> &MatrixFunction {
        &self.matrix
    }

    pub fn has_derivative(&self) -> bool {
        self.coeffs.is_some()
    }

    pub fn coefficient_fields(&self) -> Option<&[ScalarField; 3]> {
        self.coeffs.as_ref()
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn retag(mut self, rep: Representation) -> Self {
        self.rep = rep;
        self
    }

    /// Derivative coefficients c_k(p).
    pub fn coefficients(&self, p: &Vector3<f64>) -> Vector3<Complex64> {
        match &self.coeffs {
            Some(c) => Vector3::new(c[0](p), c[1](p), c[2](p)),
            None => Vector3::zeros(),
        }
    }

    pub fn evaluate(&self, kin: &Kinematics) -> Result<OperatorValue> {
        Ok(OperatorValue {
            deriv: self.coefficients(kin.momentum()),
            matrix: self.matrix.evaluate(kin)?,
        })
    }

    fn combine(&self, other: &MomentumOperator, sign: f64, op: &str) -> Result<MomentumOperator> {
        ensure_same_rep(self, other)?;
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (None, None) => None,
            (a, b) => {
                let (a, b) = (a.clone(), b.clone());
                Some(std::array::from_fn(|k| {
                    let (a, b) = (a.clone(), b.clone());
                    let f: ScalarField = Arc::new(move |p: &Vector3<f64>| {
                        let av = a.as_ref().map_or(Complex64::new(0.0, 0.0), |c| c[k](p));
                        let bv = b.as_ref().map_or(Complex64::new(0.0, 0.0), |c| c[k](p));
                        av + bv * sign
                    });
                    f
                }))
            }
        };
        let matrix = if sign > 0.0 { self.matrix.add(&other.matrix) } else { self.matrix.sub(&other.matrix) };
        Ok(MomentumOperator::new(
            format!("{} {op} {}", self.label, other.label),
            self.rep,
            coeffs,
            matrix,
        ))
    }

    pub fn add(&self, other: &MomentumOperator) -> Result<MomentumOperator> {
        self.combine(other, 1.0, "+")
    }

    pub fn sub(&self, other: &MomentumOperator) -> Result<MomentumOperator> {
        self.combine(other, -1.0, "-")
    }

    /// Deviation from Hermiticity at `kin`: real parts of the coefficients,
    /// divergence of the coefficient field and anti-Hermitian matrix part.
    pub fn hermiticity_defect(&self, kin: &Kinematics) -> Result<f64> {
        let p = kin.momentum();
        let c = self.coefficients(p);
        let mut defect = c.iter().fold(0.0f64, |a, z| a.max(z.re.abs()));
        if let Some(fields) = &self.coeffs {
            let h = numeric::default_step(p);
            let div: Complex64 = (0..3).map(|k| numeric::partial(&|q: &Vector3<f64>| fields[k](q), p, k, h)).sum();
            defect = defect.max(div.norm());
        }
        let m = self.matrix.raw(kin);
        Ok(defect.max(max_abs(&(m - m.adjoint()))))
    }
}

impl fmt::Debug for MomentumOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentumOperator")
            .field("label", &self.label)
            .field("rep", &self.rep)
            .field("derivative", &self.coeffs.is_some())
            .field("matrix", &self.matrix)
            .finish()
    }
}

impl SpinOperator {
    pub fn new(label: impl Into<String>, rep: Representation, matrix: MatrixFunction) -> Self {
        Self {
            label: label.into(),
            rep,
            matrix,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn matrix_part(&self) -> &MatrixFunction {
        &self.matrix
    }

    pub fn evaluate(&self, kin: &Kinematics) -> Result<Mat4> {
        self.matrix.evaluate(kin)
    }
}

/// Common view of both operator kinds as first-order operators.
pub trait Operator: Sized + Clone {
    fn to_general(&self) -> MomentumOperator;
    fn from_general(op: MomentumOperator) -> Result<Self>;
}

impl Operator for MomentumOperator {
    fn to_general(&self) -> MomentumOperator {
        self.clone()
    }

    fn from_general(op: MomentumOperator) -> Result<Self> {
        Ok(op)
    }
}

impl Operator for SpinOperator {
    fn to_general(&self) -> MomentumOperator {
        MomentumOperator::new(self.label.clone(), self.rep, None, self.matrix.clone())
    }

    fn from_general(op: MomentumOperator) -> Result<Self> {
        if op.has_derivative() {
            return Err(Error::Precondition(format!(
                "{} has a derivative part and is not a spin operator",
                op.label
            )));
        }
        Ok(SpinOperator::new(op.label, op.rep, op.matrix))
    }
}

impl From<SpinOperator> for MomentumOperator {
    fn from(s: SpinOperator) -> Self {
        s.to_general()
    }
}

pub(crate) fn ensure_same_rep(a: &MomentumOperator, b: &MomentumOperator) -> Result<()> {
    if a.rep != b.rep {
        return Err(Error::Representation(format!(
            "cannot combine {} ({}) with {} ({})",
            a.label, a.rep, b.label, b.rep
        )));
    }
    Ok(())
}

/// Cross product with momentum, (X × p)_i = ε_ijk X_j ∘ p_k, expanded into
/// first-order form. The ordering term ε_ijk c^(j)_k is kept explicitly.
pub fn cross_with_momentum(pos: &[MomentumOperator; 3], label: &str) -> Result<[MomentumOperator; 3]> {
    ensure_same_rep(&pos[0], &pos[1])?;
    ensure_same_rep(&pos[0], &pos[2])?;
    let rep = pos[0].rep;
    let any_deriv = pos.iter().any(|x| x.has_derivative());
    let axis = ["x", "y", "z"];
    Ok(std::array::from_fn(|i| {
        let fields: [Option<[ScalarField; 3]>; 3] = std::array::from_fn(|j| pos[j].coeffs.clone());
        let coeffs = any_deriv.then(|| {
            std::array::from_fn(|l| {
                let fields = fields.clone();
                let f: ScalarField = Arc::new(move |p: &Vector3<f64>| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..3 {
                        for k in 0..3 {
                            let e = dirac::levi_civita(i, j, k);
                            if e != 0.0 {
                                if let Some(c) = &fields[j] {
                                    acc += c[l](p) * (e * p[k]);
                                }
                            }
                        }
                    }
                    acc
                });
                f
            })
        });
        let mats: [MatrixFunction; 3] = std::array::from_fn(|j| pos[j].matrix.clone());
        let hermitian = mats.iter().all(|m| m.is_hermitian());
        let mut matrix = MatrixFunction::new(format!("{label}_{} matrix", axis[i]), move |kin: &Kinematics| {
            let p = kin.momentum();
            let mut acc = Mat4::zeros();
            for j in 0..3 {
                for k in 0..3 {
                    let e = dirac::levi_civita(i, j, k);
                    if e != 0.0 {
                        acc += mats[j].raw(kin) * Complex64::from(e * p[k]);
                        if let Some(c) = &fields[j] {
                            acc += Mat4::identity() * (c[k](p) * e);
                        }
                    }
                }
            }
            acc
        });
        if hermitian {
            matrix = matrix.hermitian();
        }
        MomentumOperator::new(format!("{label}_{}", axis[i]), rep, coeffs, matrix)
    }))
}

/// Componentwise sum of operator triples (e.g. J = L + S).
pub fn add_triples(a: &[MomentumOperator; 3], b: &[MomentumOperator; 3]) -> Result<[MomentumOperator; 3]> {
    let out: Vec<MomentumOperator> = a.iter().zip(b).map(|(x, y)| x.add(y)).collect::<Result<_>>()?;
    Ok(out.try_into().expect("three components"))
}

/// Componentwise difference of operator triples.
pub fn sub_triples(a: &[MomentumOperator; 3], b: &[MomentumOperator; 3]) -> Result<[MomentumOperator; 3]> {
    let out: Vec<MomentumOperator> = a.iter().zip(b).map(|(x, y)| x.sub(y)).collect::<Result<_>>()?;
    Ok(out.try_into().expect("three components"))
}
