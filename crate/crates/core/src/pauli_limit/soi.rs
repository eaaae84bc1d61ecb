use std::sync::Arc;

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::expansion::MAX_RATIO;
use crate::algebra::{dirac, PolarizationSpinor};
use crate::error::{Error, Result};
use crate::format::serialize_f64;
use crate::numeric;

/// Default grid points per axis.
pub const DEFAULT_GRID: usize = 64;
/// Default packet width in units of the mass.
pub const DEFAULT_WIDTH: f64 = 0.05;
/// Default half-width of the momentum box in units of the packet width.
pub const BOX_WIDTHS: f64 = 10.0;
/// Largest norm fraction allowed beyond p/m = 0.3.
pub const SUPPORT_LEAK: f64 = 1e-4;
/// Agreement required between the exact and expanded SOI energies, relative
/// to the correction term.
pub const SOI_TOLERANCE: f64 = 0.05;

/// Even potential V(r) = Σ c_k r^{2k}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenPolynomial {
    pub coefficients: Vec<f64>,
}

impl EvenPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// c r²
    pub fn harmonic(c: f64) -> Self {
        Self::new(vec![0.0, c])
    }

    /// V′(r)/r = Σ 2k c_k r^{2k−2}.
    pub fn derivative_over_r(&self) -> Self {
        Self::new(self.coefficients.iter().enumerate().skip(1).map(|(k, c)| 2.0 * k as f64 * c).collect())
    }

    pub fn evaluate(&self, r: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * r * r + c)
    }
}

/// ψ(p) = (p_x ± i p_y)^|ℓ| exp(−p²/4δ²) w on an n³ periodic momentum grid
/// (the upper FW block of an electron packet).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoiPacket {
    pub mass: f64,
    /// δ: width of |ψ|².
    pub width: f64,
    pub ell: i32,
    #[serde(skip)]
    pub w: PolarizationSpinor,
    pub grid: usize,
    /// Half-width of the momentum box.
    pub half_width: f64,
}

impl SoiPacket {
    pub fn new(mass: f64, ell: i32, w: PolarizationSpinor) -> Self {
        let width = DEFAULT_WIDTH * mass;
        Self {
            mass,
            width,
            ell,
            w,
            grid: DEFAULT_GRID,
            half_width: BOX_WIDTHS * width,
        }
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    fn step(&self) -> f64 {
        2.0 * self.half_width / self.grid as f64
    }

    fn momentum(&self, idx: usize) -> Vector3<f64> {
        let n = self.grid;
        let dp = self.step();
        let c = |i: usize| -self.half_width + i as f64 * dp;
        Vector3::new(c(idx / (n * n)), c((idx / n) % n), c(idx % n))
    }

    fn field(&self) -> Field {
        let n3 = self.grid.pow(3);
        let w = self.w.as_vector();
        let sign = if self.ell < 0 { -1.0 } else { 1.0 };
        let d2 = self.width * self.width;
        let values: Vec<Complex64> = (0..n3)
            .into_par_iter()
            .map(|i| {
                let p = self.momentum(i);
                Complex64::new(p[0], sign * p[1]).powu(self.ell.unsigned_abs()) * (-p.norm_squared() / (4.0 * d2)).exp()
            })
            .collect();
        [values.iter().map(|v| v * w[0]).collect(), values.iter().map(|v| v * w[1]).collect()]
    }

    fn validate(&self) -> Result<()> {
        if self.mass <= 0.0 {
            return Err(Error::Massless);
        }
        if !(self.width > 0.0 && self.half_width > 0.0 && self.width.is_finite() && self.half_width.is_finite()) {
            return Err(Error::Precondition("packet width and box must be positive".into()));
        }
        if self.grid < 8 || !self.grid.is_power_of_two() {
            return Err(Error::Precondition(format!("grid = {} must be a power of two ≥ 8", self.grid)));
        }
        Ok(())
    }
}

type Field = [Vec<Complex64>; 2];

struct Grid {
    n: usize,
    dp: f64,
    momenta: Vec<Vector3<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    fn new(packet: &SoiPacket) -> Self {
        let n = packet.grid;
        let mut planner = FftPlanner::new();
        Self {
            n,
            dp: packet.step(),
            momenta: (0..n.pow(3)).map(|i| packet.momentum(i)).collect(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// i∂/∂p_axis of one component, spectrally.
    fn position(&self, f: &[Complex64], axis: usize) -> Vec<Complex64> {
        let n = self.n;
        let stride = n.pow(2 - axis as u32);
        let bases: Vec<usize> = (0..n.pow(3)).filter(|i| (i / stride).is_multiple_of(n)).collect();
        let scale = std::f64::consts::TAU / (n as f64 * self.dp);
        let lines: Vec<Vec<Complex64>> = bases
            .par_iter()
            .map(|&b| {
                let mut line: Vec<Complex64> = (0..n).map(|j| f[b + j * stride]).collect();
                self.forward.process(&mut line);
                for (k, c) in line.iter_mut().enumerate() {
                    // i · (ik) = −k; Nyquist mode dropped
                    let kk = if k == n / 2 { 0.0 } else { numeric::signed_index(k, n) as f64 * scale };
                    *c *= -kk / n as f64;
                }
                self.inverse.process(&mut line);
                line
            })
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
        for (b, line) in bases.iter().zip(lines) {
            for (j, v) in line.into_iter().enumerate() {
                out[b + j * stride] = v;
            }
        }
        out
    }

    fn position_field(&self, f: &Field, axis: usize) -> Field {
        [self.position(&f[0], axis), self.position(&f[1], axis)]
    }

    /// Applies a 2×2 matrix field M(p) pointwise.
    fn apply<F: Fn(&Vector3<f64>) -> Matrix2<Complex64> + Sync>(&self, f: &Field, m: F) -> Field {
        let pairs: Vec<(Complex64, Complex64)> = self
            .momenta
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let a = m(p);
                (a[(0, 0)] * f[0][i] + a[(0, 1)] * f[1][i], a[(1, 0)] * f[0][i] + a[(1, 1)] * f[1][i])
            })
            .collect();
        let (a, b) = pairs.into_iter().unzip();
        [a, b]
    }

    fn inner(&self, a: &Field, b: &Field) -> Complex64 {
        let terms: Vec<Complex64> = (0..a[0].len()).into_par_iter().map(|i| a[0][i].conj() * b[0][i] + a[1][i].conj() * b[1][i]).collect();
        numeric::sum_c64(&terms)
    }
}

fn add(a: &Field, b: &Field) -> Field {
    [
        a[0].iter().zip(&b[0]).map(|(x, y)| x + y).collect(),
        a[1].iter().zip(&b[1]).map(|(x, y)| x + y).collect(),
    ]
}

fn scaled(a: &Field, c: f64) -> Field {
    [a[0].iter().map(|x| x * c).collect(), a[1].iter().map(|x| x * c).collect()]
}

fn pauli(i: usize) -> Matrix2<Complex64> {
    dirac::pauli(i)
}

/// A_i(p) = (p×σ/2)_i/(E(E+m)): the FW Berry connection on the upper block.
fn connection(axis: usize, p: &Vector3<f64>, m: f64) -> Matrix2<Complex64> {
    let e = (p.norm_squared() + m * m).sqrt();
    let f = 0.5 / (e * (e + m));
    let (j, k) = ((axis + 1) % 3, (axis + 2) % 3);
    (pauli(k) * Complex64::from(p[j]) - pauli(j) * Complex64::from(p[k])) * Complex64::from(f)
}

/// 𝓡²_FW ψ = Σ_i (r_i + A_i)(r_i + A_i)ψ.
fn covariant_square(g: &Grid, f: &Field, m: f64) -> Field {
    let mut out: Option<Field> = None;
    for i in 0..3 {
        let once = add(&g.position_field(f, i), &g.apply(f, |p| connection(i, p, m)));
        let twice = add(&g.position_field(&once, i), &g.apply(&once, |p| connection(i, p, m)));
        out = Some(match out {
            None => twice,
            Some(acc) => add(&acc, &twice),
        });
    }
    out.unwrap_or_else(|| f.clone())
}

/// r²ψ
fn canonical_square(g: &Grid, f: &Field) -> Field {
    let mut out = g.position_field(&g.position_field(f, 0), 0);
    for i in 1..3 {
        out = add(&out, &g.position_field(&g.position_field(f, i), i));
    }
    out
}

/// (L·S)ψ = Σ_k (σ_k/2) ε_kij p_j r_i ψ
fn spin_orbit(g: &Grid, f: &Field) -> Field {
    let r = [g.position_field(f, 0), g.position_field(f, 1), g.position_field(f, 2)];
    let mut out = scaled(f, 0.0);
    for (i, ri) in r.iter().enumerate() {
        // Σ_{k,j} ε_kij p_j σ_k/2 = (p × σ)_i/2
        let term = g.apply(ri, |p| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            (pauli(k) * Complex64::from(p[j]) - pauli(j) * Complex64::from(p[k])) * Complex64::from(0.5)
        });
        out = add(&out, &term);
    }
    out
}

/// Σ c_k X^k ψ by Horner's rule.
fn polynomial<F: Fn(&Field) -> Field>(coefficients: &[f64], f: &Field, op: F) -> Field {
    let Some((last, rest)) = coefficients.split_last() else {
        return scaled(f, 0.0);
    };
    let mut acc = scaled(f, *last);
    for c in rest.iter().rev() {
        acc = add(&op(&acc), &scaled(f, *c));
    }
    acc
}

/// ⟨V(|𝓡_FW|)⟩ against ⟨V(r)⟩ + ⟨V′(r)/r · L·S⟩/(2m²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoiComparison {
    /// ⟨V(|𝓡_FW|)⟩
    #[serde(serialize_with = "serialize_f64")]
    pub exact: f64,
    /// ⟨V(r)⟩
    #[serde(serialize_with = "serialize_f64")]
    pub unperturbed: f64,
    /// ⟨V′(r)/r · L·S⟩/(2m²)
    #[serde(serialize_with = "serialize_f64")]
    pub correction: f64,
    /// ⟨L·S⟩
    #[serde(serialize_with = "serialize_f64")]
    pub spin_orbit: f64,
    /// Norm fraction of the packet beyond p/m = 0.3.
    #[serde(serialize_with = "serialize_f64")]
    pub leak: f64,
}

impl SoiComparison {
    /// ⟨V(r)⟩ + correction.
    pub fn expanded(&self) -> f64 {
        self.unperturbed + self.correction
    }

    /// |exact − expanded| relative to |correction|; absolute when the
    /// correction vanishes.
    pub fn relative_error(&self) -> f64 {
        let d = (self.exact - self.expanded()).abs();
        let scale = self.correction.abs();
        if scale > 1e-12 * self.unperturbed.abs().max(1.0) {
            d / scale
        } else {
            d
        }
    }

    pub fn pass(&self) -> bool {
        self.relative_error() < SOI_TOLERANCE
    }
}

pub fn soi_potential_term(v: &EvenPolynomial, packet: &SoiPacket) -> Result<SoiComparison> {
    packet.validate()?;
    if v.coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("potential coefficients"));
    }
    let m = packet.mass;
    let g = Grid::new(packet);
    let psi = packet.field();

    let density: Vec<f64> = (0..psi[0].len()).map(|i| psi[0][i].norm_sqr() + psi[1][i].norm_sqr()).collect();
    let outside: Vec<f64> = density
        .iter()
        .zip(&g.momenta)
        .map(|(d, p)| if p.norm() > MAX_RATIO * m { *d } else { 0.0 })
        .collect();
    let norm = numeric::sum_f64(&density);
    let leak = numeric::sum_f64(&outside) / norm;
    if leak > SUPPORT_LEAK {
        return Err(Error::Precondition(format!(
            "packet has norm fraction {leak:e} beyond p/m = {MAX_RATIO}"
        )));
    }

    let mean = |x: &Field| g.inner(&psi, x).re / norm;
    let exact = mean(&polynomial(&v.coefficients, &psi, |f| covariant_square(&g, f, m)));
    let unperturbed = mean(&polynomial(&v.coefficients, &psi, |f| canonical_square(&g, f)));
    let ls = spin_orbit(&g, &psi);
    let slope = v.derivative_over_r();
    let correction = mean(&polynomial(&slope.coefficients, &ls, |f| canonical_square(&g, f))) / (2.0 * m * m);
    Ok(SoiComparison {
        exact,
        unperturbed,
        correction,
        spin_orbit: mean(&ls),
        leak,
    })
}
