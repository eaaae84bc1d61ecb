use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use super::report::{halving_study, ExpansionReport};
use crate::algebra::{dirac, fw_unitary, Kinematics, Mat4, PolarizationSpinor, Spinor4};
use crate::error::{Error, Result};
use crate::numeric;
use crate::operators::{projected_position, Representation};

/// Largest p/m accepted by the nonrelativistic expansions.
pub const MAX_RATIO: f64 = 0.3;
/// Number of p/m values in a halving study.
pub const HALVING_LEVELS: usize = 4;
/// Minimum observed order of the 𝓡²_FW ≃ r² + L·S/m² residual.
pub const R_SQUARED_MIN_ORDER: f64 = 1.8;
/// Minimum observed order of the φ_FW ≃ (1 + p²/8m²)φ residual.
pub const PAULI_MIN_ORDER: f64 = 3.0;

type Spinor2 = Vector2<Complex64>;

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio.is_nan() || ratio > MAX_RATIO + 1e-12 {
        return Err(Error::Precondition(format!("p/m = {ratio} exceeds {MAX_RATIO}")));
    }
    Ok(())
}

fn massive(m: f64) -> Result<()> {
    if m <= 0.0 {
        return Err(Error::Massless);
    }
    Ok(())
}

/// First-order coefficients and zeroth-order part of 𝓡²_FW − r², and of the
/// target L·S/m², at one momentum.
#[derive(Debug, Clone, Copy)]
pub struct SquareCoefficients {
    /// 𝓡²_FW: coefficient of ∂_i is 2iA_i.
    pub derivative: [Mat4; 3],
    /// i∇·A + A·A.
    pub matrix: Mat4,
    /// L·S/m²: coefficient of ∂_i is i(p×S)_i/m².
    pub target: [Mat4; 3],
    /// i∇·A alone; the ordering anomaly of the cross term.
    pub anomaly: Mat4,
}

/// Expands 𝓡²_FW = r² + (r·A + A·r) + A·A with A = p×S/(E(E+m)).
pub fn square_coefficients(kin: &Kinematics) -> Result<SquareCoefficients> {
    let m = kin.mass();
    massive(m)?;
    let pos = projected_position(Representation::Fw);
    let a = |k: &Kinematics| -> Result<[Mat4; 3]> {
        Ok([
            pos[0].matrix_part().evaluate(k)?,
            pos[1].matrix_part().evaluate(k)?,
            pos[2].matrix_part().evaluate(k)?,
        ])
    };
    let here = a(kin)?;
    let p = *kin.momentum();
    let h = numeric::RELATIVE_STEP * p.norm().max(m);
    let mut divergence = Mat4::zeros();
    for (i, pi) in pos.iter().enumerate() {
        divergence += numeric::partial(&|q: &Vector3<f64>| pi.matrix_part().raw(&kin.with_momentum(*q).unwrap_or(*kin)), &p, i, h);
    }
    let anomaly = divergence * Complex64::i();
    let square = here.iter().fold(Mat4::zeros(), |acc, x| acc + x * x);
    let spin = [dirac::spin(0), dirac::spin(1), dirac::spin(2)];
    let target = std::array::from_fn(|i| {
        let mut c = Mat4::zeros();
        for j in 0..3 {
            for k in 0..3 {
                let e = dirac::levi_civita(i, j, k);
                if e != 0.0 {
                    c += spin[k] * Complex64::from(e * p[j]);
                }
            }
        }
        c * Complex64::new(0.0, 1.0 / (m * m))
    });
    Ok(SquareCoefficients {
        derivative: here.map(|x| x * Complex64::new(0.0, 2.0)),
        matrix: anomaly + square,
        target,
        anomaly,
    })
}

/// max(‖ΔD‖/‖D_target‖, ‖ΔM‖·m²) at one momentum; zero at p = 0.
pub fn r_squared_residual(kin: &Kinematics) -> Result<f64> {
    let c = square_coefficients(kin)?;
    let m = kin.mass();
    let diff: f64 = (0..3).map(|i| (c.derivative[i] - c.target[i]).norm_squared()).sum::<f64>().sqrt();
    let scale: f64 = c.target.iter().map(|t| t.norm_squared()).sum::<f64>().sqrt();
    let d = if scale > 0.0 { diff / scale } else { diff };
    Ok(d.max(c.matrix.norm() * m * m))
}

/// Halving study of 𝓡²_FW ≃ r² + L·S/m² along the direction of `kin`,
/// starting from its p/m.
pub fn r_squared_identity(kin: &Kinematics) -> Result<ExpansionReport> {
    let m = kin.mass();
    massive(m)?;
    let p = *kin.momentum();
    let ratio = p.norm() / m;
    check_ratio(ratio)?;
    let identity = "𝓡²_FW ≃ r² + (L·S)/m²";
    let Some(dir) = kin.direction().copied() else {
        let r = r_squared_residual(kin)?;
        return Ok(ExpansionReport::new(identity, R_SQUARED_MIN_ORDER, vec![0.0], vec![r]));
    };
    halving_study(identity, R_SQUARED_MIN_ORDER, ratio, HALVING_LEVELS, |x| {
        r_squared_residual(&Kinematics::new(dir * (x * m), m)?)
    })
}

/// Gaussian 2-spinor packet φ(p) = exp(−|p − p_c|²/4δ²) w sampled on a
/// Gauss-Legendre grid over p_c ± 6δ; δ = 0 is a single mode at p_c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPacket {
    pub mass: f64,
    pub center: Vector3<f64>,
    pub width: f64,
    pub w: PolarizationSpinor,
    /// Nodes per axis.
    pub nodes: usize,
}

impl MomentumPacket {
    pub fn new(mass: f64, center: Vector3<f64>, width: f64, w: PolarizationSpinor) -> Self {
        Self {
            mass,
            center,
            width,
            w,
            nodes: 8,
        }
    }

    /// Same packet with center and width multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            center: self.center * s,
            width: self.width * s,
            ..*self
        }
    }

    /// (momentum, weight, φ) at every node.
    pub fn samples(&self) -> Vec<(Vector3<f64>, f64, Spinor2)> {
        let w = *self.w.as_vector();
        if self.width == 0.0 {
            return vec![(self.center, 1.0, w)];
        }
        let d = self.width;
        let (x, wx) = numeric::gauss_legendre_interval(self.nodes, -6.0 * d, 6.0 * d);
        let mut out = Vec::with_capacity(x.len().pow(3));
        for (a, wa) in x.iter().zip(&wx) {
            for (b, wb) in x.iter().zip(&wx) {
                for (c, wc) in x.iter().zip(&wx) {
                    let q = Vector3::new(*a, *b, *c);
                    let g = (-q.norm_squared() / (4.0 * d * d)).exp();
                    out.push((self.center + q, wa * wb * wc, w * Complex64::from(g)));
                }
            }
        }
        out
    }

    /// Largest |p|/m over the sampled support.
    pub fn support_ratio(&self) -> f64 {
        self.samples().iter().fold(0.0f64, |r, (p, _, _)| r.max(p.norm())) / self.mass
    }

    fn validate(&self) -> Result<()> {
        massive(self.mass)?;
        if !(self.width >= 0.0 && self.width.is_finite() && self.center.iter().all(|x| x.is_finite())) {
            return Err(Error::NonFinite("packet center or width"));
        }
        if self.width > 0.0 && self.nodes < 2 {
            return Err(Error::Precondition("packet needs at least 2 nodes per axis".into()));
        }
        check_ratio(self.support_ratio())
    }
}

fn upper(v: &Spinor4) -> Spinor2 {
    Spinor2::new(v[0], v[1])
}

fn stack(phi: &Spinor2, chi: &Spinor2) -> Spinor4 {
    Spinor4::new(phi[0], phi[1], chi[0], chi[1])
}

/// ‖φ_FW − (1 + p²/8m²)φ‖/‖φ‖ over the packet, with χ = (σ·p/2m)φ.
pub fn pauli_residual(packet: &MomentumPacket) -> Result<f64> {
    packet.validate()?;
    let m = packet.mass;
    let parts: Vec<Result<(f64, f64)>> = packet
        .samples()
        .par_iter()
        .map(|(p, weight, phi)| {
            let kin = Kinematics::new(*p, m)?;
            let chi = dirac::pauli_dot(p) * phi * Complex64::from(0.5 / m);
            let fw = upper(&(fw_unitary(&kin) * stack(phi, &chi)));
            let pauli = phi * Complex64::from(1.0 + p.norm_squared() / (8.0 * m * m));
            Ok(((fw - pauli).norm_squared() * weight, phi.norm_squared() * weight))
        })
        .collect();
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let num = numeric::sum_f64(&parts.iter().map(|x| x.0).collect::<Vec<_>>());
    let den = numeric::sum_f64(&parts.iter().map(|x| x.1).collect::<Vec<_>>());
    Ok((num / den).sqrt())
}

/// Halving study of φ_FW ≃ (1 + p²/8m²)φ_Pauli: the packet is shrunk
/// toward p = 0 by factors of two.
pub fn pauli_correspondence(packet: &MomentumPacket) -> Result<ExpansionReport> {
    packet.validate()?;
    let start = packet.support_ratio();
    let identity = "φ_FW ≃ (1 + p²/8m²)φ";
    if start == 0.0 {
        return Ok(ExpansionReport::new(identity, PAULI_MIN_ORDER, vec![0.0], vec![pauli_residual(packet)?]));
    }
    halving_study(identity, PAULI_MIN_ORDER, start, HALVING_LEVELS, |x| pauli_residual(&packet.scaled(x / start)))
}

/// With the exact lower block χ = σ·p/(E+m) φ, the FW image has no lower
/// block; returns the largest relative lower-block norm.
pub fn exact_lower_block_residual(packet: &MomentumPacket) -> Result<f64> {
    packet.validate()?;
    let m = packet.mass;
    let res: Vec<Result<f64>> = packet
        .samples()
        .par_iter()
        .map(|(p, _, phi)| {
            let kin = Kinematics::new(*p, m)?;
            let chi = dirac::pauli_dot(p) * phi * Complex64::from(1.0 / (kin.energy() + m));
            let psi = stack(phi, &chi);
            let fw = fw_unitary(&kin) * psi;
            let n = psi.norm();
            Ok(if n > 0.0 { Spinor2::new(fw[2], fw[3]).norm() / n } else { 0.0 })
        })
        .collect();
    res.into_iter().try_fold(0.0f64, |a, r| Ok(a.max(r?)))
}
