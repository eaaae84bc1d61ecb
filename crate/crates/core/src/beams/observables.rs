use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector2, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expectation::{annulus_gradient, expectation, ANNULUS_STEP};
use super::spectrum::{BeamSpectrum, Layout};
use crate::algebra::{dirac, generic_boost, plane_wave_bispinor, Kinematics, PolarizationSpinor, Spinor4};
use crate::error::{Error, Result};
use crate::format::fmt17;
use crate::numeric;
use crate::operators::{
    canonical_spin_oam_total, canonical_spin_oam_total_in, nwfw_oam, nwfw_spin, projected_oam,
    projected_spin, Representation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorFamily {
    Canonical,
    Projected,
    #[serde(rename = "NWFW")]
    Nwfw,
}

impl std::fmt::Display for OperatorFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OperatorFamily::Canonical => "canonical",
            OperatorFamily::Projected => "projected",
            OperatorFamily::Nwfw => "NWFW",
        })
    }
}

/// z-components of spin, orbital and total angular momentum for one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSummary {
    pub family: OperatorFamily,
    pub sz: f64,
    pub lz: f64,
    pub jz: f64,
    /// Closed-form SOI parameter (1 − m/E) sin²θ₀.
    pub delta: f64,
    /// Number of quadrature nodes.
    pub samples: usize,
    /// Largest imaginary part among the expectations (should vanish).
    pub imaginary: f64,
    /// Deviation between two independent evaluation routes, when available.
    pub cross_check: Option<f64>,
}

pub const CSV_HEADER: &str = "family,Sz,Lz,Jz,Delta";

impl ObservableSummary {
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.family, fmt17(self.sz), fmt17(self.lz), fmt17(self.jz), fmt17(self.delta))
    }
}

/// CSV table with the fixed header.
pub fn summaries_csv(rows: &[ObservableSummary]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

fn summarize<S, L, J>(family: OperatorFamily, spectrum: &BeamSpectrum, s: &S, l: &L, j: &J) -> Result<ObservableSummary>
where
    S: crate::operators::Operator,
    L: crate::operators::Operator,
    J: crate::operators::Operator,
{
    let sz = expectation(s, spectrum)?;
    let lz = expectation(l, spectrum)?;
    let jz = expectation(j, spectrum)?;
    Ok(ObservableSummary {
        family,
        sz: sz.re,
        lz: lz.re,
        jz: jz.re,
        delta: spectrum.params().delta(),
        samples: spectrum.samples().len(),
        imaginary: sz.im.abs().max(lz.im.abs()).max(jz.im.abs()),
        cross_check: None,
    })
}

/// Canonical and projected families.
pub fn soi_summary(spectrum: &BeamSpectrum) -> Result<[ObservableSummary; 2]> {
    let rep = Representation::Standard;
    let am = canonical_spin_oam_total();
    let canonical = summarize(OperatorFamily::Canonical, spectrum, &am.spin[2], &am.orbital[2], &am.total[2])?;
    let mut projected = summarize(
        OperatorFamily::Projected,
        spectrum,
        &projected_spin(rep)[2],
        &projected_oam(rep)[2],
        &am.total[2],
    )?;
    projected.cross_check = Some((projected.sz - canonical.sz).abs().max((projected.lz - canonical.lz).abs()));
    Ok([canonical, projected])
}

/// NWFW family, evaluated with the standard-representation closed forms and
/// cross-checked against canonical operators on the FW-transformed spectrum.
pub fn nwfw_summary(spectrum: &BeamSpectrum) -> Result<ObservableSummary> {
    let am = canonical_spin_oam_total();
    let mut direct = summarize(
        OperatorFamily::Nwfw,
        spectrum,
        &nwfw_spin(Representation::Standard)[2],
        &nwfw_oam(Representation::Standard)[2],
        &am.total[2],
    )?;
    let fw = canonical_spin_oam_total_in(Representation::Fw);
    let via_fw = summarize(OperatorFamily::Nwfw, spectrum, &fw.spin[2], &fw.orbital[2], &fw.total[2])?;
    let dev = (direct.sz - via_fw.sz).abs().max((direct.lz - via_fw.lz).abs()).max((direct.jz - via_fw.jz).abs());
    direct.cross_check = Some(dev);
    Ok(direct)
}

/// All three families, canonical first.
pub fn all_summaries(spectrum: &BeamSpectrum) -> Result<Vec<ObservableSummary>> {
    let [c, p] = soi_summary(spectrum)?;
    Ok(vec![c, p, nwfw_summary(spectrum)?])
}

/// W†SW for a positive-energy plane wave.
pub fn plane_wave_spin(kin: &Kinematics, w: &PolarizationSpinor) -> Vector3<f64> {
    let b = plane_wave_bispinor(kin, w).components;
    Vector3::from_fn(|i, _| b.dotc(&(dirac::spin(i) * b)).re)
}

/// (m/E)⟨s⟩ + (p·⟨s⟩)p/(E(E+m)).
pub fn plane_wave_spin_closed(kin: &Kinematics, w: &PolarizationSpinor) -> Vector3<f64> {
    let (p, e, m) = (kin.momentum(), kin.energy(), kin.mass());
    let s = w.rest_spin();
    s * (m / e) + p * (p.dot(&s) / (e * (e + m)))
}

fn require_annulus(spectrum: &BeamSpectrum, what: &str) -> Result<f64> {
    match spectrum.layout {
        Layout::Annulus { sigma, .. } => Ok(sigma),
        Layout::Ring => Err(Error::RequiresAnnulus(what.to_string())),
    }
}

/// ⟨(r × α)_z⟩ = Σ a†(α_y i∂_x − α_x i∂_y)a on the annulus.
pub fn magnetic_moment_z(spectrum: &BeamSpectrum) -> Result<f64> {
    let sigma = require_annulus(spectrum, "(r×α)_z")?;
    let h = ANNULUS_STEP * sigma;
    let (ax, ay) = (dirac::alpha(0), dirac::alpha(1));
    let terms: Vec<Complex64> = spectrum
        .samples()
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let a = spectrum.amplitude(i);
            let g = annulus_gradient(spectrum, s.kinematics.momentum(), false, h);
            let v = (ay * g[0] - ax * g[1]) * Complex64::i();
            a.dotc(&v) * s.weight
        })
        .collect();
    Ok(numeric::sum_c64(&terms).re)
}

/// Incoherent average over w = (1,0) and (0,1) of a spectrum functional.
pub fn unpolarized<F>(spectrum: &BeamSpectrum, f: F) -> Result<f64>
where
    F: Fn(&BeamSpectrum) -> Result<f64>,
{
    let up = f(&spectrum.with_spin(PolarizationSpinor::up())?)?;
    let down = f(&spectrum.with_spin(PolarizationSpinor::down())?)?;
    Ok(0.5 * (up + down))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Centroid {
    Probability,
    Energy,
}

/// Transverse centroid at t′ = 0 in a frame moving with transverse velocity
/// `v`. Each plane-wave component keeps its profile amplitude and is carried
/// by the spinor boost; i∇_{p′} = J⁻¹ i∇_p with the constant Jacobian
/// J = I + (γ − 1)v̂v̂ᵀ of the fixed-energy momentum map.
pub fn boosted_centroid(spectrum: &BeamSpectrum, v: &Vector2<f64>, which: Centroid) -> Result<Vector2<f64>> {
    let sigma = require_annulus(spectrum, "boosted centroid")?;
    let v3 = Vector3::new(v[0], v[1], 0.0);
    let speed = v3.norm();
    if !speed.is_finite() || speed >= 1.0 {
        return Err(Error::Superluminal(speed));
    }
    if speed == 0.0 {
        return Ok(Vector2::zeros());
    }
    let n = v3 / speed;
    let gamma = 1.0 / (1.0 - speed * speed).sqrt();
    let jac = Matrix3::identity() + n * n.transpose() * (gamma - 1.0);
    let jinv = jac.try_inverse().ok_or(Error::Precondition("singular boost Jacobian".into()))?;
    let h = ANNULUS_STEP * sigma;
    let e = spectrum.energy();

    let parts: Vec<(Complex64, Complex64, f64)> = spectrum
        .samples()
        .par_iter()
        .enumerate()
        .map(|(i, s)| -> Result<(Complex64, Complex64, f64)> {
            let boost = generic_boost(&s.kinematics, &v3)?;
            let a = boost.spinor * spectrum.amplitude(i);
            let g = annulus_gradient(spectrum, s.kinematics.momentum(), false, h);
            let grad: [Spinor4; 3] = [boost.spinor * g[0], boost.spinor * g[1], Spinor4::zeros()];
            let mut r = [Complex64::new(0.0, 0.0); 2];
            for (axis, slot) in r.iter_mut().enumerate() {
                let mut d = Spinor4::zeros();
                for (k, gk) in grad.iter().enumerate() {
                    d += gk * Complex64::from(jinv[(axis, k)]);
                }
                *slot = a.dotc(&d) * Complex64::i();
            }
            let weight = match which {
                Centroid::Probability => s.weight,
                Centroid::Energy => s.weight * gamma * (e - v3.dot(s.kinematics.momentum())),
            };
            Ok((r[0] * weight, r[1] * weight, a.norm_squared() * weight))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<Complex64> = parts.iter().map(|t| t.0).collect();
    let ys: Vec<Complex64> = parts.iter().map(|t| t.1).collect();
    let ns: Vec<f64> = parts.iter().map(|t| t.2).collect();
    let norm = numeric::sum_f64(&ns);
    Ok(Vector2::new(numeric::sum_c64(&xs).re, numeric::sum_c64(&ys).re) / norm)
}

/// −v × ⟨J⟩/(2E) for an on-axis beam, ⟨J⟩ = (ℓ + s_z)ẑ: the predicted
/// probability-centroid shift (twice this for the energy centroid).
pub fn hall_shift_prediction(spectrum: &BeamSpectrum, v: &Vector2<f64>) -> Vector2<f64> {
    let jz = spectrum.params().ell as f64 + spectrum.params().w.rest_spin()[2];
    let e = spectrum.energy();
    Vector2::new(v[1] * jz, -v[0] * jz) * (-1.0 / (2.0 * e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beams::{build_spectrum, BeamParams};
    use std::f64::consts::PI;

    fn params() -> BeamParams {
        BeamParams::new(2.0, 1.0, PI / 6.0, 1, PolarizationSpinor::up())
    }

    #[test]
    fn summaries_match_closed_forms() {
        let s = build_spectrum(&params()).unwrap();
        let rows = all_summaries(&s).unwrap();
        assert!((rows[0].sz - 0.4375).abs() < 1e-9 && (rows[0].lz - 1.0625).abs() < 1e-9);
        assert!((rows[1].sz - 0.4375).abs() < 1e-9 && (rows[1].lz - 1.0625).abs() < 1e-9);
        assert!((rows[2].sz - 0.5).abs() < 1e-9 && (rows[2].lz - 1.0).abs() < 1e-9);
        assert!(rows[2].cross_check.unwrap() < 1e-8);
        for r in &rows {
            assert!((r.jz - 1.5).abs() < 1e-10);
            assert!(r.imaginary < 1e-9);
        }
        let csv = summaries_csv(&rows);
        assert!(csv.starts_with("family,Sz,Lz,Jz,Delta\ncanonical,4.3750000000000"));
    }

    #[test]
    fn plane_wave_spin_examples() {
        let k = Kinematics::new(Vector3::new(1.0, 0.0, 0.0), 1.0).unwrap();
        let s = plane_wave_spin(&k, &PolarizationSpinor::up());
        assert!((s - Vector3::new(0.0, 0.0, 0.5 / 2f64.sqrt())).norm() < 1e-12);
        let k = Kinematics::at_rest(1.0).unwrap();
        assert_eq!(plane_wave_spin(&k, &PolarizationSpinor::down()), Vector3::new(0.0, 0.0, -0.5));
    }

    #[test]
    fn moment_and_centroid_require_annulus() {
        let s = build_spectrum(&params()).unwrap();
        assert!(matches!(magnetic_moment_z(&s), Err(Error::RequiresAnnulus(_))));
        assert!(matches!(
            boosted_centroid(&s, &Vector2::new(0.1, 0.0), Centroid::Probability),
            Err(Error::RequiresAnnulus(_))
        ));
    }

    #[test]
    fn zero_velocity_centroid() {
        let s = build_spectrum(&params().annulus().with_grid(64, 16)).unwrap();
        assert_eq!(boosted_centroid(&s, &Vector2::zeros(), Centroid::Energy).unwrap(), Vector2::zeros());
        assert!(matches!(
            boosted_centroid(&s, &Vector2::new(1.0, 0.0), Centroid::Probability),
            Err(Error::Superluminal(_))
        ));
    }
}
