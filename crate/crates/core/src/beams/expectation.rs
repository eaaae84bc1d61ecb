use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;

use super::spectrum::{BeamSpectrum, Layout};
use crate::algebra::{fw_unitary, Spinor4};
use crate::error::{Error, Result};
use crate::numeric;
use crate::operators::{MomentumOperator, Operator, Representation};

/// Relative tolerance for deciding that a derivative field is azimuthal.
const AZIMUTHAL_TOLERANCE: f64 = 1e-12;
/// Annulus finite-difference step in units of σ.
pub const ANNULUS_STEP: f64 = 1e-3;

/// ⟨op⟩ over the spectrum. FW-tagged operators act on FW-transformed
/// amplitudes.
pub fn expectation<O: Operator>(op: &O, spectrum: &BeamSpectrum) -> Result<Complex64> {
    let op = op.to_general();
    let fw = op.representation() == Representation::Fw;
    match spectrum.layout {
        Layout::Ring => ring_expectation(&op, spectrum, fw),
        Layout::Annulus { sigma, .. } => annulus_expectation(&op, spectrum, fw, sigma),
    }
}

/// Amplitudes in the requested representation, without the vortex phase.
fn envelopes(spectrum: &BeamSpectrum, fw: bool) -> Vec<Spinor4> {
    spectrum
        .samples()
        .iter()
        .map(|s| if fw { fw_unitary(&s.kinematics) * s.envelope } else { s.envelope })
        .collect()
}

/// Derivative coefficients c = λ ∂_φ on the ring: returns λ per sample, or an
/// error if c has radial or longitudinal components.
fn azimuthal_factors(op: &MomentumOperator, spectrum: &BeamSpectrum) -> Result<Option<Vec<Complex64>>> {
    if !op.has_derivative() {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(spectrum.samples().len());
    for s in spectrum.samples() {
        let p = s.kinematics.momentum();
        let c = op.coefficients(p);
        let rho2 = p[0] * p[0] + p[1] * p[1];
        let scale = c.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
        let radial = (c[0] * p[0] + c[1] * p[1]) / rho2.sqrt();
        if c[2].norm() > AZIMUTHAL_TOLERANCE * scale || radial.norm() > AZIMUTHAL_TOLERANCE * scale {
            return Err(Error::RequiresAnnulus(op.label().to_string()));
        }
        // ∂_φ = −p_y ∂_x + p_x ∂_y
        out.push((c[1] * p[0] - c[0] * p[1]) / rho2);
    }
    Ok(Some(out))
}

fn ring_expectation(op: &MomentumOperator, spectrum: &BeamSpectrum, fw: bool) -> Result<Complex64> {
    let env = envelopes(spectrum, fw);
    let lambdas = azimuthal_factors(op, spectrum)?;
    let ell = Complex64::new(0.0, spectrum.params().ell as f64);
    // ∂_φ (e^{iℓφ} b) = e^{iℓφ}(iℓ b + ∂_φ b); the vortex phase cancels in a†(…)a
    let dphi: Option<Vec<Spinor4>> = lambdas.as_ref().map(|_| {
        let mut d = vec![Spinor4::zeros(); env.len()];
        for comp in 0..4 {
            let series: Vec<Complex64> = env.iter().map(|b| b[comp]).collect();
            for (slot, v) in d.iter_mut().zip(numeric::spectral_derivative(&series)) {
                slot[comp] = v;
            }
        }
        d.iter().zip(&env).map(|(db, b)| db + b * ell).collect()
    });
    let terms: Vec<Result<Complex64>> = spectrum
        .samples()
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let b = env[i];
            let mut v = op.matrix_part().evaluate(&s.kinematics)? * b;
            if let (Some(l), Some(d)) = (&lambdas, &dphi) {
                v += d[i] * l[i];
            }
            Ok(b.dotc(&v) * s.weight)
        })
        .collect();
    let terms: Vec<Complex64> = terms.into_iter().collect::<Result<_>>()?;
    Ok(numeric::sum_c64(&terms))
}

/// Transverse gradient (∂_x, ∂_y) of the closed-form annulus amplitude.
pub(crate) fn annulus_gradient(spectrum: &BeamSpectrum, p: &Vector3<f64>, fw: bool, h: f64) -> [Spinor4; 2] {
    let f = |q: &Vector3<f64>| {
        spectrum
            .annulus_amplitude(q[0], q[1], fw)
            .unwrap_or_else(|| Spinor4::from_element(Complex64::new(f64::NAN, f64::NAN)))
    };
    [numeric::partial(&f, p, 0, h), numeric::partial(&f, p, 1, h)]
}

fn annulus_expectation(op: &MomentumOperator, spectrum: &BeamSpectrum, fw: bool, sigma: f64) -> Result<Complex64> {
    let h = ANNULUS_STEP * sigma;
    let terms: Vec<Result<Complex64>> = spectrum
        .samples()
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let p = s.kinematics.momentum();
            let mut a = spectrum.amplitude(i);
            if fw {
                a = fw_unitary(&s.kinematics) * a;
            }
            let mut v = op.matrix_part().evaluate(&s.kinematics)? * a;
            if op.has_derivative() {
                let c = op.coefficients(p);
                if c[2].norm() > AZIMUTHAL_TOLERANCE * c.norm().max(f64::MIN_POSITIVE) {
                    return Err(Error::Precondition(format!(
                        "{} differentiates along p_z, which is fixed by the energy shell",
                        op.label()
                    )));
                }
                let g = annulus_gradient(spectrum, p, fw, h);
                v += g[0] * c[0] + g[1] * c[1];
            }
            Ok(a.dotc(&v) * s.weight)
        })
        .collect();
    let terms: Vec<Complex64> = terms.into_iter().collect::<Result<_>>()?;
    Ok(numeric::sum_c64(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PolarizationSpinor;
    use crate::beams::{build_spectrum, BeamParams};
    use crate::operators::{canonical_position, canonical_spin_oam_total, projected_spin};
    use std::f64::consts::PI;

    fn ring() -> BeamSpectrum {
        build_spectrum(&BeamParams::new(2.0, 1.0, PI / 6.0, 1, PolarizationSpinor::up())).unwrap()
    }

    #[test]
    fn ring_angular_momentum() {
        let s = ring();
        let am = canonical_spin_oam_total();
        let sz = expectation(&am.spin[2], &s).unwrap();
        let lz = expectation(&am.orbital[2], &s).unwrap();
        let jz = expectation(&am.total[2], &s).unwrap();
        assert!((sz - 0.4375).norm() < 1e-12);
        assert!((lz - 1.0625).norm() < 1e-12);
        assert!((jz - 1.5).norm() < 1e-12);
    }

    #[test]
    fn transverse_position_needs_annulus() {
        let r = canonical_position();
        assert!(matches!(expectation(&r[0], &ring()), Err(Error::RequiresAnnulus(_))));
    }

    #[test]
    fn annulus_agrees_with_ring_for_spin() {
        let params = BeamParams::new(2.0, 1.0, PI / 6.0, 1, PolarizationSpinor::up());
        let ann = build_spectrum(&params.annulus().with_grid(128, 24)).unwrap();
        let am = canonical_spin_oam_total();
        let jz = expectation(&am.total[2], &ann).unwrap();
        assert!((jz - 1.5).norm() < 1e-8, "{jz}");
        let sz = expectation(&projected_spin(Representation::Standard)[2], &ann).unwrap();
        let sz_c = expectation(&am.spin[2], &ann).unwrap();
        assert!((sz - sz_c).norm() < 1e-10);
        let x = expectation(&canonical_position()[0], &ann).unwrap();
        assert!(x.norm() < 1e-8);
    }
}
