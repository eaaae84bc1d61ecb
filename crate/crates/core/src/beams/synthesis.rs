use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::spectrum::BeamSpectrum;
use crate::algebra::Spinor4;
use crate::error::{Error, Result};
use crate::numeric;

/// Points per circle used for winding extraction.
pub const WINDING_POINTS: usize = 256;
/// Components below this fraction of the global maximum carry no winding.
pub const AMPLITUDE_FLOOR: f64 = 1e-6;

/// Real-space bispinor fields of a ring spectrum at z = 0 on a polar grid,
/// with per-component phase windings.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSynthesis {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    /// fields[i][j]: bispinor at radius i, angle j.
    pub fields: Vec<Vec<Spinor4>>,
    /// Radius of the circle used for the windings.
    pub winding_radius: f64,
    /// Winding of each component; `None` where the component vanishes.
    pub windings: [Option<i32>; 4],
}

/// ψ(r⊥) = Σ_φ w_φ a(φ) e^{ip⊥·r⊥} at z = 0.
pub fn field_at(spectrum: &BeamSpectrum, r: &Vector2<f64>) -> Spinor4 {
    let terms: Vec<Spinor4> = spectrum
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = s.kinematics.momentum();
            spectrum.amplitude(i) * Complex64::from_polar(s.weight, p[0] * r[0] + p[1] * r[1])
        })
        .collect();
    numeric::pairwise_sum(&terms, Spinor4::zeros(), &|a, b| a + b)
}

/// First maximum of J_n (n ≥ 0) on x > 0.
pub fn first_bessel_maximum(n: u32) -> f64 {
    // J_n' = (J_{n−1} − J_{n+1})/2 changes sign from + to − at the maximum
    let n = n as i32;
    let deriv = |x: f64| numeric::bessel_j(n - 1, x) - numeric::bessel_j(n + 1, x);
    let (mut lo, mut hi) = (1e-3, 1e-3);
    while deriv(hi) > 0.0 {
        lo = hi;
        hi += 0.05;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if deriv(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Net phase winding of a closed loop of samples, or `None` if any sample is
/// below `floor`.
pub fn winding_number(values: &[Complex64], floor: f64) -> Option<i32> {
    if values.iter().any(|z| z.norm() <= floor) {
        return None;
    }
    let mut total = 0.0;
    for (a, b) in values.iter().zip(values.iter().cycle().skip(1)) {
        let mut d = b.arg() - a.arg();
        if d > PI {
            d -= TAU;
        } else if d < -PI {
            d += TAU;
        }
        total += d;
    }
    Some((total / TAU).round() as i32)
}

/// Synthesizes the four components on `radii` × `angles` and extracts the
/// windings on the circle r₀ = x₀/κ, x₀ the first maximum of J_{|ℓ|+1}.
pub fn synthesize_components(spectrum: &BeamSpectrum, radii: &[f64], n_angles: usize) -> Result<ComponentSynthesis> {
    if !spectrum.is_ring() {
        return Err(Error::Precondition("component synthesis uses the delta-ring spectrum".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidBeam("radii must be finite and non-negative".into()));
    }
    if n_angles == 0 {
        return Err(Error::InvalidBeam("at least one angle is required".into()));
    }
    let angles: Vec<f64> = (0..n_angles).map(|j| TAU * j as f64 / n_angles as f64).collect();
    let fields: Vec<Vec<Spinor4>> = radii
        .par_iter()
        .map(|&r| angles.iter().map(|&t| field_at(spectrum, &Vector2::new(r * t.cos(), r * t.sin()))).collect())
        .collect();

    let ell = spectrum.params().ell;
    let winding_radius = first_bessel_maximum(ell.unsigned_abs() + 1) / spectrum.kappa();
    let circle: Vec<Spinor4> = (0..WINDING_POINTS)
        .into_par_iter()
        .map(|j| {
            let t = TAU * j as f64 / WINDING_POINTS as f64;
            field_at(spectrum, &Vector2::new(winding_radius * t.cos(), winding_radius * t.sin()))
        })
        .collect();
    let global = circle.iter().flat_map(|s| s.iter().map(|z| z.norm())).fold(0.0, f64::max);
    let windings = std::array::from_fn(|c| {
        let values: Vec<Complex64> = circle.iter().map(|s| s[c]).collect();
        winding_number(&values, AMPLITUDE_FLOOR * global)
    });
    Ok(ComponentSynthesis {
        radii: radii.to_vec(),
        angles,
        fields,
        winding_radius,
        windings,
    })
}
