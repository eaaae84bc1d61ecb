use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{fw_unitary, plane_wave_bispinor, Kinematics, PolarizationSpinor, Spinor4};
use crate::error::{Error, Result};
use crate::numeric;

pub const DEFAULT_N_PHI: usize = 256;
pub const DEFAULT_N_RADIAL: usize = 64;
/// Default annulus width relative to the ring radius κ.
pub const DEFAULT_RELATIVE_WIDTH: f64 = 0.05;
/// Half-width of the radial quadrature interval in units of σ.
pub const RADIAL_SPAN: f64 = 8.0;
pub const MAX_ELL: i32 = 100;

/// Transverse-momentum profile of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(try_from = "ProfileJson", into = "ProfileJson")]
pub enum RadialProfile {
    /// f ∝ δ(p⊥ − κ): the ideal Bessel beam.
    #[default]
    DeltaRing,
    /// f ∝ exp(−(p⊥ − κ)²/2σ²), σ defaulting to 0.05κ.
    GaussianAnnulus { width: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ProfileKind {
    DeltaRing,
    GaussianAnnulus,
}

// flat mirror of RadialProfile: internally tagged enums cannot carry numbers
// when serde_json keeps arbitrary-precision literals
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileJson {
    kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<f64>,
}

impl TryFrom<ProfileJson> for RadialProfile {
    type Error = Error;

    fn try_from(p: ProfileJson) -> Result<Self> {
        match (p.kind, p.width) {
            (ProfileKind::DeltaRing, None) => Ok(RadialProfile::DeltaRing),
            (ProfileKind::DeltaRing, Some(_)) => Err(Error::InvalidBeam("delta_ring takes no width".into())),
            (ProfileKind::GaussianAnnulus, width) => Ok(RadialProfile::GaussianAnnulus { width }),
        }
    }
}

impl From<RadialProfile> for ProfileJson {
    fn from(p: RadialProfile) -> Self {
        match p {
            RadialProfile::DeltaRing => ProfileJson {
                kind: ProfileKind::DeltaRing,
                width: None,
            },
            RadialProfile::GaussianAnnulus { width } => ProfileJson {
                kind: ProfileKind::GaussianAnnulus,
                width,
            },
        }
    }
}

fn default_n_phi() -> usize {
    DEFAULT_N_PHI
}

fn default_n_radial() -> usize {
    DEFAULT_N_RADIAL
}

/// Beam parameters as read from a JSON file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamParams {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "m")]
    pub mass: f64,
    pub theta0: f64,
    pub ell: i32,
    pub w: PolarizationSpinor,
    #[serde(default)]
    pub profile: RadialProfile,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
    #[serde(default = "default_n_radial")]
    pub n_radial: usize,
}

impl BeamParams {
    pub fn new(energy: f64, mass: f64, theta0: f64, ell: i32, w: PolarizationSpinor) -> Self {
        Self {
            energy,
            mass,
            theta0,
            ell,
            w,
            profile: RadialProfile::DeltaRing,
            n_phi: DEFAULT_N_PHI,
            n_radial: DEFAULT_N_RADIAL,
        }
    }

    pub fn with_profile(mut self, profile: RadialProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_grid(mut self, n_phi: usize, n_radial: usize) -> Self {
        self.n_phi = n_phi;
        self.n_radial = n_radial;
        self
    }

    pub fn annulus(self) -> Self {
        self.with_profile(RadialProfile::GaussianAnnulus { width: None })
    }

    pub fn with_spin(mut self, w: PolarizationSpinor) -> Self {
        self.w = w;
        self
    }

    /// |p| = √(E² − m²).
    pub fn momentum(&self) -> f64 {
        (self.energy * self.energy - self.mass * self.mass).sqrt()
    }

    /// Ring radius κ = p sin θ₀.
    pub fn kappa(&self) -> f64 {
        self.momentum() * self.theta0.sin()
    }

    /// Δ = (1 − m/E) sin²θ₀.
    pub fn delta(&self) -> f64 {
        (1.0 - self.mass / self.energy) * self.theta0.sin().powi(2)
    }
}

/// One quadrature node of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSample {
    pub kinematics: Kinematics,
    pub rho: f64,
    pub phi: f64,
    /// Quadrature weight (1 on the ring; ρ dρ dφ on the annulus).
    pub weight: f64,
    /// Amplitude without the vortex phase: N f(ρ) W(p).
    pub envelope: Spinor4,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Layout {
    Ring,
    Annulus { sigma: f64, norm: f64, radial_nodes: usize },
}

/// Monochromatic plane-wave spectrum of a Dirac-Bessel (or annular) beam.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpectrum {
    params: BeamParams,
    kappa: f64,
    p: f64,
    samples: Vec<BeamSample>,
    pub(crate) layout: Layout,
}

fn validate(params: &BeamParams) -> Result<()> {
    let BeamParams {
        energy: e,
        mass: m,
        theta0,
        ell,
        n_phi,
        ..
    } = *params;
    if !(e.is_finite() && m.is_finite() && theta0.is_finite()) {
        return Err(Error::NonFinite("beam parameters"));
    }
    if m < 0.0 {
        return Err(Error::NegativeMass(m));
    }
    if e <= m {
        return Err(Error::InvalidBeam(format!("energy {e} must exceed mass {m}")));
    }
    if !(theta0 > 0.0 && theta0 < FRAC_PI_2) {
        return Err(Error::InvalidBeam(format!("theta0 = {theta0} outside (0, π/2)")));
    }
    if ell.abs() > MAX_ELL {
        return Err(Error::InvalidBeam(format!("|ell| = {} exceeds {MAX_ELL}", ell.abs())));
    }
    if n_phi < 64 || !n_phi.is_power_of_two() {
        return Err(Error::InvalidBeam(format!("n_phi = {n_phi} must be a power of two ≥ 64")));
    }
    Ok(())
}

/// p(ρ, φ) on the energy shell: (ρcosφ, ρsinφ, √(p² − ρ²)).
fn shell_momentum(p: f64, rho: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(rho * phi.cos(), rho * phi.sin(), (p * p - rho * rho).max(0.0).sqrt())
}

pub fn build_spectrum(params: &BeamParams) -> Result<BeamSpectrum> {
    validate(params)?;
    let p = params.momentum();
    let kappa = params.kappa();
    let n_phi = params.n_phi;
    let phis: Vec<f64> = (0..n_phi).map(|j| TAU * j as f64 / n_phi as f64).collect();
    let mass = params.mass;
    let w = params.w;

    match params.profile {
        RadialProfile::DeltaRing => {
            let scale = Complex64::from(1.0 / (n_phi as f64).sqrt());
            let samples = phis
                .iter()
                .map(|&phi| {
                    let kin = Kinematics::new(shell_momentum(p, kappa, phi), mass)?;
                    Ok(BeamSample {
                        kinematics: kin,
                        rho: kappa,
                        phi,
                        weight: 1.0,
                        envelope: plane_wave_bispinor(&kin, &w).components * scale,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BeamSpectrum {
                params: *params,
                kappa,
                p,
                samples,
                layout: Layout::Ring,
            })
        }
        RadialProfile::GaussianAnnulus { width } => {
            let sigma = width.unwrap_or(DEFAULT_RELATIVE_WIDTH * kappa);
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidBeam(format!("annulus width {sigma} must be positive")));
            }
            let (lo, hi) = (kappa - RADIAL_SPAN * sigma, kappa + RADIAL_SPAN * sigma);
            if lo <= 0.0 || hi >= p {
                return Err(Error::InvalidBeam(format!(
                    "annulus [{lo}, {hi}] must lie inside p⊥ ∈ (0, {p})"
                )));
            }
            if params.n_radial < 2 {
                return Err(Error::InvalidBeam("n_radial must be at least 2".into()));
            }
            let (nodes, weights) = numeric::gauss_legendre_interval(params.n_radial, lo, hi);
            let dphi = TAU / n_phi as f64;
            let radial_norm: f64 = numeric::sum_f64(
                &nodes
                    .iter()
                    .zip(&weights)
                    .map(|(r, wr)| wr * r * dphi * n_phi as f64 * gaussian(*r, kappa, sigma).powi(2))
                    .collect::<Vec<_>>(),
            );
            let norm = 1.0 / radial_norm.sqrt();
            let mut samples = Vec::with_capacity(nodes.len() * n_phi);
            for (&rho, &wr) in nodes.iter().zip(&weights) {
                let f = Complex64::from(norm * gaussian(rho, kappa, sigma));
                for &phi in &phis {
                    let kin = Kinematics::new(shell_momentum(p, rho, phi), mass)?;
                    samples.push(BeamSample {
                        kinematics: kin,
                        rho,
                        phi,
                        weight: wr * rho * dphi,
                        envelope: plane_wave_bispinor(&kin, &w).components * f,
                    });
                }
            }
            Ok(BeamSpectrum {
                params: *params,
                kappa,
                p,
                samples,
                layout: Layout::Annulus {
                    sigma,
                    norm,
                    radial_nodes: nodes.len(),
                },
            })
        }
    }
}

fn gaussian(rho: f64, kappa: f64, sigma: f64) -> f64 {
    (-(rho - kappa).powi(2) / (2.0 * sigma * sigma)).exp()
}

impl BeamSpectrum {
    pub fn params(&self) -> &BeamParams {
        &self.params
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn momentum(&self) -> f64 {
        self.p
    }

    pub fn energy(&self) -> f64 {
        self.params.energy
    }

    pub fn samples(&self) -> &[BeamSample] {
        &self.samples
    }

    pub fn is_ring(&self) -> bool {
        self.layout == Layout::Ring
    }

    /// Annulus width σ, if any.
    pub fn width(&self) -> Option<f64> {
        match self.layout {
            Layout::Ring => None,
            Layout::Annulus { sigma, .. } => Some(sigma),
        }
    }

    /// Vortex phase e^{iℓφ}.
    pub fn vortex_phase(&self, phi: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.params.ell as f64 * phi)
    }

    /// Full amplitude a = e^{iℓφ} × envelope of sample `i`.
    pub fn amplitude(&self, i: usize) -> Spinor4 {
        let s = &self.samples[i];
        s.envelope * self.vortex_phase(s.phi)
    }

    /// Σ w |a|².
    pub fn norm_squared(&self) -> f64 {
        numeric::sum_f64(&self.samples.iter().map(|s| s.weight * s.envelope.norm_squared()).collect::<Vec<_>>())
    }

    /// max ‖H a − E a‖ over the samples.
    pub fn eigen_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                let k = &s.kinematics;
                let h = crate::algebra::hamiltonian(k.momentum(), k.mass());
                (h * s.envelope - s.envelope * Complex64::from(k.energy())).norm() / s.envelope.norm().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// Closed-form annulus amplitude at transverse momentum (p_x, p_y),
    /// optionally FW-transformed. `None` for the delta ring or off the shell.
    pub fn annulus_amplitude(&self, px: f64, py: f64, fw: bool) -> Option<Spinor4> {
        let Layout::Annulus { sigma, norm, .. } = self.layout else {
            return None;
        };
        let rho = px.hypot(py);
        if rho >= self.p {
            return None;
        }
        let phi = py.atan2(px);
        let kin = Kinematics::new(Vector3::new(px, py, (self.p * self.p - rho * rho).sqrt()), self.params.mass).ok()?;
        let mut a = plane_wave_bispinor(&kin, &self.params.w).components
            * Complex64::from(norm * gaussian(rho, self.kappa, sigma))
            * self.vortex_phase(phi);
        if fw {
            a = fw_unitary(&kin) * a;
        }
        Some(a)
    }

    /// Same beam with a different polarization.
    pub fn with_spin(&self, w: PolarizationSpinor) -> Result<BeamSpectrum> {
        build_spectrum(&self.params.with_spin(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn base() -> BeamParams {
        BeamParams::new(2.0, 1.0, PI / 6.0, 1, PolarizationSpinor::up())
    }

    #[test]
    fn ring_kinematics() {
        let s = build_spectrum(&base()).unwrap();
        assert!((s.kappa() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let pz = s.samples()[0].kinematics.momentum()[2];
        assert!((pz - 1.5).abs() < 1e-14);
        assert!(s.eigen_residual() < 1e-10);
        assert!((s.norm_squared() - 1.0).abs() < 1e-12);
        for smp in s.samples() {
            assert!((smp.kinematics.energy() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn annulus_normalized_and_on_shell() {
        let s = build_spectrum(&base().annulus().with_grid(64, 32)).unwrap();
        assert!((s.norm_squared() - 1.0).abs() < 1e-10);
        assert!(s.eigen_residual() < 1e-10);
        let smp = s.samples()[100];
        let direct = s.annulus_amplitude(smp.kinematics.momentum()[0], smp.kinematics.momentum()[1], false).unwrap();
        assert!((direct - s.amplitude(100)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = |p: BeamParams| matches!(build_spectrum(&p), Err(Error::InvalidBeam(_)));
        assert!(bad(BeamParams { energy: 1.0, ..base() }));
        assert!(bad(BeamParams { theta0: 0.0, ..base() }));
        assert!(bad(BeamParams { theta0: FRAC_PI_2, ..base() }));
        assert!(bad(BeamParams { ell: 101, ..base() }));
        assert!(bad(base().with_grid(100, 8)));
        assert!(bad(base().with_grid(32, 8)));
        assert!(bad(base().with_profile(RadialProfile::GaussianAnnulus { width: Some(0.2) })));
    }

    #[test]
    fn params_json_round_trip() {
        let json = r#"{"E":2.0,"m":1.0,"theta0":0.5,"ell":1,"w":[1.0,0.0,0.0,0.0],"profile":{"kind":"gaussian_annulus","width":0.01}}"#;
        let p: BeamParams = serde_json::from_str(json).unwrap();
        assert_eq!(p.profile, RadialProfile::GaussianAnnulus { width: Some(0.01) });
        assert_eq!(p.n_phi, DEFAULT_N_PHI);
        let ring: BeamParams =
            serde_json::from_str(r#"{"E":2.0,"m":1.0,"theta0":0.5,"ell":1,"w":[0,0,1,0],"profile":{"kind":"delta_ring"}}"#)
                .unwrap();
        assert_eq!(ring.w, PolarizationSpinor::down());
        assert!(serde_json::from_str::<BeamParams>(r#"{"E":2.0,"m":1.0,"theta0":0.5,"ell":1,"w":[1,0,1,0]}"#).is_err());
    }

    #[test]
    fn delta_closed_form() {
        assert!((base().delta() - 0.125).abs() < 1e-15);
    }
}
