use std::f64::consts::TAU;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::algebra::{negative_energy_bispinor, plane_wave_bispinor, Kinematics, PolarizationSpinor, Spinor4};
use crate::error::{Error, Result};
use crate::numeric;
use crate::operators::{projected_position, Representation};

/// Narrow Gaussian packet around a central momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketConfig {
    /// Momentum-space width δ of |g|².
    pub width: f64,
    /// Gauss-Legendre nodes per axis on [p₀ − 6δ, p₀ + 6δ].
    pub nodes: usize,
    pub w: PolarizationSpinor,
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self {
            width: 1e-4,
            nodes: 12,
            w: PolarizationSpinor::up(),
        }
    }
}

/// ⟨r⟩(t) for the canonical and projected position operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ZitterTrace {
    pub times: Vec<f64>,
    pub canonical: Vec<Vector3<f64>>,
    pub projected: Vec<Vector3<f64>>,
}

struct Node {
    weight: f64,
    energy_gradient: Vector3<f64>,
    energy: f64,
    phi: [Spinor4; 2],
    grad: [[Spinor4; 3]; 2],
    connection: [nalgebra::Matrix4<Complex64>; 3],
}

/// Uniform times covering `periods` zitterbewegung periods 2π/(2E).
pub fn default_times(kin: &Kinematics, periods: f64, n: usize) -> Vec<f64> {
    let t_max = periods * TAU / (2.0 * kin.energy());
    (0..n).map(|j| t_max * j as f64 / n as f64).collect()
}

/// ψ(p, t) = g(p)[c_e W(p) e^{−iEt} + c_p V(p) e^{iEt}] around `kin`.
pub fn zitterbewegung_trace(kin: &Kinematics, mix: [Complex64; 2], times: &[f64], config: &PacketConfig) -> Result<ZitterTrace> {
    let n = (mix[0].norm_sqr() + mix[1].norm_sqr()).sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Precondition("electron/positron mix must be nonzero".into()));
    }
    let mix = [mix[0] / n, mix[1] / n];
    let delta = config.width;
    if !(delta > 0.0 && delta.is_finite()) || config.nodes < 2 {
        return Err(Error::Precondition("packet width must be positive with at least 2 nodes".into()));
    }
    let p0 = *kin.momentum();
    let (x, wx) = numeric::gauss_legendre_interval(config.nodes, -6.0 * delta, 6.0 * delta);
    let mass = kin.mass();
    let w = config.w;
    let h = 1e-2 * delta;
    let position = projected_position(Representation::Standard);

    let amplitude = move |q: &Vector3<f64>, sign: usize| -> Spinor4 {
        let Ok(k) = Kinematics::new(*q, mass) else {
            return Spinor4::from_element(Complex64::new(f64::NAN, f64::NAN));
        };
        let g = (-(q - p0).norm_squared() / (4.0 * delta * delta)).exp();
        let b = if sign == 0 { plane_wave_bispinor(&k, &w) } else { negative_energy_bispinor(&k, &w) };
        b.components * Complex64::from(g)
    };

    let mut points = Vec::with_capacity(x.len().pow(3));
    for (a, wa) in x.iter().zip(&wx) {
        for (b, wb) in x.iter().zip(&wx) {
            for (c, wc) in x.iter().zip(&wx) {
                points.push((p0 + Vector3::new(*a, *b, *c), wa * wb * wc));
            }
        }
    }
    let nodes: Vec<Node> = points
        .par_iter()
        .map(|(q, weight)| {
            let k = Kinematics::new(*q, mass)?;
            let phi = [amplitude(q, 0), amplitude(q, 1)];
            let grad = [0, 1].map(|s| [0, 1, 2].map(|ax| numeric::partial(&|y: &Vector3<f64>| amplitude(y, s), q, ax, h)));
            let connection = [0, 1, 2].map(|i| position[i].matrix_part().raw(&k));
            Ok(Node {
                weight: *weight,
                energy_gradient: q / k.energy(),
                energy: k.energy(),
                phi,
                grad,
                connection,
            })
        })
        .collect::<Result<_>>()?;

    let (canonical, projected): (Vec<Vector3<f64>>, Vec<Vector3<f64>>) = times
        .par_iter()
        .map(|&t| {
            let mut norm = Vec::with_capacity(nodes.len());
            let mut r: [Vec<Complex64>; 3] = Default::default();
            let mut a: [Vec<Complex64>; 3] = Default::default();
            for nd in &nodes {
                let ph = [
                    mix[0] * Complex64::from_polar(1.0, -nd.energy * t),
                    mix[1] * Complex64::from_polar(1.0, nd.energy * t),
                ];
                let psi = nd.phi[0] * ph[0] + nd.phi[1] * ph[1];
                norm.push(nd.weight * psi.norm_squared());
                for k in 0..3 {
                    let drift = Complex64::new(0.0, t * nd.energy_gradient[k]);
                    let d = (nd.grad[0][k] - nd.phi[0] * drift) * ph[0] + (nd.grad[1][k] + nd.phi[1] * drift) * ph[1];
                    r[k].push(psi.dotc(&(d * Complex64::i())) * nd.weight);
                    a[k].push(psi.dotc(&(nd.connection[k] * psi)) * nd.weight);
                }
            }
            let total = numeric::sum_f64(&norm);
            let rv = Vector3::from_fn(|k, _| numeric::sum_c64(&r[k]).re / total);
            let av = Vector3::from_fn(|k, _| numeric::sum_c64(&a[k]).re / total);
            (rv, rv + av)
        })
        .unzip();
    Ok(ZitterTrace {
        times: times.to_vec(),
        canonical,
        projected,
    })
}

/// Least-squares line fit y ≈ a + b t; returns (a, b).
pub fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let tm = numeric::sum_f64(t) / n;
    let ym = numeric::sum_f64(y) / n;
    let sxy = numeric::sum_f64(&t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)).collect::<Vec<_>>());
    let sxx = numeric::sum_f64(&t.iter().map(|a| (a - tm).powi(2)).collect::<Vec<_>>());
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (ym - b * tm, b)
}

/// Dominant angular frequency of a uniformly sampled, detrended signal, by
/// zero-padded FFT with parabolic peak interpolation.
pub fn dominant_frequency(signal: &[f64], dt: f64) -> Option<f64> {
    if signal.len() < 4 || dt <= 0.0 {
        return None;
    }
    let n = (signal.len() * 8).next_power_of_two();
    let mut buf: Vec<Complex64> = signal.iter().map(|x| Complex64::from(*x)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf[..n / 2].iter().map(|z| z.norm()).collect();
    let (k, _) = mag.iter().enumerate().skip(1).max_by(|a, b| a.1.total_cmp(b.1))?;
    let shift = if k + 1 < mag.len() {
        let (a, b, c) = (mag[k - 1], mag[k], mag[k + 1]);
        let den = a - 2.0 * b + c;
        if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 }
    } else {
        0.0
    };
    Some(TAU * (k as f64 + shift) / (n as f64 * dt))
}

/// Drift velocity, oscillation amplitude and frequency of a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZitterAnalysis {
    pub slope: Vector3<f64>,
    /// Largest deviation of the canonical trace from its linear fit.
    pub amplitude: f64,
    /// Angular frequency of the oscillation; `None` for a flat spectrum.
    pub frequency: Option<f64>,
    /// Largest deviation of the projected trace from its linear fit.
    pub projected_nonlinearity: f64,
}

/// Oscillation amplitudes below this count as no oscillation.
pub const FLAT_THRESHOLD: f64 = 1e-9;

fn residuals(t: &[f64], series: &[Vector3<f64>], k: usize) -> (f64, Vec<f64>) {
    let y: Vec<f64> = series.iter().map(|v| v[k]).collect();
    let (a, b) = linear_fit(t, &y);
    (b, y.iter().zip(t).map(|(y, t)| y - a - b * t).collect())
}

pub fn analyze(trace: &ZitterTrace) -> ZitterAnalysis {
    let t = &trace.times;
    let mut slope = Vector3::zeros();
    let mut amplitude = 0.0f64;
    let mut strongest: Option<Vec<f64>> = None;
    let mut projected_nonlinearity = 0.0f64;
    for k in 0..3 {
        let (b, res) = residuals(t, &trace.canonical, k);
        slope[k] = b;
        let amp = res.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if amp > amplitude {
            amplitude = amp;
            strongest = Some(res);
        }
        let (_, pres) = residuals(t, &trace.projected, k);
        projected_nonlinearity = pres.iter().fold(projected_nonlinearity, |m, x| m.max(x.abs()));
    }
    let dt = if t.len() > 1 { t[1] - t[0] } else { 0.0 };
    let frequency = strongest.filter(|_| amplitude > FLAT_THRESHOLD).and_then(|res| dominant_frequency(&res, dt));
    ZitterAnalysis {
        slope,
        amplitude,
        frequency,
        projected_nonlinearity,
    }
}
