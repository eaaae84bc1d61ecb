//! Numerical building blocks: finite differences, quadrature rules, summation,
//! spectral differentiation and Bessel functions.

use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3, Vector4};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::algebra::Mat4;

/// Relative step used by every momentum-space finite difference.
pub const RELATIVE_STEP: f64 = 1e-5;

/// Default finite-difference step at momentum `p`.
pub fn default_step(p: &Vector3<f64>) -> f64 {
    RELATIVE_STEP * p.norm().max(1.0)
}

/// Values that can be linearly combined by the difference formulas.
pub trait Linear: Clone {
    fn lincomb(a: f64, x: &Self, b: f64, y: &Self) -> Self;
}

impl Linear for f64 {
    fn lincomb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        a * x + b * y
    }
}

impl Linear for Complex64 {
    fn lincomb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x * a + y * b
    }
}

impl Linear for Mat4 {
    fn lincomb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x.map(|z| z * a) + y.map(|z| z * b)
    }
}

impl Linear for Vector4<Complex64> {
    fn lincomb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x.map(|z| z * a) + y.map(|z| z * b)
    }
}

impl Linear for Vector2<Complex64> {
    fn lincomb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        x.map(|z| z * a) + y.map(|z| z * b)
    }
}

fn central<T: Linear, F: Fn(&Vector3<f64>) -> T>(f: &F, p: &Vector3<f64>, axis: usize, h: f64) -> T {
    let mut plus = *p;
    let mut minus = *p;
    plus[axis] += h;
    minus[axis] -= h;
    T::lincomb(0.5 / h, &f(&plus), -0.5 / h, &f(&minus))
}

/// Partial derivative along `axis` by central differences with one level of
/// Richardson extrapolation (error O(h⁴)).
pub fn partial<T: Linear, F: Fn(&Vector3<f64>) -> T>(
    f: &F,
    p: &Vector3<f64>,
    axis: usize,
    h: f64,
) -> T {
    let coarse = central(f, p, axis, h);
    let fine = central(f, p, axis, 0.5 * h);
    T::lincomb(4.0 / 3.0, &fine, -1.0 / 3.0, &coarse)
}

/// Pairwise (cascade) summation; the reduction order depends only on the length.
pub fn pairwise_sum<T, F>(items: &[T], zero: T, add: &F) -> T
where
    T: Clone,
    F: Fn(&T, &T) -> T,
{
    match items.len() {
        0 => zero,
        1 => items[0].clone(),
        n if n <= 8 => items[1..].iter().fold(items[0].clone(), |acc, x| add(&acc, x)),
        n => {
            let (lo, hi) = items.split_at(n / 2);
            add(&pairwise_sum(lo, zero.clone(), add), &pairwise_sum(hi, zero, add))
        }
    }
}

pub fn sum_f64(items: &[f64]) -> f64 {
    pairwise_sum(items, 0.0, &|a, b| a + b)
}

pub fn sum_c64(items: &[Complex64]) -> Complex64 {
    pairwise_sum(items, Complex64::new(0.0, 0.0), &|a, b| a + b)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped onto [a, b].
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|wi| wi * half).collect(),
    )
}

/// Derivative of a 2π-periodic function from uniform samples, via FFT.
/// The Nyquist mode (even lengths) is discarded.
pub fn spectral_derivative(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut buf = samples.to_vec();
    forward.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = signed_index(k, n);
        *c *= if n.is_multiple_of(2) && k == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, kk as f64 / n as f64)
        };
    }
    inverse.process(&mut buf);
    buf
}

/// Maps an FFT bin index to its signed frequency.
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Bessel function of the first kind of integer order, from the periodic
/// integral J_n(x) = (1/2π)∮ exp(i(x sin τ − nτ)) dτ (trapezoid, spectrally exact).
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let samples = 2 * (x.abs().ceil() as usize + n.unsigned_abs() as usize) + 64;
    let terms: Vec<f64> = (0..samples)
        .map(|k| {
            let tau = 2.0 * PI * k as f64 / samples as f64;
            (x * tau.sin() - n as f64 * tau).cos()
        })
        .collect();
    sum_f64(&terms) / samples as f64
}

/// Max-abs entry of a complex matrix.
pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(7);
        // degree 12 monomial: ∫ x^12 = 2/13
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert_relative_eq!(s, 2.0 / 13.0, epsilon = 1e-14);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn gauss_legendre_interval_gaussian() {
        let (x, w) = gauss_legendre_interval(40, -8.0, 8.0);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (-x * x / 2.0).exp()).sum();
        assert_relative_eq!(s, (2.0 * PI).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn richardson_partial_is_fourth_order() {
        let f = |p: &Vector3<f64>| (p[0] * 2.0).sin() * p[1];
        let p = Vector3::new(0.3, 1.5, 0.0);
        let d = partial(&f, &p, 0, 1e-3);
        assert_relative_eq!(d, 2.0 * (0.6f64).cos() * 1.5, epsilon = 1e-11);
    }

    #[test]
    fn spectral_derivative_is_exact_for_trig_polynomials() {
        let n = 64;
        let s: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                Complex64::new(0.0, 3.0 * t).exp() + Complex64::new((2.0 * t).cos(), 0.0)
            })
            .collect();
        let d = spectral_derivative(&s);
        for (k, dk) in d.iter().enumerate() {
            let t = 2.0 * PI * k as f64 / n as f64;
            let exact = Complex64::new(0.0, 3.0) * Complex64::new(0.0, 3.0 * t).exp()
                - Complex64::new(2.0 * (2.0 * t).sin(), 0.0);
            assert!((dk - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn bessel_reference_values() {
        // Abramowitz & Stegun table values
        assert_relative_eq!(bessel_j(0, 1.0), 0.765_197_686_557_966_6, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(1, 2.0), 0.576_724_807_756_873_4, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(-1, 2.0), -0.576_724_807_756_873_4, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(3, 5.0), 0.364_831_230_613_666_9, epsilon = 1e-14);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        assert_eq!(sum_f64(&v), 5050.0);
    }
}
