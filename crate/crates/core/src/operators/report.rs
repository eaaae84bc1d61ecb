use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Kinematics;
use crate::error::Result;
use crate::format::serialize_f64;

/// Whether an identity passes below or above its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// pass iff max_deviation < tolerance
    #[default]
    Upper,
    /// pass iff max_deviation > tolerance (non-vanishing quantities)
    Lower,
}

/// Outcome of checking one identity over a set of sampled momenta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorReport {
    pub identity: String,
    #[serde(serialize_with = "serialize_f64")]
    pub tolerance: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub max_deviation: f64,
    pub samples: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "is_upper")]
    pub bound: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn is_upper(b: &Bound) -> bool {
    *b == Bound::Upper
}

impl OperatorReport {
    pub fn new(identity: impl Into<String>, tolerance: f64, max_deviation: f64, samples: usize) -> Self {
        Self::with_bound(identity, tolerance, max_deviation, samples, Bound::Upper)
    }

    pub fn with_bound(identity: impl Into<String>, tolerance: f64, max_deviation: f64, samples: usize, bound: Bound) -> Self {
        let pass = match bound {
            Bound::Upper => max_deviation < tolerance,
            Bound::Lower => max_deviation > tolerance,
        };
        Self {
            identity: identity.into(),
            tolerance,
            max_deviation,
            samples,
            pass,
            bound,
            skipped: None,
            note: None,
        }
    }

    /// A row that was not evaluated; it counts as passing.
    pub fn skipped(identity: impl Into<String>, tolerance: f64, reason: impl Into<String>) -> Self {
        Self {
            identity: identity.into(),
            tolerance,
            max_deviation: 0.0,
            samples: 0,
            pass: true,
            bound: Bound::Upper,
            skipped: Some(reason.into()),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Seeded momenta: |p| log-uniform in [1e-2, 1e2], direction uniform on the
/// sphere; masses are cycled through `masses`.
pub fn sample_kinematics(seed: u64, n: usize, masses: &[f64]) -> Result<Vec<Kinematics>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let magnitude = 10f64.powf(rng.random_range(-2.0..=2.0));
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let rho = (1.0 - z * z).sqrt();
            let p = Vector3::new(rho * phi.cos(), rho * phi.sin(), z) * magnitude;
            Kinematics::new(p, masses[i % masses.len()])
        })
        .collect()
}

/// Evaluates `deviation` at every sample in parallel and reduces with max.
/// A failing evaluation makes the row fail with an infinite deviation.
pub fn check_identity<F>(identity: &str, tolerance: f64, samples: &[Kinematics], deviation: F) -> OperatorReport
where
    F: Fn(&Kinematics) -> Result<f64> + Sync,
{
    let results: Vec<Result<f64>> = samples.par_iter().map(&deviation).collect();
    let mut worst = 0.0f64;
    let mut error = None;
    for r in results {
        match r {
            Ok(d) if d.is_nan() => worst = f64::INFINITY,
            Ok(d) => worst = worst.max(d),
            Err(e) => {
                worst = f64::INFINITY;
                error.get_or_insert(e.to_string());
            }
        }
    }
    let report = OperatorReport::new(identity, tolerance, worst, samples.len());
    match error {
        Some(e) => report.with_note(e),
        None => report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn sampler_is_deterministic_and_in_range() {
        let a = sample_kinematics(3, 50, &[0.1, 1.0, 10.0]).unwrap();
        let b = sample_kinematics(3, 50, &[0.1, 1.0, 10.0]).unwrap();
        assert_eq!(a, b);
        for k in &a {
            let n = k.momentum().norm();
            assert!((1e-2..=1e2 * (1.0 + 1e-12)).contains(&n));
        }
        assert_eq!(a[4].mass(), 1.0);
    }

    #[test]
    fn report_pass_rule() {
        assert!(OperatorReport::new("x", 1e-8, 1e-9, 1).pass);
        assert!(!OperatorReport::new("x", 1e-8, 1e-8, 1).pass);
        assert!(OperatorReport::with_bound("x", 0.1, 0.5, 1, Bound::Lower).pass);
        let k = sample_kinematics(1, 4, &[1.0]).unwrap();
        let r = check_identity("err", 1.0, &k, |_| Err(Error::Massless));
        assert!(!r.pass && r.note.is_some());
    }

    #[test]
    fn report_json_layout() {
        let r = OperatorReport::new("id", 0.125, 0.0625, 50);
        let v = serde_json::to_string(&r).unwrap();
        assert_eq!(
            v,
            r#"{"identity":"id","tolerance":1.2500000000000000e-1,"max_deviation":6.2500000000000000e-2,"samples":50,"pass":true}"#
        );
    }
}
