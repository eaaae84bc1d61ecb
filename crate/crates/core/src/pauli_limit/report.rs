use serde::Serialize;

use crate::error::Result;
use crate::format::{serialize_f64, serialize_f64_seq};

/// Outcome of a halving study: residuals of an approximate identity at
/// successively halved p/m, with the observed convergence order.
///
/// Shares the keys of `OperatorReport`; `tolerance` holds the minimum
/// acceptable order and `max_deviation` the largest residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub identity: String,
    #[serde(serialize_with = "serialize_f64")]
    pub tolerance: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub max_deviation: f64,
    pub samples: usize,
    pub pass: bool,
    /// Smallest order over consecutive halvings; infinite when every
    /// residual vanishes (written as null).
    #[serde(serialize_with = "serialize_f64")]
    pub observed_order: f64,
    #[serde(serialize_with = "serialize_f64_seq")]
    pub ratios: Vec<f64>,
    #[serde(serialize_with = "serialize_f64_seq")]
    pub residuals: Vec<f64>,
}

/// Residuals at or below this are treated as exact zeros.
const ZERO_RESIDUAL: f64 = 1e-300;

/// Order of a residual sequence log(r_k/r_{k+1})/log(x_k/x_{k+1}), minimized
/// over consecutive pairs. Pairs of vanishing residuals are skipped.
pub fn observed_order(ratios: &[f64], residuals: &[f64]) -> f64 {
    let mut order = f64::INFINITY;
    for k in 1..ratios.len().min(residuals.len()) {
        let (a, b) = (residuals[k - 1], residuals[k]);
        if a <= ZERO_RESIDUAL && b <= ZERO_RESIDUAL {
            continue;
        }
        let o = if b <= ZERO_RESIDUAL {
            f64::INFINITY
        } else {
            (a / b).ln() / (ratios[k - 1] / ratios[k]).ln()
        };
        order = order.min(o);
    }
    order
}

impl ExpansionReport {
    pub fn new(identity: impl Into<String>, min_order: f64, ratios: Vec<f64>, residuals: Vec<f64>) -> Self {
        let order = observed_order(&ratios, &residuals);
        let worst = residuals.iter().fold(0.0f64, |m, r| if r.is_nan() { f64::INFINITY } else { m.max(*r) });
        Self {
            identity: identity.into(),
            tolerance: min_order,
            max_deviation: worst,
            samples: residuals.len(),
            pass: worst.is_finite() && order >= min_order,
            observed_order: order,
            ratios,
            residuals,
        }
    }
}

/// Evaluates `residual` at `start`, start/2, start/4, … (`levels` values).
pub fn halving_study<F>(identity: &str, min_order: f64, start: f64, levels: usize, residual: F) -> Result<ExpansionReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratios: Vec<f64> = (0..levels).map(|k| start / 2f64.powi(k as i32)).collect();
    let residuals = ratios.iter().map(|r| residual(*r)).collect::<Result<Vec<_>>>()?;
    Ok(ExpansionReport::new(identity, min_order, ratios, residuals))
}
