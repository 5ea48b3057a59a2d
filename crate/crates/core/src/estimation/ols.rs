//! Simple linear regression `y = b0 + b1 x` with Gaussian inference.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{EstimationError, Result};

/// Number of parameters counted by the information criterion: intercept,
/// slope and residual variance.
pub const AIC_PARAMETERS: usize = 3;

/// One row of a coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub estimate: f64,
    pub std_err: f64,
    pub t_stat: f64,
    pub p_value: f64,
    /// Two-sided 95% confidence interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: Coefficient,
    pub slope: Coefficient,
    pub n: usize,
    pub rss: f64,
    pub r2: f64,
    pub r2_adjusted: f64,
    pub aic: f64,
    pub residuals: Vec<f64>,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept.estimate + self.slope.estimate * x
    }
}

/// Gaussian AIC, `2k + n ln(RSS/n) + n (1 + ln 2 pi)`.
///
/// `RSS/n` is floored at the smallest positive double so exact fits stay finite.
pub fn gaussian_aic(rss: f64, n: usize, k: usize) -> f64 {
    let n_f = n as f64;
    let sigma2 = (rss / n_f).max(f64::MIN_POSITIVE);
    2.0 * k as f64 + n_f * sigma2.ln() + n_f * (1.0 + (2.0 * std::f64::consts::PI).ln())
}

fn coefficient(estimate: f64, std_err: f64, dist: &StudentsT) -> Coefficient {
    let t_stat = estimate / std_err;
    let p_value = if std_err == 0.0 {
        if estimate == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        2.0 * dist.sf(t_stat.abs())
    };
    let q = dist.inverse_cdf(0.975);
    Coefficient {
        estimate,
        std_err,
        t_stat,
        p_value,
        ci_low: estimate - q * std_err,
        ci_high: estimate + q * std_err,
    }
}

pub fn simple_ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(EstimationError::InvalidInput(format!(
            "regressor has {} values, response has {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(EstimationError::TooFewObservations {
            needed: 3,
            found: n,
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(EstimationError::InvalidInput(
            "non-finite observation".into(),
        ));
    }
    let n_f = n as f64;
    let x_mean = x.iter().sum::<f64>() / n_f;
    let y_mean = y.iter().sum::<f64>() / n_f;
    let sxx: f64 = x.iter().map(|v| (v - x_mean).powi(2)).sum();
    if sxx <= f64::EPSILON * x_mean.abs().max(1.0) * n_f {
        return Err(EstimationError::ZeroVariance("regressor"));
    }
    let sxy: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - x_mean) * (b - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let residuals: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| b - intercept - slope * a)
        .collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let df = n_f - 2.0;
    let r2_adjusted = 1.0 - (1.0 - r2) * (n_f - 1.0) / df;

    let sigma2 = rss / df;
    let se_slope = (sigma2 / sxx).sqrt();
    let se_intercept = (sigma2 * (1.0 / n_f + x_mean * x_mean / sxx)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");

    Ok(LinearFit {
        intercept: coefficient(intercept, se_intercept, &dist),
        slope: coefficient(slope, se_slope, &dist),
        n,
        rss,
        r2,
        r2_adjusted,
        aic: gaussian_aic(rss, n, AIC_PARAMETERS),
        residuals,
    })
}
