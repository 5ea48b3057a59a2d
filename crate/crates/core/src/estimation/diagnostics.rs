//! Residual moments, the Jarque-Bera test and Q-Q plot data.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::{EstimationError, Result};

/// Minimum sample size for [`residual_diagnostics`].
pub const MIN_RESIDUALS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub n: usize,
    pub mean: f64,
    /// Population (biased) standard deviation.
    pub std_dev: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub jarque_bera_stat: f64,
    pub jarque_bera_p: f64,
    /// `(theoretical, sample)` quantile pairs, sample quantiles ascending.
    pub qq_points: Vec<(f64, f64)>,
}

/// Moment-based normality summary.
///
/// `JB = n (skew^2 / 6 + (kurt - 3)^2 / 24)`, referred to a chi-square with
/// two degrees of freedom. Theoretical Q-Q quantiles are `Phi^-1((i - 0.5)/n)`.
pub fn residual_diagnostics(residuals: &[f64]) -> Result<ResidualReport> {
    let n = residuals.len();
    if n < MIN_RESIDUALS {
        return Err(EstimationError::TooFewObservations {
            needed: MIN_RESIDUALS,
            found: n,
        });
    }
    if residuals.iter().any(|v| !v.is_finite()) {
        return Err(EstimationError::InvalidInput("non-finite residual".into()));
    }
    let n_f = n as f64;
    let mean = residuals.iter().sum::<f64>() / n_f;
    let moment = |p: i32| residuals.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n_f;
    let m2 = moment(2);
    if m2 <= f64::EPSILON * mean.abs().max(1.0) {
        return Err(EstimationError::ZeroVariance("residuals"));
    }
    let skewness = moment(3) / m2.powf(1.5);
    let kurtosis = moment(4) / (m2 * m2);
    let excess_kurtosis = kurtosis - 3.0;
    let jarque_bera_stat = n_f * (skewness.powi(2) / 6.0 + excess_kurtosis.powi(2) / 24.0);
    let jarque_bera_p = ChiSquared::new(2.0)
        .expect("two degrees of freedom")
        .sf(jarque_bera_stat);

    let mut sorted = residuals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    let qq_points = sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (normal.inverse_cdf((i as f64 + 0.5) / n_f), v))
        .collect();

    Ok(ResidualReport {
        n,
        mean,
        std_dev: m2.sqrt(),
        skewness,
        excess_kurtosis,
        jarque_bera_stat,
        jarque_bera_p,
        qq_points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Equal-width histogram over the data range. `bins = None` picks Sturges'
/// rule, `ceil(log2 n) + 1`.
pub fn histogram(values: &[f64], bins: Option<usize>) -> Vec<HistogramBin> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return Vec::new();
    }
    let n_bins = bins
        .unwrap_or_else(|| (finite.len() as f64).log2().ceil() as usize + 1)
        .max(1);
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / n_bins as f64
    } else {
        1.0
    };
    let mut out: Vec<HistogramBin> = (0..n_bins)
        .map(|b| HistogramBin {
            left: lo + b as f64 * width,
            right: if b + 1 == n_bins && hi > lo {
                hi
            } else {
                lo + (b + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for v in finite {
        let b = (((v - lo) / width) as usize).min(n_bins - 1);
        out[b].count += 1;
    }
    out
}
