use serde::{Deserialize, Serialize};

use super::ols::{simple_ols, Coefficient, LinearFit, AIC_PARAMETERS};
use super::{EstimationError, Result};
use crate::dataset::ArticleAggregate;

/// `log R = log A + gamma log S`, fitted by least squares in log-log space.
///
/// The AIC is computed on the log scale, so it is not directly comparable with
/// the null model's natural-scale AIC; `rss`, `n_articles` and `k` are kept so
/// any other convention can be recomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub log_a: f64,
    pub gamma: f64,
    pub std_err_log_a: f64,
    pub std_err_gamma: f64,
    pub log_a_coef: Coefficient,
    pub gamma_coef: Coefficient,
    pub r2: f64,
    pub r2_adjusted: f64,
    pub aic: f64,
    pub rss: f64,
    pub k: usize,
    pub n_articles: usize,
    /// Articles dropped because nobody disclosed (log undefined).
    pub n_excluded_no_disclosure: usize,
    /// Articles dropped because they had no comments.
    pub n_excluded_no_comments: usize,
    /// Log-scale residuals, in input order of the articles used.
    pub residuals: Vec<f64>,
}

impl PowerLawFit {
    pub fn a(&self) -> f64 {
        self.log_a.exp()
    }

    /// Fitted comment total for `s` disclosing users.
    pub fn predict(&self, s: f64) -> f64 {
        self.a() * s.powf(self.gamma)
    }
}

/// `R = b0 + b1 S` in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullLinearFit {
    pub beta0: f64,
    pub beta1: f64,
    pub beta0_coef: Coefficient,
    pub beta1_coef: Coefficient,
    pub r2: f64,
    pub r2_adjusted: f64,
    pub aic: f64,
    pub rss: f64,
    pub k: usize,
    pub n_articles: usize,
    pub n_excluded_no_comments: usize,
    pub residuals: Vec<f64>,
}

impl NullLinearFit {
    pub fn predict(&self, s: f64) -> f64 {
        self.beta0 + self.beta1 * s
    }
}

/// Articles entering the power-law fit: at least one comment and at least one
/// discloser.
pub fn power_law_sample(aggregates: &[ArticleAggregate]) -> Vec<&ArticleAggregate> {
    aggregates.iter().filter(|a| a.r >= 1 && a.s >= 1).collect()
}

/// Articles entering the null fit: at least one comment.
pub fn null_sample(aggregates: &[ArticleAggregate]) -> Vec<&ArticleAggregate> {
    aggregates.iter().filter(|a| a.r >= 1).collect()
}

fn regress(sample: &[&ArticleAggregate], transform: fn(u64) -> f64) -> Result<LinearFit> {
    if sample.len() < 3 {
        return Err(EstimationError::TooFewObservations {
            needed: 3,
            found: sample.len(),
        });
    }
    let x: Vec<f64> = sample.iter().map(|a| transform(a.s)).collect();
    let y: Vec<f64> = sample.iter().map(|a| transform(a.r)).collect();
    simple_ols(&x, &y)
}

pub fn fit_power_law(aggregates: &[ArticleAggregate]) -> Result<PowerLawFit> {
    let with_comments = null_sample(aggregates);
    let sample = power_law_sample(aggregates);
    let fit = regress(&sample, |v| (v as f64).ln())?;
    Ok(PowerLawFit {
        log_a: fit.intercept.estimate,
        gamma: fit.slope.estimate,
        std_err_log_a: fit.intercept.std_err,
        std_err_gamma: fit.slope.std_err,
        log_a_coef: fit.intercept,
        gamma_coef: fit.slope,
        r2: fit.r2,
        r2_adjusted: fit.r2_adjusted,
        aic: fit.aic,
        rss: fit.rss,
        k: AIC_PARAMETERS,
        n_articles: fit.n,
        n_excluded_no_disclosure: with_comments.len() - sample.len(),
        n_excluded_no_comments: aggregates.len() - with_comments.len(),
        residuals: fit.residuals,
    })
}

pub fn fit_null_linear(aggregates: &[ArticleAggregate]) -> Result<NullLinearFit> {
    let sample = null_sample(aggregates);
    let fit = regress(&sample, |v| v as f64)?;
    Ok(NullLinearFit {
        beta0: fit.intercept.estimate,
        beta1: fit.slope.estimate,
        beta0_coef: fit.intercept,
        beta1_coef: fit.slope,
        r2: fit.r2,
        r2_adjusted: fit.r2_adjusted,
        aic: fit.aic,
        rss: fit.rss,
        k: AIC_PARAMETERS,
        n_articles: fit.n,
        n_excluded_no_comments: aggregates.len() - sample.len(),
        residuals: fit.residuals,
    })
}
