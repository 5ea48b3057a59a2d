//! Least-squares fit of a strategy profile under the equilibrium conditions,
//! with the costs as free variables.
//!
//! For a fixed support pattern, stationarity gives every cost in closed form,
//! `beta_j = g_j(x_-j) + lambda_j - mu_j` with `g_j = A E[(S + 1)^gamma - S^gamma]`.
//! Complementarity forces `mu_j = 0` on withholding players and `lambda_j = 0`
//! on disclosing ones, and the remaining multiplier can be taken as zero. The
//! costs then impose no restriction on `x`, and each pattern reduces to a
//! box-constrained least squares in its mixing coordinates.

use serde::{Deserialize, Serialize};

use super::{EstimationError, Result};
use crate::config::Limits;
use crate::equilibrium::{verify_kkt, KktCertificate, Verdict};
use crate::game::{expected_increment, GameSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsqOptions {
    /// Tolerance handed to the KKT certificate check.
    pub tol: f64,
    /// Largest supported number of players.
    pub cap: usize,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            cap: Limits::default().constrained_lsq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedFit {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub beta: Vec<f64>,
    /// `sum (y_hat_j - x_j)^2`.
    pub objective: f64,
    /// Support pattern of the winner: `0` withhold, `1` disclose, `*` mix.
    pub pattern: String,
    pub patterns_searched: usize,
    /// Whether `x` passed `verify_kkt` against the recovered costs.
    pub certified: bool,
}

/// Fits `y_hat` by the closest profile that is an equilibrium of some cost
/// vector, searching all `3^n` support patterns.
pub fn fit_beta_constrained_lsq(
    y_hat: &[f64],
    a: f64,
    gamma: f64,
    opts: &LsqOptions,
) -> Result<ConstrainedFit> {
    let n = y_hat.len();
    if n == 0 {
        return Err(EstimationError::InvalidInput(
            "empty strategy vector".into(),
        ));
    }
    if n > opts.cap {
        return Err(EstimationError::Cap {
            what: "constrained least-squares",
            n,
            cap: opts.cap,
        });
    }
    if y_hat.iter().any(|v| !v.is_finite()) {
        return Err(EstimationError::InvalidInput(
            "non-finite strategy estimate".into(),
        ));
    }
    // Validates A and gamma.
    GameSpec::symmetric(n, a, gamma, 0.0)?;

    let total = 3usize.pow(n as u32);
    let mut best: Option<(f64, usize)> = None;
    for index in 0..total {
        let Some(objective) = pattern_objective(y_hat, index) else {
            continue;
        };
        if best.is_none_or(|(b, _)| objective < b) {
            best = Some((objective, index));
        }
    }
    let (objective, index) = best.ok_or_else(|| {
        EstimationError::Infeasible(format!("none of {total} support patterns admits a fit"))
    })?;

    let mut x = Vec::with_capacity(n);
    let mut pattern = String::with_capacity(n);
    let mut rest = index;
    for &y in y_hat {
        let (value, label) = match rest % 3 {
            0 => (0.0, '0'),
            1 => (1.0, '1'),
            _ => (y, '*'),
        };
        x.push(value);
        pattern.push(label);
        rest /= 3;
    }
    let beta: Vec<f64> = (0..n)
        .map(|j| {
            let others: Vec<f64> = x
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, v)| *v)
                .collect();
            expected_increment(a, gamma, &others)
        })
        .collect();
    let g = GameSpec::new(a, gamma, beta.clone())?;
    let cert = KktCertificate::new(x.clone(), vec![0.0; n], vec![0.0; n]);
    let certified = matches!(verify_kkt(&g, &cert, opts.tol)?, Verdict::Valid);
    Ok(ConstrainedFit {
        x,
        lambda: cert.lambda,
        mu: cert.mu,
        beta,
        objective,
        pattern,
        patterns_searched: total,
        certified,
    })
}

/// Objective of the best fit within one pattern; `None` when a mixing
/// coordinate's target lies outside the open unit interval (the boundary value
/// is then covered by another pattern).
fn pattern_objective(y_hat: &[f64], mut index: usize) -> Option<f64> {
    let mut objective = 0.0;
    for &y in y_hat {
        let x = match index % 3 {
            0 => 0.0,
            1 => 1.0,
            _ if y > 0.0 && y < 1.0 => y,
            _ => return None,
        };
        objective += (y - x) * (y - x);
        index /= 3;
    }
    Some(objective)
}
