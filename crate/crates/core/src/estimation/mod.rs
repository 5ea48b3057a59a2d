//! Fitting the model to comment data.

mod constrained;
mod diagnostics;
pub mod ols;
mod power_law;
mod strategy;

use thiserror::Error;

use crate::equilibrium::EquilibriumError;
use crate::game::GameError;

pub use constrained::{fit_beta_constrained_lsq, ConstrainedFit, LsqOptions};
pub use diagnostics::{histogram, residual_diagnostics, HistogramBin, ResidualReport};
pub use ols::{gaussian_aic, simple_ols, Coefficient, LinearFit};
pub use power_law::{
    fit_null_linear, fit_power_law, null_sample, power_law_sample, NullLinearFit, PowerLawFit,
};
pub use strategy::{
    correlate_x_beta, estimate_beta, estimate_betas, estimate_strategies, mean_strategy,
    BetaContribution, BetaEstimate, BetaEstimation, BetaOptions, ExcludedUser, StrategyEstimate,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("need at least {needed} observations, found {found}")]
    TooFewObservations { needed: usize, found: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("user {user} has a pure strategy estimate ({x_hat}); cost is not identified")]
    PureStrategy { user: String, x_hat: f64 },
    #[error("user {user} never appears in an article with enough estimated co-users")]
    NoEligibleCoUsers { user: String },
    #[error("{n} players exceeds the {what} cap of {cap}")]
    Cap {
        what: &'static str,
        n: usize,
        cap: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no feasible tuple found: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

pub type Result<T> = std::result::Result<T, EstimationError>;
