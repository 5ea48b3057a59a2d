//! Nash equilibria of the disclosure game.
//!
//! A profile is an equilibrium exactly when, for every player, the marginal
//! `C1 - C0` together with bound multipliers `lambda` (for `x >= 0`) and `mu`
//! (for `x <= 1`) satisfies primal/dual feasibility, stationarity and
//! complementary slackness. Everything here either checks those conditions
//! ([`verify_kkt`]), constructs profiles that satisfy them
//! ([`construct_threshold_equilibrium`]), or searches for them
//! ([`solve_equilibria`], [`best_response_dynamics`]).

mod dynamics;
mod kkt;
mod pure;
mod support;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::GameError;

pub use dynamics::best_response_dynamics;
pub use kkt::{
    certificate_from_profile, kkt_residuals, nlp_objective, nlp_objective_identity, verify_kkt,
};
pub use pure::{
    all_disclose_by_deviation, brute_force_pure_equilibria, check_all_disclose, check_all_withhold,
    construct_threshold_equilibrium, BoundaryChecks,
};
pub use support::{solve_equilibria, SolveOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("certificate has {found} entries in `{field}`, game has {expected} players")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{n} players exceeds the {what} cap of {cap}")]
    Cap {
        what: &'static str,
        n: usize,
        cap: usize,
    },
}

pub type Result<T> = std::result::Result<T, EquilibriumError>;

/// Candidate equilibrium together with its bound multipliers.
///
/// `x` is kept as raw numbers so that slightly infeasible candidates can be
/// checked and reported rather than rejected on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktCertificate {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl KktCertificate {
    pub fn new(x: Vec<f64>, lambda: Vec<f64>, mu: Vec<f64>) -> Self {
        Self { x, lambda, mu }
    }

    pub fn is_pure(&self) -> bool {
        self.x.iter().all(|&v| v == 0.0 || v == 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KktCondition {
    /// `0 <= x_j <= 1`
    PrimalFeasibility,
    /// `lambda_j >= 0`, `mu_j >= 0`
    DualFeasibility,
    /// `C1 - C0 + lambda_j - mu_j = 0`
    Stationarity,
    /// `lambda_j x_j = 0`, `mu_j (x_j - 1) = 0`
    ComplementarySlackness,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Valid,
    Violated {
        condition: KktCondition,
        player: usize,
        magnitude: f64,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Largest violation of each KKT condition family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub stationarity: f64,
    pub complementarity: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal
            .max(self.dual)
            .max(self.stationarity)
            .max(self.complementarity)
    }

    pub(crate) fn merge(&self, other: &Residuals) -> Residuals {
        Residuals {
            primal: self.primal.max(other.primal),
            dual: self.dual.max(other.dual),
            stationarity: self.stationarity.max(other.stationarity),
            complementarity: self.complementarity.max(other.complementarity),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SupportEnumeration,
    BestResponse,
    NlpPenalty,
    BruteForcePure,
}

/// Bookkeeping from a support-enumeration run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    /// Support patterns considered.
    pub patterns: usize,
    /// Patterns discarded by the marginal range test before any solve.
    pub pruned: usize,
    /// Patterns whose interior system was solved (at least one start converged).
    pub solved: usize,
    /// Patterns where every start of the interior solve failed.
    pub non_converged: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub method: Method,
    pub certificates: Vec<KktCertificate>,
    /// Worst residual over all reported certificates.
    pub residuals: Residuals,
    pub degenerate: bool,
    pub trace: SearchTrace,
}

impl EquilibriumReport {
    pub fn len(&self) -> usize {
        self.certificates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certificates.is_empty()
    }

    /// Reported equilibria that are pure profiles.
    pub fn pure_profiles(&self) -> impl Iterator<Item = &KktCertificate> {
        self.certificates.iter().filter(|c| c.is_pure())
    }
}
