//! Public-goods model of personal-information disclosure in online comment
//! threads.
//!
//! * [`game`]: payoffs, expected utilities and the `C1`/`C0` decomposition.
//! * [`equilibrium`]: KKT verification, pure-strategy constructions and
//!   equilibrium search.
//! * [`estimation`]: power-law reward fit, null model, residual diagnostics,
//!   strategy and cost estimation.
//! * [`dataset`]: comment-table ingestion, per-article aggregation and a
//!   synthetic data generator.
//! * [`cli`]: the `disclosure-games` command-line front end.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod equilibrium;
pub mod estimation;
pub mod game;

pub use config::{Limits, Tolerances};
pub use game::{DisclosureOutcome, GameError, GameSpec, StrategyProfile};
