//! Numerical tolerances and enumeration limits shared by every module.

use serde::{Deserialize, Serialize};

/// Tolerances used across evaluation, verification and search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Acceptance tolerance for KKT residuals.
    pub kkt: f64,
    /// Boundary marginals smaller than this in magnitude mark a game as degenerate.
    pub degeneracy: f64,
    /// Residual target for the interior stationarity solve.
    pub interior_solve: f64,
    /// A unilateral deviation gaining at most this much is treated as a tie.
    pub deviation_tie: f64,
    /// Two profiles closer than this in max-norm are the same equilibrium.
    pub dedupe: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kkt: 1e-8,
            degeneracy: 1e-9,
            interior_solve: 1e-10,
            deviation_tie: 1e-12,
            dedupe: 1e-7,
        }
    }
}

/// Player-count caps for the exponential-cost routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest game for which expectations over outcomes are evaluated.
    pub enumeration: usize,
    /// Largest game handed to the 3^n support enumeration.
    pub support: usize,
    /// Largest game for the 2^n pure-profile oracle.
    pub brute_force: usize,
    /// Largest instance for the constrained least-squares fitter.
    pub constrained_lsq: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            enumeration: 25,
            support: 12,
            brute_force: 20,
            constrained_lsq: 10,
        }
    }
}
