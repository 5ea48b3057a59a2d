use serde::{Deserialize, Serialize};

use super::{certificate_from_profile, verify_kkt, EquilibriumError, Result};
use crate::config::{Limits, Tolerances};
use crate::game::{pure_payoff, DisclosureOutcome, GameSpec, StrategyProfile};

/// Threshold profile: the `m` cheapest players disclose, everybody else
/// withholds, for the largest `m` such that
///
/// * `beta_(m) <= A m^gamma - A (m-1)^gamma` (skipped when `m = 0`), and
/// * `beta_(m+1) >= A (m+1)^gamma - A m^gamma` (skipped when `m = n`),
///
/// where `beta_(k)` is the k-th smallest cost. Returns `None` when no `m`
/// satisfies both.
pub fn construct_threshold_equilibrium(g: &GameSpec) -> Option<StrategyProfile> {
    let n = g.n();
    let sorted = g.sorted();
    let increment = |m: usize| g.reward(m) - g.reward(m - 1);
    let m = (0..=n).rev().find(|&m| {
        let last_in = m == 0 || sorted.beta[m - 1] <= increment(m);
        let first_out = m == n || sorted.beta[m] >= increment(m + 1);
        last_in && first_out
    })?;
    let mut x = vec![0.0; n];
    for &player in &sorted.order[..m] {
        x[player] = 1.0;
    }
    Some(StrategyProfile::new(x).expect("pure profile"))
}

/// Everybody withholding is an equilibrium iff `A <= min_j beta_j`.
pub fn check_all_withhold(g: &GameSpec) -> bool {
    g.beta().iter().all(|&b| g.a() <= b)
}

/// Everybody disclosing, tested with the literal `A >= max_j beta_j`
/// criterion.
///
/// For `gamma != 1` and `n > 1` the last discloser only gains
/// `A (n^gamma - (n-1)^gamma)` rather than `A`, so this predicate can
/// disagree with a deviation check; see [`all_disclose_by_deviation`].
pub fn check_all_disclose(g: &GameSpec) -> bool {
    g.beta().iter().all(|&b| g.a() >= b)
}

/// Everybody disclosing survives every unilateral deviation:
/// `A (n^gamma - (n-1)^gamma) >= max_j beta_j`.
pub fn all_disclose_by_deviation(g: &GameSpec) -> bool {
    let n = g.n();
    let gain = g.reward(n) - g.reward(n - 1);
    g.beta().iter().all(|&b| gain >= b)
}

/// Every pure profile from which no player gains more than the tie tolerance
/// by switching her own decision. Profiles come back in binary counting
/// order.
pub fn brute_force_pure_equilibria(g: &GameSpec) -> Result<Vec<DisclosureOutcome>> {
    let n = g.n();
    let cap = Limits::default().brute_force;
    if n > cap {
        return Err(EquilibriumError::Cap {
            what: "brute-force",
            n,
            cap,
        });
    }
    let tie = Tolerances::default().deviation_tie;
    let mut found = Vec::new();
    for index in 0..(1u64 << n) {
        let outcome = DisclosureOutcome::from_index(n, index);
        let mut stable = true;
        for j in 0..n {
            let flipped = DisclosureOutcome::from_index(n, index ^ (1 << j));
            let gain = pure_payoff(g, &flipped, j)? - pure_payoff(g, &outcome, j)?;
            if gain > tie {
                stable = false;
                break;
            }
        }
        if stable {
            found.push(outcome);
        }
    }
    Ok(found)
}

/// Results of the all-withhold / all-disclose tests for one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryChecks {
    pub all_withhold: bool,
    /// `x = 0` verified against the KKT conditions.
    pub all_withhold_kkt: bool,
    /// Literal `A >= max beta` predicate.
    pub all_disclose: bool,
    /// `x = 1` verified against the KKT conditions.
    pub all_disclose_kkt: bool,
    /// The literal predicate and the KKT check give different answers.
    pub all_disclose_disagreement: bool,
}

impl BoundaryChecks {
    pub fn evaluate(g: &GameSpec, tol: f64) -> Result<Self> {
        let n = g.n();
        let at = |x: StrategyProfile| -> Result<bool> {
            Ok(verify_kkt(g, &certificate_from_profile(g, &x)?, tol)?.is_valid())
        };
        let all_withhold_kkt = at(StrategyProfile::zeros(n))?;
        let all_disclose_kkt = at(StrategyProfile::ones(n))?;
        let all_disclose = check_all_disclose(g);
        Ok(Self {
            all_withhold: check_all_withhold(g),
            all_withhold_kkt,
            all_disclose,
            all_disclose_kkt,
            all_disclose_disagreement: all_disclose != all_disclose_kkt,
        })
    }
}
