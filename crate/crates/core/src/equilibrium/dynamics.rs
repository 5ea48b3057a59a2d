use super::Result;
use crate::game::{Evaluator, GameSpec, StrategyProfile};

/// Round-robin best response: each player in turn jumps to `x = 1` when her
/// marginal exceeds `tol`, to `x = 0` when it is below `-tol`, and otherwise
/// stays put. One iteration is a full pass; stops after a pass with no change.
///
/// Returns the last iterate and whether it is a fixed point.
pub fn best_response_dynamics(
    g: &GameSpec,
    x0: &StrategyProfile,
    max_iters: usize,
    tol: f64,
) -> Result<(StrategyProfile, bool)> {
    g.check_len(x0.len())?;
    let eval = Evaluator::default();
    let mut x = x0.clone();
    for _ in 0..max_iters {
        let mut changed = false;
        for j in 0..g.n() {
            let m = eval.marginal_utility(g, &x, j)?;
            let target = if m > tol {
                1.0
            } else if m < -tol {
                0.0
            } else {
                continue;
            };
            if x.get(j) != target {
                x = x.with(j, target)?;
                changed = true;
            }
        }
        if !changed {
            return Ok((x, true));
        }
    }
    Ok((x, false))
}
