use super::{EquilibriumError, KktCertificate, KktCondition, Residuals, Result, Verdict};
use crate::game::{Evaluator, GameSpec, StrategyProfile};

fn check_dims(g: &GameSpec, cert: &KktCertificate) -> Result<()> {
    for (field, len) in [
        ("x", cert.x.len()),
        ("lambda", cert.lambda.len()),
        ("mu", cert.mu.len()),
    ] {
        if len != g.n() {
            return Err(EquilibriumError::DimensionMismatch {
                field,
                expected: g.n(),
                found: len,
            });
        }
    }
    Ok(())
}

fn primal_violation(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        (-x).max(x - 1.0).max(0.0)
    }
}

/// Clamped copy of `x` for evaluating marginals; only call once primal
/// feasibility holds to tolerance.
fn evaluation_profile(x: &[f64]) -> StrategyProfile {
    StrategyProfile::new(x.iter().map(|v| v.clamp(0.0, 1.0)).collect())
        .expect("clamped values lie in [0, 1]")
}

/// Checks the equilibrium conditions for `cert` at tolerance `tol`.
///
/// Conditions are checked family by family (primal, dual, stationarity,
/// complementary slackness) and the first violation found is reported.
pub fn verify_kkt(g: &GameSpec, cert: &KktCertificate, tol: f64) -> Result<Verdict> {
    check_dims(g, cert)?;
    let violated = |condition, player, magnitude| Verdict::Violated {
        condition,
        player,
        magnitude,
    };

    for (j, &x) in cert.x.iter().enumerate() {
        let v = primal_violation(x);
        if v > tol {
            return Ok(violated(KktCondition::PrimalFeasibility, j, v));
        }
    }
    for j in 0..g.n() {
        let v = (-cert.lambda[j]).max(-cert.mu[j]).max(0.0);
        if v > tol || cert.lambda[j].is_nan() || cert.mu[j].is_nan() {
            return Ok(violated(KktCondition::DualFeasibility, j, v));
        }
    }
    let marginals = Evaluator::default().marginals(g, &evaluation_profile(&cert.x))?;
    for (j, m) in marginals.iter().enumerate() {
        let v = (m + cert.lambda[j] - cert.mu[j]).abs();
        if v > tol || v.is_nan() {
            return Ok(violated(KktCondition::Stationarity, j, v));
        }
    }
    for j in 0..g.n() {
        let v = (cert.lambda[j] * cert.x[j])
            .abs()
            .max((cert.mu[j] * (cert.x[j] - 1.0)).abs());
        if v > tol {
            return Ok(violated(KktCondition::ComplementarySlackness, j, v));
        }
    }
    Ok(Verdict::Valid)
}

/// Largest violation of every condition family, without a pass/fail cut.
pub fn kkt_residuals(g: &GameSpec, cert: &KktCertificate) -> Result<Residuals> {
    check_dims(g, cert)?;
    let marginals = Evaluator::default().marginals(g, &evaluation_profile(&cert.x))?;
    let mut r = Residuals::default();
    let rows = cert
        .x
        .iter()
        .zip(&cert.lambda)
        .zip(&cert.mu)
        .zip(&marginals);
    for (((&x, &l), &u), &m) in rows {
        r.primal = r.primal.max(primal_violation(x));
        r.dual = r.dual.max((-l).max(-u).max(0.0));
        r.stationarity = r.stationarity.max((m + l - u).abs());
        r.complementarity = r
            .complementarity
            .max((l * x).abs().max((u * (x - 1.0)).abs()));
    }
    Ok(r)
}

/// `sum_j lambda_j x_j + mu_j (1 - x_j)`.
///
/// Non-negative on the feasible set and zero exactly at equilibrium
/// certificates. Feasibility is not enforced here.
pub fn nlp_objective(g: &GameSpec, cert: &KktCertificate) -> Result<f64> {
    check_dims(g, cert)?;
    Ok((0..g.n())
        .map(|j| cert.lambda[j] * cert.x[j] + cert.mu[j] * (1.0 - cert.x[j]))
        .sum())
}

/// The same objective written as `sum_j mu_j - x_j (C1 - C0)`; agrees with
/// [`nlp_objective`] whenever stationarity holds.
pub fn nlp_objective_identity(g: &GameSpec, cert: &KktCertificate) -> Result<f64> {
    check_dims(g, cert)?;
    let marginals = Evaluator::default().marginals(g, &evaluation_profile(&cert.x))?;
    Ok((0..g.n())
        .map(|j| cert.mu[j] - cert.x[j] * marginals[j])
        .sum())
}

/// Builds the certificate for `x` with `lambda_j = max(0, -(C1 - C0))` and
/// `mu_j = max(0, C1 - C0)`.
pub fn certificate_from_profile(g: &GameSpec, x: &StrategyProfile) -> Result<KktCertificate> {
    let marginals = Evaluator::default().marginals(g, x)?;
    Ok(KktCertificate {
        x: x.as_slice().to_vec(),
        lambda: marginals.iter().map(|m| (-m).max(0.0)).collect(),
        mu: marginals.iter().map(|m| m.max(0.0)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn game(a: f64, gamma: f64, beta: &[f64]) -> GameSpec {
        GameSpec::new(a, gamma, beta.to_vec()).unwrap()
    }

    fn cert(x: &[f64], l: &[f64], m: &[f64]) -> KktCertificate {
        KktCertificate::new(x.to_vec(), l.to_vec(), m.to_vec())
    }

    #[test]
    fn boundary_certificates() {
        let g = game(1.0, 1.0, &[2.0]);
        assert_eq!(
            verify_kkt(&g, &cert(&[0.0], &[1.0], &[0.0]), 1e-12).unwrap(),
            Verdict::Valid
        );

        let g = game(3.0, 1.0, &[1.0]);
        assert_eq!(
            verify_kkt(&g, &cert(&[1.0], &[0.0], &[2.0]), 1e-12).unwrap(),
            Verdict::Valid
        );
    }

    #[test]
    fn interior_two_player_certificate() {
        // With both players mixing, player 0's marginal is affine in x1:
        // A(1 + x1 (2^gamma - 2)) - beta. Bisect for its root.
        let (a, gamma, b) = (2.0, 0.71, 1.8);
        let f = |t: f64| a * (1.0 + t * (2f64.powf(gamma) - 2.0)) - b;
        // At beta = 1 the root sits at t ~ 1.375: no mixed equilibrium.
        let f1 = |t: f64| a * (1.0 + t * (2f64.powf(gamma) - 2.0)) - 1.0;
        assert!(f1(0.0) > 0.0 && f1(1.0) > 0.0);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let g = game(a, gamma, &[b, b]);
        let c = cert(&[t, t], &[0.0, 0.0], &[0.0, 0.0]);
        assert!(verify_kkt(&g, &c, 1e-8).unwrap().is_valid());
        assert!(kkt_residuals(&g, &c).unwrap().max() < 1e-8);
    }

    #[test]
    fn reports_first_violation() {
        let g = game(1.0, 1.0, &[2.0, 2.0]);
        let v = verify_kkt(&g, &cert(&[0.0, 1.5], &[1.0, 0.0], &[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!(
            v,
            Verdict::Violated {
                condition: KktCondition::PrimalFeasibility,
                player: 1,
                magnitude: 0.5
            }
        );
        let v = verify_kkt(&g, &cert(&[0.0, 0.0], &[1.0, -0.5], &[0.0, 0.0]), 1e-9).unwrap();
        assert!(matches!(
            v,
            Verdict::Violated {
                condition: KktCondition::DualFeasibility,
                player: 1,
                ..
            }
        ));
        // Disclosing at a loss: stationarity holds with lambda = 1 but lambda * x = 1.
        let v = verify_kkt(&g, &cert(&[1.0, 0.0], &[1.0, 1.0], &[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!(
            v,
            Verdict::Violated {
                condition: KktCondition::ComplementarySlackness,
                player: 0,
                magnitude: 1.0
            }
        );
        let v = verify_kkt(&g, &cert(&[0.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]), 1e-9).unwrap();
        assert!(matches!(
            v,
            Verdict::Violated {
                condition: KktCondition::Stationarity,
                player: 0,
                ..
            }
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let g = game(1.0, 1.0, &[2.0, 2.0]);
        assert!(matches!(
            verify_kkt(&g, &cert(&[0.0], &[1.0, 1.0], &[0.0, 0.0]), 1e-9),
            Err(EquilibriumError::DimensionMismatch { field: "x", .. })
        ));
        assert!(nlp_objective(&g, &cert(&[0.0, 0.0], &[1.0], &[0.0, 0.0])).is_err());
    }

    #[test]
    fn objective_of_non_equilibrium() {
        let g = game(1.0, 1.0, &[2.0]);
        let c = cert(&[1.0], &[1.0], &[0.0]);
        assert_eq!(nlp_objective(&g, &c).unwrap(), 1.0);
        assert!(!verify_kkt(&g, &c, 1e-9).unwrap().is_valid());
    }

    #[test]
    fn objective_identity_on_random_feasible_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.random_range(1..=6);
            let g = GameSpec::new(
                rng.random_range(0.1..10.0),
                rng.random_range(0.2..1.5),
                (0..n).map(|_| rng.random_range(0.0..10.0)).collect(),
            )
            .unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let p = StrategyProfile::new(x.clone()).unwrap();
            // Feasible for the stationarity constraint: split each marginal
            // into lambda - mu with a common random shift.
            let m = Evaluator::default().marginals(&g, &p).unwrap();
            let shift: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
            let lambda: Vec<f64> = (0..n).map(|j| (-m[j]).max(0.0) + shift[j]).collect();
            let mu: Vec<f64> = (0..n).map(|j| m[j].max(0.0) + shift[j]).collect();
            let c = KktCertificate::new(x, lambda, mu);
            let lhs = nlp_objective(&g, &c).unwrap();
            let rhs = nlp_objective_identity(&g, &c).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
            assert!(lhs >= 0.0);
        }
    }
}
