mod common;

use disclosure_games::game::{
    contraction_coefficients, expected_utility, marginal_utility, pure_payoff, Evaluator, GameError,
};
use disclosure_games::{DisclosureOutcome, GameSpec, StrategyProfile};
use proptest::prelude::*;

fn game(a: f64, gamma: f64, beta: &[f64]) -> GameSpec {
    GameSpec::new(a, gamma, beta.to_vec()).unwrap()
}

fn profile(x: &[f64]) -> StrategyProfile {
    StrategyProfile::new(x.to_vec()).unwrap()
}

#[test]
fn pure_payoff_examples() {
    let g = game(1.0, 1.0, &[0.5, 0.5]);
    let d = DisclosureOutcome::from_bits(&[1, 1]).unwrap();
    assert_eq!(pure_payoff(&g, &d, 0).unwrap(), 1.5);
    let g = game(2.0, 0.5, &[1.0, 1.0, 1.0]);
    let d = DisclosureOutcome::from_bits(&[0, 0, 0]).unwrap();
    assert_eq!(pure_payoff(&g, &d, 0).unwrap(), 0.0);
    let g = game(2.0, 0.5, &[1.0, 1.0]);
    let d = DisclosureOutcome::from_bits(&[1, 1]).unwrap();
    assert!((pure_payoff(&g, &d, 0).unwrap() - 1.828_427_124_746_19).abs() < 1e-12);
}

#[test]
fn expected_utility_examples() {
    let g = game(3.0, 0.7, &[1.0]);
    assert!((expected_utility(&g, &profile(&[0.5]), 0).unwrap() - 1.0).abs() < 1e-15);
    let g = game(1.0, 1.0, &[0.0, 0.0]);
    assert!((expected_utility(&g, &profile(&[0.5, 0.5]), 0).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn contraction_examples() {
    let g = game(1.0, 1.0, &[0.5, 0.5]);
    let c = contraction_coefficients(&g, &[0.0], 0).unwrap();
    assert_eq!((c.c1, c.c0), (0.5, 0.0));
    let c = contraction_coefficients(&g, &[1.0], 0).unwrap();
    assert_eq!((c.c1, c.c0), (1.5, 1.0));
}

#[test]
fn marginal_is_constant_in_own_strategy() {
    let g = game(1.0, 1.0, &[0.5, 0.5]);
    for t in [0.0, 0.3, 1.0] {
        assert!((marginal_utility(&g, &profile(&[t, 0.5]), 0).unwrap() - 0.5).abs() < 1e-15);
    }
    let g = game(3.0, 0.4, &[1.0]);
    assert_eq!(marginal_utility(&g, &profile(&[0.2]), 0).unwrap(), 2.0);
}

#[test]
fn finite_difference_on_four_players() {
    let g = game(2.0, 0.71, &[1.0, 1.0, 1.0, 1.0]);
    let others = [0.3, 0.5, 0.7];
    let c = contraction_coefficients(&g, &others, 0).unwrap();
    let h = 1e-5;
    let u = |x0: f64| expected_utility(&g, &profile(&[x0, 0.3, 0.5, 0.7]), 0).unwrap();
    let fd = (u(0.5 + h) - u(0.5 - h)) / (2.0 * h);
    assert!((c.gap() - fd).abs() < 1e-6);
}

#[test]
fn errors() {
    let g = game(1.0, 1.0, &[1.0, 1.0]);
    assert!(matches!(
        expected_utility(&g, &profile(&[0.5]), 0),
        Err(GameError::DimensionMismatch { .. })
    ));
    assert!(matches!(
        expected_utility(&g, &profile(&[0.5, 0.5]), 2),
        Err(GameError::IndexOutOfRange { index: 2, n: 2 })
    ));
    assert!(StrategyProfile::new(vec![1.2]).is_err());
    assert!(GameSpec::new(-1.0, 0.5, vec![1.0]).is_err());
    assert!(GameSpec::new(1.0, 0.5, vec![]).is_err());
    let big = GameSpec::symmetric(6, 1.0, 0.5, 1.0).unwrap();
    assert!(matches!(
        Evaluator::new(5).expected_utility(&big, &StrategyProfile::zeros(6), 0),
        Err(GameError::EnumerationCap { n: 6, cap: 5 })
    ));
}

#[test]
fn game_json_round_trip() {
    let g = game(4.0, 0.5, &[1.0, 1.9, 3.0]);
    let json = serde_json::to_string(&g).unwrap();
    assert_eq!(json, r#"{"A":4.0,"gamma":0.5,"beta":[1.0,1.9,3.0]}"#);
    assert_eq!(serde_json::from_str::<GameSpec>(&json).unwrap(), g);
    assert!(serde_json::from_str::<GameSpec>(r#"{"A":0,"gamma":0.5,"beta":[1]}"#).is_err());
}

fn game_and_profile() -> impl Strategy<Value = (GameSpec, Vec<f64>)> {
    (1usize..=7).prop_flat_map(|n| {
        (
            0.1f64..10.0,
            0.2f64..1.5,
            prop::collection::vec(0.0f64..10.0, n),
            prop::collection::vec(0.0f64..=1.0, n),
        )
            .prop_map(|(a, gamma, beta, x)| (GameSpec::new(a, gamma, beta).unwrap(), x))
    })
}

proptest! {
    #[test]
    fn matches_enumeration((g, x) in game_and_profile()) {
        for j in 0..g.n() {
            let oracle = common::utility_by_enumeration(g.a(), g.gamma(), g.beta(), &x, j);
            let got = expected_utility(&g, &profile(&x), j).unwrap();
            prop_assert!((got - oracle).abs() < 1e-10 * oracle.abs().max(1.0));
        }
    }

    #[test]
    fn decomposition_identity((g, x) in game_and_profile()) {
        let p = profile(&x);
        for (j, &xj) in x.iter().enumerate() {
            let c = contraction_coefficients(&g, &p.without(j), j).unwrap();
            let u = expected_utility(&g, &p, j).unwrap();
            prop_assert!((u - (c.gap() * xj + c.c0)).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_profiles_match_pure_payoff((g, bits) in (1usize..=8).prop_flat_map(|n| (
        (0.1f64..10.0, 0.2f64..1.5, prop::collection::vec(0.0f64..10.0, n))
            .prop_map(|(a, gamma, beta)| GameSpec::new(a, gamma, beta).unwrap()),
        prop::collection::vec(0u8..=1, n),
    ))) {
        let outcome = DisclosureOutcome::from_bits(&bits).unwrap();
        let x = profile(&bits.iter().map(|b| *b as f64).collect::<Vec<_>>());
        for j in 0..g.n() {
            prop_assert_eq!(
                expected_utility(&g, &x, j).unwrap(),
                pure_payoff(&g, &outcome, j).unwrap()
            );
        }
    }

    #[test]
    fn increasing_in_a((g, x) in game_and_profile(), bump in 0.01f64..5.0) {
        prop_assume!(x.iter().any(|v| *v > 1e-6));
        let richer = GameSpec::new(g.a() + bump, g.gamma(), g.beta().to_vec()).unwrap();
        let p = profile(&x);
        for j in 0..g.n() {
            prop_assert!(expected_utility(&richer, &p, j).unwrap() > expected_utility(&g, &p, j).unwrap());
        }
    }

    #[test]
    fn permutation_equivariance((g, x) in game_and_profile(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let beta: Vec<f64> = perm.iter().map(|&k| g.beta()[k]).collect();
        let xp: Vec<f64> = perm.iter().map(|&k| x[k]).collect();
        let gp = GameSpec::new(g.a(), g.gamma(), beta).unwrap();
        for (new, &old) in perm.iter().enumerate() {
            let a = expected_utility(&gp, &profile(&xp), new).unwrap();
            let b = expected_utility(&g, &profile(&x), old).unwrap();
            prop_assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }
}
