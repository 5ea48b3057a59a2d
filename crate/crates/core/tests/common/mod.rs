//! Independent reference implementations shared by the integration tests.
//! Deliberately naive: direct enumeration of all 2^n outcomes.

#![allow(dead_code)]

use disclosure_games::GameSpec;
use rand::Rng;

pub fn reward(a: f64, gamma: f64, s: u32) -> f64 {
    if s == 0 {
        0.0
    } else {
        a * (s as f64).powf(gamma)
    }
}

/// Probability of outcome `mask` (bit k = player k discloses).
pub fn outcome_prob(x: &[f64], mask: u64) -> f64 {
    x.iter()
        .enumerate()
        .map(|(k, p)| if mask >> k & 1 == 1 { *p } else { 1.0 - p })
        .product()
}

/// `E[u_j]` by summing over all outcomes.
pub fn utility_by_enumeration(a: f64, gamma: f64, beta: &[f64], x: &[f64], j: usize) -> f64 {
    let n = x.len();
    (0..1u64 << n)
        .map(|mask| {
            let s = mask.count_ones();
            let cost = if mask >> j & 1 == 1 { beta[j] } else { 0.0 };
            outcome_prob(x, mask) * (reward(a, gamma, s) - cost)
        })
        .sum()
}

/// `E[A((1 + S)^gamma - S^gamma)]` over all outcomes of the co-users.
pub fn increment_by_enumeration(a: f64, gamma: f64, others: &[f64]) -> f64 {
    (0..1u64 << others.len())
        .map(|mask| {
            let s = mask.count_ones();
            outcome_prob(others, mask) * (reward(a, gamma, s + 1) - reward(a, gamma, s))
        })
        .sum()
}

/// Pure equilibria as bitmasks, by checking every unilateral flip.
pub fn pure_equilibria(a: f64, gamma: f64, beta: &[f64], tie: f64) -> Vec<u64> {
    let n = beta.len();
    let payoff = |mask: u64, j: usize| {
        let cost = if mask >> j & 1 == 1 { beta[j] } else { 0.0 };
        reward(a, gamma, mask.count_ones()) - cost
    };
    (0..1u64 << n)
        .filter(|&mask| (0..n).all(|j| payoff(mask ^ (1 << j), j) <= payoff(mask, j) + tie))
        .collect()
}

pub fn mask_of(x: &[f64]) -> u64 {
    x.iter()
        .enumerate()
        .filter(|(_, v)| **v == 1.0)
        .fold(0, |m, (k, _)| m | 1 << k)
}

pub fn random_game<R: Rng>(rng: &mut R, n: usize) -> GameSpec {
    let a = rng.random_range(0.1..10.0);
    let gamma = rng.random_range(0.2..1.5);
    let beta = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
    GameSpec::new(a, gamma, beta).unwrap()
}

pub fn random_profile<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..=1.0)).collect()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
