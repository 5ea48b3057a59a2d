//! The n-player disclosure game.
//!
//! Every participant receives the common reward `A * S^gamma`, where `S` is the
//! number of players who disclose, and a discloser additionally pays her own
//! cost `beta_j`. Mixed strategies are independent Bernoulli disclosure
//! probabilities, so expectations only depend on the distribution of `S`.
//! That distribution is built by exact convolution of the Bernoulli factors,
//! which reproduces the outcome-by-outcome sum (zero-probability outcomes
//! drop out, so pure coordinates never produce `0^0` terms).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Limits;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid game parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),
    #[error("player index {index} out of range for {n} players")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{n} players exceeds the enumeration cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, GameError>;

/// Power-law common reward `A * s^gamma`, with `0^gamma = 0`.
#[inline]
pub fn power_reward(a: f64, gamma: f64, s: usize) -> f64 {
    if s == 0 {
        0.0
    } else {
        a * (s as f64).powf(gamma)
    }
}

/// Reward increment `A((s + 1)^gamma - s^gamma)` a player adds by disclosing
/// when `s` others disclose.
#[inline]
pub fn reward_increment(a: f64, gamma: f64, s: usize) -> f64 {
    power_reward(a, gamma, s + 1) - power_reward(a, gamma, s)
}

/// Distribution of the number of successes among independent Bernoulli trials.
///
/// Entry `s` is the probability that exactly `s` of the trials succeed.
pub fn count_distribution<I>(probs: I) -> Vec<f64>
where
    I: IntoIterator<Item = f64>,
{
    let mut dist = vec![1.0];
    for p in probs {
        let q = 1.0 - p;
        dist.push(0.0);
        for s in (1..dist.len()).rev() {
            dist[s] = dist[s] * q + dist[s - 1] * p;
        }
        dist[0] *= q;
    }
    dist
}

/// Expected common reward `E[A (offset + S)^gamma]` under a count distribution.
fn expected_reward(a: f64, gamma: f64, dist: &[f64], offset: usize) -> f64 {
    dist.iter()
        .enumerate()
        .filter(|(_, p)| **p != 0.0)
        .map(|(s, p)| p * power_reward(a, gamma, s + offset))
        .sum()
}

/// Expected reward increment `E[A((1 + S)^gamma - S^gamma)]` when the other
/// players disclose independently with the given probabilities.
pub fn expected_increment(a: f64, gamma: f64, others: &[f64]) -> f64 {
    let dist = count_distribution(others.iter().copied());
    dist.iter()
        .enumerate()
        .filter(|(_, p)| **p != 0.0)
        .map(|(s, p)| p * reward_increment(a, gamma, s))
        .sum()
}

/// Parameters `(A, gamma, beta)` of an n-player disclosure game.
///
/// Serialized as `{"A": .., "gamma": .., "beta": [..]}`; the player count is
/// the length of `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGameSpec", into = "RawGameSpec")]
pub struct GameSpec {
    a: f64,
    gamma: f64,
    beta: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawGameSpec {
    #[serde(rename = "A")]
    a: f64,
    gamma: f64,
    beta: Vec<f64>,
}

impl TryFrom<RawGameSpec> for GameSpec {
    type Error = GameError;

    fn try_from(raw: RawGameSpec) -> Result<Self> {
        GameSpec::new(raw.a, raw.gamma, raw.beta)
    }
}

impl From<GameSpec> for RawGameSpec {
    fn from(g: GameSpec) -> Self {
        RawGameSpec {
            a: g.a,
            gamma: g.gamma,
            beta: g.beta,
        }
    }
}

/// Players ordered by increasing cost.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedView {
    /// Costs in non-decreasing order.
    pub beta: Vec<f64>,
    /// `order[r]` is the original index of the player with rank `r`.
    pub order: Vec<usize>,
}

impl GameSpec {
    pub fn new(a: f64, gamma: f64, beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(GameError::InvalidParameter(
                "at least one player is required".into(),
            ));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(GameError::InvalidParameter(format!(
                "A must be finite and positive, got {a}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(GameError::InvalidParameter(format!(
                "gamma must be finite and positive, got {gamma}"
            )));
        }
        if let Some((j, b)) = beta
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.is_finite() && **b >= 0.0))
        {
            return Err(GameError::InvalidParameter(format!(
                "beta[{j}] must be finite and non-negative, got {b}"
            )));
        }
        Ok(Self { a, gamma, beta })
    }

    /// Symmetric game where every player has the same cost.
    pub fn symmetric(n: usize, a: f64, gamma: f64, beta: f64) -> Result<Self> {
        Self::new(a, gamma, vec![beta; n])
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn reward(&self, s: usize) -> f64 {
        power_reward(self.a, self.gamma, s)
    }

    /// Same game with `A` and every `beta_j` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.a * factor,
            self.gamma,
            self.beta.iter().map(|b| b * factor).collect(),
        )
    }

    /// Same game with costs replaced.
    pub fn with_beta(&self, beta: Vec<f64>) -> Result<Self> {
        Self::new(self.a, self.gamma, beta)
    }

    /// Players sorted by cost; ties keep their original relative order.
    pub fn sorted(&self) -> SortedView {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&i, &j| self.beta[i].total_cmp(&self.beta[j]));
        SortedView {
            beta: order.iter().map(|&i| self.beta[i]).collect(),
            order,
        }
    }

    pub(crate) fn check_player(&self, j: usize) -> Result<()> {
        if j >= self.n() {
            Err(GameError::IndexOutOfRange {
                index: j,
                n: self.n(),
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            Err(GameError::DimensionMismatch {
                expected: self.n(),
                found: len,
            })
        } else {
            Ok(())
        }
    }
}

/// Vector of disclosure probabilities, one per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct StrategyProfile(Vec<f64>);

impl TryFrom<Vec<f64>> for StrategyProfile {
    type Error = GameError;

    fn try_from(x: Vec<f64>) -> Result<Self> {
        StrategyProfile::new(x)
    }
}

impl From<StrategyProfile> for Vec<f64> {
    fn from(x: StrategyProfile) -> Self {
        x.0
    }
}

impl StrategyProfile {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some((j, v)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(GameError::InvalidProfile(format!(
                "x[{j}] = {v} lies outside [0, 1]"
            )));
        }
        Ok(Self(x))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    pub fn is_pure(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Pure outcome for a profile on the boundary of the cube.
    pub fn to_outcome(&self) -> Option<DisclosureOutcome> {
        self.is_pure()
            .then(|| DisclosureOutcome(self.0.iter().map(|&v| v == 1.0).collect()))
    }

    /// Copy with player `j` moved to `value`.
    pub fn with(&self, j: usize, value: f64) -> Result<Self> {
        let mut x = self.0.clone();
        x[j] = value;
        Self::new(x)
    }

    /// Probabilities of every player except `j`.
    pub fn without(&self, j: usize) -> Vec<f64> {
        self.0
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(_, v)| *v)
            .collect()
    }
}

impl From<&DisclosureOutcome> for StrategyProfile {
    fn from(d: &DisclosureOutcome) -> Self {
        Self(d.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }
}

/// Realized disclosure decisions `delta_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DisclosureOutcome(Vec<bool>);

impl DisclosureOutcome {
    pub fn new(delta: Vec<bool>) -> Self {
        Self(delta)
    }

    /// Parses a 0/1 vector; any other entry is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(GameError::InvalidProfile(format!(
                    "disclosure indicator must be 0 or 1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Outcome number `index` in binary counting order, player 0 least significant.
    pub fn from_index(n: usize, index: u64) -> Self {
        Self((0..n).map(|k| (index >> k) & 1 == 1).collect())
    }

    /// Inverse of [`DisclosureOutcome::from_index`].
    pub fn index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, d)| **d)
            .fold(0, |acc, (k, _)| acc | (1 << k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn discloses(&self, j: usize) -> bool {
        self.0[j]
    }

    /// Number of disclosing players.
    pub fn count(&self) -> usize {
        self.0.iter().filter(|d| **d).count()
    }

    pub fn bits(&self) -> Vec<u8> {
        self.0.iter().map(|&d| d as u8).collect()
    }
}

/// `C1` and `C0` for one player: expected payoff when disclosing for sure
/// and when withholding for sure, given everybody else's strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub c1: f64,
    pub c0: f64,
}

impl Contraction {
    /// `C1 - C0`, the derivative of the player's expected utility in her own
    /// disclosure probability.
    pub fn gap(&self) -> f64 {
        self.c1 - self.c0
    }
}

/// Payoff evaluator enforcing the enumeration cap.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    cap: usize,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self::new(Limits::default().enumeration)
    }
}

impl Evaluator {
    pub fn new(cap: usize) -> Self {
        Self { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check_cap(&self, n: usize) -> Result<()> {
        if n > self.cap {
            Err(GameError::EnumerationCap { n, cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// Expected utility of player `j` under the mixed profile `x`.
    pub fn expected_utility(&self, g: &GameSpec, x: &StrategyProfile, j: usize) -> Result<f64> {
        g.check_len(x.len())?;
        g.check_player(j)?;
        self.check_cap(g.n())?;
        let dist = count_distribution(x.as_slice().iter().copied());
        Ok(expected_reward(g.a, g.gamma, &dist, 0) - g.beta[j] * x.get(j))
    }

    /// `C1` and `C0` for player `j` given the other players' probabilities
    /// (in original order with `j` removed).
    pub fn contraction_coefficients(
        &self,
        g: &GameSpec,
        x_minus_j: &[f64],
        j: usize,
    ) -> Result<Contraction> {
        g.check_player(j)?;
        if x_minus_j.len() + 1 != g.n() {
            return Err(GameError::DimensionMismatch {
                expected: g.n() - 1,
                found: x_minus_j.len(),
            });
        }
        if let Some(v) = x_minus_j
            .iter()
            .find(|v| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(GameError::InvalidProfile(format!(
                "opponent probability {v} lies outside [0, 1]"
            )));
        }
        self.check_cap(g.n())?;
        let dist = count_distribution(x_minus_j.iter().copied());
        Ok(Contraction {
            c1: expected_reward(g.a, g.gamma, &dist, 1) - g.beta[j],
            c0: expected_reward(g.a, g.gamma, &dist, 0),
        })
    }

    /// `dU_j / dx_j = C1 - C0`. Does not depend on `x_j` itself.
    pub fn marginal_utility(&self, g: &GameSpec, x: &StrategyProfile, j: usize) -> Result<f64> {
        g.check_len(x.len())?;
        g.check_player(j)?;
        self.check_cap(g.n())?;
        Ok(expected_increment(g.a, g.gamma, &x.without(j)) - g.beta[j])
    }

    /// Marginal utilities of every player.
    pub fn marginals(&self, g: &GameSpec, x: &StrategyProfile) -> Result<Vec<f64>> {
        (0..g.n()).map(|j| self.marginal_utility(g, x, j)).collect()
    }
}

/// Payoff of player `j` in a pure outcome: `A (sum delta)^gamma - beta_j delta_j`.
pub fn pure_payoff(g: &GameSpec, outcome: &DisclosureOutcome, j: usize) -> Result<f64> {
    g.check_len(outcome.len())?;
    g.check_player(j)?;
    let cost = if outcome.discloses(j) { g.beta[j] } else { 0.0 };
    Ok(g.reward(outcome.count()) - cost)
}

pub fn expected_utility(g: &GameSpec, x: &StrategyProfile, j: usize) -> Result<f64> {
    Evaluator::default().expected_utility(g, x, j)
}

pub fn contraction_coefficients(g: &GameSpec, x_minus_j: &[f64], j: usize) -> Result<Contraction> {
    Evaluator::default().contraction_coefficients(g, x_minus_j, j)
}

pub fn marginal_utility(g: &GameSpec, x: &StrategyProfile, j: usize) -> Result<f64> {
    Evaluator::default().marginal_utility(g, x, j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(a: f64, gamma: f64, beta: &[f64]) -> GameSpec {
        GameSpec::new(a, gamma, beta.to_vec()).unwrap()
    }

    fn profile(x: &[f64]) -> StrategyProfile {
        StrategyProfile::new(x.to_vec()).unwrap()
    }

    /// Outcome-by-outcome sum over all 2^n disclosure vectors.
    fn enumerate_utility(g: &GameSpec, x: &[f64], j: usize) -> f64 {
        let n = x.len();
        let mut total = 0.0;
        for idx in 0..(1u64 << n) {
            let d = DisclosureOutcome::from_index(n, idx);
            let mut p = 1.0;
            for (k, &xk) in x.iter().enumerate() {
                p *= if d.discloses(k) { xk } else { 1.0 - xk };
            }
            if p != 0.0 {
                total += p * g.reward(d.count());
            }
        }
        total - g.beta()[j] * x[j]
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
        let u = pure_payoff(&g, &d, 0).unwrap();
        assert!((u - 1.828_427_124_746_19).abs() < 1e-12);
    }

    #[test]
    fn pure_payoff_rejects_bad_index() {
        let g = game(1.0, 1.0, &[0.5, 0.5]);
        let d = DisclosureOutcome::from_bits(&[1, 0]).unwrap();
        assert_eq!(
            pure_payoff(&g, &d, 2),
            Err(GameError::IndexOutOfRange { index: 2, n: 2 })
        );
        assert!(DisclosureOutcome::from_bits(&[2]).is_err());
    }

    #[test]
    fn expected_utility_examples() {
        let g = game(3.0, 0.7, &[1.0]);
        let u = expected_utility(&g, &profile(&[0.5]), 0).unwrap();
        assert!((u - 1.0).abs() < 1e-15);

        let g = game(1.0, 1.0, &[0.0, 0.0]);
        let u = expected_utility(&g, &profile(&[0.5, 0.5]), 0).unwrap();
        assert!((u - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expected_utility_matches_enumeration() {
        let g = game(2.0, 0.71, &[1.0, 2.0, 3.0, 0.5, 0.25]);
        let x = [0.4, 0.5, 0.6, 0.0, 1.0];
        for j in 0..5 {
            let u = expected_utility(&g, &profile(&x), j).unwrap();
            assert!((u - enumerate_utility(&g, &x, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let g = GameSpec::symmetric(30, 1.0, 0.5, 1.0).unwrap();
        let x = StrategyProfile::zeros(30);
        assert_eq!(
            expected_utility(&g, &x, 0),
            Err(GameError::EnumerationCap { n: 30, cap: 25 })
        );
        assert!(Evaluator::new(40).expected_utility(&g, &x, 0).is_ok());
    }

    #[test]
    fn contraction_examples() {
        let g = game(1.0, 1.0, &[0.5, 0.7]);
        let c = contraction_coefficients(&g, &[0.0], 0).unwrap();
        assert_eq!((c.c1, c.c0), (0.5, 0.0));
        let c = contraction_coefficients(&g, &[1.0], 0).unwrap();
        assert_eq!((c.c1, c.c0), (1.5, 1.0));
    }

    #[test]
    fn contraction_rejects_wrong_length() {
        let g = game(1.0, 1.0, &[0.5, 0.7, 1.0]);
        assert!(matches!(
            contraction_coefficients(&g, &[0.5], 0),
            Err(GameError::DimensionMismatch { .. })
        ));
        assert!(contraction_coefficients(&g, &[0.5, 1.5], 0).is_err());
    }

    #[test]
    fn marginal_is_constant_in_own_probability() {
        let g = game(3.0, 0.4, &[1.0]);
        for t in [0.0, 0.3, 1.0] {
            let m = marginal_utility(&g, &profile(&[t]), 0).unwrap();
            assert!((m - 2.0).abs() < 1e-15);
        }
        let g = game(1.0, 1.0, &[0.5, 0.5]);
        for t in [0.0, 0.25, 0.9] {
            let m = marginal_utility(&g, &profile(&[t, 0.5]), 0).unwrap();
            assert!((m - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn finite_difference_gradient() {
        let g = game(2.0, 0.71, &[1.0, 1.0, 1.0, 1.0]);
        let x_minus = [0.3, 0.5, 0.7];
        let c = contraction_coefficients(&g, &x_minus, 0).unwrap();
        let h = 1e-5;
        let at = |t: f64| enumerate_utility(&g, &[t, 0.3, 0.5, 0.7], 0);
        let fd = (at(0.5 + h) - at(0.5 - h)) / (2.0 * h);
        assert!((c.gap() - fd).abs() < 1e-6);
    }

    #[test]
    fn validation() {
        assert!(GameSpec::new(0.0, 1.0, vec![1.0]).is_err());
        assert!(GameSpec::new(1.0, 0.0, vec![1.0]).is_err());
        assert!(GameSpec::new(1.0, 1.0, vec![]).is_err());
        assert!(GameSpec::new(1.0, 1.0, vec![-0.1]).is_err());
        assert!(StrategyProfile::new(vec![1.2]).is_err());
        assert!(StrategyProfile::new(vec![f64::NAN]).is_err());
        assert!(profile(&[0.0, 1.0]).is_pure());
        assert!(!profile(&[0.0, 0.5]).is_pure());
    }

    #[test]
    fn sorted_view_maps_back() {
        let g = game(1.0, 1.0, &[3.0, 1.0, 2.0, 1.0]);
        let s = g.sorted();
        assert_eq!(s.beta, vec![1.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.order, vec![1, 3, 2, 0]);
    }

    #[test]
    fn json_shape() {
        let g: GameSpec =
            serde_json::from_str(r#"{"A": 2.0, "gamma": 0.5, "beta": [1, 2]}"#).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.a(), 2.0);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"A":2.0,"gamma":0.5,"beta":[1.0,2.0]}"#);
        assert!(
            serde_json::from_str::<GameSpec>(r#"{"A": -1, "gamma": 0.5, "beta": [1]}"#).is_err()
        );
    }

    #[test]
    fn outcome_index_order() {
        let d = DisclosureOutcome::from_index(3, 0b101);
        assert_eq!(d.bits(), vec![1, 0, 1]);
        assert_eq!(d.index(), 5);
        assert_eq!(d.count(), 2);
    }
}
