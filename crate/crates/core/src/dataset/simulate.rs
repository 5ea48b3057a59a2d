//! Synthetic comment tables drawn from the disclosure model.
//!
//! A fixed population of users carries disclosure probabilities `x_j`. Each
//! article draws a handful of participants (popular users are drawn more
//! often), each participant discloses with probability `x_j`, and the
//! article's comment total follows the power law with lognormal noise,
//! `R = round(A S^gamma exp(eps))`. Every participant writes at least one
//! comment; the remaining comments are spread uniformly over participants and
//! carry their author's disclosure label.

use rand::seq::index::sample_weighted;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{CommentRecord, DatasetError, Result};
use crate::game::{expected_increment, GameSpec};

/// Comment total `round(A s^gamma exp(eps))`, zero when nobody discloses.
pub fn comment_total(a: f64, gamma: f64, s: u64, eps: f64) -> u64 {
    if s == 0 {
        0
    } else {
        (a * (s as f64).powf(gamma) * eps.exp()).round() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StrategyDistribution {
    Uniform { low: f64, high: f64 },
    Beta { alpha: f64, beta: f64 },
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub a: f64,
    pub gamma: f64,
    pub n_articles: usize,
    /// Standard deviation of the log-scale noise on comment totals.
    pub noise_sigma: f64,
    pub seed: u64,
    pub n_users: usize,
    pub min_participants: usize,
    pub max_participants: usize,
    /// User `i` (0-based) is drawn with weight `(i + 1)^-popularity_exponent`.
    pub popularity_exponent: f64,
    pub strategies: StrategyDistribution,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            a: 2.2f64.exp(),
            gamma: 0.71,
            n_articles: 2000,
            noise_sigma: 0.5,
            seed: 20150301,
            n_users: 400,
            min_participants: 2,
            max_participants: 8,
            popularity_exponent: 1.0,
            strategies: StrategyDistribution::Uniform {
                low: 0.1,
                high: 0.5,
            },
        }
    }
}

impl SimulationConfig {
    /// Defaults with the reward law taken from `g`.
    pub fn from_game(g: &GameSpec) -> Self {
        Self {
            a: g.a(),
            gamma: g.gamma(),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(DatasetError::InvalidConfig(msg));
        if !(self.a.is_finite() && self.a > 0.0 && self.gamma.is_finite() && self.gamma > 0.0) {
            return bad(format!(
                "A = {} and gamma = {} must be positive",
                self.a, self.gamma
            ));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad(format!(
                "noise sigma {} must be non-negative",
                self.noise_sigma
            ));
        }
        if self.min_participants == 0 || self.min_participants > self.max_participants {
            return bad(format!(
                "participants range {}..={} is empty",
                self.min_participants, self.max_participants
            ));
        }
        if self.n_articles > 0 && self.max_participants > self.n_users {
            return bad(format!(
                "{} participants requested from {} users",
                self.max_participants, self.n_users
            ));
        }
        let ok = match self.strategies {
            StrategyDistribution::Uniform { low, high } => 0.0 <= low && low <= high && high <= 1.0,
            StrategyDistribution::Beta { alpha, beta } => alpha > 0.0 && beta > 0.0,
            StrategyDistribution::Constant { value } => (0.0..=1.0).contains(&value),
        };
        if !ok {
            return bad(format!(
                "invalid strategy distribution {:?}",
                self.strategies
            ));
        }
        Ok(())
    }
}

/// Ground truth for one simulated user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedUser {
    pub user_id: String,
    pub x: f64,
    /// Cost that makes the user exactly indifferent on average over the
    /// articles she joined, given her co-participants' true strategies.
    /// `None` for users who joined no article.
    pub beta: Option<f64>,
    pub n_articles: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDataset {
    pub records: Vec<CommentRecord>,
    pub users: Vec<SimulatedUser>,
}

fn user_id(i: usize, width: usize) -> String {
    format!("u{i:0width$}")
}

/// Draws a synthetic comment table. Fully determined by `config` (including
/// its seed).
pub fn simulate_dataset(config: &SimulationConfig) -> Result<SimulatedDataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let strategies: Vec<f64> = match config.strategies {
        StrategyDistribution::Uniform { low, high } => (0..config.n_users)
            .map(|_| {
                if high > low {
                    rng.random_range(low..high)
                } else {
                    low
                }
            })
            .collect(),
        StrategyDistribution::Beta { alpha, beta } => {
            let dist =
                Beta::new(alpha, beta).map_err(|e| DatasetError::InvalidConfig(e.to_string()))?;
            (0..config.n_users).map(|_| dist.sample(&mut rng)).collect()
        }
        StrategyDistribution::Constant { value } => vec![value; config.n_users],
    };
    let noise = Normal::new(0.0, config.noise_sigma)
        .map_err(|e| DatasetError::InvalidConfig(e.to_string()))?;
    let weights: Vec<f64> = (0..config.n_users)
        .map(|i| ((i + 1) as f64).powf(-config.popularity_exponent))
        .collect();
    let user_width = config.n_users.saturating_sub(1).to_string().len().max(4);
    let article_width = config.n_articles.saturating_sub(1).to_string().len().max(5);

    let mut records = Vec::new();
    let mut beta_sum = vec![0.0; config.n_users];
    let mut joined = vec![0usize; config.n_users];
    for article in 0..config.n_articles {
        let article_id = format!("a{article:0article_width$}");
        let k = rng.random_range(config.min_participants..=config.max_participants);
        let mut participants: Vec<usize> =
            sample_weighted(&mut rng, config.n_users, |i| weights[i], k)
                .map_err(|e| DatasetError::InvalidConfig(e.to_string()))?
                .into_iter()
                .collect();
        participants.sort_unstable();
        let disclosed: Vec<bool> = participants
            .iter()
            .map(|&u| rng.random_bool(strategies[u]))
            .collect();
        let s = disclosed.iter().filter(|d| **d).count() as u64;
        let eps = noise.sample(&mut rng);
        let total = comment_total(config.a, config.gamma, s, eps).max(k as u64) as usize;

        let mut authors: Vec<usize> = (0..k).collect();
        authors.extend((k..total).map(|_| rng.random_range(0..k)));
        for slot in authors {
            records.push(CommentRecord {
                article_id: article_id.clone(),
                user_id: user_id(participants[slot], user_width),
                disclosed: disclosed[slot],
                timestamp: None,
                source: None,
            });
        }

        for (slot, &u) in participants.iter().enumerate() {
            let co: Vec<f64> = participants
                .iter()
                .enumerate()
                .filter(|(other, _)| *other != slot)
                .map(|(_, &v)| strategies[v])
                .collect();
            beta_sum[u] += expected_increment(config.a, config.gamma, &co);
            joined[u] += 1;
        }
    }

    let users = (0..config.n_users)
        .map(|i| SimulatedUser {
            user_id: user_id(i, user_width),
            x: strategies[i],
            beta: (joined[i] > 0).then(|| beta_sum[i] / joined[i] as f64),
            n_articles: joined[i],
        })
        .collect();
    Ok(SimulatedDataset { records, users })
}
