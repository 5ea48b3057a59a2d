//! Per-user strategy and disclosure-cost estimates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ols::{simple_ols, LinearFit};
use super::{EstimationError, Result};
use crate::dataset::{ArticleAggregate, CommentRecord};
use crate::game::expected_increment;

/// Disclosure-probability estimate for one user: the share of her comments
/// that disclose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyEstimate {
    pub user_id: String,
    pub x_hat: f64,
    pub n_posts: u64,
    pub n_disclosing: u64,
    /// Distinct articles the user commented on.
    pub n_articles: u64,
}

/// Proportion estimates for every user who commented on at least
/// `min_articles` distinct articles, ordered by user id.
pub fn estimate_strategies(records: &[CommentRecord], min_articles: u64) -> Vec<StrategyEstimate> {
    #[derive(Default)]
    struct Acc<'a> {
        posts: u64,
        disclosing: u64,
        articles: BTreeSet<&'a str>,
    }
    let mut by_user: BTreeMap<&str, Acc> = BTreeMap::new();
    for rec in records {
        let acc = by_user.entry(&rec.user_id).or_default();
        acc.posts += 1;
        acc.disclosing += rec.disclosed as u64;
        acc.articles.insert(&rec.article_id);
    }
    by_user
        .into_iter()
        .filter(|(_, acc)| acc.articles.len() as u64 >= min_articles)
        .map(|(user, acc)| StrategyEstimate {
            user_id: user.to_string(),
            x_hat: acc.disclosing as f64 / acc.posts as f64,
            n_posts: acc.posts,
            n_disclosing: acc.disclosing,
            n_articles: acc.articles.len() as u64,
        })
        .collect()
}

/// Mean strategy estimate, substituted for users without their own estimate.
pub fn mean_strategy(estimates: &[StrategyEstimate]) -> Option<f64> {
    (!estimates.is_empty())
        .then(|| estimates.iter().map(|e| e.x_hat).sum::<f64>() / estimates.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaOptions {
    /// Most users (target included) entering one enumeration. Users with
    /// their own estimate are always kept; substituted users fill the rest.
    pub cap: usize,
    /// Articles need at least this many users with their own estimate.
    pub min_estimated_users: usize,
}

impl Default for BetaOptions {
    fn default() -> Self {
        Self {
            cap: 8,
            min_estimated_users: 3,
        }
    }
}

/// One article's contribution to a user's cost estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaContribution {
    pub value: f64,
    /// Co-users entering with their own estimate.
    pub n_estimated: usize,
    /// Co-users entering with the mean estimate.
    pub n_substituted: usize,
    /// Co-users left out by the cap.
    pub n_dropped: usize,
}

/// Cost at which a mixing user is exactly indifferent:
/// `E[A((1 + S)^gamma - S^gamma)]`, `S` being the number of disclosing
/// co-users. Co-users without an estimate (`None`) enter with `x_bar`,
/// subject to `cap`.
pub fn estimate_beta(
    user: &str,
    x_hat: f64,
    co_users: &[Option<f64>],
    a: f64,
    gamma: f64,
    x_bar: f64,
    cap: usize,
) -> Result<BetaContribution> {
    if !(x_hat > 0.0 && x_hat < 1.0) {
        return Err(EstimationError::PureStrategy {
            user: user.to_string(),
            x_hat,
        });
    }
    if !(0.0..=1.0).contains(&x_bar) {
        return Err(EstimationError::InvalidInput(format!(
            "x_bar = {x_bar} outside [0, 1]"
        )));
    }
    let mut probs: Vec<f64> = co_users.iter().flatten().copied().collect();
    if let Some(bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(EstimationError::InvalidInput(format!(
            "co-user estimate {bad} outside [0, 1]"
        )));
    }
    let n_estimated = probs.len();
    let unknown = co_users.len() - n_estimated;
    let room = cap.saturating_sub(1 + n_estimated);
    let n_substituted = unknown.min(room);
    probs.extend(std::iter::repeat_n(x_bar, n_substituted));
    Ok(BetaContribution {
        value: expected_increment(a, gamma, &probs),
        n_estimated,
        n_substituted,
        n_dropped: unknown - n_substituted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub user_id: String,
    pub x_hat: f64,
    /// Mean of the per-article values.
    pub beta_hat: f64,
    pub n_articles_used: usize,
    pub per_article: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedUser {
    pub user_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimation {
    pub x_bar: f64,
    pub n_articles_qualifying: usize,
    pub estimates: Vec<BetaEstimate>,
    pub excluded: Vec<ExcludedUser>,
}

/// Cost estimates for every user in `strategies`.
///
/// Only articles with at least `opts.min_estimated_users` estimated
/// participants contribute. A user's estimate is the mean of her per-article
/// values.
pub fn estimate_betas(
    aggregates: &[ArticleAggregate],
    strategies: &[StrategyEstimate],
    a: f64,
    gamma: f64,
    opts: &BetaOptions,
) -> Result<BetaEstimation> {
    let x_bar = mean_strategy(strategies).ok_or(EstimationError::TooFewObservations {
        needed: 1,
        found: 0,
    })?;
    let known: BTreeMap<&str, f64> = strategies
        .iter()
        .map(|s| (s.user_id.as_str(), s.x_hat))
        .collect();
    let mut per_user: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut qualifying = 0;
    for article in aggregates {
        let n_known = article
            .user_ids
            .iter()
            .filter(|u| known.contains_key(u.as_str()))
            .count();
        if n_known < opts.min_estimated_users {
            continue;
        }
        qualifying += 1;
        for (i, user) in article.user_ids.iter().enumerate() {
            let Some(&x_hat) = known.get(user.as_str()) else {
                continue;
            };
            if !(x_hat > 0.0 && x_hat < 1.0) {
                continue;
            }
            let co: Vec<Option<f64>> = article
                .user_ids
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, u)| known.get(u.as_str()).copied())
                .collect();
            let c = estimate_beta(user, x_hat, &co, a, gamma, x_bar, opts.cap)?;
            per_user.entry(user.as_str()).or_default().push(c.value);
        }
    }

    let mut estimates = Vec::new();
    let mut excluded = Vec::new();
    for s in strategies {
        match per_user.remove(s.user_id.as_str()) {
            Some(values) => estimates.push(BetaEstimate {
                user_id: s.user_id.clone(),
                x_hat: s.x_hat,
                beta_hat: values.iter().sum::<f64>() / values.len() as f64,
                n_articles_used: values.len(),
                per_article: values,
            }),
            None => {
                let err = if s.x_hat > 0.0 && s.x_hat < 1.0 {
                    EstimationError::NoEligibleCoUsers {
                        user: s.user_id.clone(),
                    }
                } else {
                    EstimationError::PureStrategy {
                        user: s.user_id.clone(),
                        x_hat: s.x_hat,
                    }
                };
                excluded.push(ExcludedUser {
                    user_id: s.user_id.clone(),
                    reason: err.to_string(),
                });
            }
        }
    }
    Ok(BetaEstimation {
        x_bar,
        n_articles_qualifying: qualifying,
        estimates,
        excluded,
    })
}

/// Regression of strategy estimates on cost estimates, `x_hat ~ a0 + a1 beta_hat`.
/// Pairs are `(x_hat, beta_hat)`.
pub fn correlate_x_beta(pairs: &[(f64, f64)]) -> Result<LinearFit> {
    let beta: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    simple_ols(&beta, &x)
}
