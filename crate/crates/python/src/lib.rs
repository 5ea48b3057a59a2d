//! Python bindings: `import disclosure_py`.
//!
//! Structured results (equilibrium reports, fits) are returned as plain
//! dictionaries decoded from the library's JSON serialization.

use disclosure_games::dataset::{
    aggregate_articles, simulate_dataset, ArticleAggregate, SimulationConfig,
};
use disclosure_games::equilibrium::{
    brute_force_pure_equilibria, construct_threshold_equilibrium, solve_equilibria, verify_kkt,
    KktCertificate, SolveOptions,
};
use disclosure_games::estimation::{
    estimate_beta as estimate_beta_rs, fit_beta_constrained_lsq, fit_null_linear,
    fit_power_law as fit_power_law_rs, LsqOptions,
};
use disclosure_games::game::{self, Evaluator};
use disclosure_games::{DisclosureOutcome, GameSpec, StrategyProfile};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn profile(x: Vec<f64>) -> PyResult<StrategyProfile> {
    StrategyProfile::new(x).map_err(value_err)
}

/// Disclosure game with reward `A * S^gamma` and per-player costs `beta`.
#[pyclass(name = "Game", frozen)]
#[derive(Clone)]
struct PyGame(GameSpec);

#[pymethods]
impl PyGame {
    #[new]
    fn new(a: f64, gamma: f64, beta: Vec<f64>) -> PyResult<Self> {
        GameSpec::new(a, gamma, beta).map(Self).map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(value_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(value_err)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn beta(&self) -> Vec<f64> {
        self.0.beta().to_vec()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn pure_payoff(&self, outcome: Vec<u8>, j: usize) -> PyResult<f64> {
        let d = DisclosureOutcome::from_bits(&outcome).map_err(value_err)?;
        game::pure_payoff(&self.0, &d, j).map_err(value_err)
    }

    fn expected_utility(&self, x: Vec<f64>, j: usize) -> PyResult<f64> {
        game::expected_utility(&self.0, &profile(x)?, j).map_err(value_err)
    }

    fn marginal_utility(&self, x: Vec<f64>, j: usize) -> PyResult<f64> {
        game::marginal_utility(&self.0, &profile(x)?, j).map_err(value_err)
    }

    /// `(C1, C0)` for player `j` given the others' probabilities.
    fn contraction_coefficients(&self, x_minus_j: Vec<f64>, j: usize) -> PyResult<(f64, f64)> {
        let c = Evaluator::default()
            .contraction_coefficients(&self.0, &x_minus_j, j)
            .map_err(value_err)?;
        Ok((c.c1, c.c0))
    }

    #[pyo3(signature = (x, lam, mu, tol = 1e-8))]
    fn verify_kkt(&self, x: Vec<f64>, lam: Vec<f64>, mu: Vec<f64>, tol: f64) -> PyResult<bool> {
        let cert = KktCertificate::new(x, lam, mu);
        verify_kkt(&self.0, &cert, tol)
            .map(|v| v.is_valid())
            .map_err(value_err)
    }

    /// All equilibria found by support enumeration, as a report dictionary.
    #[pyo3(signature = (seed = None))]
    fn solve<'py>(&self, py: Python<'py>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let mut opts = SolveOptions::default();
        if let Some(seed) = seed {
            opts.seed = seed;
        }
        let report = solve_equilibria(&self.0, &opts).map_err(value_err)?;
        to_py(py, &report)
    }

    fn pure_equilibria(&self) -> PyResult<Vec<Vec<u32>>> {
        Ok(brute_force_pure_equilibria(&self.0)
            .map_err(value_err)?
            .iter()
            .map(|o| o.bits().into_iter().map(u32::from).collect())
            .collect())
    }

    fn threshold_equilibrium(&self) -> Option<Vec<f64>> {
        construct_threshold_equilibrium(&self.0).map(|x| x.as_slice().to_vec())
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(a={}, gamma={}, beta={:?})",
            self.0.a(),
            self.0.gamma(),
            self.0.beta()
        )
    }
}

fn aggregates(r: Vec<u64>, s: Vec<u64>) -> PyResult<Vec<ArticleAggregate>> {
    if r.len() != s.len() {
        return Err(value_err(format!(
            "r has {} entries, s has {}",
            r.len(),
            s.len()
        )));
    }
    Ok(r.into_iter()
        .zip(s)
        .enumerate()
        .map(|(i, (r, s))| ArticleAggregate {
            article_id: i.to_string(),
            r,
            s,
            user_ids: Vec::new(),
        })
        .collect())
}

/// Log-log power-law fit of comment totals `r` on disclosing-user counts `s`.
#[pyfunction]
fn fit_power_law<'py>(py: Python<'py>, r: Vec<u64>, s: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
    let fit = fit_power_law_rs(&aggregates(r, s)?).map_err(value_err)?;
    to_py(py, &fit)
}

/// Linear null model `r ~ b0 + b1 s`.
#[pyfunction]
fn fit_null<'py>(py: Python<'py>, r: Vec<u64>, s: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
    let fit = fit_null_linear(&aggregates(r, s)?).map_err(value_err)?;
    to_py(py, &fit)
}

/// Indifference cost for one article. `None` entries in `co_users` are
/// replaced by `x_bar`.
#[pyfunction]
#[pyo3(signature = (x_hat, co_users, a, gamma, x_bar, cap = 8))]
fn estimate_beta(
    x_hat: f64,
    co_users: Vec<Option<f64>>,
    a: f64,
    gamma: f64,
    x_bar: f64,
    cap: usize,
) -> PyResult<f64> {
    estimate_beta_rs("user", x_hat, &co_users, a, gamma, x_bar, cap)
        .map(|c| c.value)
        .map_err(value_err)
}

#[pyfunction]
fn fit_constrained<'py>(
    py: Python<'py>,
    y_hat: Vec<f64>,
    a: f64,
    gamma: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let fit =
        fit_beta_constrained_lsq(&y_hat, a, gamma, &LsqOptions::default()).map_err(value_err)?;
    to_py(py, &fit)
}

/// Synthetic comment table as `(article_id, user_id, disclosed)` tuples.
#[pyfunction]
#[pyo3(signature = (seed = 20150301, n_articles = 2000, noise_sigma = 0.5))]
fn simulate(
    seed: u64,
    n_articles: usize,
    noise_sigma: f64,
) -> PyResult<Vec<(String, String, bool)>> {
    let config = SimulationConfig {
        seed,
        n_articles,
        noise_sigma,
        ..Default::default()
    };
    let data = simulate_dataset(&config).map_err(value_err)?;
    Ok(data
        .records
        .into_iter()
        .map(|r| (r.article_id, r.user_id, r.disclosed))
        .collect())
}

/// Per-article `(article_id, r, s)` from `(article_id, user_id, disclosed)` rows.
#[pyfunction]
fn aggregate(rows: Vec<(String, String, bool)>) -> Vec<(String, u64, u64)> {
    let records: Vec<_> = rows
        .into_iter()
        .map(
            |(article_id, user_id, disclosed)| disclosure_games::dataset::CommentRecord {
                article_id,
                user_id,
                disclosed,
                timestamp: None,
                source: None,
            },
        )
        .collect();
    aggregate_articles(&records)
        .into_iter()
        .map(|a| (a.article_id, a.r, a.s))
        .collect()
}

#[pymodule]
pub fn disclosure_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(fit_null, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_beta, m)?)?;
    m.add_function(wrap_pyfunction!(fit_constrained, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
