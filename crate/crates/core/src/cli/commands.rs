use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use super::{EstimateArgs, FitArgs, SimulateArgs, SolveArgs};
use crate::config::Limits;
use crate::dataset::{
    aggregate_articles, load_records, simulate_dataset, write_records_csv, ArticleAggregate,
    LoadReport, SimulationConfig, StrategyDistribution,
};
use crate::equilibrium::{
    construct_threshold_equilibrium, solve_equilibria, BoundaryChecks, EquilibriumReport,
    SolveOptions,
};
use crate::estimation::{
    correlate_x_beta, estimate_betas, estimate_strategies, fit_null_linear, fit_power_law,
    histogram, null_sample, power_law_sample, residual_diagnostics, BetaEstimation, BetaOptions,
    Coefficient, HistogramBin, LinearFit, NullLinearFit, PowerLawFit, ResidualReport,
    StrategyEstimate,
};
use crate::game::GameSpec;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: Option<u64>,
    config: &'a T,
    modules: Modules,
    outputs: Vec<&'static str>,
}

#[derive(Serialize)]
struct Modules {
    game: &'static str,
    equilibrium: &'static str,
    estimation: &'static str,
    dataset: &'static str,
}

fn write_manifest<T: Serialize>(
    dir: &Path,
    command: &'static str,
    seed: Option<u64>,
    config: &T,
    outputs: Vec<&'static str>,
) -> Result<()> {
    let manifest = Manifest {
        tool: "disclosure-games",
        version: VERSION,
        command,
        seed,
        config,
        modules: Modules {
            game: VERSION,
            equilibrium: VERSION,
            estimation: VERSION,
            dataset: VERSION,
        },
        outputs,
    };
    write_json(&dir.join("manifest.json"), &manifest)
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut writer = csv::Writer::from_writer(create(path)?);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_histogram(path: &Path, bins: &[HistogramBin]) -> Result<()> {
    write_csv(
        path,
        &["bin_left", "bin_right", "count"],
        bins.iter()
            .map(|b| vec![b.left.to_string(), b.right.to_string(), b.count.to_string()]),
    )
}

fn load(args: &super::InputArgs) -> Result<LoadReport> {
    let report = load_records(&args.input, args.format.into())?;
    if !report.rejected.is_empty() {
        let first = &report.rejected[0];
        eprintln!(
            "warning: skipped {} malformed row(s); first at line {}: {}",
            report.rejected.len(),
            first.line,
            first.reason
        );
    }
    Ok(report)
}

#[derive(Serialize)]
struct FitReport<'a> {
    n_comments: usize,
    n_rejected_rows: usize,
    n_articles: usize,
    power_law: &'a PowerLawFit,
    null_linear: &'a NullLinearFit,
    /// Power-law AIC minus null AIC. The two are on different scales.
    aic_difference: f64,
    residual_diagnostics: Option<&'a ResidualReport>,
    warnings: Vec<String>,
}

fn fmt_row(name: &str, c: &Coefficient) -> String {
    format!(
        "{name:<10} {:>12.6} {:>12.6} {:>10.3e}   [{:.6}, {:.6}]",
        c.estimate, c.std_err, c.p_value, c.ci_low, c.ci_high
    )
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let aggregates = aggregate_articles(&loaded.records);
    let power = fit_power_law(&aggregates).context("power-law fit")?;
    let null = fit_null_linear(&aggregates).context("null model fit")?;
    let mut warnings = Vec::new();
    let diagnostics = match residual_diagnostics(&power.residuals) {
        Ok(d) => Some(d),
        Err(e) => {
            warnings.push(format!("residual diagnostics skipped: {e}"));
            None
        }
    };

    prepare_dir(&args.out_dir)?;
    let dir = &args.out_dir;
    write_json(
        &dir.join("fit_report.json"),
        &FitReport {
            n_comments: loaded.records.len(),
            n_rejected_rows: loaded.rejected.len(),
            n_articles: aggregates.len(),
            power_law: &power,
            null_linear: &null,
            aic_difference: power.aic - null.aic,
            residual_diagnostics: diagnostics.as_ref(),
            warnings: warnings.clone(),
        },
    )?;
    let fitted_rows =
        |sample: Vec<&ArticleAggregate>, f: &dyn Fn(f64) -> f64| -> Vec<Vec<String>> {
            sample
                .into_iter()
                .map(|a| vec![a.s.to_string(), a.r.to_string(), f(a.s as f64).to_string()])
                .collect()
        };
    let header = ["s", "observed_r", "fitted_r"];
    write_csv(
        &dir.join("powerlaw_fit.csv"),
        &header,
        fitted_rows(power_law_sample(&aggregates), &|s| power.predict(s)),
    )?;
    write_csv(
        &dir.join("null_fit.csv"),
        &header,
        fitted_rows(null_sample(&aggregates), &|s| null.predict(s)),
    )?;
    write_histogram(
        &dir.join("residual_hist.csv"),
        &histogram(&power.residuals, args.bins),
    )?;
    let qq = diagnostics
        .as_ref()
        .map(|d| d.qq_points.as_slice())
        .unwrap_or(&[]);
    write_csv(
        &dir.join("qq.csv"),
        &["theoretical_q", "sample_q"],
        qq.iter().map(|(t, s)| vec![t.to_string(), s.to_string()]),
    )?;
    write_manifest(
        dir,
        "fit",
        None,
        args,
        vec![
            "fit_report.json",
            "powerlaw_fit.csv",
            "null_fit.csv",
            "residual_hist.csv",
            "qq.csv",
        ],
    )?;

    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{:<10} {:>12} {:>12} {:>10}   95% CI",
        "parameter", "value", "std.err", "p-value"
    );
    println!("{}", fmt_row("log A", &power.log_a_coef));
    println!("{}", fmt_row("gamma", &power.gamma_coef));
    println!("{}", fmt_row("null b0", &null.beta0_coef));
    println!("{}", fmt_row("null b1", &null.beta1_coef));
    println!(
        "power law: n = {}, adj. R2 = {:.4}, AIC = {:.3} ({} without disclosure, {} without comments excluded)",
        power.n_articles,
        power.r2_adjusted,
        power.aic,
        power.n_excluded_no_disclosure,
        power.n_excluded_no_comments
    );
    println!(
        "null:      n = {}, adj. R2 = {:.4}, AIC = {:.3}",
        null.n_articles, null.r2_adjusted, null.aic
    );
    if let Some(d) = &diagnostics {
        println!(
            "residuals: skewness = {:.4}, excess kurtosis = {:.4}, Jarque-Bera = {:.3} (p = {:.3e})",
            d.skewness, d.excess_kurtosis, d.jarque_bera_stat, d.jarque_bera_p
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct RewardParams {
    a: f64,
    gamma: f64,
    /// Whether each parameter was fitted from the input rather than given.
    a_fitted: bool,
    gamma_fitted: bool,
}

#[derive(Serialize)]
struct XBetaReport<'a> {
    reward: &'a RewardParams,
    n_strategy_estimates: usize,
    n_beta_estimates: usize,
    x_bar: Option<f64>,
    n_articles_qualifying: usize,
    fit: Option<&'a LinearFit>,
    excluded: &'a [crate::estimation::ExcludedUser],
    warnings: &'a [String],
}

fn reward_params(args: &EstimateArgs, aggregates: &[ArticleAggregate]) -> Result<RewardParams> {
    if let (Some(a), Some(gamma)) = (args.a, args.gamma) {
        return Ok(RewardParams {
            a,
            gamma,
            a_fitted: false,
            gamma_fitted: false,
        });
    }
    let fit = fit_power_law(aggregates)
        .context("fitting the reward law (pass --a and --gamma to skip)")?;
    Ok(RewardParams {
        a: args.a.unwrap_or(fit.a()),
        gamma: args.gamma.unwrap_or(fit.gamma),
        a_fitted: args.a.is_none(),
        gamma_fitted: args.gamma.is_none(),
    })
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let aggregates = aggregate_articles(&loaded.records);
    let reward = reward_params(args, &aggregates)?;
    GameSpec::symmetric(1, reward.a, reward.gamma, 0.0).context("reward parameters")?;
    let strategies = estimate_strategies(&loaded.records, args.min_posts);
    let opts = BetaOptions {
        cap: args.enum_cap,
        min_estimated_users: args.min_estimated_users,
    };

    let mut warnings = Vec::new();
    let betas = if strategies.is_empty() {
        warnings.push(format!(
            "no user commented on at least {} articles; outputs are empty",
            args.min_posts
        ));
        BetaEstimation {
            x_bar: f64::NAN,
            n_articles_qualifying: 0,
            estimates: Vec::new(),
            excluded: Vec::new(),
        }
    } else {
        estimate_betas(&aggregates, &strategies, reward.a, reward.gamma, &opts)?
    };
    let pairs: Vec<(f64, f64)> = betas
        .estimates
        .iter()
        .map(|e| (e.x_hat, e.beta_hat))
        .collect();
    let fit = if pairs.is_empty() {
        None
    } else {
        match correlate_x_beta(&pairs) {
            Ok(f) => Some(f),
            Err(e) => {
                warnings.push(format!("x-beta regression skipped: {e}"));
                None
            }
        }
    };

    prepare_dir(&args.out_dir)?;
    let dir = &args.out_dir;
    write_csv(
        &dir.join("xhat.csv"),
        &["user_id", "x_hat", "n_posts", "n_disclosing", "n_articles"],
        strategies.iter().map(|s: &StrategyEstimate| {
            vec![
                s.user_id.clone(),
                s.x_hat.to_string(),
                s.n_posts.to_string(),
                s.n_disclosing.to_string(),
                s.n_articles.to_string(),
            ]
        }),
    )?;
    write_csv(
        &dir.join("betahat.csv"),
        &["user_id", "x_hat", "beta_hat", "n_articles_used"],
        betas.estimates.iter().map(|e| {
            vec![
                e.user_id.clone(),
                e.x_hat.to_string(),
                e.beta_hat.to_string(),
                e.n_articles_used.to_string(),
            ]
        }),
    )?;
    let x_hats: Vec<f64> = strategies.iter().map(|s| s.x_hat).collect();
    let beta_hats: Vec<f64> = betas.estimates.iter().map(|e| e.beta_hat).collect();
    write_histogram(&dir.join("xhat_hist.csv"), &histogram(&x_hats, args.bins))?;
    write_histogram(
        &dir.join("betahat_hist.csv"),
        &histogram(&beta_hats, args.bins),
    )?;
    write_json(
        &dir.join("x_vs_beta.json"),
        &XBetaReport {
            reward: &reward,
            n_strategy_estimates: strategies.len(),
            n_beta_estimates: betas.estimates.len(),
            x_bar: betas.x_bar.is_finite().then_some(betas.x_bar),
            n_articles_qualifying: betas.n_articles_qualifying,
            fit: fit.as_ref(),
            excluded: &betas.excluded,
            warnings: &warnings,
        },
    )?;
    write_manifest(
        dir,
        "estimate",
        None,
        args,
        vec![
            "xhat.csv",
            "betahat.csv",
            "x_vs_beta.json",
            "xhat_hist.csv",
            "betahat_hist.csv",
        ],
    )?;

    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "A = {:.6}, gamma = {:.6}; {} strategy estimates, {} cost estimates from {} articles",
        reward.a,
        reward.gamma,
        strategies.len(),
        betas.estimates.len(),
        betas.n_articles_qualifying
    );
    if let Some(f) = &fit {
        println!(
            "{:<10} {:>12} {:>12} {:>10}   95% CI",
            "x ~ beta", "value", "std.err", "p-value"
        );
        println!("{}", fmt_row("intercept", &f.intercept));
        println!("{}", fmt_row("slope", &f.slope));
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    game: &'a GameSpec,
    report: &'a EquilibriumReport,
    threshold_equilibrium: Option<Vec<f64>>,
    boundary_checks: &'a BoundaryChecks,
}

fn read_game(raw: &str) -> Result<GameSpec> {
    let text = if raw.trim_start().starts_with('{') {
        raw.to_string()
    } else {
        fs::read_to_string(raw).with_context(|| format!("cannot read game file {raw}"))?
    };
    serde_json::from_str(&text).context("invalid game JSON")
}

pub fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let g = read_game(&args.game)?;
    let defaults = SolveOptions::default();
    let opts = SolveOptions {
        tol: crate::config::Tolerances {
            kkt: args.tol,
            ..defaults.tol
        },
        limits: Limits {
            support: args.enum_cap,
            ..defaults.limits
        },
        starts: args.starts,
        seed: args.seed,
        ..defaults
    };
    let report = solve_equilibria(&g, &opts)?;
    let threshold = construct_threshold_equilibrium(&g).map(|x| x.as_slice().to_vec());
    let checks = BoundaryChecks::evaluate(&g, args.tol)?;

    prepare_dir(&args.out_dir)?;
    write_json(
        &args.out_dir.join("equilibria.json"),
        &SolveOutput {
            game: &g,
            report: &report,
            threshold_equilibrium: threshold.clone(),
            boundary_checks: &checks,
        },
    )?;
    write_manifest(
        &args.out_dir,
        "solve",
        Some(args.seed),
        args,
        vec!["equilibria.json"],
    )?;

    for w in &report.trace.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{} equilibri{}{}",
        report.len(),
        if report.len() == 1 { "um" } else { "a" },
        if report.degenerate {
            " (degenerate game)"
        } else {
            ""
        }
    );
    for c in &report.certificates {
        let x: Vec<String> = c.x.iter().map(|v| format!("{v:.6}")).collect();
        println!("  x = ({})", x.join(", "));
    }
    if let Some(t) = threshold {
        let x: Vec<String> = t.iter().map(|v| format!("{v}")).collect();
        println!("threshold equilibrium: ({})", x.join(", "));
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateManifestConfig<'a> {
    args: &'a SimulateArgs,
    simulation: &'a SimulationConfig,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let config = SimulationConfig {
        a: args.a.unwrap_or(SimulationConfig::default().a),
        gamma: args.gamma,
        n_articles: args.n_articles,
        noise_sigma: args.noise_sigma,
        seed: args.seed,
        n_users: args.n_users,
        min_participants: args.min_participants,
        max_participants: args.max_participants,
        strategies: StrategyDistribution::Uniform {
            low: args.x_low,
            high: args.x_high,
        },
        ..SimulationConfig::default()
    };
    let data = simulate_dataset(&config)?;

    prepare_dir(&args.out_dir)?;
    let dir = &args.out_dir;
    let mut out = create(&dir.join("comments.csv"))?;
    write_records_csv(&data.records, &mut out)?;
    out.flush()?;
    write_csv(
        &dir.join("truth.csv"),
        &["user_id", "x", "beta", "n_articles"],
        data.users.iter().map(|u| {
            vec![
                u.user_id.clone(),
                u.x.to_string(),
                u.beta.map(|b| b.to_string()).unwrap_or_default(),
                u.n_articles.to_string(),
            ]
        }),
    )?;
    write_manifest(
        dir,
        "simulate",
        Some(args.seed),
        &SimulateManifestConfig {
            args,
            simulation: &config,
        },
        vec!["comments.csv", "truth.csv"],
    )?;

    println!(
        "A = {} (log A = {}), gamma = {}, noise sigma = {}, seed = {}",
        config.a,
        config.a.ln(),
        config.gamma,
        config.noise_sigma,
        config.seed
    );
    println!(
        "{} comments on {} articles by {} users",
        data.records.len(),
        config.n_articles,
        config.n_users
    );
    Ok(())
}
