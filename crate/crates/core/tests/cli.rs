use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_disclosure-games"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/example_comments.csv")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fit_on_bundled_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["fit", "--input", s(&example()), "--out-dir", s(dir.path())]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "fit_report.json",
        "powerlaw_fit.csv",
        "null_fit.csv",
        "residual_hist.csv",
        "qq.csv",
        "manifest.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("log A") && stdout.contains("gamma"));
    let qq = fs::read_to_string(dir.path().join("qq.csv")).unwrap();
    assert!(qq.starts_with("theoretical_q,sample_q\n"));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("fit_report.json")).unwrap()).unwrap();
    assert!(report["power_law"]["gamma"].is_f64());
}

#[test]
fn empty_input_fails_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    fs::write(&input, "article_id,user_id,disclosed\n").unwrap();
    let out = run(&[
        "fit",
        "--input",
        s(&input),
        "--out-dir",
        s(&dir.path().join("o")),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("zero valid rows"));
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn estimate_without_qualifying_users() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "estimate",
        "--input",
        s(&example()),
        "--out-dir",
        s(dir.path()),
        "--min-posts",
        "100000",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
    let xhat = fs::read_to_string(dir.path().join("xhat.csv")).unwrap();
    assert_eq!(xhat, "user_id,x_hat,n_posts,n_disclosing,n_articles\n");
    let betahat = fs::read_to_string(dir.path().join("betahat.csv")).unwrap();
    assert_eq!(betahat.lines().count(), 1);
}

#[test]
fn estimate_on_bundled_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "estimate",
        "--input",
        s(&example()),
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "xhat.csv",
        "betahat.csv",
        "x_vs_beta.json",
        "xhat_hist.csv",
        "betahat_hist.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let betahat = fs::read_to_string(dir.path().join("betahat.csv")).unwrap();
    assert!(betahat.lines().count() > 1);
}

#[test]
fn solve_inline_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "solve",
        "--game",
        r#"{"A":4,"gamma":0.5,"beta":[1.0,1.9,3.0]}"#,
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("equilibria.json")).unwrap()).unwrap();
    let xs: Vec<Vec<f64>> = v["report"]["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| serde_json::from_value(c["x"].clone()).unwrap())
        .collect();
    assert!(xs.contains(&vec![1.0, 0.0, 0.0]));
    assert_eq!(
        v["threshold_equilibrium"],
        serde_json::json!([1.0, 0.0, 0.0])
    );

    let game = dir.path().join("game.json");
    fs::write(&game, r#"{"A": 1, "gamma": 1, "beta": [2, 3]}"#).unwrap();
    let out = run(&["solve", "--game", s(&game), "--out-dir", s(dir.path())]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("equilibria.json")).unwrap()).unwrap();
    assert_eq!(v["report"]["certificates"].as_array().unwrap().len(), 1);
    assert_eq!(
        v["report"]["certificates"][0]["x"],
        serde_json::json!([0.0, 0.0])
    );
}

#[test]
fn solve_rejects_bad_game() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "solve",
        "--game",
        r#"{"A":-1,"gamma":1,"beta":[1]}"#,
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn simulate_then_fit_is_byte_identical() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path();
            let sim = p.join("sim");
            assert!(run(&[
                "simulate",
                "--out-dir",
                s(&sim),
                "--n-articles",
                "300",
                "--seed",
                "4"
            ])
            .status
            .success());
            let comments = sim.join("comments.csv");
            assert!(run(&[
                "fit",
                "--input",
                s(&comments),
                "--out-dir",
                s(&p.join("fit"))
            ])
            .status
            .success());
            assert!(run(&[
                "estimate",
                "--input",
                s(&comments),
                "--out-dir",
                s(&p.join("est")),
                "--min-posts",
                "5",
            ])
            .status
            .success());
            dir
        })
        .collect();
    for f in [
        "sim/comments.csv",
        "sim/truth.csv",
        "fit/powerlaw_fit.csv",
        "fit/null_fit.csv",
        "fit/residual_hist.csv",
        "fit/qq.csv",
        "fit/fit_report.json",
        "est/xhat.csv",
        "est/betahat.csv",
        "est/xhat_hist.csv",
        "est/betahat_hist.csv",
        "est/x_vs_beta.json",
    ] {
        let a = fs::read(runs[0].path().join(f)).unwrap();
        let b = fs::read(runs[1].path().join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn bad_thread_setting_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("DISCLOSURE_GAMES_THREADS", "many")
        .args([
            "solve",
            "--game",
            r#"{"A":1,"gamma":1,"beta":[2]}"#,
            "--out-dir",
            s(dir.path()),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("DISCLOSURE_GAMES_THREADS"));
}
