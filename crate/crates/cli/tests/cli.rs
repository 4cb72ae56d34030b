use std::fs;
use std::process::{Command, Output};

fn unfair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unfair"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let names = [
        "profiles.csv",
        "aggregate.csv",
        "figure.csv",
        "prediction.csv",
        "gap_series.csv",
    ];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_unfair"))
            .env("UNFAIR_THREADS", threads)
            .args([
                "simulate", "--n", "20", "--m", "20000", "--d", "3", "--trials", "6", "--seed", "9",
            ])
            .args([
                "--outputs",
                "profiles,aggregate,figure,prediction,gap_series",
                "--snapshot-every",
                "500",
            ])
            .arg("--out-dir")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        names.map(|name| fs::read(dir.path().join(name)).unwrap())
    };
    let serial = run("1");
    let wide = run("8");
    for (name, (x, y)) in names.iter().zip(serial.iter().zip(&wide)) {
        assert_eq!(x, y, "{name}");
    }
    let aggregate = fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
    assert!(aggregate.contains("# master_seed: 9"));
    assert!(aggregate.contains("rank,label_mode,load_mean,load_std,q05,q25,q50,q75,q95,predicted,abs_err,rel_err"));
}

#[test]
fn simulate_reads_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("spec.toml");
    fs::write(
        &config,
        "trials = 2\n[process]\nn = 5\nm = 100\nd = 2\npolicy = \"unfair\"\nseed = 1\n[outputs]\nartifacts = [\"figure\"]\n",
    )
    .unwrap();
    let out = unfair(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let figure = fs::read_to_string(dir.path().join("figure.csv")).unwrap();
    assert_eq!(figure.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("spec.toml");
    fs::write(
        &config,
        "trials = 0\n[process]\nn = 5\nm = 100\nd = 0\npolicy = \"unfair\"\nseed = 1\n",
    )
    .unwrap();
    let out = unfair(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("trials") && err.contains("process.d"), "{err}");
}

#[test]
fn predict_top_rank() {
    let out = unfair(&["predict", "--n", "100", "--d", "2", "--m", "1000000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("100,")).unwrap();
    let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
    assert!((cols[1] - 19_900.0).abs() < 1e-6);
    assert_eq!(cols[2], 20_000.0);
}

#[test]
fn oracle_small_law() {
    let out = unfair(&["oracle", "--n", "2", "--m", "3", "--d", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("profile,0 3,9/16"));
    assert!(text.contains("profile,1 2,7/16"));
}

#[test]
fn oracle_budget_is_enforced() {
    let out = unfair(&["oracle", "--n", "30", "--m", "200", "--d", "2", "--max-states", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_quick_subset() {
    let out = unfair(&[
        "verify",
        "--checks",
        "uniform_oracle,exact_identities,corollary_consistency,oracle_equivalence",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 4);
    assert!(text.contains("4/4 checks passed"));
}

#[test]
fn verify_unknown_check() {
    let out = unfair(&["verify", "--checks", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn swapbound_report() {
    let out = unfair(&[
        "swapbound",
        "--n",
        "10",
        "--d",
        "2",
        "--gap",
        "20",
        "--horizon",
        "20000",
        "--trials",
        "300",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("bound: 0.1353"));
    assert!(text.contains("verdict: PASS"));
    let out = unfair(&[
        "swapbound",
        "--n",
        "10",
        "--d",
        "1",
        "--gap",
        "5",
        "--horizon",
        "100",
        "--trials",
        "10",
    ]);
    assert!(stdout(&out).contains("bound vacuous (=1)"));
}
