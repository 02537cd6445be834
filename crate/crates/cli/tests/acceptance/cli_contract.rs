//! Command-line contract: exit codes, one-line errors, headers on every
//! artifact, re-runnable stages and the oracle column.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::NaiveDate;
use coolplan::ingest::{LoadSeries, Provenance};

const BIN: &str = env!("CARGO_BIN_EXE_coolplan");

/// Three synthetic days, two feature sets and short training keep the
/// staged runs quick.
const SMALL: &str = r#"
seed = 7
synth.days = 3
features.sets = ["Raw-N1", "K2-N1"]
nn.epochs = 3
nn.runs = 2
report.families = ["mlp", "lstm"]
report.proposals = [1, 4]
"#;

fn coolplan(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), stderr(o));
}

/// Single `error[E_...]: ...` line.
fn assert_error_line(o: &Output, code: i32, tag: &str) -> String {
    assert_eq!(o.status.code(), Some(code), "{}", stderr(o));
    let err = stderr(o);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "{err}");
    assert!(lines[0].starts_with(&format!("error[{tag}]: ")), "{err}");
    lines[0].to_string()
}

fn small_config(dir: &Path) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, SMALL).unwrap();
    p
}

fn write_loads(path: &Path, values: &[f64]) {
    let t0 = NaiveDate::from_ymd_opt(2023, 8, 1).unwrap().and_hms_opt(8, 30, 0).unwrap();
    let s = LoadSeries::half_hourly(t0, values.to_vec(), Provenance::Predicted);
    let mut f = std::fs::File::create(path).unwrap();
    s.write_csv(&mut f).unwrap();
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn missing_input_names_the_path() {
    let d = tempfile::tempdir().unwrap();
    let o = coolplan(d.path(), &["filter", "--telemetry", "/no/such/telemetry.csv"]);
    let line = assert_error_line(&o, 3, "E_INPUT");
    assert!(line.contains("/no/such/telemetry.csv"), "{line}");

    let o = coolplan(d.path(), &["dispatch"]);
    let line = assert_error_line(&o, 3, "E_INPUT");
    assert!(line.contains("load_filtered.csv"), "{line}");
}

#[test]
fn config_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.toml");
    std::fs::write(&cfg, "kalman.qq = 1.0\n").unwrap();
    let o = coolplan(d.path(), &["--config", cfg.to_str().unwrap(), "synth"]);
    let line = assert_error_line(&o, 2, "E_CONFIG");
    assert!(line.contains("qq"), "{line}");

    std::fs::write(&cfg, "ga.seed = 1\n").unwrap();
    let o = coolplan(d.path(), &["--config", cfg.to_str().unwrap(), "synth"]);
    assert_error_line(&o, 2, "E_CONFIG");

    let o = coolplan(d.path(), &["frobnicate"]);
    assert_error_line(&o, 2, "E_CONFIG");
    assert!(!d.path().join("telemetry.csv").exists());
}

#[test]
fn infeasible_load_exits_four_with_partial_plan() {
    let d = tempfile::tempdir().unwrap();
    let loads = d.path().join("loads.csv");
    write_loads(&loads, &[1200.0, 3600.0, 900.0]);
    let o = coolplan(d.path(), &["dispatch", "--loads", loads.to_str().unwrap()]);
    let line = assert_error_line(&o, 4, "E_INFEASIBLE");
    assert!(line.contains("2023-08-01 09:00:00"), "{line}");
    let rows = csv_rows(&d.path().join("dispatch_plan.csv"));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[2][7], "false");
}

#[test]
fn divergent_training_exits_five() {
    let d = tempfile::tempdir().unwrap();
    let cfg = small_config(d.path());
    let c = cfg.to_str().unwrap();
    for stage in ["synth", "filter", "cluster"] {
        assert_ok(&coolplan(d.path(), &["--config", c, stage]));
    }
    let bad = d.path().join("diverge.toml");
    std::fs::write(&bad, format!("{SMALL}nn.learning_rate = 1e300\nnn.clip = 0.0\n")).unwrap();
    let o = coolplan(d.path(), &["--config", bad.to_str().unwrap(), "train", "--family", "mlp", "--set", "Raw-N1"]);
    assert_error_line(&o, 5, "E_TRAINING");
}

#[test]
fn oracle_column_matches_default_plan() {
    let d = tempfile::tempdir().unwrap();
    let loads = d.path().join("loads.csv");
    let values = [2267.2, 1850.0, 640.0, 300.0, 1420.5, 2990.0, 3400.0, 95.0];
    write_loads(&loads, &values);
    let l = loads.to_str().unwrap();

    assert_ok(&coolplan(d.path(), &["dispatch", "--loads", l]));
    let plain = csv_rows(&d.path().join("dispatch_plan.csv"));
    assert_ok(&coolplan(d.path(), &["dispatch", "--loads", l, "--oracle"]));
    let with = csv_rows(&d.path().join("dispatch_plan.csv"));

    assert!(!plain[0].contains(&"oracle_power_kw".to_string()));
    let oc = with[0].iter().position(|h| h == "oracle_power_kw").expect("oracle column");
    let gc = with[0].iter().position(|h| h == "gap_vs_oracle").unwrap();
    let pc = with[0].iter().position(|h| h == "total_power_kw").unwrap();
    assert_eq!(plain.len(), values.len() + 1);
    for (p, w) in plain[1..].iter().zip(&with[1..]) {
        assert_eq!(p[..], w[..oc], "GA plan changes when the oracle column is added");
        let ga: f64 = w[pc].parse().unwrap();
        let or: f64 = w[oc].parse().unwrap();
        let gap: f64 = w[gc].parse().unwrap();
        assert!(gap <= 1e-3, "GA {ga} vs oracle {or}");
        assert!((gap - (ga - or) / or).abs() < 1e-5);
    }
}

fn every_file(root: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = walkdir::WalkDir::new(root)
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .filter(|p| p.file_name().unwrap() != "run.toml")
        .collect();
    v.sort();
    v
}

#[test]
fn staged_run_headers_and_reruns() {
    let d = tempfile::tempdir().unwrap();
    let cfg = small_config(d.path());
    let c = cfg.to_str().unwrap();
    let dir = d.path();
    for stage in ["synth", "filter", "cluster", "features", "train"] {
        assert_ok(&coolplan(dir, &["--config", c, stage]));
    }
    let model = dir.join("models/mlp_K2-N1.json");
    assert_ok(&coolplan(dir, &["--config", c, "predict", "--model", model.to_str().unwrap()]));
    let pred = dir.join("predictions/mlp_K2-N1.csv");
    let p = pred.to_str().unwrap();
    assert_ok(&coolplan(dir, &["--config", c, "dispatch", "--loads", p, "--day", "2023-08-03", "--oracle"]));
    assert_ok(&coolplan(dir, &["--config", c, "tes", "--loads", p]));

    let files = every_file(dir);
    assert!(files.len() >= 20, "{files:?}");
    let header = {
        let first = std::fs::read_to_string(dir.join("telemetry.csv")).unwrap();
        first.lines().next().unwrap().to_string()
    };
    assert!(header.starts_with("# coolplan v0.1.0 config=") && header.ends_with(" seed=7"), "{header}");
    let hash = header.split("config=").nth(1).unwrap().split(' ').next().unwrap().to_string();
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        if f.extension().is_some_and(|e| e == "json") {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["header"]["config"], hash.as_str(), "{}", f.display());
            assert_eq!(v["header"]["seed"], 7, "{}", f.display());
            assert_eq!(v["header"]["version"], "0.1.0", "{}", f.display());
        } else {
            assert_eq!(text.lines().next().unwrap(), header, "{}", f.display());
        }
    }

    let rmse = csv_rows(&dir.join("rmse_table.csv"));
    assert_eq!(rmse.len(), 3);
    let plan = csv_rows(&dir.join("dispatch_plan.csv"));
    assert_eq!(plan.len(), 49);
    assert!(plan[1][0].starts_with("2023-08-03T00:00"));

    // Deleting any intermediate and re-running its stage reproduces it.
    let reruns: [(&str, &[&str]); 7] = [
        ("telemetry.csv", &["synth"]),
        ("load_filtered.csv", &["filter"]),
        ("clusters/k2.json", &["cluster"]),
        ("features/K2-N1.csv", &["features"]),
        ("models/lstm_Raw-N1.json", &["train"]),
        ("predictions/mlp_K2-N1.csv", &["predict", "--model", model.to_str().unwrap()]),
        ("cost_comparison.csv", &["tes", "--loads", p]),
    ];
    for (rel, args) in reruns {
        let path = dir.join(rel);
        let before = std::fs::read(&path).unwrap();
        std::fs::remove_file(&path).unwrap();
        let mut full = vec!["--config", c];
        full.extend_from_slice(args);
        assert_ok(&coolplan(dir, &full));
        assert_eq!(std::fs::read(&path).unwrap(), before, "{rel} differs after re-run");
    }
}

#[test]
fn help_and_version_exit_zero() {
    let d = tempfile::tempdir().unwrap();
    for flag in ["--help", "--version"] {
        let o = coolplan(d.path(), &[flag]);
        assert_ok(&o);
        assert!(!o.stdout.is_empty());
    }
}
