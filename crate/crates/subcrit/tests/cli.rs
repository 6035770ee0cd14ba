use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn subcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subcrit")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.ini");
    fs::write(&path, format!("{body}\n[run]\noutput = out\n")).unwrap();
    path.to_string_lossy().into_owned()
}

/// Scenario sections followed by `[run]` with the shared output key.
fn config(dir: &Path, scenario: &str, run: &str) -> String {
    let path = dir.join("run.ini");
    fs::write(&path, format!("{scenario}\n[run]\noutput = out\n{run}\n")).unwrap();
    path.to_string_lossy().into_owned()
}

fn csv_column(text: &str, name: &str) -> Vec<String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn minimal_config_reports_critical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[scenario]\nname = single_node\nweight = 2", "tasks = classify\nseed = 17");
    let out = subcrit(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(report.contains("verdict=Critical"), "{report}");
    assert!(report.contains("seed: 17"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["classify"][0]["verdict"], "Critical");
    assert_eq!(summary["exit_code"], 0);
    let csv = fs::read_to_string(dir.path().join("out/classify.csv")).unwrap();
    assert_eq!(csv_column(&csv, "lambda_mu"), vec!["1.00000000000000e0"]);
}

#[test]
fn supercritical_wave_is_refused_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[scenario]\nname = single_node\nweight = 3", "tasks = classify, wave");
    let out = subcrit(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(report.contains("verdict=Supercritical"), "{report}");
    assert!(report.contains("refused: supercritical"), "{report}");
}

#[test]
fn malformed_config_exits_one_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[scenario]\nname = single_node\nweight two");
    let out = subcrit(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(subcrit(&["sweep", "x.ini", "--axis", "mass"]).status.code(), Some(1));
    assert_eq!(subcrit(&["run", "/nonexistent/run.ini"]).status.code(), Some(1));
    assert_eq!(subcrit(&[]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[scenario]\nname = single_node", "tasks = classify");
    // A beta sweep without beta values is a usage error.
    assert_eq!(subcrit(&["sweep", &cfg, "--axis", "beta"]).status.code(), Some(1));
}

#[test]
fn lambda_sweep_flips_at_critical_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "[scenario]\nname = single_node\nweight = 1\n[sweep]\nlambda = 0.5, 1.0, 1.5, 2.0, 2.5",
        "relative = true\ntasks = classify\nworkers = 3",
    );
    let out = subcrit(&["sweep", &cfg, "--axis", "lambda"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep_lambda.csv")).unwrap();
    assert_eq!(csv_column(&csv, "verdict"), ["Subcritical", "Critical", "Supercritical", "Supercritical", "Supercritical"]);
    let lam: Vec<f64> = csv_column(&csv, "lambda_mu").iter().map(|s| s.parse().unwrap()).collect();
    for (v, c) in lam.iter().zip([0.5, 1.0, 1.5, 2.0, 2.5]) {
        assert!((v - 1.0 / c).abs() < 1e-12);
    }
    // Supercritical rows carry no Green form.
    assert_eq!(csv_column(&csv, "green")[4], "nan");
}

#[test]
fn size_sweep_free_green_is_cauchy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[scenario]\nname = grid\ndim = 3", "couplings = 0\nsizes = 5, 9, 13, 17, 21\ntasks = green");
    let out = subcrit(&["sweep", &cfg, "--axis", "size"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep_size.csv")).unwrap();
    let g: Vec<f64> = csv_column(&csv, "green").iter().map(|s| s.parse().unwrap()).collect();
    assert!(g.windows(2).all(|w| w[1] > w[0]));
    let inc: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]) / w[1]).collect();
    assert!(inc.windows(2).all(|w| w[1] < w[0]), "{inc:?}");
    assert!(*inc.last().unwrap() < 1e-2, "{inc:?}");
}

#[test]
fn beta_sweep_at_continuum_critical_coupling_is_finite() {
    // λ* = 1/8 sits below every discrete critical coupling, so each grid is
    // subcritical while the family is critical in the limit.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ini");
    fs::write(
        &path,
        "[scenario]\nname = hardy\ndim = 3\n[run]\noutput = out\ncouplings = 0.125\nsizes = 3, 5, 7, 9\ntasks = green\n[sweep]\nbeta = 0.25, 0.5, 1.0\n",
    )
    .unwrap();
    let out = subcrit(&["sweep", path.to_str().unwrap(), "--axis", "beta"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep_beta.csv")).unwrap();
    let g: Vec<f64> = csv_column(&csv, "green").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(g.len(), 12);
    assert!(g.iter().all(|v| v.is_finite() && *v > 0.0), "{g:?}");
    for v in csv_column(&csv, "verdict") {
        assert_eq!(v, "Subcritical");
    }
}

#[test]
fn sweeps_are_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ini");
    fs::write(
        &path,
        "[scenario]\nname = grid\ndim = 2\n[subordinator]\nname = gamma\na = 1\nc = 1\n[run]\noutput = out\ncouplings = 0.05\nsizes = 5, 7, 9\ntasks = green\nworkers = 4\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(subcrit(&["sweep", p, "--axis", "size"]).status.code(), Some(0));
    let first = fs::read(dir.path().join("out/sweep_size.csv")).unwrap();
    assert_eq!(subcrit(&["sweep", p, "--axis", "size"]).status.code(), Some(0));
    assert_eq!(first, fs::read(dir.path().join("out/sweep_size.csv")).unwrap());
}

#[test]
fn check_verb_passes_and_catalog_lists_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = subcrit(&["check", "--seed", "5", "--scale", "0.1", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed: 5"));
    assert!(dir.path().join("check.csv").exists());
    let cat = subcrit(&["catalog"]);
    assert_eq!(cat.status.code(), Some(0));
    let text = String::from_utf8_lossy(&cat.stdout);
    for name in ["stable", "gamma", "bessel_squared", "log_power", "relativistic"] {
        assert!(text.contains(name), "{text}");
    }
}
