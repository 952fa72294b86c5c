use std::path::Path;
use std::process::{Command, Output};

fn crosstalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crosstalk"))
        .arg("--quiet")
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("dataset written")
}

#[test]
fn embedded_config_reproduces_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let out = crosstalk(&[
        "crosstalk",
        "--dimension", "2",
        "--coupling", "0.1875",
        "--omega", "1.3",
        "--window", "3",
        "--quadrant",
        "--resolution", "256",
        "-o", first.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = crosstalk(&["crosstalk", "--config", first.to_str().unwrap(), "-o", second.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&first), read(&second));
    assert_eq!(data_rows(&read(&first)).len(), 16);
}

#[test]
fn zero_separation_is_fully_correlated() {
    let out = crosstalk(&["crosstalk", "--count", "0", "--omega", "1.5"]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    let normalized: f64 = rows[0][8].parse().unwrap();
    assert!((normalized - 1.0).abs() < 1e-12);
}

#[test]
fn band_range_of_the_chain() {
    let out = crosstalk(&["dispersion", "--n-per-axis", "16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let range = &data_rows(&text)[0];
    let v: Vec<f64> = range.iter().map(|s| s.parse().unwrap()).collect();
    assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
    assert!(v[2] >= v[0] && v[3] <= v[1]);
}

#[test]
fn secondary_datasets_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("corr.csv");
    let out = crosstalk(&["correlation", "--count", "3", "--sidecar", "-o", base.to_str().unwrap()]);
    assert!(out.status.success());
    for name in ["corr.csv", "corr.json", "corr_length.csv", "corr_length.json"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let meta: serde_json::Value = serde_json::from_str(&read(&dir.path().join("corr_length.json"))).unwrap();
    assert_eq!(meta["dataset"], "length");
    assert_eq!(meta["config"]["task"]["command"], "correlation");
}

#[test]
fn exit_codes() {
    assert_eq!(crosstalk(&["crosstalk", "--omega", "5"]).status.code(), Some(2));
    assert_eq!(crosstalk(&["correlation", "--n-per-axis", "4", "--count", "1"]).status.code(), Some(3));
    assert_eq!(crosstalk(&["dynamics", "--config", "/nonexistent.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"lattice":{"dimension":1,"symmetry":"cubic","omega0":1.0,"coupling":0.75},"task":{"command":"dispersion","n_per_axis":8,"omegas":[],"resolution":16,"extra":1}}"#).unwrap();
    assert_eq!(crosstalk(&["dispersion", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_for_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("d.csv");
    assert!(crosstalk(&["dispersion", "--n-per-axis", "8", "-o", base.to_str().unwrap()]).status.success());
    let out = crosstalk(&["crosstalk", "--config", base.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dynamics_survival_is_monotone_in_separation() {
    let out = crosstalk(&["dynamics", "--count", "2", "--t-final", "50", "--lambda", "0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    let en: Vec<f64> = rows.iter().map(|r| r[8].parse().unwrap()).collect();
    assert!(en[0] > en[1] && en[1] > en[2], "{en:?}");
}

#[test]
fn presets_expand_to_named_runs() {
    let out = crosstalk(&["preset", "fig2", "--dry-run", "--output-dir", "figs"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2a", "fig2b", "fig2c", "fig2d"] {
        assert!(text.contains(&format!("figs/{name}.csv")), "{name}");
    }
}
