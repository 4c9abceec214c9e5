use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dataecon::empirics::{generate_panel, Panel};
use dataecon::io::{read_sweep_csv, RunConfig};
use dataecon::sweep::{default_axes, grid_sweep, CellStatus};
use dataecon::ModelParams;
use serde_json::Value;

fn dataecon(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dataecon"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn steady_at_eta_zero_reports_the_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let out = dataecon(dir.path(), &["steady", "--eta", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("steady.json"));
    let ss = &doc["data"]["steady_state"];
    assert!((ss["k_star"].as_f64().unwrap() - 51.199).abs() < 0.01);
    assert!((ss["c_star"].as_f64().unwrap() - 8.706).abs() < 0.01);
    assert_eq!(doc["meta"]["command"], "steady");
    assert_eq!(doc["meta"]["config"]["params"]["eta"], 0.0);
    assert_eq!(doc["meta"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn sweep_csv_has_every_cell_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dataecon(dir.path(), &["sweep", "--format", "csv,json,svg"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 2501);
    assert_eq!(text.lines().filter(|l| l.contains(",singular,")).count(), 200);
    assert!(dir.path().join("sweep.csv.meta.json").exists());
    assert!(dir.path().join("surface_c_star.svg").exists());

    let base = ModelParams::baseline();
    let back = read_sweep_csv(text.as_bytes(), &base).unwrap();
    let (th, et) = default_axes();
    let expected = grid_sweep(&base, &th, &et).unwrap();
    assert_eq!(back, expected);
    assert_eq!(back.count(CellStatus::Singular), 200);
}

#[test]
fn shock_raises_capital() {
    let dir = tempfile::tempdir().unwrap();
    let out = dataecon(
        dir.path(),
        &["shock", "--eta-before", "0.1", "--eta-after", "0.2", "--format", "json,svg"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("shock.json"));
    assert!(doc["data"]["delta_k_star"].as_f64().unwrap() > 0.0);
    let svg = fs::read_to_string(dir.path().join("shock.svg")).unwrap();
    assert!(svg.contains(r#"id="equilibrium-0""#));
    assert!(svg.contains(r#"id="equilibrium-1""#));
    assert!(!dir.path().join("shock_before_nullclines.csv").exists());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"params": {"eta": 0.4, "theta": 0.3}}"#).unwrap();
    let out = dataecon(
        dir.path(),
        &["steady", "--config", cfg.to_str().unwrap(), "--eta", "0.2"],
    );
    assert!(out.status.success());
    let echoed: RunConfig =
        serde_json::from_str(&fs::read_to_string(dir.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(echoed.params.eta, 0.2);
    assert_eq!(echoed.params.theta, 0.3);
}

#[test]
fn invalid_parameter_exits_two_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"params": {"alpha": 1.5}}"#).unwrap();
    let out = dataecon(dir.path(), &["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"params": {"gamma": 0.5}}"#).unwrap();
    let out = dataecon(dir.path(), &["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dataecon(dir.path(), &["bogus"]).status.code(), Some(2));
    assert_eq!(
        dataecon(dir.path(), &["steady", "--format", "png"]).status.code(),
        Some(2)
    );
}

#[test]
fn singular_regime_exits_one_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dataecon(dir.path(), &["steady", "--eta", "0.3333"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular regime"));
}

#[test]
fn phase_above_the_band_has_no_stable_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dataecon(dir.path(), &["phase", "--eta", "0.8", "--format", "json,csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("phase.json"));
    let class = doc["data"]["portrait"]["classification"].as_str().unwrap();
    assert!(class == "source" || class == "spiral-source", "{class}");
    assert_eq!(doc["data"]["portrait"]["stable_paths"].as_array().unwrap().len(), 0);
}

#[test]
fn did_sim_panel_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dataecon(dir.path(), &["did-sim", "--seed", "11", "--format", "csv,json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("panel.csv")).unwrap();
    let panel = Panel::read_csv(text.as_bytes()).unwrap();
    let echoed: RunConfig =
        serde_json::from_str(&fs::read_to_string(dir.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(echoed.did.dgp.seed, 11);
    assert_eq!(panel, generate_panel(&echoed.did.dgp).unwrap());
    let doc = json(&dir.path().join("did.json"));
    let att = doc["data"]["did"]["att"].as_f64().unwrap();
    let se = doc["data"]["did"]["se"].as_f64().unwrap();
    assert!((att - 0.05).abs() < 4.0 * se);
}

#[test]
fn qsteady_matches_household_capital() {
    let dir = tempfile::tempdir().unwrap();
    let out = dataecon(dir.path(), &["qsteady"]);
    assert!(out.status.success());
    let d = &json(&dir.path().join("qsteady.json"))["data"];
    assert_eq!(d["q"], 1.0);
    let (k, kh) = (d["k"].as_f64().unwrap(), d["household_k_star"].as_f64().unwrap());
    assert!((k / kh - 1.0).abs() < 1e-8);
    assert_eq!(d["investment_rate"], 0.08);
}
