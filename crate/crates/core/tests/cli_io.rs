mod common;

use common::{params, random_state};
use mmp_core::io::run::{csv_header, DIAGNOSTICS_FILE, FINAL_SNAPSHOT, LAST_GOOD_SNAPSHOT, MANIFEST_FILE};
use mmp_core::io::snapshot::read_header;
use mmp_core::io::{
    load_snapshot, parse_config, parse_config_str, run_in, save_snapshot, RunConfig, RunStatus, Suite,
};
use mmp_core::lp::DyadicProfile;
use mmp_core::monitors::DiagnosticsConfig;
use mmp_core::spectral::Grid;
use mmp_core::Error;
use std::path::Path;
use std::process::Command;

fn config(body: &str) -> RunConfig {
    parse_config_str(body).unwrap()
}

const TG: &str = r#"
[grid]
n = 8

[params]
mu = 0.05
chi = 0.01
kappa = 0.01
gamma = 0.05
nu = 0.05

[initial]
preset = "taylor_green"
amplitude = 1.0
omega_amplitude = 0.3
b_amplitude = 0.3

[solver]
kind = "imex"
t_end = 0.05
dt = 0.01

[monitors]
cadence = 1
epsilons = [0.02, 0.05]
grad_lp = [2.0]
"#;

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].clone()).collect()
}

#[test]
fn config_errors_carry_line_and_key() {
    let text = "[grid]\nn = 8\nsize = 3\n";
    match parse_config_str(text) {
        Err(Error::Parse { line, key, .. }) => {
            assert_eq!(line, 3);
            assert_eq!(key.as_deref(), Some("size"));
        }
        other => panic!("{other:?}"),
    }
    let bad_mu = TG.replace("mu = 0.05", "mu = 0.0");
    let err = parse_config_str(&bad_mu).unwrap_err();
    assert!(err.to_string().contains("mu must be positive"), "{err}");
    let both = TG.replace("dt = 0.01", "dt = 0.01\nsteps = 5");
    assert!(matches!(parse_config_str(&both), Err(Error::Validation(_))));
    let uneven = TG.replace("t_end = 0.05", "t_end = 0.055");
    assert!(matches!(parse_config_str(&uneven), Err(Error::Validation(_))));
}

#[test]
fn config_round_trips_through_toml() {
    let c = config(TG);
    assert_eq!(parse_config_str(&c.to_toml_string()).unwrap(), c);
}

#[test]
fn run_writes_csv_snapshot_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(TG);
    let out = run_in(&c, dir.path()).unwrap();
    assert_eq!(out.status, RunStatus::Completed);
    assert_eq!(out.records, 6);
    assert!((out.final_time - 0.05).abs() < 1e-15);

    let (header, rows) = read_csv(&dir.path().join(DIAGNOSTICS_FILE));
    let g = Grid::periodic(8).unwrap();
    assert_eq!(header, csv_header(&c.diagnostics(), &DyadicProfile::new(&g), &[0.02, 0.05]));
    assert_eq!(rows.len(), 6);
    let deltas = column(&header, &rows, "delta_eps_0.05");
    assert!(deltas[..5].iter().all(String::is_empty));
    assert!(!deltas[5].is_empty());
    let d2 = column(&header, &rows, "delta_eps_0.02");
    assert!(d2[1].is_empty() && !d2[2].is_empty());
    for v in column(&header, &rows, "energy_u") {
        assert!(v.parse::<f64>().unwrap() > 0.0);
    }

    let (state, p) = load_snapshot(&dir.path().join(FINAL_SNAPSHOT)).unwrap();
    assert_eq!(p, c.params());
    assert!((state.time - 0.05).abs() < 1e-15);
    assert_eq!(out.series.records().last().unwrap().l2_energy[0], state.u.l2_norm().powi(2));

    let manifest: toml::Value = toml::from_str(&std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["status"].as_str(), Some("completed"));
    assert_eq!(manifest["records"].as_integer(), Some(6));
    assert_eq!(manifest["grid"]["j_max"].as_integer(), Some(3));
    assert!(manifest.get("config").is_some());
}

#[test]
fn zero_horizon_gives_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(&TG.replace("t_end = 0.05", "t_end = 0.0").replace("epsilons = [0.02, 0.05]", "epsilons = []"));
    let out = run_in(&c, dir.path()).unwrap();
    assert_eq!(out.records, 1);
    assert_eq!(out.final_time, 0.0);
    let (_, rows) = read_csv(&dir.path().join(DIAGNOSTICS_FILE));
    assert_eq!(rows.len(), 1);
}

#[test]
fn micropolar_run_has_zero_magnetic_column() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(&TG.replace("b_amplitude = 0.3", "b_amplitude = 0.0"));
    run_in(&c, dir.path()).unwrap();
    let (header, rows) = read_csv(&dir.path().join(DIAGNOSTICS_FILE));
    for v in column(&header, &rows, "energy_b") {
        assert_eq!(v.parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let text = TG.replace(
        "preset = \"taylor_green\"",
        "preset = \"random_seeded\"\nseed = 42\nband = 2",
    );
    let c = config(&text);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_in(&c, a.path()).unwrap();
    run_in(&c, b.path()).unwrap();
    for name in [DIAGNOSTICS_FILE, FINAL_SNAPSHOT, MANIFEST_FILE] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    let other = tempfile::tempdir().unwrap();
    run_in(&config(&text.replace("seed = 42", "seed = 43")), other.path()).unwrap();
    assert_ne!(
        std::fs::read(a.path().join(FINAL_SNAPSHOT)).unwrap(),
        std::fs::read(other.path().join(FINAL_SNAPSHOT)).unwrap()
    );
}

#[test]
fn picard_runs_through_the_driver() {
    let dir = tempfile::tempdir().unwrap();
    let text = TG
        .replace("kind = \"imex\"", "kind = \"picard\"")
        .replace("amplitude = 1.0", "amplitude = 0.2");
    let out = run_in(&config(&text), dir.path()).unwrap();
    assert_eq!(out.records, 6);
    let manifest: toml::Value = toml::from_str(&std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["picard"]["converged"].as_bool(), Some(true));
}

#[test]
fn instability_keeps_the_last_good_state() {
    let dir = tempfile::tempdir().unwrap();
    let text = TG
        .replace("amplitude = 1.0", "amplitude = 1e7")
        .replace("t_end = 0.05", "t_end = 1.0")
        .replace("dt = 0.01", "dt = 0.5")
        .replace("epsilons = [0.02, 0.05]", "epsilons = []");
    let out = run_in(&config(&text), dir.path()).unwrap();
    assert!(matches!(out.status, RunStatus::Unstable { .. }));
    assert!(dir.path().join(LAST_GOOD_SNAPSHOT).exists());
    assert!(!dir.path().join(FINAL_SNAPSHOT).exists());
}

#[test]
fn snapshot_preset_restarts_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::periodic(8).unwrap();
    let s = random_state(&g, 3, 0.5);
    let path = dir.path().join("start.mmp");
    save_snapshot(&path, &s, &params()).unwrap();
    let text = format!(
        "[grid]\nn = 8\n[initial]\npreset = \"snapshot\"\npath = \"{}\"\n[solver]\nkind = \"imex\"\nt_end = 0.0\ndt = 0.01\n",
        path.display()
    );
    let out = run_in(&config(&text), &dir.path().join("out")).unwrap();
    assert_eq!(out.series.records()[0].l2_energy[0], s.u.l2_norm().powi(2));
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(read_header(&bytes).unwrap().n, 8);
    assert!(parse_config(&dir.path().join("missing.toml")).is_err());
}

#[test]
fn suite_names_parse() {
    assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
    assert_eq!("picard".parse::<Suite>().unwrap(), Suite::Picard);
    assert!("nope".parse::<Suite>().is_err());
    let minimal = DiagnosticsConfig::minimal();
    assert!(minimal.hs_orders.is_empty() && !minimal.block_sups);
}

fn mmp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmp"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, TG).unwrap();
    let out_dir = dir.path().join("out");
    let ok = mmp().arg("run").arg(&cfg).env("MMP_OUTPUT_DIR", &out_dir).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(out_dir.join(DIAGNOSTICS_FILE).exists());

    let inspect = mmp().arg("inspect").arg(out_dir.join(FINAL_SNAPSHOT)).output().unwrap();
    assert_eq!(inspect.status.code(), Some(0));
    let text = String::from_utf8_lossy(&inspect.stdout);
    assert!(text.contains("grid n = 8") && text.contains("omega"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, TG.replace("mu = 0.05", "mu = -1.0")).unwrap();
    let code = mmp().arg("run").arg(&bad).env("MMP_OUTPUT_DIR", &out_dir).output().unwrap();
    assert_eq!(code.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&code.stderr).contains("mu must be positive"));

    let unstable = dir.path().join("unstable.toml");
    let text = TG
        .replace("amplitude = 1.0", "amplitude = 1e7")
        .replace("t_end = 0.05", "t_end = 1.0")
        .replace("dt = 0.01", "dt = 0.5")
        .replace("epsilons = [0.02, 0.05]", "epsilons = []");
    std::fs::write(&unstable, text).unwrap();
    let code = mmp().arg("run").arg(&unstable).env("MMP_OUTPUT_DIR", dir.path().join("u")).output().unwrap();
    assert_eq!(code.status.code(), Some(2));

    assert_eq!(mmp().arg("frobnicate").output().unwrap().status.code(), Some(1));
    assert_eq!(mmp().args(["verify", "nope"]).output().unwrap().status.code(), Some(1));
    assert_eq!(mmp().arg("--help").output().unwrap().status.code(), Some(0));

    let verify = mmp().args(["verify", "monitors"]).output().unwrap();
    assert_eq!(verify.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&verify.stdout).contains("[PASS]"));
}
