use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_depletion"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).arg("--quiet").output().expect("binary runs")
}

fn summary_value(path: &Path, key: &str) -> f64 {
    let table: toml::Table = fs::read_to_string(path).unwrap().parse().unwrap();
    table[key].as_float().unwrap()
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = scenario("default.toml");
    for out in [&a, &b] {
        let o = run(&["simulate-classical", "--config", cfg.to_str().unwrap()], out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let first = fs::read(a.join("classical.csv")).unwrap();
    assert!(first.starts_with(b"t_s,"));
    assert_eq!(first, fs::read(b.join("classical.csv")).unwrap());
}

#[test]
fn designed_pulse_round_trips_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("default.toml");
    let o = run(&["match-pulse", "--config", cfg.to_str().unwrap()], &dir.path().join("m"));
    assert!(o.status.success());
    let designed = dir.path().join("m/designed.toml");

    let o = run(&["simulate-classical", "--config", designed.to_str().unwrap()], &dir.path().join("d"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(summary_value(&dir.path().join("d/classical_summary.toml"), "depletion_residual") < 1e-5);

    run(&["simulate-classical", "--config", cfg.to_str().unwrap()], &dir.path().join("s"));
    assert_eq!(
        fs::read(dir.path().join("s/classical.csv")).unwrap(),
        fs::read(dir.path().join("d/classical.csv")).unwrap()
    );
}

#[test]
fn every_subcommand_writes_a_manifest() {
    for sub in ["simulate-classical", "match-pulse", "eigenmodes", "quantum", "photon-number"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(&[sub], dir.path());
        assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        let manifest: toml::Table = fs::read_to_string(dir.path().join("manifest.toml")).unwrap().parse().unwrap();
        assert!(manifest.contains_key("config"), "{sub}");
    }
}

#[test]
fn unknown_key_is_a_config_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[resonator]\nomega_r_hz = 1e10\n").unwrap();
    let o = run(&["simulate-classical", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("omega_r_hz"));
}

#[test]
fn invalid_value_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[grid]\ndt_s = 1e-11\n").unwrap();
    let o = run(&["simulate-classical", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.dt_s"));
}

#[test]
fn low_q_resonator_is_rejected_as_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lossy.toml");
    fs::write(&cfg, "[resonator]\nomega_r_rad_s = 1e10\nkappa_rad_s = 5e8\n").unwrap();
    let o = run(&["simulate-classical", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["eigenmodes", "--config", "/nonexistent/scenario.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = run(&["eigenmodes"], &blocker.join("out"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eigenmodes_honours_mode_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["eigenmodes", "--modes", "8"], dir.path());
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
}

#[test]
fn verify_exits_three_when_an_invariant_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("slow.toml");
    fs::write(&cfg, "[pulse]\nwidth_s = 1e-6\n").unwrap();
    let o = bin().args(["verify", "--config", cfg.to_str().unwrap(), "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let report = String::from_utf8_lossy(&o.stdout);
    assert!(report.lines().any(|l| l.starts_with("FAIL speedup_over_passive_reset")), "{report}");
}
