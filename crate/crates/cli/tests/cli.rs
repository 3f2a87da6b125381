use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn reciprocity(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reciprocity"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn list_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let out = reciprocity(&["list-strategies"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    for needle in ["ADCO:K=3,t=2", "WSLS", "CURE", "coop-rates", "mem1-grid-vs-adco"] {
        assert!(stdout.contains(needle), "missing {needle}");
    }
}

#[test]
fn run_writes_the_requested_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("rates.json"),
        r#"{"experiment": "coop-rates", "sweep": {"K": {"from": 1, "to": 10}, "N": [2, 5]}}"#,
    )
    .unwrap();
    let out = reciprocity(&["run", "rates.json", "--output", "out/rates.csv", "--json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/rates.csv")).unwrap();
    assert!(csv.starts_with("# experiment: coop-rates\n"));
    assert!(csv.contains("epsilon,N,t,K,aon_coop_rate,adco_coop_rate\n"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 21);
    assert!(dir.path().join("out/rates.json").exists());
}

#[test]
fn run_defaults_to_the_preset_name() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"experiment": "fixed-points", "sweep": {"K": [2]}}"#).unwrap();
    let out = reciprocity(&["run", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(dir.path().join("fixed-points.csv").exists());
}

#[test]
fn seed_flag_enables_monte_carlo_runs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.json"),
        r#"{"experiment": "pairwise-replicator", "strategies": ["HardMajority"],
            "mc": {"rounds": 100000, "burn_in": 1000, "batches": 20}}"#,
    )
    .unwrap();
    let missing = reciprocity(&["run", "c.json"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    assert!(text(&missing.stderr).contains("--seed"));
    let ok = reciprocity(&["run", "c.json", "--seed", "7", "--output", "r.csv"], dir.path());
    assert_eq!(ok.status.code(), Some(0), "{}", text(&ok.stderr));
    assert!(dir.path().join("r.trajectories.csv").exists());
}

#[test]
fn bad_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"experiment": "coop-rates", "sweeps": {}}"#).unwrap();
    let out = reciprocity(&["run", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("sweeps"));
    let out = reciprocity(&["run", "absent.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_resource_code() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"experiment": "coop-rates"}"#).unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    let out = reciprocity(&["run", "c.json", "--output", "blocker/out.csv"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_reports_each_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = reciprocity(&["validate", "--seed", "1", "--output", "v.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
    let stdout = text(&out.stdout);
    let checks: Vec<&str> = stdout.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(checks.len(), 10);
    assert!(checks.iter().all(|l| l.starts_with("PASS")));
    assert!(dir.path().join("v.csv").exists());
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = reciprocity::experiment::ExperimentConfig::from_file(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.check().unwrap();
        seen += 1;
    }
    assert_eq!(seen, 7);
}
