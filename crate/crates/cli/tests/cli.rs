//! End-to-end tests of the `oir` binary: schemas, determinism, exit
//! codes, config-file merging, and the verify table.

use std::process::{Command, Output};

fn oir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oir"))
        .args(args)
        .env_remove("OIR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn run_csv_row_counts_and_schema() {
    let out = oir(&[
        "run",
        "--learner",
        "ew-net",
        "--adversary",
        "lb-segments",
        "--t",
        "512",
        "--seed",
        "7",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    let comments = lines.iter().filter(|l| l.starts_with('#')).count();
    assert_eq!(comments, 3, "provenance comments");
    assert!(lines[comments].starts_with("record,seed,trial,index,prediction,label,loss"));
    let trials = lines.iter().filter(|l| l.starts_with("trial,")).count();
    let summaries = lines.iter().filter(|l| l.starts_with("summary,")).count();
    assert_eq!(trials, 512);
    assert_eq!(summaries, 1);
    // the version and master seed are embedded
    assert!(text.contains("# oir-version="));
    assert!(text.contains("# master-seed=7") || text.contains("# master-seed=0"));
}

#[test]
fn run_is_byte_deterministic() {
    let args = [
        "run",
        "--learner",
        "eg",
        "--adversary",
        "noisy-iso",
        "--sigma",
        "0.2",
        "--t",
        "64",
        "--seed",
        "1,2",
        "--order",
        "random",
        "--format",
        "json",
    ];
    let a = oir(&args);
    let b = oir(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn run_json_has_stable_shape() {
    let out = oir(&[
        "run",
        "--learner",
        "minimax-any",
        "--adversary",
        "midpoint-splitter",
        "--t",
        "7",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["t"], 7);
    let games = v["games"].as_array().unwrap();
    assert_eq!(games.len(), 1);
    assert_eq!(games[0]["transcript"]["trials"].as_array().unwrap().len(), 7);
    // exact minimax value: 3/4 against the splitter on 7 points
    let regret = games[0]["regret"].as_f64().unwrap();
    assert!((regret - 0.75).abs() < 1e-8);
}

#[test]
fn run_rejects_unknown_names_listing_choices() {
    let out = oir(&["run", "--learner", "nope", "--adversary", "random-iso", "--t", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown learner"));
    assert!(err.contains("ew-net") && err.contains("minimax-iso"));

    let out = oir(&["run", "--learner", "eg", "--adversary", "nope", "--t", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown adversary"));
    assert!(err.contains("lb-segments"));
}

#[test]
fn run_assert_bounds_passes_on_sound_learner() {
    let out = oir(&[
        "run",
        "--learner",
        "minimax-iso",
        "--adversary",
        "greedy-iso",
        "--t",
        "16",
        "--assert-bounds",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let summary = text
        .lines()
        .find(|l| l.starts_with("summary,"))
        .expect("summary row");
    assert!(summary.ends_with(",true"));
}

#[test]
fn run_unwritable_output_exits_one() {
    let out = oir(&[
        "run",
        "--learner",
        "eg",
        "--adversary",
        "random-iso",
        "--t",
        "4",
        "--out",
        "/nonexistent-dir/o.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_dir_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_oir"))
        .args([
            "run",
            "--learner",
            "eg",
            "--adversary",
            "random-iso",
            "--t",
            "8",
            "--out",
            "game.csv",
        ])
        .env("OIR_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("game.csv").exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"learner": "eg", "adversary": "random-iso", "t": 16, "seed": "3"}"#,
    )
    .unwrap();
    let out = oir(&["run", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["t"], 16);
    assert_eq!(v["games"][0]["seed"], 3);

    // explicit flag beats the file
    let out = oir(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--t",
        "8",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["t"], 8);
}

#[test]
fn fixed_adversary_comes_from_config_labels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fixed.json");
    std::fs::write(
        &cfg,
        r#"{"labels": [0.1, 0.5, 0.9], "fixed-order": [3, 1, 2]}"#,
    )
    .unwrap();
    let out = oir(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--learner",
        "eg",
        "--adversary",
        "fixed",
        "--t",
        "3",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let trials = v["games"][0]["transcript"]["trials"].as_array().unwrap();
    assert_eq!(trials[0]["index"], 3);
    assert!((trials[0]["label"].as_f64().unwrap() - 0.9).abs() < 1e-15);
}

#[test]
fn sweep_writes_json_report_and_flat_csv() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("exp");
    let out = oir(&[
        "sweep",
        "--learners",
        "ew-net,eg,ogd",
        "--adversaries",
        "random-iso",
        "--t-grid",
        "16,32",
        "--seed",
        "0..3",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap())
            .unwrap();
    // 3 learners x 1 adversary x 2 horizons x 3 seeds
    assert_eq!(json["cells"].as_array().unwrap().len(), 18);
    assert_eq!(json["fits"].as_array().unwrap().len(), 3);
    for fit in json["fits"].as_array().unwrap() {
        assert!(fit["points"].as_array().unwrap().len() == 2);
    }
    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    let data_rows = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("learner,"))
        .count();
    assert_eq!(data_rows, 18);
    assert!(csv.lines().any(|l| l.starts_with("learner,adversary,horizon,seed,regret,bound")));
}

#[test]
fn sweep_rejects_empty_seed_list() {
    let out = oir(&[
        "sweep",
        "--learners",
        "eg",
        "--adversaries",
        "random-iso",
        "--t-grid",
        "16",
        "--seed",
        ",",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_filter_runs_matching_checks_only() {
    let out = oir(&["verify", "--only", "minimax"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.iter().any(|l| l.contains("anyorder-minimax-value")));
    assert!(lines.iter().any(|l| l.contains("isotonic-minimax-value")));
    assert!(!text.contains("pava-oracle"));
    assert!(text.contains("2/2 checks passed"));
}

#[test]
fn verify_detects_injected_fault_with_exit_two() {
    let out = oir(&[
        "verify",
        "--only",
        "dp-enumeration",
        "--inject-beta-fault",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("FAIL dp-enumeration-equivalence"));
    assert!(text.contains("0/1 checks passed"));
}

#[test]
fn verify_unknown_filter_exits_one() {
    let out = oir(&["verify", "--only", "zzz"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("known checks"));
}

#[test]
fn entropic_learner_requires_entropic_loss() {
    let out = oir(&[
        "run",
        "--learner",
        "ew-entropic",
        "--adversary",
        "random-iso",
        "--t",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("does not play squared"));

    let ok = oir(&[
        "run",
        "--learner",
        "ew-entropic",
        "--adversary",
        "random-iso",
        "--t",
        "8",
        "--loss",
        "entropic",
    ]);
    assert!(ok.status.success());
}
