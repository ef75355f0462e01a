use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn recur(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recur"))
        .args(args)
        .current_dir(dir)
        .env_remove("RECUR_LDP_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn model_info_reports_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let o = recur(&["model-info", "--out", "a"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("H = 0.88129 bits"));
    let info: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("a/model_info.json")).unwrap()).unwrap();
    assert!((info["entropy_bits"].as_f64().unwrap() - 0.8812908992306927).abs() < 1e-12);
    assert!(dir.path().join("a/manifest.json").exists());
}

#[test]
fn periodic_chain_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let o = recur(&["model-info", "--preset", "two-cycle"], dir.path());
    assert!(o.status.success());
    assert!(stderr(&o).contains("not aperiodic"));
    assert!(stdout(&o).contains("H = 0.00000 bits"));
}

#[test]
fn bad_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(recur(&["tails", "--side", "sideways"], dir.path()).status.code(), Some(2));
    assert_eq!(recur(&["model-info", "--preset", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(recur(&["tails", "--trials", "ten"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("c.json"), r#"{"command": "tails", "params": {"trails": 10}}"#).unwrap();
    assert_eq!(recur(&["--config", "c.json"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("m.json"), r#"{"kind": "iid", "pmf": [0.5, 0.6]}"#).unwrap();
    assert_eq!(recur(&["model-info", "--model", "m.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn oversized_runs_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = recur(&["tails", "--n", "40", "--eps", "0.9", "--trials", "10"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = recur(&["simulate", "--past", "400000000"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn tails_are_byte_identical_across_runs_threads_and_manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["tails", "--side", "upper,lower", "--n", "8,10", "--eps", "0.25", "--trials", "3000", "--seed", "7"];
    let run = |out: &str, extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend_from_slice(&["--out", out]);
        args.extend_from_slice(extra);
        let o = recur(&args, dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(dir.path().join(out).join("tails.csv")).unwrap()
    };
    let first = run("r1", &["--threads", "1"]);
    assert_eq!(first, run("r2", &["--threads", "1"]));
    assert_eq!(first, run("r3", &["--threads", "4"]));
    let o = recur(&["--config", "r1/manifest.json", "--out", "r4"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(first, fs::read(dir.path().join("r4/tails.csv")).unwrap());
}

#[test]
fn flags_override_config_params() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.json"),
        r#"{"command": "tails", "model": "uniform-binary", "seed": 3, "params": {"n": [6], "trials": 200}}"#,
    )
    .unwrap();
    let o = recur(&["--config", "c.json", "tails", "--trials", "300", "--out", "o"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("o/tails.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("uniform-binary,6,0.25,upper,300,"), "{row}");
    let o = recur(&["--config", "c.json", "aep"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_then_recur_reads_the_realization() {
    let dir = tempfile::tempdir().unwrap();
    assert!(recur(&["simulate", "--past", "500", "--future", "20", "--out", "s"], dir.path()).status.success());
    let o = recur(&["recur", "--input", "s/realization.bin", "--n", "1,2,3", "--m", "8,16", "--out", "s"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("s/recurrence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("model_id,n,r_n,status,seed\n"));
}

#[test]
fn plot_writes_an_svg() {
    let dir = tempfile::tempdir().unwrap();
    assert!(recur(&["tails", "--side", "upper,lower", "--trials", "500", "--out", "p"], dir.path()).status.success());
    let o = recur(
        &["plot", "--input", "p/tails.csv", "--group", "side", "--log-y", "--svg", "tails.svg", "--out", "p"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = fs::read_to_string(dir.path().join("p/tails.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
}
