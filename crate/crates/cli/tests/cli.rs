//! End-to-end checks of the binary: synth -> mine -> eval round trip, exit
//! codes, reproducibility, and pairwise directory mining.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_motif-rules"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_code(output: &Output, expected: i32) {
    assert_eq!(
        output.status.code(),
        Some(expected),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn synth(dir: &Path, seed: u64) {
    let out = run(&[
        "synth",
        "--length",
        "4000",
        "--instances",
        "8",
        "--gap-lo",
        "5",
        "--gap-hi",
        "40",
        "--noise",
        "0.4",
        "--seed",
        &seed.to_string(),
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
}

fn mine(data: &Path, out: &Path, extra: &[&str]) -> Output {
    let defaults: [(&str, String); 8] = [
        ("--series-a", data.join("T_A.csv").to_str().unwrap().into()),
        ("--series-b", data.join("T_B.csv").to_str().unwrap().into()),
        ("--column", "value".into()),
        ("--timestamp-column", "time".into()),
        ("--motif-lengths", "30".into()),
        ("--k-rules", "3".into()),
        ("--tau", "50".into()),
        ("--theta", "8".into()),
    ];
    let mut args: Vec<String> = vec!["mine".into(), "--k-motifs".into(), "2".into()];
    for (flag, value) in defaults {
        if !extra.contains(&flag) {
            args.push(flag.into());
            args.push(value);
        }
    }
    args.push("--out".into());
    args.push(out.to_str().unwrap().into());
    args.extend(extra.iter().map(|s| s.to_string()));
    bin().args(&args).output().expect("binary runs")
}

#[test]
fn synth_mine_eval_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let test = tmp.path().join("test");
    synth(&data, 21);
    synth(&test, 22);

    let mined = tmp.path().join("mined");
    let out = mine(&data, &mined, &[]);
    assert_code(&out, 0);
    let rules: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(mined.join("rules.json")).unwrap()).unwrap();
    assert!(!rules["rules"].as_array().unwrap().is_empty());
    assert_eq!(rules["series_a"], "T_A");
    assert_eq!(rules["series_b"], "T_B");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(mined.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(rules["manifest"], manifest["id"]);
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
    // Rule files are self-contained: shapes carry their values.
    let first = &rules["rules"][0];
    assert!(!first["antecedent"]["values"].as_array().unwrap().is_empty());
    assert!(!first["matched_instances"].as_array().unwrap().is_empty());

    let evald = tmp.path().join("evald");
    let out = run(&[
        "eval",
        "--rules",
        mined.join("rules.json").to_str().unwrap(),
        "--test-a",
        test.join("T_A.csv").to_str().unwrap(),
        "--test-b",
        test.join("T_B.csv").to_str().unwrap(),
        "--column",
        "value",
        "--timestamp-column",
        "time",
        "--repetitions",
        "200",
        "--seed",
        "11",
        "--out",
        evald.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(evald.join("report.json")).unwrap()).unwrap();
    // The planted rule predicts nearly perfectly on the held-out realization.
    let q = report["top5_mean_q"].as_f64().unwrap();
    assert!(q < 0.5, "top-5 mean Q = {q}");
    assert_eq!(report["rules_manifest"], manifest["id"]);
}

#[test]
fn k_rules_zero_exits_2_with_empty_list() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data, 30);
    let mined = tmp.path().join("mined");
    let out = mine(&data, &mined, &["--k-rules", "0"]);
    assert_code(&out, 2);
    let rules: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(mined.join("rules.json")).unwrap()).unwrap();
    assert_eq!(rules["rules"].as_array().unwrap().len(), 0);
}

#[test]
fn missing_input_exits_1_naming_the_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "mine",
        "--series-a",
        "/nonexistent/nowhere.csv",
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_code(&out, 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--series-a"), "stderr: {stderr}");
}

#[test]
fn bad_flag_value_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data, 31);
    let out = mine(&data, &tmp.path().join("m"), &["--theta", "0"]);
    assert_code(&out, 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("theta"), "stderr: {stderr}");
}

#[test]
fn synth_and_eval_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let one = tmp.path().join("one");
    let two = tmp.path().join("two");
    synth(&one, 77);
    synth(&two, 77);
    assert_eq!(
        fs::read(one.join("T_A.csv")).unwrap(),
        fs::read(two.join("T_A.csv")).unwrap()
    );
    assert_eq!(
        fs::read(one.join("truth.json")).unwrap(),
        fs::read(two.join("truth.json")).unwrap()
    );

    let mined = tmp.path().join("mined");
    assert_code(&mine(&one, &mined, &[]), 0);
    let eval_args = |out: &Path| {
        vec![
            "eval".to_string(),
            "--rules".into(),
            mined.join("rules.json").to_str().unwrap().into(),
            "--test-a".into(),
            two.join("T_A.csv").to_str().unwrap().into(),
            "--test-b".into(),
            two.join("T_B.csv").to_str().unwrap().into(),
            "--column".into(),
            "value".into(),
            "--timestamp-column".into(),
            "time".into(),
            "--repetitions".into(),
            "100".into(),
            "--seed".into(),
            "5".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let e1 = tmp.path().join("e1");
    let e2 = tmp.path().join("e2");
    assert_code(&bin().args(eval_args(&e1)).output().unwrap(), 0);
    assert_code(&bin().args(eval_args(&e2)).output().unwrap(), 0);
    // Byte-identical reports for a fixed seed.
    assert_eq!(
        fs::read(e1.join("report.json")).unwrap(),
        fs::read(e2.join("report.json")).unwrap()
    );
}

#[test]
fn pairs_dir_mines_every_ordered_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data, 40);
    fs::remove_file(data.join("truth.json")).unwrap();
    let mined = tmp.path().join("mined");
    let out = run(&[
        "mine",
        "--pairs-dir",
        data.to_str().unwrap(),
        "--column",
        "value",
        "--timestamp-column",
        "time",
        "--motif-lengths",
        "30",
        "--k-motifs",
        "2",
        "--k-rules",
        "2",
        "--tau",
        "50",
        "--theta",
        "8",
        "--out",
        mined.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert!(mined.join("rules_T_A__T_B.json").exists());
    assert!(mined.join("rules_T_B__T_A.json").exists());
    assert!(mined.join("manifest.json").exists());
}

#[test]
fn eval_requires_test_b_for_two_series_rules() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data, 50);
    let mined = tmp.path().join("mined");
    assert_code(&mine(&data, &mined, &[]), 0);
    let out = run(&[
        "eval",
        "--rules",
        mined.join("rules.json").to_str().unwrap(),
        "--test-a",
        data.join("T_A.csv").to_str().unwrap(),
        "--column",
        "value",
        "--timestamp-column",
        "time",
        "--out",
        tmp.path().join("e").to_str().unwrap(),
    ]);
    assert_code(&out, 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--test-b"), "stderr: {stderr}");
    assert!(stderr.contains("T_B"), "stderr: {stderr}");
}
