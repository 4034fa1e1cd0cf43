use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwsa-eval"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwsa-eval"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", stderr(out));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn perfect_synth_then_evaluate_saturates() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth", "--kind", "perfect", "--n", "10", "--seed", "7", "--output", "p.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&run_in(
        dir.path(),
        &["evaluate", "--input", "p.csv", "--tau", "0.9"],
    ));
    assert_eq!(report["kind"], "point");
    assert_eq!(report["cwsa"], 1.0);
    assert_eq!(report["cwsa_plus"], 1.0);
    assert_eq!(report["coverage"], 1.0);
    assert_eq!(report["records"], 10);
    assert_eq!(report["source_id"], "p");
}

#[test]
fn empty_retention_reports_null_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty-above-threshold.csv");
    std::fs::write(
        &path,
        "y_true,y_pred,confidence\n0,0,0.5\n1,0,0.9\n2,2,0.98\n",
    )
    .unwrap();
    let report = json(&run(&[
        "evaluate",
        "--input",
        path.to_str().unwrap(),
        "--tau",
        "0.99",
    ]));
    assert_eq!(report["cwsa"], 0.0);
    assert_eq!(report["cwsa_plus"], 0.0);
    assert!(report["selective_accuracy"].is_null());
    assert_eq!(report["retained_count"], 0);
}

#[test]
fn expect_prints_the_random_oracle() {
    let out = run(&["expect", "--kind", "random", "--tau", "0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(key).filter(|r| r.starts_with(' ')))
            .unwrap_or_else(|| panic!("no {key} in {text}"))
            .trim()
            .parse()
            .unwrap()
    };
    assert!((value("coverage") - 5.0 / 7.0).abs() < 1e-12);
    assert!((value("cwsa") + 1.0 / 6.0).abs() < 1e-12);
    assert!((value("cwsa_plus") - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn sweep_report_has_aligned_curves_and_scalars() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run_in(
        d,
        &[
            "synth",
            "--kind",
            "calibrated",
            "--seed",
            "1",
            "--output",
            "c.csv"
        ]
    )
    .status
    .success());
    let report = json(&run_in(d, &["evaluate", "--input", "c.csv"]));
    assert_eq!(report["kind"], "sweep");
    assert_eq!(report["grid"]["thresholds"], 50);
    let curves = report["curves"].as_object().unwrap();
    assert_eq!(curves.len(), 3);
    let taus = &curves["cwsa"]["tau"];
    for (_, c) in curves {
        assert_eq!(&c["tau"], taus);
        assert_eq!(c["coverage"].as_array().unwrap().len(), 50);
        assert_eq!(c["value"].as_array().unwrap().len(), 50);
    }
    for key in ["ece", "mce", "brier", "aurc", "eaurc"] {
        assert!(report["scalars"][key].is_number(), "{key}");
    }
    for metric in ["cwsa", "cwsa_plus", "selective_accuracy"] {
        assert!(report["scalars"]["auc_mcc"][metric].is_number(), "{metric}");
    }
}

#[test]
fn curves_emit_csv_and_svg_per_metric() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run_in(
        d,
        &["synth", "--kind", "underconfident", "--output", "u.csv"]
    )
    .status
    .success());
    assert!(
        run_in(d, &["evaluate", "--input", "u.csv", "--output", "u.json"])
            .status
            .success()
    );
    let out = run_in(d, &["curves", "--report", "u.json", "--output", "plots"]);
    assert!(out.status.success(), "{}", stderr(&out));
    for metric in ["cwsa", "cwsa_plus", "selective_accuracy"] {
        let csv = std::fs::read_to_string(d.join(format!("plots/{metric}.csv"))).unwrap();
        assert!(csv.starts_with("tau,coverage,value\n"));
        assert_eq!(csv.lines().count(), 51);
        let svg = std::fs::read_to_string(d.join(format!("plots/{metric}.svg"))).unwrap();
        assert!(svg.contains("<svg") && svg.contains("version=\"1.1\""));
    }
    // underconfident confidences never reach 0.6, so the tail is undefined
    let acc = std::fs::read_to_string(d.join("plots/selective_accuracy.csv")).unwrap();
    assert!(acc.lines().last().unwrap().ends_with(','));

    assert!(run_in(
        d,
        &["evaluate", "--input", "u.csv", "--tau", "0.5", "--output", "pt.json"]
    )
    .status
    .success());
    let out = run_in(d, &["curves", "--report", "pt.json", "--output", "plots2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("pt.json"));
}

#[test]
fn compare_ranks_and_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for kind in ["perfect", "calibrated", "random"] {
        let file = format!("{kind}.csv");
        assert!(run_in(
            d,
            &["synth", "--kind", kind, "--seed", "2", "--output", &file]
        )
        .status
        .success());
    }
    let out = run_in(
        d,
        &[
            "compare",
            "--inputs",
            "random.csv,calibrated.csv,perfect.csv",
            "--by",
            "cwsa",
            "--output",
            "rank.json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let table = stdout(&out);
    let order: Vec<&str> = table
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(order, ["perfect", "calibrated", "random"]);
    let ranking: Value =
        serde_json::from_slice(&std::fs::read(d.join("rank.json")).unwrap()).unwrap();
    assert_eq!(ranking["by"], "cwsa");
    assert_eq!(ranking["ranking"][0]["source_id"], "perfect");
    assert_eq!(ranking["ranking"][0]["score"], 1.0);
    assert_eq!(ranking["ranking"][2]["rank"], 3);
}

#[test]
fn graded_credit_is_reported_when_present() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graded.jsonl");
    std::fs::write(
        &path,
        concat!(
            r#"{"y_true":0,"y_pred":1,"confidence":0.9,"credit":0.5}"#,
            "\n",
            r#"{"y_true":1,"y_pred":1,"confidence":0.7,"credit":1.0}"#,
            "\n"
        ),
    )
    .unwrap();
    let report = json(&run(&[
        "evaluate",
        "--input",
        path.to_str().unwrap(),
        "--tau",
        "0.5",
    ]));
    // weights 0.8 and 0.4; credits 0.5 and 1.0
    let expected = (0.8 * (2.0 * 0.5 - 1.0) + 0.4 * (2.0 * 1.0 - 1.0)) / 2.0;
    let got = report["cwsa_generalized"].as_f64().unwrap();
    assert!((got - expected).abs() < 1e-15, "{got}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["evaluate", "--bogus"],
        vec!["evaluate", "--tau", "0.5"],
        vec![
            "evaluate",
            "--input",
            "x.csv",
            "--tau",
            "0.5",
            "--grid",
            "0.5:0.9:0.1",
        ],
        vec!["synth", "--kind", "bayesian"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty(), "{args:?}");
    }
}

#[test]
fn input_failures_exit_with_one_and_name_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.csv");
    let out = run(&["evaluate", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("absent.csv"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "y_true,y_pred,confidence\n1,1,0.9\n0,1,1.2\n").unwrap();
    let out = run(&["evaluate", "--input", bad.to_str().unwrap(), "--tau", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("bad.csv") && msg.contains("line 3"), "{msg}");

    let out = run(&["evaluate", "--input", bad.to_str().unwrap(), "--tau", "1.0"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["synth", "--kind", "perfect", "--p-correct", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn thread_setting_is_validated_and_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(
        run_in(d, &["synth", "--kind", "random", "--output", "r.csv"])
            .status
            .success()
    );
    let mut outputs = Vec::new();
    for threads in ["1", "3", "8"] {
        let out = Command::new(env!("CARGO_BIN_EXE_cwsa-eval"))
            .current_dir(d)
            .env("CWSA_EVAL_THREADS", threads)
            .args(["evaluate", "--input", "r.csv"])
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(out.stdout);
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let out = Command::new(env!("CARGO_BIN_EXE_cwsa-eval"))
        .env("CWSA_EVAL_THREADS", "0")
        .args(["expect", "--kind", "random", "--tau", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("CWSA_EVAL_THREADS"));
}

#[test]
fn synth_to_stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "synth",
        "--kind",
        "overconfident",
        "--n",
        "50",
        "--seed",
        "4",
    ]);
    assert!(out.status.success());
    assert!(run_in(
        dir.path(),
        &[
            "synth",
            "--kind",
            "overconfident",
            "--n",
            "50",
            "--seed",
            "4",
            "--output",
            "o.csv"
        ]
    )
    .status
    .success());
    assert_eq!(out.stdout, std::fs::read(dir.path().join("o.csv")).unwrap());
    assert_eq!(stdout(&out).lines().count(), 51);
}
