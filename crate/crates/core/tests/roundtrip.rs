use std::io::Write;

use cwsa_core::io::{
    ingest, to_json_bytes, write_predictions_file, Format, IngestOptions, SweepReportFile, ToolInfo,
};
use cwsa_core::{
    generate, sweep, ArchetypeKind, ArchetypeSpec, EvaluationSet, PredictionRecord, ThresholdGrid,
};
use proptest::prelude::*;

fn record() -> impl Strategy<Value = PredictionRecord> {
    (
        0usize..5,
        0usize..5,
        0.0f64..=1.0,
        proptest::option::of(0.0f64..=1.0),
    )
        .prop_map(|(t, p, c, k)| PredictionRecord {
            true_label: t,
            predicted_label: p,
            confidence: c,
            credit: k,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emitted_csv_reingests_bit_for_bit(records in proptest::collection::vec(record(), 1..60)) {
        let set = EvaluationSet::new(records, 5, "emitted").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emitted.csv");
        write_predictions_file(&set, &path).unwrap();
        let back = ingest(&path, &IngestOptions { class_count: Some(5), ..Default::default() }).unwrap();
        prop_assert_eq!(back.records(), set.records());
        prop_assert_eq!(back.source_id(), "emitted");

        let grid = ThresholdGrid::default();
        let file = |s: &EvaluationSet| {
            let tool = ToolInfo { name: "t".into(), version: "0".into() };
            to_json_bytes(&SweepReportFile::new(&sweep(s, grid), s.len(), tool, String::new())).unwrap()
        };
        let (a, b) = (file(&set), file(&back));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn synthetic_sets_survive_the_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ArchetypeKind::ALL {
        let set = generate(&ArchetypeSpec::defaults(kind, 3)).unwrap();
        let path = dir.path().join(format!("{kind}.csv"));
        write_predictions_file(&set, &path).unwrap();
        let back = ingest(
            &path,
            &IngestOptions {
                class_count: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(back.records(), set.records());
    }
}

#[test]
fn csv_and_jsonl_agree() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let jsonl = dir.path().join("m.jsonl");
    std::fs::write(
        &csv,
        "y_true,y_pred,confidence\n0,0,0.9\n1,0,0.6\n2,2,0.75\n",
    )
    .unwrap();
    let mut f = std::fs::File::create(&jsonl).unwrap();
    writeln!(f, r#"{{"y_true":0,"y_pred":0,"confidence":0.9}}"#).unwrap();
    writeln!(f, r#"{{"y_true":1,"probs":[0.6,0.3,0.1]}}"#).unwrap();
    writeln!(f).unwrap();
    writeln!(f, r#"{{"y_true":2,"y_pred":2,"probs":[0.05,0.2,0.75]}}"#).unwrap();
    drop(f);

    let a = ingest(&csv, &IngestOptions::default()).unwrap();
    let b = ingest(&jsonl, &IngestOptions::default()).unwrap();
    assert_eq!(a.records(), b.records());
    assert_eq!(a.class_count(), 3);
    assert_eq!(b.class_count(), 3);

    let forced = ingest(
        &jsonl,
        &IngestOptions {
            format: Some(Format::Jsonl),
            class_count: Some(6),
        },
    )
    .unwrap();
    assert_eq!(forced.class_count(), 6);
}

#[test]
fn errors_name_the_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "y_true,y_pred,confidence\n0,0,0.5\n1,1,1.5\n").unwrap();
    let msg = ingest(&path, &IngestOptions::default())
        .unwrap_err()
        .to_string();
    assert!(msg.contains("bad.csv"), "{msg}");
    assert!(msg.contains('3'), "{msg}");
}
