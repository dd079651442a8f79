use std::path::Path;
use std::process::{Command, Output};

use ifrisk_core::io::{knn_impute, FeatureTable};

fn ifrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifrisk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ifrisk(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

const COMMANDS: &[(&str, &[&str])] = &[
    (
        "rank",
        &[
            "rank",
            "--matrix",
            "fixtures:table12",
            "--weights",
            "fixtures:weights_published",
        ],
    ),
    (
        "rank",
        &[
            "rank",
            "--matrix",
            "fixtures:table12",
            "--variant",
            "distance",
            "--measure",
            "burillo",
        ],
    ),
    (
        "weights",
        &[
            "weights",
            "--matrix",
            "fixtures:table12",
            "--measure",
            "all",
            "--reference",
            "fixtures:weights_published",
        ],
    ),
    (
        "evaluate",
        &[
            "evaluate",
            "--forecasts",
            "fixtures:table4_pred",
            "--actuals",
            "fixtures:table4_actual",
            "--benchmark",
            "fixtures:table5_benchmark",
        ],
    ),
    (
        "evaluate",
        &[
            "evaluate",
            "--samples",
            "fixtures:mc_samples",
            "--actuals",
            "fixtures:table4_actual",
        ],
    ),
    (
        "evaluate",
        &[
            "evaluate",
            "--forecasts",
            "fixtures:table4_pred",
            "--simulate",
            "500",
        ],
    ),
    (
        "sensitivity",
        &["sensitivity", "--model", "fixtures:paper-2024q2"],
    ),
    (
        "sensitivity",
        &[
            "sensitivity",
            "--model",
            "fixtures:paper-2024q2",
            "--summary",
            "--selector",
            "verbatim",
        ],
    ),
    (
        "scenario",
        &["scenario", "--triples", "fixtures:table3_scenarios"],
    ),
    (
        "scenario",
        &["scenario", "--forecasts", "fixtures:table4_pred"],
    ),
    (
        "preprocess",
        &[
            "preprocess",
            "impute",
            "--in",
            "fixtures:panel_masked",
            "--k",
            "5",
        ],
    ),
    (
        "preprocess",
        &["preprocess", "zscore", "--in", "fixtures:panel_masked"],
    ),
    (
        "preprocess",
        &["preprocess", "minmax", "--in", "fixtures:panel_masked"],
    ),
    ("graph", &["graph", "--returns", "fixtures:returns_demo"]),
];

#[test]
fn every_command_is_deterministic_in_every_format() {
    for (_, args) in COMMANDS {
        for format in ["table", "csv", "json"] {
            let mut a = args.to_vec();
            a.extend(["--format", format, "--seed", "9"]);
            assert_eq!(stdout(&a), stdout(&a), "{a:?}");
        }
    }
}

#[test]
fn json_output_matches_shipped_schemas() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas");
    for (name, args) in COMMANDS {
        let schema: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.join(format!("{name}.schema.json"))).unwrap(),
        )
        .unwrap();
        let validator = jsonschema::validator_for(&schema).unwrap();
        let mut a = args.to_vec();
        a.extend(["--format", "json"]);
        let doc: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{a:?}: {errors:?}");
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_json = tmp.path().join("bad.json");
    std::fs::write(&bad_json, "{ not json").unwrap();
    let bad_ifn = tmp.path().join("bad_ifn.json");
    std::fs::write(
        &bad_ifn,
        r#"{"alternatives":["a","b"],"criteria":[{"id":"C1","name":"x","kind":"benefit"}],
           "cells":[[[{"mu":0.9,"nu":0.3}]],[[{"mu":0.5,"nu":0.1}]]]}"#,
    )
    .unwrap();
    let flat = tmp.path().join("flat.json");
    std::fs::write(
        &flat,
        r#"{"alternatives":["a","b"],"criteria":[{"id":"C1","name":"x","kind":"benefit"}],
           "cells":[[[{"mu":0.5,"nu":0.5}]],[[{"mu":0.5,"nu":0.5}]]]}"#,
    )
    .unwrap();
    let other_period = tmp.path().join("actual.csv");
    std::fs::write(
        &other_period,
        "metric,period,unit,value\nnet_profit,2024-Q3,million TRY,1650\n",
    )
    .unwrap();
    let wrong_unit = tmp.path().join("unit.csv");
    std::fs::write(
        &wrong_unit,
        "metric,period,unit,value\ntotal_assets,2024-Q2,TRY,1\nnet_profit,2024-Q2,million TRY,1\nequity,2024-Q2,million TRY,1\n",
    )
    .unwrap();
    let zero_actual = tmp.path().join("zero.csv");
    std::fs::write(
        &zero_actual,
        "metric,period,unit,value\ntotal_assets,2024-Q2,million TRY,0\nnet_profit,2024-Q2,million TRY,1\nequity,2024-Q2,million TRY,1\n",
    )
    .unwrap();
    let disordered = tmp.path().join("triples.json");
    std::fs::write(
        &disordered,
        r#"{"metrics":[{"metric":"m","worst":3,"base":2,"best":1}]}"#,
    )
    .unwrap();
    let p = |x: &Path| x.to_str().unwrap().to_string();

    let cases: Vec<(Vec<String>, i32)> = vec![
        (
            vec!["rank".into(), "--matrix".into(), "fixtures:table12".into()],
            0,
        ),
        (
            vec!["rank".into(), "--matrix".into(), "missing.json".into()],
            2,
        ),
        (
            vec!["rank".into(), "--matrix".into(), "fixtures:nope".into()],
            2,
        ),
        (vec!["rank".into(), "--matrix".into(), p(&bad_json)], 2),
        (vec!["rank".into(), "--matrix".into(), p(&bad_ifn)], 2),
        (vec!["rank".into(), "--matrix".into(), p(&flat)], 1),
        (
            vec![
                "rank".into(),
                "--matrix".into(),
                "fixtures:table12".into(),
                "--variant".into(),
                "bogus".into(),
            ],
            2,
        ),
        (
            vec![
                "weights".into(),
                "--matrix".into(),
                "fixtures:table12".into(),
                "--measure".into(),
                "nope".into(),
            ],
            2,
        ),
        (
            vec![
                "evaluate".into(),
                "--forecasts".into(),
                "fixtures:table4_pred".into(),
                "--actuals".into(),
                p(&other_period),
            ],
            2,
        ),
        (
            vec![
                "evaluate".into(),
                "--forecasts".into(),
                "fixtures:table4_pred".into(),
                "--actuals".into(),
                p(&wrong_unit),
            ],
            2,
        ),
        (
            vec![
                "evaluate".into(),
                "--forecasts".into(),
                "fixtures:table4_pred".into(),
                "--actuals".into(),
                p(&zero_actual),
            ],
            1,
        ),
        (
            vec![
                "--level".into(),
                "1.5".into(),
                "evaluate".into(),
                "--forecasts".into(),
                "fixtures:table4_pred".into(),
            ],
            1,
        ),
        (
            vec![
                "sensitivity".into(),
                "--model".into(),
                "fixtures:paper-2024q2".into(),
                "--driver".into(),
                "gdp".into(),
            ],
            2,
        ),
        (
            vec!["scenario".into(), "--triples".into(), p(&disordered)],
            1,
        ),
        (vec!["scenario".into()], 2),
        (
            vec![
                "preprocess".into(),
                "impute".into(),
                "--in".into(),
                "fixtures:panel_masked".into(),
                "--k".into(),
                "50".into(),
            ],
            1,
        ),
        (
            vec![
                "graph".into(),
                "--returns".into(),
                "fixtures:returns_demo".into(),
                "--window".into(),
                "40".into(),
            ],
            1,
        ),
        (vec!["frobnicate".into()], 2),
    ];
    for (args, code) in cases {
        let out = ifrisk(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(
            out.status.code(),
            Some(code),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        if code != 0 {
            assert!(out.stdout.is_empty(), "{args:?} wrote to stdout");
            assert!(!out.stderr.is_empty(), "{args:?} gave no diagnostic");
        }
    }
    let out = ifrisk(&["rank", "--matrix", "missing.json"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("file not found"));
}

#[test]
fn table4_reproduced() {
    let out = stdout(&[
        "evaluate",
        "--forecasts",
        "fixtures:table4_pred",
        "--actuals",
        "fixtures:table4_actual",
    ]);
    for (row, cells) in [
        (
            "total_assets",
            ["15,150", "15,200", "50", "0.33%", "15,150 ± 150"],
        ),
        (
            "net_profit",
            ["1,600", "1,650", "50", "3.03%", "1,600 ± 100"],
        ),
        ("equity", ["8,100", "8,120", "20", "0.25%", "8,100 ± 80"]),
    ] {
        let line = out.lines().find(|l| l.starts_with(row)).unwrap();
        for c in cells {
            assert!(line.contains(c), "{line} lacks {c}");
        }
    }
}

#[test]
fn table6_reproduced() {
    let out = stdout(&[
        "sensitivity",
        "--model",
        "fixtures:paper-2024q2",
        "--driver",
        "inflation",
        "--format",
        "csv",
    ]);
    let expected = "driver,driver_value,total_assets,net_profit,equity,extrapolated\n\
                    inflation,8,15150,1600,8100,false\n\
                    inflation,10,15200,1630,8120,false\n\
                    inflation,12,15300,1670,8140,false\n\
                    inflation,14,15400,1710,8160,false\n\
                    inflation,16,15500,1750,8180,false\n";
    assert_eq!(out, expected);
}

#[test]
fn table3_block() {
    let out = stdout(&["scenario", "--triples", "fixtures:table3_scenarios"]);
    for line in [
        "Best-case Scenario - net_profit (million TRY)      1,750",
        "Base-case Scenario - total_assets (million TRY)   15,150",
        "Worst-case Scenario - equity (million TRY)         8,000",
    ] {
        assert!(out.contains(line), "missing {line:?} in\n{out}");
    }
}

#[test]
fn impute_writes_the_library_result() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("filled.csv");
    let out = ifrisk(&[
        "preprocess",
        "impute",
        "--in",
        "fixtures:panel_masked",
        "--k",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let expected = knn_impute(&FeatureTable::load("fixtures:panel_masked").unwrap(), 5)
        .unwrap()
        .to_csv()
        .unwrap();
    assert_eq!(written, expected);
    assert!(!written
        .lines()
        .any(|l| l.contains(",,") || l.ends_with(',')));
}

#[test]
fn weights_sum_to_one_and_reference_column() {
    let doc: serde_json::Value = serde_json::from_str(&stdout(&[
        "weights",
        "--matrix",
        "fixtures:table12",
        "--measure",
        "szmidt",
        "--reference",
        "fixtures:weights_published",
        "--format",
        "json",
    ]))
    .unwrap();
    let w: Vec<f64> = doc["measures"][0]["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(w.len(), 9);
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    assert!(doc["measures"][0]["max_abs_deviation"].is_number());
    assert_eq!(doc["reference"][0].as_f64(), Some(0.1209));
}

#[test]
fn seed_changes_simulation_only() {
    let run = |seed: &str| {
        stdout(&[
            "evaluate",
            "--forecasts",
            "fixtures:table4_pred",
            "--simulate",
            "200",
            "--seed",
            seed,
        ])
    };
    assert_ne!(run("1"), run("2"));
    let plain = |seed: &str| stdout(&["rank", "--matrix", "fixtures:table12", "--seed", seed]);
    assert_eq!(plain("1"), plain("2"));
}
