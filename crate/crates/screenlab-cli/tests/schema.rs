//! Validates real command output against the published JSON schemas in
//! `schemas/`. The checker below covers exactly the keyword subset those
//! schemas use: type, properties, required, additionalProperties, items,
//! enum, minimum, maximum, minItems, and maxItems.

use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn type_matches(name: &str, instance: &Value) -> bool {
    match name {
        "object" => instance.is_object(),
        "array" => instance.is_array(),
        "string" => instance.is_string(),
        "boolean" => instance.is_boolean(),
        "null" => instance.is_null(),
        "number" => instance.is_number(),
        "integer" => {
            instance.is_i64()
                || instance.is_u64()
                || instance
                    .as_f64()
                    .is_some_and(|x| x.is_finite() && x.fract() == 0.0)
        }
        other => panic!("unsupported type name '{other}' in schema"),
    }
}

fn check(schema: &Value, instance: &Value, at: &str, errors: &mut Vec<String>) {
    if let Some(ty) = schema.get("type") {
        let names: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().map(|v| v.as_str().unwrap()).collect(),
            _ => panic!("malformed type keyword at {at}"),
        };
        if !names.iter().any(|n| type_matches(n, instance)) {
            errors.push(format!("{at}: expected type {names:?}, got {instance}"));
            return;
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(instance) {
            errors.push(format!("{at}: {instance} is not one of {allowed:?}"));
        }
    }
    if let Some(x) = instance.as_f64() {
        if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
            if x < min {
                errors.push(format!("{at}: {x} is below the minimum {min}"));
            }
        }
        if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
            if x > max {
                errors.push(format!("{at}: {x} is above the maximum {max}"));
            }
        }
    }
    if let Some(map) = instance.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().unwrap();
                if !map.contains_key(key) {
                    errors.push(format!("{at}: missing required property '{key}'"));
                }
            }
        }
        let empty = serde_json::Map::new();
        let props = schema
            .get("properties")
            .and_then(Value::as_object)
            .unwrap_or(&empty);
        let sealed = schema.get("additionalProperties") == Some(&Value::Bool(false));
        for (key, value) in map {
            match props.get(key) {
                Some(sub) => check(sub, value, &format!("{at}.{key}"), errors),
                None if sealed => {
                    errors.push(format!("{at}: unexpected property '{key}'"));
                }
                None => {}
            }
        }
    }
    if let Some(list) = instance.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (list.len() as u64) < min {
                errors.push(format!("{at}: {} items, need at least {min}", list.len()));
            }
        }
        if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
            if (list.len() as u64) > max {
                errors.push(format!("{at}: {} items, allowed at most {max}", list.len()));
            }
        }
        if let Some(items) = schema.get("items") {
            for (i, element) in list.iter().enumerate() {
                check(items, element, &format!("{at}[{i}]"), errors);
            }
        }
    }
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load_schema(name: &str) -> Value {
    let path = schema_dir().join(name);
    serde_json::from_slice(&fs::read(&path).unwrap_or_else(|e| {
        panic!("cannot read {}: {e}", path.display());
    }))
    .unwrap_or_else(|e| panic!("{name} is not valid JSON: {e}"))
}

fn assert_valid(schema_name: &str, instance: &Value) {
    let schema = load_schema(schema_name);
    let mut errors = Vec::new();
    check(&schema, instance, "$", &mut errors);
    assert!(
        errors.is_empty(),
        "{schema_name} violations:\n  {}\ndocument:\n{}",
        errors.join("\n  "),
        serde_json::to_string_pretty(instance).unwrap()
    );
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_screenlab"));
    cmd.env_remove("SCREENLAB_SEED");
    cmd
}

fn run_json(args: &[&str]) -> Value {
    let out: Output = bin().args(args).output().expect("spawn screenlab");
    assert!(
        out.status.success(),
        "screenlab {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn every_published_schema_parses() {
    let mut names = Vec::new();
    for entry in fs::read_dir(schema_dir()).expect("schemas directory") {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let doc = load_schema(path.file_name().unwrap().to_str().unwrap());
            assert_eq!(doc["type"], "object", "{}", path.display());
            assert!(doc["required"].is_array(), "{}", path.display());
            names.push(path.file_name().unwrap().to_str().unwrap().to_string());
        }
    }
    names.sort();
    assert_eq!(
        names,
        [
            "bla_report.schema.json",
            "coverage_report.schema.json",
            "discrepancy_report.schema.json",
            "screen_report.schema.json",
            "sobol_report.schema.json"
        ]
    );
}

#[test]
fn the_checker_itself_catches_violations() {
    let schema = load_schema("discrepancy_report.schema.json");
    let cases = [
        (serde_json::json!({"points": 4, "dim": 1}), "missing"),
        (
            serde_json::json!({"points": 4, "dim": 1, "star_discrepancy": "x"}),
            "expected type",
        ),
        (
            serde_json::json!({"points": 4, "dim": 9, "star_discrepancy": 0.5}),
            "maximum",
        ),
        (
            serde_json::json!({"points": 4, "dim": 1, "star_discrepancy": 0.5, "extra": 0}),
            "unexpected property",
        ),
    ];
    for (doc, needle) in cases {
        let mut errors = Vec::new();
        check(&schema, &doc, "$", &mut errors);
        assert!(
            errors.iter().any(|e| e.contains(needle)),
            "expected an error containing '{needle}', got {errors:?}"
        );
    }
}

#[test]
fn screen_reports_validate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let out = bin()
        .args([
            "generate", "--function", "borehole", "--p0", "2", "--p", "20", "--n", "40",
            "--seed", "5", "--out",
        ])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let single = run_json(&[
        "screen",
        path_str(&data),
        "--method",
        "foss",
        "--m",
        "6",
        "--seed",
        "5",
    ]);
    assert_valid("screen_report.schema.json", &single);

    let all = run_json(&[
        "screen",
        path_str(&data),
        "--method",
        "all",
        "--m",
        "6",
        "--folds",
        "5",
        "--seed",
        "5",
    ]);
    assert_valid("screen_report.schema.json", &all);
    assert_eq!(all["results"].as_array().unwrap().len(), 5);

    let auto = run_json(&[
        "screen",
        path_str(&data),
        "--method",
        "lasso",
        "--m",
        "auto",
        "--seed",
        "5",
    ]);
    assert_valid("screen_report.schema.json", &auto);
    assert!(auto.get("selected_m").is_some());

    let two_stage = run_json(&[
        "screen",
        path_str(&data),
        "--method",
        "lasso",
        "--basis",
        "two-stage",
        "--m",
        "6",
        "--folds",
        "5",
        "--seed",
        "5",
    ]);
    assert_valid("screen_report.schema.json", &two_stage);
    assert!(two_stage.get("two_stage").is_some());
}

#[test]
fn coverage_report_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mini.toml");
    fs::write(
        &cfg,
        "function = \"sphere\"\np0 = 2\np = 12\nn = 24\nm = 4\nmethods = [\"sis\", \"lasso\"]\nfolds = 5\nreps = 3\nmaster_seed = 3\n",
    )
    .unwrap();
    let out = bin()
        .args(["bench", path_str(&cfg), "--out", path_str(dir.path())])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value =
        serde_json::from_slice(&fs::read(dir.path().join("mini.json")).unwrap()).unwrap();
    assert_valid("coverage_report.schema.json", &report);

    let auto_cfg = dir.path().join("auto.toml");
    fs::write(
        &auto_cfg,
        "function = \"sphere\"\np0 = 2\np = 10\nn = 30\nm = \"auto\"\nmethods = [\"lasso\"]\nfolds = 5\nreps = 2\nmaster_seed = 5\n",
    )
    .unwrap();
    let out = bin()
        .args(["bench", path_str(&auto_cfg), "--out", path_str(dir.path())])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value =
        serde_json::from_slice(&fs::read(dir.path().join("auto.json")).unwrap()).unwrap();
    assert_valid("coverage_report.schema.json", &report);
    assert_eq!(report["config"]["size"], "auto");
}

#[test]
fn diagnostic_reports_validate() {
    let bla = run_json(&["bla", "--function", "sphere", "--p0", "2", "--p", "2"]);
    assert_valid("bla_report.schema.json", &bla);

    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    fs::write(&pts, "u,v\n0.1,0.7\n0.4,0.2\n0.8,0.9\n").unwrap();
    let discrepancy = run_json(&["discrepancy", path_str(&pts)]);
    assert_valid("discrepancy_report.schema.json", &discrepancy);

    let sobol = run_json(&[
        "sobol",
        "--function",
        "yang",
        "--p0",
        "2",
        "--p",
        "3",
        "--samples",
        "2048",
        "--seed",
        "2",
    ]);
    assert_valid("sobol_report.schema.json", &sobol);
}
