use std::path::{Path, PathBuf};

use gonality::banana::build_qb;
use gonality::multigraph::banana;
use gonality::Error;
use gonality_cli::{graph_from_str, parse_graph_file, run_with, ParseErrorKind};
use serde_json::Value;
use tempfile::TempDir;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gonality").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn qb_file(dir: &TempDir, layers: &[usize]) -> String {
    let (g, _) = build_qb(layers).unwrap();
    let name = format!("qb{}.json", layers.iter().map(|q| q.to_string()).collect::<String>());
    write(dir, &name, &serde_json::to_string(&g.to_file()).unwrap()).display().to_string()
}

fn validate(schema: &str, output: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{schema}.schema.json"));
    let schema_value: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema_value).unwrap();
    let instance: Value = serde_json::from_str(output).unwrap_or_else(|e| panic!("{schema}: not JSON ({e}): {output}"));
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{output}");
}

#[test]
fn parses_a_valid_file() {
    let dir = TempDir::new().unwrap();
    let path = qb_file(&dir, &[2]);
    let g = parse_graph_file(&path).unwrap();
    assert_eq!(g.vertex_count(), 3);
    assert_eq!(g.labels(), &["u0_1", "u1_1", "u1_2"]);
}

#[test]
fn loop_edge_is_located() {
    let text = r#"{"vertices": ["a", "b"], "edges": [["a", "b", 1], ["a", "a", 1]]}"#;
    let e = graph_from_str(Path::new("g.json"), text).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Graph(Error::LoopEdge("a".into())));
    assert_eq!(e.location.as_deref(), Some("edges[1]"));
}

#[test]
fn zero_multiplicity_rejected() {
    let text = r#"{"vertices": ["a", "b"], "edges": [["a", "b", 0]]}"#;
    let e = graph_from_str(Path::new("g.json"), text).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Graph(Error::NonPositiveMultiplicity(_, _))));
    assert_eq!(e.location.as_deref(), Some("edges[0]"));
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let text = "{\"vertices\": [\"a\"],\n \"edges\": [[\"a\", \"b\" 1]]}";
    let e = graph_from_str(Path::new("g.json"), text).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    assert!(e.location.as_deref().unwrap().starts_with("2:"), "{e}");
    let unknown = graph_from_str(Path::new("g.json"), r#"{"vertices": ["a"], "edges": [], "extra": 1}"#).unwrap_err();
    assert!(matches!(unknown.kind, ParseErrorKind::Syntax(_)));
}

#[test]
fn json_round_trip_keeps_labels() {
    let dir = TempDir::new().unwrap();
    let g = banana(3);
    let path = write(&dir, "b3.json", &serde_json::to_string(&g.to_file()).unwrap());
    assert!(parse_graph_file(&path).unwrap().same_structure(&g));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let qb12 = qb_file(&dir, &[2]);
    assert_eq!(call(&["qb", "verify", &qb12]).0, 0);
    let b2 = qb_file(&dir, &[1]);
    let (code, out, _) = call(&["rank", &b2, "u0_1=2"]);
    assert_eq!((code, out.trim()), (0, "1"));
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["rank", &b2, "nosuch=1"]).0, 2);
    assert_eq!(call(&["rank", "/nonexistent.json", "a=1"]).0, 2);
    assert_eq!(call(&["--rank-strategy", "nope", "rank", &b2, "u0_1=1"]).0, 2);
    let k4 = write(&dir, "k4.json", &serde_json::to_string(&gonality::multigraph::complete_graph(4).to_file()).unwrap());
    assert_eq!(call(&["qb", "recognize", k4.to_str().unwrap()]).0, 1);
    assert_eq!(call(&["qb", "verify", k4.to_str().unwrap()]).0, 1);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn rank_strategies_agree_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let qb12 = qb_file(&dir, &[2]);
    for d in ["u0_1=4", "u1_1=1,u1_2=1", "u0_1=-1,u1_1=3"] {
        let fast = call(&["rank", &qb12, d]).1;
        let slow = call(&["--rank-strategy", "definitional", "rank", &qb12, d]).1;
        assert_eq!(fast, slow, "{d}");
    }
}

#[test]
fn gonseq_is_stable_across_jobs() {
    let dir = TempDir::new().unwrap();
    let g = qb_file(&dir, &[2, 1]);
    let strip = |s: String| {
        let mut v: Value = serde_json::from_str(&s).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let one = strip(call(&["--json", "--jobs", "1", "gonseq", &g, "--up-to", "4"]).1);
    let three = strip(call(&["--json", "--jobs", "3", "gonseq", &g, "--up-to", "4"]).1);
    assert_eq!(one, three);
    assert_eq!(one["values"], serde_json::json!([4, 5, 8, 9]));
}

#[test]
fn build_writes_a_loadable_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.json");
    assert_eq!(call(&["qb", "build", "4", "2", "3", "--out", out.to_str().unwrap()]).0, 0);
    let g = parse_graph_file(&out).unwrap();
    assert_eq!(g.genus().unwrap(), 45);
    let (code, text, _) = call(&["qb", "recognize", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.contains("[4, 2, 3]"));
}

#[test]
fn dot_export_for_heavy_edges() {
    let dir = TempDir::new().unwrap();
    let g = qb_file(&dir, &[4, 2, 3]);
    let (code, out, _) = call(&["export-dot", &g]);
    assert_eq!(code, 0);
    assert!(out.contains("×8"));
}

#[test]
fn json_outputs_match_schemas() {
    let dir = TempDir::new().unwrap();
    let b2 = qb_file(&dir, &[1]);
    let qb12 = qb_file(&dir, &[2]);
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("info", vec!["info", &qb12]),
        ("reduce", vec!["reduce", &b2, "u0_1=3,u1_1=-1", "--base", "u1_1"]),
        ("rank", vec!["rank", &b2, "u0_1=2"]),
        ("equiv", vec!["equiv", &b2, "u0_1=2", "u1_1=2"]),
        ("winnable", vec!["winnable", &b2, "u0_1=1,u1_1=-1"]),
        ("gonality", vec!["gonality", &qb12, "--r", "2"]),
        ("gonseq", vec!["gonseq", &qb12, "--up-to", "3"]),
        ("graph", vec!["qb", "build", "2", "1"]),
        ("qb-recognize", vec!["qb", "recognize", &qb12]),
        ("qb-verify", vec!["qb", "verify", &qb12]),
        ("qb-attach", vec!["qb", "attach", &b2, "--at", "u1_1", "--n", "2", "--k", "2"]),
        ("cp-witness", vec!["qb", "cp-witness", "--n", "5", "--l", "1", "--divisor", "v1=3"]),
        ("search", vec!["search", "--max-vertices", "3", "--max-mult", "3", "--max-edges", "5"]),
        ("study-subdivision", vec!["study-subdivision", &b2, "--times", "1"]),
        ("export-dot", vec!["export-dot", &b2]),
        ("strategies", vec!["strategies"]),
    ];
    for (schema, args) in cases {
        let mut full = vec!["--json"];
        full.extend(args.iter().copied());
        let (code, out, err) = call(&full);
        assert_eq!(code, 0, "{schema}: {err}");
        validate(schema, &out);
    }
    let k4 = write(&dir, "k4.json", &serde_json::to_string(&gonality::multigraph::complete_graph(4).to_file()).unwrap());
    let (code, out, _) = call(&["--json", "qb", "recognize", k4.to_str().unwrap()]);
    assert_eq!(code, 1);
    validate("qb-recognize", &out);
}

#[test]
fn divisor_files_are_accepted() {
    let dir = TempDir::new().unwrap();
    let b2 = qb_file(&dir, &[1]);
    let d = write(&dir, "d.json", r#"{"u0_1": 2}"#);
    let (code, out, _) = call(&["rank", &b2, d.to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "1"));
    validate("divisor", r#"{"u0_1": 2}"#);
}

#[test]
fn schemas_reject_malformed_reports() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas/equiv.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    assert!(!validator.is_valid(&serde_json::json!({ "equivalent": 1 })));
    assert!(!validator.is_valid(&serde_json::json!({})));
    assert!(validator.is_valid(&serde_json::json!({ "equivalent": false })));
}
