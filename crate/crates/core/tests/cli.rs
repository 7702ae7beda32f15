use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paretoscope"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn list_problems_text_and_json() {
    let o = run(&["list-problems"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 6);

    let o = run(&["list-problems", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
    assert_eq!(v[0]["name"], "nonconvex_quartic");
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(code(&run(&["list-problems", "--bogus"])), 2);
    assert_eq!(code(&run(&["analyze", "--problem", "missing.json"])), 2);
    assert_eq!(code(&run(&["analyze", "--builtin", "no_such_problem"])), 2);
    assert_eq!(code(&run(&["analyze", "--builtin", "nonconvex_quartic", "--resolution", "1"])), 2);
    assert_eq!(code(&run(&["oracle-check"])), 2);
}

#[test]
fn bad_thread_count_is_bad_input() {
    let o = bin()
        .env("PARETOSCOPE_THREADS", "many")
        .args(["list-problems"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = bin()
        .env("PARETOSCOPE_THREADS", "2")
        .args(["list-problems"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn analyze_writes_report_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("nested/out.json");
    let svg = dir.path().join("nested/out.svg");
    let o = run(&[
        "analyze",
        "--builtin",
        "rectangle_identity",
        "--scalarization",
        "max",
        "--resolution",
        "16",
        "--json",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&json).unwrap();
    let report = paretoscope::diagnose::AnalysisReport::from_json(&text).unwrap();
    let cover = report
        .all_checks()
        .find(|c| c.theorem_id == paretoscope::diagnose::TheoremId::Theta2CoversSolw)
        .unwrap();
    assert!(cover.finding("strict_image_exceeds_solw").unwrap().holds);
    assert!(cover.finding("strict_solw_exceeds_interior_image").unwrap().holds);
    let figure = std::fs::read_to_string(&svg).unwrap();
    assert!(figure.contains(r#"version="1.1""#));
    assert!(!figure.contains("href"), "figure must be self-contained");
}

#[test]
fn report_to_stdout_without_json_flag() {
    let o = run(&["analyze", "--builtin", "convex_quadratic", "--resolution", "6", "--probe-trials", "100"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(paretoscope::diagnose::AnalysisReport::from_json(&text).is_ok());
}

#[test]
fn output_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("out.json");
    let o = run(&[
        "analyze",
        "--builtin",
        "convex_quadratic",
        "--resolution",
        "4",
        "--probe-trials",
        "10",
        "--json",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn replot_is_deterministic_and_checks_schema() {
    let dir = tempfile::tempdir().unwrap();
    let p = |s: &str| dir.path().join(s);
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let o = run(&[
        "analyze",
        "--builtin",
        "monotone_affine",
        "--resolution",
        "8",
        "--json",
        &s(&p("r.json")),
        "--svg",
        &s(&p("a.svg")),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["replot", &s(&p("r.json")), &s(&p("b.svg"))])), 0);
    assert_eq!(std::fs::read(p("a.svg")).unwrap(), std::fs::read(p("b.svg")).unwrap());

    std::fs::write(p("v99.json"), r#"{"schema_version": 99}"#).unwrap();
    assert_eq!(code(&run(&["replot", &s(&p("v99.json")), &s(&p("c.svg"))])), 2);
    let full = std::fs::read_to_string(p("r.json")).unwrap();
    std::fs::write(p("cut.json"), &full[..full.len() / 2]).unwrap();
    assert_eq!(code(&run(&["replot", &s(&p("cut.json")), &s(&p("c.svg"))])), 2);
    assert_eq!(code(&run(&["replot", &s(&p("absent.json")), &s(&p("c.svg"))])), 2);
}

#[test]
fn oracle_check_passes_on_agreeing_builtins() {
    for name in ["nonconvex_quartic", "rectangle_identity"] {
        let o = run(&["oracle-check", name, "--resolution", "16"]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stdout));
        assert!(String::from_utf8_lossy(&o.stdout).contains("max hausdorff"));
    }
}

#[test]
fn oracle_check_flags_a_wrong_map() {
    // the attached map misplaces the minimizer of a simple bowl
    let problem = r#"{
      "name": "bowl",
      "n": 1,
      "m": 2,
      "objectives": ["(x1 - 1)^2", "(x1 + 1)^2"],
      "feasible": { "variant": "whole_space" },
      "oracle": {
        "kind": "weighted_sum",
        "pieces": [ { "region": "all", "value": { "set": "points", "points": [["3"]] } } ],
        "image_components_expected": 1,
        "dom_closed_expected": true,
        "components_unbounded_expected": false
      }
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bowl.json");
    std::fs::write(&path, problem).unwrap();
    let o = run(&["oracle-check", "--problem", path.to_str().unwrap(), "--resolution", "4"]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("worst weight"));
}
