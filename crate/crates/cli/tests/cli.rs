use std::process::{Command, Output};

use pursuit::arena::{Metrics, Transcript};
use pursuit::constructibility::{Certificate, CheckReport, HomReport};
use pursuit::solver::SolutionJson;
use pursuit::FiniteGraph;

fn pursuit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pursuit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_two_k_gives_a_certificate() {
    let o = pursuit(&["check", "--graph", "family:two_k"]);
    assert_eq!(o.status.code(), Some(0));
    let report: CheckReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report.constructible);
    let g = pursuit::families::two_k();
    let cert = Certificate::from_json(&g, report.certificate.as_ref().unwrap()).unwrap();
    assert!(pursuit::constructibility::validate(&g, &cert).is_ok());
}

#[test]
fn check_c4_gives_a_witness() {
    let o = pursuit(&["check", "--graph", "family:cycle?n=4"]);
    assert_eq!(o.status.code(), Some(1));
    let report: CheckReport = serde_json::from_str(&stdout(&o)).unwrap();
    let w = FiniteGraph::from_json(report.witness.unwrap()).unwrap();
    assert_eq!(w.n(), 4);
}

#[test]
fn search_hom_on_two_k_finds_none() {
    let o = pursuit(&["search-hom", "--graph", "family:two_k", "--budget-ms", "60000"]);
    assert_eq!(o.status.code(), Some(1));
    let report: HomReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.result, "none");
    let o = pursuit(&["search-hom", "--graph", "family:path?n=4"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn solve_reports_the_verdict_in_the_exit_code() {
    let o = pursuit(&["solve", "--graph", "family:cycle?n=4"]);
    assert_eq!(o.status.code(), Some(1));
    let sol: SolutionJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!sol.copwin);
    let o = pursuit(&["solve", "--graph", "family:K", "--policies"]);
    assert_eq!(o.status.code(), Some(0));
    let sol: SolutionJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(sol.copwin && sol.policies.is_some());
    let mut args = vec!["solve", "--graph", "family:ppath?base={cycle?n=4}&n=3"];
    for v in ["(0,3)", "(1,3)", "(2,3)", "(3,3)"] {
        args.extend(["--forbid", v]);
    }
    let o = pursuit(&args);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn family_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("g.json");
    let dot = dir.path().join("g.dot");
    let o = pursuit(&[
        "family",
        "--spec",
        "kchain?blocks=2&hub=true",
        "--out",
        json.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let g = FiniteGraph::from_json_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(g.to_json(), pursuit::families::make_graph("kchain?blocks=2&hub=true").unwrap().to_json());
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph"));
    let o = pursuit(&["check", "--graph", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = pursuit(&["family", "--spec", "gee", "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_writes_a_replayable_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let o = pursuit(&[
        "simulate", "--graph", "hgraph", "--cop", "hive-climb", "--robber", "hgraph", "--steps", "200", "--seed", "5",
        "--out", out.to_str().unwrap(), "--marks", "(0,ORIGIN)",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let metrics: Metrics = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!metrics.captured);
    let text = std::fs::read_to_string(&out).unwrap();
    let t = Transcript::from_jsonl_str(&text).unwrap();
    assert_eq!(t.to_jsonl(), text);
    let o = pursuit(&["replay", "--transcript", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = pursuit(&["analyze", "--transcript", out.to_str().unwrap(), "--marks", "(0,ORIGIN)"]);
    let again: Metrics = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(again, metrics);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["nope"],
        vec!["check"],
        vec!["check", "--graph", "family:nope"],
        vec!["simulate", "--graph", "gee", "--cop", "trail", "--robber", "gee", "--steps", "5", "--out", "/dev/null"],
        vec!["solve", "--graph", "/definitely/missing.json"],
    ] {
        assert_eq!(pursuit(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn search_budget_exhaustion_exits_with_three() {
    let o = pursuit(&["search-hom", "--graph", "family:omega1?blocks=4", "--budget-ms", "0"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn quick_suite_passes() {
    let o = pursuit(&["paper-suite", "--quick", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
}
