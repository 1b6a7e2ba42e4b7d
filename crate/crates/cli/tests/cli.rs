use std::path::PathBuf;
use std::process::{Command, Output};

use ctree::decompose::{Decomposition, Piece, PiecewiseFn, PiecewiseMonotoneMap, PuiseuxExpr, ValueGroupNormalForm};
use ctree::finite_model::fixture_a;
use ctree::puiseux::Series;
use ctree::rational::q;
use ctree::tsets::TCell;
use ctree::{GoodTree, Region};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ctree"))
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ctree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn fixture_file() -> PathBuf {
    scratch("fixture.json", &serde_json::to_string(&fixture_a()).unwrap())
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> serde_json::Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(err.lines().last().unwrap()).expect("structured error")
}

#[test]
fn axioms_check_on_fixture() {
    let t = fixture_file();
    let o = run(&["axioms-check", "--tree", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let holds: Vec<(String, bool)> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["axiom"].as_str().unwrap().to_string(), r["holds"].as_bool().unwrap()))
        .collect();
    assert_eq!(
        holds,
        vec![("C1".into(), true), ("C2".into(), true), ("C3".into(), true), ("C4".into(), true), ("D".into(), false)]
    );
}

#[test]
fn not_locally_constant_exits_2_with_witness() {
    let t = fixture_file();
    let table = r#"{"backend":"finite","pieces":[{"domain":{"kind":"whole"},"expr":{"kind":"table","entries":{"entries":[
        {"leaf":4,"node":2},{"leaf":5,"node":3},{"leaf":6,"node":3},{"leaf":7,"node":3}]}}}]}"#;
    let f = scratch("bad_fn.json", table);
    let o = run(&["decompose-fn", "--tree", t.to_str().unwrap(), "--fn", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["code"], "NOT_LOCALLY_CONSTANT");
    assert_eq!(e["witness"], "4");
}

#[test]
fn malformed_input_exits_1() {
    let t = fixture_file();
    let f = scratch("garbage.json", "{\"nodes\": [1, 2");
    let o = run(&["decompose-fn", "--tree", t.to_str().unwrap(), "--fn", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_json(&o)["code"], "MALFORMED_INPUT");
    let o = run(&["strata", "--tree", "/nonexistent/tree.json", "--nodes", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_tree_is_deterministic_and_round_trips() {
    let a = run(&["gen-tree", "--seed", "7", "--leaves", "12"]);
    let b = run(&["gen-tree", "--seed", "7", "--leaves", "12"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let tree: GoodTree = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(tree.leaves().len(), 12);
    assert_eq!(serde_json::to_string_pretty(&tree).unwrap() + "\n", stdout(&a));
    let dot = run(&["gen-tree", "--seed", "7", "--format", "dot"]);
    assert!(stdout(&dot).starts_with("digraph"));
}

#[test]
fn decompose_output_round_trips() {
    let t = fixture_file();
    let parent = r#"{"backend":"finite","pieces":[
        {"domain":{"kind":"cone","basis":1,"witness":2},"expr":{"kind":"const","node":2}},
        {"domain":{"kind":"cone","basis":1,"witness":3},"expr":{"kind":"const","node":3}}]}"#;
    let f = scratch("parent_fn.json", parent);
    let o = run(&["decompose-fn", "--tree", t.to_str().unwrap(), "--fn", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let d: Decomposition = serde_json::from_str(&stdout(&o)).unwrap();
    let Decomposition::Finite(fd) = &d else { panic!("finite backend expected") };
    assert_eq!(fd.cells.len(), 1);
    assert_eq!(serde_json::to_string_pretty(&d).unwrap() + "\n", stdout(&o));
}

#[test]
fn t_decompose_and_strata() {
    let t = fixture_file();
    let x = scratch("nodes.json", r#"{"nodes":[1,2,3]}"#);
    let o = run(&["t-decompose", "--tree", t.to_str().unwrap(), "--nodes", x.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cells: Vec<TCell> = serde_json::from_str(&stdout(&o)).unwrap();
    let tree = fixture_a();
    let mut all = std::collections::BTreeSet::new();
    for c in &cells {
        all.extend(c.extension(&tree).unwrap());
    }
    assert_eq!(all.len(), 3);
    let o = run(&["strata", "--tree", t.to_str().unwrap(), "--nodes", x.to_str().unwrap()]);
    let strata: Vec<Vec<u32>> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(strata, vec![vec![2, 3], vec![1]]);
}

#[test]
fn value_group_normal_form_of_valuation() {
    let f = PiecewiseFn::Puiseux {
        pieces: vec![Piece {
            domain: Region::Whole,
            expr: PuiseuxExpr::Vdiff {
                beta: Series::constant(q(0), q(16)),
                post: PiecewiseMonotoneMap::identity(),
                branch: None,
            },
        }],
    };
    let path = scratch("vdiff.json", &serde_json::to_string(&f).unwrap());
    let o = run(&["vgroup-nf", "--fn", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let nf: ValueGroupNormalForm = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(nf.cells.len(), 1);
    assert!(nf.finite.is_empty());
    // a finite function handed to a Puiseux-only command
    let fin = scratch(
        "const_fn.json",
        r#"{"backend":"finite","pieces":[{"domain":{"kind":"whole"},"expr":{"kind":"const","node":1}}]}"#,
    );
    let o = run(&["vgroup-nf", "--fn", fin.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["code"], "WRONG_BACKEND");
}

#[test]
fn out_flag_writes_file_and_prints_summary() {
    let out = std::env::temp_dir().join(format!("ctree-cli-out-{}.dot", std::process::id()));
    let t = fixture_file();
    let o = run(&["export-dot", "--tree", t.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("digraph"));
    assert!(!stdout(&o).is_empty());
}

#[test]
fn quick_suite_is_byte_identical_across_runs() {
    let a = run(&["suite", "--quick", "--seed", "3"]);
    let b = run(&["suite", "--quick", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}
