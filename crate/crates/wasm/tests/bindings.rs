use ctree_wasm::{decompose_json, gen_tree_json, t_decompose_json};

const FIXTURE: &str = r#"{"nodes":[{"id":0,"parent":null},{"id":1,"parent":0},{"id":2,"parent":1},{"id":3,"parent":1},
{"id":4,"parent":2},{"id":5,"parent":2},{"id":6,"parent":3},{"id":7,"parent":3}],"leaves":[4,5,6,7]}"#;

#[test]
fn gen_tree_returns_tree_and_dot() {
    let out: serde_json::Value = serde_json::from_str(&gen_tree_json(7, 10).unwrap()).unwrap();
    assert_eq!(out["tree"]["leaves"].as_array().unwrap().len(), 10);
    assert!(out["dot"].as_str().unwrap().starts_with("digraph"));
    assert_eq!(gen_tree_json(7, 10), gen_tree_json(7, 10));
}

#[test]
fn decompose_reports_cells_and_errors() {
    let map = r#"{"entries":[{"leaf":4,"node":2},{"leaf":5,"node":2},{"leaf":6,"node":3},{"leaf":7,"node":3}]}"#;
    let d: serde_json::Value = serde_json::from_str(&decompose_json(FIXTURE, map).unwrap()).unwrap();
    assert_eq!(d["cells"].as_array().unwrap().len(), 1);

    let bad = r#"{"entries":[{"leaf":4,"node":2},{"leaf":5,"node":3},{"leaf":6,"node":3},{"leaf":7,"node":3}]}"#;
    let e: serde_json::Value = serde_json::from_str(&decompose_json(FIXTURE, bad).unwrap_err()).unwrap();
    assert_eq!(e["code"], "NOT_LOCALLY_CONSTANT");
    assert_eq!(e["witness"], "4");

    let e: serde_json::Value = serde_json::from_str(&decompose_json("{", map).unwrap_err()).unwrap();
    assert_eq!(e["code"], "MALFORMED_INPUT");
}

#[test]
fn t_decompose_of_two_siblings() {
    let cells: serde_json::Value =
        serde_json::from_str(&t_decompose_json(FIXTURE, r#"{"nodes":[2,3]}"#).unwrap()).unwrap();
    assert_eq!(cells.as_array().unwrap().len(), 1);
    assert_eq!(cells[0]["kind"], "point_family");
}
