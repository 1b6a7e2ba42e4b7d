//! Browser bindings. Every entry point takes and returns JSON strings; errors
//! come back as `{"code", "message", "witness"}` objects.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ctree::decompose::{DecomposeError, LeafFn};
use ctree::finite_model::{generate_good_tree, LeafMap, TreeGenParams};
use ctree::tree::to_dot;
use ctree::tsets::decompose_t_subset;
use ctree::{GoodTree, NodeId};

#[derive(Serialize)]
struct ErrorJson {
    code: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

fn malformed(e: impl std::fmt::Display) -> String {
    error_json("MALFORMED_INPUT", e.to_string(), None)
}

fn error_json(code: &str, message: String, witness: Option<String>) -> String {
    serde_json::to_string(&ErrorJson { code: code.into(), message, witness }).expect("error serializes")
}

fn rejected(e: DecomposeError) -> String {
    error_json(e.code(), e.to_string(), e.witness())
}

#[derive(Serialize)]
struct TreeWithDot {
    tree: GoodTree,
    dot: String,
}

#[derive(serde::Deserialize)]
struct NodeSet {
    nodes: Vec<NodeId>,
}

/// A random good tree with `leaves` leaves, plus its DOT rendering.
pub fn gen_tree_json(seed: u32, leaves: u32) -> Result<String, String> {
    let leaves = leaves as usize;
    let mut depth = 1;
    while 3usize.pow(depth as u32) < leaves {
        depth += 1;
    }
    let p = TreeGenParams::new(depth + 1, (2, 3), leaves, u64::from(seed));
    let tree = generate_good_tree(&p).map_err(|e| error_json("UNSATISFIABLE", e.to_string(), None))?;
    let dot = to_dot(&tree);
    Ok(serde_json::to_string(&TreeWithDot { tree, dot }).expect("tree serializes"))
}

/// Decomposition of a locally constant leaf map into antichain and chain cells.
pub fn decompose_json(tree: &str, map: &str) -> Result<String, String> {
    let tree: GoodTree = serde_json::from_str(tree).map_err(malformed)?;
    let map: LeafMap = serde_json::from_str(map).map_err(malformed)?;
    let d = LeafFn::new(&tree, &map).decompose().map_err(rejected)?;
    Ok(serde_json::to_string(&d).expect("decomposition serializes"))
}

/// Cells of a set of inner nodes.
pub fn t_decompose_json(tree: &str, nodes: &str) -> Result<String, String> {
    let tree: GoodTree = serde_json::from_str(tree).map_err(malformed)?;
    let x: NodeSet = serde_json::from_str(nodes).map_err(malformed)?;
    let cells = decompose_t_subset(&tree, &x.nodes.into_iter().collect()).map_err(rejected)?;
    Ok(serde_json::to_string(&cells).expect("cells serialize"))
}

#[wasm_bindgen]
pub fn gen_tree(seed: u32, leaves: u32) -> Result<String, JsValue> {
    gen_tree_json(seed, leaves).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decompose(tree: &str, map: &str) -> Result<String, JsValue> {
    decompose_json(tree, map).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn t_decompose(tree: &str, nodes: &str) -> Result<String, JsValue> {
    t_decompose_json(tree, nodes).map_err(|e| JsValue::from_str(&e))
}
