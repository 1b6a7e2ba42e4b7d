use std::fmt::Write;

use super::GoodTree;

/// Graphviz rendering. Leaves are boxes, the virtual root is labelled `-inf`;
/// nodes and edges are emitted in id order.
pub fn to_dot(tree: &GoodTree) -> String {
    let mut out = String::from("digraph good_tree {\n  rankdir=BT;\n");
    let root = tree.root();
    for n in tree.nodes() {
        let leaf = tree.is_leaf_id(n).unwrap_or(false);
        let (label, shape) = if n == root {
            ("-inf".to_string(), "plaintext")
        } else if leaf {
            (n.to_string(), "box")
        } else {
            (n.to_string(), "ellipse")
        };
        let _ = writeln!(out, "  n{n} [label=\"{label}\", shape={shape}];");
    }
    for n in tree.nodes() {
        if let Ok(Some(p)) = tree.parent(n) {
            let _ = writeln!(out, "  n{p} -> n{n};");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::good::tests::fixture_a;

    #[test]
    fn leaves_are_boxes() {
        let dot = to_dot(&fixture_a());
        assert!(dot.contains("n4 [label=\"4\", shape=box];"));
        assert!(dot.contains("n1 [label=\"1\", shape=ellipse];"));
        assert!(dot.contains("n0 [label=\"-inf\", shape=plaintext];"));
        assert!(dot.contains("n2 -> n4;"));
        assert_eq!(dot, to_dot(&fixture_a()));
    }
}
