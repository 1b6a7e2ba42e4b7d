use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::tree::{GoodTree, NodeId};

/// AHU code of a rooted tree. Codes are the exact nested strings, so equal
/// codes mean isomorphic trees with no collision risk.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalCode(pub String);

pub type Labels = BTreeMap<NodeId, String>;

/// Code of every subtree, computed bottom-up with sorted child codes.
pub fn subtree_codes(tree: &GoodTree, labels: Option<&Labels>) -> BTreeMap<NodeId, String> {
    let mut order: Vec<NodeId> = tree.nodes().collect();
    order.sort_by_key(|&n| std::cmp::Reverse(tree.depth(n).expect("node of the tree")));
    let mut codes: BTreeMap<NodeId, String> = BTreeMap::new();
    for n in order {
        let mut kids: Vec<&str> =
            tree.children(n).expect("node of the tree").iter().map(|c| codes[c].as_str()).collect();
        kids.sort_unstable();
        let mut code = String::from("(");
        if let Some(l) = labels.and_then(|m| m.get(&n)) {
            // length prefix keeps arbitrary tokens unambiguous
            code.push_str(&format!("{}#{}", l.len(), l));
        }
        for k in kids {
            code.push_str(k);
        }
        code.push(')');
        codes.insert(n, code);
    }
    codes
}

/// Equal codes iff there is a label-preserving order isomorphism.
pub fn canonical_form(tree: &GoodTree, labels: Option<&Labels>) -> CanonicalCode {
    CanonicalCode(subtree_codes(tree, labels).remove(&tree.root()).expect("root has a code"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_model::fixture_a;

    fn path(n: u32) -> GoodTree {
        let pairs = (0..n).map(|i| (NodeId(i), if i == 0 { None } else { Some(NodeId(i - 1)) }));
        GoodTree::new(pairs, [NodeId(n - 1)]).unwrap()
    }

    #[test]
    fn examples() {
        let t = fixture_a();
        // swap a1 and a2 by relabelling: the code is id-free
        let l1 = Labels::from([(NodeId(4), "x".to_string())]);
        let l2 = Labels::from([(NodeId(5), "x".to_string())]);
        assert_eq!(canonical_form(&t, Some(&l1)), canonical_form(&t, Some(&l2)));
        assert_ne!(canonical_form(&t, None), canonical_form(&path(8), None));
        assert_ne!(canonical_form(&t, Some(&l1)), canonical_form(&t, None));
        assert_eq!(canonical_form(&t, None).0, "(((()())(()())))");
    }
}
