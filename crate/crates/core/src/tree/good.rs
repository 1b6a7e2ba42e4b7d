use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

use super::{BranchingNumber, CTree, NodeId, TreeError};

/// On-disk form: `{"nodes":[{"id":int,"parent":int|null}],"leaves":[int]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodTreeJson {
    pub nodes: Vec<NodeJson>,
    pub leaves: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: NodeId,
    pub parent: Option<NodeId>,
}

/// Explicit finite good tree with a virtual root.
///
/// Nodes are stored by position in id order, so every iteration is ordered by
/// identifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GoodTreeJson", into = "GoodTreeJson")]
pub struct GoodTree {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    leaf: Vec<bool>,
    root: usize,
}

impl GoodTree {
    /// Builds a tree from `(id, parent)` pairs. Exactly one node (the virtual
    /// root) has no parent.
    pub fn new(
        nodes: impl IntoIterator<Item = (NodeId, Option<NodeId>)>,
        leaves: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self, TreeError> {
        let mut pairs: Vec<(NodeId, Option<NodeId>)> = nodes.into_iter().collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.is_empty() {
            return Err(TreeError::InvalidTree("no nodes".into()));
        }
        let ids: Vec<NodeId> = pairs.iter().map(|p| p.0).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(TreeError::InvalidTree(format!("duplicate id {id}")));
            }
        }
        let mut parent = vec![None; ids.len()];
        let mut root = None;
        for (i, (id, p)) in pairs.iter().enumerate() {
            match p {
                None => {
                    if root.replace(i).is_some() {
                        return Err(TreeError::InvalidTree("more than one parentless node".into()));
                    }
                }
                Some(p) => {
                    let pi = *index
                        .get(p)
                        .ok_or_else(|| TreeError::InvalidTree(format!("parent {p} of {id} is not a node")))?;
                    parent[i] = Some(pi);
                }
            }
        }
        let root = root.ok_or_else(|| TreeError::InvalidTree("no virtual root".into()))?;
        let mut children = vec![Vec::new(); ids.len()];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }
        // depth by BFS; anything unreached sits on a cycle
        let mut depth = vec![usize::MAX; ids.len()];
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                queue.push_back(c);
            }
        }
        if let Some(i) = depth.iter().position(|d| *d == usize::MAX) {
            return Err(TreeError::InvalidTree(format!("node {} is on a cycle", ids[i])));
        }
        let mut leaf = vec![false; ids.len()];
        for l in leaves {
            let i = *index.get(&l).ok_or(TreeError::UnknownNode(l))?;
            leaf[i] = true;
        }
        if leaf[root] {
            return Err(TreeError::InvalidTree("the virtual root cannot be a leaf".into()));
        }
        for i in 0..ids.len() {
            if leaf[i] && !children[i].is_empty() {
                return Err(TreeError::InvalidTree(format!("leaf {} has children", ids[i])));
            }
            if !leaf[i] && children[i].is_empty() {
                return Err(TreeError::InvalidTree(format!("node {} has no leaf above it", ids[i])));
            }
        }
        Ok(GoodTree { ids, index, parent, children, depth, leaf, root })
    }

    fn idx(&self, a: NodeId) -> Result<usize, TreeError> {
        self.index.get(&a).copied().ok_or(TreeError::UnknownNode(a))
    }

    pub fn contains(&self, a: NodeId) -> bool {
        self.index.contains_key(&a)
    }

    pub fn root(&self) -> NodeId {
        self.ids[self.root]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// All nodes including the virtual root, in id order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids.iter().copied()
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.ids.len()).filter(|&i| self.leaf[i]).map(|i| self.ids[i]).collect()
    }

    /// The non-leaf part `T`: every node that is neither a leaf nor `-inf`.
    pub fn inner_nodes(&self) -> Vec<NodeId> {
        (0..self.ids.len()).filter(|&i| !self.leaf[i] && i != self.root).map(|i| self.ids[i]).collect()
    }

    pub fn parent(&self, a: NodeId) -> Result<Option<NodeId>, TreeError> {
        Ok(self.parent[self.idx(a)?].map(|p| self.ids[p]))
    }

    pub fn children(&self, a: NodeId) -> Result<Vec<NodeId>, TreeError> {
        Ok(self.children[self.idx(a)?].iter().map(|&c| self.ids[c]).collect())
    }

    pub fn depth(&self, a: NodeId) -> Result<usize, TreeError> {
        Ok(self.depth[self.idx(a)?])
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn is_leaf_id(&self, a: NodeId) -> Result<bool, TreeError> {
        Ok(self.leaf[self.idx(a)?])
    }

    fn ancestor_at(&self, mut i: usize, d: usize) -> usize {
        while self.depth[i] > d {
            i = self.parent[i].expect("depth > 0 has a parent");
        }
        i
    }

    /// The child of `a` on the path to `b`; requires `a < b`.
    pub fn child_toward(&self, a: NodeId, b: NodeId) -> Result<NodeId, TreeError> {
        let (ai, bi) = (self.idx(a)?, self.idx(b)?);
        if self.depth[bi] <= self.depth[ai] || self.ancestor_at(bi, self.depth[ai]) != ai {
            return Err(TreeError::InvalidRegion(format!("{a} is not below {b}")));
        }
        Ok(self.ids[self.ancestor_at(bi, self.depth[ai] + 1)])
    }

    /// Leaves weakly above `a`.
    pub fn leaves_above(&self, a: NodeId) -> Result<BTreeSet<NodeId>, TreeError> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.idx(a)?];
        while let Some(v) = stack.pop() {
            if self.leaf[v] {
                out.insert(self.ids[v]);
            }
            stack.extend(self.children[v].iter().copied());
        }
        Ok(out)
    }

    /// Nodes weakly above `a`.
    pub fn subtree(&self, a: NodeId) -> Result<BTreeSet<NodeId>, TreeError> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.idx(a)?];
        while let Some(v) = stack.pop() {
            out.insert(self.ids[v]);
            stack.extend(self.children[v].iter().copied());
        }
        Ok(out)
    }

    /// `Br(alpha)`: the nodes strictly below a leaf, bottom-up from `-inf`.
    pub fn branch(&self, alpha: NodeId) -> Result<Vec<NodeId>, TreeError> {
        let i = self.idx(alpha)?;
        if !self.leaf[i] {
            return Err(TreeError::NotALeaf(alpha.to_string()));
        }
        Ok(self.path_below(i))
    }

    /// Nodes strictly below `a`, bottom-up.
    pub fn strictly_below(&self, a: NodeId) -> Result<Vec<NodeId>, TreeError> {
        Ok(self.path_below(self.idx(a)?))
    }

    fn path_below(&self, i: usize) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.depth[i]);
        let mut cur = self.parent[i];
        while let Some(p) = cur {
            out.push(self.ids[p]);
            cur = self.parent[p];
        }
        out.reverse();
        out
    }

    pub fn inf_id(&self, a: NodeId, b: NodeId) -> Result<NodeId, TreeError> {
        let (mut x, mut y) = (self.idx(a)?, self.idx(b)?);
        let d = self.depth[x].min(self.depth[y]);
        x = self.ancestor_at(x, d);
        y = self.ancestor_at(y, d);
        while x != y {
            x = self.parent[x].expect("distinct nodes above the root");
            y = self.parent[y].expect("distinct nodes above the root");
        }
        Ok(self.ids[x])
    }

    pub fn le_id(&self, a: NodeId, b: NodeId) -> Result<bool, TreeError> {
        let (ai, bi) = (self.idx(a)?, self.idx(b)?);
        Ok(self.depth[ai] <= self.depth[bi] && self.ancestor_at(bi, self.depth[ai]) == ai)
    }

    pub fn to_json(&self) -> GoodTreeJson {
        GoodTreeJson {
            nodes: (0..self.ids.len())
                .map(|i| NodeJson { id: self.ids[i], parent: self.parent[i].map(|p| self.ids[p]) })
                .collect(),
            leaves: self.leaves(),
        }
    }
}

impl TryFrom<GoodTreeJson> for GoodTree {
    type Error = TreeError;

    fn try_from(j: GoodTreeJson) -> Result<Self, TreeError> {
        GoodTree::new(j.nodes.into_iter().map(|n| (n.id, n.parent)), j.leaves)
    }
}

impl From<GoodTree> for GoodTreeJson {
    fn from(t: GoodTree) -> Self {
        t.to_json()
    }
}

impl CTree for GoodTree {
    type Node = NodeId;

    fn neg_inf(&self) -> NodeId {
        self.root()
    }

    fn is_leaf(&self, a: &NodeId) -> bool {
        self.index.get(a).is_some_and(|&i| self.leaf[i])
    }

    fn is_neg_inf(&self, a: &NodeId) -> bool {
        *a == self.root()
    }

    fn le(&self, a: &NodeId, b: &NodeId) -> Result<bool, TreeError> {
        self.le_id(*a, *b)
    }

    fn same(&self, a: &NodeId, b: &NodeId) -> Result<bool, TreeError> {
        self.idx(*a)?;
        self.idx(*b)?;
        Ok(a == b)
    }

    fn inf(&self, a: &NodeId, b: &NodeId) -> Result<NodeId, TreeError> {
        self.inf_id(*a, *b)
    }

    fn branching_number(&self, a: &NodeId) -> Result<BranchingNumber, TreeError> {
        let i = self.idx(*a)?;
        if self.leaf[i] {
            return Err(TreeError::LeafArgument(a.to_string()));
        }
        Ok(BranchingNumber::Finite(self.children[i].len()))
    }

    fn describe(&self, a: &NodeId) -> String {
        a.to_string()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// `-inf(0) < r(1)`, `r < u(2) < a1(4), a2(5)`, `r < w(3) < a3(6), a4(7)`.
    pub fn fixture_a() -> GoodTree {
        let n = |i| NodeId(i);
        GoodTree::new(
            [
                (n(0), None),
                (n(1), Some(n(0))),
                (n(2), Some(n(1))),
                (n(3), Some(n(1))),
                (n(4), Some(n(2))),
                (n(5), Some(n(2))),
                (n(6), Some(n(3))),
                (n(7), Some(n(3))),
            ],
            [n(4), n(5), n(6), n(7)],
        )
        .unwrap()
    }

    #[test]
    fn inf_on_fixture() {
        let t = fixture_a();
        assert_eq!(t.inf_id(NodeId(4), NodeId(5)).unwrap(), NodeId(2));
        assert_eq!(t.inf_id(NodeId(4), NodeId(6)).unwrap(), NodeId(1));
        assert_eq!(t.inf_id(NodeId(4), NodeId(4)).unwrap(), NodeId(4));
    }

    #[test]
    fn branch_is_bottom_up() {
        let t = fixture_a();
        assert_eq!(t.branch(NodeId(4)).unwrap(), vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert!(matches!(t.branch(NodeId(2)), Err(TreeError::NotALeaf(_))));
        let single = GoodTree::new([(NodeId(0), None), (NodeId(1), Some(NodeId(0)))], [NodeId(1)]).unwrap();
        assert_eq!(single.branch(NodeId(1)).unwrap(), vec![NodeId(0)]);
    }

    #[test]
    fn branching_numbers() {
        let t = fixture_a();
        assert_eq!(t.branching_number(&NodeId(1)).unwrap(), BranchingNumber::Finite(2));
        assert_eq!(t.branching_number(&NodeId(2)).unwrap(), BranchingNumber::Finite(2));
        assert!(matches!(t.branching_number(&NodeId(4)), Err(TreeError::LeafArgument(_))));
    }

    #[test]
    fn rejects_malformed_trees() {
        let n = |i| NodeId(i);
        // childless non-leaf
        assert!(GoodTree::new([(n(0), None), (n(1), Some(n(0)))], []).is_err());
        // leaf with a child
        assert!(GoodTree::new([(n(0), None), (n(1), Some(n(0))), (n(2), Some(n(1)))], [n(1), n(2)]).is_err());
        // two roots
        assert!(GoodTree::new([(n(0), None), (n(1), None)], [n(1)]).is_err());
        // cycle
        assert!(GoodTree::new([(n(0), None), (n(1), Some(n(2))), (n(2), Some(n(1)))], [n(1)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = fixture_a();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"parent\":null"));
        let back: GoodTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
