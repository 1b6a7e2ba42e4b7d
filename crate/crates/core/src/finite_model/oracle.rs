use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::{LeafMap, ModelError};
use crate::tree::{CTree, GoodTree, NodeId, TreeError};

pub const ORACLE_LEAF_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellTag {
    Antichain,
    Chain,
}

/// Antichain when possible (so singletons are antichains), else chain.
pub fn image_tag(tree: &GoodTree, image: &[NodeId]) -> Result<Option<CellTag>, TreeError> {
    if crate::tree::ops::is_antichain(tree, image)? {
        Ok(Some(CellTag::Antichain))
    } else if crate::tree::ops::is_chain(tree, image)? {
        Ok(Some(CellTag::Chain))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OraclePartition {
    pub parts: Vec<(BTreeSet<NodeId>, CellTag)>,
}

struct Search<'a> {
    values: Vec<usize>,
    comparable: &'a [Vec<bool>],
    k: usize,
    assign: Vec<usize>,
    blocks: Vec<BTreeSet<usize>>,
}

impl Search<'_> {
    /// `set + v` is still an antichain or a chain.
    fn fits(&self, set: &BTreeSet<usize>, v: usize) -> bool {
        if set.contains(&v) {
            return true;
        }
        let all_inc = set.iter().all(|&w| !self.comparable[v][w]);
        let pairwise_inc = set.iter().all(|&a| set.iter().all(|&b| a == b || !self.comparable[a][b]));
        if all_inc && pairwise_inc {
            return true;
        }
        let all_cmp = set.iter().all(|&w| self.comparable[v][w]);
        let pairwise_cmp = set.iter().all(|&a| set.iter().all(|&b| self.comparable[a][b]));
        all_cmp && pairwise_cmp
    }

    fn go(&mut self, i: usize) -> bool {
        if i == self.values.len() {
            return true;
        }
        let v = self.values[i];
        let open = (self.blocks.len() + 1).min(self.k);
        for b in 0..open {
            if b == self.blocks.len() {
                self.blocks.push(BTreeSet::from([v]));
                self.assign[i] = b;
                if self.go(i + 1) {
                    return true;
                }
                self.blocks.pop();
            } else if self.fits(&self.blocks[b], v) {
                let fresh = self.blocks[b].insert(v);
                self.assign[i] = b;
                if self.go(i + 1) {
                    return true;
                }
                if fresh {
                    self.blocks[b].remove(&v);
                }
            }
        }
        false
    }
}

/// Exhaustive search (restricted-growth enumeration with pruning) for a
/// partition of `dom(f)` with the fewest parts whose images are each an
/// antichain or a chain. Limited to [`ORACLE_LEAF_LIMIT`] points.
pub fn brute_force_locally_constant_partition(tree: &GoodTree, f: &LeafMap) -> Result<OraclePartition, ModelError> {
    let dom: Vec<NodeId> = f.domain().into_iter().collect();
    if dom.len() > ORACLE_LEAF_LIMIT {
        return Err(ModelError::TooLarge { limit: ORACLE_LEAF_LIMIT, got: dom.len() });
    }
    if dom.is_empty() {
        return Ok(OraclePartition { parts: Vec::new() });
    }
    let image = f.image();
    let index = |n: NodeId| image.binary_search(&n).expect("value in image");
    let mut comparable = vec![vec![false; image.len()]; image.len()];
    for (i, a) in image.iter().enumerate() {
        for (j, b) in image.iter().enumerate() {
            comparable[i][j] = tree.comparable(a, b)?;
        }
    }
    let values: Vec<usize> = dom.iter().map(|&x| index(f.get(x).expect("in domain"))).collect();
    for k in 1..=dom.len() {
        let mut s = Search {
            values: values.clone(),
            comparable: &comparable,
            k,
            assign: vec![0; dom.len()],
            blocks: Vec::new(),
        };
        if s.go(0) {
            let mut parts = vec![BTreeSet::new(); s.blocks.len()];
            for (i, &b) in s.assign.iter().enumerate() {
                parts[b].insert(dom[i]);
            }
            let mut out = Vec::with_capacity(parts.len());
            for p in parts {
                let tag = image_tag(tree, &f.image_of(&p))?.expect("search only builds valid blocks");
                out.push((p, tag));
            }
            return Ok(OraclePartition { parts: out });
        }
    }
    unreachable!("singleton blocks always succeed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_model::fixture_a;

    const R: NodeId = NodeId(1);
    const U: NodeId = NodeId(2);
    const W: NodeId = NodeId(3);

    fn map(v: &[(u32, NodeId)]) -> LeafMap {
        v.iter().map(|(x, y)| (NodeId(*x), *y)).collect()
    }

    #[test]
    fn oracle_examples() {
        let t = fixture_a();
        let parent = map(&[(4, U), (5, U), (6, W), (7, W)]);
        let p = brute_force_locally_constant_partition(&t, &parent).unwrap();
        assert_eq!(p.parts.len(), 1);
        assert_eq!(p.parts[0].1, CellTag::Antichain);
        let constant = map(&[(4, R), (5, R), (6, R), (7, R)]);
        assert_eq!(brute_force_locally_constant_partition(&t, &constant).unwrap().parts.len(), 1);
        let chain = map(&[(4, U), (5, U), (6, R), (7, R)]);
        let p = brute_force_locally_constant_partition(&t, &chain).unwrap();
        assert_eq!(p.parts, vec![(t.leaves().into_iter().collect(), CellTag::Chain)]);
        // {u, w, r} is neither; two parts needed
        let mixed = map(&[(4, U), (5, W), (6, R), (7, R)]);
        assert_eq!(brute_force_locally_constant_partition(&t, &mixed).unwrap().parts.len(), 2);
    }
}
