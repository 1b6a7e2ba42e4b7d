use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

use super::{LeafMap, ModelError};
use crate::tree::{GoodTree, NodeId};

/// Parameters of the seeded tree generator. Depth is counted from the
/// topmost real node `r` (depth 0) to the deepest leaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeGenParams {
    pub max_depth: usize,
    pub branching: (usize, usize),
    pub leaves: usize,
    pub seed: u64,
}

impl TreeGenParams {
    pub fn new(max_depth: usize, branching: (usize, usize), leaves: usize, seed: u64) -> Self {
        TreeGenParams { max_depth, branching, leaves, seed }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let (lo, hi) = self.branching;
        let bad = |m: &str| Err(ModelError::Unsatisfiable(m.to_string()));
        if self.leaves == 0 {
            return bad("leaf count must be at least 1");
        }
        if lo < 2 || hi < lo {
            return bad("branching range must satisfy 2 <= min <= max");
        }
        if self.leaves > 1 && self.max_depth == 0 {
            return bad("more than one leaf needs depth at least 1");
        }
        if capacity(hi, self.max_depth) < self.leaves {
            return bad("leaf count exceeds max^depth");
        }
        Ok(())
    }
}

fn capacity(b: usize, depth: usize) -> usize {
    let mut c: usize = 1;
    for _ in 0..depth {
        c = c.saturating_mul(b);
    }
    c
}

struct Shape {
    children: Vec<Shape>,
}

fn build<R: Rng>(rng: &mut R, budget: usize, depth_left: usize, (lo, hi): (usize, usize)) -> Shape {
    if budget == 1 {
        return Shape { children: Vec::new() };
    }
    let cap = capacity(hi, depth_left - 1);
    let needed = budget.div_ceil(cap);
    // fewer than `lo` children only when the budget itself is smaller
    let k = rng.gen_range(lo.min(budget)..=hi.min(budget)).max(needed);
    let mut parts = vec![1usize; k];
    let mut rest = budget - k;
    while rest > 0 {
        let open: Vec<usize> = (0..k).filter(|&i| parts[i] < cap).collect();
        let i = *open.choose(rng).expect("capacity suffices");
        parts[i] += 1;
        rest -= 1;
    }
    Shape { children: parts.into_iter().map(|p| build(rng, p, depth_left - 1, (lo, hi))).collect() }
}

/// Deterministic in `seed`. Ids are assigned breadth-first: `0` is the
/// virtual root, `1` the topmost real node.
pub fn generate_good_tree(p: &TreeGenParams) -> Result<GoodTree, ModelError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let shape = build(&mut rng, p.leaves, p.max_depth, p.branching);
    let mut pairs = vec![(NodeId(0), None)];
    let mut leaves = Vec::new();
    let mut queue = VecDeque::from([(&shape, NodeId(0))]);
    let mut next = 1u32;
    while let Some((s, parent)) = queue.pop_front() {
        let id = NodeId(next);
        next += 1;
        pairs.push((id, Some(parent)));
        if s.children.is_empty() {
            leaves.push(id);
        }
        for c in &s.children {
            queue.push_back((c, id));
        }
    }
    Ok(GoodTree::new(pairs, leaves)?)
}

/// The running example: `r < u < a1, a2` and `r < w < a3, a4`, with ids
/// `-inf = 0, r = 1, u = 2, w = 3, a1..a4 = 4..7`.
pub fn fixture_a() -> GoodTree {
    let n = NodeId;
    let parents =
        [(0, None), (1, Some(0)), (2, Some(1)), (3, Some(1)), (4, Some(2)), (5, Some(2)), (6, Some(3)), (7, Some(3))];
    GoodTree::new(parents.map(|(i, p)| (n(i), p.map(n))), [n(4), n(5), n(6), n(7)]).expect("fixture is well formed")
}

/// A random locally constant leaf map: the leaves are cut into cones with at
/// least two points each, some cones are left out of the domain, and each
/// remaining cone gets a value from `pool` (all non-root nodes when empty).
pub fn random_locally_constant_map<R: Rng>(tree: &GoodTree, pool: &[NodeId], rng: &mut R) -> LeafMap {
    let values: Vec<NodeId> =
        if pool.is_empty() { tree.nodes().filter(|&n| n != tree.root()).collect() } else { pool.to_vec() };
    let mut blocks: Vec<NodeId> = Vec::new();
    let mut stack = vec![tree.root()];
    while let Some(n) = stack.pop() {
        let children = tree.children(n).expect("node of the tree");
        let splittable = !children.is_empty()
            && children.iter().all(|&c| tree.leaves_above(c).map(|s| s.len() >= 2).unwrap_or(false));
        let stop = n != tree.root() && (!splittable || rng.gen_bool(0.4));
        if stop || (n == tree.root() && !splittable) {
            blocks.push(n);
        } else {
            stack.extend(children);
        }
    }
    blocks.sort();
    let mut map = BTreeMap::new();
    let keep_all = rng.gen_bool(0.5);
    for b in blocks {
        if !keep_all && rng.gen_bool(0.25) {
            continue;
        }
        let v = *values.choose(rng).expect("non-empty pool");
        for x in tree.leaves_above(b).expect("node of the tree") {
            map.insert(x, v);
        }
    }
    LeafMap(map)
}

/// Uniformly random leaf map (usually not locally constant).
pub fn random_leaf_map<R: Rng>(tree: &GoodTree, rng: &mut R) -> LeafMap {
    let values: Vec<NodeId> = tree.nodes().filter(|&n| n != tree.root()).collect();
    LeafMap(tree.leaves().into_iter().map(|x| (x, *values.choose(rng).expect("non-empty"))).collect())
}
