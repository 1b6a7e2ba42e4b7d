//! Explicit finite good trees used as an exhaustive oracle domain: seeded
//! generation, canonical forms, automorphism transitivity, C-isomorphism
//! testing, incomparable chains and a brute-force partition search.

mod canonical;
mod generate;
mod oracle;

pub use canonical::{canonical_form, subtree_codes, CanonicalCode, Labels};
pub use generate::{fixture_a, generate_good_tree, random_leaf_map, random_locally_constant_map, TreeGenParams};
pub use oracle::{brute_force_locally_constant_partition, image_tag, CellTag, OraclePartition, ORACLE_LEAF_LIMIT};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::tree::ops::{c_relation, is_antichain, is_chain, node_c_relation, require_antichain};
use crate::tree::{CTree, GoodTree, NodeId, Region, TreeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unsatisfiable generator parameters: {0}")]
    Unsatisfiable(String),
    #[error("map is not defined at leaf {0}")]
    NotTotal(NodeId),
    #[error("{0:?} is not a chain")]
    NotAChain(Vec<NodeId>),
    #[error("oracle search is limited to {limit} leaves, got {got}")]
    TooLarge { limit: usize, got: usize },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Finite stand-in for a partial function `M -> T`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "LeafMapJson", into = "LeafMapJson")]
pub struct LeafMap(pub BTreeMap<NodeId, NodeId>);

/// `{"entries":[{"leaf":int,"node":int}]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeafMapJson {
    pub entries: Vec<LeafMapEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeafMapEntry {
    pub leaf: NodeId,
    pub node: NodeId,
}

impl From<LeafMapJson> for LeafMap {
    fn from(j: LeafMapJson) -> Self {
        LeafMap(j.entries.into_iter().map(|e| (e.leaf, e.node)).collect())
    }
}

impl From<LeafMap> for LeafMapJson {
    fn from(m: LeafMap) -> Self {
        LeafMapJson { entries: m.0.into_iter().map(|(leaf, node)| LeafMapEntry { leaf, node }).collect() }
    }
}

impl FromIterator<(NodeId, NodeId)> for LeafMap {
    fn from_iter<I: IntoIterator<Item = (NodeId, NodeId)>>(iter: I) -> Self {
        LeafMap(iter.into_iter().collect())
    }
}

impl LeafMap {
    pub fn get(&self, x: NodeId) -> Option<NodeId> {
        self.0.get(&x).copied()
    }

    pub fn domain(&self) -> BTreeSet<NodeId> {
        self.0.keys().copied().collect()
    }

    /// Distinct values, in id order.
    pub fn image(&self) -> Vec<NodeId> {
        let s: BTreeSet<NodeId> = self.0.values().copied().collect();
        s.into_iter().collect()
    }

    pub fn image_of<'a>(&self, xs: impl IntoIterator<Item = &'a NodeId>) -> Vec<NodeId> {
        let s: BTreeSet<NodeId> = xs.into_iter().filter_map(|x| self.get(*x)).collect();
        s.into_iter().collect()
    }

    pub fn restrict(&self, xs: &BTreeSet<NodeId>) -> LeafMap {
        LeafMap(self.0.iter().filter(|(k, _)| xs.contains(k)).map(|(k, v)| (*k, *v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Whether `Aut(M[A])` acts transitively on `A`: every leaf of the induced
/// tree, marked, yields the same canonical code.
pub fn automorphism_transitive(tree: &GoodTree, a: &[NodeId]) -> Result<bool, ModelError> {
    require_antichain(tree, a)?;
    if a.len() <= 1 {
        return Ok(true);
    }
    let m = tree.induced_c_set(a)?;
    let mut first: Option<CanonicalCode> = None;
    for &x in a {
        let code = canonical_form(&m, Some(&Labels::from([(x, "*".to_string())])));
        match &first {
            None => first = Some(code),
            Some(c) if *c != code => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// Injective on the leaves of `d` and preserving `C` and its negation, with
/// the image read in its induced C-set.
pub fn is_c_isomorphism(tree: &GoodTree, f: &LeafMap, d: &Region<NodeId>) -> Result<bool, ModelError> {
    let xs: Vec<NodeId> = tree.region_members(d)?.into_iter().collect();
    let mut ys = Vec::with_capacity(xs.len());
    for &x in &xs {
        ys.push(f.get(x).ok_or(ModelError::NotTotal(x))?);
    }
    let distinct: BTreeSet<NodeId> = ys.iter().copied().collect();
    if distinct.len() < ys.len() {
        return Ok(false);
    }
    require_antichain(tree, &distinct.iter().copied().collect::<Vec<_>>())?;
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            for k in 0..xs.len() {
                let lhs = c_relation(tree, &xs[i], &xs[j], &xs[k])?;
                let rhs = node_c_relation(tree, &ys[i], &ys[j], &ys[k])?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The left endpoint (least element) of a non-empty chain.
pub fn left_endpoint(tree: &GoodTree, chain: &[NodeId]) -> Result<NodeId, ModelError> {
    let mut best = *chain.first().ok_or(TreeError::EmptyInput)?;
    for &c in chain {
        if tree.lt(&c, &best)? {
            best = c;
        }
    }
    Ok(best)
}

/// Conditions (a)-(c) of a set of incomparable chains. A single chain passes
/// vacuously.
pub fn is_incomparable_chain_set(tree: &GoodTree, family: &[Vec<NodeId>]) -> Result<bool, ModelError> {
    if family.is_empty() || family.iter().any(|c| c.is_empty()) {
        return Err(TreeError::EmptyInput.into());
    }
    for c in family {
        if !is_chain(tree, c)? {
            return Err(ModelError::NotAChain(c.clone()));
        }
    }
    if family.len() == 1 {
        return Ok(true);
    }
    // (a)
    for (i, c0) in family.iter().enumerate() {
        for c1 in &family[i + 1..] {
            for x in c0 {
                for y in c1 {
                    if tree.comparable(x, y)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    // (b)
    let lps = family.iter().map(|c| left_endpoint(tree, c)).collect::<Result<Vec<_>, _>>()?;
    let mut a: BTreeSet<NodeId> = BTreeSet::new();
    for (i, x) in lps.iter().enumerate() {
        for y in &lps[i + 1..] {
            a.insert(tree.inf_id(*x, *y)?);
        }
    }
    let a: Vec<NodeId> = a.into_iter().collect();
    if !is_antichain(tree, &a)? || !automorphism_transitive(tree, &a)? {
        return Ok(false);
    }
    // (c)
    let mut k = None;
    for x in &a {
        let mut count = 0;
        for c in family {
            let mut above = false;
            for y in c {
                if tree.lt(x, y)? {
                    above = true;
                    break;
                }
            }
            count += usize::from(above);
        }
        match k {
            None => k = Some(count),
            Some(k) if k != count => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: NodeId = NodeId(1);
    const U: NodeId = NodeId(2);
    const W: NodeId = NodeId(3);
    const A1: NodeId = NodeId(4);
    const A2: NodeId = NodeId(5);
    const A3: NodeId = NodeId(6);
    const A4: NodeId = NodeId(7);

    /// `r < u < a1, a2`, `r < a3`: one leaf hangs lower than the others.
    fn lopsided() -> GoodTree {
        let n = NodeId;
        GoodTree::new(
            [
                (n(0), None),
                (n(1), Some(n(0))),
                (n(2), Some(n(1))),
                (n(3), Some(n(1))),
                (n(4), Some(n(2))),
                (n(5), Some(n(2))),
            ],
            [n(3), n(4), n(5)],
        )
        .unwrap()
    }

    #[test]
    fn transitivity_examples() {
        let t = fixture_a();
        assert!(automorphism_transitive(&t, &[A1, A2, A3, A4]).unwrap());
        assert!(automorphism_transitive(&t, &[A3]).unwrap());
        let l = lopsided();
        assert!(!automorphism_transitive(&l, &l.leaves()).unwrap());
        assert!(automorphism_transitive(&t, &[R, U]).is_err());
    }

    #[test]
    fn c_isomorphism_examples() {
        let t = fixture_a();
        let id: LeafMap = t.leaves().into_iter().map(|x| (x, x)).collect();
        assert!(is_c_isomorphism(&t, &id, &Region::Whole).unwrap());
        let collapse: LeafMap = [(A1, U), (A2, U), (A3, A3), (A4, A4)].into_iter().collect();
        assert!(!is_c_isomorphism(&t, &collapse, &Region::Whole).unwrap());
        let swap: LeafMap = [(A1, A2), (A2, A1), (A3, A3), (A4, A4)].into_iter().collect();
        assert!(is_c_isomorphism(&t, &swap, &Region::Whole).unwrap());
        // a1 <-> a3 breaks the pairing
        let cross: LeafMap = [(A1, A3), (A2, A2), (A3, A1), (A4, A4)].into_iter().collect();
        assert!(!is_c_isomorphism(&t, &cross, &Region::Whole).unwrap());
        let comparable: LeafMap = [(A1, R), (A2, U)].into_iter().collect();
        assert!(is_c_isomorphism(&t, &comparable, &Region::cone(R, A1)).is_err());
    }

    #[test]
    fn incomparable_chain_examples() {
        let t = fixture_a();
        assert!(is_incomparable_chain_set(&t, &[vec![U], vec![W]]).unwrap());
        assert!(!is_incomparable_chain_set(&t, &[vec![R], vec![U]]).unwrap());
        assert!(is_incomparable_chain_set(&t, &[vec![R, U]]).unwrap());
        assert!(is_incomparable_chain_set(&t, &[]).is_err());
        assert!(matches!(is_incomparable_chain_set(&t, &[vec![U, W]]), Err(ModelError::NotAChain(_))));
        // a1, a2 and a3 give A = {u, r}, not an antichain
        assert!(!is_incomparable_chain_set(&t, &[vec![A1], vec![A2], vec![A3]]).unwrap());
    }

    #[test]
    fn leaf_map_json() {
        let m: LeafMap = [(A1, U), (A3, W)].into_iter().collect();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"entries":[{"leaf":4,"node":2},{"leaf":6,"node":3}]}"#);
        assert_eq!(serde_json::from_str::<LeafMap>(&s).unwrap(), m);
    }

    #[test]
    fn generator_examples() {
        let t = generate_good_tree(&TreeGenParams::new(2, (2, 2), 4, 7)).unwrap();
        assert_eq!(canonical_form(&t, None), canonical_form(&fixture_a(), None));
        let single = generate_good_tree(&TreeGenParams::new(0, (2, 2), 1, 0)).unwrap();
        assert_eq!(single.len(), 2);
        assert_eq!(single.leaves(), vec![NodeId(1)]);
        let p = TreeGenParams::new(4, (2, 4), 20, 99);
        assert_eq!(generate_good_tree(&p).unwrap(), generate_good_tree(&p).unwrap());
        assert!(generate_good_tree(&TreeGenParams::new(2, (2, 2), 0, 0)).is_err());
        assert!(generate_good_tree(&TreeGenParams::new(2, (2, 2), 5, 0)).is_err());
    }
}
