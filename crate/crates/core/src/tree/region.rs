//! 1-cells over a C-set: points, cones, intervals, level sets and the whole
//! space.
//!
//! Regions are described by witnesses rather than extensions: a cone is its
//! basis plus one node above it. Membership works for leaves (the subset of
//! `M`) and for inner nodes (the subset of `T`); leaves are read in `M`, inner
//! nodes in `T`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::{CTree, GoodTree, NodeId, TreeError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region<N> {
    Point {
        at: N,
    },
    /// `Gamma_basis(witness)`, `basis < witness`.
    Cone {
        basis: N,
        witness: N,
    },
    /// `(lo, hi)`; in `M` this is `Gamma_lo(hi) \ Lambda_hi`.
    Interval {
        lo: N,
        hi: N,
    },
    /// `Lambda_basis(removed...)`: everything above `basis` minus the cones of
    /// the removed witnesses.
    LevelSet {
        basis: N,
        removed: Vec<N>,
    },
    Whole,
}

impl<N: Clone> Region<N> {
    pub fn cone(basis: N, witness: N) -> Self {
        Region::Cone { basis, witness }
    }

    pub fn level_set(basis: N, removed: Vec<N>) -> Self {
        Region::LevelSet { basis, removed }
    }

    /// `min(.)`; `-inf` for the whole space.
    pub fn basis<T: CTree<Node = N>>(&self, tree: &T) -> N {
        match self {
            Region::Point { at } => at.clone(),
            Region::Cone { basis, .. } | Region::LevelSet { basis, .. } => basis.clone(),
            Region::Interval { lo, .. } => lo.clone(),
            Region::Whole => tree.neg_inf(),
        }
    }

    pub fn map<M>(&self, mut f: impl FnMut(&N) -> M) -> Region<M> {
        match self {
            Region::Point { at } => Region::Point { at: f(at) },
            Region::Cone { basis, witness } => Region::Cone { basis: f(basis), witness: f(witness) },
            Region::Interval { lo, hi } => Region::Interval { lo: f(lo), hi: f(hi) },
            Region::LevelSet { basis, removed } => {
                Region::LevelSet { basis: f(basis), removed: removed.iter().map(f).collect() }
            }
            Region::Whole => Region::Whole,
        }
    }

    pub fn try_map<M, E>(&self, mut f: impl FnMut(&N) -> Result<M, E>) -> Result<Region<M>, E> {
        Ok(match self {
            Region::Point { at } => Region::Point { at: f(at)? },
            Region::Cone { basis, witness } => Region::Cone { basis: f(basis)?, witness: f(witness)? },
            Region::Interval { lo, hi } => Region::Interval { lo: f(lo)?, hi: f(hi)? },
            Region::LevelSet { basis, removed } => {
                Region::LevelSet { basis: f(basis)?, removed: removed.iter().map(&mut f).collect::<Result<_, E>>()? }
            }
            Region::Whole => Region::Whole,
        })
    }
}

/// Checks the structural invariants of a region against a tree.
pub fn validate<T: CTree>(tree: &T, r: &Region<T::Node>) -> Result<(), TreeError> {
    let bad = |m: String| Err(TreeError::InvalidRegion(m));
    match r {
        Region::Point { .. } | Region::Whole => Ok(()),
        Region::Cone { basis, witness } => {
            if !tree.lt(basis, witness)? {
                return bad(format!("cone basis {} is not below {}", tree.describe(basis), tree.describe(witness)));
            }
            Ok(())
        }
        Region::Interval { lo, hi } => {
            if !tree.lt(lo, hi)? {
                return bad(format!(
                    "interval endpoints {} and {} are not increasing",
                    tree.describe(lo),
                    tree.describe(hi)
                ));
            }
            Ok(())
        }
        Region::LevelSet { basis, removed } => {
            for b in removed {
                if !tree.lt(basis, b)? {
                    return bad(format!("removed witness {} is not above the basis", tree.describe(b)));
                }
            }
            for (i, b) in removed.iter().enumerate() {
                for c in &removed[i + 1..] {
                    if tree.lt(basis, &tree.inf(b, c)?)? {
                        return bad(format!(
                            "removed witnesses {} and {} lie in the same cone",
                            tree.describe(b),
                            tree.describe(c)
                        ));
                    }
                }
            }
            if !removed.is_empty() && !tree.branching_number(basis)?.exceeds(removed.len()) {
                return bad(format!("level set removes {} cones but bn is too small", removed.len()));
            }
            Ok(())
        }
    }
}

/// `x in Gamma_basis(witness)`: `basis < inf(x, witness)`.
pub fn in_cone<T: CTree>(tree: &T, basis: &T::Node, witness: &T::Node, x: &T::Node) -> Result<bool, TreeError> {
    tree.lt(basis, &tree.inf(x, witness)?)
}

/// Membership. Leaves use the `M` reading, other nodes the `T` reading.
pub fn region_contains<T: CTree>(tree: &T, r: &Region<T::Node>, x: &T::Node) -> Result<bool, TreeError> {
    let leaf = tree.is_leaf(x);
    match r {
        Region::Point { at } => tree.same(at, x),
        Region::Whole => Ok(leaf || !tree.is_neg_inf(x)),
        Region::Cone { basis, witness } => in_cone(tree, basis, witness, x),
        Region::Interval { lo, hi } => {
            if leaf {
                Ok(in_cone(tree, lo, hi, x)? && !tree.le(hi, x)?)
            } else {
                Ok(tree.lt(lo, x)? && tree.lt(x, hi)?)
            }
        }
        Region::LevelSet { basis, removed } => {
            if !tree.le(basis, x)? {
                return Ok(false);
            }
            for b in removed {
                if in_cone(tree, basis, b, x)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

impl GoodTree {
    /// Exact leaf set of a region.
    pub fn region_members(&self, r: &Region<NodeId>) -> Result<BTreeSet<NodeId>, TreeError> {
        validate(self, r)?;
        Ok(match r {
            Region::Point { at } => {
                if !self.is_leaf_id(*at)? {
                    return Err(TreeError::NotALeaf(at.to_string()));
                }
                BTreeSet::from([*at])
            }
            Region::Whole => self.leaves().into_iter().collect(),
            Region::Cone { basis, witness } => self.leaves_above(self.child_toward(*basis, *witness)?)?,
            Region::Interval { lo, hi } => {
                let cone = self.leaves_above(self.child_toward(*lo, *hi)?)?;
                let top = self.leaves_above(*hi)?;
                cone.difference(&top).copied().collect()
            }
            Region::LevelSet { basis, removed } => {
                let mut out = self.leaves_above(*basis)?;
                for b in removed {
                    for x in self.leaves_above(self.child_toward(*basis, *b)?)? {
                        out.remove(&x);
                    }
                }
                out
            }
        })
    }

    /// Leaf set of a cone `Gamma_a(x)` given its basis and a witness.
    pub fn cone_leaves(&self, basis: NodeId, witness: NodeId) -> Result<BTreeSet<NodeId>, TreeError> {
        self.region_members(&Region::cone(basis, witness))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::good::tests::fixture_a;

    const R: NodeId = NodeId(1);
    const U: NodeId = NodeId(2);
    const A1: NodeId = NodeId(4);
    const A2: NodeId = NodeId(5);
    const A3: NodeId = NodeId(6);
    const A4: NodeId = NodeId(7);

    #[test]
    fn members_on_fixture() {
        let t = fixture_a();
        assert_eq!(t.region_members(&Region::cone(R, A1)).unwrap(), BTreeSet::from([A1, A2]));
        assert_eq!(t.region_members(&Region::level_set(R, vec![A1])).unwrap(), BTreeSet::from([A3, A4]));
        assert_eq!(t.region_members(&Region::Point { at: A3 }).unwrap(), BTreeSet::from([A3]));
        assert_eq!(t.region_members(&Region::Whole).unwrap().len(), 4);
    }

    #[test]
    fn interval_readings_differ() {
        let t = fixture_a();
        let iv = Region::Interval { lo: R, hi: A1 };
        assert!(region_contains(&t, &iv, &U).unwrap());
        assert!(region_contains(&t, &iv, &A2).unwrap());
        assert!(!region_contains(&t, &iv, &A1).unwrap());
        assert_eq!(t.region_members(&iv).unwrap(), BTreeSet::from([A2]));
    }

    #[test]
    fn contains_matches_members() {
        let t = fixture_a();
        let regions = [
            Region::cone(R, A1),
            Region::cone(NodeId(0), A3),
            Region::level_set(R, vec![A1]),
            Region::level_set(U, vec![]),
            Region::Interval { lo: NodeId(0), hi: U },
            Region::Whole,
        ];
        for r in &regions {
            let members = t.region_members(r).unwrap();
            for x in t.leaves() {
                assert_eq!(region_contains(&t, r, &x).unwrap(), members.contains(&x), "{r:?} {x}");
            }
        }
    }

    #[test]
    fn invalid_regions_rejected() {
        let t = fixture_a();
        assert!(validate(&t, &Region::cone(A1, R)).is_err());
        assert!(validate(&t, &Region::Interval { lo: U, hi: NodeId(3) }).is_err());
        // both removed witnesses in the u-cone
        assert!(validate(&t, &Region::level_set(R, vec![A1, A2])).is_err());
        // bn(r) = 2 is not > 2
        assert!(validate(&t, &Region::level_set(R, vec![A1, A3])).is_err());
    }

    #[test]
    fn region_json_shape() {
        let r: Region<NodeId> = Region::cone(R, A1);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"kind":"cone","basis":1,"witness":4}"#);
        let back: Region<NodeId> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
