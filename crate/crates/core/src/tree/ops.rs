//! Backend-independent constructions: the derived C-relation, chains and
//! antichains, inf-closure, splitting trees and predecessors.

use std::collections::BTreeSet;

use super::region::in_cone;
use super::{CTree, GoodTree, NodeId, Region, TreeError};

/// `C(x, y, z)`: `y` and `z` are closer to each other than to `x`, i.e.
/// `inf(y, z) > inf(x, y)`.
pub fn c_relation<T: CTree>(tree: &T, x: &T::Node, y: &T::Node, z: &T::Node) -> Result<bool, TreeError> {
    for a in [x, y, z] {
        if !tree.is_leaf(a) {
            return Err(TreeError::NotALeaf(tree.describe(a)));
        }
    }
    node_c_relation(tree, x, y, z)
}

/// The same relation read on arbitrary nodes; on an antichain `A` this is the
/// C-relation of the induced C-set `M[A]`.
pub fn node_c_relation<T: CTree>(tree: &T, x: &T::Node, y: &T::Node, z: &T::Node) -> Result<bool, TreeError> {
    tree.lt(&tree.inf(x, y)?, &tree.inf(y, z)?)
}

pub fn is_antichain<T: CTree>(tree: &T, set: &[T::Node]) -> Result<bool, TreeError> {
    Ok(antichain_violation(tree, set)?.is_none())
}

pub(crate) fn antichain_violation<T: CTree>(
    tree: &T,
    set: &[T::Node],
) -> Result<Option<(T::Node, T::Node)>, TreeError> {
    for (i, a) in set.iter().enumerate() {
        for b in &set[i + 1..] {
            if tree.comparable(a, b)? {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

pub(crate) fn require_antichain<T: CTree>(tree: &T, set: &[T::Node]) -> Result<(), TreeError> {
    match antichain_violation(tree, set)? {
        Some((a, b)) => Err(TreeError::NotAntichain(tree.describe(&a), tree.describe(&b))),
        None => Ok(()),
    }
}

pub fn is_chain<T: CTree>(tree: &T, set: &[T::Node]) -> Result<bool, TreeError> {
    for (i, a) in set.iter().enumerate() {
        for b in &set[i + 1..] {
            if !tree.comparable(a, b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn push_unique<T: CTree>(tree: &T, out: &mut Vec<T::Node>, x: T::Node) -> Result<(), TreeError> {
    for y in out.iter() {
        if tree.same(y, &x)? {
            return Ok(());
        }
    }
    out.push(x);
    Ok(())
}

/// `cl_inf(A)`. In a tree this is `A` together with all pairwise infima.
pub fn inf_closure<T: CTree>(tree: &T, set: &[T::Node]) -> Result<Vec<T::Node>, TreeError> {
    if set.is_empty() {
        return Err(TreeError::EmptyInput);
    }
    let mut out = Vec::with_capacity(2 * set.len());
    for a in set {
        push_unique(tree, &mut out, a.clone())?;
    }
    let base = out.clone();
    for (i, a) in base.iter().enumerate() {
        for b in &base[i + 1..] {
            push_unique(tree, &mut out, tree.inf(a, b)?)?;
        }
    }
    Ok(out)
}

/// `A_0`: members of the antichain with an immediate predecessor in
/// `cl_inf(A)`. In a finite closure every strict lower bound chain has a
/// maximum, so this is the set of members with some strict lower bound.
pub fn predecessors_in_closure<T: CTree>(tree: &T, set: &[T::Node]) -> Result<Vec<T::Node>, TreeError> {
    require_antichain(tree, set)?;
    let closure = inf_closure(tree, set)?;
    let mut out = Vec::new();
    for a in set {
        let mut has = false;
        for b in &closure {
            if tree.lt(b, a)? {
                has = true;
                break;
            }
        }
        if has {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// `Lambda_a(alpha)`: leaves weakly above `a` outside the cone of `alpha`.
fn in_level_minus_own_cone<T: CTree>(tree: &T, a: &T::Node, alpha: &T::Node, x: &T::Node) -> Result<bool, TreeError> {
    Ok(tree.le(a, x)? && !in_cone(tree, a, alpha, x)?)
}

impl GoodTree {
    /// Induced C-set `M[A]`: universe `cl_inf(A)`, leaves exactly `A`.
    ///
    /// Ids are inherited; the virtual root keeps the id of this tree's root
    /// (if `-inf` itself lies in the closure it simply becomes the root).
    pub fn induced_c_set(&self, set: &[NodeId]) -> Result<GoodTree, TreeError> {
        require_antichain(self, set)?;
        let closure = inf_closure(self, set)?;
        let root = self.root();
        let mut nodes: BTreeSet<NodeId> = closure.iter().copied().collect();
        nodes.insert(root);
        let mut pairs = Vec::with_capacity(nodes.len());
        for &n in &nodes {
            if n == root {
                pairs.push((n, None));
                continue;
            }
            // the greatest closure element strictly below n, else the root
            let parent = self.strictly_below(n)?.into_iter().rev().find(|p| nodes.contains(p)).unwrap_or(root);
            pairs.push((n, Some(parent)));
        }
        GoodTree::new(pairs, set.iter().copied())
    }

    /// `T(D)`: inner nodes with a leaf of `D` and a leaf outside `D` above.
    pub fn splitting_tree(&self, d: &BTreeSet<NodeId>) -> Result<BTreeSet<NodeId>, TreeError> {
        let mut out = BTreeSet::new();
        for a in self.inner_nodes() {
            let above = self.leaves_above(a)?;
            let inside = above.iter().any(|x| d.contains(x));
            let outside = above.iter().any(|x| !d.contains(x));
            if inside && outside {
                out.insert(a);
            }
        }
        Ok(out)
    }

    /// Nodes `a` of `Br(alpha)` where `Lambda_a(alpha)` meets both `S` and its
    /// complement.
    pub fn splitting_nodes_on_branch(&self, s: &BTreeSet<NodeId>, alpha: NodeId) -> Result<Vec<NodeId>, TreeError> {
        let branch = self.branch(alpha)?;
        let leaves = self.leaves();
        let mut out = Vec::new();
        for a in branch {
            let (mut inside, mut outside) = (false, false);
            for x in &leaves {
                if in_level_minus_own_cone(self, &a, &alpha, x)? {
                    if s.contains(x) {
                        inside = true;
                    } else {
                        outside = true;
                    }
                }
            }
            if inside && outside {
                out.push(a);
            }
        }
        Ok(out)
    }
}

/// Region form of `Lambda_{inf(alpha, beta)}`.
pub fn level_of_inf<T: CTree>(tree: &T, alpha: &T::Node, beta: &T::Node) -> Result<Region<T::Node>, TreeError> {
    Ok(Region::level_set(tree.inf(alpha, beta)?, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::good::tests::fixture_a;

    const NEG: NodeId = NodeId(0);
    const R: NodeId = NodeId(1);
    const U: NodeId = NodeId(2);
    const W: NodeId = NodeId(3);
    const A1: NodeId = NodeId(4);
    const A2: NodeId = NodeId(5);
    const A3: NodeId = NodeId(6);
    const A4: NodeId = NodeId(7);

    fn set(v: &[NodeId]) -> BTreeSet<NodeId> {
        v.iter().copied().collect()
    }

    fn sorted(mut v: Vec<NodeId>) -> Vec<NodeId> {
        v.sort();
        v
    }

    #[test]
    fn c_relation_examples() {
        let t = fixture_a();
        assert!(c_relation(&t, &A3, &A1, &A2).unwrap());
        assert!(!c_relation(&t, &A1, &A1, &A2).unwrap());
        assert!(c_relation(&t, &A1, &A3, &A3).unwrap());
        assert!(matches!(c_relation(&t, &U, &A1, &A2), Err(TreeError::NotALeaf(_))));
    }

    #[test]
    fn chains_and_antichains() {
        let t = fixture_a();
        assert!(is_antichain(&t, &[U, W]).unwrap());
        assert!(is_chain(&t, &[R, U]).unwrap());
        assert!(!is_antichain(&t, &[R, U, W]).unwrap());
        assert!(!is_chain(&t, &[R, U, W]).unwrap());
    }

    #[test]
    fn closure_examples() {
        let t = fixture_a();
        assert_eq!(sorted(inf_closure(&t, &[A1, A3]).unwrap()), vec![R, A1, A3]);
        assert_eq!(sorted(inf_closure(&t, &[A1, A2, A3]).unwrap()), vec![R, U, A1, A2, A3]);
        assert_eq!(inf_closure(&t, &[A1]).unwrap(), vec![A1]);
        assert_eq!(inf_closure(&t, &[]), Err(TreeError::EmptyInput));
    }

    #[test]
    fn induced_examples() {
        let t = fixture_a();
        let m = t.induced_c_set(&[A1, A3]).unwrap();
        assert_eq!(m.leaves(), vec![A1, A3]);
        assert_eq!(m.inner_nodes(), vec![R]);
        let m = t.induced_c_set(&[U, W]).unwrap();
        assert_eq!(m.leaves(), vec![U, W]);
        assert_eq!(m.parent(U).unwrap(), Some(R));
        let m = t.induced_c_set(&[A2]).unwrap();
        assert_eq!(m.leaves(), vec![A2]);
        assert_eq!(m.parent(A2).unwrap(), Some(NEG));
        assert!(matches!(t.induced_c_set(&[R, U]), Err(TreeError::NotAntichain(..))));
    }

    #[test]
    fn splitting_tree_examples() {
        let t = fixture_a();
        assert_eq!(t.splitting_tree(&set(&[A1])).unwrap(), set(&[R, U]));
        assert_eq!(t.splitting_tree(&set(&[A1, A2, A3, A4])).unwrap(), set(&[]));
        assert_eq!(t.splitting_tree(&set(&[A1, A2])).unwrap(), set(&[R]));
        assert_eq!(t.splitting_tree(&set(&[])).unwrap(), set(&[]));
    }

    /// Brute force straight from the definition of `Lambda_a(alpha)` as a
    /// leaf set: leaves above `a` minus the leaves of the child toward alpha.
    fn splitting_by_enumeration(t: &GoodTree, s: &BTreeSet<NodeId>, alpha: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        for a in t.branch(alpha).unwrap() {
            let all = t.leaves_above(a).unwrap();
            let own = t.leaves_above(t.child_toward(a, alpha).unwrap()).unwrap();
            let lambda: Vec<_> = all.difference(&own).copied().collect();
            if lambda.iter().any(|x| s.contains(x)) && lambda.iter().any(|x| !s.contains(x)) {
                out.push(a);
            }
        }
        out
    }

    #[test]
    fn splitting_nodes_examples() {
        let t = fixture_a();
        let s = set(&[A1, A3]);
        assert_eq!(splitting_by_enumeration(&t, &s, A2), vec![R]);
        assert_eq!(t.splitting_nodes_on_branch(&s, A2).unwrap(), vec![R]);
        assert!(t.splitting_nodes_on_branch(&set(&[]), A1).unwrap().is_empty());
        assert!(splitting_by_enumeration(&t, &set(&[A1]), A2).is_empty());
        assert!(t.splitting_nodes_on_branch(&set(&[A1]), A2).unwrap().is_empty());
    }

    #[test]
    fn predecessor_examples() {
        let t = fixture_a();
        assert_eq!(predecessors_in_closure(&t, &[A1, A2]).unwrap(), vec![A1, A2]);
        assert!(predecessors_in_closure(&t, &[A1]).unwrap().is_empty());
        assert_eq!(predecessors_in_closure(&t, &[A1, A3]).unwrap(), vec![A1, A3]);
        assert!(predecessors_in_closure(&t, &[R, U]).is_err());
    }
}
