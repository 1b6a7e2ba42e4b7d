//! Definable subsets of `T`: t-functions on antichains, 1-cells of `T`, and
//! the decomposition of an explicit node set into disjoint 1-cells.
//!
//! Only the finite backend is covered. On a finite tree a maximal run of
//! consecutive nodes plays the role of an open interval, and a lone node is
//! an isolated point. An interval may start right above `-inf`, in which case
//! its lower bound `g(a)` is the virtual root.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::decompose::{incomparable_chain_partition, DecomposeError, LeafFn};
use crate::finite_model::{is_incomparable_chain_set, LeafMap};
use crate::tree::ops::{is_antichain, require_antichain};
use crate::tree::{CTree, GoodTree, NodeId, TreeError};

fn domain_vec(f: &LeafMap) -> Vec<NodeId> {
    f.domain().into_iter().collect()
}

/// Image an antichain, or its maximal unbranched runs forming one family of
/// incomparable chains.
pub fn is_t_function(tree: &GoodTree, f: &LeafMap) -> Result<bool, DecomposeError> {
    require_antichain(tree, &domain_vec(f))?;
    let image = f.image();
    if is_antichain(tree, &image)? {
        return Ok(true);
    }
    let runs: Vec<Vec<NodeId>> = incomparable_chain_partition(tree, &image)?.into_iter().flatten().collect();
    Ok(is_incomparable_chain_set(tree, &runs)?)
}

/// Splits the antichain `dom(f)` into parts on which `f` is a t-function, by
/// decomposing `f` inside the induced C-set and merging greedily.
pub fn t_decompose(tree: &GoodTree, f: &LeafMap) -> Result<Vec<BTreeSet<NodeId>>, DecomposeError> {
    if f.is_empty() {
        return Ok(Vec::new());
    }
    let m = tree.induced_c_set(&domain_vec(f))?;
    let d = LeafFn::induced(&m, tree, f).decompose()?;
    let mut parts: Vec<BTreeSet<NodeId>> =
        d.cells.into_iter().map(|c| c.points.expect("finite cells list their points").into_iter().collect()).collect();
    let mut i = 0;
    while i < parts.len() {
        let mut j = i + 1;
        while j < parts.len() {
            let union: BTreeSet<NodeId> = parts[i].union(&parts[j]).copied().collect();
            if is_t_function(tree, &f.restrict(&union))? {
                parts[i] = union;
                parts.remove(j);
                j = i + 1;
            } else {
                j += 1;
            }
        }
        i += 1;
    }
    Ok(parts)
}

/// For `f` with `f(a) < a` on an antichain: the points with no nontrivial
/// cone of constancy in `M[A]`.
pub fn descending_locally_constant(tree: &GoodTree, f: &LeafMap) -> Result<BTreeSet<NodeId>, DecomposeError> {
    require_antichain(tree, &domain_vec(f))?;
    for (&a, &v) in &f.0 {
        if !tree.lt(&v, &a)? {
            return Err(DecomposeError::NotDescending { witness: a.to_string() });
        }
    }
    if f.is_empty() {
        return Ok(BTreeSet::new());
    }
    let m = tree.induced_c_set(&domain_vec(f))?;
    LeafFn::induced(&m, tree, f).exceptional_points()
}

fn require_inner(tree: &GoodTree, x: &BTreeSet<NodeId>) -> Result<(), TreeError> {
    for &t in x {
        if tree.is_leaf_id(t)? || t == tree.root() {
            return Err(TreeError::LeafArgument(t.to_string()));
        }
    }
    Ok(())
}

/// Nodes above some element of `X` and above every element of `X` they are
/// comparable with, minimal for that property.
pub fn minimal_upper_antichain(tree: &GoodTree, x: &BTreeSet<NodeId>) -> Result<Vec<NodeId>, TreeError> {
    require_inner(tree, x)?;
    // upward closed along every branch, so minimal means the parent fails
    let upper = |a: NodeId| -> Result<bool, TreeError> {
        if x.contains(&a) || a == tree.root() {
            return Ok(false);
        }
        let below = tree.strictly_below(a)?.iter().any(|t| x.contains(t));
        Ok(below && tree.subtree(a)?.is_disjoint(x))
    };
    let mut out = Vec::new();
    for a in tree.nodes() {
        if upper(a)? && !upper(tree.parent(a)?.expect("non-root"))? {
            out.push(a);
        }
    }
    Ok(out)
}

/// `Y_a = {t ∈ X : t < a}` along the branch below `a`, bottom-up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSlice {
    /// Maximal runs of at least two nodes, as `(lowest, highest)`.
    pub intervals: Vec<(NodeId, NodeId)>,
    pub points: Vec<NodeId>,
    /// The order of runs, bottom-up.
    pub profile: Vec<SliceItem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceItem {
    Interval,
    Point,
}

fn runs_below(tree: &GoodTree, keep: impl Fn(NodeId) -> bool, a: NodeId) -> Result<Vec<(NodeId, NodeId)>, TreeError> {
    let mut runs: Vec<(NodeId, NodeId)> = Vec::new();
    let mut open = false;
    for t in tree.strictly_below(a)? {
        if keep(t) {
            match runs.last_mut() {
                Some(run) if open => run.1 = t,
                _ => runs.push((t, t)),
            }
            open = true;
        } else {
            open = false;
        }
    }
    Ok(runs)
}

fn slice_of(runs: &[(NodeId, NodeId)]) -> BranchSlice {
    let mut s = BranchSlice { intervals: Vec::new(), points: Vec::new(), profile: Vec::new() };
    for &(lo, hi) in runs {
        if lo == hi {
            s.points.push(lo);
            s.profile.push(SliceItem::Point);
        } else {
            s.intervals.push((lo, hi));
            s.profile.push(SliceItem::Interval);
        }
    }
    s
}

pub fn branch_slice(tree: &GoodTree, x: &BTreeSet<NodeId>, a: NodeId) -> Result<BranchSlice, DecomposeError> {
    if !minimal_upper_antichain(tree, x)?.contains(&a) {
        return Err(DecomposeError::InvalidInput(format!("{a} is not in the upper antichain of X")));
    }
    Ok(slice_of(&runs_below(tree, |t| x.contains(&t), a)?))
}

/// A 1-cell of `T`. Functions are listed as `[a, value]` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TCell {
    /// `{h(a) : a ∈ A}`.
    PointFamily { antichain: Vec<NodeId>, h: Vec<(NodeId, NodeId)> },
    /// `{t : g(a) < t < f(a), a ∈ A}`.
    IntervalFamily { antichain: Vec<NodeId>, g: Vec<(NodeId, NodeId)>, f: Vec<(NodeId, NodeId)> },
}

fn as_map(pairs: &[(NodeId, NodeId)]) -> LeafMap {
    pairs.iter().copied().collect()
}

impl TCell {
    pub fn antichain(&self) -> &[NodeId] {
        match self {
            TCell::PointFamily { antichain, .. } | TCell::IntervalFamily { antichain, .. } => antichain,
        }
    }

    /// The nodes of the cell.
    pub fn extension(&self, tree: &GoodTree) -> Result<BTreeSet<NodeId>, TreeError> {
        let mut out = BTreeSet::new();
        match self {
            TCell::PointFamily { h, .. } => out.extend(h.iter().map(|p| p.1)),
            TCell::IntervalFamily { g, f, .. } => {
                let g = as_map(g);
                for &(a, top) in f {
                    let bottom = g.get(a).ok_or(TreeError::UnknownNode(a))?;
                    for t in tree.strictly_below(top)? {
                        if tree.lt(&bottom, &t)? {
                            out.insert(t);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `A` an antichain, `g < f` pointwise, and every function a t-function.
    pub fn check(&self, tree: &GoodTree) -> Result<(), String> {
        let fail = |e: DecomposeError| e.to_string();
        let a = self.antichain();
        if !is_antichain(tree, a).map_err(|e| e.to_string())? {
            return Err("domain is not an antichain".into());
        }
        let funcs: Vec<(&str, &[(NodeId, NodeId)])> = match self {
            TCell::PointFamily { h, .. } => vec![("h", h)],
            TCell::IntervalFamily { g, f, .. } => vec![("g", g), ("f", f)],
        };
        for (name, pairs) in &funcs {
            let m = as_map(pairs);
            if m.domain() != a.iter().copied().collect() {
                return Err(format!("{name} is not defined exactly on the antichain"));
            }
            if !is_t_function(tree, &m).map_err(fail)? {
                return Err(format!("{name} is not a t-function"));
            }
        }
        if let TCell::IntervalFamily { g, f, .. } = self {
            let g = as_map(g);
            for &(x, top) in f {
                let bottom = g.get(x).expect("same domain");
                if !tree.lt(&bottom, &top).map_err(|e| e.to_string())? {
                    return Err(format!("g({x}) < f({x}) fails"));
                }
            }
        }
        Ok(())
    }
}

/// Refines `dom` until `phi` restricted to each part is a t-function.
fn refine_for(tree: &GoodTree, phi: &LeafMap, dom: &BTreeSet<NodeId>) -> Result<Vec<BTreeSet<NodeId>>, DecomposeError> {
    let f = phi.restrict(dom);
    if is_t_function(tree, &f)? {
        return Ok(vec![dom.clone()]);
    }
    let (fixed, moving): (BTreeSet<NodeId>, BTreeSet<NodeId>) = dom.iter().partition(|&&a| f.get(a) == Some(a));
    let mut out = Vec::new();
    if !fixed.is_empty() {
        // the identity has an antichain image
        out.push(fixed);
    }
    let g = f.restrict(&moving);
    let exceptional = descending_locally_constant(tree, &g)?;
    out.extend(exceptional.iter().map(|&a| BTreeSet::from([a])));
    let rest: BTreeSet<NodeId> = moving.difference(&exceptional).copied().collect();
    match t_decompose(tree, &g.restrict(&rest)) {
        Ok(parts) => out.extend(parts),
        Err(DecomposeError::NotLocallyConstant { .. }) => out.extend(rest.iter().map(|&a| BTreeSet::from([a]))),
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Parts of `dom` on which every function in `funcs` is a t-function.
fn refine_all(
    tree: &GoodTree,
    funcs: &[&LeafMap],
    dom: &BTreeSet<NodeId>,
) -> Result<Vec<BTreeSet<NodeId>>, DecomposeError> {
    let mut parts = vec![dom.clone()];
    for phi in funcs {
        let mut next = Vec::new();
        for p in &parts {
            next.extend(refine_for(tree, phi, p)?);
        }
        parts = next;
    }
    // restricting a t-function can break it; fall back to single points
    let mut out = Vec::new();
    for p in parts {
        let mut ok = true;
        for phi in funcs {
            ok &= is_t_function(tree, &phi.restrict(&p))?;
        }
        if ok {
            out.push(p);
        } else {
            out.extend(p.into_iter().map(|a| BTreeSet::from([a])));
        }
    }
    Ok(out)
}

/// Slice profile of an owned run list: the order of intervals and points,
/// and whether the top run reaches the parent of `a`.
type ProfileKey = (Vec<SliceItem>, bool);

/// Decomposes a finite set of inner nodes into pairwise disjoint 1-cells.
///
/// Each node of `X` is assigned to the least `a` (by id) of the upper
/// antichain above it, which makes the cells of different classes disjoint.
pub fn decompose_t_subset(tree: &GoodTree, x: &BTreeSet<NodeId>) -> Result<Vec<TCell>, DecomposeError> {
    let upper = minimal_upper_antichain(tree, x)?;
    let mut owner: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for &a in &upper {
        for t in tree.strictly_below(a)? {
            if x.contains(&t) {
                let o = owner.entry(t).or_insert(a);
                *o = (*o).min(a);
            }
        }
    }
    let missing: Vec<&NodeId> = x.iter().filter(|t| !owner.contains_key(t)).collect();
    assert!(missing.is_empty(), "every inner node has a leaf above it");

    let mut classes: BTreeMap<ProfileKey, Vec<(NodeId, Vec<(NodeId, NodeId)>)>> = BTreeMap::new();
    for &a in &upper {
        let runs = runs_below(tree, |t| owner.get(&t) == Some(&a), a)?;
        if runs.is_empty() {
            continue;
        }
        let touches = runs.last().map(|r| r.1) == tree.parent(a)?;
        let key = (slice_of(&runs).profile, touches);
        classes.entry(key).or_default().push((a, runs));
    }

    let mut cells = Vec::new();
    for ((profile, _), members) in classes {
        let dom: BTreeSet<NodeId> = members.iter().map(|m| m.0).collect();
        for (i, item) in profile.iter().enumerate() {
            match item {
                SliceItem::Point => {
                    let h: LeafMap = members.iter().map(|(a, runs)| (*a, runs[i].0)).collect();
                    for part in refine_all(tree, &[&h], &dom)? {
                        cells.push(TCell::PointFamily {
                            antichain: part.iter().copied().collect(),
                            h: h.restrict(&part).0.into_iter().collect(),
                        });
                    }
                }
                SliceItem::Interval => {
                    let mut g = LeafMap::default();
                    let mut f = LeafMap::default();
                    for (a, runs) in &members {
                        let (lo, hi) = runs[i];
                        g.0.insert(*a, tree.parent(lo)?.expect("inner nodes have a parent"));
                        f.0.insert(*a, if tree.parent(*a)? == Some(hi) { *a } else { tree.child_toward(hi, *a)? });
                    }
                    for part in refine_all(tree, &[&g, &f], &dom)? {
                        cells.push(TCell::IntervalFamily {
                            antichain: part.iter().copied().collect(),
                            g: g.restrict(&part).0.into_iter().collect(),
                            f: f.restrict(&part).0.into_iter().collect(),
                        });
                    }
                }
            }
        }
    }
    Ok(cells)
}
