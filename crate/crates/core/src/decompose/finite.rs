//! The finite backend: everything is decided exactly on explicit leaf maps.
//!
//! A point is locally constant when `f` is constant on a cone of at least
//! two points around it. The cone made of the point alone always qualifies
//! and carries no information, so it is not counted.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use super::{antichain_strata, Cell, DecomposeError, DecompositionResult, FiberShape, FiniteDecomposition, ShapeKey};
use crate::finite_model::{canonical_form, image_tag, is_c_isomorphism, is_incomparable_chain_set, Labels, LeafMap};
use crate::tree::ops::{is_antichain, is_chain};
use crate::tree::{CTree, GoodTree, NodeId, Region, TreeError};

/// A leaf set together with its cover by maximal cones.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LeafSet {
    pub regions: Vec<Region<NodeId>>,
    pub points: Vec<NodeId>,
}

impl LeafSet {
    pub fn new(tree: &GoodTree, points: &BTreeSet<NodeId>) -> Result<Self, TreeError> {
        Ok(LeafSet { regions: cover_by_cones(tree, points)?, points: points.iter().copied().collect() })
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One row of a node-to-node table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub node: NodeId,
    pub value: NodeId,
}

fn table_of(m: &BTreeMap<NodeId, NodeId>) -> Vec<TableEntry> {
    m.iter().map(|(&node, &value)| TableEntry { node, value }).collect()
}

fn lookup(table: &[TableEntry], node: NodeId) -> Option<NodeId> {
    table.iter().find(|e| e.node == node).map(|e| e.value)
}

/// Region form of the leaves above one node.
fn region_of(tree: &GoodTree, n: NodeId) -> Result<Region<NodeId>, TreeError> {
    if n == tree.root() {
        return Ok(Region::Whole);
    }
    if tree.is_leaf_id(n)? {
        return Ok(Region::Point { at: n });
    }
    let p = tree.parent(n)?.expect("non-root node has a parent");
    Ok(Region::cone(p, n))
}

/// The maximal cones inside `set`, each as a region (single leaves become
/// points, everything becomes `Whole`).
pub fn cover_by_cones(tree: &GoodTree, set: &BTreeSet<NodeId>) -> Result<Vec<Region<NodeId>>, TreeError> {
    for &x in set {
        if !tree.is_leaf_id(x)? {
            return Err(TreeError::NotALeaf(x.to_string()));
        }
    }
    // (some leaf inside, every leaf inside)
    fn status(
        tree: &GoodTree,
        n: NodeId,
        set: &BTreeSet<NodeId>,
        memo: &mut BTreeMap<NodeId, (bool, bool)>,
    ) -> Result<(bool, bool), TreeError> {
        let r = if tree.is_leaf_id(n)? {
            let inside = set.contains(&n);
            (inside, inside)
        } else {
            let (mut any, mut all) = (false, true);
            for c in tree.children(n)? {
                let (a, b) = status(tree, c, set, memo)?;
                any |= a;
                all &= b;
            }
            (any, any && all)
        };
        memo.insert(n, r);
        Ok(r)
    }
    let mut memo = BTreeMap::new();
    status(tree, tree.root(), set, &mut memo)?;
    let mut out = Vec::new();
    let mut stack = vec![tree.root()];
    while let Some(n) = stack.pop() {
        match memo[&n] {
            (_, true) => out.push(region_of(tree, n)?),
            (true, false) => stack.extend(tree.children(n)?.into_iter().rev()),
            (false, _) => {}
        }
    }
    Ok(out)
}

/// Greatest element of `s` strictly below `x`.
fn s_parent(tree: &GoodTree, s: &BTreeSet<NodeId>, x: NodeId) -> Result<Option<NodeId>, TreeError> {
    Ok(tree.strictly_below(x)?.into_iter().rev().find(|p| s.contains(p)))
}

/// A minimum chain cover of a finite node set: one chain per maximal element,
/// obtained by walking down through unclaimed predecessors. Chains are listed
/// bottom-up.
pub fn chain_cover(tree: &GoodTree, s: &[NodeId]) -> Result<Vec<Vec<NodeId>>, TreeError> {
    let set: BTreeSet<NodeId> = s.iter().copied().collect();
    let mut below_something = BTreeSet::new();
    for &x in &set {
        for p in tree.strictly_below(x)? {
            if set.contains(&p) {
                below_something.insert(p);
            }
        }
    }
    let mut claimed = BTreeSet::new();
    let mut out = Vec::new();
    for &m in set.difference(&below_something) {
        let mut chain = vec![m];
        claimed.insert(m);
        let mut cur = m;
        while let Some(p) = s_parent(tree, &set, cur)? {
            if !claimed.insert(p) {
                break;
            }
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        out.push(chain);
    }
    Ok(out)
}

/// Groups chains into families of incomparable chains. Chains are keyed by
/// the canonical form of the tree with the whole set and the chain itself
/// marked, so C-indistinguishable chains share a key; a key group that fails
/// the family conditions is split into singletons. Families come out in key
/// order.
pub fn group_chains(tree: &GoodTree, chains: &[Vec<NodeId>]) -> Result<Vec<Vec<Vec<NodeId>>>, DecomposeError> {
    let all: BTreeSet<NodeId> = chains.iter().flatten().copied().collect();
    let mut by_key: BTreeMap<_, Vec<Vec<NodeId>>> = BTreeMap::new();
    for c in chains {
        let mut labels: Labels = all.iter().map(|&n| (n, "s".to_string())).collect();
        for &n in c {
            labels.insert(n, "c".to_string());
        }
        by_key.entry(canonical_form(tree, Some(&labels))).or_default().push(c.clone());
    }
    let mut out = Vec::new();
    for (_, fam) in by_key {
        if fam.len() == 1 || is_incomparable_chain_set(tree, &fam)? {
            out.push(fam);
        } else {
            out.extend(fam.into_iter().map(|c| vec![c]));
        }
    }
    Ok(out)
}

/// Splits `s` into maximal unbranched runs (a node joins the run of its
/// predecessor in `s` when it is that predecessor's only successor) and
/// groups the runs into families of incomparable chains.
pub fn incomparable_chain_partition(tree: &GoodTree, s: &[NodeId]) -> Result<Vec<Vec<Vec<NodeId>>>, DecomposeError> {
    let set: BTreeSet<NodeId> = s.iter().copied().collect();
    let mut parent = BTreeMap::new();
    let mut kids: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &x in &set {
        let p = s_parent(tree, &set, x)?;
        parent.insert(x, p);
        if let Some(p) = p {
            kids.entry(p).or_default().push(x);
        }
    }
    let only_child = |p: NodeId| kids.get(&p).filter(|k| k.len() == 1).map(|k| k[0]);
    let mut runs = Vec::new();
    for &x in &set {
        let head = match parent[&x] {
            Some(p) => only_child(p).is_none(),
            None => true,
        };
        if head {
            let mut run = vec![x];
            let mut cur = x;
            while let Some(c) = only_child(cur) {
                run.push(c);
                cur = c;
            }
            runs.push(run);
        }
    }
    group_chains(tree, &runs)
}

/// Output of [`LeafFn::monotonicity_split`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicitySplit {
    pub locally_constant: LeafSet,
    pub c_isomorphism: LeafSet,
    pub finite: LeafSet,
}

/// One piece of a factoring through a branch: on `domain`,
/// `f(x) = table(inf(x, Br(delta)))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPiece {
    pub domain: LeafSet,
    pub delta: NodeId,
    pub table: Vec<TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchFactoring {
    pub pieces: Vec<BranchPiece>,
    pub residual: LeafSet,
    pub residual_image: Vec<NodeId>,
}

/// `f(x) = table(cone of x at base)` on `Lambda_base` minus the residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeMap {
    pub base: NodeId,
    pub table: Vec<TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeFactoring {
    pub bases: Vec<NodeId>,
    pub maps: Vec<ConeMap>,
    pub residual: LeafSet,
    pub residual_image: Vec<NodeId>,
}

/// A leaf map read with its domain points in `space` and its values in
/// `target`. The two coincide except inside induced C-sets.
#[derive(Clone, Copy, Debug)]
pub struct LeafFn<'a> {
    pub space: &'a GoodTree,
    pub target: &'a GoodTree,
    pub map: &'a LeafMap,
}

impl<'a> LeafFn<'a> {
    pub fn new(tree: &'a GoodTree, map: &'a LeafMap) -> Self {
        LeafFn { space: tree, target: tree, map }
    }

    pub fn induced(space: &'a GoodTree, target: &'a GoodTree, map: &'a LeafMap) -> Self {
        LeafFn { space, target, map }
    }

    pub fn value(&self, x: NodeId) -> Result<NodeId, DecomposeError> {
        self.map.get(x).ok_or_else(|| DecomposeError::OutsideDomain(format!("leaf {x} is not in the domain")))
    }

    fn check_domain(&self) -> Result<(), DecomposeError> {
        for (&x, &v) in &self.map.0 {
            if !self.space.is_leaf_id(x)? {
                return Err(TreeError::NotALeaf(x.to_string()).into());
            }
            if !self.target.contains(v) {
                return Err(DecomposeError::InvalidInput(format!("value {v} of leaf {x} is not a node")));
            }
        }
        Ok(())
    }

    /// `Gamma_a(x) ⊆ dom(f)` and `f` takes only the value `v` on it.
    fn constant_on(&self, cone: &BTreeSet<NodeId>, v: NodeId) -> bool {
        cone.iter().all(|&y| self.map.get(y) == Some(v))
    }

    /// `(g(alpha), Gamma_{g(alpha)}(alpha))`.
    fn constancy(&self, alpha: NodeId) -> Result<(NodeId, BTreeSet<NodeId>), DecomposeError> {
        let v = self.value(alpha)?;
        for a in self.space.branch(alpha)? {
            let cone = self.space.leaves_above(self.space.child_toward(a, alpha)?)?;
            if self.constant_on(&cone, v) {
                return Ok((a, cone));
            }
        }
        Err(TreeError::InvalidTree(format!("leaf {alpha} has nothing below it")).into())
    }

    /// `g(alpha)`: the least node of `Br(alpha)` whose cone toward `alpha` lies
    /// in the domain with `f` constant on it.
    pub fn constancy_basis(&self, alpha: NodeId) -> Result<NodeId, DecomposeError> {
        Ok(self.constancy(alpha)?.0)
    }

    pub fn is_locally_constant_at(&self, alpha: NodeId) -> Result<bool, DecomposeError> {
        Ok(self.constancy(alpha)?.1.len() >= 2)
    }

    /// Points of the domain with no cone of constancy beyond themselves.
    pub fn exceptional_points(&self) -> Result<BTreeSet<NodeId>, DecomposeError> {
        let mut out = BTreeSet::new();
        for x in self.map.domain() {
            if !self.is_locally_constant_at(x)? {
                out.insert(x);
            }
        }
        Ok(out)
    }

    fn shape_at(&self, alpha: NodeId, g: NodeId) -> Result<FiberShape<NodeId>, DecomposeError> {
        let v = self.value(alpha)?;
        let (mut inside, mut outside) = (Vec::new(), Vec::new());
        for c in self.space.children(g)? {
            if self.constant_on(&self.space.leaves_above(c)?, v) {
                inside.push(c);
            } else {
                outside.push(c);
            }
        }
        Ok(if outside.len() < inside.len() {
            FiberShape::LevelSet { basis: g, removed: outside }
        } else {
            FiberShape::UnionOfCones { basis: g, witnesses: inside }
        })
    }

    /// The fiber of `alpha` at `g(alpha)`: `r` whole cones of the fiber and
    /// `m` other cones give an `m`-level set when `m < r`, else the union of
    /// the `r` cones.
    pub fn fiber_shape(&self, alpha: NodeId) -> Result<FiberShape<NodeId>, DecomposeError> {
        let g = self.constancy_basis(alpha)?;
        self.shape_at(alpha, g)
    }

    /// Strict decomposition: every point must be locally constant.
    pub fn decompose(&self) -> Result<FiniteDecomposition, DecomposeError> {
        let d = self.decompose_with_exceptional()?;
        if let Some(x) = d.exceptional.first() {
            return Err(DecomposeError::NotLocallyConstant { witness: x.to_string() });
        }
        Ok(d)
    }

    /// Decomposition of the locally constant part; the other points are
    /// returned as `exceptional`.
    pub fn decompose_with_exceptional(&self) -> Result<FiniteDecomposition, DecomposeError> {
        self.check_domain()?;
        let mut exceptional = Vec::new();
        let mut groups: BTreeMap<ShapeKey, Vec<NodeId>> = BTreeMap::new();
        for alpha in self.map.domain() {
            let (g, cone) = self.constancy(alpha)?;
            if cone.len() < 2 {
                exceptional.push(alpha);
                continue;
            }
            groups.entry(self.shape_at(alpha, g)?.key()).or_default().push(alpha);
        }
        let mut blocks: Vec<BTreeSet<NodeId>> = Vec::new();
        let mut params = BTreeSet::new();
        let pull = |pts: &[NodeId], vals: &[NodeId]| -> BTreeSet<NodeId> {
            pts.iter().copied().filter(|&x| self.map.get(x).is_some_and(|v| vals.contains(&v))).collect()
        };
        for pts in groups.values() {
            let image = self.map.image_of(pts);
            if image_tag(self.target, &image)?.is_some() {
                blocks.push(pts.iter().copied().collect());
                continue;
            }
            let strata = antichain_strata(self.target, &image)?;
            let chains = chain_cover(self.target, &image)?;
            if strata.len() <= chains.len() {
                blocks.extend(strata.iter().map(|layer| pull(pts, layer)));
            } else {
                for fam in group_chains(self.target, &chains)? {
                    if fam.len() >= 2 {
                        // choosing one chain of the family needs its top as a parameter
                        params.extend(fam.iter().map(|c| *c.last().expect("non-empty chain")));
                    }
                    blocks.extend(fam.iter().map(|c| pull(pts, c)));
                }
            }
        }
        let mut cells = Vec::new();
        for (points, image) in self.merge_blocks(blocks)? {
            let tag = image_tag(self.target, &image)?.expect("merged blocks keep a tag");
            cells.push(Cell {
                parts: cover_by_cones(self.space, &points)?,
                tag,
                points: Some(points.into_iter().collect()),
                image: Some(image),
            });
        }
        Ok(DecompositionResult { cells, exceptional, added_parameters: params.into_iter().collect() })
    }

    /// Greedily merges blocks whose union still has an antichain or chain
    /// image.
    #[allow(clippy::type_complexity)]
    fn merge_blocks(
        &self,
        blocks: Vec<BTreeSet<NodeId>>,
    ) -> Result<Vec<(BTreeSet<NodeId>, Vec<NodeId>)>, DecomposeError> {
        let mut cells: Vec<(BTreeSet<NodeId>, Vec<NodeId>)> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|b| {
                let im = self.map.image_of(&b);
                (b, im)
            })
            .collect();
        let mut i = 0;
        while i < cells.len() {
            let mut j = i + 1;
            while j < cells.len() {
                let union: BTreeSet<NodeId> = cells[i].1.iter().chain(&cells[j].1).copied().collect();
                let union: Vec<NodeId> = union.into_iter().collect();
                if image_tag(self.target, &union)?.is_some() {
                    let (pts, _) = cells.remove(j);
                    cells[i].0.extend(pts);
                    cells[i].1 = union;
                    j = i + 1;
                } else {
                    j += 1;
                }
            }
            i += 1;
        }
        Ok(cells)
    }

    /// Splits the domain into the locally constant points, points lying in a
    /// cone on which `f` is a C-isomorphism onto an antichain, and the rest.
    pub fn monotonicity_split(&self) -> Result<MonotonicitySplit, DecomposeError> {
        if self.space != self.target {
            return Err(DecomposeError::InvalidInput("monotonicity split needs one tree".into()));
        }
        self.check_domain()?;
        let dom = self.map.domain();
        let exc = self.exceptional_points()?;
        let lc: BTreeSet<NodeId> = dom.difference(&exc).copied().collect();
        let mut iso = BTreeSet::new();
        for &alpha in &exc {
            if iso.contains(&alpha) {
                continue;
            }
            for a in self.space.branch(alpha)? {
                let cone = self.space.leaves_above(self.space.child_toward(a, alpha)?)?;
                if cone.len() < 2 || !cone.is_subset(&dom) {
                    continue;
                }
                let image = self.map.image_of(&cone);
                if image.len() < cone.len() || !is_antichain(self.target, &image)? {
                    continue;
                }
                if is_c_isomorphism(self.space, self.map, &Region::cone(a, alpha))? {
                    iso.extend(cone);
                    break;
                }
            }
        }
        let rest: BTreeSet<NodeId> = exc.difference(&iso).copied().collect();
        Ok(MonotonicitySplit {
            locally_constant: LeafSet::new(self.space, &lc)?,
            c_isomorphism: LeafSet::new(self.space, &iso)?,
            finite: LeafSet::new(self.space, &rest)?,
        })
    }

    fn require_chain_image(&self, chain: Option<&[NodeId]>) -> Result<(), DecomposeError> {
        let image = self.map.image();
        let within = match chain {
            Some(c) => {
                if let Some(v) = image.iter().find(|v| !c.contains(v)) {
                    return Err(DecomposeError::ImageNotChain { witness: v.to_string() });
                }
                c.to_vec()
            }
            None => image,
        };
        if !is_chain(self.target, &within)? {
            let pair = incomparable_pair(self.target, &within)?;
            return Err(DecomposeError::ImageNotChain { witness: format!("{} and {}", pair.0, pair.1) });
        }
        Ok(())
    }

    /// `inf(x, Br(delta))`: the greatest node of the branch of `delta` below
    /// `x`.
    pub fn inf_with_branch(&self, x: NodeId, delta: NodeId) -> Result<NodeId, TreeError> {
        if x == delta {
            Ok(self.space.parent(delta)?.expect("a leaf has a parent"))
        } else {
            self.space.inf_id(x, delta)
        }
    }

    /// Writes `f` as `f(x) = f_i(inf(x, B_i))` on pieces `D_i`, each `B_i` the
    /// branch of a leaf, plus a residual. The image must lie in `chain` (or
    /// be a chain when none is given).
    pub fn factor_through_branch(&self, chain: Option<&[NodeId]>) -> Result<BranchFactoring, DecomposeError> {
        self.check_domain()?;
        self.require_chain_image(chain)?;
        let mut residual = self.exceptional_points()?;
        let mut remaining: BTreeSet<NodeId> = self.map.domain().difference(&residual).copied().collect();
        let leaves = self.space.leaves();
        let mut pieces = Vec::new();
        while !remaining.is_empty() {
            let mut best: Option<(NodeId, BTreeSet<NodeId>, BTreeMap<NodeId, NodeId>)> = None;
            for &delta in &leaves {
                let mut table = BTreeMap::new();
                let mut accepted = BTreeSet::new();
                for &x in &remaining {
                    let c = self.inf_with_branch(x, delta)?;
                    let v = self.value(x)?;
                    if *table.entry(c).or_insert(v) == v {
                        accepted.insert(x);
                    }
                }
                let distinct: BTreeSet<&NodeId> = table.values().collect();
                if distinct.len() < 2 {
                    continue;
                }
                if best.as_ref().is_none_or(|b| accepted.len() > b.1.len()) {
                    best = Some((delta, accepted, table));
                }
            }
            let Some((delta, accepted, table)) = best else {
                break;
            };
            // keep only the rows that some accepted point uses
            let mut used = BTreeMap::new();
            for &x in &accepted {
                let c = self.inf_with_branch(x, delta)?;
                used.insert(c, table[&c]);
            }
            if used.values().collect::<BTreeSet<_>>().len() < 2 {
                break;
            }
            remaining.retain(|x| !accepted.contains(x));
            pieces.push(BranchPiece { domain: LeafSet::new(self.space, &accepted)?, delta, table: table_of(&used) });
        }
        residual.extend(remaining);
        Ok(BranchFactoring {
            pieces,
            residual_image: self.map.image_of(&residual),
            residual: LeafSet::new(self.space, &residual)?,
        })
    }

    /// Evaluates a branch piece at `x`.
    pub fn eval_branch_piece(&self, piece: &BranchPiece, x: NodeId) -> Result<Option<NodeId>, TreeError> {
        Ok(lookup(&piece.table, self.inf_with_branch(x, piece.delta)?))
    }

    fn require_cone_values(&self, a: NodeId) -> Result<(), DecomposeError> {
        for &v in self.map.0.values() {
            if self.target.parent(v)? != Some(a) {
                return Err(DecomposeError::ImageNotInCones { witness: v.to_string() });
            }
        }
        Ok(())
    }

    /// For `f` with values among the cones at `a` (each cone named by the
    /// child of `a` it contains): the points with no nontrivial cone of
    /// constancy.
    pub fn cofinite_locally_constant_check(&self, a: NodeId) -> Result<BTreeSet<NodeId>, DecomposeError> {
        self.check_domain()?;
        self.require_cone_values(a)?;
        self.exceptional_points()
    }

    /// Factors a cone-valued `f` through the cones at an antichain of bases:
    /// `f(x) = f_b(cone of x at b)` for `x` in `Lambda_b` outside the
    /// residual.
    pub fn factor_through_cones(&self, a: NodeId) -> Result<ConeFactoring, DecomposeError> {
        let mut residual = self.cofinite_locally_constant_check(a)?;
        let mut g = BTreeMap::new();
        for x in self.map.domain() {
            if !residual.contains(&x) {
                g.insert(x, self.constancy_basis(x)?);
            }
        }
        let gs: BTreeSet<NodeId> = g.values().copied().collect();
        let mut minimal = Vec::new();
        for &b in &gs {
            let mut is_min = true;
            for &c in &gs {
                if c != b && self.space.le_id(c, b)? {
                    is_min = false;
                    break;
                }
            }
            if is_min {
                minimal.push(b);
            }
        }
        let mut maps = Vec::new();
        for &b in &minimal {
            let mut by_cone: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
            for &x in g.keys() {
                if self.space.le_id(b, x)? {
                    by_cone.entry(self.space.child_toward(b, x)?).or_default().push(x);
                }
            }
            let mut table = BTreeMap::new();
            let mut dropped = Vec::new();
            for (c, pts) in by_cone {
                let vals = self.map.image_of(&pts);
                if vals.len() == 1 {
                    table.insert(c, vals[0]);
                } else {
                    dropped.extend(pts);
                }
            }
            if table.values().collect::<BTreeSet<_>>().len() >= 2 {
                residual.extend(dropped);
                maps.push(ConeMap { base: b, table: table_of(&table) });
            } else {
                residual.extend(g.keys().copied().filter(|&x| self.space.le_id(b, x).unwrap_or(false)));
            }
        }
        Ok(ConeFactoring {
            bases: maps.iter().map(|m| m.base).collect(),
            maps,
            residual_image: self.map.image_of(&residual),
            residual: LeafSet::new(self.space, &residual)?,
        })
    }

    /// Evaluates the cone factoring at `x`; `None` when no base is below `x`.
    pub fn eval_cone_factoring(&self, cf: &ConeFactoring, x: NodeId) -> Result<Option<NodeId>, TreeError> {
        for m in &cf.maps {
            if self.space.le_id(m.base, x)? && m.base != x {
                return Ok(lookup(&m.table, self.space.child_toward(m.base, x)?));
            }
        }
        Ok(None)
    }
}

/// Some incomparable pair of a set that is not a chain.
fn incomparable_pair(tree: &GoodTree, s: &[NodeId]) -> Result<(NodeId, NodeId), TreeError> {
    for (i, &a) in s.iter().enumerate() {
        for &b in &s[i + 1..] {
            if !tree.comparable(&a, &b)? {
                return Ok((a, b));
            }
        }
    }
    Err(TreeError::InvalidRegion("set is a chain".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_model::{fixture_a, CellTag};

    const NEG: NodeId = NodeId(0);
    const R: NodeId = NodeId(1);
    const U: NodeId = NodeId(2);
    const W: NodeId = NodeId(3);
    const A1: NodeId = NodeId(4);
    const A2: NodeId = NodeId(5);
    const A3: NodeId = NodeId(6);
    const A4: NodeId = NodeId(7);

    fn map(v: &[(NodeId, NodeId)]) -> LeafMap {
        v.iter().copied().collect()
    }

    fn parent_map() -> LeafMap {
        map(&[(A1, U), (A2, U), (A3, W), (A4, W)])
    }

    /// `r < u < v`; `p` (leaves 10, 11) under `r`, `q` (12, 13) under `u`,
    /// leaves 14, 15 on `v`.
    pub(crate) fn ladder() -> GoodTree {
        let n = NodeId;
        let parents = [
            (0, None),
            (1, Some(0)),
            (2, Some(1)),
            (3, Some(2)),
            (4, Some(1)),
            (5, Some(2)),
            (10, Some(4)),
            (11, Some(4)),
            (12, Some(5)),
            (13, Some(5)),
            (14, Some(3)),
            (15, Some(3)),
        ];
        GoodTree::new(parents.map(|(i, p)| (n(i), p.map(n))), [10, 11, 12, 13, 14, 15].map(n)).unwrap()
    }

    #[test]
    fn constancy_basis_examples() {
        let t = fixture_a();
        let m = parent_map();
        let f = LeafFn::new(&t, &m);
        assert_eq!(f.constancy_basis(A1).unwrap(), R);
        let c = map(&[(A1, U), (A2, U), (A3, U), (A4, U)]);
        assert_eq!(LeafFn::new(&t, &c).constancy_basis(A3).unwrap(), NEG);
        assert!(f.constancy_basis(R).is_err());
    }

    #[test]
    fn fiber_shape_examples() {
        let t = fixture_a();
        let m = parent_map();
        assert_eq!(
            LeafFn::new(&t, &m).fiber_shape(A1).unwrap(),
            FiberShape::UnionOfCones { basis: R, witnesses: vec![U] }
        );
        let c = map(&[(A1, U), (A2, U), (A3, U), (A4, U)]);
        assert_eq!(LeafFn::new(&t, &c).fiber_shape(A1).unwrap(), FiberShape::LevelSet { basis: NEG, removed: vec![] });
    }

    #[test]
    fn chain_partition_examples() {
        let t = fixture_a();
        assert_eq!(incomparable_chain_partition(&t, &[U, W]).unwrap(), vec![vec![vec![U], vec![W]]]);
        assert_eq!(incomparable_chain_partition(&t, &[R, U]).unwrap(), vec![vec![vec![R, U]]]);
        let l = ladder();
        // p and q sit at different depths
        let fams = incomparable_chain_partition(&l, &[NodeId(4), NodeId(5)]).unwrap();
        assert_eq!(fams.len(), 2);
        assert_eq!(chain_cover(&t, &[R, U, W]).unwrap(), vec![vec![R, U], vec![W]]);
    }

    #[test]
    fn cover_examples() {
        let t = fixture_a();
        assert_eq!(cover_by_cones(&t, &t.leaves().into_iter().collect()).unwrap(), vec![Region::Whole]);
        assert_eq!(
            cover_by_cones(&t, &BTreeSet::from([A1, A2, A3])).unwrap(),
            vec![Region::cone(R, U), Region::Point { at: A3 }]
        );
        assert!(cover_by_cones(&t, &BTreeSet::from([U])).is_err());
    }

    #[test]
    fn decompose_examples() {
        let t = fixture_a();
        let m = parent_map();
        let d = LeafFn::new(&t, &m).decompose().unwrap();
        assert_eq!(d.cells.len(), 1);
        assert_eq!(d.cells[0].tag, CellTag::Antichain);
        assert_eq!(d.cells[0].image, Some(vec![U, W]));
        assert_eq!(d.cells[0].parts, vec![Region::Whole]);

        let chain = map(&[(A1, R), (A2, R), (A3, U), (A4, U)]);
        let d = LeafFn::new(&t, &chain).decompose().unwrap();
        assert_eq!(d.cells.len(), 1);
        assert_eq!(d.cells[0].tag, CellTag::Chain);

        let inj = map(&[(A1, A1), (A2, A2)]);
        let e = LeafFn::new(&t, &inj).decompose().unwrap_err();
        assert_eq!(e.code(), "NOT_LOCALLY_CONSTANT");
        assert_eq!(e.witness().as_deref(), Some("4"));
    }

    #[test]
    fn monotonicity_examples() {
        let t = fixture_a();
        let m = parent_map();
        let s = LeafFn::new(&t, &m).monotonicity_split().unwrap();
        assert_eq!(s.locally_constant.regions, vec![Region::Whole]);
        assert!(s.c_isomorphism.is_empty() && s.finite.is_empty());
        let id = map(&[(A1, A1), (A2, A2), (A3, A3), (A4, A4)]);
        let s = LeafFn::new(&t, &id).monotonicity_split().unwrap();
        assert_eq!(s.c_isomorphism.regions, vec![Region::Whole]);
        assert!(s.locally_constant.is_empty() && s.finite.is_empty());
        // two points sent to distinct cones form a C-isomorphic cone
        let split = map(&[(A1, U), (A2, W), (A3, U), (A4, U)]);
        let s = LeafFn::new(&t, &split).monotonicity_split().unwrap();
        assert_eq!(s.c_isomorphism.points, vec![A1, A2]);
        assert_eq!(s.locally_constant.points, vec![A3, A4]);
        // comparable values: neither locally constant nor a C-isomorphism
        let odd = map(&[(A1, U), (A2, R), (A3, U), (A4, U)]);
        let s = LeafFn::new(&t, &odd).monotonicity_split().unwrap();
        assert_eq!(s.finite.points, vec![A1, A2]);
    }

    #[test]
    fn branch_factoring_on_ladder() {
        let l = ladder();
        let n = NodeId;
        // deeper leaves go to deeper nodes of the chain u < v
        let m = map(&[(n(10), n(2)), (n(11), n(2)), (n(12), n(3)), (n(13), n(3)), (n(14), n(3)), (n(15), n(3))]);
        let f = LeafFn::new(&l, &m);
        let bf = f.factor_through_branch(Some(&[n(2), n(3)])).unwrap();
        assert_eq!(bf.pieces.len(), 1);
        assert!(bf.residual.is_empty());
        let p = &bf.pieces[0];
        for &x in &p.domain.points {
            assert_eq!(f.eval_branch_piece(p, x).unwrap(), m.get(x));
        }
        assert!(f.factor_through_branch(Some(&[n(2)])).is_err());
        let c = map(&[(n(10), n(2)), (n(11), n(2))]);
        let bf = LeafFn::new(&l, &c).factor_through_branch(None).unwrap();
        assert!(bf.pieces.is_empty());
        assert_eq!(bf.residual.points, vec![n(10), n(11)]);
        let bad = map(&[(n(10), n(4)), (n(11), n(4)), (n(12), n(5)), (n(13), n(5))]);
        assert_eq!(LeafFn::new(&l, &bad).factor_through_branch(None).unwrap_err().code(), "IMAGE_NOT_CHAIN");
    }

    #[test]
    fn cone_factoring_examples() {
        let t = fixture_a();
        let per_cone = parent_map();
        let f = LeafFn::new(&t, &per_cone);
        assert!(f.cofinite_locally_constant_check(R).unwrap().is_empty());
        let cf = f.factor_through_cones(R).unwrap();
        assert_eq!(cf.bases, vec![R]);
        for x in t.leaves() {
            assert_eq!(f.eval_cone_factoring(&cf, x).unwrap(), per_cone.get(x));
        }
        let inj = map(&[(A1, U), (A2, W), (A3, U), (A4, W)]);
        assert_eq!(LeafFn::new(&t, &inj).cofinite_locally_constant_check(R).unwrap(), BTreeSet::from([A1, A2, A3, A4]));
        let constant = map(&[(A1, U), (A2, U), (A3, U), (A4, U)]);
        let cf = LeafFn::new(&t, &constant).factor_through_cones(R).unwrap();
        assert!(cf.bases.is_empty());
        assert_eq!(cf.residual.regions, vec![Region::Whole]);
        assert_eq!(
            LeafFn::new(&t, &per_cone).cofinite_locally_constant_check(U).unwrap_err().code(),
            "IMAGE_NOT_IN_CONES"
        );
    }
}
