//! The Puiseux backend. Every supported expression is locally constant off
//! its explicit exceptional points, and the constancy cones, fibers and
//! normal forms are read off the expressions rather than searched for.
//!
//! Each piece is treated on its own: a cone of constancy never extends into a
//! neighbouring piece.

use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::expr::{
    leading_coefficient, vdist, ConstValue, Piece, PiecewiseFn, PuiseuxExpr, RationalInterval, ResidueMap, SegmentMap,
    Value,
};
use super::{Cell, DecomposeError, DecompositionResult, FiberShape, PuiseuxDecomposition};
use crate::finite_model::CellTag;
use crate::puiseux::{cone_index, sample, Ball, PNode, PuiseuxField, Series, Valuation};
use crate::rational::{q, qstr, qvec, Q};
use crate::tree::region::{in_cone, region_contains, validate};
use crate::tree::{CTree, Region, TreeError};

/// The points of `domain`, restricted to `v(x - center) ∈ band` when a
/// center is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub domain: Region<PNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Series>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<RationalInterval>,
}

impl Band {
    pub fn whole_of(domain: &Region<PNode>) -> Self {
        Band { domain: domain.clone(), center: None, band: None }
    }

    pub fn contains(&self, field: &PuiseuxField, x: &Series) -> Result<bool, DecomposeError> {
        if !region_contains(field, &self.domain, &PNode::Leaf(x.clone()))? {
            return Ok(false);
        }
        match &self.center {
            None => Ok(true),
            Some(c) => match (x - c).val() {
                Valuation::AtLeast(_) => Ok(false),
                Valuation::Finite(s) => Ok(self.band.as_ref().is_none_or(|b| b.contains(&s))),
            },
        }
    }

    /// A random point of the band; `None` if rejection sampling gives up.
    pub fn sample<R: Rng>(&self, rng: &mut R, field: &PuiseuxField) -> Result<Option<Series>, DecomposeError> {
        let prec = &field.precision;
        for attempt in 0..200 {
            let x = match (&self.center, &self.band) {
                (Some(c), Some(b)) if attempt % 2 == 0 => {
                    let s = b.sample(rng);
                    if s >= prec - q(1) {
                        continue;
                    }
                    sample::point_at_distance(rng, c, &s, prec)
                }
                _ => match sample::sample_region(rng, &self.domain, prec) {
                    Ok(x) => x,
                    Err(TreeError::Puiseux(_)) => continue,
                    Err(e) => return Err(e.into()),
                },
            };
            if self.contains(field, &x)? {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }
}

fn leaf(x: &Series) -> PNode {
    PNode::Leaf(x.clone())
}

/// Index of the first piece containing `x`, with the segment of a `vdiff`
/// piece.
fn locate(
    field: &PuiseuxField,
    pieces: &[Piece<PNode, PuiseuxExpr>],
    x: &Series,
) -> Result<Option<(usize, Option<usize>)>, DecomposeError> {
    for (i, p) in pieces.iter().enumerate() {
        if !region_contains(field, &p.domain, &leaf(x))? {
            continue;
        }
        match &p.expr {
            PuiseuxExpr::Vdiff { beta, post, .. } => {
                let Valuation::Finite(s) = (x - beta).val() else {
                    continue;
                };
                if let Some((j, _)) = post.segment_of(&s) {
                    return Ok(Some((i, Some(j))));
                }
            }
            _ => return Ok(Some((i, None))),
        }
    }
    Ok(None)
}

/// Whether `x` lies in the domain of `f`.
pub fn in_domain(field: &PuiseuxField, f: &PiecewiseFn, x: &Series) -> Result<bool, DecomposeError> {
    Ok(locate(field, f.puiseux_pieces()?, x)?.is_some())
}

/// `f(x)`; `vdiff` values are read in `vK` when `as_rational`, else as balls.
pub fn evaluate(field: &PuiseuxField, f: &PiecewiseFn, x: &Series, as_rational: bool) -> Result<Value, DecomposeError> {
    let pieces = f.puiseux_pieces()?;
    let (i, _) =
        locate(field, pieces, x)?.ok_or_else(|| DecomposeError::OutsideDomain(format!("{x} is outside the domain")))?;
    pieces[i]
        .expr
        .eval(x, as_rational)?
        .ok_or_else(|| DecomposeError::OutsideDomain(format!("{x} is outside the domain")))
}

/// `r_D(x)`: the least radius `rho` with the open ball of radius `rho`
/// around `x` inside the domain; `None` for `-inf`.
fn domain_radius(domain: &Region<PNode>, x: &Series) -> Result<Option<Q>, DecomposeError> {
    Ok(match domain {
        Region::Whole => None,
        Region::Cone { basis, .. } | Region::LevelSet { basis, .. } => basis.as_ball().map(|b| b.radius.clone()),
        Region::Interval { hi, .. } => {
            let c = hi.point().ok_or_else(|| DecomposeError::InvalidInput("interval ends at -inf".into()))?;
            Some(vdist(x, c)?)
        }
        Region::Point { .. } => return Err(DecomposeError::NotLocallyConstant { witness: x.to_string() }),
    })
}

fn max_radius(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (None, r) | (r, None) => r,
        (Some(a), Some(b)) => Some(a.max(b)),
    }
}

fn ball_node(x: &Series, r: Option<Q>) -> Result<PNode, DecomposeError> {
    Ok(match r {
        None => PNode::NegInf,
        Some(r) => PNode::ball(x.clone(), r)?,
    })
}

/// The radius below which `f` stops being constant around `x`, ignoring
/// the domain.
fn expr_radius(expr: &PuiseuxExpr, x: &Series) -> Result<Option<Q>, DecomposeError> {
    Ok(match expr {
        PuiseuxExpr::Const { .. } => None,
        PuiseuxExpr::Vdiff { beta, .. } => Some(vdist(x, beta)?),
        PuiseuxExpr::Resaffine { alpha, beta, .. } => Some(vdist(alpha, beta)?),
        PuiseuxExpr::Coneidx { ball, .. } => Some(ball.radius.clone()),
    })
}

fn piece_at<'p>(
    field: &PuiseuxField,
    f: &'p PiecewiseFn,
    x: &Series,
) -> Result<&'p Piece<PNode, PuiseuxExpr>, DecomposeError> {
    let pieces = f.puiseux_pieces()?;
    let (i, _) =
        locate(field, pieces, x)?.ok_or_else(|| DecomposeError::OutsideDomain(format!("{x} is outside the domain")))?;
    Ok(&pieces[i])
}

/// `g(x)`: the ball `B(x, max(r_D(x), r_f(x)))`, where `r_f` is the radius
/// from the expression (`v(x - beta)` for `vdiff`).
pub fn constancy_basis(field: &PuiseuxField, f: &PiecewiseFn, x: &Series) -> Result<PNode, DecomposeError> {
    let p = piece_at(field, f, x)?;
    let r = max_radius(domain_radius(&p.domain, x)?, expr_radius(&p.expr, x)?);
    ball_node(x, r)
}

/// The fiber shape of a constant expression (or one whose fiber fills the
/// domain near `x`) at `g`.
fn domain_shape(domain: &Region<PNode>, g: PNode, x: &Series) -> FiberShape<PNode> {
    match domain {
        Region::Cone { basis: PNode::Ball(_), .. } => FiberShape::UnionOfCones { basis: g, witnesses: vec![leaf(x)] },
        Region::LevelSet { basis: PNode::Ball(_), removed } => {
            FiberShape::LevelSet { basis: g, removed: removed.clone() }
        }
        Region::Interval { hi, .. } => FiberShape::LevelSet { basis: g, removed: vec![hi.clone()] },
        _ => FiberShape::LevelSet { basis: PNode::NegInf, removed: Vec::new() },
    }
}

fn add_removed(
    field: &PuiseuxField,
    g: &PNode,
    mut removed: Vec<PNode>,
    w: PNode,
) -> Result<Vec<PNode>, DecomposeError> {
    for r in &removed {
        if in_cone(field, g, r, &w)? {
            return Ok(removed);
        }
    }
    removed.push(w);
    Ok(removed)
}

/// The fiber `Lambda_g ∩ f^-1(f(x))` at `g = g(x)`.
pub fn fiber_shape(field: &PuiseuxField, f: &PiecewiseFn, x: &Series) -> Result<FiberShape<PNode>, DecomposeError> {
    let p = piece_at(field, f, x)?;
    let g = constancy_basis(field, f, x)?;
    let rd = domain_radius(&p.domain, x)?;
    match &p.expr {
        PuiseuxExpr::Const { .. } => Ok(domain_shape(&p.domain, g, x)),
        PuiseuxExpr::Vdiff { beta, .. } => {
            let s = vdist(x, beta)?;
            let b = leaf(beta);
            match rd {
                None => Ok(FiberShape::LevelSet { basis: g, removed: vec![b] }),
                Some(rd) if s > rd => Ok(FiberShape::LevelSet { basis: g, removed: vec![b] }),
                Some(rd) if s < rd => Ok(domain_shape(&p.domain, g, x)),
                Some(_) => Ok(match domain_shape(&p.domain, g.clone(), x) {
                    FiberShape::LevelSet { basis, removed } => {
                        let removed = add_removed(field, &g, removed, b)?;
                        FiberShape::LevelSet { basis, removed }
                    }
                    cones => cones,
                }),
            }
        }
        _ => Err(DecomposeError::NotReducible("fiber shapes of residue-valued pieces are not tracked".into())),
    }
}

fn same_leaf(x: &Series, y: &Series) -> bool {
    matches!((x - y).val(), Valuation::AtLeast(_))
}

fn check_pieces(field: &PuiseuxField, f: &PiecewiseFn) -> Result<(), DecomposeError> {
    for p in f.puiseux_pieces()? {
        validate(field, &p.domain)?;
        if let PuiseuxExpr::Vdiff { post, .. } = &p.expr {
            post.validate()?;
        }
    }
    Ok(())
}

/// Cells for a `T`-valued function: affine `vdiff` segments give chain cells
/// (one per target branch), constant values give antichain cells, point
/// pieces are exceptional.
pub fn decompose(field: &PuiseuxField, f: &PiecewiseFn) -> Result<PuiseuxDecomposition, DecomposeError> {
    check_pieces(field, f)?;
    let mut chains: Vec<(Series, Vec<Band>)> = Vec::new();
    let mut consts: Vec<(Band, PNode)> = Vec::new();
    let mut exceptional = Vec::new();
    for p in f.puiseux_pieces()? {
        if let Region::Point { at } = &p.domain {
            exceptional.push(at.clone());
            continue;
        }
        match &p.expr {
            PuiseuxExpr::Const { value: ConstValue::Node(n) } => consts.push((Band::whole_of(&p.domain), n.clone())),
            PuiseuxExpr::Const { value: ConstValue::Rational(r) } => {
                return Err(DecomposeError::InvalidInput(format!("rational constant {r} in a tree-valued function")))
            }
            PuiseuxExpr::Vdiff { beta, post, branch } => {
                let target = branch.as_ref().unwrap_or(beta);
                for seg in &post.segments {
                    let band =
                        Band { domain: p.domain.clone(), center: Some(beta.clone()), band: Some(seg.interval.clone()) };
                    match &seg.map {
                        SegmentMap::Affine { .. } => match chains.iter_mut().find(|(b, _)| same_leaf(b, target)) {
                            Some((_, bands)) => bands.push(band),
                            None => chains.push((target.clone(), vec![band])),
                        },
                        SegmentMap::Const { value } => consts.push((band, PNode::ball(target.clone(), value.clone())?)),
                    }
                }
            }
            PuiseuxExpr::Resaffine { .. } | PuiseuxExpr::Coneidx { .. } => {
                return Err(DecomposeError::NotReducible(
                    "residue-valued piece; use the cone or residue normal forms".into(),
                ))
            }
        }
    }
    // constants: join a group whose values are all incomparable or equal
    let mut groups: Vec<(Vec<Band>, Vec<PNode>)> = Vec::new();
    'next: for (band, v) in consts {
        for (bands, vals) in groups.iter_mut() {
            let mut fits = true;
            let mut dup = false;
            for w in vals.iter() {
                if field.same(w, &v)? {
                    dup = true;
                } else if field.comparable(w, &v)? {
                    fits = false;
                }
            }
            if fits {
                bands.push(band);
                if !dup {
                    vals.push(v);
                }
                continue 'next;
            }
        }
        groups.push((vec![band], vec![v]));
    }
    let mut cells = Vec::new();
    for (_, bands) in chains {
        cells.push(Cell { parts: bands, tag: CellTag::Chain, points: None, image: None });
    }
    for (bands, vals) in groups {
        cells.push(Cell { parts: bands, tag: CellTag::Antichain, points: None, image: Some(vals) });
    }
    Ok(DecompositionResult { cells, exceptional, added_parameters: Vec::new() })
}

/// `inf(x, Br(beta))`: the ball around `beta` of radius `v(x - beta)`.
pub fn inf_with_branch(x: &Series, beta: &Series) -> Result<Ball, DecomposeError> {
    Ok(Ball::new(beta.clone(), vdist(x, beta)?)?)
}

/// On `domain`, `f(x) = fhat(inf(x, Br(beta)))` with
/// `fhat(B(beta, q)) = B(branch, map(q))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxBranchPiece {
    pub domain: Band,
    pub beta: Series,
    pub branch: Series,
    pub map: SegmentMap,
}

impl PuiseuxBranchPiece {
    /// `fhat` at a ball of `Br(beta)`.
    pub fn apply(&self, node: &Ball) -> Result<PNode, DecomposeError> {
        if !node.contains(&self.beta)? {
            return Err(DecomposeError::OutsideDomain(format!("{node} is not on the branch of {}", self.beta)));
        }
        Ok(PNode::ball(self.branch.clone(), self.map.apply(&node.radius))?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxBranchFactoring {
    pub pieces: Vec<PuiseuxBranchPiece>,
    pub residual: Vec<Band>,
    pub residual_image: Vec<PNode>,
}

/// Factoring through branches for a function whose image lies in one branch.
pub fn factor_through_branch(field: &PuiseuxField, f: &PiecewiseFn) -> Result<PuiseuxBranchFactoring, DecomposeError> {
    check_pieces(field, f)?;
    let mut pieces = Vec::new();
    let mut residual = Vec::new();
    let mut residual_image: Vec<PNode> = Vec::new();
    for p in f.puiseux_pieces()? {
        match &p.expr {
            PuiseuxExpr::Const { value: ConstValue::Node(n) } => {
                residual.push(Band::whole_of(&p.domain));
                residual_image.push(n.clone());
            }
            PuiseuxExpr::Vdiff { beta, post, branch } => {
                let target = branch.as_ref().unwrap_or(beta);
                for seg in &post.segments {
                    let band =
                        Band { domain: p.domain.clone(), center: Some(beta.clone()), band: Some(seg.interval.clone()) };
                    match &seg.map {
                        SegmentMap::Affine { .. } => pieces.push(PuiseuxBranchPiece {
                            domain: band,
                            beta: beta.clone(),
                            branch: target.clone(),
                            map: seg.map.clone(),
                        }),
                        SegmentMap::Const { value } => {
                            residual.push(band);
                            residual_image.push(PNode::ball(target.clone(), value.clone())?);
                        }
                    }
                }
            }
            _ => return Err(DecomposeError::NotReducible("only tree-valued pieces factor through a branch".into())),
        }
    }
    // the image must be a chain: one target branch, constants on it
    if let Some(first) = pieces.first() {
        let on_branch = leaf(&first.branch);
        for p in &pieces {
            if !same_leaf(&p.branch, &first.branch) {
                return Err(DecomposeError::ImageNotChain { witness: p.branch.to_string() });
            }
        }
        for v in &residual_image {
            if !field.le(v, &on_branch)? {
                return Err(DecomposeError::ImageNotChain { witness: v.to_string() });
            }
        }
    } else {
        for (i, a) in residual_image.iter().enumerate() {
            for b in &residual_image[i + 1..] {
                if !field.comparable(a, b)? {
                    return Err(DecomposeError::ImageNotChain { witness: b.to_string() });
                }
            }
        }
    }
    Ok(PuiseuxBranchFactoring { pieces, residual, residual_image })
}

/// On `domain`: `{f = a} = {v(x - beta) = (a - v) / u}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueGroupCell {
    pub domain: Band,
    pub beta: Series,
    #[serde(with = "qstr")]
    pub u: Q,
    #[serde(with = "qstr")]
    pub v: Q,
}

impl ValueGroupCell {
    /// `a_i = h_i^-1(a)`.
    pub fn fiber_radius(&self, a: &Q) -> Q {
        (a - &self.v) / &self.u
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueGroupNormalForm {
    #[serde(with = "qvec")]
    pub finite: Vec<Q>,
    pub cells: Vec<ValueGroupCell>,
}

fn push_unique(v: &mut Vec<Q>, x: Q) {
    if !v.contains(&x) {
        v.push(x);
    }
}

/// Normal form of a `vK`-valued function: the constant values form `F`, and
/// each affine segment of a `vdiff` piece becomes a cell whose fibers are
/// spheres around `beta`.
pub fn value_group_normal_form(field: &PuiseuxField, f: &PiecewiseFn) -> Result<ValueGroupNormalForm, DecomposeError> {
    check_pieces(field, f)?;
    let mut finite = Vec::new();
    let mut cells = Vec::new();
    for p in f.puiseux_pieces()? {
        match &p.expr {
            PuiseuxExpr::Const { value: ConstValue::Rational(r) } => push_unique(&mut finite, r.clone()),
            PuiseuxExpr::Vdiff { beta, post, .. } => {
                for seg in &post.segments {
                    match &seg.map {
                        SegmentMap::Const { value } => push_unique(&mut finite, value.clone()),
                        SegmentMap::Affine { u, v } => cells.push(ValueGroupCell {
                            domain: Band {
                                domain: p.domain.clone(),
                                center: Some(beta.clone()),
                                band: Some(seg.interval.clone()),
                            },
                            beta: beta.clone(),
                            u: u.clone(),
                            v: v.clone(),
                        }),
                    }
                }
            }
            other => {
                return Err(DecomposeError::NotReducible(format!(
                    "{} piece is not value-group valued",
                    kind_name(other)
                )))
            }
        }
    }
    finite.sort();
    Ok(ValueGroupNormalForm { finite, cells })
}

fn kind_name(e: &PuiseuxExpr) -> &'static str {
    match e {
        PuiseuxExpr::Const { .. } => "const",
        PuiseuxExpr::Vdiff { .. } => "vdiff",
        PuiseuxExpr::Resaffine { .. } => "resaffine",
        PuiseuxExpr::Coneidx { .. } => "coneidx",
    }
}

/// Whether every point of `domain` lies in the closed ball `b`.
fn within_ball(field: &PuiseuxField, domain: &Region<PNode>, b: &Ball) -> Result<bool, DecomposeError> {
    let ball = PNode::Ball(b.clone());
    Ok(match domain {
        Region::Whole => false,
        other => field.le(&ball, &other.basis(field))?,
    })
}

/// `f(x) = h(res((x - alpha) / (alpha - beta)))` on `domain ⊆ Lambda_t(alpha)`,
/// `t = v(alpha - beta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueEntry {
    pub domain: Region<PNode>,
    pub alpha: Series,
    pub beta: Series,
    #[serde(with = "qstr")]
    pub t: Q,
    pub h: ResidueMap,
}

impl ResidueEntry {
    pub fn ball(&self) -> Result<Ball, DecomposeError> {
        Ok(Ball::new(self.alpha.clone(), self.t.clone())?)
    }

    /// `res((x - alpha) / (alpha - beta))`.
    pub fn reduced(&self, x: &Series) -> Result<Q, DecomposeError> {
        let ratio = (x - &self.alpha).div(&(&self.alpha - &self.beta))?;
        Ok(ratio.residue()?)
    }

    pub fn eval(&self, x: &Series) -> Result<Q, DecomposeError> {
        self.h.eval(&self.reduced(x)?)
    }

    /// `g_i`: a representative `u (alpha - beta) + alpha` of the cone at
    /// `Lambda_t(alpha)` with reduced coordinate `u`.
    pub fn cone_representative(&self, u: &Q) -> Series {
        &(&self.alpha - &self.beta).scale(u) + &self.alpha
    }

    /// Same entry with `beta` replaced: `h` is precomposed with the scale
    /// `res((alpha - beta') / (alpha - beta))` so the function is unchanged.
    pub fn rebase(&self, beta: &Series) -> Result<ResidueEntry, DecomposeError> {
        let new_diff = &self.alpha - beta;
        if vdist(&self.alpha, beta)? != self.t {
            return Err(DecomposeError::InvalidInput("rebasing must keep v(alpha - beta)".into()));
        }
        let k = new_diff.div(&(&self.alpha - &self.beta))?.residue()?;
        Ok(ResidueEntry { beta: beta.clone(), h: self.h.precompose_scale(&k), ..self.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueNormalForm {
    #[serde(with = "qvec")]
    pub finite: Vec<Q>,
    pub entries: Vec<ResidueEntry>,
}

/// Normal form of a residue-valued function. `resaffine` pieces are kept with
/// their own representatives; a cone index at `B(c, r)` becomes
/// `alpha = c`, `beta = c + t^r` and `h(-u)`.
pub fn residue_normal_form(field: &PuiseuxField, f: &PiecewiseFn) -> Result<ResidueNormalForm, DecomposeError> {
    check_pieces(field, f)?;
    let mut finite = Vec::new();
    let mut entries = Vec::new();
    for p in f.puiseux_pieces()? {
        let entry = match &p.expr {
            PuiseuxExpr::Const { value: ConstValue::Rational(r) } => {
                push_unique(&mut finite, r.clone());
                continue;
            }
            PuiseuxExpr::Resaffine { alpha, beta, h } => ResidueEntry {
                domain: p.domain.clone(),
                alpha: alpha.clone(),
                beta: beta.clone(),
                t: vdist(alpha, beta)?,
                h: h.clone(),
            },
            PuiseuxExpr::Coneidx { ball, h } => {
                let c = ball.center.clone();
                let step = Series::monomial(Q::one(), ball.radius.clone(), c.precision().clone());
                ResidueEntry {
                    domain: p.domain.clone(),
                    beta: &c + &step,
                    alpha: c,
                    t: ball.radius.clone(),
                    h: h.precompose_scale(&-Q::one()),
                }
            }
            other => {
                return Err(DecomposeError::NotReducible(format!("{} piece is not residue valued", kind_name(other))))
            }
        };
        if !within_ball(field, &entry.domain, &entry.ball()?)? {
            return Err(DecomposeError::NotReducible(format!("domain is not inside the ball {}", entry.ball()?)));
        }
        entries.push(entry);
    }
    finite.sort();
    Ok(ResidueNormalForm { finite, entries })
}

/// `f(x) = map(cone index of x at base)` on `domain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxConeFactor {
    pub base: Ball,
    pub map: ResidueMap,
    pub domain: Region<PNode>,
}

impl PuiseuxConeFactor {
    pub fn eval(&self, x: &Series) -> Result<Q, DecomposeError> {
        self.map.eval(&cone_index(&self.base, x)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxConeFactoring {
    pub bases: Vec<Ball>,
    pub factors: Vec<PuiseuxConeFactor>,
    pub residual: Vec<Band>,
    pub residual_values: Vec<ConstValue>,
}

/// Residue-valued pieces are locally constant everywhere on their domains.
pub fn cofinite_locally_constant_check(field: &PuiseuxField, f: &PiecewiseFn) -> Result<Vec<PNode>, DecomposeError> {
    check_pieces(field, f)?;
    let mut out = Vec::new();
    for p in f.puiseux_pieces()? {
        match (&p.expr, &p.domain) {
            (PuiseuxExpr::Vdiff { .. }, _) => {
                return Err(DecomposeError::ImageNotInCones { witness: "vdiff piece".into() })
            }
            (_, Region::Point { at }) => out.push(at.clone()),
            _ => {}
        }
    }
    Ok(out)
}

/// Factors a residue-valued function through cones at an antichain of
/// balls. The values are read as cones at `a` through the cone index.
pub fn factor_through_cones(
    field: &PuiseuxField,
    f: &PiecewiseFn,
    a: &Ball,
) -> Result<PuiseuxConeFactoring, DecomposeError> {
    cofinite_locally_constant_check(field, f)?;
    let mut factors = Vec::new();
    let mut residual = Vec::new();
    let mut residual_values = Vec::new();
    for p in f.puiseux_pieces()? {
        match &p.expr {
            PuiseuxExpr::Const { value } => {
                if let ConstValue::Node(n) = value {
                    if !field.lt(&PNode::Ball(a.clone()), n)? {
                        return Err(DecomposeError::ImageNotInCones { witness: n.to_string() });
                    }
                }
                residual.push(Band::whole_of(&p.domain));
                residual_values.push(value.clone());
            }
            PuiseuxExpr::Resaffine { alpha, beta, h } => {
                let diff = alpha - beta;
                let lc = leading_coefficient(&diff)?;
                factors.push(PuiseuxConeFactor {
                    base: Ball::new(alpha.clone(), vdist(alpha, beta)?)?,
                    map: h.precompose_scale(&(Q::one() / lc)),
                    domain: p.domain.clone(),
                });
            }
            PuiseuxExpr::Coneidx { ball, h } => {
                factors.push(PuiseuxConeFactor { base: ball.clone(), map: h.clone(), domain: p.domain.clone() })
            }
            PuiseuxExpr::Vdiff { .. } => unreachable!("rejected by the cofinite check"),
        }
    }
    let mut bases: Vec<Ball> = Vec::new();
    for fct in &factors {
        if !within_ball(field, &fct.domain, &fct.base)? {
            return Err(DecomposeError::NotReducible(format!("domain is not inside {}", fct.base)));
        }
        if bases.contains(&fct.base) {
            continue;
        }
        for b in &bases {
            if b.encloses(&fct.base) || fct.base.encloses(b) {
                return Err(DecomposeError::NotReducible(format!("bases {b} and {} are nested", fct.base)));
            }
        }
        bases.push(fct.base.clone());
    }
    Ok(PuiseuxConeFactoring { bases, factors, residual, residual_values })
}
