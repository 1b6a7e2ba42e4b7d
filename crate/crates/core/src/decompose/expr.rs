//! The expression grammar for definable functions.
//!
//! A [`PiecewiseFn`] is a finite list of pieces, each a region of the domain
//! together with a closed-form expression. The grammar covers exactly the
//! normal forms the decomposition theorems produce.

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use super::DecomposeError;
use crate::finite_model::LeafMap;
use crate::puiseux::{cone_index, sample, Ball, PNode, PuiseuxError, Series, Valuation};
use crate::rational::{q, qpairs, qstr, qstr_opt, qvec, Q};
use crate::tree::{GoodTree, NodeId, Region};

/// A rational interval with optional (infinite) ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalInterval {
    #[serde(with = "qstr_opt", default)]
    pub lo: Option<Q>,
    #[serde(default)]
    pub lo_closed: bool,
    #[serde(with = "qstr_opt", default)]
    pub hi: Option<Q>,
    #[serde(default)]
    pub hi_closed: bool,
}

impl RationalInterval {
    pub fn all() -> Self {
        RationalInterval { lo: None, lo_closed: false, hi: None, hi_closed: false }
    }

    pub fn open(lo: Option<Q>, hi: Option<Q>) -> Self {
        RationalInterval { lo, lo_closed: false, hi, hi_closed: false }
    }

    pub fn closed(lo: Q, hi: Q) -> Self {
        RationalInterval { lo: Some(lo), lo_closed: true, hi: Some(hi), hi_closed: true }
    }

    /// `[lo, +inf)`
    pub fn at_least(lo: Q) -> Self {
        RationalInterval { lo: Some(lo), lo_closed: true, hi: None, hi_closed: false }
    }

    /// `(-inf, hi)`
    pub fn below(hi: Q) -> Self {
        RationalInterval { lo: None, lo_closed: false, hi: Some(hi), hi_closed: false }
    }

    pub fn point(x: Q) -> Self {
        Self::closed(x.clone(), x)
    }

    pub fn contains(&self, x: &Q) -> bool {
        let lo_ok = match &self.lo {
            None => true,
            Some(l) => x > l || (self.lo_closed && x == l),
        };
        let hi_ok = match &self.hi {
            None => true,
            Some(h) => x < h || (self.hi_closed && x == h),
        };
        lo_ok && hi_ok
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => l > h || (l == h && !(self.lo_closed && self.hi_closed)),
            _ => false,
        }
    }

    /// Whether the two intervals share a point.
    pub fn meets(&self, other: &RationalInterval) -> bool {
        let lo = match (&self.lo, &other.lo) {
            (None, x) | (x, None) => {
                x.clone().map(|v| (v, if self.lo.is_none() { other.lo_closed } else { self.lo_closed }))
            }
            (Some(a), Some(b)) if a > b => Some((a.clone(), self.lo_closed)),
            (Some(a), Some(b)) if b > a => Some((b.clone(), other.lo_closed)),
            (Some(a), Some(_)) => Some((a.clone(), self.lo_closed && other.lo_closed)),
        };
        let hi = match (&self.hi, &other.hi) {
            (None, x) | (x, None) => {
                x.clone().map(|v| (v, if self.hi.is_none() { other.hi_closed } else { self.hi_closed }))
            }
            (Some(a), Some(b)) if a < b => Some((a.clone(), self.hi_closed)),
            (Some(a), Some(b)) if b < a => Some((b.clone(), other.hi_closed)),
            (Some(a), Some(_)) => Some((a.clone(), self.hi_closed && other.hi_closed)),
        };
        let joined = RationalInterval {
            lo_closed: lo.as_ref().is_some_and(|l| l.1),
            lo: lo.map(|l| l.0),
            hi_closed: hi.as_ref().is_some_and(|h| h.1),
            hi: hi.map(|h| h.0),
        };
        !joined.is_empty()
    }

    /// A random member, preferring small denominators; endpoints are drawn
    /// only when closed.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Q {
        if self.lo_closed && self.hi_closed && self.lo == self.hi {
            return self.lo.clone().expect("closed point");
        }
        let lo = self.lo.clone().unwrap_or_else(|| self.hi.clone().map(|h| h - q(6)).unwrap_or_else(|| q(-4)));
        let hi = self.hi.clone().unwrap_or_else(|| &lo + q(6));
        if self.lo_closed && rng.gen_bool(0.1) {
            return lo;
        }
        if self.hi_closed && rng.gen_bool(0.1) {
            return hi;
        }
        sample::exponent_between(rng, &lo, &hi)
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { "[" } else { "(" };
        let r = if self.hi_closed { "]" } else { ")" };
        let lo = self.lo.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-inf".into());
        let hi = self.hi.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "+inf".into());
        write!(f, "{l}{lo}, {hi}{r}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentMap {
    /// `a -> u a + v`, `u != 0`.
    Affine {
        #[serde(with = "qstr")]
        u: Q,
        #[serde(with = "qstr")]
        v: Q,
    },
    Const {
        #[serde(with = "qstr")]
        value: Q,
    },
}

impl SegmentMap {
    pub fn apply(&self, a: &Q) -> Q {
        match self {
            SegmentMap::Affine { u, v } => u * a + v,
            SegmentMap::Const { value } => value.clone(),
        }
    }

    /// `a_i` with `apply(a_i) = a`; `None` for constant segments.
    pub fn invert(&self, a: &Q) -> Option<Q> {
        match self {
            SegmentMap::Affine { u, v } => Some((a - v) / u),
            SegmentMap::Const { .. } => None,
        }
    }

    pub fn identity() -> Self {
        SegmentMap::Affine { u: q(1), v: q(0) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneSegment {
    pub interval: RationalInterval,
    pub map: SegmentMap,
}

/// A piecewise affine-or-constant map `Q -> Q` on disjoint intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseMonotoneMap {
    pub segments: Vec<MonotoneSegment>,
}

impl PiecewiseMonotoneMap {
    pub fn identity() -> Self {
        Self::single(RationalInterval::all(), SegmentMap::identity())
    }

    pub fn single(interval: RationalInterval, map: SegmentMap) -> Self {
        PiecewiseMonotoneMap { segments: vec![MonotoneSegment { interval, map }] }
    }

    pub fn validate(&self) -> Result<(), DecomposeError> {
        for (i, s) in self.segments.iter().enumerate() {
            if let SegmentMap::Affine { u, .. } = &s.map {
                if u.is_zero() {
                    return Err(DecomposeError::InvalidInput("affine segment with u = 0".into()));
                }
            }
            if s.interval.is_empty() {
                return Err(DecomposeError::InvalidInput(format!("empty segment {}", s.interval)));
            }
            for t in &self.segments[i + 1..] {
                if s.interval.meets(&t.interval) {
                    return Err(DecomposeError::InvalidInput(format!(
                        "segments {} and {} overlap",
                        s.interval, t.interval
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn segment_of(&self, a: &Q) -> Option<(usize, &MonotoneSegment)> {
        self.segments.iter().enumerate().find(|(_, s)| s.interval.contains(a))
    }

    pub fn apply(&self, a: &Q) -> Option<Q> {
        self.segment_of(a).map(|(_, s)| s.map.apply(a))
    }
}

/// A function on the residue field `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResidueMap {
    /// Finite table; `default` covers every other input when present.
    Table {
        #[serde(with = "qpairs")]
        entries: Vec<(Q, Q)>,
        #[serde(with = "qstr_opt", default, skip_serializing_if = "Option::is_none")]
        default: Option<Q>,
    },
    /// `num(u) / den(u)`, coefficients from the constant term up.
    Rational {
        #[serde(with = "qvec")]
        num: Vec<Q>,
        #[serde(with = "qvec")]
        den: Vec<Q>,
    },
}

fn horner(c: &[Q], u: &Q) -> Q {
    c.iter().rev().fold(Q::zero(), |acc, k| acc * u + k)
}

impl ResidueMap {
    pub fn identity() -> Self {
        Self::affine(q(1), q(0))
    }

    /// `u -> a u + b`.
    pub fn affine(a: Q, b: Q) -> Self {
        ResidueMap::Rational { num: vec![b, a], den: vec![q(1)] }
    }

    pub fn eval(&self, u: &Q) -> Result<Q, DecomposeError> {
        match self {
            ResidueMap::Table { entries, default } => entries
                .iter()
                .find(|(k, _)| k == u)
                .map(|(_, v)| v.clone())
                .or_else(|| default.clone())
                .ok_or_else(|| DecomposeError::OutsideDomain(format!("residue map undefined at {u}"))),
            ResidueMap::Rational { num, den } => {
                let d = horner(den, u);
                if d.is_zero() {
                    return Err(DecomposeError::OutsideDomain(format!("pole of residue map at {u}")));
                }
                Ok(horner(num, u) / d)
            }
        }
    }

    /// `u -> self(k u)`.
    pub fn precompose_scale(&self, k: &Q) -> ResidueMap {
        match self {
            ResidueMap::Table { entries, default } => ResidueMap::Table {
                entries: entries.iter().map(|(a, b)| (a / k, b.clone())).collect(),
                default: default.clone(),
            },
            ResidueMap::Rational { num, den } => {
                let scale = |c: &[Q]| {
                    let mut p = q(1);
                    c.iter()
                        .map(|x| {
                            let out = x * &p;
                            p *= k;
                            out
                        })
                        .collect()
                };
                ResidueMap::Rational { num: scale(num), den: scale(den) }
            }
        }
    }
}

/// A constant value: a node of the tree, or a rational (a value-group or
/// residue-field element).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstValue {
    Node(PNode),
    Rational(#[serde(with = "qstr")] Q),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiniteExpr {
    Const { node: NodeId },
    Table { entries: LeafMap },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PuiseuxExpr {
    Const {
        value: ConstValue,
    },
    /// `x -> post(v(x - beta))`, read in `vK` or as the ball of that radius on
    /// the branch of `branch` (default `beta`).
    Vdiff {
        beta: Series,
        post: PiecewiseMonotoneMap,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        branch: Option<Series>,
    },
    /// `x -> h(res((x - alpha) / (alpha - beta)))`.
    Resaffine {
        alpha: Series,
        beta: Series,
        h: ResidueMap,
    },
    /// `x -> h(cone index of x at ball)`.
    Coneidx {
        ball: Ball,
        h: ResidueMap,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece<N, E> {
    pub domain: Region<N>,
    pub expr: E,
}

/// `{"backend":..., "pieces":[{"domain":Region,"expr":{"kind":...}}]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum PiecewiseFn {
    Finite { pieces: Vec<Piece<NodeId, FiniteExpr>> },
    Puiseux { pieces: Vec<Piece<PNode, PuiseuxExpr>> },
}

impl PiecewiseFn {
    /// The finite function as an explicit leaf map; pieces must be disjoint
    /// and tables must cover their domains.
    pub fn to_leaf_map(&self, tree: &GoodTree) -> Result<LeafMap, DecomposeError> {
        let pieces = match self {
            PiecewiseFn::Finite { pieces } => pieces,
            PiecewiseFn::Puiseux { .. } => return Err(DecomposeError::WrongBackend("finite")),
        };
        let mut out = LeafMap::default();
        for p in pieces {
            for x in tree.region_members(&p.domain)? {
                let v = match &p.expr {
                    FiniteExpr::Const { node } => *node,
                    FiniteExpr::Table { entries } => entries
                        .get(x)
                        .ok_or_else(|| DecomposeError::InvalidInput(format!("table has no entry for leaf {x}")))?,
                };
                if !tree.contains(v) {
                    return Err(DecomposeError::InvalidInput(format!("value {v} is not a node")));
                }
                if out.0.insert(x, v).is_some() {
                    return Err(DecomposeError::InvalidInput(format!("pieces overlap at leaf {x}")));
                }
            }
        }
        Ok(out)
    }

    /// Single-table finite function over exactly the domain of `map`.
    pub fn from_leaf_map(tree: &GoodTree, map: &LeafMap) -> PiecewiseFn {
        let dom: BTreeSet<NodeId> = map.domain();
        let regions = super::finite::cover_by_cones(tree, &dom).expect("leaves of the tree");
        PiecewiseFn::Finite {
            pieces: regions
                .into_iter()
                .map(|r| {
                    let members = tree.region_members(&r).expect("valid cover");
                    Piece { domain: r, expr: FiniteExpr::Table { entries: map.restrict(&members) } }
                })
                .collect(),
        }
    }

    pub fn puiseux_pieces(&self) -> Result<&[Piece<PNode, PuiseuxExpr>], DecomposeError> {
        match self {
            PiecewiseFn::Puiseux { pieces } => Ok(pieces),
            PiecewiseFn::Finite { .. } => Err(DecomposeError::WrongBackend("puiseux")),
        }
    }
}

/// Value of a Puiseux expression at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Node(PNode),
    Rational(Q),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Node(n) => write!(f, "{n}"),
            Value::Rational(r) => write!(f, "{r}"),
        }
    }
}

/// `v(x - beta)`, failing when `x` and `beta` cannot be told apart.
pub fn vdist(x: &Series, beta: &Series) -> Result<Q, PuiseuxError> {
    match (x - beta).val() {
        Valuation::Finite(v) => Ok(v),
        Valuation::AtLeast(p) => Err(PuiseuxError::PrecisionExhausted(p)),
    }
}

impl PuiseuxExpr {
    /// Evaluates at `x`; `Ok(None)` when `x` falls outside every segment of a
    /// `vdiff` map. `vdiff` values are read in `vK` when `as_rational`.
    pub fn eval(&self, x: &Series, as_rational: bool) -> Result<Option<Value>, DecomposeError> {
        Ok(Some(match self {
            PuiseuxExpr::Const { value } => match value {
                ConstValue::Node(n) => Value::Node(n.clone()),
                ConstValue::Rational(r) => Value::Rational(r.clone()),
            },
            PuiseuxExpr::Vdiff { beta, post, branch } => {
                let s = vdist(x, beta)?;
                let Some(r) = post.apply(&s) else {
                    return Ok(None);
                };
                if as_rational {
                    Value::Rational(r)
                } else {
                    let leaf = branch.as_ref().unwrap_or(beta);
                    Value::Node(PNode::Ball(Ball::new(leaf.clone(), r)?))
                }
            }
            PuiseuxExpr::Resaffine { alpha, beta, h } => {
                let ratio = (x - alpha).div(&(alpha - beta))?;
                Value::Rational(h.eval(&ratio.residue()?)?)
            }
            PuiseuxExpr::Coneidx { ball, h } => Value::Rational(h.eval(&cone_index(ball, x)?)?),
        }))
    }
}

/// Leading coefficient of a non-zero series.
pub fn leading_coefficient(x: &Series) -> Result<Q, PuiseuxError> {
    x.leading().map(|(_, c)| c.clone()).ok_or_else(|| PuiseuxError::PrecisionExhausted(x.precision().clone()))
}

/// Sign helper used when reporting monotonicity.
pub fn is_increasing(map: &SegmentMap) -> Option<bool> {
    match map {
        SegmentMap::Affine { u, .. } => Some(u.is_positive()),
        SegmentMap::Const { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn interval_membership() {
        let i = RationalInterval { lo: Some(q(0)), lo_closed: true, hi: Some(q(1)), hi_closed: false };
        assert!(i.contains(&q(0)) && i.contains(&qf(1, 2)) && !i.contains(&q(1)));
        assert!(RationalInterval::all().contains(&q(-100)));
        assert!(RationalInterval::open(Some(q(1)), Some(q(1))).is_empty());
        assert!(RationalInterval::below(q(0)).meets(&RationalInterval::open(Some(q(-1)), None)));
        assert!(!RationalInterval::below(q(0)).meets(&RationalInterval::at_least(q(0))));
        assert!(RationalInterval::point(q(0)).meets(&RationalInterval::at_least(q(0))));
    }

    #[test]
    fn residue_maps() {
        let h = ResidueMap::affine(q(2), q(1));
        assert_eq!(h.eval(&q(3)).unwrap(), q(7));
        assert_eq!(h.precompose_scale(&q(-1)).eval(&q(3)).unwrap(), q(-5));
        let inv = ResidueMap::Rational { num: vec![q(1)], den: vec![q(0), q(1)] };
        assert!(inv.eval(&q(0)).is_err());
        let t = ResidueMap::Table { entries: vec![(q(1), q(5))], default: None };
        assert_eq!(t.eval(&q(1)).unwrap(), q(5));
        assert!(t.eval(&q(2)).is_err());
        assert_eq!(t.precompose_scale(&q(2)).eval(&qf(1, 2)).unwrap(), q(5));
    }

    #[test]
    fn monotone_map_validation() {
        let m = PiecewiseMonotoneMap {
            segments: vec![
                MonotoneSegment { interval: RationalInterval::below(q(0)), map: SegmentMap::identity() },
                MonotoneSegment { interval: RationalInterval::at_least(q(0)), map: SegmentMap::Const { value: q(0) } },
            ],
        };
        m.validate().unwrap();
        assert_eq!(m.apply(&q(-2)), Some(q(-2)));
        assert_eq!(m.apply(&q(5)), Some(q(0)));
        let bad = PiecewiseMonotoneMap::single(RationalInterval::all(), SegmentMap::Affine { u: q(0), v: q(1) });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fn_json_round_trip() {
        let f = PiecewiseFn::Puiseux {
            pieces: vec![Piece {
                domain: Region::Whole,
                expr: PuiseuxExpr::Vdiff {
                    beta: Series::zero(q(16)),
                    post: PiecewiseMonotoneMap::identity(),
                    branch: None,
                },
            }],
        };
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with(r#"{"backend":"puiseux","pieces":[{"domain":{"kind":"whole"},"expr":{"kind":"vdiff""#));
        assert_eq!(serde_json::from_str::<PiecewiseFn>(&s).unwrap(), f);
        let g = PiecewiseFn::Finite {
            pieces: vec![Piece { domain: Region::Whole, expr: FiniteExpr::Const { node: NodeId(1) } }],
        };
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"backend":"finite","pieces":[{"domain":{"kind":"whole"},"expr":{"kind":"const","node":1}}]}"#
        );
    }
}
