use serde::{Deserialize, Serialize};
use std::fmt;

use super::{PuiseuxError, Series, Valuation};
use crate::rational::{qstr, Q};
use crate::tree::{BranchingNumber, CTree, TreeError};

/// Closed ball `{x : v(x - center) >= radius}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ball {
    pub center: Series,
    #[serde(with = "qstr")]
    pub radius: Q,
}

impl Ball {
    pub fn new(center: Series, radius: Q) -> Result<Self, PuiseuxError> {
        if radius >= *center.precision() {
            return Err(PuiseuxError::InsufficientPrecision { needed: radius, available: center.precision().clone() });
        }
        Ok(Ball { center, radius })
    }

    /// `x in B`, failing when the digits needed are unknown.
    pub fn contains(&self, x: &Series) -> Result<bool, PuiseuxError> {
        (x - &self.center).val().ge(&self.radius)
    }

    /// `self ⊇ other` (as balls), i.e. `self <= other` in the tree.
    pub fn encloses(&self, other: &Ball) -> bool {
        // both precisions exceed self.radius once other.radius >= self.radius
        other.radius >= self.radius && (&other.center - &self.center).val().ge(&self.radius).unwrap_or(true)
    }
}

impl PartialEq for Ball {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius && (&self.center - &other.center).val().ge(&self.radius).unwrap_or(true)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}, {})", self.center, self.radius)
    }
}

/// `inf(x, y)` of two leaves: the ball centered at `x` of radius `v(x - y)`.
pub fn ball_inf(x: &Series, y: &Series) -> Result<Ball, PuiseuxError> {
    match (x - y).val() {
        Valuation::Finite(r) => Ball::new(x.clone(), r),
        Valuation::AtLeast(p) => Err(PuiseuxError::PrecisionExhausted(p)),
    }
}

/// Index of the cone of `x` at `a`: `residue((x - c) / t^r)`.
pub fn cone_index(a: &Ball, x: &Series) -> Result<Q, PuiseuxError> {
    if !a.contains(x)? {
        return Err(PuiseuxError::OutsideBall);
    }
    (x - &a.center).shift(&-&a.radius).residue()
}

/// A point of `T(K) ∪ K ∪ {-inf}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PNode {
    NegInf,
    Ball(Ball),
    Leaf(Series),
}

impl fmt::Display for PNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNode::NegInf => f.write_str("-inf"),
            PNode::Ball(b) => write!(f, "{b}"),
            PNode::Leaf(x) => write!(f, "{x}"),
        }
    }
}

impl PNode {
    pub fn ball(center: Series, radius: Q) -> Result<Self, PuiseuxError> {
        Ok(PNode::Ball(Ball::new(center, radius)?))
    }

    pub fn as_ball(&self) -> Option<&Ball> {
        match self {
            PNode::Ball(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_leaf(&self) -> Option<&Series> {
        match self {
            PNode::Leaf(x) => Some(x),
            _ => None,
        }
    }

    /// Some series lying above the node (the center or the leaf itself).
    pub fn point(&self) -> Option<&Series> {
        match self {
            PNode::NegInf => None,
            PNode::Ball(b) => Some(&b.center),
            PNode::Leaf(x) => Some(x),
        }
    }
}

/// The ball tree of the field of truncated Puiseux series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxField {
    #[serde(with = "qstr")]
    pub precision: Q,
}

impl Default for PuiseuxField {
    fn default() -> Self {
        PuiseuxField { precision: Q::from_integer(16.into()) }
    }
}

/// The queryable chain `Br(x)`: balls `B(x, q)` for rational `q`, plus `-inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxBranch {
    pub leaf: Series,
}

impl PuiseuxBranch {
    /// The element of radius `q`.
    pub fn at(&self, q: &Q) -> Result<Ball, PuiseuxError> {
        Ball::new(self.leaf.clone(), q.clone())
    }

    pub fn contains(&self, a: &PNode) -> Result<bool, TreeError> {
        match a {
            PNode::NegInf => Ok(true),
            PNode::Leaf(_) => Ok(false),
            PNode::Ball(b) => Ok(b.contains(&self.leaf)?),
        }
    }
}

impl PuiseuxField {
    pub fn new(precision: Q) -> Self {
        PuiseuxField { precision }
    }

    pub fn branch(&self, a: &PNode) -> Result<PuiseuxBranch, TreeError> {
        match a {
            PNode::Leaf(x) => Ok(PuiseuxBranch { leaf: x.clone() }),
            other => Err(TreeError::NotALeaf(other.to_string())),
        }
    }

    fn leaf_eq(x: &Series, y: &Series) -> Result<bool, PuiseuxError> {
        if x == y {
            return Ok(true);
        }
        match (x - y).val() {
            Valuation::Finite(_) => Ok(false),
            Valuation::AtLeast(p) => Err(PuiseuxError::PrecisionExhausted(p)),
        }
    }
}

impl CTree for PuiseuxField {
    type Node = PNode;

    fn neg_inf(&self) -> PNode {
        PNode::NegInf
    }

    fn is_leaf(&self, a: &PNode) -> bool {
        matches!(a, PNode::Leaf(_))
    }

    fn is_neg_inf(&self, a: &PNode) -> bool {
        matches!(a, PNode::NegInf)
    }

    fn le(&self, a: &PNode, b: &PNode) -> Result<bool, TreeError> {
        Ok(match (a, b) {
            (PNode::NegInf, _) => true,
            (_, PNode::NegInf) => false,
            (PNode::Ball(x), PNode::Ball(y)) => x.encloses(y),
            (PNode::Ball(x), PNode::Leaf(y)) => x.contains(y)?,
            (PNode::Leaf(_), PNode::Ball(_)) => false,
            (PNode::Leaf(x), PNode::Leaf(y)) => Self::leaf_eq(x, y)?,
        })
    }

    fn inf(&self, a: &PNode, b: &PNode) -> Result<PNode, TreeError> {
        Ok(match (a, b) {
            (PNode::NegInf, _) | (_, PNode::NegInf) => PNode::NegInf,
            (PNode::Ball(x), PNode::Ball(y)) => {
                let r = (&x.radius).min(&y.radius).clone();
                let r = match (&x.center - &y.center).val() {
                    Valuation::Finite(v) => v.min(r),
                    // precision of both centers exceeds both radii
                    Valuation::AtLeast(_) => r,
                };
                PNode::Ball(Ball::new(x.center.clone(), r)?)
            }
            (PNode::Ball(x), PNode::Leaf(y)) | (PNode::Leaf(y), PNode::Ball(x)) => {
                let r = match (y - &x.center).val() {
                    Valuation::Finite(v) => v.min(x.radius.clone()),
                    Valuation::AtLeast(p) if p > x.radius => x.radius.clone(),
                    Valuation::AtLeast(p) => {
                        return Err(
                            PuiseuxError::InsufficientPrecision { needed: x.radius.clone(), available: p }.into()
                        )
                    }
                };
                PNode::Ball(Ball::new(x.center.clone(), r)?)
            }
            (PNode::Leaf(x), PNode::Leaf(y)) => {
                if x == y {
                    PNode::Leaf(x.clone())
                } else {
                    PNode::Ball(ball_inf(x, y)?)
                }
            }
        })
    }

    fn branching_number(&self, a: &PNode) -> Result<BranchingNumber, TreeError> {
        match a {
            PNode::Leaf(x) => Err(TreeError::LeafArgument(x.to_string())),
            // every pair of points meets above -inf: a single cone
            PNode::NegInf => Ok(BranchingNumber::Finite(1)),
            PNode::Ball(_) => Ok(BranchingNumber::Infinite),
        }
    }

    fn describe(&self, a: &PNode) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use crate::tree::ops::c_relation;

    fn s(terms: &[((i64, i64), i64)]) -> Series {
        Series::from_terms(terms.iter().map(|((n, d), c)| (qf(*n, *d), q(*c))), q(16))
    }

    fn t() -> Series {
        s(&[((1, 1), 1)])
    }

    #[test]
    fn ball_inf_examples() {
        let b = ball_inf(&t(), &s(&[((1, 1), 1), ((2, 1), 1)])).unwrap();
        assert_eq!(b, Ball::new(t(), q(2)).unwrap());
        let b = ball_inf(&s(&[((0, 1), 1)]), &t()).unwrap();
        assert_eq!(b.radius, q(0));
        assert!(matches!(ball_inf(&t(), &t()), Err(PuiseuxError::PrecisionExhausted(_))));
    }

    #[test]
    fn cone_index_examples() {
        let a = Ball::new(Series::zero(q(16)), q(1)).unwrap();
        assert_eq!(cone_index(&a, &s(&[((1, 1), 1), ((2, 1), 1)])).unwrap(), q(1));
        assert_eq!(cone_index(&a, &s(&[((1, 1), 2)])).unwrap(), q(2));
        assert!(matches!(cone_index(&a, &s(&[((0, 1), 1)])), Err(PuiseuxError::OutsideBall)));
    }

    #[test]
    fn branch_query() {
        let f = PuiseuxField::default();
        let br = f.branch(&PNode::Leaf(t())).unwrap();
        assert_eq!(br.at(&q(2)).unwrap(), Ball::new(t(), q(2)).unwrap());
        assert!(f.branch(&PNode::NegInf).is_err());
    }

    #[test]
    fn ball_equality_ignores_center_choice() {
        let a = Ball::new(t(), q(1)).unwrap();
        let b = Ball::new(s(&[((1, 1), 1), ((3, 2), 5)]), q(1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, Ball::new(t(), q(2)).unwrap());
    }

    #[test]
    fn tree_order() {
        let f = PuiseuxField::default();
        let x = PNode::Leaf(t());
        let y = PNode::Leaf(s(&[((1, 1), 1), ((2, 1), 1)]));
        let z = PNode::Leaf(s(&[((0, 1), 1)]));
        let xy = f.inf(&x, &y).unwrap();
        assert_eq!(xy, PNode::ball(t(), q(2)).unwrap());
        assert!(f.lt(&f.inf(&x, &z).unwrap(), &xy).unwrap());
        assert!(c_relation(&f, &z, &x, &y).unwrap());
        assert!(!c_relation(&f, &x, &y, &z).unwrap());
        assert_eq!(f.branching_number(&xy).unwrap(), BranchingNumber::Infinite);
        assert!(f.branching_number(&x).is_err());
    }

    #[test]
    fn node_json() {
        let b = PNode::ball(t(), q(1)).unwrap();
        let j = serde_json::to_string(&b).unwrap();
        assert_eq!(j, r#"{"type":"ball","center":{"terms":[{"exp":"1","coef":"1"}],"prec":"16"},"radius":"1"}"#);
        assert_eq!(serde_json::from_str::<PNode>(&j).unwrap(), b);
    }
}
