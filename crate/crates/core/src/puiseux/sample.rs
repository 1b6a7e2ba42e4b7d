//! Seeded samplers for series and for members of regions of the ball tree.

use rand::Rng;

use super::{Ball, PNode, PuiseuxError, Series};
use crate::rational::{q, Q};
use crate::tree::{Region, TreeError};

const DENOMINATORS: [i64; 4] = [1, 2, 3, 4];

/// A random rational in the open interval `(lo, hi)` with a small denominator.
pub fn exponent_between<R: Rng>(rng: &mut R, lo: &Q, hi: &Q) -> Q {
    for _ in 0..8 {
        let d = q(DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())]);
        let a = (lo * &d).floor().to_integer() + 1;
        let b = (hi * &d).ceil().to_integer() - 1;
        if a <= b {
            let span = i64::try_from(&b - &a).unwrap_or(i64::MAX).min(1 << 20);
            let n = Q::from_integer(a + rng.gen_range(0..=span));
            return n / d;
        }
    }
    (lo + hi) / q(2)
}

/// A small non-zero integer coefficient.
pub fn coefficient<R: Rng>(rng: &mut R) -> Q {
    let c = rng.gen_range(1..=5);
    q(if rng.gen_bool(0.5) { c } else { -c })
}

/// Up to `max_terms` random terms with exponents in `(lo, prec)`.
pub fn terms_above<R: Rng>(rng: &mut R, lo: &Q, prec: &Q, max_terms: usize) -> Series {
    let k = rng.gen_range(0..=max_terms);
    let terms: Vec<_> = (0..k).map(|_| (exponent_between(rng, lo, prec), coefficient(rng))).collect();
    Series::from_terms(terms, prec.clone())
}

/// A term-sparse series with exponents in `[-2, prec)`; non-zero.
pub fn random_series<R: Rng>(rng: &mut R, prec: &Q) -> Series {
    let lead = exponent_between(rng, &q(-3), &q(4).min(prec - q(1)));
    let head = Series::monomial(coefficient(rng), lead.clone(), prec.clone());
    &head + &terms_above(rng, &lead, prec, 3)
}

/// A random member of the cone of `ball` with index `k`, at precision `prec`.
pub fn point_in_cone<R: Rng>(rng: &mut R, ball: &Ball, k: &Q, prec: &Q) -> Series {
    let c = ball.center.truncate(prec);
    let step = Series::monomial(k.clone(), ball.radius.clone(), c.precision().clone());
    &(&c + &step) + &terms_above(rng, &ball.radius, c.precision(), 2)
}

/// A random member of the sphere `v(x - c) = s`.
pub fn point_at_distance<R: Rng>(rng: &mut R, c: &Series, s: &Q, prec: &Q) -> Series {
    let c = c.truncate(prec);
    let step = Series::monomial(coefficient(rng), s.clone(), c.precision().clone());
    &(&c + &step) + &terms_above(rng, s, c.precision(), 2)
}

fn pick_index<R: Rng>(rng: &mut R, avoid: &[Q]) -> Q {
    loop {
        let k = q(rng.gen_range(-6..=6));
        if !avoid.contains(&k) {
            return k;
        }
    }
}

fn witness_index(basis: &Ball, w: &PNode) -> Result<Q, TreeError> {
    let p = w.point().ok_or_else(|| TreeError::InvalidRegion("-inf cannot be a witness".into()))?;
    Ok(super::cone_index(basis, p)?)
}

/// A random leaf of the region (leaf reading).
pub fn sample_region<R: Rng>(rng: &mut R, region: &Region<PNode>, prec: &Q) -> Result<Series, TreeError> {
    match region {
        Region::Whole => Ok(random_series(rng, prec)),
        Region::Point { at } => match at {
            PNode::Leaf(x) => Ok(x.clone()),
            other => Err(TreeError::NotALeaf(other.to_string())),
        },
        Region::Cone { basis, witness } => match basis {
            PNode::NegInf => Ok(random_series(rng, prec)),
            PNode::Leaf(x) => Err(TreeError::LeafArgument(x.to_string())),
            PNode::Ball(b) => {
                let k = witness_index(b, witness)?;
                Ok(point_in_cone(rng, b, &k, prec))
            }
        },
        Region::LevelSet { basis, removed } => match basis {
            PNode::NegInf => Ok(random_series(rng, prec)),
            PNode::Leaf(x) => Ok(x.clone()),
            PNode::Ball(b) => {
                let avoid = removed.iter().map(|w| witness_index(b, w)).collect::<Result<Vec<_>, _>>()?;
                let k = pick_index(rng, &avoid);
                Ok(point_in_cone(rng, b, &k, prec))
            }
        },
        Region::Interval { lo, hi } => {
            let c = hi.point().ok_or_else(|| TreeError::InvalidRegion("interval ends at -inf".into()))?;
            let top = match hi {
                PNode::Ball(b) => b.radius.clone(),
                _ => match lo {
                    PNode::Ball(b) => &b.radius + q(4),
                    _ => q(4),
                },
            };
            let bottom = match lo {
                PNode::Ball(b) => b.radius.clone(),
                _ => &top - q(4),
            };
            let s = exponent_between(rng, &bottom, &top);
            if s >= *prec {
                return Err(PuiseuxError::InsufficientPrecision { needed: s, available: prec.clone() }.into());
            }
            Ok(point_at_distance(rng, c, &s, prec))
        }
    }
}
