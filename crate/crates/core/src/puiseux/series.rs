use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::PuiseuxError;
use crate::rational::{self, qstr, Q};

/// Truncated Puiseux series `sum c_i t^{e_i} + O(t^prec)` over the rationals.
///
/// Exponents are strictly increasing, coefficients non-zero and every
/// exponent lies below the precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct Series {
    terms: Vec<(Q, Q)>,
    prec: Q,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesJson {
    pub terms: Vec<TermJson>,
    #[serde(with = "qstr")]
    pub prec: Q,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(with = "qstr")]
    pub exp: Q,
    #[serde(with = "qstr")]
    pub coef: Q,
}

impl TryFrom<SeriesJson> for Series {
    type Error = PuiseuxError;

    fn try_from(j: SeriesJson) -> Result<Self, PuiseuxError> {
        Series::new(j.terms.into_iter().map(|t| (t.exp, t.coef)).collect(), j.prec)
    }
}

impl From<Series> for SeriesJson {
    fn from(s: Series) -> Self {
        SeriesJson { terms: s.terms.into_iter().map(|(exp, coef)| TermJson { exp, coef }).collect(), prec: s.prec }
    }
}

/// `v(x)`: the least exponent, or only a lower bound when no digit below the
/// precision is known.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Q),
    /// Zero up to `O(t^p)`: the valuation is at least `p`.
    AtLeast(Q),
}

impl Valuation {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// The exact value or the known lower bound.
    pub fn bound(&self) -> &Q {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    /// Decides `v >= r`, failing when the answer depends on unknown digits.
    pub fn ge(&self, r: &Q) -> Result<bool, PuiseuxError> {
        match self {
            Valuation::Finite(v) => Ok(v >= r),
            Valuation::AtLeast(p) if p >= r => Ok(true),
            Valuation::AtLeast(p) => {
                Err(PuiseuxError::InsufficientPrecision { needed: r.clone(), available: p.clone() })
            }
        }
    }

    /// Decides `v > r`.
    pub fn gt(&self, r: &Q) -> Result<bool, PuiseuxError> {
        match self {
            Valuation::Finite(v) => Ok(v > r),
            Valuation::AtLeast(p) if p > r => Ok(true),
            Valuation::AtLeast(p) => {
                Err(PuiseuxError::InsufficientPrecision { needed: r.clone(), available: p.clone() })
            }
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(p) => write!(f, "+inf@{p}"),
        }
    }
}

fn collect(map: BTreeMap<Q, Q>, prec: &Q) -> Vec<(Q, Q)> {
    map.into_iter().filter(|(e, c)| !c.is_zero() && e < prec).collect()
}

impl Series {
    pub fn new(terms: Vec<(Q, Q)>, prec: Q) -> Result<Self, PuiseuxError> {
        for w in terms.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(PuiseuxError::InvalidSeries("exponents must strictly increase".into()));
            }
        }
        if terms.iter().any(|(_, c)| c.is_zero()) {
            return Err(PuiseuxError::InvalidSeries("zero coefficient".into()));
        }
        if terms.last().is_some_and(|(e, _)| *e >= prec) {
            return Err(PuiseuxError::InvalidSeries("exponent at or above the precision".into()));
        }
        Ok(Series { terms, prec })
    }

    /// Normalizing constructor: sorts, merges equal exponents, drops zero
    /// coefficients and everything at or above `prec`.
    pub fn from_terms(terms: impl IntoIterator<Item = (Q, Q)>, prec: Q) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(Q::zero) += c;
        }
        Series { terms: collect(map, &prec), prec }
    }

    pub fn zero(prec: Q) -> Self {
        Series { terms: Vec::new(), prec }
    }

    pub fn constant(c: Q, prec: Q) -> Self {
        Self::monomial(c, Q::zero(), prec)
    }

    /// `c t^e + O(t^prec)`.
    pub fn monomial(c: Q, e: Q, prec: Q) -> Self {
        Self::from_terms([(e, c)], prec)
    }

    pub fn terms(&self) -> &[(Q, Q)] {
        &self.terms
    }

    pub fn precision(&self) -> &Q {
        &self.prec
    }

    /// No known non-zero digit below the precision.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn val(&self) -> Valuation {
        match self.terms.first() {
            Some((e, _)) => Valuation::Finite(e.clone()),
            None => Valuation::AtLeast(self.prec.clone()),
        }
    }

    pub fn leading(&self) -> Option<&(Q, Q)> {
        self.terms.first()
    }

    /// Coefficient of `t^e` (zero when absent); `e` must be below the precision.
    pub fn coeff(&self, e: &Q) -> Result<Q, PuiseuxError> {
        if *e >= self.prec {
            return Err(PuiseuxError::InsufficientPrecision { needed: e.clone(), available: self.prec.clone() });
        }
        Ok(self.terms.iter().find(|(x, _)| x == e).map(|(_, c)| c.clone()).unwrap_or_else(Q::zero))
    }

    /// Residue class in `K/v = Q`: the constant coefficient.
    pub fn residue(&self) -> Result<Q, PuiseuxError> {
        if let Some((e, _)) = self.terms.first() {
            if e.is_negative() {
                return Err(PuiseuxError::NegativeValuation(e.clone()));
            }
        }
        if !self.prec.is_positive() {
            return Err(PuiseuxError::InsufficientPrecision { needed: Q::zero(), available: self.prec.clone() });
        }
        self.coeff(&Q::zero())
    }

    /// Lowers the precision to `p` (no-op when already coarser).
    pub fn truncate(&self, p: &Q) -> Series {
        let prec = if *p < self.prec { p.clone() } else { self.prec.clone() };
        Series { terms: self.terms.iter().filter(|(e, _)| *e < prec).cloned().collect(), prec }
    }

    /// Multiplication by `t^r`.
    pub fn shift(&self, r: &Q) -> Series {
        Series { terms: self.terms.iter().map(|(e, c)| (e + r, c.clone())).collect(), prec: &self.prec + r }
    }

    pub fn scale(&self, k: &Q) -> Series {
        if k.is_zero() {
            return Series::zero(self.prec.clone());
        }
        Series { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(), prec: self.prec.clone() }
    }

    /// Division; the output precision is `min(px - v(y), py + v(x) - 2 v(y))`
    /// with `v(x)` read as `px` when `x` has no known digits.
    pub fn div(&self, y: &Series) -> Result<Series, PuiseuxError> {
        let (vy, cy) = y.terms.first().cloned().ok_or(PuiseuxError::DivisionByZero(y.prec.clone()))?;
        let vx = self.val().bound().clone();
        let prec = (&self.prec - &vy).min(&y.prec + &vx - &vy - &vy);
        if self.is_zero() {
            return Ok(Series::zero(prec));
        }
        // y = cy t^vy (1 + z), v(z) > 0
        let z: Vec<(Q, Q)> = y.terms[1..].iter().map(|(e, c)| (e - &vy, -(c / &cy))).collect();
        let cutoff = &prec - &vx + &vy;
        let mut inverse: BTreeMap<Q, Q> = BTreeMap::new();
        if cutoff.is_positive() {
            inverse.insert(Q::zero(), Q::one());
        }
        let mut power: BTreeMap<Q, Q> = inverse.clone();
        while !power.is_empty() && !z.is_empty() {
            let mut next: BTreeMap<Q, Q> = BTreeMap::new();
            for (e1, c1) in &power {
                for (e2, c2) in &z {
                    let e = e1 + e2;
                    if e < cutoff {
                        *next.entry(e).or_insert_with(Q::zero) += c1 * c2;
                    }
                }
            }
            next.retain(|_, c| !c.is_zero());
            for (e, c) in &next {
                *inverse.entry(e.clone()).or_insert_with(Q::zero) += c;
            }
            power = next;
        }
        let inverse = Series { terms: collect(inverse, &cutoff), prec: cutoff };
        let scaled = Q::one() / &cy;
        let mut out = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &inverse.terms {
                let e = e1 + e2 - &vy;
                if e < prec {
                    *out.entry(e).or_insert_with(Q::zero) += c1 * c2 * &scaled;
                }
            }
        }
        Ok(Series { terms: collect(out, &prec), prec })
    }

    fn merge(&self, other: &Series, sign: i64) -> Series {
        let prec = (&self.prec).min(&other.prec).clone();
        let mut map = BTreeMap::new();
        for (e, c) in &self.terms {
            *map.entry(e.clone()).or_insert_with(Q::zero) += c;
        }
        let s = rational::q(sign);
        for (e, c) in &other.terms {
            *map.entry(e.clone()).or_insert_with(Q::zero) += c * &s;
        }
        Series { terms: collect(map, &prec), prec }
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.merge(rhs, 1)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.merge(rhs, -1)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(), prec: self.prec.clone() }
    }
}

/// Cauchy product; output precision `min(px + v(y), py + v(x))`.
impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let vx = self.val().bound().clone();
        let vy = rhs.val().bound().clone();
        let prec = (&self.prec + &vy).min(&rhs.prec + &vx);
        let mut map = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = e1 + e2;
                if e < prec {
                    *map.entry(e).or_insert_with(Q::zero) += c1 * c2;
                }
            }
        }
        Series { terms: collect(map, &prec), prec }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let c = c.abs();
            match (c.is_one(), e.is_zero()) {
                (_, true) => write!(f, "{c}")?,
                (true, false) => write!(f, "t^{e}")?,
                (false, false) => write!(f, "{c}*t^{e}")?,
            }
        }
        if !self.terms.is_empty() {
            f.write_str(" + ")?;
        }
        write!(f, "O(t^{})", self.prec)
    }
}

impl PartialOrd for Valuation {
    /// Orders by the known value; `AtLeast(p)` sorts as `p`. Only meaningful
    /// for comparisons that do not depend on the unknown digits.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.bound().cmp(other.bound()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn s(terms: &[((i64, i64), i64)], prec: i64) -> Series {
        Series::from_terms(terms.iter().map(|((n, d), c)| (qf(*n, *d), q(*c))), q(prec))
    }

    #[test]
    fn add_cancels() {
        let x = s(&[((1, 2), 1)], 2);
        let y = s(&[((1, 2), -1), ((1, 1), 1)], 2);
        assert_eq!(&x + &y, s(&[((1, 1), 1)], 2));
        assert_eq!(&x + &Series::zero(q(2)), x);
        assert!((&x - &x).is_zero());
        assert_eq!((&x - &x).precision(), &q(2));
    }

    #[test]
    fn mul_examples() {
        let x = s(&[((1, 1), 2)], 10);
        let y = s(&[((-1, 1), 3)], 10);
        let p = &x * &y;
        assert_eq!(p.terms(), &[(q(0), q(6))]);
        // min(10 + (-1), 10 + 1)
        assert_eq!(p.precision(), &q(9));
        let one = Series::constant(q(1), q(10));
        assert_eq!(&x * &one, x);
    }

    #[test]
    fn geometric_division() {
        let one = Series::constant(q(1), q(3));
        let y = s(&[((0, 1), 1), ((1, 1), -1)], 3);
        let r = one.div(&y).unwrap();
        assert_eq!(r, s(&[((0, 1), 1), ((1, 1), 1), ((2, 1), 1)], 3));
        assert!(matches!(one.div(&Series::zero(q(3))), Err(PuiseuxError::DivisionByZero(_))));
    }

    #[test]
    fn valuation_and_residue() {
        assert_eq!(s(&[((1, 1), 1), ((2, 1), 1)], 5).val(), Valuation::Finite(q(1)));
        assert_eq!(s(&[((0, 1), 3), ((1, 1), 1)], 5).val(), Valuation::Finite(q(0)));
        assert_eq!(Series::zero(q(5)).val(), Valuation::AtLeast(q(5)));
        assert_eq!(s(&[((0, 1), 3), ((1, 1), 1)], 5).residue().unwrap(), q(3));
        assert_eq!(s(&[((1, 1), 1)], 5).residue().unwrap(), q(0));
        assert!(matches!(s(&[((-1, 1), 1)], 5).residue(), Err(PuiseuxError::NegativeValuation(_))));
        assert!(s(&[((-1, 1), 1)], 0).residue().is_err());
    }

    #[test]
    fn json_shape() {
        let x = s(&[((1, 2), 3)], 4);
        let j = serde_json::to_string(&x).unwrap();
        assert_eq!(j, r#"{"terms":[{"exp":"1/2","coef":"3"}],"prec":"4"}"#);
        assert_eq!(serde_json::from_str::<Series>(&j).unwrap(), x);
        assert!(serde_json::from_str::<Series>(r#"{"terms":[{"exp":"5","coef":"1"}],"prec":"4"}"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(s(&[((0, 1), 1), ((1, 2), -2)], 3).to_string(), "1 - 2*t^1/2 + O(t^3)");
    }
}
