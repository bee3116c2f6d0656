//! Truncated Puiseux series in a parameter `t` with coefficients in Q(i, sqrt2).
//!
//! A series is a finite set of terms plus a precision `P`: everything from `t^P` on is
//! unknown. `P = None` marks an exact (finite) expression.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalars::{rat, rat_int, FieldElem, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("no leading term is determined at the available precision")]
    NotInvertible,
    #[error("square root of the leading coefficient {0} is not in the field")]
    NotRepresentable(Box<FieldElem>),
    #[error("constant term not determined (precision {0})")]
    InsufficientPrecision(Rational),
}

pub fn default_precision() -> Rational {
    rat_int(8)
}

/// Limit of a series at `t -> 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Limit {
    Value(FieldElem),
    Diverges,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    terms: BTreeMap<Rational, FieldElem>,
    precision: Option<Rational>,
}

fn min_prec(a: &Option<Rational>, b: &Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(x.min(y).clone()),
    }
}

fn add_prec(a: &Option<Rational>, r: &Rational) -> Option<Rational> {
    a.as_ref().map(|p| p + r)
}

impl Series {
    pub fn zero() -> Self {
        Series { terms: BTreeMap::new(), precision: None }
    }

    pub fn one() -> Self {
        Series::constant(FieldElem::one())
    }

    pub fn constant(c: FieldElem) -> Self {
        Series::monomial(c, Rational::zero())
    }

    pub fn monomial(c: FieldElem, exp: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Series { terms, precision: None }
    }

    /// The parameter `t` itself.
    pub fn t() -> Self {
        Series::monomial(FieldElem::one(), Rational::one())
    }

    /// `O(t^p)`: nothing known below or above, just the bound.
    pub fn big_o(p: Rational) -> Self {
        Series { terms: BTreeMap::new(), precision: Some(p) }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, FieldElem)>, precision: Option<Rational>) -> Self {
        let mut map: BTreeMap<Rational, FieldElem> = BTreeMap::new();
        for (e, c) in terms {
            let slot = map.entry(e).or_insert_with(FieldElem::zero);
            *slot += &c;
        }
        let mut s = Series { terms: map, precision };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if let Some(p) = &self.precision {
            let p = p.clone();
            self.terms.retain(|e, _| *e < p);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &FieldElem)> {
        self.terms.iter()
    }

    pub fn precision(&self) -> Option<&Rational> {
        self.precision.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    /// No known terms (either exactly zero, or zero up to the precision).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.precision.is_none()
    }

    pub fn coeff(&self, exp: &Rational) -> FieldElem {
        self.terms.get(exp).cloned().unwrap_or_else(FieldElem::zero)
    }

    pub fn leading(&self) -> Option<(&Rational, &FieldElem)> {
        self.terms.iter().next()
    }

    /// Lowest known exponent; for `O(t^p)` the bound `p`; `None` for exact zero.
    pub fn valuation_bound(&self) -> Option<Rational> {
        match self.leading() {
            Some((e, _)) => Some(e.clone()),
            None => self.precision.clone(),
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.precision.is_none() && self.terms.len() == 1
    }

    /// Lower the precision to at most `p`, dropping terms at or above it.
    pub fn truncate(&self, p: &Rational) -> Self {
        let precision = min_prec(&self.precision, &Some(p.clone()));
        let mut s = Series { terms: self.terms.clone(), precision };
        s.normalize();
        s
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Series::zero();
        }
        Series {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            precision: self.precision.clone(),
        }
    }

    /// Multiply by `t^e`.
    pub fn shift(&self, e: &Rational) -> Self {
        Series {
            terms: self.terms.iter().map(|(k, x)| (k + e, x.clone())).collect(),
            precision: add_prec(&self.precision, e),
        }
    }

    fn add_impl(&self, o: &Series, negate: bool) -> Series {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let slot = terms.entry(e.clone()).or_insert_with(FieldElem::zero);
            if negate {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        let mut s = Series { terms, precision: min_prec(&self.precision, &o.precision) };
        s.normalize();
        s
    }

    fn mul_impl(&self, o: &Series) -> Series {
        if self.is_exact_zero() || o.is_exact_zero() {
            return Series::zero();
        }
        let vx = self.valuation_bound().expect("nonzero");
        let vy = o.valuation_bound().expect("nonzero");
        let precision = min_prec(&add_prec(&self.precision, &vy), &add_prec(&o.precision, &vx));
        let mut terms: BTreeMap<Rational, FieldElem> = BTreeMap::new();
        for (ex, cx) in &self.terms {
            for (ey, cy) in &o.terms {
                let e = ex + ey;
                if let Some(p) = &precision {
                    if &e >= p {
                        break;
                    }
                }
                let slot = terms.entry(e).or_insert_with(FieldElem::zero);
                *slot += &(cx * cy);
            }
        }
        let mut s = Series { terms, precision };
        s.normalize();
        s
    }

    /// Split a series with a leading term into `c * t^v * (1 + u)`.
    fn unit_split(&self) -> Result<(FieldElem, Rational, Series), SeriesError> {
        let (v, c) = self.leading().ok_or(SeriesError::NotInvertible)?;
        let (v, c) = (v.clone(), c.clone());
        let cinv = c.inv().map_err(|_| SeriesError::NotInvertible)?;
        let mut u = self.shift(&-&v).scale(&cinv);
        u.terms.remove(&Rational::zero());
        Ok((c, v, u))
    }

    /// Sum of `coef(k) * u^k` for a `u` with positive valuation, to relative precision `rel`.
    fn power_sum(u: &Series, rel: &Rational, coef: impl Fn(u64) -> Rational) -> Series {
        let mut sum = Series::constant(FieldElem::one());
        let Some(vu) = u.valuation_bound() else {
            return sum;
        };
        let u = u.truncate(rel);
        let mut power = Series::one();
        let mut k: u64 = 1;
        loop {
            if Rational::from_integer(k.into()) * &vu >= *rel {
                break;
            }
            power = (&power * &u).truncate(rel);
            let c = coef(k);
            if !c.is_zero() {
                sum = &sum + &power.scale(&FieldElem::from_rational(c));
            }
            k += 1;
        }
        sum.truncate(rel)
    }

    /// Multiplicative inverse. Exact monomials invert exactly; otherwise the
    /// result is known up to `min(P - 2v, work)`.
    pub fn inv(&self, work: &Rational) -> Result<Series, SeriesError> {
        let (c, v, u) = self.unit_split()?;
        let cinv = c.inv().map_err(|_| SeriesError::NotInvertible)?;
        if u.is_exact_zero() {
            return Ok(Series::monomial(cinv, -v));
        }
        let target = match &self.precision {
            Some(p) => (p - &v - &v).min(work.clone()),
            None => work.clone(),
        };
        let rel = &target + &v;
        let geo = Series::power_sum(&u, &rel, |k| if k % 2 == 0 { rat_int(1) } else { rat_int(-1) });
        Ok(geo.scale(&cinv).shift(&-v).truncate(&target))
    }

    /// Square root following the branch of the leading coefficient's field root.
    pub fn sqrt(&self, work: &Rational) -> Result<Series, SeriesError> {
        if self.is_zero() {
            return Ok(match &self.precision {
                None => Series::zero(),
                Some(p) => Series::big_o(p / rat_int(2)),
            });
        }
        let (c, v, u) = self.unit_split()?;
        let root = c.sqrt().ok_or_else(|| SeriesError::NotRepresentable(Box::new(c.clone())))?;
        let half_v = &v / rat_int(2);
        if u.is_exact_zero() {
            return Ok(Series::monomial(root, half_v));
        }
        let target = match &self.precision {
            Some(p) => (p - &half_v).min(work.clone()),
            None => work.clone(),
        };
        let rel = &target - &half_v;
        let binom = |k: u64| {
            // binomial(1/2, k)
            let mut acc = rat_int(1);
            for j in 0..k {
                acc = acc * (rat(1, 2) - rat_int(j as i64)) / rat_int(j as i64 + 1);
            }
            acc
        };
        let s = Series::power_sum(&u, &rel, binom);
        Ok(s.scale(&root).shift(&half_v).truncate(&target))
    }

    /// Integer power; negative exponents go through [`Series::inv`].
    pub fn powi(&self, n: i64, work: &Rational) -> Result<Series, SeriesError> {
        let base = if n < 0 { self.inv(work)? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Series::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    pub fn limit_at_zero(&self) -> Result<Limit, SeriesError> {
        if self.terms.keys().any(|e| e.is_negative()) {
            return Ok(Limit::Diverges);
        }
        match &self.precision {
            Some(p) if !p.is_positive() => Err(SeriesError::InsufficientPrecision(p.clone())),
            _ => Ok(Limit::Value(self.coeff(&Rational::zero()))),
        }
    }

    /// Value at a specific `t`, for exact series with non-negative integer exponents.
    pub fn eval_at(&self, t: &FieldElem) -> Option<FieldElem> {
        if self.precision.is_some() {
            return None;
        }
        let mut acc = FieldElem::zero();
        for (e, c) in &self.terms {
            if !e.is_integer() || e.is_negative() {
                return None;
            }
            let k: u64 = e.to_integer().try_into().ok()?;
            acc += &(c * &t.pow(k));
        }
        Some(acc)
    }

    /// Equality of all coefficients below `min(P_self, P_other)`.
    pub fn agrees_with(&self, o: &Series) -> bool {
        let p = min_prec(&self.precision, &o.precision);
        match p {
            None => self.terms == o.terms,
            Some(p) => self.truncate(&p).terms == o.truncate(&p).terms,
        }
    }
}

impl Default for Series {
    fn default() -> Self {
        Series::zero()
    }
}

impl From<FieldElem> for Series {
    fn from(c: FieldElem) -> Self {
        Series::constant(c)
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        self.add_impl(o, false)
    }
}

impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        self.add_impl(o, true)
    }
}

impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        self.mul_impl(o)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(&FieldElem::from_int(-1))
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Series> for Series {
            type Output = Series;
            fn $m(self, o: Series) -> Series {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

pub(crate) fn fmt_exponent(e: &Rational) -> String {
    if e.is_integer() && !e.is_negative() {
        e.numer().to_string()
    } else if e.is_integer() {
        format!("({})", e.numer())
    } else {
        format!("({}/{})", e.numer(), e.denom())
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let cs = c.to_string();
            if e.is_zero() {
                write!(f, "({cs})")?;
            } else if c.is_one() {
                write!(f, "t^{}", fmt_exponent(e))?;
            } else {
                write!(f, "({cs})*t^{}", fmt_exponent(e))?;
            }
        }
        match &self.precision {
            Some(p) => {
                if !first {
                    f.write_str(" + ")?;
                }
                write!(f, "O(t^{})", fmt_exponent(p))
            }
            None if first => f.write_str("0"),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(s: &str) -> FieldElem {
        FieldElem::parse(s).unwrap()
    }

    fn mono(c: &str, n: i64, d: i64) -> Series {
        Series::monomial(fe(c), rat(n, d))
    }

    fn p8() -> Rational {
        default_precision()
    }

    #[test]
    fn arithmetic_examples() {
        let t = Series::t();
        let tinv = t.inv(&p8()).unwrap();
        assert_eq!(&t * &tinv, Series::one());
        let a = &Series::one() + &t;
        assert!((&a - &a).is_zero());
        let s = mono("sqrt2", 1, 2);
        assert_eq!(&s * &s, mono("2", 1, 1));
    }

    #[test]
    fn inverse_of_unit() {
        let x = &Series::one() - &mono("sqrt2", 1, 2);
        let y = x.inv(&p8()).unwrap();
        assert_eq!(y.coeff(&rat_int(0)), fe("1"));
        assert_eq!(y.coeff(&rat(1, 2)), fe("sqrt2"));
        assert_eq!(y.coeff(&rat_int(1)), fe("2"));
        let back = &x * &y;
        assert!(back.agrees_with(&Series::one()));
        assert_eq!(back.precision(), Some(&p8()));
        assert_eq!(Series::zero().inv(&p8()), Err(SeriesError::NotInvertible));
        assert_eq!(Series::big_o(rat_int(3)).inv(&p8()), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(mono("2", 1, 1).sqrt(&p8()).unwrap(), mono("sqrt2", 1, 2));
        assert_eq!(mono("3", 1, 1).sqrt(&p8()), Err(SeriesError::NotRepresentable(Box::new(fe("3")))));
        let r = mono("sqrt2", 1, 2);
        let q = &(&Series::one() + &r) * &(&Series::one() - &r).inv(&p8()).unwrap();
        let s = q.sqrt(&p8()).unwrap();
        assert_eq!(s.coeff(&rat_int(0)), fe("1"));
        assert_eq!(s.coeff(&rat(1, 2)), fe("sqrt2"));
        assert_eq!(s.coeff(&rat_int(1)), fe("1"));
        assert!((&s * &s).agrees_with(&q));
    }

    #[test]
    fn limits() {
        let t = Series::t();
        assert_eq!((&Series::one() + &t).limit_at_zero(), Ok(Limit::Value(fe("1"))));
        assert_eq!(t.inv(&p8()).unwrap().limit_at_zero(), Ok(Limit::Diverges));
        assert_eq!(mono("1", 1, 2).limit_at_zero(), Ok(Limit::Value(fe("0"))));
        assert_eq!(Series::big_o(rat_int(0)).limit_at_zero(), Err(SeriesError::InsufficientPrecision(rat_int(0))));
    }

    #[test]
    fn precision_propagation() {
        // (1 + O(t^2)) * t^-1 is t^-1 + O(t)
        let x = Series::from_terms([(rat_int(0), fe("1"))], Some(rat_int(2)));
        let y = &x * &mono("1", -1, 1);
        assert_eq!(y.precision(), Some(&rat_int(1)));
        // inverse of t^-1 + 1 + O(t^2): relative precision 3, absolute 4
        let z = Series::from_terms([(rat_int(-1), fe("1")), (rat_int(0), fe("1"))], Some(rat_int(2)));
        assert_eq!(z.inv(&p8()).unwrap().precision(), Some(&rat_int(4)));
    }

    #[test]
    fn display() {
        let x = Series::from_terms([(rat_int(0), fe("1")), (rat(1, 2), fe("sqrt2"))], Some(rat_int(3)));
        assert_eq!(x.to_string(), "(1) + (sqrt2)*t^(1/2) + O(t^3)");
    }
}
