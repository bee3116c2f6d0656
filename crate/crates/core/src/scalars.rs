//! Exact arithmetic in the quartic field Q(i, sqrt2).
//!
//! An element is stored by its coordinates over the basis `{1, i, sqrt2, i*sqrt2}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact square root of a rational, if it is a rational square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

/// Element `p + q*sqrt2` of the real quadratic subfield.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Q2 {
    p: Rational,
    q: Rational,
}

impl Q2 {
    fn new(p: Rational, q: Rational) -> Self {
        Q2 { p, q }
    }

    fn zero() -> Self {
        Q2::new(Rational::zero(), Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    fn add(&self, o: &Q2) -> Q2 {
        Q2::new(&self.p + &o.p, &self.q + &o.q)
    }

    fn sub(&self, o: &Q2) -> Q2 {
        Q2::new(&self.p - &o.p, &self.q - &o.q)
    }

    fn mul(&self, o: &Q2) -> Q2 {
        let two = rat_int(2);
        Q2::new(&self.p * &o.p + two * &self.q * &o.q, &self.p * &o.q + &self.q * &o.p)
    }

    fn scale(&self, r: &Rational) -> Q2 {
        Q2::new(&self.p * r, &self.q * r)
    }

    fn inv(&self) -> Option<Q2> {
        let norm = &self.p * &self.p - rat_int(2) * &self.q * &self.q;
        if norm.is_zero() {
            return None;
        }
        Some(Q2::new(&self.p / &norm, -&self.q / &norm))
    }

    /// All square roots inside Q(sqrt2).
    fn sqrt(&self) -> Option<Q2> {
        if self.is_zero() {
            return Some(Q2::zero());
        }
        if self.q.is_zero() {
            if let Some(a) = rational_sqrt(&self.p) {
                return Some(Q2::new(a, Rational::zero()));
            }
            if let Some(b) = rational_sqrt(&(&self.p / rat_int(2))) {
                return Some(Q2::new(Rational::zero(), b));
            }
            return None;
        }
        // (a + b s)^2 = p + q s  =>  a^2 = (p +- sqrt(p^2 - 2 q^2)) / 2, b = q / (2a)
        let disc = &self.p * &self.p - rat_int(2) * &self.q * &self.q;
        let r = rational_sqrt(&disc)?;
        for cand in [(&self.p + &r) / rat_int(2), (&self.p - &r) / rat_int(2)] {
            if cand.is_zero() {
                continue;
            }
            if let Some(a) = rational_sqrt(&cand) {
                let b = &self.q / (rat_int(2) * &a);
                return Some(Q2::new(a, b));
            }
        }
        None
    }
}

/// `a + b*i + c*sqrt2 + d*i*sqrt2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl FieldElem {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        FieldElem { a, b, c, d }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn i() -> Self {
        FieldElem::new(Rational::zero(), Rational::one(), Rational::zero(), Rational::zero())
    }

    pub fn sqrt2() -> Self {
        FieldElem::new(Rational::zero(), Rational::zero(), Rational::one(), Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        FieldElem::new(r, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.b.is_zero() && self.c.is_zero() && self.d.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    fn re(&self) -> Q2 {
        Q2::new(self.a.clone(), self.c.clone())
    }

    fn im(&self) -> Q2 {
        Q2::new(self.b.clone(), self.d.clone())
    }

    fn from_parts(re: Q2, im: Q2) -> Self {
        FieldElem::new(re.p, im.p, re.q, im.q)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FieldElem::new(&self.a * r, &self.b * r, &self.c * r, &self.d * r)
    }

    /// Complex conjugation `i -> -i`.
    pub fn conj(&self) -> Self {
        FieldElem::new(self.a.clone(), -&self.b, self.c.clone(), -&self.d)
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        // 1/(x + y i) = (x - y i) / (x^2 + y^2)
        let (x, y) = (self.re(), self.im());
        let n = x.mul(&x).add(&y.mul(&y));
        let ninv = n.inv().ok_or(ScalarError::DivisionByZero)?;
        Ok(FieldElem::from_parts(x.mul(&ninv), Q2::new(-&y.p, -&y.q).mul(&ninv)))
    }

    pub fn checked_div(&self, o: &FieldElem) -> Result<Self, ScalarError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = FieldElem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Square root inside the field, choosing the lexicographically larger of the two roots.
    pub fn sqrt(&self) -> Option<Self> {
        let root = self.any_sqrt()?;
        let other = -&root;
        Some(if root.lex_cmp(&other) == Ordering::Less { other } else { root })
    }

    fn any_sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(FieldElem::zero());
        }
        let (u, v) = (self.re(), self.im());
        if v.is_zero() {
            if let Some(x) = u.sqrt() {
                return Some(FieldElem::from_parts(x, Q2::zero()));
            }
            let neg = Q2::new(-&u.p, -&u.q);
            return neg.sqrt().map(|y| FieldElem::from_parts(Q2::zero(), y));
        }
        // x^2 - y^2 = u, 2xy = v  =>  x^2 = (u +- sqrt(u^2 + v^2)) / 2
        let n = u.mul(&u).add(&v.mul(&v)).sqrt()?;
        let half = rat(1, 2);
        for cand in [u.add(&n).scale(&half), u.sub(&n).scale(&half)] {
            if cand.is_zero() {
                continue;
            }
            if let Some(x) = cand.sqrt() {
                let y = v.mul(&x.scale(&rat_int(2)).inv()?);
                return Some(FieldElem::from_parts(x, y));
            }
        }
        None
    }

    /// Lexicographic order on the coordinate tuple (a, b, c, d).
    pub fn lex_cmp(&self, o: &FieldElem) -> Ordering {
        self.a.cmp(&o.a).then_with(|| self.b.cmp(&o.b)).then_with(|| self.c.cmp(&o.c)).then_with(|| self.d.cmp(&o.d))
    }

    pub fn parse(text: &str) -> Result<Self, ScalarError> {
        ScalarParser::new(text).parse_all()
    }
}

impl Default for FieldElem {
    fn default() -> Self {
        FieldElem::zero()
    }
}

impl Zero for FieldElem {
    fn zero() -> Self {
        FieldElem::zero()
    }
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
}

impl One for FieldElem {
    fn one() -> Self {
        FieldElem::one()
    }
}

impl From<i64> for FieldElem {
    fn from(n: i64) -> Self {
        FieldElem::from_int(n)
    }
}

impl From<Rational> for FieldElem {
    fn from(r: Rational) -> Self {
        FieldElem::from_rational(r)
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        FieldElem::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        FieldElem::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c, &self.d - &o.d)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        if self.is_zero() || o.is_zero() {
            return FieldElem::zero();
        }
        // basis 1, i, sqrt2, i*sqrt2; skip zero coordinates, which dominate in practice
        let l = [&self.a, &self.b, &self.c, &self.d];
        let r = [&o.a, &o.b, &o.c, &o.d];
        // (slot, sign, factor 2) for each product of basis elements
        const TABLE: [[(usize, i8, bool); 4]; 4] = [
            [(0, 1, false), (1, 1, false), (2, 1, false), (3, 1, false)],
            [(1, 1, false), (0, -1, false), (3, 1, false), (2, -1, false)],
            [(2, 1, false), (3, 1, false), (0, 1, true), (1, 1, true)],
            [(3, 1, false), (2, -1, false), (1, 1, true), (0, -1, true)],
        ];
        let mut out: [Rational; 4] = Default::default();
        for (p, x) in l.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (q, y) in r.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let (slot, sign, double) = TABLE[p][q];
                let mut v = *x * *y;
                if double {
                    v = &v + &v;
                }
                if sign < 0 {
                    out[slot] -= v;
                } else {
                    out[slot] += v;
                }
            }
        }
        let [a, b, c, d] = out;
        FieldElem::new(a, b, c, d)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, o: FieldElem) -> FieldElem {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, o: &FieldElem) -> FieldElem {
                (&self).$m(o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// Panics on division by zero, like integer division; use [`FieldElem::checked_div`] otherwise.
impl Div<FieldElem> for FieldElem {
    type Output = FieldElem;
    fn div(self, o: FieldElem) -> FieldElem {
        self.checked_div(&o).expect("division by zero")
    }
}

impl<'a> Div<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn div(self, o: &FieldElem) -> FieldElem {
        self.checked_div(o).expect("division by zero")
    }
}

impl AddAssign<&FieldElem> for FieldElem {
    fn add_assign(&mut self, o: &FieldElem) {
        self.a += &o.a;
        self.b += &o.b;
        self.c += &o.c;
        self.d += &o.d;
    }
}

impl SubAssign<&FieldElem> for FieldElem {
    fn sub_assign(&mut self, o: &FieldElem) {
        self.a -= &o.a;
        self.b -= &o.b;
        self.c -= &o.c;
        self.d -= &o.d;
    }
}

impl MulAssign<&FieldElem> for FieldElem {
    fn mul_assign(&mut self, o: &FieldElem) {
        *self = &*self * o;
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: terms in basis order, `coeff*symbol`, coefficient 1 omitted.
impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: [(&Rational, &str); 4] = [(&self.a, ""), (&self.b, "i"), (&self.c, "sqrt2"), (&self.d, "i*sqrt2")];
        let mut first = true;
        for (coef, sym) in parts {
            if coef.is_zero() {
                continue;
            }
            let neg = coef.is_negative();
            let mag = coef.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if sym.is_empty() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(sym)?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), sym)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl FromStr for FieldElem {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldElem::parse(s)
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FieldElem::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Recursive descent over the scalar grammar:
/// `sum := ['+'|'-'] prod (('+'|'-') prod)*`, `prod := atom (('*'|'/') atom)*`,
/// `atom := integer | 'i' | 'sqrt2' | '(' sum ')'`.
struct ScalarParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> ScalarParser<'a> {
    fn new(text: &'a str) -> Self {
        ScalarParser { src: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: &str) -> Result<T, ScalarError> {
        Err(ScalarError::Syntax { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<FieldElem, ScalarError> {
        let v = self.sum(0)?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(v)
    }

    fn sum(&mut self, depth: usize) -> Result<FieldElem, ScalarError> {
        if depth > 64 {
            return self.err("nesting too deep");
        }
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.prod(depth)?
            }
            Some(b'+') => {
                self.pos += 1;
                self.prod(depth)?
            }
            _ => self.prod(depth)?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += &self.prod(depth)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= &self.prod(depth)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn prod(&mut self, depth: usize) -> Result<FieldElem, ScalarError> {
        let mut acc = self.atom(depth)?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= &self.atom(depth)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.atom(depth)?;
                    acc = acc
                        .checked_div(&d)
                        .map_err(|_| ScalarError::Syntax { pos: at, msg: "division by zero".into() })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self, depth: usize) -> Result<FieldElem, ScalarError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = digits.parse().unwrap();
                Ok(FieldElem::from_rational(Rational::from_integer(n)))
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum(depth + 1)?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    b"i" => Ok(FieldElem::i()),
                    b"sqrt2" => Ok(FieldElem::sqrt2()),
                    _ => {
                        self.pos = start;
                        self.err("unknown symbol; expected 'i' or 'sqrt2'")
                    }
                }
            }
            Some(_) => self.err("expected number, 'i', 'sqrt2' or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(s: &str) -> FieldElem {
        FieldElem::parse(s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(fe("1+i") * fe("1-i"), fe("2"));
        assert_eq!(fe("1").checked_div(&fe("i")).unwrap(), fe("-i"));
        assert_eq!(fe("sqrt2/2") * fe("sqrt2/2"), fe("1/2"));
        assert_eq!(fe("1").checked_div(&fe("0")), Err(ScalarError::DivisionByZero));
        assert_eq!(fe("i") * fe("i"), fe("-1"));
        assert_eq!(fe("sqrt2") * fe("sqrt2"), fe("2"));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(fe("2").sqrt(), Some(fe("sqrt2")));
        assert_eq!(fe("-1").sqrt(), Some(fe("i")));
        assert_eq!(fe("1/2").sqrt(), Some(fe("sqrt2/2")));
        assert_eq!(fe("3").sqrt(), None);
        assert_eq!(fe("-2").sqrt(), Some(fe("i*sqrt2")));
        // sqrt(i) = (1+i)/sqrt2
        assert_eq!(fe("i").sqrt(), Some(fe("sqrt2/2 + i*sqrt2/2")));
        // 3 + 2 sqrt2 = (1 + sqrt2)^2
        assert_eq!(fe("3 + 2*sqrt2").sqrt(), Some(fe("1 + sqrt2")));
        assert_eq!(fe("0").sqrt(), Some(fe("0")));
        assert_eq!(fe("4").sqrt(), Some(fe("2")));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(fe("-1/2*i"), FieldElem::new(rat_int(0), rat(-1, 2), rat_int(0), rat_int(0)));
        assert_eq!(fe("sqrt2/2"), FieldElem::new(rat_int(0), rat_int(0), rat(1, 2), rat_int(0)));
        assert_eq!(fe("3/4 + i*sqrt2"), FieldElem::new(rat(3, 4), rat_int(0), rat_int(0), rat_int(1)));
        assert_eq!(fe("-1/2*i + 3/4*sqrt2").to_string(), "-1/2*i + 3/4*sqrt2");
    }

    #[test]
    fn parse_errors_report_position() {
        match FieldElem::parse("1 + x") {
            Err(ScalarError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(FieldElem::parse("").is_err());
        assert!(FieldElem::parse("1/0").is_err());
        assert!(FieldElem::parse("(1").is_err());
        assert!(FieldElem::parse("1 2").is_err());
    }

    #[test]
    fn canonical_format() {
        assert_eq!(FieldElem::zero().to_string(), "0");
        assert_eq!(fe("-i*sqrt2").to_string(), "-i*sqrt2");
        assert_eq!(fe("2 - sqrt2").to_string(), "2 - sqrt2");
        assert_eq!(fe("3/4 + i*sqrt2").to_string(), "3/4 + i*sqrt2");
    }
}
