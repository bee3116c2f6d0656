//! Univariate polynomials over Q(i, sqrt2).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::matrix::Scalar;
use crate::scalars::{FieldElem, Rational};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<FieldElem>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn constant(c: FieldElem) -> Self {
        UPoly::new(vec![c])
    }

    /// `a*x + b`
    pub fn linear(a: FieldElem, b: FieldElem) -> Self {
        UPoly::new(vec![b, a])
    }

    pub fn x() -> Self {
        UPoly::linear(FieldElem::one(), FieldElem::zero())
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        let mut acc = FieldElem::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * &FieldElem::from_int(k as i64)).collect())
    }

    pub fn monic(&self) -> UPoly {
        match self.lead() {
            Some(l) => {
                let inv = l.inv().expect("nonzero");
                UPoly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
            None => self.clone(),
        }
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let linv = d.lead().expect("nonzero").inv().expect("nonzero");
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (UPoly::new(vec![]), self.clone());
        }
        let mut q = vec![FieldElem::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &rem[k + dd] * &linv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &(&c * dc);
            }
            q[k] = c;
        }
        rem.truncate(dd);
        (UPoly::new(q), UPoly::new(rem))
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree().unwrap_or(0) == 0
    }

    /// Yun's algorithm: `factors[k]` is the product of the distinct roots of multiplicity `k + 1`.
    pub fn squarefree_decomposition(&self) -> Vec<UPoly> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.div_rem(&a).0;
        let mut c = fp.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        loop {
            let g = b.gcd(&d);
            out.push(g.clone());
            b = b.div_rem(&g).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&g).0;
            d = c.sub(&b.derivative());
            a = g;
        }
        let _ = a;
        while out.last().is_some_and(|p| p.degree() == Some(0)) {
            out.pop();
        }
        out
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UPoly::new(
            (0..n)
                .map(|k| {
                    let z = FieldElem::zero();
                    self.coeffs.get(k).unwrap_or(&z) + o.coeffs.get(k).unwrap_or(&z)
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::new(vec![]);
        }
        let mut out = vec![FieldElem::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UPoly::new(out)
    }

    /// Roots in the field with multiplicity, when they can be found: degree <= 2
    /// always, higher degree only after peeling off rational roots.
    pub fn roots(&self) -> Option<Vec<FieldElem>> {
        let mut p = self.clone();
        let mut out = Vec::new();
        while p.degree()? > 2 {
            let r = p.rational_root()?;
            p = p.div_rem(&UPoly::linear(FieldElem::one(), -&r)).0;
            out.push(r);
        }
        match p.degree()? {
            0 => {}
            1 => out.push(-&(&p.coeffs[0] / &p.coeffs[1])),
            _ => {
                let (c, b, a) = (&p.coeffs[0], &p.coeffs[1], &p.coeffs[2]);
                let disc = &(b * b) - &(&FieldElem::from_int(4) * &(a * c));
                let s = disc.sqrt()?;
                let two_a = &FieldElem::from_int(2) * a;
                out.push(&(&s - b) / &two_a);
                out.push(&(&(-b) - &s) / &two_a);
            }
        }
        Some(out)
    }

    /// A rational root by the rational root theorem (small integer coefficients only).
    fn rational_root(&self) -> Option<FieldElem> {
        let rats: Vec<Rational> = self.coeffs.iter().map(|c| c.as_rational().cloned()).collect::<Option<_>>()?;
        if rats[0].is_zero() {
            return Some(FieldElem::zero());
        }
        let lcm = rats.iter().fold(BigInt::from(1), |acc, r| num_integer::lcm(acc, r.denom().clone()));
        let ints: Vec<BigInt> = rats.iter().map(|r| (r * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let bound = BigInt::from(1_000_000);
        if ints[0].abs() > bound || ints.last()?.abs() > bound {
            return None;
        }
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            let n = n.abs();
            let mut v = Vec::new();
            let mut k = BigInt::from(1);
            while &k * &k <= n {
                if (&n % &k).is_zero() {
                    v.push(k.clone());
                    v.push(&n / &k);
                }
                k += 1;
            }
            v
        };
        for p in divisors(&ints[0]) {
            for q in divisors(ints.last()?) {
                for sign in [1, -1] {
                    let r = FieldElem::from_rational(Rational::new(&p * sign, q.clone()));
                    if self.eval(&r).is_zero() {
                        return Some(r);
                    }
                }
            }
        }
        None
    }
}

impl Scalar for UPoly {
    fn zero() -> Self {
        UPoly::new(vec![])
    }
    fn one() -> Self {
        UPoly::constant(FieldElem::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn from_field(c: FieldElem) -> Self {
        UPoly::constant(c)
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{k}")?,
            }
        }
        Ok(())
    }
}
