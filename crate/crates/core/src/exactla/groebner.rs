//! Multivariate polynomials over Q(i, sqrt2) and a capped Buchberger completion,
//! used only to decide whether a polynomial system has a common zero.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::scalars::FieldElem;

/// Exponent vector, ordered degree-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, o: &Mono) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    fn div(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    fn lcm(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| *a.max(b)).collect())
    }

    fn coprime(&self, o: &Mono) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Mono, FieldElem>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: FieldElem) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Mono::one(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Mono::one(nvars);
        m.0[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(m, FieldElem::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_nonzero_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().is_some_and(|m| m.degree() == 0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &FieldElem)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Mono, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(FieldElem::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn leading(&self) -> Option<(&Mono, &FieldElem)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldElem) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    fn mul_term(&self, m: &Mono, c: &FieldElem) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect() }
    }

    fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero")),
            None => self.clone(),
        }
    }

    pub fn eval(&self, point: &[FieldElem]) -> FieldElem {
        let mut acc = FieldElem::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v = &v * &x.pow(e as u64);
                }
            }
            acc += &v;
        }
        acc
    }

    /// Substitute `x_i = value`, keeping the variable count.
    pub fn substitute(&self, i: usize, value: &FieldElem) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = m2.0[i];
            m2.0[i] = 0;
            out.add_term(m2, c * &value.pow(e as u64));
        }
        out
    }

    /// Full reduction modulo `basis` (assumed monic).
    fn reduce(&self, basis: &[Poly]) -> Poly {
        let mut p = self.clone();
        let mut rem = Poly::zero(self.nvars);
        while let Some((m, c)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let div = basis.iter().find(|g| g.leading().is_some_and(|(gm, _)| gm.divides(&m)));
            match div {
                Some(g) => {
                    let (gm, _) = g.leading().expect("nonzero");
                    let q = m.div(gm);
                    p = p.sub(&g.mul_term(&q, &c));
                }
                None => {
                    p.terms.remove(&m);
                    rem.add_term(m, c);
                }
            }
        }
        rem
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    pub variables: Vec<String>,
    pub polys: Vec<Poly>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroebnerCaps {
    pub max_basis: usize,
    pub max_degree: u32,
}

impl Default for GroebnerCaps {
    fn default() -> Self {
        GroebnerCaps { max_basis: 500, max_degree: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triviality {
    /// No common zero over the algebraic closure.
    Empty,
    NonEmpty,
    /// Caps exceeded before the basis was complete.
    Unknown,
}

/// Buchberger completion with the coprime and chain criteria; `None` when caps are exceeded.
pub fn groebner_basis(polys: &[Poly], caps: GroebnerCaps) -> Option<Vec<Poly>> {
    let mut g: Vec<Poly> = Vec::new();
    for p in polys {
        let r = p.reduce(&g);
        if !r.is_zero() {
            if r.is_nonzero_constant() {
                return Some(vec![r.monic()]);
            }
            g.push(r.monic());
        }
    }
    if g.len() > caps.max_basis {
        return None;
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut done: HashSet<(usize, usize)> = HashSet::new();
    while !pairs.is_empty() {
        // normal selection: smallest lcm first
        let (k, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| pair_lcm(&g, **a).cmp(&pair_lcm(&g, **b)))
            .expect("nonempty");
        let (i, j) = pairs.swap_remove(k);
        done.insert((i, j));
        let (mi, ci) = g[i].leading().map(|(m, c)| (m.clone(), c.clone())).expect("nonzero");
        let (mj, cj) = g[j].leading().map(|(m, c)| (m.clone(), c.clone())).expect("nonzero");
        if mi.coprime(&mj) {
            continue;
        }
        let l = mi.lcm(&mj);
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && g[k].leading().is_some_and(|(mk, _)| mk.divides(&l))
                && done.contains(&(i.min(k), i.max(k)))
                && done.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let s = g[i]
            .mul_term(&l.div(&mi), &ci.inv().expect("nonzero"))
            .sub(&g[j].mul_term(&l.div(&mj), &cj.inv().expect("nonzero")));
        let r = s.reduce(&g);
        if r.is_zero() {
            continue;
        }
        if r.is_nonzero_constant() {
            return Some(vec![r.monic()]);
        }
        if r.degree() > caps.max_degree || g.len() >= caps.max_basis {
            return None;
        }
        g.push(r.monic());
        let n = g.len() - 1;
        for a in 0..n {
            pairs.push((a, n));
        }
    }
    Some(g)
}

fn pair_lcm(g: &[Poly], (i, j): (usize, usize)) -> Mono {
    let a = g[i].leading().expect("nonzero").0;
    let b = g[j].leading().expect("nonzero").0;
    a.lcm(b)
}

pub fn ideal_triviality(ps: &PolySystem, caps: GroebnerCaps) -> Triviality {
    match groebner_basis(&ps.polys, caps) {
        None => Triviality::Unknown,
        Some(g) if g.iter().any(Poly::is_nonzero_constant) => Triviality::Empty,
        Some(_) => Triviality::NonEmpty,
    }
}
