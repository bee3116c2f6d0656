//! Lie superalgebras given by structure constants.
//!
//! With homogeneous basis `e1..em` (even) and `f1..fn` (odd):
//! `[e_i,e_j] = sum c[i][j][k] e_k`, `[e_i,f_j] = sum rho[i][j][k] f_k`,
//! `[f_i,f_j] = sum gamma[i][j][k] e_k`. The bracket `[f_j,e_i]` is `-[e_i,f_j]`.
//! Basis positions `0..m` are the even vectors and `m..m+n` the odd ones.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{span_basis, Invertible, LinAlgError, Matrix, Scalar};
use crate::exprlang::{Expr, ExprError};
use crate::scalars::{FieldElem, Rational};
use crate::series::default_precision;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("c[{0}][{1}][{2}] breaks skew-symmetry")]
    NotSkew(usize, usize, usize),
    #[error("gamma[{0}][{1}][{2}] breaks symmetry")]
    NotSymmetric(usize, usize, usize),
    #[error("unknown basis symbol `{0}`")]
    BadSymbol(String),
    #[error("bracket [{0},{1}] has a value of the wrong parity")]
    Grading(String, String),
    #[error("bracket [{0},{1}] is given twice with different values")]
    Conflict(String, String),
    #[error("invalid algebra document: {0}")]
    Json(String),
    #[error("in bracket value: {0}")]
    Expr(#[from] ExprError),
    #[error("coefficient `{0}` is not a constant")]
    NotConstant(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Graded dimension `(even|odd)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GradedDim {
    pub even: usize,
    pub odd: usize,
}

impl GradedDim {
    pub fn new(even: usize, odd: usize) -> Self {
        GradedDim { even, odd }
    }

    pub fn total(&self) -> usize {
        self.even + self.odd
    }
}

impl fmt::Display for GradedDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.even, self.odd)
    }
}

/// A vector split by parity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedVector {
    pub even: Vec<FieldElem>,
    pub odd: Vec<FieldElem>,
}

impl GradedVector {
    pub fn basis(m: usize, n: usize, p: usize) -> Self {
        let mut v = GradedVector { even: vec![FieldElem::zero(); m], odd: vec![FieldElem::zero(); n] };
        if p < m {
            v.even[p] = FieldElem::one();
        } else {
            v.odd[p - m] = FieldElem::one();
        }
        v
    }

    pub fn concat(&self) -> Vec<FieldElem> {
        self.even.iter().chain(&self.odd).cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.even.iter().chain(&self.odd).all(FieldElem::is_zero)
    }
}

pub fn basis_symbols(m: usize, n: usize) -> Vec<String> {
    (1..=m).map(|i| format!("e{i}")).chain((1..=n).map(|j| format!("f{j}"))).collect()
}

/// Parse `e3` / `f1` into a basis position.
pub fn parse_symbol(m: usize, n: usize, s: &str) -> Option<usize> {
    let (kind, rest) = s.split_at(1.min(s.len()));
    let k: usize = rest.parse().ok()?;
    match kind {
        "e" if (1..=m).contains(&k) => Some(k - 1),
        "f" if (1..=n).contains(&k) => Some(m + k - 1),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperAlgebra<S = FieldElem> {
    pub name: Option<String>,
    m: usize,
    n: usize,
    c: Vec<S>,
    rho: Vec<S>,
    gamma: Vec<S>,
}

impl<S: Scalar> SuperAlgebra<S> {
    pub fn zero(m: usize, n: usize) -> Self {
        SuperAlgebra {
            name: None,
            m,
            n,
            c: vec![S::zero(); m * m * m],
            rho: vec![S::zero(); m * n * n],
            gamma: vec![S::zero(); n * n * m],
        }
    }

    /// Build from full tensors, checking skew-symmetry of `c` and symmetry of `gamma`.
    pub fn from_tensors(m: usize, n: usize, c: Vec<S>, rho: Vec<S>, gamma: Vec<S>) -> Result<Self, AlgebraError> {
        if c.len() != m * m * m || rho.len() != m * n * n || gamma.len() != n * n * m {
            return Err(AlgebraError::DimensionMismatch("tensor sizes".into()));
        }
        let g = SuperAlgebra { name: None, m, n, c, rho, gamma };
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if g.c(i, j, k) != &g.c(j, i, k).negate() {
                        return Err(AlgebraError::NotSkew(i, j, k));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    if g.gamma(i, j, k) != g.gamma(j, i, k) {
                        return Err(AlgebraError::NotSymmetric(i, j, k));
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> GradedDim {
        GradedDim::new(self.m, self.n)
    }

    pub fn total_dim(&self) -> usize {
        self.m + self.n
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &S {
        &self.c[(i * self.m + j) * self.m + k]
    }

    pub fn rho(&self, i: usize, j: usize, k: usize) -> &S {
        &self.rho[(i * self.n + j) * self.n + k]
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &S {
        &self.gamma[(i * self.n + j) * self.m + k]
    }

    pub fn c_tensor(&self) -> &[S] {
        &self.c
    }

    pub fn rho_tensor(&self) -> &[S] {
        &self.rho
    }

    pub fn gamma_tensor(&self) -> &[S] {
        &self.gamma
    }

    /// Set `[e_i,e_j] = v e_k` component and its skew partner.
    pub fn set_c(&mut self, i: usize, j: usize, k: usize, v: S) {
        let m = self.m;
        self.c[(j * m + i) * m + k] = v.negate();
        self.c[(i * m + j) * m + k] = v;
    }

    pub fn set_rho(&mut self, i: usize, j: usize, k: usize, v: S) {
        let n = self.n;
        self.rho[(i * n + j) * n + k] = v;
    }

    /// Set `[f_i,f_j] = v e_k` component and its symmetric partner.
    pub fn set_gamma(&mut self, i: usize, j: usize, k: usize, v: S) {
        let (n, m) = (self.n, self.m);
        self.gamma[(j * n + i) * m + k] = v.clone();
        self.gamma[(i * n + j) * m + k] = v;
    }

    pub fn is_odd(&self, p: usize) -> bool {
        p >= self.m
    }

    /// Coordinates of `[b_p, b_q]` in the full basis.
    pub fn bracket_basis(&self, p: usize, q: usize) -> Vec<S> {
        let (m, n) = (self.m, self.n);
        let mut out = vec![S::zero(); m + n];
        match (p < m, q < m) {
            (true, true) => {
                for k in 0..m {
                    out[k] = self.c(p, q, k).clone();
                }
            }
            (true, false) => {
                for k in 0..n {
                    out[m + k] = self.rho(p, q - m, k).clone();
                }
            }
            (false, true) => {
                for k in 0..n {
                    out[m + k] = self.rho(q, p - m, k).negate();
                }
            }
            (false, false) => {
                for k in 0..m {
                    out[k] = self.gamma(p - m, q - m, k).clone();
                }
            }
        }
        out
    }

    /// Full `N x N x N` tensor `T[p][q][r]` of `[b_p, b_q]`, flattened.
    pub fn structure_tensor(&self) -> Vec<S> {
        let nn = self.total_dim();
        let mut t = Vec::with_capacity(nn * nn * nn);
        for p in 0..nn {
            for q in 0..nn {
                t.extend(self.bracket_basis(p, q));
            }
        }
        t
    }

    /// Drop the even-even and even-odd parts.
    pub fn ab(&self) -> Self {
        let mut g = self.clone();
        g.c = vec![S::zero(); g.c.len()];
        g.rho = vec![S::zero(); g.rho.len()];
        g.name = self.name.as_ref().map(|s| format!("ab{s}"));
        g
    }

    /// Drop the odd-odd part.
    pub fn f_functor(&self) -> Self {
        let mut g = self.clone();
        g.gamma = vec![S::zero(); g.gamma.len()];
        g.name = self.name.as_ref().map(|s| format!("F{s}"));
        g
    }

    pub fn gamma_is_zero(&self) -> bool {
        self.gamma.iter().all(|x| x.is_zero())
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().chain(&self.rho).chain(&self.gamma).all(|x| x.is_zero())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SuperAlgebra<T> {
        SuperAlgebra {
            name: self.name.clone(),
            m: self.m,
            n: self.n,
            c: self.c.iter().map(&f).collect(),
            rho: self.rho.iter().map(&f).collect(),
            gamma: self.gamma.iter().map(&f).collect(),
        }
    }

    /// The nonzero brackets as `(p, q, value)` with `p <= q`, even-odd pairs listed once.
    pub fn nonzero_brackets(&self) -> Vec<(usize, usize, Vec<S>)> {
        let nn = self.total_dim();
        let mut out = Vec::new();
        for p in 0..nn {
            for q in p..nn {
                let v = self.bracket_basis(p, q);
                if v.iter().any(|x| !x.is_zero()) {
                    out.push((p, q, v));
                }
            }
        }
        out
    }
}

impl SuperAlgebra<FieldElem> {
    pub fn abelian(m: usize, n: usize) -> Self {
        SuperAlgebra::zero(m, n)
    }

    pub fn bracket(&self, x: &GradedVector, y: &GradedVector) -> Result<GradedVector, AlgebraError> {
        let (m, n) = (self.m, self.n);
        if x.even.len() != m || x.odd.len() != n || y.even.len() != m || y.odd.len() != n {
            return Err(AlgebraError::DimensionMismatch(format!("vectors for a ({m}|{n}) algebra")));
        }
        let xv = x.concat();
        let yv = y.concat();
        let mut out = vec![FieldElem::zero(); m + n];
        for (p, a) in xv.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (q, b) in yv.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (r, v) in self.bracket_basis(p, q).iter().enumerate() {
                    if !v.is_zero() {
                        out[r] += &(&ab * v);
                    }
                }
            }
        }
        Ok(GradedVector { even: out[..m].to_vec(), odd: out[m..].to_vec() })
    }

    fn sign(&self, p: usize, q: usize) -> bool {
        // true when (-1)^{|p||q|} = -1
        self.is_odd(p) && self.is_odd(q)
    }

    /// `[b_p, [b_q, b_r]]` using a precomputed structure tensor.
    fn nested(&self, t: &[FieldElem], p: usize, q: usize, r: usize) -> Vec<FieldElem> {
        let nn = self.total_dim();
        let mut out = vec![FieldElem::zero(); nn];
        for s in 0..nn {
            let inner = &t[(q * nn + r) * nn + s];
            if inner.is_zero() {
                continue;
            }
            for u in 0..nn {
                let outer = &t[(p * nn + s) * nn + u];
                if !outer.is_zero() {
                    out[u] += &(inner * outer);
                }
            }
        }
        out
    }

    fn jacobi_residual(&self, t: &[FieldElem], x: usize, y: usize, z: usize) -> Vec<FieldElem> {
        let terms = [
            (self.sign(x, z), self.nested(t, x, y, z)),
            (self.sign(y, x), self.nested(t, y, z, x)),
            (self.sign(z, y), self.nested(t, z, x, y)),
        ];
        let mut out = vec![FieldElem::zero(); self.total_dim()];
        for (neg, v) in terms {
            for (o, a) in out.iter_mut().zip(&v) {
                if neg {
                    *o -= a;
                } else {
                    *o += a;
                }
            }
        }
        out
    }

    /// Graded Jacobi identity on all basis triples `p <= q <= r`.
    pub fn check_jacobi(&self) -> Vec<Violation> {
        let t = self.structure_tensor();
        let nn = self.total_dim();
        let mut out = Vec::new();
        for x in 0..nn {
            for y in x..nn {
                for z in y..nn {
                    let r = self.jacobi_residual(&t, x, y, z);
                    if r.iter().any(|v| !v.is_zero()) {
                        out.push(Violation { kind: ViolationKind::Jacobi, triple: [x, y, z], residual: r });
                    }
                }
            }
        }
        out
    }

    /// The same identity split by parity type: even Jacobi, `rho` a representation,
    /// equivariance of `gamma` (J1) and the cyclic odd identity (J2).
    pub fn check_j1_j2(&self) -> Vec<Violation> {
        let t = self.structure_tensor();
        let (m, nn) = (self.m, self.total_dim());
        let mut out = Vec::new();
        let mut push = |kind, triple: [usize; 3], r: Vec<FieldElem>| {
            if r.iter().any(|v| !v.is_zero()) {
                out.push(Violation { kind, triple, residual: r });
            }
        };
        let sub =
            |a: Vec<FieldElem>, b: &[FieldElem]| -> Vec<FieldElem> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
        let add =
            |a: Vec<FieldElem>, b: &[FieldElem]| -> Vec<FieldElem> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
        for x in 0..m {
            for y in x..m {
                for z in y..m {
                    push(ViolationKind::EvenJacobi, [x, y, z], self.jacobi_residual(&t, x, y, z));
                }
            }
        }
        // [[x,y],u] = [x,[y,u]] - [y,[x,u]]
        for x in 0..m {
            for y in x + 1..m {
                for u in m..nn {
                    let lhs = self.nested_left(&t, x, y, u);
                    let r = sub(sub(lhs, &self.nested(&t, x, y, u)), &self.nested(&t, y, x, u));
                    let r = add(r, &vec![FieldElem::zero(); nn]);
                    push(ViolationKind::Representation, [x, y, u], r);
                }
            }
        }
        // [x, G(u,v)] = G(rho(x)u, v) + G(u, rho(x)v)
        for x in 0..m {
            for u in m..nn {
                for v in u..nn {
                    let lhs = self.nested(&t, x, u, v);
                    let a = self.nested_left(&t, x, u, v);
                    let b = self.nested(&t, u, x, v);
                    push(ViolationKind::J1, [x, u, v], sub(sub(lhs, &a), &b));
                }
            }
        }
        // rho(G(u,v))w + rho(G(v,w))u + rho(G(u,w))v = 0
        for u in m..nn {
            for v in u..nn {
                for w in v..nn {
                    let a = self.nested_left(&t, u, v, w);
                    let b = self.nested_left(&t, v, w, u);
                    let c = self.nested_left(&t, u, w, v);
                    push(ViolationKind::J2, [u, v, w], add(add(a, &b), &c));
                }
            }
        }
        out
    }

    /// `[[b_p, b_q], b_r]`.
    fn nested_left(&self, t: &[FieldElem], p: usize, q: usize, r: usize) -> Vec<FieldElem> {
        let nn = self.total_dim();
        let mut out = vec![FieldElem::zero(); nn];
        for s in 0..nn {
            let inner = &t[(p * nn + q) * nn + s];
            if inner.is_zero() {
                continue;
            }
            for u in 0..nn {
                let outer = &t[(s * nn + r) * nn + u];
                if !outer.is_zero() {
                    out[u] += &(inner * outer);
                }
            }
        }
        out
    }

    /// Graded dimensions of `g^0 = g, g^k = [g, g^{k-1}]` until the series stabilizes.
    pub fn lower_central_series(&self) -> Vec<GradedDim> {
        let (m, n) = (self.m, self.n);
        let nn = m + n;
        let unit = |p: usize| {
            let mut v = vec![FieldElem::zero(); nn];
            v[p] = FieldElem::one();
            v
        };
        let mut even: Vec<Vec<FieldElem>> = (0..m).map(unit).collect();
        let mut odd: Vec<Vec<FieldElem>> = (m..nn).map(unit).collect();
        let mut out = vec![GradedDim::new(m, n)];
        loop {
            let mut ne = Vec::new();
            let mut no = Vec::new();
            for p in 0..nn {
                for v in even.iter().chain(&odd) {
                    let x = GradedVector::basis(m, n, p);
                    let y = GradedVector { even: v[..m].to_vec(), odd: v[m..].to_vec() };
                    let b = self.bracket(&x, &y).expect("shapes");
                    if b.is_zero() {
                        continue;
                    }
                    let full = b.concat();
                    if b.odd.iter().all(FieldElem::is_zero) {
                        ne.push(full);
                    } else {
                        no.push(full);
                    }
                }
            }
            even = span_basis(&ne, nn);
            odd = span_basis(&no, nn);
            let d = GradedDim::new(even.len(), odd.len());
            if Some(&d) == out.last() {
                return out;
            }
            out.push(d);
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last() == Some(&GradedDim::new(0, 0))
    }

    pub fn is_valid(&self) -> bool {
        self.check_jacobi().is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn from_doc(doc: &AlgebraDoc) -> Result<Self, AlgebraError> {
        let (m, n) = (doc.m, doc.n);
        if m > 16 || n > 16 {
            return Err(AlgebraError::DimensionMismatch("dimension too large".into()));
        }
        let mut b = BracketBuilder::new(m, n);
        for br in &doc.brackets {
            let mut value = vec![FieldElem::zero(); m + n];
            for term in &br.value {
                let k = parse_symbol(m, n, &term.basis).ok_or_else(|| AlgebraError::BadSymbol(term.basis.clone()))?;
                let c = FieldElem::parse(&term.coeff).map_err(|e| AlgebraError::Json(e.to_string()))?;
                value[k] += &c;
            }
            b.set(&br.lhs, &br.rhs, value)?;
        }
        let mut g = b.finish()?;
        g.name = Some(doc.name.clone());
        Ok(g)
    }

    pub fn to_doc(&self) -> AlgebraDoc {
        let syms = basis_symbols(self.m, self.n);
        AlgebraDoc {
            name: self.name.clone().unwrap_or_default(),
            m: self.m,
            n: self.n,
            brackets: self
                .nonzero_brackets()
                .into_iter()
                .map(|(p, q, v)| BracketDoc {
                    lhs: syms[p].clone(),
                    rhs: syms[q].clone(),
                    value: v
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(k, c)| TermDoc { coeff: c.to_string(), basis: syms[k].clone() })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("serializable")
    }

    /// Parse a compact bracket list such as `[e1,f2]=f1; [f2,f2]=2*e2`.
    /// Values are expressions linear in the basis symbols; `t` is replaced by `t_value`.
    pub fn parse_brackets(m: usize, n: usize, text: &str, t_value: &FieldElem) -> Result<Self, AlgebraError> {
        let syms = basis_symbols(m, n);
        let mut b = BracketBuilder::new(m, n);
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || AlgebraError::Json(format!("bad bracket item `{item}`"));
            let (lhs, rhs) = item.split_once('=').ok_or_else(bad)?;
            let inner = lhs.trim().strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(bad)?;
            let (x, y) = inner.split_once(',').ok_or_else(bad)?;
            let expr = Expr::parse(rhs)?;
            let coeffs = expr.eval_linear(&syms, &default_precision(), &HashMap::new())?;
            let value = coeffs
                .iter()
                .map(|s| s.eval_at(t_value).ok_or_else(|| AlgebraError::NotConstant(s.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            b.set(x.trim(), y.trim(), value)?;
        }
        b.finish()
    }

    /// Compact bracket list, the inverse of [`SuperAlgebra::parse_brackets`].
    pub fn brackets_text(&self) -> String {
        let syms = basis_symbols(self.m, self.n);
        let mut items = Vec::new();
        for (p, q, v) in self.nonzero_brackets() {
            items.push(format!("[{},{}]={}", syms[p], syms[q], format_combination(&v, &syms)));
        }
        items.join("; ")
    }
}

/// `2*e1 - i*f2` style text for a coordinate vector.
pub fn format_combination(v: &[FieldElem], syms: &[String]) -> String {
    let mut s = String::new();
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cs = c.to_string();
        let simple = c.as_rational().is_some() || !cs.contains([' ', '+']) && !cs[1..].contains('-');
        let (neg, body) = if simple && cs.starts_with('-') { (true, &cs[1..]) } else { (false, cs.as_str()) };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if body == "1" {
            s.push_str(&syms[k]);
        } else if simple {
            s.push_str(&format!("{body}*{}", syms[k]));
        } else {
            s.push_str(&format!("({body})*{}", syms[k]));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

struct BracketBuilder {
    g: SuperAlgebra<FieldElem>,
    seen: HashMap<(usize, usize), Vec<FieldElem>>,
}

impl BracketBuilder {
    fn new(m: usize, n: usize) -> Self {
        BracketBuilder { g: SuperAlgebra::zero(m, n), seen: HashMap::new() }
    }

    fn set(&mut self, lhs: &str, rhs: &str, value: Vec<FieldElem>) -> Result<(), AlgebraError> {
        let (m, n) = (self.g.m, self.g.n);
        let p = parse_symbol(m, n, lhs).ok_or_else(|| AlgebraError::BadSymbol(lhs.to_string()))?;
        let q = parse_symbol(m, n, rhs).ok_or_else(|| AlgebraError::BadSymbol(rhs.to_string()))?;
        let odd_value = p >= m && q < m || p < m && q >= m;
        let wrong = value.iter().enumerate().any(|(k, c)| !c.is_zero() && (k >= m) != odd_value);
        if wrong {
            return Err(AlgebraError::Grading(lhs.to_string(), rhs.to_string()));
        }
        // normalize to (p <= q) with the super skew sign
        let both_odd = p >= m && q >= m;
        let (a, b, v) = if p <= q {
            (p, q, value)
        } else if both_odd {
            (q, p, value)
        } else {
            (q, p, value.iter().map(|c| -c).collect())
        };
        if a == b && a < m && v.iter().any(|c| !c.is_zero()) {
            return Err(AlgebraError::NotSkew(a, a, 0));
        }
        if let Some(prev) = self.seen.get(&(a, b)) {
            if prev != &v {
                return Err(AlgebraError::Conflict(lhs.to_string(), rhs.to_string()));
            }
            return Ok(());
        }
        match (a < m, b < m) {
            (true, true) => {
                for k in 0..m {
                    self.g.set_c(a, b, k, v[k].clone());
                }
            }
            (true, false) => {
                for k in 0..n {
                    self.g.set_rho(a, b - m, k, v[m + k].clone());
                }
            }
            (false, false) => {
                for k in 0..m {
                    self.g.set_gamma(a - m, b - m, k, v[k].clone());
                }
            }
            (false, true) => unreachable!("normalized"),
        }
        self.seen.insert((a, b), v);
        Ok(())
    }

    fn finish(self) -> Result<SuperAlgebra<FieldElem>, AlgebraError> {
        Ok(self.g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    Jacobi,
    EvenJacobi,
    Representation,
    J1,
    J2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub triple: [usize; 3],
    pub residual: Vec<FieldElem>,
}

impl Violation {
    pub fn describe(&self, m: usize, n: usize) -> String {
        let syms = basis_symbols(m, n);
        format!(
            "{:?} ({}, {}, {}): residual {}",
            self.kind,
            syms[self.triple[0]],
            syms[self.triple[1]],
            syms[self.triple[2]],
            format_combination(&self.residual, &syms)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coeff: String,
    pub basis: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketDoc {
    pub lhs: String,
    pub rhs: String,
    pub value: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub brackets: Vec<BracketDoc>,
}

/// Structure constants of the same bracket in the basis given by the columns of `T (+) S`.
pub fn apply_basis_change<S: Invertible>(
    g: &SuperAlgebra<FieldElem>,
    t: &Matrix<S>,
    s: &Matrix<S>,
    work: &Rational,
) -> Result<SuperAlgebra<S>, AlgebraError> {
    let (m, n) = (g.m, g.n);
    if t.rows() != m || t.cols() != m || s.rows() != n || s.cols() != n {
        return Err(AlgebraError::DimensionMismatch("basis change blocks".into()));
    }
    let tinv = if m > 0 { S::invert(t, work)? } else { Matrix::zeros(0, 0) };
    let sinv = if n > 0 { S::invert(s, work)? } else { Matrix::zeros(0, 0) };
    let lift = |c: &FieldElem| S::from_field(c.clone());
    let mut out = SuperAlgebra::<S>::zero(m, n);
    out.name = g.name.clone();

    // contract the lower indices, then apply the inverse to the upper one
    let contract = |a_blk: &Matrix<S>,
                    b_blk: &Matrix<S>,
                    da: usize,
                    db: usize,
                    dr: usize,
                    get: &dyn Fn(usize, usize, usize) -> FieldElem| {
        let mut x = vec![S::zero(); da * db * dr];
        for p in 0..a_blk.rows() {
            for q in 0..b_blk.rows() {
                for r in 0..dr {
                    let k = get(p, q, r);
                    if k.is_zero() {
                        continue;
                    }
                    let k = lift(&k);
                    for a in 0..da {
                        let ta = &a_blk[(p, a)];
                        if ta.is_zero() {
                            continue;
                        }
                        let tak = ta.times(&k);
                        for b in 0..db {
                            let tb = &b_blk[(q, b)];
                            if tb.is_zero() {
                                continue;
                            }
                            let idx = (a * db + b) * dr + r;
                            x[idx] = x[idx].plus(&tak.times(tb));
                        }
                    }
                }
            }
        }
        x
    };
    let upper = |x: &[S], inv: &Matrix<S>, da: usize, db: usize, dr: usize| {
        let mut y = vec![S::zero(); da * db * dr];
        for a in 0..da {
            for b in 0..db {
                for r in 0..dr {
                    let v = &x[(a * db + b) * dr + r];
                    if v.is_zero() {
                        continue;
                    }
                    for k in 0..dr {
                        let w = &inv[(k, r)];
                        if !w.is_zero() {
                            let idx = (a * db + b) * dr + k;
                            y[idx] = y[idx].plus(&w.times(v));
                        }
                    }
                }
            }
        }
        y
    };
    let xc = contract(t, t, m, m, m, &|p, q, r| g.c(p, q, r).clone());
    out.c = upper(&xc, &tinv, m, m, m);
    let xr = contract(t, s, m, n, n, &|p, q, r| g.rho(p, q, r).clone());
    out.rho = upper(&xr, &sinv, m, n, n);
    let xg = contract(s, s, n, n, m, &|p, q, r| g.gamma(p, q, r).clone());
    out.gamma = upper(&xg, &tinv, n, n, m);
    Ok(out)
}

/// Whole-space version taking the block-diagonal matrix `M = T (+) S`.
pub fn apply_block_change<S: Invertible>(
    g: &SuperAlgebra<FieldElem>,
    mat: &Matrix<S>,
    work: &Rational,
) -> Result<SuperAlgebra<S>, AlgebraError> {
    let (m, n) = (g.m, g.n);
    if mat.rows() != m + n || mat.cols() != m + n {
        return Err(AlgebraError::DimensionMismatch("basis matrix".into()));
    }
    for i in 0..m + n {
        for j in 0..m + n {
            if (i < m) != (j < m) && !mat[(i, j)].is_zero() {
                return Err(AlgebraError::DimensionMismatch("basis change mixes parities".into()));
            }
        }
    }
    apply_basis_change(g, &mat.submatrix(0, 0, m, m), &mat.submatrix(m, m, n, n), work)
}

impl fmt::Display for SuperAlgebra<FieldElem> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            write!(f, "{name} ")?;
        }
        write!(f, "{}: ", self.dim())?;
        if self.is_abelian() {
            f.write_str("abelian")
        } else {
            f.write_str(&self.brackets_text())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Series;

    fn alg(m: usize, n: usize, text: &str) -> SuperAlgebra {
        SuperAlgebra::parse_brackets(m, n, text, &FieldElem::one()).unwrap()
    }

    fn vec_of(g: &SuperAlgebra, p: usize) -> GradedVector {
        GradedVector::basis(g.m(), g.n(), p)
    }

    #[test]
    fn bracket_examples() {
        let g = alg(1, 1, "[f1,f1]=e1");
        let b = g.bracket(&vec_of(&g, 1), &vec_of(&g, 1)).unwrap();
        assert_eq!(b.even, vec![FieldElem::one()]);
        assert!(g.bracket(&vec_of(&g, 0), &vec_of(&g, 0)).unwrap().is_zero());
        let h = alg(1, 2, "[e1,f2]=f1");
        let b = h.bracket(&vec_of(&h, 2), &vec_of(&h, 0)).unwrap();
        assert_eq!(b.odd, vec![FieldElem::from_int(-1), FieldElem::zero()]);
        assert!(matches!(h.bracket(&vec_of(&g, 0), &vec_of(&h, 0)), Err(AlgebraError::DimensionMismatch(_))));
    }

    #[test]
    fn jacobi_and_tamper() {
        let g = alg(2, 3, "[e1,f2]=f1; [e1,f3]=f2; [e2,f3]=f1");
        assert!(g.check_jacobi().is_empty());
        assert!(g.check_j1_j2().is_empty());
        // (3|2)_13 style
        let h = alg(3, 2, "[e1,e2]=e3; [e1,f2]=f1; [f1,f2]=e3; [f2,f2]=2*e2");
        assert!(h.check_jacobi().is_empty());
        let bad = alg(3, 2, "[e1,e2]=e3; [e1,f2]=f1; [f1,f2]=-e3; [f2,f2]=2*e2");
        assert!(!bad.check_jacobi().is_empty());
        assert!(!bad.check_j1_j2().is_empty());
        assert!(SuperAlgebra::abelian(2, 2).check_jacobi().is_empty());
    }

    #[test]
    fn lower_central_series_examples() {
        let g = alg(1, 2, "[e1,f2]=f1");
        assert_eq!(g.lower_central_series(), vec![GradedDim::new(1, 2), GradedDim::new(0, 1), GradedDim::new(0, 0)]);
        assert!(g.is_nilpotent());
        let d = alg(1, 2, "[e1,f2]=f1; [e1,f1]=t*f2");
        assert_eq!(d.lower_central_series().last(), Some(&GradedDim::new(0, 2)));
        assert!(!d.is_nilpotent());
        assert_eq!(
            SuperAlgebra::abelian(2, 1).lower_central_series(),
            vec![GradedDim::new(2, 1), GradedDim::new(0, 0)]
        );
    }

    #[test]
    fn functors() {
        let g = alg(2, 2, "[e1,f2]=f1; [f2,f2]=e1; [f1,f2]=e2");
        assert!(g.ab().c_tensor().iter().chain(g.ab().rho_tensor()).all(FieldElem::is_zero));
        assert!(g.f_functor().gamma_is_zero());
        assert!(g.f_functor().ab().is_abelian());
    }

    #[test]
    fn parse_errors() {
        let one = FieldElem::one();
        assert!(matches!(SuperAlgebra::parse_brackets(1, 1, "[e1,f1]=e1", &one), Err(AlgebraError::Grading(..))));
        assert!(matches!(SuperAlgebra::parse_brackets(1, 1, "[e2,f1]=f1", &one), Err(AlgebraError::BadSymbol(_))));
        assert!(matches!(SuperAlgebra::parse_brackets(2, 0, "[e1,e1]=e2", &one), Err(AlgebraError::NotSkew(..))));
        assert!(matches!(
            SuperAlgebra::parse_brackets(2, 0, "[e1,e2]=e2; [e2,e1]=e2", &one),
            Err(AlgebraError::Conflict(..))
        ));
        assert!(SuperAlgebra::parse_brackets(2, 0, "[e1,e2]=e2; [e2,e1]=-e2", &one).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let g = alg(2, 3, "[e1,f2]=f1; [f2,f2]=2*e1; [f2,f3]=-e2; [e2,f2]=i*sqrt2*f1").with_name("x");
        let back = SuperAlgebra::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert_eq!(alg(2, 3, &g.brackets_text()).with_name("x"), g);
    }

    #[test]
    fn basis_change_examples() {
        let w = default_precision();
        let g = alg(1, 2, "[f1,f2]=e1");
        let id = apply_basis_change(&g, &Matrix::<FieldElem>::identity(1), &Matrix::identity(2), &w).unwrap();
        assert_eq!(id, g);
        // x1 = e1, y1 = f1 + f2/2, y2 = t f2
        let t = Matrix::from_rows(vec![vec![Series::one()]]).unwrap();
        let half = Series::constant(FieldElem::parse("1/2").unwrap());
        let s = Matrix::from_rows(vec![vec![Series::one(), Series::zero()], vec![half, Series::t()]]).unwrap();
        let h = apply_basis_change(&g, &t, &s, &w).unwrap();
        assert_eq!(h.gamma(0, 0, 0), &Series::one());
        assert_eq!(h.gamma(0, 1, 0), &Series::t());
        assert_eq!(h.gamma(1, 1, 0), &Series::zero());
        // the basis t*e multiplies every constant by t
        let k = alg(2, 1, "[e1,e2]=e1; [e1,f1]=f1");
        let tt = Series::t();
        let sc = apply_basis_change(&k, &Matrix::identity(2).scale(&tt), &Matrix::identity(1).scale(&tt), &w).unwrap();
        assert_eq!(sc.c(0, 1, 0), &Series::t());
        assert_eq!(sc.rho(0, 0, 0), &Series::t());
    }
}
