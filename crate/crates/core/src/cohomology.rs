//! Even adjoint 2-cohomology `(H²(g,g))₀`.
//!
//! Coboundary on even maps: `(d¹ψ)(x,y) = [ψx,y] + [x,ψy] - ψ[x,y]`.
//! Differential on even 2-cochains, homogeneous `x,y,z`:
//! `d²φ(x,y,z) = [x,φ(y,z)] - (-1)^{|x||y|}[y,φ(x,z)] + (-1)^{|z|(|x|+|y|)}[z,φ(x,y)]
//!  - φ([x,y],z) + (-1)^{|y||z|}φ([x,z],y) + φ(x,[y,z])`.
//!
//! A cochain is stored on its three blocks and written as a sum of terms such as
//! `-2*e1*^e2*@e1 + e2*^f1*@f1`, where `x*^y*@z` is the cochain with `φ(x,y) = z`
//! (extended by super skew-symmetry) and zero on the other basis pairs.

use std::fmt;

use thiserror::Error;

use crate::exactla::{rank, rref, Matrix};
use crate::scalars::FieldElem;
use crate::superalg::{basis_symbols, parse_symbol, AlgebraError, SuperAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("cocycle syntax at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("term `{0}` is not an even cochain")]
    OddTerm(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("deformed product violates the Jacobi identity")]
    JacobiViolated,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Even 2-cochain with full (redundant) block storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain2Even {
    m: usize,
    n: usize,
    /// `φ(e_i,e_j) = Σ ee[i][j][k] e_k`, antisymmetric in `i,j`
    ee: Vec<FieldElem>,
    /// `φ(e_i,f_j) = Σ ef[i][j][k] f_k`
    ef: Vec<FieldElem>,
    /// `φ(f_i,f_j) = Σ ff[i][j][k] e_k`, symmetric in `i,j`
    ff: Vec<FieldElem>,
}

/// Dimension of the space of even 2-cochains.
pub fn cochain_space_dim(m: usize, n: usize) -> usize {
    m * m * (m.saturating_sub(1)) / 2 + n * m * n + m * n * (n + 1) / 2
}

/// Coordinate slots in basis order: `ee (i<j, k)`, then `ef (i, j, k)`, then `ff (i<=j, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Ee(usize, usize, usize),
    Ef(usize, usize, usize),
    Ff(usize, usize, usize),
}

fn slots(m: usize, n: usize) -> Vec<Slot> {
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                out.push(Slot::Ee(i, j, k));
            }
        }
    }
    for i in 0..m {
        for j in 0..n {
            for k in 0..n {
                out.push(Slot::Ef(i, j, k));
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            for k in 0..m {
                out.push(Slot::Ff(i, j, k));
            }
        }
    }
    out
}

impl Cochain2Even {
    pub fn zero(m: usize, n: usize) -> Self {
        Cochain2Even {
            m,
            n,
            ee: vec![FieldElem::zero(); m * m * m],
            ef: vec![FieldElem::zero(); m * n * n],
            ff: vec![FieldElem::zero(); n * n * m],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.ee.iter().chain(&self.ef).chain(&self.ff).all(FieldElem::is_zero)
    }

    fn slot_get(&self, s: Slot) -> &FieldElem {
        let (m, n) = (self.m, self.n);
        match s {
            Slot::Ee(i, j, k) => &self.ee[(i * m + j) * m + k],
            Slot::Ef(i, j, k) => &self.ef[(i * n + j) * n + k],
            Slot::Ff(i, j, k) => &self.ff[(i * n + j) * m + k],
        }
    }

    fn slot_add(&mut self, s: Slot, v: &FieldElem) {
        let (m, n) = (self.m, self.n);
        match s {
            Slot::Ee(i, j, k) => {
                self.ee[(i * m + j) * m + k] += v;
                self.ee[(j * m + i) * m + k] -= v;
            }
            Slot::Ef(i, j, k) => self.ef[(i * n + j) * n + k] += v,
            Slot::Ff(i, j, k) => {
                self.ff[(i * n + j) * m + k] += v;
                if i != j {
                    self.ff[(j * n + i) * m + k] += v;
                }
            }
        }
    }

    /// Coordinates in the fixed basis order.
    pub fn coords(&self) -> Vec<FieldElem> {
        slots(self.m, self.n).into_iter().map(|s| self.slot_get(s).clone()).collect()
    }

    pub fn from_coords(m: usize, n: usize, v: &[FieldElem]) -> Result<Self, CohomologyError> {
        let sl = slots(m, n);
        if sl.len() != v.len() {
            return Err(CohomologyError::Shape(format!(
                "{} coordinates for a space of dimension {}",
                v.len(),
                sl.len()
            )));
        }
        let mut c = Cochain2Even::zero(m, n);
        for (s, x) in sl.into_iter().zip(v) {
            if !x.is_zero() {
                c.slot_add(s, x);
            }
        }
        Ok(c)
    }

    /// `φ(b_p, b_q)` in full coordinates.
    pub fn eval(&self, p: usize, q: usize) -> Vec<FieldElem> {
        let (m, n) = (self.m, self.n);
        let mut out = vec![FieldElem::zero(); m + n];
        match (p < m, q < m) {
            (true, true) => {
                for k in 0..m {
                    out[k] = self.ee[(p * m + q) * m + k].clone();
                }
            }
            (true, false) => {
                for k in 0..n {
                    out[m + k] = self.ef[(p * n + q - m) * n + k].clone();
                }
            }
            (false, true) => {
                for k in 0..n {
                    out[m + k] = -&self.ef[(q * n + p - m) * n + k];
                }
            }
            (false, false) => {
                for k in 0..m {
                    out[k] = self.ff[((p - m) * n + q - m) * m + k].clone();
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Cochain2Even) -> Cochain2Even {
        let z = |a: &[FieldElem], b: &[FieldElem]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Cochain2Even { m: self.m, n: self.n, ee: z(&self.ee, &o.ee), ef: z(&self.ef, &o.ef), ff: z(&self.ff, &o.ff) }
    }

    pub fn scale(&self, c: &FieldElem) -> Cochain2Even {
        let s = |a: &[FieldElem]| a.iter().map(|x| x * c).collect();
        Cochain2Even { m: self.m, n: self.n, ee: s(&self.ee), ef: s(&self.ef), ff: s(&self.ff) }
    }

    /// Parse the `x*^y*@z` notation.
    pub fn parse(m: usize, n: usize, text: &str) -> Result<Self, CohomologyError> {
        let mut out = Cochain2Even::zero(m, n);
        for (pos, sign, term) in split_terms(text)? {
            let syntax = |msg: &str| CohomologyError::Syntax { pos, msg: msg.to_string() };
            let at = term.rfind("*@").ok_or_else(|| syntax("expected `*@`"))?;
            let wedge = term[..at].rfind("*^").ok_or_else(|| syntax("expected `*^`"))?;
            let z = term[at + 2..].trim();
            let y = term[wedge + 2..at].trim();
            let head = term[..wedge].trim();
            let split = head.rfind(|c: char| c == 'e' || c == 'f').ok_or_else(|| syntax("expected a basis symbol"))?;
            let x = &head[split..];
            let coeff_text = head[..split].trim();
            let coeff = if coeff_text.is_empty() {
                FieldElem::one()
            } else {
                let c = coeff_text.strip_suffix('*').ok_or_else(|| syntax("expected `*` after coefficient"))?;
                let c = c.trim();
                let c = c.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(c);
                FieldElem::parse(c).map_err(|e| syntax(&e.to_string()))?
            };
            let coeff = if sign { -coeff } else { coeff };
            let sym = |s: &str| parse_symbol(m, n, s).ok_or_else(|| syntax(&format!("unknown basis symbol `{s}`")));
            let (p, q, r) = (sym(x)?, sym(y)?, sym(z)?);
            let odd_out = (p >= m) != (q >= m);
            if (r >= m) != odd_out {
                return Err(CohomologyError::OddTerm(term.to_string()));
            }
            out.add_term(p, q, r, &coeff);
        }
        Ok(out)
    }

    /// Add `c · (b_p*^b_q*@b_r)`.
    fn add_term(&mut self, p: usize, q: usize, r: usize, c: &FieldElem) {
        let m = self.m;
        match (p < m, q < m) {
            (true, true) => {
                if p == q {
                    return;
                }
                let (i, j, c) = if p < q { (p, q, c.clone()) } else { (q, p, -c) };
                self.slot_add(Slot::Ee(i, j, r), &c);
            }
            (true, false) => self.slot_add(Slot::Ef(p, q - m, r - m), c),
            (false, true) => self.slot_add(Slot::Ef(q, p - m, r - m), &-c),
            (false, false) => {
                let (i, j) = (p.min(q) - m, p.max(q) - m);
                self.slot_add(Slot::Ff(i, j, r), c);
            }
        }
    }
}

fn split_terms(text: &str) -> Result<Vec<(usize, bool, &str)>, CohomologyError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    let bytes = text.as_bytes();
    let mut seen_content = false;
    for (k, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(CohomologyError::Syntax { pos: k, msg: "unbalanced `)`".into() });
                }
            }
            b'+' | b'-' if depth == 0 => {
                // a sign right after `*` or `/` belongs to the coefficient
                let prev = text[..k].trim_end().bytes().last();
                if matches!(prev, Some(b'*') | Some(b'/')) {
                    continue;
                }
                if seen_content {
                    out.push((start, neg, &text[start..k]));
                    seen_content = false;
                } else if !text[start..k].trim().is_empty() {
                    return Err(CohomologyError::Syntax { pos: k, msg: "unexpected sign".into() });
                } else if matches!(prev, Some(b'+') | Some(b'-')) && k > 0 {
                    return Err(CohomologyError::Syntax { pos: k, msg: "doubled sign".into() });
                }
                neg = b == b'-';
                start = k + 1;
            }
            c if !c.is_ascii_whitespace() => seen_content = true,
            _ => {}
        }
    }
    if depth != 0 {
        return Err(CohomologyError::Syntax { pos: text.len(), msg: "unbalanced `(`".into() });
    }
    if seen_content {
        out.push((start, neg, &text[start..]));
    } else if !out.is_empty() || text.trim() != "0" && !text.trim().is_empty() {
        return Err(CohomologyError::Syntax { pos: text.len(), msg: "dangling sign".into() });
    }
    if out.len() == 1 && out[0].2.trim() == "0" {
        out.clear();
    }
    Ok(out)
}

impl fmt::Display for Cochain2Even {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, n) = (self.m, self.n);
        let syms = basis_symbols(m, n);
        let mut first = true;
        for s in slots(m, n) {
            let c = self.slot_get(s);
            if c.is_zero() {
                continue;
            }
            let (p, q, r) = match s {
                Slot::Ee(i, j, k) => (i, j, k),
                Slot::Ef(i, j, k) => (i, m + j, m + k),
                Slot::Ff(i, j, k) => (m + i, m + j, k),
            };
            let cs = c.to_string();
            let simple = c.as_rational().is_some();
            let (neg, body) = if simple && cs.starts_with('-') { (true, &cs[1..]) } else { (false, cs.as_str()) };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if body != "1" {
                if simple {
                    write!(f, "{body}*")?;
                } else {
                    write!(f, "({body})*")?;
                }
            }
            write!(f, "{}*^{}*@{}", syms[p], syms[q], syms[r])?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// An even endomorphism `A (+) D`; `full` is the `(m+n) x (m+n)` block-diagonal matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenEndomorphism {
    pub a: Matrix<FieldElem>,
    pub d: Matrix<FieldElem>,
}

impl EvenEndomorphism {
    /// The map sending basis vector `b_src` to `b_dst`; both must have the same parity.
    pub fn elementary(m: usize, n: usize, src: usize, dst: usize) -> Self {
        let mut a = Matrix::zeros(m, m);
        let mut d = Matrix::zeros(n, n);
        if src < m {
            a[(dst, src)] = FieldElem::one();
        } else {
            d[(dst - m, src - m)] = FieldElem::one();
        }
        EvenEndomorphism { a, d }
    }

    pub fn full(&self) -> Matrix<FieldElem> {
        self.a.direct_sum(&self.d)
    }
}

fn add_scaled(out: &mut [FieldElem], v: &[FieldElem], c: &FieldElem) {
    if c.is_zero() {
        return;
    }
    for (o, x) in out.iter_mut().zip(v) {
        if !x.is_zero() {
            *o += &(c * x);
        }
    }
}

/// `[b_p, v]` for a full coordinate vector `v`.
fn bracket_left(t: &[FieldElem], nn: usize, p: usize, v: &[FieldElem]) -> Vec<FieldElem> {
    let mut out = vec![FieldElem::zero(); nn];
    for (q, c) in v.iter().enumerate() {
        add_scaled(&mut out, &t[(p * nn + q) * nn..(p * nn + q + 1) * nn], c);
    }
    out
}

pub fn d1(g: &SuperAlgebra, psi: &EvenEndomorphism) -> Result<Cochain2Even, CohomologyError> {
    let (m, n) = (g.m(), g.n());
    if psi.a.rows() != m || psi.d.rows() != n {
        return Err(CohomologyError::Shape("endomorphism blocks".into()));
    }
    let nn = m + n;
    let t = g.structure_tensor();
    let full = psi.full();
    let apply = |v: &[FieldElem]| -> Vec<FieldElem> { full.mul_vec(v).expect("square") };
    let mut coords = Vec::new();
    for s in slots(m, n) {
        let (p, q, r) = match s {
            Slot::Ee(i, j, k) => (i, j, k),
            Slot::Ef(i, j, k) => (i, m + j, m + k),
            Slot::Ff(i, j, k) => (m + i, m + j, k),
        };
        // [ψ b_p, b_q] + [b_p, ψ b_q] - ψ [b_p, b_q]
        let mut v = vec![FieldElem::zero(); nn];
        for s2 in 0..nn {
            let c = &full[(s2, p)];
            add_scaled(&mut v, &t[(s2 * nn + q) * nn..(s2 * nn + q + 1) * nn], c);
        }
        let col_q = full.col(q);
        let b = bracket_left(&t, nn, p, &col_q);
        add_scaled(&mut v, &b, &FieldElem::one());
        let pq = &t[(p * nn + q) * nn..(p * nn + q + 1) * nn];
        let ppq = apply(pq);
        add_scaled(&mut v, &ppq, &-FieldElem::one());
        coords.push(v[r].clone());
    }
    Cochain2Even::from_coords(m, n, &coords)
}

/// Values of `d²φ` on every ordered basis triple, flattened as `[(x*nn + y)*nn + z][u]`.
pub fn d2(g: &SuperAlgebra, phi: &Cochain2Even) -> Result<Vec<FieldElem>, CohomologyError> {
    let (m, n) = (g.m(), g.n());
    if phi.m != m || phi.n != n {
        return Err(CohomologyError::Shape("cochain does not match the algebra".into()));
    }
    let nn = m + n;
    let t = g.structure_tensor();
    let odd = |p: usize| p >= m;
    let sgn = |neg: bool| {
        if neg {
            -FieldElem::one()
        } else {
            FieldElem::one()
        }
    };
    let phis: Vec<Vec<FieldElem>> = (0..nn * nn).map(|k| phi.eval(k / nn, k % nn)).collect();
    let phi_vec = |v: &[FieldElem], q: usize| -> Vec<FieldElem> {
        let mut out = vec![FieldElem::zero(); nn];
        for (s, c) in v.iter().enumerate() {
            add_scaled(&mut out, &phis[s * nn + q], c);
        }
        out
    };
    let phi_vec_r = |p: usize, v: &[FieldElem]| -> Vec<FieldElem> {
        let mut out = vec![FieldElem::zero(); nn];
        for (s, c) in v.iter().enumerate() {
            add_scaled(&mut out, &phis[p * nn + s], c);
        }
        out
    };
    let br = |p: usize, q: usize| t[(p * nn + q) * nn..(p * nn + q + 1) * nn].to_vec();
    let mut out = Vec::with_capacity(nn * nn * nn * nn);
    for x in 0..nn {
        for y in 0..nn {
            for z in 0..nn {
                let mut v = vec![FieldElem::zero(); nn];
                add_scaled(&mut v, &bracket_left(&t, nn, x, &phis[y * nn + z]), &FieldElem::one());
                add_scaled(&mut v, &bracket_left(&t, nn, y, &phis[x * nn + z]), &-sgn(odd(x) && odd(y)));
                add_scaled(&mut v, &bracket_left(&t, nn, z, &phis[x * nn + y]), &sgn(odd(z) && (odd(x) != odd(y))));
                add_scaled(&mut v, &phi_vec(&br(x, y), z), &-FieldElem::one());
                add_scaled(&mut v, &phi_vec(&br(x, z), y), &sgn(odd(y) && odd(z)));
                add_scaled(&mut v, &phi_vec_r(x, &br(y, z)), &FieldElem::one());
                out.extend(v);
            }
        }
    }
    Ok(out)
}

pub fn is_cocycle(g: &SuperAlgebra, phi: &Cochain2Even) -> Result<bool, CohomologyError> {
    Ok(d2(g, phi)?.iter().all(FieldElem::is_zero))
}

/// Coboundaries `d¹` of the elementary even maps, as coordinate vectors.
fn coboundary_vectors(g: &SuperAlgebra) -> Vec<Vec<FieldElem>> {
    let (m, n) = (g.m(), g.n());
    let mut out = Vec::new();
    for src in 0..m + n {
        let range = if src < m { 0..m } else { m..m + n };
        for dst in range {
            let c = d1(g, &EvenEndomorphism::elementary(m, n, src, dst)).expect("shapes");
            out.push(c.coords());
        }
    }
    out
}

fn cocycle_space(g: &SuperAlgebra) -> Vec<Vec<FieldElem>> {
    let (m, n) = (g.m(), g.n());
    let dim = cochain_space_dim(m, n);
    let cols: Vec<Vec<FieldElem>> = (0..dim)
        .map(|k| {
            let mut e = vec![FieldElem::zero(); dim];
            e[k] = FieldElem::one();
            d2(g, &Cochain2Even::from_coords(m, n, &e).expect("coords")).expect("shapes")
        })
        .collect();
    if dim == 0 {
        return Vec::new();
    }
    let rows = cols[0].len();
    let mat = Matrix::from_fn(rows, dim, |i, j| cols[j][i].clone());
    rref(&mat).kernel
}

fn vectors_rank(v: &[Vec<FieldElem>], dim: usize) -> usize {
    if v.is_empty() || dim == 0 {
        return 0;
    }
    rank(&Matrix::from_fn(v.len(), dim, |i, j| v[i][j].clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H2Even {
    pub dim: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    /// Cocycles completing a basis of the coboundaries to one of the cocycles.
    pub basis: Vec<Cochain2Even>,
}

pub fn h2_even(g: &SuperAlgebra) -> H2Even {
    let (m, n) = (g.m(), g.n());
    let z = cocycle_space(g);
    let mut span = Echelon::default();
    let rb = coboundary_vectors(g).into_iter().filter(|v| span.insert(v.clone())).count();
    let basis = z
        .iter()
        .filter(|v| span.insert((*v).clone()))
        .map(|v| Cochain2Even::from_coords(m, n, v).expect("coords"))
        .collect();
    H2Even { dim: z.len() - rb, cocycle_dim: z.len(), coboundary_dim: rb, basis }
}

/// Row-echelon span built one vector at a time.
#[derive(Default)]
struct Echelon {
    rows: Vec<(usize, Vec<FieldElem>)>,
}

impl Echelon {
    /// Add `v` to the span; `false` if it was already in it.
    fn insert(&mut self, mut v: Vec<FieldElem>) -> bool {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero");
        let v = v.iter().map(|x| x * &inv).collect();
        self.rows.push((p, v));
        true
    }
}

/// How many of `list` are independent modulo coboundaries.
pub fn independent_mod_coboundaries(g: &SuperAlgebra, list: &[Cochain2Even]) -> usize {
    let dim = cochain_space_dim(g.m(), g.n());
    let mut b = coboundary_vectors(g);
    let rb = vectors_rank(&b, dim);
    b.extend(list.iter().map(Cochain2Even::coords));
    vectors_rank(&b, dim) - rb
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeResult {
    pub nilpotent: bool,
    pub series: Vec<crate::superalg::GradedDim>,
    /// Whether setting the parameter to zero gives back the original product.
    pub specializes: bool,
}

/// Replay a deformed product given as a full bracket list in the parameter `t`.
pub fn deformation_nilpotency_probe(
    g: &SuperAlgebra,
    deformed: &str,
    t: &FieldElem,
) -> Result<ProbeResult, CohomologyError> {
    let gt = SuperAlgebra::parse_brackets(g.m(), g.n(), deformed, t)?;
    if !gt.check_jacobi().is_empty() {
        return Err(CohomologyError::JacobiViolated);
    }
    let g0 = SuperAlgebra::parse_brackets(g.m(), g.n(), deformed, &FieldElem::zero())?;
    let series = gt.lower_central_series();
    let nilpotent = series.last().is_some_and(|d| d.total() == 0);
    Ok(ProbeResult { nilpotent, series, specializes: g0.structure_tensor() == g.structure_tensor() })
}
