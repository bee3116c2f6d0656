//! Isomorphism and degeneration invariants: graded center, derived algebra,
//! (α,β,γ)-derivations, orbit dimension and the largest trivial subalgebra.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::exactla::{ideal_triviality, rref, span_basis, GroebnerCaps, Matrix, Poly, PolySystem, Triviality};
use crate::scalars::FieldElem;
use crate::superalg::{basis_symbols, format_combination, GradedDim, SuperAlgebra};

/// Parity of a homogeneous map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Degree {
    Even,
    Odd,
}

/// A graded subspace given by basis vectors in the full coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSubspace {
    pub even: Vec<Vec<FieldElem>>,
    pub odd: Vec<Vec<FieldElem>>,
}

impl GradedSubspace {
    pub fn dim(&self) -> GradedDim {
        GradedDim::new(self.even.len(), self.odd.len())
    }

    pub fn describe(&self, m: usize, n: usize) -> String {
        let syms = basis_symbols(m, n);
        let parts: Vec<String> = self.even.iter().chain(&self.odd).map(|v| format_combination(v, &syms)).collect();
        format!("span{{{}}}", parts.join(", "))
    }
}

fn structure(g: &SuperAlgebra) -> (usize, usize, usize, Vec<FieldElem>) {
    let (m, n) = (g.m(), g.n());
    (m, n, m + n, g.structure_tensor())
}

/// Vectors `x` of one parity with `[x, b] = 0` for every basis vector `b`.
pub fn center(g: &SuperAlgebra) -> GradedSubspace {
    let (m, _, nn, t) = structure(g);
    let part = |range: std::ops::Range<usize>| -> Vec<Vec<FieldElem>> {
        let vars: Vec<usize> = range.collect();
        if vars.is_empty() {
            return Vec::new();
        }
        let mut rows = Vec::new();
        for q in 0..nn {
            for u in 0..nn {
                let row: Vec<FieldElem> = vars.iter().map(|&p| t[(p * nn + q) * nn + u].clone()).collect();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        kernel_of(&rows, vars.len())
            .into_iter()
            .map(|k| {
                let mut v = vec![FieldElem::zero(); nn];
                for (c, &p) in k.into_iter().zip(&vars) {
                    v[p] = c;
                }
                v
            })
            .collect()
    };
    GradedSubspace { even: part(0..m), odd: part(m..nn) }
}

/// Span of all brackets of basis pairs.
pub fn derived(g: &SuperAlgebra) -> GradedSubspace {
    let (m, _, nn, t) = structure(g);
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for p in 0..nn {
        for q in p..nn {
            let v = t[(p * nn + q) * nn..(p * nn + q + 1) * nn].to_vec();
            if v.iter().all(FieldElem::is_zero) {
                continue;
            }
            if (p < m) == (q < m) {
                even.push(v);
            } else {
                odd.push(v);
            }
        }
    }
    GradedSubspace { even: span_basis(&even, nn), odd: span_basis(&odd, nn) }
}

fn kernel_of(rows: &[Vec<FieldElem>], nvars: usize) -> Vec<Vec<FieldElem>> {
    if rows.is_empty() {
        return (0..nvars)
            .map(|j| {
                let mut v = vec![FieldElem::zero(); nvars];
                v[j] = FieldElem::one();
                v
            })
            .collect();
    }
    let mat = Matrix::from_fn(rows.len(), nvars, |i, j| rows[i][j].clone());
    rref(&mat).kernel
}

/// Solution space of `α D[x,y] = β [Dx,y] + (-1)^{deg|x|} γ [x,Dy]`.
/// Each basis element is a full `(m+n) x (m+n)` matrix whose column `p` is `D(b_p)`.
pub fn abc_derivations(
    g: &SuperAlgebra,
    alpha: &FieldElem,
    beta: &FieldElem,
    gamma: &FieldElem,
    degree: Degree,
) -> Vec<Matrix<FieldElem>> {
    let (m, _, nn, t) = structure(g);
    let allowed = |s: usize, r: usize| match degree {
        Degree::Even => (s < m) == (r < m),
        Degree::Odd => (s < m) != (r < m),
    };
    let vars: Vec<(usize, usize)> =
        (0..nn).flat_map(|s| (0..nn).map(move |r| (s, r))).filter(|&(s, r)| allowed(s, r)).collect();
    let index: BTreeMap<(usize, usize), usize> = vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let tt = |p: usize, q: usize, u: usize| &t[(p * nn + q) * nn + u];
    let mut rows = Vec::new();
    for p in 0..nn {
        for q in 0..nn {
            let sign_neg = degree == Degree::Odd && p >= m;
            for u in 0..nn {
                let mut row = vec![FieldElem::zero(); vars.len()];
                // α D([b_p,b_q]) : coefficient of D[u][r]
                if !alpha.is_zero() {
                    for r in 0..nn {
                        let c = tt(p, q, r);
                        if let (false, Some(&k)) = (c.is_zero(), index.get(&(u, r))) {
                            row[k] += &(alpha * c);
                        }
                    }
                }
                // -β [D b_p, b_q]
                if !beta.is_zero() {
                    for s in 0..nn {
                        let c = tt(s, q, u);
                        if let (false, Some(&k)) = (c.is_zero(), index.get(&(s, p))) {
                            row[k] -= &(beta * c);
                        }
                    }
                }
                // ∓γ [b_p, D b_q]
                if !gamma.is_zero() {
                    for s in 0..nn {
                        let c = tt(p, s, u);
                        if let (false, Some(&k)) = (c.is_zero(), index.get(&(s, q))) {
                            let v = gamma * c;
                            if sign_neg {
                                row[k] += &v;
                            } else {
                                row[k] -= &v;
                            }
                        }
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    kernel_of(&rows, vars.len())
        .into_iter()
        .map(|k| {
            let mut d = Matrix::zeros(nn, nn);
            for (c, &(s, r)) in k.into_iter().zip(&vars) {
                d[(s, r)] = c;
            }
            d
        })
        .collect()
}

pub fn abc_dim(g: &SuperAlgebra, alpha: &FieldElem, beta: &FieldElem, gamma: &FieldElem, degree: Degree) -> usize {
    abc_derivations(g, alpha, beta, gamma, degree).len()
}

/// Dimension of the even derivation algebra.
pub fn der0_dim(g: &SuperAlgebra) -> usize {
    let one = FieldElem::one();
    abc_dim(g, &one, &one, &one, Degree::Even)
}

/// `m² + n² - dim Der₀(g)`.
pub fn orbit_dim(g: &SuperAlgebra) -> usize {
    g.m() * g.m() + g.n() * g.n() - der0_dim(g)
}

pub fn gamma_is_zero(g: &SuperAlgebra) -> bool {
    g.gamma_is_zero()
}

/// Result of the trivial-subalgebra search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialMax {
    /// Largest dimension with an explicit witness.
    pub lower: usize,
    pub witness: GradedSubspace,
    /// `None` when some shape that could raise the maximum was undecided.
    pub exact: Option<usize>,
    /// Shapes `(α|β)` for which a trivial graded subspace exists.
    pub profile: BTreeSet<GradedDim>,
    pub undecided: BTreeSet<GradedDim>,
}

/// Reduced column-echelon parametrizations of the `k`-dimensional subspaces of a `d`-dimensional space.
/// Each pattern is a list of basis vectors whose entries are affine in fresh variables
/// `offset..offset+nfree`, returned as polynomial coordinates.
fn echelon_patterns(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in start..d {
            cur.push(p);
            rec(p + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

/// Free positions `(vector, row)` of a pivot pattern: non-pivot rows after the vector's pivot.
fn free_positions(pivots: &[usize], d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (j, &p) in pivots.iter().enumerate() {
        for r in p + 1..d {
            if !pivots.contains(&r) {
                out.push((j, r));
            }
        }
    }
    out
}

struct Shape {
    /// basis vectors as polynomial coordinates in the full space
    vectors: Vec<(bool, Vec<Poly>)>,
    nvars: usize,
}

fn build_shape(m: usize, n: usize, ep: &[usize], op: &[usize]) -> Shape {
    let fe = free_positions(ep, m);
    let fo = free_positions(op, n);
    let nvars = fe.len() + fo.len();
    let mut vectors = Vec::new();
    let mut var = 0;
    let mut make =
        |pivots: &[usize], free: &[(usize, usize)], offset: usize, odd: bool, vectors: &mut Vec<(bool, Vec<Poly>)>| {
            for (j, &p) in pivots.iter().enumerate() {
                let mut v = vec![Poly::zero(nvars); m + n];
                v[offset + p] = Poly::constant(nvars, FieldElem::one());
                for &(jj, r) in free {
                    if jj == j {
                        v[offset + r] = Poly::var(nvars, var);
                        var += 1;
                    }
                }
                vectors.push((odd, v));
            }
        };
    make(ep, &fe, 0, false, &mut vectors);
    make(op, &fo, m, true, &mut vectors);
    Shape { vectors, nvars }
}

fn bracket_polys(t: &[FieldElem], nn: usize, x: &[Poly], y: &[Poly], nvars: usize) -> Vec<Poly> {
    let mut out = vec![Poly::zero(nvars); nn];
    for p in 0..nn {
        if x[p].is_zero() {
            continue;
        }
        for q in 0..nn {
            if y[q].is_zero() {
                continue;
            }
            let xy = x[p].mul(&y[q]);
            for (u, o) in out.iter_mut().enumerate() {
                let c = &t[(p * nn + q) * nn + u];
                if !c.is_zero() {
                    *o = o.add(&xy.scale(c));
                }
            }
        }
    }
    out
}

fn shape_system(g: &SuperAlgebra, t: &[FieldElem], shape: &Shape) -> PolySystem {
    let nn = g.total_dim();
    let mut polys = Vec::new();
    for a in 0..shape.vectors.len() {
        for b in a..shape.vectors.len() {
            let (oa, va) = &shape.vectors[a];
            let (ob, vb) = &shape.vectors[b];
            if a == b && !*oa {
                continue;
            }
            let _ = ob;
            for p in bracket_polys(t, nn, va, vb, shape.nvars) {
                if !p.is_zero() && !polys.contains(&p) {
                    polys.push(p);
                }
            }
        }
    }
    PolySystem { variables: (0..shape.nvars).map(|k| format!("x{k}")).collect(), polys }
}

fn witness_values() -> Vec<FieldElem> {
    let i = FieldElem::i();
    vec![
        FieldElem::zero(),
        FieldElem::one(),
        -FieldElem::one(),
        i.clone(),
        -i,
        FieldElem::from_int(2),
        FieldElem::from_int(-2),
        FieldElem::sqrt2(),
        FieldElem::parse("1/2").expect("literal"),
    ]
}

/// Fix variables one at a time to small values, keeping the system consistent.
fn find_point(sys: &PolySystem, caps: GroebnerCaps) -> Option<Vec<FieldElem>> {
    let nvars = sys.variables.len();
    let mut point = Vec::with_capacity(nvars);
    let mut polys = sys.polys.clone();
    for k in 0..nvars {
        let mut chosen = None;
        for v in witness_values() {
            let next: Vec<Poly> = polys.iter().map(|p| p.substitute(k, &v)).filter(|p| !p.is_zero()).collect();
            let s = PolySystem { variables: sys.variables.clone(), polys: next.clone() };
            if ideal_triviality(&s, caps) == Triviality::NonEmpty {
                chosen = Some((v, next));
                break;
            }
        }
        let (v, next) = chosen?;
        point.push(v);
        polys = next;
    }
    polys.is_empty().then_some(point)
}

fn eval_vec(v: &[Poly], point: &[FieldElem]) -> Vec<FieldElem> {
    v.iter().map(|p| p.eval(point)).collect()
}

/// Decide, shape by shape, which graded trivial subspaces exist.
pub fn trivial_sub_max(g: &SuperAlgebra) -> TrivialMax {
    trivial_sub_max_with(g, GroebnerCaps::default())
}

pub fn trivial_sub_max_with(g: &SuperAlgebra, caps: GroebnerCaps) -> TrivialMax {
    let (m, n, nn, t) = structure(g);
    let mut profile = BTreeSet::new();
    let mut undecided = BTreeSet::new();
    let mut best: Option<GradedSubspace> = None;
    for a in 0..=m {
        for b in 0..=n {
            let mut any_unknown = false;
            let mut found = false;
            let mut witness = None;
            'patterns: for ep in echelon_patterns(m, a) {
                for op in echelon_patterns(n, b) {
                    let shape = build_shape(m, n, &ep, &op);
                    let sys = shape_system(g, &t, &shape);
                    match ideal_triviality(&sys, caps) {
                        Triviality::Empty => {}
                        Triviality::Unknown => any_unknown = true,
                        Triviality::NonEmpty => {
                            found = true;
                            if let Some(pt) = find_point(&sys, caps) {
                                let mut sub = GradedSubspace { even: Vec::new(), odd: Vec::new() };
                                for (odd, v) in &shape.vectors {
                                    let x = eval_vec(v, &pt);
                                    if *odd {
                                        sub.odd.push(x);
                                    } else {
                                        sub.even.push(x);
                                    }
                                }
                                witness = Some(sub);
                                break 'patterns;
                            }
                        }
                    }
                }
            }
            let d = GradedDim::new(a, b);
            if found {
                profile.insert(d);
            } else if any_unknown {
                undecided.insert(d);
            }
            if let Some(w) = witness {
                if best.as_ref().is_none_or(|bw| bw.dim().total() < a + b) {
                    best = Some(w);
                }
            }
        }
    }
    let _ = nn;
    let max_found = profile.iter().map(GradedDim::total).max().unwrap_or(0);
    let exact = if undecided.iter().any(|d| d.total() > max_found) { None } else { Some(max_found) };
    let witness = best.unwrap_or(GradedSubspace { even: Vec::new(), odd: Vec::new() });
    TrivialMax { lower: witness.dim().total(), witness, exact, profile, undecided }
}

/// All invariants in one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub name: Option<String>,
    pub dim: GradedDim,
    pub center: GradedDim,
    pub derived: GradedDim,
    pub gamma_zero: bool,
    pub der0_dim: usize,
    pub orbit_dim: usize,
    pub abc_entries: Vec<AbcEntry>,
    pub trivial_max: TrivialReport,
    pub trivial_graded_profile: Vec<GradedDim>,
    pub lower_central_series: Vec<GradedDim>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbcEntry {
    pub alpha: FieldElem,
    pub beta: FieldElem,
    pub gamma: FieldElem,
    pub degree: Degree,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivialReport {
    pub lower: usize,
    pub witness: String,
    pub exact: Option<usize>,
}

/// The tuples requested by the non-degeneration tables, in both degrees.
pub fn standard_abc_tuples() -> Vec<(FieldElem, FieldElem, FieldElem)> {
    let (z, o) = (FieldElem::zero(), FieldElem::one());
    vec![(o.clone(), o.clone(), o.clone()), (z.clone(), o.clone(), z.clone()), (z, o.clone(), -o)]
}

pub fn invariant_report(g: &SuperAlgebra) -> InvariantReport {
    invariant_report_with(g, GroebnerCaps::default())
}

pub fn invariant_report_with(g: &SuperAlgebra, caps: GroebnerCaps) -> InvariantReport {
    let mut abc_entries = Vec::new();
    for (a, b, c) in standard_abc_tuples() {
        for degree in [Degree::Even, Degree::Odd] {
            let dim = abc_dim(g, &a, &b, &c, degree);
            abc_entries.push(AbcEntry { alpha: a.clone(), beta: b.clone(), gamma: c.clone(), degree, dim });
        }
    }
    let tm = trivial_sub_max_with(g, caps);
    let der0 = der0_dim(g);
    InvariantReport {
        name: g.name.clone(),
        dim: g.dim(),
        center: center(g).dim(),
        derived: derived(g).dim(),
        gamma_zero: g.gamma_is_zero(),
        der0_dim: der0,
        orbit_dim: g.m() * g.m() + g.n() * g.n() - der0,
        abc_entries,
        trivial_max: TrivialReport { lower: tm.lower, witness: tm.witness.describe(g.m(), g.n()), exact: tm.exact },
        trivial_graded_profile: tm.profile.into_iter().collect(),
        lower_central_series: g.lower_central_series(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(m: usize, n: usize, text: &str) -> SuperAlgebra {
        SuperAlgebra::parse_brackets(m, n, text, &FieldElem::one()).unwrap()
    }

    #[test]
    fn center_and_derived() {
        let g = alg(1, 2, "[e1,f2]=f1");
        assert_eq!(center(&g).dim(), GradedDim::new(0, 1));
        assert_eq!(derived(&g).dim(), GradedDim::new(0, 1));
        let h = alg(2, 2, "[e2,f2]=f1");
        let z = center(&h);
        assert_eq!(z.dim(), GradedDim::new(1, 1));
        assert_eq!(z.describe(2, 2), "span{e1, f1}");
        assert_eq!(derived(&alg(1, 2, "[f1,f2]=e1")).dim(), GradedDim::new(1, 0));
        assert_eq!(center(&SuperAlgebra::abelian(2, 3)).dim(), GradedDim::new(2, 3));
        assert_eq!(derived(&SuperAlgebra::abelian(2, 3)).dim(), GradedDim::new(0, 0));
    }

    #[test]
    fn derivations() {
        let g = alg(1, 1, "[f1,f1]=e1");
        let one = FieldElem::one();
        let d = abc_derivations(&g, &one, &one, &one, Degree::Even);
        assert_eq!(d.len(), 1);
        // D = diag(2b; b)
        let dm = &d[0];
        assert_eq!(dm[(0, 0)], &dm[(1, 1)] * &FieldElem::from_int(2));
        assert_eq!(orbit_dim(&g), 1);
        assert_eq!(orbit_dim(&alg(3, 0, "[e1,e2]=e3")), 3);
        assert_eq!(orbit_dim(&SuperAlgebra::abelian(2, 2)), 0);
        assert_eq!(abc_dim(&SuperAlgebra::abelian(2, 3), &one, &FieldElem::zero(), &one, Degree::Even), 13);
    }

    #[test]
    fn trivial_subalgebras() {
        let g = alg(1, 1, "[f1,f1]=e1");
        let t = trivial_sub_max(&g);
        assert_eq!(t.exact, Some(1));
        assert_eq!(t.lower, 1);
        let a = trivial_sub_max(&SuperAlgebra::abelian(2, 2));
        assert_eq!(a.exact, Some(4));
    }
}
