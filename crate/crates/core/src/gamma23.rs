//! Pairs `(Γ¹, Γ²)` of symmetric 3×3 matrices under
//! `(T,S)·(Γ¹,Γ²) = (T₁₁SᵗΓ¹S + T₁₂SᵗΓ²S, T₂₁SᵗΓ¹S + T₂₂SᵗΓ²S)`.
//!
//! These are exactly the (2|3) superalgebras whose only nonzero bracket is
//! `[f_i,f_j] = Γ¹_{ij} e1 + Γ²_{ij} e2`; the twelve orbits are `(2|3)_0 … (2|3)_11`.

use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactla::{inverse, rank, rref, solve, span_rank, Matrix, UPoly};
use crate::scalars::FieldElem;
use crate::superalg::SuperAlgebra;

type M = Matrix<FieldElem>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gamma23Error {
    #[error("matrix is not symmetric 3x3")]
    NotSymmetric,
    #[error("group element has the wrong shape")]
    Shape,
    #[error("group element is singular")]
    Singular,
    #[error("parse: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymPair {
    pub g1: M,
    pub g2: M,
}

impl SymPair {
    pub fn new(g1: M, g2: M) -> Result<SymPair, Gamma23Error> {
        for g in [&g1, &g2] {
            if g.rows() != 3 || g.cols() != 3 || !g.is_symmetric() {
                return Err(Gamma23Error::NotSymmetric);
            }
        }
        Ok(SymPair { g1, g2 })
    }

    /// Both matrices as JSON arrays of scalar texts, e.g. `[["1","0","0"],…]`.
    pub fn parse_json(g1: &str, g2: &str) -> Result<SymPair, Gamma23Error> {
        SymPair::new(parse_matrix(g1)?, parse_matrix(g2)?)
    }

    pub fn zero() -> SymPair {
        SymPair { g1: Matrix::zeros(3, 3), g2: Matrix::zeros(3, 3) }
    }

    /// The (2|3) superalgebra with `[f_i,f_j] = Γ¹_{ij} e1 + Γ²_{ij} e2`.
    pub fn to_superalgebra(&self) -> SuperAlgebra {
        let mut g = SuperAlgebra::zero(2, 3);
        for i in 0..3 {
            for j in i..3 {
                g.set_gamma(i, j, 0, self.g1[(i, j)].clone());
                g.set_gamma(i, j, 1, self.g2[(i, j)].clone());
            }
        }
        g
    }

    /// Inverse of [`SymPair::to_superalgebra`]; `None` unless the algebra is (2|3)
    /// with only the odd-odd bracket.
    pub fn from_superalgebra(g: &SuperAlgebra) -> Option<SymPair> {
        let d = g.dim();
        if (d.even, d.odd) != (2, 3) || g.c_tensor().iter().chain(g.rho_tensor()).any(|x| !x.is_zero()) {
            return None;
        }
        let g1 = Matrix::from_fn(3, 3, |i, j| g.gamma(i, j, 0).clone());
        let g2 = Matrix::from_fn(3, 3, |i, j| g.gamma(i, j, 1).clone());
        Some(SymPair { g1, g2 })
    }
}

fn parse_matrix(text: &str) -> Result<M, Gamma23Error> {
    let rows: Vec<Vec<String>> = serde_json::from_str(text).map_err(|e| Gamma23Error::Parse(e.to_string()))?;
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|s| FieldElem::parse(s).map_err(|e| Gamma23Error::Parse(e.to_string()))).collect())
        .collect::<Result<Vec<Vec<FieldElem>>, _>>()?;
    Matrix::from_rows(rows).map_err(|_| Gamma23Error::NotSymmetric)
}

fn fe(n: i64) -> FieldElem {
    FieldElem::from_int(n)
}

fn sq(rows: &[&[FieldElem]]) -> M {
    Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("square literal")
}

/// `I_k`: the 3×3 matrix unit at `(k,k)`, `k = 1,2,3`.
pub fn unit(k: usize) -> M {
    Matrix::from_fn(3, 3, |i, j| if i == j && i + 1 == k { fe(1) } else { fe(0) })
}

pub fn k_mat() -> M {
    sq(&[&[fe(0), fe(1)], &[fe(1), fe(0)]])
}

pub fn l_mat() -> M {
    sq(&[&[fe(0), fe(0)], &[fe(0), fe(2)]])
}

pub fn u0() -> Vec<FieldElem> {
    vec![fe(0), fe(1)]
}

pub fn u1() -> Vec<FieldElem> {
    vec![fe(1), FieldElem::i()]
}

/// `Δ(λ) = [[λ+1, i], [i, λ-1]]`
pub fn delta(lambda: &FieldElem) -> M {
    sq(&[&[lambda + &fe(1), FieldElem::i()], &[FieldElem::i(), lambda - &fe(1)]])
}

/// `T_λ = [[-1, 0], [-λ, 1]]`
pub fn t_lambda(lambda: &FieldElem) -> M {
    sq(&[&[fe(-1), fe(0)], &[-lambda, fe(1)]])
}

/// `R = (1/√2)[[1, -1], [i, i]]`
pub fn r_mat() -> M {
    let h = FieldElem::sqrt2().inv().expect("nonzero");
    sq(&[&[fe(1), fe(-1)], &[FieldElem::i(), FieldElem::i()]]).scale(&h)
}

/// `S₀ = R ⊕ (i)`
pub fn s0() -> M {
    r_mat().direct_sum(&sq(&[&[FieldElem::i()]]))
}

/// `[[a, u], [uᵗ, d]]` for a 2×2 block `a`.
pub fn block3(a: &M, u: &[FieldElem], d: FieldElem) -> M {
    Matrix::from_fn(3, 3, |i, j| match (i, j) {
        (2, 2) => d.clone(),
        (2, k) | (k, 2) => u[k].clone(),
        _ => a[(i, j)].clone(),
    })
}

/// Representative pair of `(2|3)_k`, `k = 0…11`.
pub fn representative(k: usize) -> Option<SymPair> {
    let z = Matrix::zeros(3, 3);
    let id = Matrix::identity(3);
    let sum = |a: M, b: M| a.add(&b).expect("3x3");
    let k0 = block3(&k_mat(), &[fe(0), fe(0)], fe(0));
    let k1 = block3(&k_mat(), &[fe(0), fe(0)], fe(1));
    let l0 = block3(&l_mat(), &[fe(0), fe(0)], fe(0));
    let l1 = block3(&l_mat(), &[fe(0), fe(0)], fe(1));
    let lu = block3(&l_mat(), &u0(), fe(0));
    let (g1, g2) = match k {
        0 => (z.clone(), z),
        1 => (unit(1), z),
        2 => (sum(unit(1), unit(2)), z),
        3 => (id, z),
        4 => (unit(1), unit(2)),
        5 => (sum(unit(1), unit(3)), unit(2)),
        6 => (sum(unit(1), unit(3)), sum(unit(2), unit(3))),
        7 => (k0, l0),
        8 => (k0, lu),
        9 => (k1, l0),
        10 => (k1, l1),
        11 => (k1, lu),
        _ => return None,
    };
    Some(SymPair { g1, g2 })
}

pub fn representatives() -> Vec<(String, SymPair)> {
    (0..12).map(|k| (format!("(2|3)_{k}"), representative(k).expect("k < 12"))).collect()
}

/// The action of `(T, S) ∈ GL₂ × GL₃`.
pub fn pair_act(t: &M, s: &M, p: &SymPair) -> Result<SymPair, Gamma23Error> {
    if (t.rows(), t.cols(), s.rows(), s.cols()) != (2, 2, 3, 3) {
        return Err(Gamma23Error::Shape);
    }
    if inverse(t).is_err() || inverse(s).is_err() {
        return Err(Gamma23Error::Singular);
    }
    let st = s.transpose();
    let a = st.mul(&p.g1).and_then(|x| x.mul(s)).expect("3x3");
    let b = st.mul(&p.g2).and_then(|x| x.mul(s)).expect("3x3");
    let comb = |x: &FieldElem, y: &FieldElem| a.scale(x).add(&b.scale(y)).expect("3x3");
    Ok(SymPair { g1: comb(&t[(0, 0)], &t[(0, 1)]), g2: comb(&t[(1, 0)], &t[(1, 1)]) })
}

/// A random invertible `(T, S)` with small Gaussian-integer entries.
pub fn random_group_element<R: Rng>(rng: &mut R) -> (M, M) {
    let mut draw = |n: usize| loop {
        let entries: Vec<FieldElem> =
            (0..n * n).map(|_| &fe(rng.gen_range(-3..=3)) + &(&fe(rng.gen_range(-1..=1)) * &FieldElem::i())).collect();
        let m = Matrix::from_fn(n, n, |i, j| entries[i * n + j].clone());
        if inverse(&m).is_ok() {
            return m;
        }
    };
    let t = draw(2);
    let s = draw(3);
    (t, s)
}

/// `λΓ¹ + Γ²` with `λ` as the indeterminate.
fn pencil(p: &SymPair) -> Matrix<UPoly> {
    Matrix::from_fn(3, 3, |i, j| UPoly::linear(p.g1[(i, j)].clone(), p.g2[(i, j)].clone()))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn minors(m: &Matrix<UPoly>, k: usize) -> Vec<UPoly> {
    let mut out = Vec::new();
    for r in subsets(m.rows(), k) {
        for c in subsets(m.cols(), k) {
            out.push(m.select(&r, &c).det().expect("square"));
        }
    }
    out
}

fn distinct_roots(p: &UPoly) -> usize {
    let d = p.degree().unwrap_or(0);
    d - p.gcd(&p.derivative()).degree().unwrap_or(0)
}

/// Exact projective invariants of the pencil `{λΓ¹ + μΓ²}`; all are invariant
/// under the action.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PencilSignature {
    /// `dim span{Γ¹, Γ²}`.
    pub span_dim: usize,
    /// Rank of a generic member.
    pub generic_rank: usize,
    /// Multiplicities of the roots of the binary cubic `det(λΓ¹ + μΓ²)`,
    /// descending; `None` when it vanishes identically.
    pub det_multiplicities: Option<Vec<usize>>,
    /// `drop_points[k]`: number of points `[λ:μ]` of the projective line
    /// where the member has rank at most `k`, for `k < generic_rank`.
    pub drop_points: Vec<usize>,
    pub has_invertible_member: bool,
    pub simdiag: bool,
}

impl PencilSignature {
    pub fn of(p: &SymPair) -> PencilSignature {
        let vecs: Vec<Vec<FieldElem>> = [&p.g1, &p.g2].iter().map(|g| g.to_rows().concat()).collect();
        let span_dim = span_rank(&vecs, 9);
        let pm = pencil(p);
        // A nonzero minor has degree <= 3, so one of the eight probes attains the generic rank.
        let at_infinity = rank(&p.g1);
        let generic_rank =
            (0..=6).map(|l| rank(&p.g1.scale(&fe(l)).add(&p.g2).expect("3x3"))).fold(at_infinity, usize::max);
        let drop_points = (0..generic_rank)
            .map(|k| {
                let mut g = UPoly::new(vec![]);
                for q in minors(&pm, k + 1) {
                    g = g.gcd(&q);
                    if g.degree() == Some(0) {
                        break;
                    }
                }
                distinct_roots(&g) + usize::from(at_infinity <= k)
            })
            .collect();
        let det_multiplicities = (generic_rank == 3).then(|| {
            let d = pm.det().expect("square");
            let mut mult = Vec::new();
            for (k, f) in d.squarefree_decomposition().iter().enumerate() {
                mult.extend(std::iter::repeat_n(k + 1, f.degree().unwrap_or(0)));
            }
            let inf = 3 - d.degree().unwrap_or(0);
            if inf > 0 {
                mult.push(inf);
            }
            mult.sort_unstable_by(|a, b| b.cmp(a));
            mult
        });
        PencilSignature {
            span_dim,
            generic_rank,
            det_multiplicities,
            drop_points,
            has_invertible_member: generic_rank == 3,
            simdiag: simdiag_test(p),
        }
    }
}

/// Monic minimal polynomial via the first linear dependence among `I, A, A², …`.
pub fn minimal_polynomial(a: &M) -> UPoly {
    let n = a.rows();
    let mut powers = vec![Matrix::identity(n)];
    loop {
        let next = powers.last().expect("nonempty").mul(a).expect("square");
        let k = powers.len();
        let cols = Matrix::from_fn(n * n, k, |r, j| powers[j][(r / n, r % n)].clone());
        let target: Vec<FieldElem> = next.to_rows().concat();
        if let Some(c) = solve(&cols, &target) {
            let mut coeffs: Vec<FieldElem> = c.iter().map(|x| -x).collect();
            coeffs.push(FieldElem::one());
            return UPoly::new(coeffs);
        }
        powers.push(next);
    }
}

pub fn is_diagonalizable(a: &M) -> bool {
    minimal_polynomial(a).is_squarefree()
}

/// Whether some `(T, S)` makes both members diagonal.
pub fn simdiag_test(p: &SymPair) -> bool {
    simdiag(&p.g1, &p.g2)
}

fn simdiag(a: &M, b: &M) -> bool {
    let n = a.rows();
    if n == 0 || (rank(a) <= 1 && rank(b) <= 1) {
        return true;
    }
    let probes = std::iter::once((a.clone(), b.clone()))
        .chain((0..=6).map(|l| (a.scale(&fe(l)).add(b).expect("square"), a.clone())));
    for (member, other) in probes {
        if let Ok(inv) = inverse(&member) {
            return is_diagonalizable(&inv.mul(&other).expect("square"));
        }
    }
    // Singular pencil: split off the common kernel and look at the rest.
    let stacked = Matrix::from_rows([a.to_rows(), b.to_rows()].concat()).expect("same width");
    let kernel = rref(&stacked).kernel;
    if kernel.is_empty() {
        return false;
    }
    let mut basis = Vec::new();
    for k in 0..n {
        let e: Vec<FieldElem> = (0..n).map(|j| if j == k { fe(1) } else { fe(0) }).collect();
        let mut trial = kernel.clone();
        trial.extend(basis.iter().cloned());
        trial.push(e.clone());
        if span_rank(&trial, n) == trial.len() {
            basis.push(e);
        }
    }
    basis.extend(kernel.iter().cloned());
    let s = Matrix::from_fn(n, n, |i, j| basis[j][i].clone());
    let r = n - kernel.len();
    let restrict = |m: &M| s.transpose().mul(m).and_then(|x| x.mul(&s)).expect("square").submatrix(0, 0, r, r);
    simdiag(&restrict(a), &restrict(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// `None` when no unique representative matches.
    pub label: Option<String>,
    pub signature: PencilSignature,
}

/// Signatures of the twelve representatives.
pub fn representative_signatures() -> &'static [(String, PencilSignature)] {
    static SIGS: OnceLock<Vec<(String, PencilSignature)>> = OnceLock::new();
    SIGS.get_or_init(|| representatives().into_iter().map(|(l, p)| (l, PencilSignature::of(&p))).collect())
}

pub fn classify_pair(p: &SymPair) -> Classification {
    let signature = PencilSignature::of(p);
    let hits: Vec<&String> =
        representative_signatures().iter().filter(|(_, s)| *s == signature).map(|(l, _)| l).collect();
    let label = match hits.as_slice() {
        [one] => Some((*one).clone()),
        _ => None,
    };
    Classification { label, signature }
}

/// Result of [`sym_normal_form`]: `transform` is orthogonal and
/// `transformᵗ · A · transform = form`.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalForm {
    Diagonal {
        form: M,
        transform: M,
    },
    /// `Δ(λ)` for n = 2; `[[Δ(λ), c·u₁], [c·u₁ᵗ, μ]]` for n = 3.
    Jordan {
        form: M,
        transform: M,
        lambda: FieldElem,
        mu: Option<FieldElem>,
        c: Option<FieldElem>,
    },
    Unsupported(String),
}

impl NormalForm {
    pub fn form(&self) -> Option<&M> {
        match self {
            NormalForm::Diagonal { form, .. } | NormalForm::Jordan { form, .. } => Some(form),
            NormalForm::Unsupported(_) => None,
        }
    }

    pub fn transform(&self) -> Option<&M> {
        match self {
            NormalForm::Diagonal { transform, .. } | NormalForm::Jordan { transform, .. } => Some(transform),
            NormalForm::Unsupported(_) => None,
        }
    }
}

fn dot(u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
    u.iter().zip(v).fold(FieldElem::zero(), |acc, (a, b)| &acc + &(a * b))
}

fn axpy(a: &FieldElem, x: &[FieldElem], y: &[FieldElem]) -> Vec<FieldElem> {
    x.iter().zip(y).map(|(xi, yi)| &(a * xi) + yi).collect()
}

fn normalize(v: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let s = dot(v, v).sqrt()?.inv().ok()?;
    Some(v.iter().map(|x| x * &s).collect())
}

/// Orthonormal basis (for the bilinear form `xᵗy`) of the span of `vs`, if one
/// is reachable with square roots in the field.
fn orthonormal_basis(vs: &[Vec<FieldElem>]) -> Option<Vec<Vec<FieldElem>>> {
    let n = vs.first()?.len();
    let d = span_rank(vs, n);
    let mut pool: Vec<Vec<FieldElem>> = vs.to_vec();
    let coeffs = [fe(1), fe(-1), fe(2), FieldElem::i(), FieldElem::sqrt2()];
    for (a, u) in vs.iter().enumerate() {
        for v in &vs[a + 1..] {
            for c in &coeffs {
                pool.push(axpy(c, v, u));
            }
        }
    }
    let mut out: Vec<Vec<FieldElem>> = Vec::new();
    while out.len() < d {
        let next = pool.iter().find_map(|c| {
            let w = out.iter().fold(c.clone(), |w, q| axpy(&-&dot(c, q), q, &w));
            normalize(&w)
        })?;
        out.push(next);
    }
    Some(out)
}

fn kernel(m: &M) -> Vec<Vec<FieldElem>> {
    rref(m).kernel
}

fn columns(vs: &[Vec<FieldElem>]) -> M {
    Matrix::from_fn(vs[0].len(), vs.len(), |i, j| vs[j][i].clone())
}

fn congruent(a: &M, s: &M) -> M {
    s.transpose().mul(a).and_then(|x| x.mul(s)).expect("square")
}

fn shifted(a: &M, lambda: &FieldElem) -> M {
    a.add(&Matrix::identity(a.rows()).scale(&-lambda)).expect("square")
}

/// Roots of the characteristic polynomial with multiplicity.
fn eigenvalues(a: &M) -> Option<Vec<FieldElem>> {
    let n = a.rows();
    let cp = Matrix::from_fn(n, n, |i, j| UPoly::linear(if i == j { fe(1) } else { fe(0) }, -&a[(i, j)]))
        .det()
        .expect("square");
    if let Some(r) = cp.roots() {
        return Some(r);
    }
    let g = cp.gcd(&cp.derivative());
    let r = g.roots()?.into_iter().next()?;
    let (q, _) = cp.div_rem(&UPoly::linear(fe(1), -&r));
    let mut out = q.roots()?;
    out.push(r);
    Some(out)
}

/// Rotation `[[a, -b], [b, a]]` with `a + ib = z`, `a² + b² = 1`.
fn rotation(z: &FieldElem) -> Option<M> {
    let zi = z.inv().ok()?;
    let a = &(z + &zi) / &fe(2);
    let b = &(z - &zi) / &(&fe(2) * &FieldElem::i());
    Some(sq(&[&[a.clone(), -&b], &[b, a]]))
}

/// Orthogonal `S` with `SᵗAS = Δ(λ)` for a non-diagonalizable symmetric 2×2 `A`.
fn jordan2(a: &M) -> Option<(M, FieldElem)> {
    let lambda = &(&a[(0, 0)] + &a[(1, 1)]) / &fe(2);
    let n = shifted(a, &lambda);
    let beta = n[(0, 0)].clone();
    if beta.is_zero() {
        return None;
    }
    let s = &n[(0, 1)] / &(&beta * &FieldElem::i());
    let flip = sq(&[&[fe(1), fe(0)], &[fe(0), s]]);
    let z = beta.inv().ok()?.sqrt()?;
    let t = flip.mul(&rotation(&z)?).expect("2x2");
    (congruent(a, &t) == delta(&lambda)).then_some((t, lambda))
}

/// A unit vector orthogonal to `v` (in the `xᵗy` sense).
fn unit_orthogonal(v: &[FieldElem]) -> Vec<Vec<FieldElem>> {
    let perp = kernel(&Matrix::from_rows(vec![v.to_vec()]).expect("row"));
    let mut out = Vec::new();
    if perp.len() != 2 {
        return out;
    }
    for c in [fe(0), fe(1), fe(-1), fe(2), FieldElem::i(), FieldElem::sqrt2()] {
        for (x, y) in [(&perp[0], &perp[1]), (&perp[1], &perp[0])] {
            if let Some(w) = normalize(&axpy(&c, y, x)) {
                out.push(w);
            }
        }
    }
    out
}

/// Congruence normal form of a symmetric 2×2 or 3×3 matrix by orthogonal `S`.
pub fn sym_normal_form(a: &M) -> NormalForm {
    let n = a.rows();
    if !(2..=3).contains(&n) || !a.is_symmetric() {
        return NormalForm::Unsupported("need a symmetric 2x2 or 3x3 matrix".into());
    }
    let Some(mut eig) = eigenvalues(a) else {
        return NormalForm::Unsupported("characteristic polynomial does not split here".into());
    };
    eig.sort_by(|x, y| x.lex_cmp(y));
    let mut distinct = eig.clone();
    distinct.dedup();
    if is_diagonalizable(a) {
        let mut cols = Vec::new();
        for l in &distinct {
            match orthonormal_basis(&kernel(&shifted(a, l))) {
                Some(b) => cols.extend(b),
                None => return NormalForm::Unsupported("no orthonormal eigenbasis over the field".into()),
            }
        }
        let transform = columns(&cols);
        let form = congruent(a, &transform);
        return NormalForm::Diagonal { form, transform };
    }
    let fail = || NormalForm::Unsupported("square root outside the field".into());
    if n == 2 {
        return match jordan2(a) {
            Some((transform, lambda)) => {
                NormalForm::Jordan { form: delta(&lambda), transform, lambda, mu: None, c: None }
            }
            None => fail(),
        };
    }
    // n = 3: λ is the eigenvalue whose eigenspace is too small.
    let count = |l: &FieldElem| eig.iter().filter(|x| *x == l).count();
    let Some(lambda) = distinct.iter().find(|l| kernel(&shifted(a, l)).len() < count(l)).cloned() else {
        return fail();
    };
    let nil = shifted(a, &lambda);
    let finish = |q: M, lambda: FieldElem| {
        let form = congruent(a, &q);
        let mu = form[(2, 2)].clone();
        let c = form[(0, 2)].clone();
        let want = block3(&delta(&lambda), &[c.clone(), &c * &FieldElem::i()], mu.clone());
        (form == want).then(|| NormalForm::Jordan { form, transform: q, lambda, mu: Some(mu), c: Some(c) })
    };
    if distinct.len() == 2 || rank(&nil) == 1 {
        // Δ(λ) ⊕ (μ): split off a unit vector w of the complementary block.
        let candidates = if distinct.len() == 2 {
            let mu = distinct.iter().find(|l| **l != lambda).expect("two eigenvalues");
            kernel(&shifted(a, mu)).iter().filter_map(|w| normalize(w)).collect()
        } else {
            let col = (0..3).map(|j| nil.col(j)).find(|c| c.iter().any(|x| !x.is_zero())).expect("rank 1");
            unit_orthogonal(&col)
        };
        for w in candidates {
            let Some(p) = orthonormal_basis(&kernel(&Matrix::from_rows(vec![w.clone()]).expect("row"))) else {
                continue;
            };
            let q = columns(&[p[0].clone(), p[1].clone(), w]);
            let inner = congruent(a, &q).submatrix(0, 0, 2, 2);
            let Some((t, l)) = jordan2(&inner) else {
                continue;
            };
            let q = q.mul(&t.direct_sum(&Matrix::identity(1))).expect("3x3");
            if let Some(nf) = finish(q, l) {
                return nf;
            }
        }
        return fail();
    }
    // Single Jordan block: put the isotropic kernel vector into span{p1, p2}.
    let k = kernel(&nil).remove(0);
    for w in unit_orthogonal(&k) {
        let Some(mut p) = orthonormal_basis(&kernel(&Matrix::from_rows(vec![w.clone()]).expect("row"))) else {
            continue;
        };
        let (alpha, beta) = (dot(&p[0], &k), dot(&p[1], &k));
        if alpha.is_zero() {
            continue;
        }
        if beta != &alpha * &FieldElem::i() {
            p[1] = p[1].iter().map(|x| -x).collect();
        }
        let q = columns(&[p[0].clone(), p[1].clone(), w]);
        let m = congruent(&nil, &q);
        let Some(z) = m[(0, 0)].inv().ok().and_then(|x| x.sqrt()) else {
            continue;
        };
        let Some(rot) = rotation(&z) else { continue };
        let q = q.mul(&rot.direct_sum(&Matrix::identity(1))).expect("3x3");
        if let Some(nf) = finish(q, lambda.clone()) {
            return nf;
        }
    }
    fail()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn action_basics() {
        let p = representative(11).unwrap();
        let id2 = Matrix::identity(2);
        let id3 = Matrix::identity(3);
        assert_eq!(pair_act(&id2, &id3, &p).unwrap(), p);
        let swap = k_mat();
        let q = pair_act(&swap, &id3, &p).unwrap();
        assert_eq!((q.g1, q.g2), (p.g2.clone(), p.g1.clone()));
        assert_eq!(pair_act(&Matrix::zeros(2, 2), &id3, &p), Err(Gamma23Error::Singular));
    }

    #[test]
    fn simdiag_examples() {
        assert!(simdiag_test(&SymPair::new(unit(1), unit(2)).unwrap()));
        assert!(!simdiag_test(&representative(7).unwrap()));
        assert!(simdiag_test(&SymPair::zero()));
        let expect = [true, true, true, true, true, true, true, false, false, false, false, false];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(simdiag_test(&representative(k).unwrap()), *e, "(2|3)_{k}");
        }
    }

    #[test]
    fn distinct_signatures() {
        let sigs = representative_signatures();
        for (i, (a, sa)) in sigs.iter().enumerate() {
            for (b, sb) in &sigs[i + 1..] {
                assert_ne!(sa, sb, "{a} vs {b}");
            }
        }
        for (l, p) in representatives() {
            assert_eq!(classify_pair(&p).label.as_deref(), Some(l.as_str()));
        }
    }

    #[test]
    fn seeded_orbit() {
        let mut rng = StdRng::seed_from_u64(23);
        let p = representative(11).unwrap();
        for _ in 0..20 {
            let (t, s) = random_group_element(&mut rng);
            let q = pair_act(&t, &s, &p).unwrap();
            assert_eq!(classify_pair(&q).label.as_deref(), Some("(2|3)_11"));
        }
    }

    #[test]
    fn normal_forms() {
        let d = sq(&[&[fe(1), fe(0)], &[fe(0), fe(2)]]);
        assert_eq!(sym_normal_form(&d), NormalForm::Diagonal { form: d.clone(), transform: Matrix::identity(2) });
        let a = sq(&[&[fe(1), FieldElem::i()], &[FieldElem::i(), fe(-1)]]);
        match sym_normal_form(&a) {
            NormalForm::Jordan { form, lambda, .. } => {
                assert!(lambda.is_zero());
                assert_eq!(form, delta(&fe(0)));
            }
            other => panic!("{other:?}"),
        }
        let k = k_mat();
        let nf = sym_normal_form(&k);
        let form = nf.form().unwrap();
        assert_eq!(form[(0, 1)], fe(0));
        let t = nf.transform().unwrap();
        assert_eq!(congruent(&Matrix::identity(2), t), Matrix::identity(2));
    }
}
