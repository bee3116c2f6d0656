//! Degenerations between orbits: witness verification over Puiseux series,
//! non-degeneration certificates, Hasse diagrams and irreducible components.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{normalize_label, Catalog, CatalogError};
use crate::exactla::{LinAlgError, Matrix};
use crate::exprlang::{Expr, ExprError};
use crate::invariants::{self, abc_dim, standard_abc_tuples, Degree, TrivialMax};
use crate::scalars::{FieldElem, Rational};
use crate::series::{Limit, Series, SeriesError};
use crate::superalg::{apply_basis_change, basis_symbols, AlgebraError, GradedDim, SuperAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("insufficient precision at O(t^{0}); retry with a higher precision")]
    InsufficientPrecision(Rational),
    #[error("malformed witness: {0}")]
    Witness(String),
    #[error("shapes differ: {0} vs {1}")]
    ShapeMismatch(GradedDim, GradedDim),
    #[error("consistency violation: {0}")]
    ConsistencyViolation(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Algebra(AlgebraError),
}

impl From<AlgebraError> for OrbitError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::LinAlg(LinAlgError::InsufficientPrecision) => {
                OrbitError::InsufficientPrecision(Rational::from_integer(0.into()))
            }
            other => OrbitError::Algebra(other),
        }
    }
}

/// A parametrized basis `x_i(t), y_j(t)` given as linear combinations of `e_i, f_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerationWitness {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub basis: BTreeMap<String, String>,
    /// Auxiliary quantities with alternative branches, tried in order.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Vec<String>>,
    /// The basis as printed in the source table, when `basis` had to correct it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed: Option<BTreeMap<String, String>>,
}

impl DegenerationWitness {
    pub fn from_json(text: &str) -> Result<Self, OrbitError> {
        serde_json::from_str(text).map_err(|e| OrbitError::Witness(e.to_string()))
    }

    /// `x_i = t*e_i`, `y_j = t*f_j`: every algebra degenerates to the abelian one.
    pub fn scaling(from: &str, to: &str, m: usize, n: usize) -> Self {
        let mut basis = BTreeMap::new();
        for i in 1..=m {
            basis.insert(format!("x{i}"), format!("t*e{i}"));
        }
        for j in 1..=n {
            basis.insert(format!("y{j}"), format!("t*f{j}"));
        }
        DegenerationWitness {
            from: normalize_label(from),
            to: normalize_label(to),
            table: None,
            source: Some("scaling".into()),
            basis,
            params: BTreeMap::new(),
            printed: None,
        }
    }

    pub fn identity(label: &str, m: usize, n: usize) -> Self {
        let mut w = Self::scaling(label, label, m, n);
        for (k, v) in w.basis.iter_mut() {
            *v = format!("{}{}", if k.starts_with('x') { "e" } else { "f" }, &k[1..]);
        }
        w.source = Some("identity".into());
        w
    }

    /// Parsed `x_1..x_m, y_1..y_n` in order.
    fn parsed_basis(&self, m: usize, n: usize) -> Result<Vec<Expr>, OrbitError> {
        let keys: Vec<String> = (1..=m).map(|i| format!("x{i}")).chain((1..=n).map(|j| format!("y{j}"))).collect();
        if let Some(extra) = self.basis.keys().find(|k| !keys.contains(k)) {
            return Err(OrbitError::Witness(format!("unexpected basis key `{extra}` for shape ({m}|{n})")));
        }
        keys.iter()
            .map(|k| {
                let text = self.basis.get(k).ok_or_else(|| OrbitError::Witness(format!("missing `{k}`")))?;
                Ok(Expr::parse(text)?)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum FailReason {
    Singular,
    /// A basis vector mixes parities.
    Grading {
        vector: String,
    },
    Diverges {
        pair: (String, String),
        component: String,
        series: String,
    },
    WrongLimit {
        pair: (String, String),
        component: String,
        got: FieldElem,
        expected: FieldElem,
    },
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::Singular => write!(f, "basis matrix is singular"),
            FailReason::Grading { vector } => write!(f, "{vector} is not homogeneous"),
            FailReason::Diverges { pair, component, series } => {
                write!(f, "[{},{}] component {component} diverges: {series}", pair.0, pair.1)
            }
            FailReason::WrongLimit { pair, component, got, expected } => {
                write!(f, "[{},{}] component {component} tends to {got}, expected {expected}", pair.0, pair.1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// `branch[k]` is the alternative used for the k-th parameter.
    Verified {
        branch: Vec<usize>,
    },
    Failed {
        failure: FailReason,
    },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }
}

fn series_err(e: SeriesError, p: &Rational) -> OrbitError {
    match e {
        SeriesError::InsufficientPrecision(q) => OrbitError::InsufficientPrecision(q),
        _ => OrbitError::InsufficientPrecision(p.clone()),
    }
}

fn expr_err(e: ExprError, p: &Rational) -> OrbitError {
    match e {
        ExprError::Eval { source: SeriesError::InsufficientPrecision(q), .. } => OrbitError::InsufficientPrecision(q),
        ExprError::Eval { source: SeriesError::NotInvertible, .. } => OrbitError::InsufficientPrecision(p.clone()),
        other => OrbitError::Expr(other),
    }
}

/// Decide whether `g` degenerates to `h` along the witness, by exact limits at `t -> 0`.
pub fn verify_degeneration(
    g: &SuperAlgebra,
    h: &SuperAlgebra,
    w: &DegenerationWitness,
    precision: &Rational,
) -> Result<Verdict, OrbitError> {
    if g.dim() != h.dim() {
        return Err(OrbitError::ShapeMismatch(g.dim(), h.dim()));
    }
    let (m, n) = (g.m(), g.n());
    let exprs = w.parsed_basis(m, n)?;
    let names: Vec<&String> = w.params.keys().collect();
    let choices: Vec<usize> = w.params.values().map(Vec::len).collect();
    if choices.contains(&0) {
        return Err(OrbitError::Witness("parameter without alternatives".into()));
    }
    let mut branch = vec![0; choices.len()];
    let mut first: Option<Result<Verdict, OrbitError>> = None;
    loop {
        let mut env = HashMap::new();
        let mut bad = None;
        for (k, name) in names.iter().enumerate() {
            let text = &w.params[*name][branch[k]];
            match Expr::parse(text)
                .map_err(OrbitError::from)
                .and_then(|e| e.eval_with(precision, &env).map_err(|e| expr_err(e, precision)))
            {
                Ok(v) => {
                    env.insert((*name).clone(), v);
                }
                Err(e) => {
                    bad = Some(e);
                    break;
                }
            }
        }
        let outcome = match bad {
            Some(e) => Err(e),
            None => verify_branch(g, h, &exprs, &env, precision),
        };
        match outcome {
            Ok(Verdict::Verified { .. }) => return Ok(Verdict::Verified { branch }),
            other => {
                if first.is_none() {
                    first = Some(other);
                }
            }
        }
        // next branch, odometer order
        let mut k = 0;
        loop {
            if k == branch.len() {
                return first.expect("at least one branch tried");
            }
            branch[k] += 1;
            if branch[k] < choices[k] {
                break;
            }
            branch[k] = 0;
            k += 1;
        }
    }
}

fn verify_branch(
    g: &SuperAlgebra,
    h: &SuperAlgebra,
    exprs: &[Expr],
    env: &HashMap<String, Series>,
    precision: &Rational,
) -> Result<Verdict, OrbitError> {
    let (m, n) = (g.m(), g.n());
    let syms = basis_symbols(m, n);
    let targets = basis_symbols(m, n);
    let mut t = Matrix::<Series>::zeros(m, m);
    let mut s = Matrix::<Series>::zeros(n, n);
    for (col, e) in exprs.iter().enumerate() {
        let coeffs = e.eval_linear(&syms, precision, env).map_err(|e| expr_err(e, precision))?;
        let odd_vec = col >= m;
        for (row, c) in coeffs.into_iter().enumerate() {
            let odd_row = row >= m;
            if odd_row != odd_vec {
                if !c.is_zero() {
                    let name = if odd_vec { format!("y{}", col - m + 1) } else { format!("x{}", col + 1) };
                    return Ok(Verdict::Failed { failure: FailReason::Grading { vector: name } });
                }
                continue;
            }
            if odd_vec {
                s[(row - m, col - m)] = c;
            } else {
                t[(row, col)] = c;
            }
        }
    }
    let moved = match apply_basis_change(g, &t, &s, precision) {
        Ok(a) => a,
        Err(AlgebraError::LinAlg(LinAlgError::Singular)) => {
            return Ok(Verdict::Failed { failure: FailReason::Singular })
        }
        Err(AlgebraError::LinAlg(LinAlgError::InsufficientPrecision)) => {
            return Err(OrbitError::InsufficientPrecision(precision.clone()))
        }
        Err(e) => return Err(e.into()),
    };
    let check = |series: &Series,
                 expected: &FieldElem,
                 p: usize,
                 q: usize,
                 r: usize|
     -> Result<Option<FailReason>, OrbitError> {
        let pair = (targets[p].clone(), targets[q].clone());
        let component = targets[r].clone();
        match series.limit_at_zero().map_err(|e| series_err(e, precision))? {
            Limit::Diverges => Ok(Some(FailReason::Diverges { pair, component, series: series.to_string() })),
            Limit::Value(v) if &v == expected => Ok(None),
            Limit::Value(got) => Ok(Some(FailReason::WrongLimit { pair, component, got, expected: expected.clone() })),
        }
    };
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                if let Some(f) = check(moved.c(i, j, k), h.c(i, j, k), i, j, k)? {
                    return Ok(Verdict::Failed { failure: f });
                }
            }
        }
        for j in 0..n {
            for k in 0..n {
                if let Some(f) = check(moved.rho(i, j, k), h.rho(i, j, k), i, m + j, m + k)? {
                    return Ok(Verdict::Failed { failure: f });
                }
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            for k in 0..m {
                if let Some(f) = check(moved.gamma(i, j, k), h.gamma(i, j, k), m + i, m + j, k)? {
                    return Ok(Verdict::Failed { failure: f });
                }
            }
        }
    }
    Ok(Verdict::Verified { branch: Vec::new() })
}

/// Retry with doubled precision on `InsufficientPrecision`, up to `rounds` times.
pub fn verify_adaptive(
    g: &SuperAlgebra,
    h: &SuperAlgebra,
    w: &DegenerationWitness,
    precision: &Rational,
    rounds: usize,
) -> Result<(Verdict, Rational), OrbitError> {
    let mut p = precision.clone();
    let two = Rational::from_integer(2.into());
    for round in 0..=rounds {
        match verify_degeneration(g, h, w, &p) {
            Err(OrbitError::InsufficientPrecision(_)) if round < rounds => p = &p * &two,
            other => return other.map(|v| (v, p)),
        }
    }
    unreachable!()
}

/// Resolve the labels in the catalog and verify.
pub fn verify_in_catalog(cat: &Catalog, w: &DegenerationWitness, precision: &Rational) -> Result<Verdict, OrbitError> {
    let g = &cat.get(&w.from)?.algebra;
    let h = &cat.get(&w.to)?.algebra;
    verify_degeneration(g, h, w, precision)
}

/// A reason from the invariants lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    OrbitDim,
    GammaZero,
    Center { parity: u8 },
    Derived { parity: u8 },
    AbRecursion,
    FRecursion,
    AbcDerivation { alpha: FieldElem, beta: FieldElem, gamma: FieldElem, degree: u8 },
    TrivialSub,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::OrbitDim => write!(f, "orbit_dim"),
            Criterion::GammaZero => write!(f, "gamma_zero"),
            Criterion::Center { parity } => write!(f, "center[{parity}]"),
            Criterion::Derived { parity } => write!(f, "derived[{parity}]"),
            Criterion::AbRecursion => write!(f, "ab_recursion"),
            Criterion::FRecursion => write!(f, "F_recursion"),
            Criterion::AbcDerivation { alpha, beta, gamma, degree } => {
                write!(f, "abc_derivation({alpha},{beta},{gamma})_{degree}")
            }
            Criterion::TrivialSub => write!(f, "trivial_sub"),
        }
    }
}

/// A pair of computed values violating a necessary condition for `from -> to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonDegCertificate {
    pub from: String,
    pub to: String,
    pub criterion: Criterion,
    pub from_value: String,
    pub to_value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nested: Option<Box<NonDegCertificate>>,
}

impl fmt::Display for NonDegCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -/-> {}: {} ({} vs {})", self.from, self.to, self.criterion, self.from_value, self.to_value)?;
        if let Some(n) = &self.nested {
            write!(f, " via [{n}]")?;
        }
        Ok(())
    }
}

/// Lazily computed invariants of one algebra, shareable across threads.
#[derive(Debug)]
pub struct Profile {
    pub name: String,
    pub algebra: SuperAlgebra,
    orbit: OnceLock<usize>,
    center: OnceLock<GradedDim>,
    derived: OnceLock<GradedDim>,
    lcs: OnceLock<Vec<GradedDim>>,
    trivial: OnceLock<TrivialMax>,
    abc: Mutex<BTreeMap<(String, String, String, Degree), usize>>,
    ab: OnceLock<Box<Profile>>,
    f: OnceLock<Box<Profile>>,
}

impl Profile {
    pub fn new(name: impl Into<String>, algebra: SuperAlgebra) -> Self {
        Profile {
            name: name.into(),
            algebra,
            orbit: OnceLock::new(),
            center: OnceLock::new(),
            derived: OnceLock::new(),
            lcs: OnceLock::new(),
            trivial: OnceLock::new(),
            abc: Mutex::new(BTreeMap::new()),
            ab: OnceLock::new(),
            f: OnceLock::new(),
        }
    }

    pub fn orbit_dim(&self) -> usize {
        *self.orbit.get_or_init(|| invariants::orbit_dim(&self.algebra))
    }

    pub fn center(&self) -> GradedDim {
        *self.center.get_or_init(|| invariants::center(&self.algebra).dim())
    }

    pub fn derived(&self) -> GradedDim {
        *self.derived.get_or_init(|| invariants::derived(&self.algebra).dim())
    }

    pub fn lower_central_series(&self) -> &[GradedDim] {
        self.lcs.get_or_init(|| self.algebra.lower_central_series())
    }

    pub fn trivial(&self) -> &TrivialMax {
        self.trivial.get_or_init(|| invariants::trivial_sub_max(&self.algebra))
    }

    pub fn abc(&self, a: &FieldElem, b: &FieldElem, c: &FieldElem, degree: Degree) -> usize {
        let key = (a.to_string(), b.to_string(), c.to_string(), degree);
        if let Some(v) = self.abc.lock().expect("abc cache").get(&key) {
            return *v;
        }
        let v = abc_dim(&self.algebra, a, b, c, degree);
        self.abc.lock().expect("abc cache").insert(key, v);
        v
    }

    pub fn ab(&self) -> &Profile {
        self.ab.get_or_init(|| Box::new(Profile::new(format!("ab{}", self.name), self.algebra.ab())))
    }

    pub fn f_functor(&self) -> &Profile {
        self.f.get_or_init(|| Box::new(Profile::new(format!("F{}", self.name), self.algebra.f_functor())))
    }

    /// Cheap invariants; different fingerprints prove non-isomorphism.
    fn fingerprint(&self) -> (GradedDim, GradedDim, Vec<GradedDim>, bool, usize) {
        (
            self.center(),
            self.derived(),
            self.lower_central_series().to_vec(),
            self.algebra.gamma_is_zero(),
            self.orbit_dim(),
        )
    }

    fn provably_distinct(&self, o: &Profile) -> bool {
        self.fingerprint() != o.fingerprint()
    }
}

/// Which criteria to probe.
#[derive(Debug, Clone)]
pub struct NonDegConfig {
    pub abc_tuples: Vec<(FieldElem, FieldElem, FieldElem)>,
    pub use_trivial: bool,
}

impl Default for NonDegConfig {
    fn default() -> Self {
        NonDegConfig { abc_tuples: standard_abc_tuples(), use_trivial: true }
    }
}

impl NonDegConfig {
    fn criteria(&self, depth: usize) -> Vec<Criterion> {
        let mut out = vec![
            Criterion::OrbitDim,
            Criterion::GammaZero,
            Criterion::Center { parity: 0 },
            Criterion::Center { parity: 1 },
            Criterion::Derived { parity: 0 },
            Criterion::Derived { parity: 1 },
        ];
        for (a, b, c) in &self.abc_tuples {
            for degree in [0, 1] {
                out.push(Criterion::AbcDerivation { alpha: a.clone(), beta: b.clone(), gamma: c.clone(), degree });
            }
        }
        if depth > 0 {
            out.push(Criterion::AbRecursion);
            out.push(Criterion::FRecursion);
        }
        if self.use_trivial {
            out.push(Criterion::TrivialSub);
        }
        out
    }
}

fn parity_part(d: GradedDim, parity: u8) -> usize {
    if parity == 0 {
        d.even
    } else {
        d.odd
    }
}

/// Evaluate one criterion; `Some` when it rules out `g -> h`.
/// `distinct` asserts `g` and `h` are known to be non-isomorphic.
pub fn evaluate_criterion(
    g: &Profile,
    h: &Profile,
    criterion: &Criterion,
    depth: usize,
    distinct: bool,
    config: &NonDegConfig,
) -> Option<NonDegCertificate> {
    let cert = |fv: String, tv: String, nested: Option<Box<NonDegCertificate>>| NonDegCertificate {
        from: g.name.clone(),
        to: h.name.clone(),
        criterion: criterion.clone(),
        from_value: fv,
        to_value: tv,
        nested,
    };
    if g.algebra.dim() != h.algebra.dim() {
        return None;
    }
    match criterion {
        Criterion::OrbitDim => {
            let (a, b) = (g.orbit_dim(), h.orbit_dim());
            let distinct = distinct || (a == b && g.provably_distinct(h));
            (a < b || (a == b && distinct)).then(|| cert(a.to_string(), b.to_string(), None))
        }
        Criterion::GammaZero => {
            (g.algebra.gamma_is_zero() && !h.algebra.gamma_is_zero()).then(|| cert("0".into(), "nonzero".into(), None))
        }
        Criterion::Center { parity } => {
            let (a, b) = (parity_part(g.center(), *parity), parity_part(h.center(), *parity));
            (a > b).then(|| cert(a.to_string(), b.to_string(), None))
        }
        Criterion::Derived { parity } => {
            let (a, b) = (parity_part(g.derived(), *parity), parity_part(h.derived(), *parity));
            (a < b).then(|| cert(a.to_string(), b.to_string(), None))
        }
        Criterion::AbcDerivation { alpha, beta, gamma, degree } => {
            let deg = if *degree == 0 { Degree::Even } else { Degree::Odd };
            let (a, b) = (g.abc(alpha, beta, gamma, deg), h.abc(alpha, beta, gamma, deg));
            (a > b).then(|| cert(a.to_string(), b.to_string(), None))
        }
        Criterion::AbRecursion | Criterion::FRecursion => {
            if depth == 0 {
                return None;
            }
            let (gg, hh) =
                if *criterion == Criterion::AbRecursion { (g.ab(), h.ab()) } else { (g.f_functor(), h.f_functor()) };
            if gg.algebra.structure_tensor() == hh.algebra.structure_tensor() {
                return None;
            }
            let inner = first_certificate(gg, hh, depth - 1, false, config)?;
            let text = |p: &Profile| {
                if p.algebra.is_abelian() {
                    "abelian".to_string()
                } else {
                    p.algebra.brackets_text()
                }
            };
            Some(cert(text(gg), text(hh), Some(Box::new(inner))))
        }
        Criterion::TrivialSub => {
            let (a, b) = (g.trivial().exact?, h.trivial().exact?);
            (a > b).then(|| cert(a.to_string(), b.to_string(), None))
        }
    }
}

/// All certificates found; empty means inconclusive.
pub fn auto_nondegen(
    g: &Profile,
    h: &Profile,
    depth: usize,
    distinct: bool,
    config: &NonDegConfig,
) -> Vec<NonDegCertificate> {
    if g.algebra.structure_tensor() == h.algebra.structure_tensor() {
        return Vec::new();
    }
    config.criteria(depth).iter().filter_map(|c| evaluate_criterion(g, h, c, depth, distinct, config)).collect()
}

/// The first certificate in the cheap-to-expensive order.
pub fn first_certificate(
    g: &Profile,
    h: &Profile,
    depth: usize,
    distinct: bool,
    config: &NonDegConfig,
) -> Option<NonDegCertificate> {
    if g.algebra.structure_tensor() == h.algebra.structure_tensor() {
        return None;
    }
    config.criteria(depth).iter().find_map(|c| evaluate_criterion(g, h, c, depth, distinct, config))
}

pub const DEFAULT_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HasseNode {
    pub label: String,
    pub orbit_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HasseEdge {
    pub from: String,
    pub to: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessOutcome {
    pub from: String,
    pub to: String,
    pub source: String,
    pub verdict: Result<Verdict, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HasseDiagram {
    pub dim: GradedDim,
    pub nodes: Vec<HasseNode>,
    /// Primary degenerations: the transitive reduction of the closure.
    pub edges: Vec<HasseEdge>,
    /// Every witness tried, in table order.
    pub witnesses: Vec<WitnessOutcome>,
    #[serde(skip)]
    closure: Vec<Vec<bool>>,
    #[serde(skip)]
    profiles: Vec<Arc<Profile>>,
}

impl HasseDiagram {
    fn index(&self, label: &str) -> Option<usize> {
        let l = normalize_label(label);
        self.nodes.iter().position(|n| n.label == l)
    }

    /// `true` when `to` lies in the orbit closure of `from` by verified paths.
    pub fn reaches(&self, from: &str, to: &str) -> bool {
        match (self.index(from), self.index(to)) {
            (Some(i), Some(j)) => self.closure[i][j],
            _ => false,
        }
    }

    pub fn profiles(&self) -> &[Arc<Profile>] {
        &self.profiles
    }

    pub fn profile(&self, label: &str) -> Option<&Arc<Profile>> {
        self.index(label).map(|i| &self.profiles[i])
    }

    /// Closure pairs `(g, h)` with `g != h`.
    pub fn closure_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, row) in self.closure.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                if r && i != j {
                    out.push((self.nodes[i].label.clone(), self.nodes[j].label.clone()));
                }
            }
        }
        out
    }

    /// Graphviz text, nodes grouped by orbit dimension, highest first.
    pub fn to_dot(&self) -> String {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| self.nodes[b].orbit_dim.cmp(&self.nodes[a].orbit_dim).then(a.cmp(&b)));
        let mut out = format!("digraph \"N{}\" {{\n  rankdir=TB;\n  node [shape=plaintext];\n", self.dim);
        let mut levels: BTreeMap<std::cmp::Reverse<usize>, Vec<usize>> = BTreeMap::new();
        for &i in &order {
            levels.entry(std::cmp::Reverse(self.nodes[i].orbit_dim)).or_default().push(i);
        }
        for (lvl, idxs) in &levels {
            out.push_str(&format!("  subgraph \"level{}\" {{ rank=same;", lvl.0));
            for &i in idxs {
                out.push_str(&format!(" \"{}\";", self.nodes[i].label));
            }
            out.push_str(" }\n");
        }
        for &i in &order {
            let n = &self.nodes[i];
            out.push_str(&format!("  \"{}\" [label=\"{} ({})\"];\n", n.label, n.label, n.orbit_dim));
        }
        for e in &self.edges {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", e.from, e.to));
        }
        out.push_str("}\n");
        out
    }
}

/// Verify every builtin witness of the shape plus the scaling edges to the abelian
/// algebra, close transitively and check the closure against certificates.
pub fn build_hasse(cat: &Catalog, dim: GradedDim, precision: &Rational) -> Result<HasseDiagram, OrbitError> {
    let entries = cat.list(dim);
    if entries.is_empty() {
        return Err(OrbitError::Catalog(CatalogError::NotFound(dim.to_string())));
    }
    let profiles: Vec<Arc<Profile>> =
        entries.iter().map(|e| Arc::new(Profile::new(e.label.clone(), e.algebra.clone()))).collect();
    let nodes: Vec<HasseNode> =
        profiles.par_iter().map(|p| HasseNode { label: p.name.clone(), orbit_dim: p.orbit_dim() }).collect();
    let idx = |l: &str| nodes.iter().position(|n| n.label == l);

    let mut witnesses: Vec<DegenerationWitness> = cat.witnesses_for(dim).into_iter().cloned().collect();
    if let Some(ab) = entries.iter().find(|e| e.algebra.is_abelian()) {
        for e in &entries {
            if !e.algebra.is_abelian() {
                witnesses.push(DegenerationWitness::scaling(&e.label, &ab.label, dim.even, dim.odd));
            }
        }
    }
    let outcomes: Vec<WitnessOutcome> = witnesses
        .par_iter()
        .map(|w| {
            let g = &entries[idx(&w.from).expect("witness labels checked on load")].algebra;
            let h = &entries[idx(&w.to).expect("witness labels checked on load")].algebra;
            let verdict = verify_adaptive(g, h, w, precision, 3).map(|(v, _)| v).map_err(|e| e.to_string());
            WitnessOutcome {
                from: w.from.clone(),
                to: w.to.clone(),
                source: w.source.clone().unwrap_or_else(|| "inline".into()),
                verdict,
            }
        })
        .collect();

    let k = nodes.len();
    let mut closure = vec![vec![false; k]; k];
    for (i, row) in closure.iter_mut().enumerate() {
        row[i] = true;
    }
    for o in &outcomes {
        if matches!(o.verdict, Ok(Verdict::Verified { .. })) {
            let (i, j) = (idx(&o.from).expect("label"), idx(&o.to).expect("label"));
            if i != j && nodes[i].orbit_dim <= nodes[j].orbit_dim {
                return Err(OrbitError::ConsistencyViolation(format!(
                    "verified {} -> {} does not lower the orbit dimension ({} vs {})",
                    o.from, o.to, nodes[i].orbit_dim, nodes[j].orbit_dim
                )));
            }
            closure[i][j] = true;
        }
    }
    for via in 0..k {
        for i in 0..k {
            if closure[i][via] {
                for j in 0..k {
                    if closure[via][j] {
                        closure[i][j] = true;
                    }
                }
            }
        }
    }

    let pairs: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| i != j && closure[i][j]).collect();
    let config = NonDegConfig::default();
    let clashes: Vec<NonDegCertificate> = pairs
        .par_iter()
        .filter_map(|&(i, j)| first_certificate(&profiles[i], &profiles[j], DEFAULT_DEPTH, true, &config))
        .collect();
    if let Some(c) = clashes.first() {
        return Err(OrbitError::ConsistencyViolation(format!("closure contains {} -> {} but {c}", c.from, c.to)));
    }

    let mut edges = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j || !closure[i][j] {
                continue;
            }
            let implied = (0..k).any(|v| v != i && v != j && closure[i][v] && closure[v][j]);
            if !implied {
                let source = outcomes
                    .iter()
                    .find(|o| {
                        o.from == nodes[i].label
                            && o.to == nodes[j].label
                            && matches!(o.verdict, Ok(Verdict::Verified { .. }))
                    })
                    .map(|o| o.source.clone())
                    .unwrap_or_default();
                edges.push(HasseEdge { from: nodes[i].label.clone(), to: nodes[j].label.clone(), source });
            }
        }
    }
    Ok(HasseDiagram { dim, nodes, edges, witnesses: outcomes, closure, profiles })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub dim: GradedDim,
    pub components: Vec<String>,
    /// Ordered pairs of maximal orbits that no certificate separates.
    pub warnings: Vec<(String, String)>,
    pub separations: Vec<NonDegCertificate>,
}

/// Orbits contained in no other orbit closure.
pub fn components(hasse: &HasseDiagram) -> ComponentReport {
    let k = hasse.nodes.len();
    let maximal: Vec<usize> = (0..k).filter(|&j| !(0..k).any(|i| i != j && hasse.closure[i][j])).collect();
    let pairs: Vec<(usize, usize)> =
        maximal.iter().flat_map(|&a| maximal.iter().map(move |&b| (a, b))).filter(|(a, b)| a != b).collect();
    let config = NonDegConfig::default();
    let found: Vec<Option<NonDegCertificate>> = pairs
        .par_iter()
        .map(|&(a, b)| first_certificate(&hasse.profiles[a], &hasse.profiles[b], DEFAULT_DEPTH, true, &config))
        .collect();
    let mut warnings = Vec::new();
    let mut separations = Vec::new();
    for (&(a, b), c) in pairs.iter().zip(found) {
        match c {
            Some(c) => separations.push(c),
            None => warnings.push((hasse.nodes[a].label.clone(), hasse.nodes[b].label.clone())),
        }
    }
    ComponentReport {
        dim: hasse.dim,
        components: maximal.iter().map(|&i| hasse.nodes[i].label.clone()).collect(),
        warnings,
        separations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyStatus {
    /// Another criterion separates the pair.
    Alternative,
    /// No implemented criterion separates the pair.
    Unconfirmed,
    /// A chain of verified witnesses realizes the degeneration.
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscrepancyRow {
    pub table: String,
    /// Position among the rows of the built-in non-degeneration data.
    pub row: usize,
    pub from: String,
    pub to: String,
    pub cited: Criterion,
    pub status: DiscrepancyStatus,
    pub alternatives: Vec<NonDegCertificate>,
    pub known: bool,
}

/// Rows of the non-degeneration tables of this shape whose cited reason does not
/// produce a certificate.
pub fn discrepancy_report(cat: &Catalog, dim: GradedDim) -> Vec<DiscrepancyRow> {
    let hasse = build_hasse(cat, dim, &crate::series::default_precision()).ok();
    discrepancy_report_with(cat, dim, hasse.as_ref())
}

/// As [`discrepancy_report`], marking rows whose pair lies in the closure of `hasse`.
pub fn discrepancy_report_with(cat: &Catalog, dim: GradedDim, hasse: Option<&HasseDiagram>) -> Vec<DiscrepancyRow> {
    let rows: Vec<(usize, &crate::catalog::NonDegRow)> = cat
        .nondegen_rows()
        .iter()
        .enumerate()
        .filter(|(_, r)| cat.get(&r.from).is_ok_and(|e| e.algebra.dim() == dim))
        .collect();
    let mut profiles: BTreeMap<String, Arc<Profile>> = BTreeMap::new();
    for e in cat.list(dim) {
        profiles.insert(e.label.clone(), Arc::new(Profile::new(e.label.clone(), e.algebra.clone())));
    }
    let config = NonDegConfig::default();
    let out: Vec<Option<DiscrepancyRow>> = rows
        .par_iter()
        .map(|&(pos, r)| {
            let (g, h) = (&profiles[&r.from], &profiles[&r.to]);
            if evaluate_criterion(g, h, &r.criterion, DEFAULT_DEPTH, true, &config).is_some() {
                return None;
            }
            let alternatives = auto_nondegen(g, h, DEFAULT_DEPTH, true, &config);
            Some(DiscrepancyRow {
                table: r.table.clone(),
                row: pos,
                from: r.from.clone(),
                to: r.to.clone(),
                cited: r.criterion.clone(),
                status: if hasse.is_some_and(|h| h.reaches(&r.from, &r.to)) {
                    DiscrepancyStatus::Refuted
                } else if alternatives.is_empty() {
                    DiscrepancyStatus::Unconfirmed
                } else {
                    DiscrepancyStatus::Alternative
                },
                alternatives,
                known: cat.expected().is_known_discrepancy(&r.from, &r.to),
            })
        })
        .collect();
    out.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::default_precision;

    fn cat() -> &'static Catalog {
        Catalog::builtin()
    }

    fn verify(w: &DegenerationWitness) -> Verdict {
        verify_in_catalog(cat(), w, &default_precision()).unwrap()
    }

    fn witness(from: &str, to: &str, basis: &[(&str, &str)]) -> DegenerationWitness {
        DegenerationWitness {
            from: from.into(),
            to: to.into(),
            table: None,
            source: None,
            basis: basis.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            params: BTreeMap::new(),
            printed: None,
        }
    }

    fn profile(label: &str) -> Profile {
        Profile::new(label, cat().get(label).unwrap().algebra.clone())
    }

    #[test]
    fn dim3_row() {
        let w = witness("(1|2)_2", "(1|2)_1", &[("x1", "e1"), ("y1", "f1 + 1/2*f2"), ("y2", "t*f2")]);
        assert!(verify(&w).is_verified());
    }

    #[test]
    fn identity_and_scaling() {
        for e in cat().entries() {
            let (m, n) = (e.algebra.m(), e.algebra.n());
            assert!(verify(&DegenerationWitness::identity(&e.label, m, n)).is_verified(), "{}", e.label);
            let ab = format!("({m}|{n})_0");
            assert!(verify(&DegenerationWitness::scaling(&e.label, &ab, m, n)).is_verified(), "{}", e.label);
        }
    }

    #[test]
    fn failures() {
        let w = witness("(1|2)_2", "(1|2)_1", &[("x1", "e1"), ("y1", "f1"), ("y2", "f1")]);
        assert_eq!(verify(&w), Verdict::Failed { failure: FailReason::Singular });
        let w = witness("(1|2)_2", "(1|2)_1", &[("x1", "e1 + f1"), ("y1", "f1"), ("y2", "f2")]);
        assert!(matches!(verify(&w), Verdict::Failed { failure: FailReason::Grading { .. } }));
        let w = witness("(1|1)_1", "(1|1)_0", &[("x1", "t*e1"), ("y1", "t^(-1)*f1")]);
        assert!(matches!(verify(&w), Verdict::Failed { failure: FailReason::Diverges { .. } }));
        let w = witness("(1|1)_1", "(1|1)_0", &[("x1", "e1"), ("y1", "f1")]);
        assert!(matches!(verify(&w), Verdict::Failed { failure: FailReason::WrongLimit { .. } }));
        let w = witness("(1|1)_1", "(1|1)_0", &[("x1", "e1")]);
        assert!(matches!(verify_in_catalog(cat(), &w, &default_precision()), Err(OrbitError::Witness(_))));
    }

    #[test]
    fn builtin_witnesses_verify() {
        let bad: Vec<String> = cat()
            .witnesses()
            .par_iter()
            .filter_map(|w| match verify_in_catalog(cat(), w, &default_precision()) {
                Ok(v) if v.is_verified() => None,
                other => Some(format!("{} -> {}: {:?}", w.from, w.to, other)),
            })
            .collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn certificates() {
        let c = NonDegConfig::default();
        let certs = auto_nondegen(&profile("(1|2)_2"), &profile("(1|2)_3"), 2, true, &c);
        assert!(certs
            .iter()
            .any(|x| x.criterion == Criterion::Derived { parity: 1 } && x.from_value == "0" && x.to_value == "1"));
        let certs = auto_nondegen(&profile("(1|3)_1"), &profile("(1|3)_3"), 2, true, &c);
        assert!(certs.iter().any(|x| x.criterion == Criterion::GammaZero));
        assert!(auto_nondegen(&profile("(2|2)_3"), &profile("(2|2)_3"), 2, true, &c).is_empty());
        let abc = Criterion::AbcDerivation {
            alpha: FieldElem::zero(),
            beta: FieldElem::one(),
            gamma: FieldElem::from_int(-1),
            degree: 0,
        };
        assert!(evaluate_criterion(&profile("(2|3)_5"), &profile("(2|3)_8"), &abc, 2, true, &c).is_some());
    }

    #[test]
    fn hasse_small() {
        let p = default_precision();
        let h = build_hasse(cat(), GradedDim::new(1, 2), &p).unwrap();
        let mut e: Vec<(String, String)> = h.edges.iter().map(|e| (e.from.clone(), e.to.clone())).collect();
        e.sort();
        assert_eq!(
            e,
            vec![
                ("(1|2)_1".to_string(), "(1|2)_0".to_string()),
                ("(1|2)_2".to_string(), "(1|2)_1".to_string()),
                ("(1|2)_3".to_string(), "(1|2)_0".to_string())
            ]
        );
        let dot = h.to_dot();
        assert_eq!(dot.matches("->").count(), 3);
        assert_eq!(dot.matches("[label=").count(), 4);
        let c = components(&h);
        assert_eq!(c.components, vec!["(1|2)_2", "(1|2)_3"]);
        assert!(c.warnings.is_empty());

        let h = build_hasse(cat(), GradedDim::new(1, 1), &p).unwrap();
        assert_eq!(h.edges.len(), 1);
        assert!(build_hasse(cat(), GradedDim::new(2, 0), &p).unwrap().edges.is_empty());
        let h = build_hasse(cat(), GradedDim::new(0, 3), &p).unwrap();
        assert!(h.edges.is_empty());
        assert_eq!(components(&h).components, vec!["(0|3)_0"]);
        assert_eq!(components(&build_hasse(cat(), GradedDim::new(1, 1), &p).unwrap()).components, vec!["(1|1)_1"]);
    }

    #[test]
    fn small_reports_empty() {
        for d in [GradedDim::new(1, 2), GradedDim::new(2, 1)] {
            assert!(discrepancy_report(cat(), d).is_empty());
        }
    }
}
