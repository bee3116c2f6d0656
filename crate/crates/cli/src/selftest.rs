//! Seeded randomized checks; the seed is printed so any failure can be replayed.

use std::fmt::Write as _;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use superlie::catalog::Catalog;
use superlie::cohomology::{d1, d2, EvenEndomorphism};
use superlie::exactla::{inverse, Matrix};
use superlie::gamma23::{classify_pair, pair_act, random_group_element, representatives};
use superlie::invariants::{center, derived, orbit_dim};
use superlie::scalars::rat;
use superlie::superalg::apply_basis_change;
use superlie::{Expr, FieldElem, Series};

use crate::{CliConfig, Report};

type Check = fn(&mut StdRng, &CliConfig) -> Result<(), String>;

const CHECKS: [(&str, Check); 6] = [
    ("field axioms", field_case),
    ("series inverse and sqrt", series_case),
    ("expression round-trip", expr_case),
    ("d2 d1 = 0", complex_case),
    ("basis-change invariance", invariance_case),
    ("gamma23 orbits", gamma_case),
];

pub fn run(seed: Option<u64>, cases: usize, config: &CliConfig) -> Report {
    let seed = seed.unwrap_or_else(|| rand::thread_rng().gen());
    let mut text = format!("selftest seed={seed} cases={cases}\n");
    let mut results = Vec::new();
    let mut ok = true;
    for (k, (name, check)) in CHECKS.iter().enumerate() {
        // one stream per check so adding cases to one leaves the others unchanged
        let mut rng = StdRng::seed_from_u64(seed.wrapping_add(k as u64));
        let failure = (0..cases).find_map(|i| check(&mut rng, config).err().map(|e| format!("case {i}: {e}")));
        match &failure {
            None => writeln!(text, "{name}: {cases} ok").unwrap(),
            Some(f) => {
                ok = false;
                writeln!(text, "{name}: FAILED {f}").unwrap();
            }
        }
        results.push(json!({ "name": name, "cases": cases, "failure": failure }));
    }
    Report { ok, text, json: json!({ "seed": seed, "cases": cases, "checks": results, "ok": ok }) }
}

fn small_rational(rng: &mut StdRng) -> superlie::Rational {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn field(rng: &mut StdRng) -> FieldElem {
    let part = |rng: &mut StdRng| if rng.gen_bool(0.4) { rat(0, 1) } else { small_rational(rng) };
    FieldElem::new(part(rng), part(rng), part(rng), part(rng))
}

fn gaussian(rng: &mut StdRng) -> FieldElem {
    if rng.gen_bool(0.5) {
        return FieldElem::zero();
    }
    &FieldElem::from_int(rng.gen_range(-2..=2)) + &(&FieldElem::from_int(rng.gen_range(-1..=1)) * &FieldElem::i())
}

fn field_case(rng: &mut StdRng, _: &CliConfig) -> Result<(), String> {
    let (a, b, c) = (field(rng), field(rng), field(rng));
    let fail = |what: &str| Err(format!("{what} fails for a={a}, b={b}, c={c}"));
    if &(&a * &b) * &c != &a * &(&b * &c) {
        return fail("associativity");
    }
    if &a * &(&b + &c) != &(&a * &b) + &(&a * &c) {
        return fail("distributivity");
    }
    if !b.is_zero() && &b * &b.inv().map_err(|e| e.to_string())? != FieldElem::one() {
        return fail("inverse");
    }
    let sq = &a * &a;
    match sq.sqrt() {
        Some(r) if &r * &r == sq => {}
        _ => return fail("square root of a square"),
    }
    if FieldElem::parse(&a.to_string()).ok() != Some(a.clone()) {
        return fail("text round-trip");
    }
    Ok(())
}

fn series_case(rng: &mut StdRng, config: &CliConfig) -> Result<(), String> {
    let n = rng.gen_range(1..4);
    let mut terms = vec![(rat(rng.gen_range(-2..4), 2), field(rng))];
    for _ in 1..n {
        terms.push((rat(rng.gen_range(-2..8), 2), gaussian(rng)));
    }
    let x = Series::from_terms(terms, None);
    if x.is_zero() {
        return Ok(());
    }
    let p = &config.precision;
    let inv = x.inv(p).map_err(|e| format!("inverse of {x}: {e}"))?;
    if !(&inv * &x).agrees_with(&Series::one()) {
        return Err(format!("{inv} is not an inverse of {x}"));
    }
    let sq = &x * &x;
    let r = sq.sqrt(p).map_err(|e| format!("sqrt of {sq}: {e}"))?;
    if !(&r * &r).agrees_with(&sq) {
        return Err(format!("{r} is not a square root of {sq}"));
    }
    Ok(())
}

fn expr(rng: &mut StdRng, depth: u32) -> Expr {
    let b = Box::new;
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => Expr::int(rng.gen_range(0..6)),
            1 => Expr::I,
            2 => Expr::Sqrt2,
            _ => Expr::T,
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..7) {
        0 => Expr::Neg(b(expr(rng, d))),
        1 => Expr::Add(b(expr(rng, d)), b(expr(rng, d))),
        2 => Expr::Sub(b(expr(rng, d)), b(expr(rng, d))),
        3 => Expr::Mul(b(expr(rng, d)), b(expr(rng, d))),
        4 => Expr::Div(b(expr(rng, d)), b(expr(rng, d))),
        5 => Expr::Pow(b(expr(rng, d)), rat(rng.gen_range(-3..4), rng.gen_range(1..3))),
        _ => Expr::Sqrt(b(expr(rng, d))),
    }
}

fn expr_case(rng: &mut StdRng, config: &CliConfig) -> Result<(), String> {
    let e = expr(rng, 4);
    let text = e.to_string();
    let back = Expr::parse(&text).map_err(|err| format!("`{text}`: {err}"))?;
    if back != e {
        return Err(format!("`{text}` parses to a different tree"));
    }
    match (e.eval(&config.precision), back.eval(&config.precision)) {
        (Ok(x), Ok(y)) if x.agrees_with(&y) => Ok(()),
        (Err(_), Err(_)) => Ok(()),
        _ => Err(format!("`{text}` evaluates differently after the round-trip")),
    }
}

fn random_entry(rng: &mut StdRng) -> &'static superlie::catalog::CatalogEntry {
    let entries = Catalog::builtin().entries();
    &entries[rng.gen_range(0..entries.len())]
}

fn square(rng: &mut StdRng, n: usize) -> Matrix<FieldElem> {
    let v: Vec<FieldElem> = (0..n * n).map(|_| gaussian(rng)).collect();
    Matrix::from_fn(n, n, |i, j| v[i * n + j].clone())
}

fn complex_case(rng: &mut StdRng, _: &CliConfig) -> Result<(), String> {
    let e = random_entry(rng);
    let g = &e.algebra;
    let psi = EvenEndomorphism { a: square(rng, g.m()), d: square(rng, g.n()) };
    let phi = d1(g, &psi).map_err(|err| err.to_string())?;
    let d = d2(g, &phi).map_err(|err| err.to_string())?;
    if d.iter().all(FieldElem::is_zero) {
        Ok(())
    } else {
        Err(format!("{}: d2 of {phi} is nonzero", e.label))
    }
}

fn invertible(rng: &mut StdRng, n: usize) -> Matrix<FieldElem> {
    loop {
        let m = square(rng, n);
        if inverse(&m).is_ok() {
            return m;
        }
    }
}

fn invariance_case(rng: &mut StdRng, config: &CliConfig) -> Result<(), String> {
    let e = random_entry(rng);
    let g = &e.algebra;
    let (t, s) = (invertible(rng, g.m()), invertible(rng, g.n()));
    let h = apply_basis_change(g, &t, &s, &config.precision).map_err(|err| err.to_string())?;
    if !h.check_jacobi().is_empty() {
        return Err(format!("{}: moved algebra fails Jacobi", e.label));
    }
    let same = center(g).dim() == center(&h).dim()
        && derived(g).dim() == derived(&h).dim()
        && orbit_dim(g) == orbit_dim(&h)
        && g.lower_central_series() == h.lower_central_series();
    if same {
        Ok(())
    } else {
        Err(format!("{}: invariants change under a basis change", e.label))
    }
}

fn gamma_case(rng: &mut StdRng, _: &CliConfig) -> Result<(), String> {
    let reps = representatives();
    let (label, p) = &reps[rng.gen_range(0..reps.len())];
    let (t, s) = random_group_element(rng);
    let q = pair_act(&t, &s, p).map_err(|err| err.to_string())?;
    match classify_pair(&q).label {
        Some(l) if &l == label => Ok(()),
        other => Err(format!("a moved {label} classifies as {other:?}")),
    }
}
