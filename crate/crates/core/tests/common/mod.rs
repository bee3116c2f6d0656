//! Seeded property checks shared by the property suite and the acceptance harness.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use superlie::catalog::Catalog;
use superlie::cohomology::{cochain_space_dim, d1, d2, h2_even, Cochain2Even, EvenEndomorphism};
use superlie::exactla::{inverse, Matrix};
use superlie::invariants::{center, derived, orbit_dim};
use superlie::orbitrel::{auto_nondegen, build_hasse, NonDegConfig, Verdict, DEFAULT_DEPTH};
use superlie::scalars::{rat, FieldElem, Rational};
use superlie::series::{default_precision, Limit, Series};
use superlie::superalg::apply_basis_change;
use superlie::{Expr, SuperAlgebra};

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, max_global_rejects: 100_000, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())?;
    Ok(cases)
}

pub fn arb_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

pub fn arb_field() -> impl Strategy<Value = FieldElem> {
    let part = prop_oneof![Just(rat(0, 1)), arb_rational()];
    (part.clone(), part.clone(), part.clone(), part).prop_map(|(a, b, c, d)| FieldElem::new(a, b, c, d))
}

/// Small Gaussian integers, mostly zero.
pub fn arb_small() -> impl Strategy<Value = FieldElem> {
    prop_oneof![
        3 => Just(FieldElem::zero()),
        2 => (-2i64..=2, -1i64..=1).prop_map(|(a, b)| &FieldElem::from_int(a) + &(&FieldElem::from_int(b) * &FieldElem::i())),
    ]
}

pub fn arb_series() -> impl Strategy<Value = Series> {
    let term = (-4i64..8, arb_small()).prop_map(|(k, c)| (rat(k, 2), c));
    let prec = prop_oneof![Just(None), Just(Some(rat(4, 1)))];
    (proptest::collection::vec(term, 0..4), prec).prop_map(|(terms, p)| Series::from_terms(terms, p))
}

pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0i64..6).prop_map(Expr::int), Just(Expr::I), Just(Expr::Sqrt2), Just(Expr::T),];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), -3i64..4, 1i64..3).prop_map(move |(x, n, d)| Expr::Pow(b(x), rat(n, d))),
            inner.prop_map(move |a| Expr::Sqrt(b(a))),
        ]
    })
}

pub fn arb_invertible(n: usize) -> impl Strategy<Value = Matrix<FieldElem>> {
    proptest::collection::vec(arb_small(), n * n)
        .prop_map(move |v| Matrix::from_fn(n, n, |i, j| v[i * n + j].clone()))
        .prop_filter("invertible", |m| inverse(m).is_ok())
}

pub fn catalog_index() -> impl Strategy<Value = usize> {
    0..Catalog::builtin().entries().len()
}

/// A catalog algebra with a random change of basis `(T, S)`.
pub fn arb_moved_algebra() -> impl Strategy<Value = (usize, Matrix<FieldElem>, Matrix<FieldElem>)> {
    catalog_index().prop_flat_map(|k| {
        let d = Catalog::builtin().entries()[k].algebra.dim();
        (Just(k), arb_invertible(d.even), arb_invertible(d.odd))
    })
}

fn moved(k: usize, t: &Matrix<FieldElem>, s: &Matrix<FieldElem>) -> (SuperAlgebra, SuperAlgebra) {
    let g = Catalog::builtin().entries()[k].algebra.clone();
    let h = apply_basis_change(&g, t, s, &default_precision()).expect("invertible");
    (g, h)
}

/// Field axioms, inverses, square roots and text round-trips.
pub fn field_properties(cases: u32) -> Result<u32, String> {
    run(cases, (arb_field(), arb_field(), arb_field()), |(a, b, c)| {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
            prop_assert_eq!(&b * &b.inv().unwrap(), FieldElem::one());
        }
        let sq = &a * &a;
        let r = sq.sqrt().expect("squares have roots");
        prop_assert_eq!(&r * &r, sq);
        prop_assert_eq!(FieldElem::parse(&a.to_string()).unwrap(), a.clone());
        prop_assert_eq!(a.lex_cmp(&b), b.lex_cmp(&a).reverse());
        Ok(())
    })
}

/// Ring identities of truncated series, inverses and square roots to precision.
pub fn series_properties(cases: u32) -> Result<u32, String> {
    let work = rat(6, 1);
    run(cases, (arb_series(), arb_series(), arb_series()), move |(a, b, c)| {
        prop_assert!((&(&a * &b) * &c).agrees_with(&(&a * &(&b * &c))));
        prop_assert!((&a * &(&b + &c)).agrees_with(&(&(&a * &b) + &(&a * &c))));
        prop_assert!((&(&a + &b) - &b).agrees_with(&a));
        if let Ok(inv) = a.inv(&work) {
            prop_assert!((&inv * &a).agrees_with(&Series::one()), "inv {} of {}", inv, a);
        }
        let sq = &a * &a;
        if let Ok(r) = sq.sqrt(&work) {
            prop_assert!((&r * &r).agrees_with(&sq), "sqrt {} of {}", r, sq);
        }
        if let (Ok(Limit::Value(x)), Ok(Limit::Value(y))) = (a.limit_at_zero(), b.limit_at_zero()) {
            prop_assert_eq!((&a + &b).limit_at_zero().unwrap(), Limit::Value(&x + &y));
            prop_assert_eq!((&a * &b).limit_at_zero().unwrap(), Limit::Value(&x * &y));
        }
        Ok(())
    })
}

/// Printing then parsing gives back the same tree; evaluation agrees.
pub fn parser_properties(cases: u32) -> Result<u32, String> {
    let p = default_precision();
    run(cases, arb_expr(), move |e| {
        let text = e.to_string();
        let back = Expr::parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(&back, &e, "text {}", text);
        match (e.eval(&p), back.eval(&p)) {
            (Ok(x), Ok(y)) => prop_assert!(x.agrees_with(&y)),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x, y),
        }
        Ok(())
    })
}

/// Cochain text and algebra JSON round-trips.
pub fn format_properties(cases: u32) -> Result<u32, String> {
    let shape = (0usize..3, 1usize..3);
    let strat = shape.prop_flat_map(|(m, n)| {
        (Just(m), Just(n), proptest::collection::vec(arb_small(), cochain_space_dim(m, n)), arb_moved_algebra())
    });
    run(cases, strat, |(m, n, v, (k, t, s))| {
        let c = Cochain2Even::from_coords(m, n, &v).unwrap();
        prop_assert_eq!(Cochain2Even::parse(m, n, &c.to_string()).unwrap(), c);
        let (_, h) = moved(k, &t, &s);
        prop_assert_eq!(SuperAlgebra::from_json(&h.to_json()).unwrap().structure_tensor(), h.structure_tensor());
        Ok(())
    })
}

/// Two successive changes of basis compose to the product change.
pub fn composition_properties(cases: u32) -> Result<u32, String> {
    let strat = arb_moved_algebra().prop_flat_map(|(k, t, s)| {
        let (m, n) = (t.rows(), s.rows());
        (Just((k, t, s)), arb_invertible(m), arb_invertible(n))
    });
    let w = default_precision();
    run(cases, strat, move |((k, t, s), t2, s2)| {
        let (_, h) = moved(k, &t, &s);
        let twice = apply_basis_change(&h, &t2, &s2, &w).unwrap();
        let g = &Catalog::builtin().entries()[k].algebra;
        let once = apply_basis_change(g, &t.mul(&t2).unwrap(), &s.mul(&s2).unwrap(), &w).unwrap();
        prop_assert_eq!(twice.structure_tensor(), once.structure_tensor());
        Ok(())
    })
}

/// The two formulations of the Jacobi identity agree on random, moved and tampered tensors.
pub fn jacobi_agreement(cases: u32) -> Result<u32, String> {
    let random = (0usize..3, 0usize..3).prop_flat_map(|(m, n)| {
        let len = m * m * m + m * n * n + n * n * m;
        (Just(m), Just(n), proptest::collection::vec(arb_small(), len))
    });
    let strat = (random, arb_moved_algebra(), 0u8..3, any::<prop::sample::Index>());
    run(cases, strat, |((m, n, v), (k, t, s), mode, idx)| {
        let g = match mode {
            0 => {
                let mut g = SuperAlgebra::zero(m, n);
                let mut it = v.into_iter();
                for i in 0..m {
                    for j in i + 1..m {
                        for k in 0..m {
                            g.set_c(i, j, k, it.next().unwrap());
                        }
                    }
                    for j in 0..n {
                        for k in 0..n {
                            g.set_rho(i, j, k, it.next().unwrap());
                        }
                    }
                }
                for i in 0..n {
                    for j in i..n {
                        for k in 0..m {
                            g.set_gamma(i, j, k, it.next().unwrap());
                        }
                    }
                }
                g
            }
            1 => moved(k, &t, &s).1,
            _ => {
                let mut g = moved(k, &t, &s).1;
                let brackets = g.nonzero_brackets();
                if let Some((p, q, val)) = brackets.get(idx.index(brackets.len().max(1))) {
                    let (gm, r) = (g.m(), val.iter().position(|x| !x.is_zero()).unwrap());
                    let flipped = -val[r].clone();
                    match (*p < gm, *q < gm) {
                        (true, true) => g.set_c(*p, *q, r, flipped),
                        (true, false) => g.set_rho(*p, *q - gm, r - gm, flipped),
                        (false, false) => g.set_gamma(*p - gm, *q - gm, r, flipped),
                        (false, true) => {}
                    }
                }
                g
            }
        };
        prop_assert_eq!(g.check_jacobi().is_empty(), g.check_j1_j2().is_empty(), "{}", g.brackets_text());
        Ok(())
    })
}

/// `d² ∘ d¹ = 0` on random catalog algebras and random even maps.
pub fn complex_property(cases: u32) -> Result<u32, String> {
    let strat = catalog_index().prop_flat_map(|k| {
        let d = Catalog::builtin().entries()[k].algebra.dim();
        (
            Just(k),
            proptest::collection::vec(arb_small(), d.even * d.even),
            proptest::collection::vec(arb_small(), d.odd * d.odd),
        )
    });
    run(cases, strat, |(k, a, d)| {
        let g = &Catalog::builtin().entries()[k].algebra;
        let (m, n) = (g.m(), g.n());
        let psi = EvenEndomorphism {
            a: Matrix::from_fn(m, m, |i, j| a[i * m + j].clone()),
            d: Matrix::from_fn(n, n, |i, j| d[i * n + j].clone()),
        };
        let phi = d1(g, &psi).unwrap();
        prop_assert!(d2(g, &phi).unwrap().iter().all(FieldElem::is_zero), "{}", phi);
        Ok(())
    })
}

/// Every catalog algebra satisfies `d² ∘ d¹ = 0` for each elementary even map.
pub fn complex_on_catalog() -> Result<u32, String> {
    let mut checked = 0;
    for e in Catalog::builtin().entries() {
        let g = &e.algebra;
        let (m, n) = (g.m(), g.n());
        for p in 0..m + n {
            for q in 0..m + n {
                if (p < m) != (q < m) {
                    continue;
                }
                let phi = d1(g, &EvenEndomorphism::elementary(m, n, p, q)).unwrap();
                if !d2(g, &phi).unwrap().iter().all(FieldElem::is_zero) {
                    return Err(format!("{}: d2(d1(b{p} -> b{q})) != 0", e.label));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Center, derived algebra, orbit dimension and H² survive a change of basis.
pub fn invariance_properties(cases: u32) -> Result<u32, String> {
    run(cases, arb_moved_algebra(), |(k, t, s)| {
        let (g, h) = moved(k, &t, &s);
        prop_assert_eq!(center(&g).dim(), center(&h).dim());
        prop_assert_eq!(derived(&g).dim(), derived(&h).dim());
        prop_assert_eq!(orbit_dim(&g), orbit_dim(&h));
        prop_assert_eq!(g.lower_central_series(), h.lower_central_series());
        prop_assert_eq!(h2_even(&g).dim, h2_even(&h).dim);
        Ok(())
    })
}

/// No implemented necessary condition rules out a verified degeneration.
pub fn verified_pairs_consistent() -> Result<u32, String> {
    let cat = Catalog::builtin();
    let config = NonDegConfig::default();
    let mut pairs = 0;
    for dim in cat.shapes() {
        let hasse = build_hasse(cat, dim, &default_precision()).map_err(|e| e.to_string())?;
        for w in &hasse.witnesses {
            if !matches!(w.verdict, Ok(Verdict::Verified { .. })) || w.from == w.to {
                continue;
            }
            let (g, h) = (hasse.profile(&w.from).unwrap(), hasse.profile(&w.to).unwrap());
            if let Some(c) = auto_nondegen(g, h, DEFAULT_DEPTH, true, &config).first() {
                return Err(format!("{} -> {} verified but {:?} objects", w.from, w.to, c.criterion));
            }
            pairs += 1;
        }
        for (from, to) in hasse.closure_pairs().into_iter().filter(|(a, b)| a != b) {
            let (g, h) = (hasse.profile(&from).unwrap(), hasse.profile(&to).unwrap());
            if let Some(c) = auto_nondegen(g, h, DEFAULT_DEPTH, true, &config).first() {
                return Err(format!("{from} -> {to} in the closure but {:?} objects", c.criterion));
            }
            pairs += 1;
        }
    }
    Ok(pairs)
}
