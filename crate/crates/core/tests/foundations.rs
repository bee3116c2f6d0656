//! Scalars, series, the expression language and exact linear algebra through the public API.

use superlie::exactla::{
    ideal_triviality, inverse_series, rank, rref, solve_series, GroebnerCaps, LinAlgError, Matrix, Poly, PolySystem,
    Triviality,
};
use superlie::scalars::{rat, rat_int};
use superlie::series::default_precision;
use superlie::{Expr, ExprError, FieldElem, Limit, Series, SeriesError};

fn fe(s: &str) -> FieldElem {
    FieldElem::parse(s).unwrap()
}

fn mono(c: &str, n: i64, d: i64) -> Series {
    Series::monomial(fe(c), rat(n, d))
}

fn eval(text: &str) -> Series {
    Expr::parse(text).unwrap().eval(&default_precision()).unwrap()
}

#[test]
fn field_examples() {
    assert_eq!(&fe("1+i") * &fe("1-i"), fe("2"));
    assert_eq!(fe("1").checked_div(&fe("i")).unwrap(), fe("-i"));
    assert_eq!(&fe("sqrt2/2") * &fe("sqrt2/2"), fe("1/2"));
    assert!(fe("1").checked_div(&FieldElem::zero()).is_err());
    assert_eq!(fe("2").sqrt(), Some(fe("sqrt2")));
    assert_eq!(fe("-1").sqrt(), Some(fe("i")));
    assert_eq!(fe("1/2").sqrt(), Some(fe("sqrt2/2")));
    assert_eq!(fe("3").sqrt(), None);
    // the root of -2 squares back
    assert_eq!(fe("-2").sqrt().map(|s| &s * &s), Some(fe("-2")));
}

#[test]
fn field_parse_examples() {
    assert_eq!(fe("-1/2*i"), FieldElem::new(rat_int(0), rat(-1, 2), rat_int(0), rat_int(0)));
    assert_eq!(fe("sqrt2/2"), FieldElem::new(rat_int(0), rat_int(0), rat(1, 2), rat_int(0)));
    assert_eq!(fe("3/4 + i*sqrt2"), FieldElem::new(rat(3, 4), rat_int(0), rat_int(0), rat_int(1)));
    assert_eq!(fe(" -1/2 * i + 3/4 * sqrt2 "), FieldElem::new(rat_int(0), rat(-1, 2), rat(3, 4), rat_int(0)));
    for text in ["0", "-1/2*i", "3/4 + i*sqrt2", "1 - 2*sqrt2 + 5/3*i*sqrt2"] {
        let x = fe(text);
        assert_eq!(fe(&x.to_string()), x);
    }
    assert!(FieldElem::parse("1 +").is_err());
    assert!(FieldElem::parse("sqrt3").is_err());
}

#[test]
fn series_examples() {
    let p = default_precision();
    let t = Series::t();
    assert_eq!(&t * &t.inv(&p).unwrap(), Series::one());
    let a = &Series::one() + &t;
    assert!((&a - &a).is_zero());
    let s = mono("sqrt2", 1, 2);
    assert_eq!(&s * &s, mono("2", 1, 1));

    assert_eq!(t.inv(&p).unwrap(), mono("1", -1, 1));
    assert_eq!(Series::zero().inv(&p), Err(SeriesError::NotInvertible));

    let x = &Series::one() - &mono("sqrt2", 1, 2);
    let y = x.inv(&p).unwrap();
    assert_eq!(y.coeff(&rat(1, 2)), fe("sqrt2"));
    assert_eq!(y.coeff(&rat_int(1)), fe("2"));
    assert!((&x * &y).agrees_with(&Series::one()));
}

#[test]
fn series_roots_and_limits() {
    let p = default_precision();
    assert_eq!(mono("2", 1, 1).sqrt(&p).unwrap(), mono("sqrt2", 1, 2));
    assert!(matches!(mono("3", 1, 1).sqrt(&p), Err(SeriesError::NotRepresentable(_))));

    let u = mono("sqrt2", 1, 2);
    let q = &(&Series::one() + &u) * &(&Series::one() - &u).inv(&p).unwrap();
    let r = q.sqrt(&p).unwrap();
    assert_eq!(r.coeff(&rat_int(0)), fe("1"));
    assert_eq!(r.coeff(&rat(1, 2)), fe("sqrt2"));
    assert_eq!(r.coeff(&rat_int(1)), fe("1"));
    assert!((&r * &r).agrees_with(&q));

    assert_eq!((&Series::one() + &Series::t()).limit_at_zero(), Ok(Limit::Value(fe("1"))));
    assert_eq!(mono("1", -1, 1).limit_at_zero(), Ok(Limit::Diverges));
    assert_eq!(mono("1", 1, 2).limit_at_zero(), Ok(Limit::Value(FieldElem::zero())));
    assert!(matches!(Series::big_o(rat_int(0)).limit_at_zero(), Err(SeriesError::InsufficientPrecision(_))));
}

#[test]
fn precision_is_sound() {
    // raising the working precision never changes determined coefficients
    let x = &Series::one() - &mono("sqrt2", 1, 2);
    let low = x.inv(&rat_int(3)).unwrap();
    let high = x.inv(&rat_int(9)).unwrap();
    assert!(low.agrees_with(&high));
    let low_root = (&Series::one() + &Series::t()).sqrt(&rat_int(3)).unwrap();
    let high_root = (&Series::one() + &Series::t()).sqrt(&rat_int(9)).unwrap();
    assert!(low_root.agrees_with(&high_root));
}

#[test]
fn expression_trees() {
    use Expr::*;
    let b = Box::new;
    assert_eq!(Expr::parse("t^(-1)/2").unwrap(), Div(b(Pow(b(T), rat_int(-1))), b(Expr::int(2))));
    assert_eq!(Expr::parse("-i*t^(1/2)").unwrap(), Neg(b(Mul(b(I), b(Pow(b(T), rat(1, 2)))))));
    assert!(
        matches!(Expr::parse("sqrt((1+sqrt(2*t))/(1-sqrt(2*t)))").unwrap(), Sqrt(inner) if matches!(*inner, Div(..)))
    );

    assert_eq!(Pow(b(T), rat(1, 2)).to_string(), "t^(1/2)");
    assert_eq!(Neg(b(I)).to_string(), "-i");
    assert_eq!(Mul(b(Expr::int(2)), b(T)).to_string(), "2*t");
    for text in ["t^(-1)/2", "-i*t^(1/2)", "sqrt((1+sqrt(2*t))/(1-sqrt(2*t)))", "(t+1)*(t-1)", "2-(3-t)"] {
        let e = Expr::parse(text).unwrap();
        assert_eq!(Expr::parse(&e.to_string()).unwrap(), e, "{text}");
    }
}

#[test]
fn expression_errors() {
    match Expr::parse("t + * 2") {
        Err(ExprError::Syntax { offset, expected }) => {
            assert_eq!(offset, 4);
            assert!(!expected.is_empty());
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(Expr::parse("t^x"), Err(ExprError::Syntax { .. })));
    assert!(matches!(Expr::parse("1/(t-t)").unwrap().eval(&default_precision()), Err(ExprError::Eval { .. })));
    assert!(matches!(Expr::parse("sqrt(3*t)").unwrap().eval(&default_precision()), Err(ExprError::Eval { .. })));
}

#[test]
fn expression_values() {
    assert_eq!(eval("t^(-1)/2"), mono("1/2", -1, 1));
    assert_eq!(eval("i/sqrt(2)"), Series::constant(fe("sqrt2/2*i")));
    // alpha^2 + 1 = 2 alpha sqrt(t)
    let alpha = eval("sqrt(t) + i*sqrt(1-t)");
    assert_eq!(alpha.coeff(&rat(1, 2)), fe("1"));
    assert_eq!(alpha.coeff(&rat_int(0)), fe("i"));
    assert_eq!(alpha.coeff(&rat_int(1)), fe("-1/2*i"));
    let lhs = &(&alpha * &alpha) + &Series::one();
    let rhs = &alpha * &mono("2", 1, 2);
    assert!(lhs.agrees_with(&rhs));
}

#[test]
fn rref_examples() {
    let ones = Matrix::from_rows(vec![vec![fe("1"), fe("1")], vec![fe("1"), fe("1")]]).unwrap();
    let r = rref(&ones);
    assert_eq!(r.rank, 1);
    assert_eq!(r.kernel.len(), 1);
    let k = &r.kernel[0];
    assert_eq!(&k[0] + &k[1], FieldElem::zero());
    assert!(!k[0].is_zero());

    let id = Matrix::<FieldElem>::identity(3);
    assert_eq!(rref(&id).rank, 3);
    assert!(rref(&id).kernel.is_empty());

    let z = Matrix::<FieldElem>::zeros(2, 3);
    assert_eq!(rank(&z), 0);
    assert_eq!(rref(&z).kernel.len(), 3);

    let m = Matrix::from_rows(vec![
        vec![fe("1"), fe("i"), fe("sqrt2")],
        vec![fe("2"), fe("2*i"), fe("1")],
        vec![fe("0"), fe("0"), fe("1")],
    ])
    .unwrap();
    let r = rref(&m);
    assert_eq!(rref(&r.reduced).reduced, r.reduced);
    assert_eq!(r.rank + r.kernel.len(), 3);
}

#[test]
fn series_solve_examples() {
    let p = default_precision();
    let t = Series::t();
    let m = Matrix::from_rows(vec![vec![t.clone(), Series::zero()], vec![Series::zero(), Series::one()]]).unwrap();
    let x = solve_series(&m, &[Series::one(), Series::one()], &p).unwrap();
    assert_eq!(x, vec![mono("1", -1, 1), Series::one()]);

    let b = vec![mono("i", 1, 2), &Series::one() + &t];
    assert_eq!(solve_series(&Matrix::identity(2), &b, &p).unwrap(), b);

    let sing = Matrix::from_rows(vec![vec![t.clone(), t.clone()], vec![t.clone(), t.clone()]]).unwrap();
    assert!(matches!(solve_series(&sing, &[Series::one(), Series::one()], &p), Err(LinAlgError::Singular)));

    let m = Matrix::from_rows(vec![vec![t.clone(), Series::one()], vec![Series::one(), mono("sqrt2", 1, 2)]]).unwrap();
    let inv = inverse_series(&m, &p).unwrap();
    let prod = m.mul(&inv).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { Series::one() } else { Series::zero() };
            assert!(prod[(i, j)].agrees_with(&want));
        }
    }
}

#[test]
fn triviality_examples() {
    let caps = GroebnerCaps::default();
    let sys = |variables: &[&str], polys: Vec<Poly>| PolySystem {
        variables: variables.iter().map(|s| s.to_string()).collect(),
        polys,
    };
    let one = |n| Poly::constant(n, FieldElem::one());
    let x = Poly::var(1, 0);
    assert_eq!(ideal_triviality(&sys(&["x"], vec![x.clone(), x.sub(&one(1))]), caps), Triviality::Empty);
    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    assert_eq!(ideal_triviality(&sys(&["x", "y"], vec![x.mul(&y)]), caps), Triviality::NonEmpty);
    let s = sys(&["x", "y"], vec![x.mul(&x).add(&y.mul(&y)), x.mul(&y), x.add(&y)]);
    assert_eq!(ideal_triviality(&s, caps), Triviality::NonEmpty);
    // the origin solves it
    let origin = [FieldElem::zero(), FieldElem::zero()];
    assert!(s.polys.iter().all(|p| p.eval(&origin).is_zero()));
}
