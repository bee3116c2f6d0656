//! A small expression language for parametrized basis entries.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := '-' term | factor (('*'|'/') factor)*
//! factor := '-' factor | atom ('^' '(' rational ')' | '^' integer)?
//! atom   := integer | 'i' | 'sqrt2' | 't' | 'sqrt' '(' expr ')' | '(' expr ')' | name
//! ```
//!
//! A leading minus applies to the whole product that follows it, so `-i*t` reads as
//! `-(i*t)`. Any other identifier is a free symbol, bound at evaluation time.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalars::{FieldElem, Rational};
use crate::series::{Series, SeriesError};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    I,
    Sqrt2,
    T,
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Sqrt(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected one of {}", expected.join(", "))]
    Syntax { offset: usize, expected: Vec<String> },
    #[error("in `{sub}`: {source}")]
    Eval { sub: String, source: SeriesError },
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("in `{0}`: rational power not representable")]
    PowNotRepresentable(String),
    #[error("`{0}` is not a linear combination of basis symbols")]
    NotLinear(String),
}

enum LinVal {
    Scalar(Series),
    Vector(Vec<Series>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(n.into()))
    }

    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let tokens = lex(text)?;
        let mut p = Parser { toks: tokens, pos: 0, depth: 0 };
        let e = p.expr()?;
        if !matches!(p.peek(), Tok::End) {
            return Err(p.expected(&["operator", "end of input"]));
        }
        Ok(e)
    }

    /// Free symbols in order of first appearance.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Sym(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sqrt(a) => a.collect_symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            _ => {}
        }
    }

    /// Evaluate with no free symbols.
    pub fn eval(&self, precision: &Rational) -> Result<Series, ExprError> {
        self.eval_with(precision, &HashMap::new())
    }

    pub fn eval_with(&self, precision: &Rational, env: &HashMap<String, Series>) -> Result<Series, ExprError> {
        let wrap = |e: &Expr, r: Result<Series, SeriesError>| {
            r.map_err(|source| ExprError::Eval { sub: e.to_string(), source })
        };
        Ok(match self {
            Expr::Num(r) => Series::constant(FieldElem::from_rational(r.clone())),
            Expr::I => Series::constant(FieldElem::i()),
            Expr::Sqrt2 => Series::constant(FieldElem::sqrt2()),
            Expr::T => Series::t(),
            Expr::Sym(s) => env.get(s).cloned().ok_or_else(|| ExprError::Unbound(s.clone()))?,
            Expr::Neg(a) => -a.eval_with(precision, env)?,
            Expr::Add(a, b) => &a.eval_with(precision, env)? + &b.eval_with(precision, env)?,
            Expr::Sub(a, b) => &a.eval_with(precision, env)? - &b.eval_with(precision, env)?,
            Expr::Mul(a, b) => &a.eval_with(precision, env)? * &b.eval_with(precision, env)?,
            Expr::Div(a, b) => {
                let num = a.eval_with(precision, env)?;
                let den = b.eval_with(precision, env)?;
                let inv = wrap(b, den.inv(precision))?;
                &num * &inv
            }
            Expr::Sqrt(a) => {
                let v = a.eval_with(precision, env)?;
                wrap(self, v.sqrt(precision))?
            }
            Expr::Pow(a, e) => {
                let base = a.eval_with(precision, env)?;
                pow_rational(&base, e, precision).map_err(|err| match err {
                    Some(source) => ExprError::Eval { sub: self.to_string(), source },
                    None => ExprError::PowNotRepresentable(self.to_string()),
                })?
            }
        })
    }
}

impl Expr {
    /// Evaluate an expression that is linear in the given basis symbols, returning the
    /// coefficient of each basis symbol. Other symbols are looked up in `env`.
    pub fn eval_linear(
        &self,
        basis: &[String],
        precision: &Rational,
        env: &HashMap<String, Series>,
    ) -> Result<Vec<Series>, ExprError> {
        match self.lin(basis, precision, env)? {
            LinVal::Vector(v) => Ok(v),
            LinVal::Scalar(s) if s.is_exact_zero() => Ok(vec![Series::zero(); basis.len()]),
            LinVal::Scalar(_) => Err(ExprError::NotLinear(self.to_string())),
        }
    }

    fn lin(&self, basis: &[String], precision: &Rational, env: &HashMap<String, Series>) -> Result<LinVal, ExprError> {
        let not_linear = || ExprError::NotLinear(self.to_string());
        let scalar = |e: &Expr| -> Result<Series, ExprError> {
            match e.lin(basis, precision, env)? {
                LinVal::Scalar(s) => Ok(s),
                LinVal::Vector(_) => Err(ExprError::NotLinear(self.to_string())),
            }
        };
        Ok(match self {
            Expr::Sym(s) if basis.contains(s) => {
                let mut v = vec![Series::zero(); basis.len()];
                let k = basis.iter().position(|b| b == s).expect("present");
                v[k] = Series::one();
                LinVal::Vector(v)
            }
            Expr::Neg(a) => match a.lin(basis, precision, env)? {
                LinVal::Scalar(s) => LinVal::Scalar(-s),
                LinVal::Vector(v) => LinVal::Vector(v.iter().map(|x| -x).collect()),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let sub = matches!(self, Expr::Sub(..));
                match (a.lin(basis, precision, env)?, b.lin(basis, precision, env)?) {
                    (LinVal::Scalar(x), LinVal::Scalar(y)) => LinVal::Scalar(if sub { &x - &y } else { &x + &y }),
                    (LinVal::Vector(x), LinVal::Vector(y)) => {
                        LinVal::Vector(x.iter().zip(&y).map(|(p, q)| if sub { p - q } else { p + q }).collect())
                    }
                    _ => return Err(not_linear()),
                }
            }
            Expr::Mul(a, b) => match (a.lin(basis, precision, env)?, b.lin(basis, precision, env)?) {
                (LinVal::Scalar(x), LinVal::Scalar(y)) => LinVal::Scalar(&x * &y),
                (LinVal::Scalar(x), LinVal::Vector(v)) | (LinVal::Vector(v), LinVal::Scalar(x)) => {
                    LinVal::Vector(v.iter().map(|p| p * &x).collect())
                }
                _ => return Err(not_linear()),
            },
            Expr::Div(a, b) => {
                let den = scalar(b)?;
                let inv = den.inv(precision).map_err(|source| ExprError::Eval { sub: b.to_string(), source })?;
                match a.lin(basis, precision, env)? {
                    LinVal::Scalar(x) => LinVal::Scalar(&x * &inv),
                    LinVal::Vector(v) => LinVal::Vector(v.iter().map(|p| p * &inv).collect()),
                }
            }
            Expr::Pow(a, _) | Expr::Sqrt(a) => {
                scalar(a)?;
                LinVal::Scalar(self.eval_with(precision, env)?)
            }
            _ => LinVal::Scalar(self.eval_with(precision, env)?),
        })
    }
}

/// `base^(p/q)`; `Err(None)` when the root is not expressible.
fn pow_rational(base: &Series, e: &Rational, work: &Rational) -> Result<Series, Option<SeriesError>> {
    let p: i64 = e.numer().try_into().map_err(|_| None)?;
    let mut q: BigInt = e.denom().clone();
    if base.is_monomial() {
        let (v, c) = base.leading().expect("monomial");
        if c.is_one() {
            return Ok(Series::monomial(FieldElem::one(), v * e));
        }
    }
    let two = BigInt::from(2);
    let mut root = base.clone();
    while q > BigInt::one() {
        if (&q % &two).is_zero() {
            root = root.sqrt(work).map_err(Some)?;
            q /= &two;
        } else {
            return Err(None);
        }
    }
    root.powi(p, work).map_err(Some)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(u8),
    End,
}

struct Lexed {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ExprError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[s..i].parse().expect("digits");
            out.push(Lexed { tok: Tok::Int(n), offset: s });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Lexed { tok: Tok::Ident(text[s..i].to_string()), offset: s });
        } else if b"+-*/^()".contains(&c) {
            out.push(Lexed { tok: Tok::Op(c), offset: i });
            i += 1;
        } else {
            return Err(ExprError::Syntax {
                offset: i,
                expected: vec!["number".into(), "identifier".into(), "operator".into()],
            });
        }
    }
    out.push(Lexed { tok: Tok::End, offset: b.len() });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_op(&self, c: u8) -> bool {
        matches!(self.peek(), Tok::Op(x) if *x == c)
    }

    fn expected(&self, what: &[&str]) -> ExprError {
        ExprError::Syntax { offset: self.toks[self.pos].offset, expected: what.iter().map(|s| s.to_string()).collect() }
    }

    fn expect_op(&mut self, c: u8) -> Result<(), ExprError> {
        if self.is_op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(&[&format!("'{}'", c as char)]))
        }
    }

    fn enter(&mut self) -> Result<(), ExprError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.expected(&["shallower nesting"]));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            if self.is_op(b'+') {
                self.bump();
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.is_op(b'-') {
                self.bump();
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        self.enter()?;
        let out = if self.is_op(b'-') {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            let mut lhs = self.factor()?;
            loop {
                if self.is_op(b'*') {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                } else if self.is_op(b'/') {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                } else {
                    break;
                }
            }
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        self.enter()?;
        let out = if self.is_op(b'-') {
            self.bump();
            Expr::Neg(Box::new(self.factor()?))
        } else {
            let base = self.atom()?;
            if self.is_op(b'^') {
                self.bump();
                let e = self.exponent()?;
                Expr::Pow(Box::new(base), e)
            } else {
                base
            }
        };
        self.depth -= 1;
        Ok(out)
    }

    fn exponent(&mut self) -> Result<Rational, ExprError> {
        match self.bump() {
            Tok::Int(n) => Ok(Rational::from_integer(n)),
            Tok::Op(b'(') => {
                let neg = if self.is_op(b'-') {
                    self.bump();
                    true
                } else {
                    false
                };
                let num = self.integer()?;
                let den = if self.is_op(b'/') {
                    self.bump();
                    let d = self.integer()?;
                    if d.is_zero() {
                        self.pos -= 1;
                        return Err(self.expected(&["nonzero denominator"]));
                    }
                    d
                } else {
                    BigInt::one()
                };
                self.expect_op(b')')?;
                let r = Rational::new(num, den);
                Ok(if neg { -r } else { r })
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.expected(&["integer", "'('"]))
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.expected(&["integer"])),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Num(Rational::from_integer(n)))
            }
            Tok::Op(b'(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_op(b')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(match name.as_str() {
                    "i" => Expr::I,
                    "sqrt2" => Expr::Sqrt2,
                    "t" => Expr::T,
                    "sqrt" => {
                        self.expect_op(b'(')?;
                        let e = self.expr()?;
                        self.expect_op(b')')?;
                        Expr::Sqrt(Box::new(e))
                    }
                    _ => Expr::Sym(name),
                })
            }
            _ => Err(self.expected(&["number", "'i'", "'sqrt2'", "'t'", "'sqrt'", "'('", "name"])),
        }
    }
}

fn fmt_num(r: &Rational) -> String {
    if r.is_integer() && !r.is_negative() {
        r.numer().to_string()
    } else if r.is_integer() {
        format!("({})", r.numer())
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

fn is_atom(e: &Expr) -> bool {
    matches!(e, Expr::Num(_) | Expr::I | Expr::Sqrt2 | Expr::T | Expr::Sym(_) | Expr::Sqrt(_))
}

fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints text that parses back to the same tree (for trees whose literals are
/// non-negative integers, which is all the parser produces).
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => f.write_str(&fmt_num(r)),
            Expr::I => f.write_str("i"),
            Expr::Sqrt2 => f.write_str("sqrt2"),
            Expr::T => f.write_str("t"),
            Expr::Sym(s) => f.write_str(s),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                paren(f, a, matches!(**a, Expr::Add(..) | Expr::Sub(..)))
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let op = if matches!(self, Expr::Add(..)) { " + " } else { " - " };
                paren(f, a, false)?;
                f.write_str(op)?;
                paren(f, b, matches!(**b, Expr::Add(..) | Expr::Sub(..)))
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = if matches!(self, Expr::Mul(..)) { "*" } else { "/" };
                paren(f, a, matches!(**a, Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_)))?;
                f.write_str(op)?;
                paren(f, b, matches!(**b, Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_) | Expr::Mul(..) | Expr::Div(..)))
            }
            Expr::Pow(a, e) => {
                paren(f, a, !is_atom(a) || matches!(**a, Expr::Num(ref r) if !r.is_integer() || r.is_negative()))?;
                if e.is_integer() && !e.is_negative() {
                    write!(f, "^{}", e.numer())
                } else if e.is_integer() {
                    write!(f, "^({})", e.numer())
                } else {
                    write!(f, "^({}/{})", e.numer(), e.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, rat_int};
    use crate::series::default_precision;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    fn fe(s: &str) -> FieldElem {
        FieldElem::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(Expr::parse("t^(-1)/2").unwrap(), Expr::Div(b(Expr::Pow(b(Expr::T), rat_int(-1))), b(Expr::int(2))));
        assert_eq!(
            Expr::parse("-i*t^(1/2)").unwrap(),
            Expr::Neg(b(Expr::Mul(b(Expr::I), b(Expr::Pow(b(Expr::T), rat(1, 2))))))
        );
        let e = Expr::parse("sqrt((1+sqrt(2*t))/(1-sqrt(2*t)))").unwrap();
        assert!(matches!(e, Expr::Sqrt(ref inner) if matches!(**inner, Expr::Div(..))));
        assert_eq!(Expr::parse("t^2").unwrap(), Expr::Pow(b(Expr::T), rat_int(2)));
        assert_eq!(Expr::parse("e1 + a").unwrap().symbols(), vec!["e1", "a"]);
    }

    #[test]
    fn syntax_errors() {
        match Expr::parse("t + * 2") {
            Err(ExprError::Syntax { offset, expected }) => {
                assert_eq!(offset, 4);
                assert!(expected.iter().any(|s| s == "'t'"));
            }
            other => panic!("{other:?}"),
        }
        assert!(Expr::parse("t^").is_err());
        assert!(Expr::parse("t^(1/0)").is_err());
        assert!(Expr::parse("sqrt 2").is_err());
        assert!(Expr::parse("(t").is_err());
        assert!(Expr::parse("t $").is_err());
        assert!(Expr::parse("").is_err());
    }

    #[test]
    fn format_examples() {
        assert_eq!(Expr::Pow(b(Expr::T), rat(1, 2)).to_string(), "t^(1/2)");
        assert_eq!(Expr::Neg(b(Expr::I)).to_string(), "-i");
        assert_eq!(Expr::Mul(b(Expr::int(2)), b(Expr::T)).to_string(), "2*t");
        let m = Expr::Mul(b(Expr::Neg(b(Expr::I))), b(Expr::T));
        assert_eq!(Expr::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn eval_examples() {
        let p = default_precision();
        let v = Expr::parse("t^(-1)/2").unwrap().eval(&p).unwrap();
        assert_eq!(v, Series::monomial(fe("1/2"), rat_int(-1)));
        let v = Expr::parse("i/sqrt(2)").unwrap().eval(&p).unwrap();
        assert_eq!(v, Series::constant(fe("i*sqrt2/2")));
        let a = Expr::parse("sqrt(t) + i*sqrt(1-t)").unwrap().eval(&p).unwrap();
        assert_eq!(a.coeff(&rat(1, 2)), fe("1"));
        assert_eq!(a.coeff(&rat_int(0)), fe("i"));
        assert_eq!(a.coeff(&rat_int(1)), fe("-i/2"));
        // alpha^2 + 1 = 2 alpha sqrt(t)
        let lhs = &(&a * &a) + &Series::one();
        let rhs = &a * &Series::monomial(fe("2"), rat(1, 2));
        assert!(lhs.agrees_with(&rhs));
        assert!(lhs.precision().unwrap() >= &rat_int(7));
    }

    #[test]
    fn linear_eval() {
        let p = default_precision();
        let basis: Vec<String> = ["e1", "e2"].iter().map(|s| s.to_string()).collect();
        let v = Expr::parse("t^(-1)*(e2 - e1)/2").unwrap().eval_linear(&basis, &p, &HashMap::new()).unwrap();
        assert_eq!(v[0], Series::monomial(fe("-1/2"), rat_int(-1)));
        assert_eq!(v[1], Series::monomial(fe("1/2"), rat_int(-1)));
        assert!(matches!(
            Expr::parse("e1*e2").unwrap().eval_linear(&basis, &p, &HashMap::new()),
            Err(ExprError::NotLinear(_))
        ));
        assert!(Expr::parse("e1 + 1").unwrap().eval_linear(&basis, &p, &HashMap::new()).is_err());
        assert!(Expr::parse("1/e1").unwrap().eval_linear(&basis, &p, &HashMap::new()).is_err());
        let mut env = HashMap::new();
        env.insert("a".to_string(), Series::t());
        let v = Expr::parse("a*e1").unwrap().eval_linear(&basis, &p, &env).unwrap();
        assert_eq!(v[0], Series::t());
    }

    #[test]
    fn eval_errors() {
        let p = default_precision();
        assert!(matches!(
            Expr::parse("1/(t - t)").unwrap().eval(&p),
            Err(ExprError::Eval { source: SeriesError::NotInvertible, .. })
        ));
        assert!(matches!(
            Expr::parse("sqrt(3*t)").unwrap().eval(&p),
            Err(ExprError::Eval { source: SeriesError::NotRepresentable(_), .. })
        ));
        assert_eq!(Expr::parse("a").unwrap().eval(&p), Err(ExprError::Unbound("a".into())));
        assert!(matches!(Expr::parse("(2*t)^(1/3)").unwrap().eval(&p), Err(ExprError::PowNotRepresentable(_))));
        assert_eq!(Expr::parse("t^(1/3)").unwrap().eval(&p).unwrap(), Series::monomial(fe("1"), rat(1, 3)));
    }
}
