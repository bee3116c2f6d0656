//! Replays the fuzz corpus seeds through the round-trip properties the fuzz targets assert.

use std::path::PathBuf;

use superlie::catalog::Catalog;
use superlie::cohomology::Cochain2Even;
use superlie::gamma23::{classify_pair, SymPair};
use superlie::orbitrel::{verify_in_catalog, DegenerationWitness};
use superlie::scalars::rat_int;
use superlie::{Expr, FieldElem, SuperAlgebra};

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    let out: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

fn text(data: &[u8]) -> &str {
    std::str::from_utf8(data).unwrap()
}

fn shaped(data: &[u8]) -> (usize, usize, &str) {
    let (&shape, rest) = data.split_first().unwrap();
    ((shape % 4) as usize, (shape / 4 % 4) as usize, text(rest))
}

#[test]
fn scalar_seeds() {
    for s in seeds("scalar_parse") {
        let x = FieldElem::parse(text(&s)).unwrap();
        assert_eq!(FieldElem::parse(&x.to_string()).unwrap(), x);
    }
}

#[test]
fn expr_seeds() {
    for s in seeds("expr_parse") {
        let e = Expr::parse(text(&s)).unwrap();
        assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
        let _ = e.eval(&rat_int(3));
    }
}

#[test]
fn algebra_seeds() {
    for s in seeds("algebra_json") {
        let g = SuperAlgebra::from_json(text(&s)).unwrap();
        let back = SuperAlgebra::from_json(&g.to_json()).unwrap();
        assert_eq!(back.structure_tensor(), g.structure_tensor());
        assert!(g.check_jacobi().is_empty() && g.check_j1_j2().is_empty());
    }
}

#[test]
fn bracket_seeds() {
    for s in seeds("bracket_text") {
        let (m, n, t) = shaped(&s);
        let g = SuperAlgebra::parse_brackets(m, n, t, &FieldElem::one()).unwrap();
        let back = SuperAlgebra::parse_brackets(m, n, &g.brackets_text(), &FieldElem::one()).unwrap();
        assert_eq!(back.structure_tensor(), g.structure_tensor());
    }
}

#[test]
fn cochain_seeds() {
    for s in seeds("cochain_parse") {
        let (m, n, t) = shaped(&s);
        let c = Cochain2Even::parse(m, n, t).unwrap();
        assert_eq!(Cochain2Even::parse(m, n, &c.to_string()).unwrap(), c);
    }
}

#[test]
fn witness_seeds() {
    for s in seeds("witness_json") {
        let w = DegenerationWitness::from_json(text(&s)).unwrap();
        assert!(verify_in_catalog(Catalog::builtin(), &w, &rat_int(8)).unwrap().is_verified(), "{}", text(&s));
    }
}

#[test]
fn gamma23_seeds() {
    for s in seeds("gamma23_json") {
        let (g1, g2) = text(&s).split_once('\n').unwrap();
        assert!(classify_pair(&SymPair::parse_json(g1, g2).unwrap()).label.is_some());
    }
}
