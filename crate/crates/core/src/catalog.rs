//! Built-in data: the classified nilpotent superalgebras of total dimension at most 5,
//! degeneration witnesses, non-degeneration rows and expected values, plus the
//! rigid families `(1|n)` Heisenberg and `K^{2,m}`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;
use thiserror::Error;

use crate::orbitrel::{Criterion, DegenerationWitness};
use crate::scalars::FieldElem;
use crate::superalg::{AlgebraDoc, GradedDim, SuperAlgebra};

pub const CATALOG_JSON: &str = include_str!("../data/catalog.json");
pub const WITNESSES_JSON: &str = include_str!("../data/witnesses.json");
pub const NONDEGEN_JSON: &str = include_str!("../data/nondegen.json");
pub const EXPECTED_JSON: &str = include_str!("../data/expected.json");
pub const CHECKSUMS: &str = include_str!("../data/SHA256SUMS");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("no catalog entry `{0}`")]
    NotFound(String),
    #[error("K2m needs odd m, got {0}")]
    MEven(usize),
    #[error("heisenberg_1n needs n >= 1")]
    NZero,
    #[error("catalog data: {0}")]
    Data(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpectedValues {
    pub orbit_dim: Option<usize>,
    pub h2_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub label: String,
    pub algebra: SuperAlgebra,
    pub expected: ExpectedValues,
}

/// One pair from a non-degeneration table with the reason printed there.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct NonDegRow {
    pub table: String,
    pub from: String,
    pub to: String,
    pub criterion: Criterion,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct KnownDiscrepancy {
    pub from: String,
    pub to: String,
    pub criterion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct DeformationProbe {
    pub algebra: String,
    pub brackets: String,
}

/// Values printed in the source tables and diagrams.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ExpectedTables {
    pub h2_even: BTreeMap<String, usize>,
    pub cocycles: BTreeMap<String, Vec<String>>,
    pub orbit_levels: BTreeMap<String, usize>,
    pub diagram_edges: BTreeMap<String, Vec<(String, String)>>,
    pub components: BTreeMap<String, Vec<String>>,
    pub deformations: Vec<DeformationProbe>,
    pub known_discrepancies: Vec<KnownDiscrepancy>,
}

impl ExpectedTables {
    pub fn is_known_discrepancy(&self, from: &str, to: &str) -> bool {
        self.known_discrepancies.iter().any(|k| k.from == from && k.to == to)
    }
}

#[derive(Debug)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    witnesses: Vec<DegenerationWitness>,
    nondegen: Vec<NonDegRow>,
    expected: ExpectedTables,
}

static CATALOG: OnceLock<Catalog> = OnceLock::new();

impl Catalog {
    /// The built-in catalog, parsed once.
    pub fn builtin() -> &'static Catalog {
        CATALOG.get_or_init(|| Catalog::parse().expect("built-in catalog data is valid"))
    }

    pub fn parse() -> Result<Catalog, CatalogError> {
        let data = |e: serde_json::Error| CatalogError::Data(e.to_string());
        let docs: Vec<AlgebraDoc> = serde_json::from_str(CATALOG_JSON).map_err(data)?;
        let expected: ExpectedTables = serde_json::from_str(EXPECTED_JSON).map_err(data)?;
        let mut entries = Vec::with_capacity(docs.len());
        for doc in &docs {
            let algebra = SuperAlgebra::from_doc(doc).map_err(|e| CatalogError::Data(format!("{}: {e}", doc.name)))?;
            entries.push(CatalogEntry {
                label: doc.name.clone(),
                algebra,
                expected: ExpectedValues {
                    orbit_dim: expected.orbit_levels.get(&doc.name).copied(),
                    h2_dim: expected.h2_even.get(&doc.name).copied(),
                },
            });
        }
        let witnesses: Vec<DegenerationWitness> = serde_json::from_str(WITNESSES_JSON).map_err(data)?;
        let nondegen: Vec<NonDegRow> = serde_json::from_str(NONDEGEN_JSON).map_err(data)?;
        let cat = Catalog { entries, witnesses, nondegen, expected };
        cat.check_references()?;
        Ok(cat)
    }

    fn check_references(&self) -> Result<(), CatalogError> {
        let shape = |l: &str| self.get(l).map(|e| e.algebra.dim());
        for w in &self.witnesses {
            if shape(&w.from)? != shape(&w.to)? {
                return Err(CatalogError::Data(format!("witness {} -> {} changes shape", w.from, w.to)));
            }
        }
        for r in &self.nondegen {
            if shape(&r.from)? != shape(&r.to)? {
                return Err(CatalogError::Data(format!("row {} -/-> {} changes shape", r.from, r.to)));
            }
        }
        for labels in self.expected.components.values() {
            for l in labels {
                shape(l)?;
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, label: &str) -> Result<&CatalogEntry, CatalogError> {
        let norm = normalize_label(label);
        self.entries.iter().find(|e| e.label == norm).ok_or_else(|| CatalogError::NotFound(label.to_string()))
    }

    pub fn list(&self, dim: GradedDim) -> Vec<&CatalogEntry> {
        self.entries.iter().filter(|e| e.algebra.dim() == dim).collect()
    }

    /// Graded shapes present, in catalog order.
    pub fn shapes(&self) -> Vec<GradedDim> {
        let mut out: Vec<GradedDim> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.algebra.dim()) {
                out.push(e.algebra.dim());
            }
        }
        out
    }

    pub fn witnesses(&self) -> &[DegenerationWitness] {
        &self.witnesses
    }

    pub fn witnesses_for(&self, dim: GradedDim) -> Vec<&DegenerationWitness> {
        self.witnesses.iter().filter(|w| self.get(&w.from).is_ok_and(|e| e.algebra.dim() == dim)).collect()
    }

    pub fn find_witness(&self, from: &str, to: &str) -> Option<&DegenerationWitness> {
        let (f, t) = (normalize_label(from), normalize_label(to));
        self.witnesses.iter().find(|w| w.from == f && w.to == t)
    }

    pub fn nondegen_rows(&self) -> &[NonDegRow] {
        &self.nondegen
    }

    pub fn nondegen_for(&self, dim: GradedDim) -> Vec<&NonDegRow> {
        self.nondegen.iter().filter(|r| self.get(&r.from).is_ok_and(|e| e.algebra.dim() == dim)).collect()
    }

    pub fn expected(&self) -> &ExpectedTables {
        &self.expected
    }
}

/// Accept `(2|3)_{18}` and surrounding whitespace.
pub fn normalize_label(label: &str) -> String {
    label.trim().replace(['{', '}', ' '], "")
}

/// Parse `(m|n)` into a graded dimension.
pub fn parse_shape(text: &str) -> Option<GradedDim> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once('|')?;
    Some(GradedDim::new(a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// `[f_i,f_i] = e1` for `i = 1..n`.
pub fn heisenberg_1n(n: usize) -> Result<SuperAlgebra, CatalogError> {
    if n == 0 {
        return Err(CatalogError::NZero);
    }
    let mut g = SuperAlgebra::zero(1, n);
    for i in 0..n {
        g.set_gamma(i, i, 0, FieldElem::one());
    }
    Ok(g.with_name(format!("H(1|{n})")))
}

/// `[e1,f_i] = f_{i+1}` and `[f_j, f_{m+1-j}] = (-1)^{j+1} e2`.
pub fn k2m(m: usize) -> Result<SuperAlgebra, CatalogError> {
    if m.is_multiple_of(2) {
        return Err(CatalogError::MEven(m));
    }
    let mut g = SuperAlgebra::zero(2, m);
    for i in 0..m - 1 {
        g.set_rho(0, i, i + 1, FieldElem::one());
    }
    for j in 1..=m.div_ceil(2) {
        let sign = if j % 2 == 1 { FieldElem::one() } else { -FieldElem::one() };
        g.set_gamma(j - 1, m - j, 1, sign);
    }
    Ok(g.with_name(format!("K(2|{m})")))
}
