//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;

use superlie::catalog::{heisenberg_1n, k2m, Catalog};
use superlie::cohomology::{h2_even, independent_mod_coboundaries, is_cocycle, Cochain2Even};
use superlie::gamma23::{classify_pair, pair_act, random_group_element, representatives, SymPair};
use superlie::invariants::{center, derived, orbit_dim};
use superlie::orbitrel::{
    build_hasse, components, discrepancy_report_with, verify_in_catalog, DiscrepancyStatus, Verdict,
};
use superlie::series::default_precision;

type Check = fn() -> Result<String, String>;

fn main() {
    let checks: [(u8, &str, Check); 9] = [
        (1, "catalog integrity", catalog_integrity),
        (2, "cohomology regression", cohomology_regression),
        (3, "orbit dimensions", orbit_dimensions),
        (4, "degeneration witnesses", degeneration_witnesses),
        (5, "non-degeneration tables", nondegeneration_tables),
        (6, "components", component_lists),
        (7, "gamma23 classification", gamma23),
        (8, "rigid families", rigid_families),
        (9, "property suites", property_suites),
    ];
    let mut failed = 0;
    for (n, name, check) in checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn within(start: Instant, limit: u64, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    if took > Duration::from_secs(limit) {
        return Err(format!("{what} took {:.1}s, limit {limit}s", took.as_secs_f64()));
    }
    Ok(())
}

fn summarize(bad: &[String]) -> String {
    let shown: Vec<&str> = bad.iter().take(12).map(String::as_str).collect();
    let more = if bad.len() > 12 { format!(" and {} more", bad.len() - 12) } else { String::new() };
    format!("{} mismatches: {}{more}", bad.len(), shown.join("; "))
}

fn catalog_integrity() -> Result<String, String> {
    let start = Instant::now();
    let cat = Catalog::builtin();
    let mut bad = Vec::new();
    for e in cat.entries() {
        let g = &e.algebra;
        if !g.check_jacobi().is_empty() {
            bad.push(format!("{} fails Jacobi", e.label));
        }
        if !g.check_j1_j2().is_empty() {
            bad.push(format!("{} fails J1/J2", e.label));
        }
        if !g.is_nilpotent() {
            bad.push(format!("{} is not nilpotent", e.label));
        }
    }
    if !bad.is_empty() {
        return Err(summarize(&bad));
    }
    within(start, 5, "catalog checks")?;
    Ok(format!("{} algebras", cat.entries().len()))
}

fn cohomology_regression() -> Result<String, String> {
    let cat = Catalog::builtin();
    let tables = cat.expected();
    let mut bad = Vec::new();
    for (label, want) in &tables.h2_even {
        let got = h2_even(&cat.get(label).map_err(|e| e.to_string())?.algebra).dim;
        if got != *want {
            bad.push(format!("h2 {label}: computed {got}, listed {want}"));
        }
    }
    let mut cocycles = 0;
    for (label, list) in &tables.cocycles {
        let g = &cat.get(label).map_err(|e| e.to_string())?.algebra;
        let parsed: Vec<Cochain2Even> = list
            .iter()
            .map(|t| Cochain2Even::parse(g.m(), g.n(), t))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (text, c) in list.iter().zip(&parsed) {
            cocycles += 1;
            if !is_cocycle(g, c).map_err(|e| e.to_string())? {
                bad.push(format!("{label}: `{text}` is not a cocycle"));
            }
        }
        let indep = independent_mod_coboundaries(g, &parsed);
        if indep != parsed.len() {
            bad.push(format!("{label}: {} listed cocycles, {indep} independent mod coboundaries", parsed.len()));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} H2 values, {cocycles} cocycles", tables.h2_even.len()))
    } else {
        Err(summarize(&bad))
    }
}

fn orbit_dimensions() -> Result<String, String> {
    let cat = Catalog::builtin();
    let levels = &cat.expected().orbit_levels;
    let bad: Vec<String> = levels
        .par_iter()
        .filter_map(|(label, want)| {
            let got = orbit_dim(&cat.get(label).ok()?.algebra);
            (got != *want).then(|| format!("{label}: computed {got}, level {want}"))
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} levels", levels.len()))
    } else {
        Err(summarize(&bad))
    }
}

fn degeneration_witnesses() -> Result<String, String> {
    let start = Instant::now();
    let cat = Catalog::builtin();
    let rows: Vec<_> = cat.witnesses().iter().filter(|w| w.source.as_deref().unwrap_or("table") == "table").collect();
    let bad: Vec<String> = rows
        .par_iter()
        .filter_map(|w| match verify_in_catalog(cat, w, &default_precision()) {
            Ok(Verdict::Verified { .. }) => None,
            Ok(Verdict::Failed { failure }) => Some(format!("{} -> {}: {failure}", w.from, w.to)),
            Err(e) => Some(format!("{} -> {}: {e}", w.from, w.to)),
        })
        .collect();
    if !bad.is_empty() {
        return Err(summarize(&bad));
    }
    within(start, 30, "witness verification")?;
    Ok(format!("{} table rows verified", rows.len()))
}

fn nondegeneration_tables() -> Result<String, String> {
    let cat = Catalog::builtin();
    let mut bad = Vec::new();
    let mut rows = 0;
    let mut reported = 0;
    for dim in cat.shapes() {
        rows += cat.nondegen_for(dim).len();
        if cat.nondegen_for(dim).is_empty() {
            continue;
        }
        let hasse = build_hasse(cat, dim, &default_precision()).map_err(|e| e.to_string())?;
        for r in discrepancy_report_with(cat, dim, Some(&hasse)) {
            reported += 1;
            let case_three = r.table.ends_with("case-III");
            let allowed = if dim.total() <= 4 {
                false
            } else if case_three {
                r.known
            } else {
                r.status != DiscrepancyStatus::Refuted
            };
            if !allowed {
                bad.push(format!("{} -/-> {} ({}, {:?})", r.from, r.to, r.cited, r.status));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{rows} rows, {reported} in the discrepancy report, all allowed"))
    } else {
        Err(format!("{rows} rows; not allowed in the report: {}", summarize(&bad)))
    }
}

fn component_lists() -> Result<String, String> {
    let cat = Catalog::builtin();
    let expected = &cat.expected().components;
    let mut bad = Vec::new();
    for (shape, want) in expected {
        let dim = superlie::catalog::parse_shape(shape).ok_or_else(|| format!("bad shape {shape}"))?;
        let hasse = build_hasse(cat, dim, &default_precision()).map_err(|e| e.to_string())?;
        let report = components(&hasse);
        let (mut got, mut want) = (report.components.clone(), want.clone());
        got.sort();
        want.sort();
        if got != want {
            bad.push(format!("{shape}: computed {got:?}, listed {want:?}"));
        }
        if !report.warnings.is_empty() {
            bad.push(format!("{shape}: unseparated maximal pairs {:?}", report.warnings));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} shapes", expected.len()))
    } else {
        Err(summarize(&bad))
    }
}

fn gamma23() -> Result<String, String> {
    let reps = representatives();
    let mut labels: Vec<String> = reps.iter().filter_map(|(_, p)| classify_pair(p).label).collect();
    labels.sort();
    labels.dedup();
    if labels.len() != 12 {
        return Err(format!("representatives get {} distinct labels", labels.len()));
    }
    let mut rng = StdRng::seed_from_u64(0x23);
    let mut samples: Vec<(String, SymPair)> = Vec::new();
    for (label, p) in &reps {
        for _ in 0..200 {
            let (t, s) = random_group_element(&mut rng);
            samples.push((label.clone(), pair_act(&t, &s, p).map_err(|e| e.to_string())?));
        }
    }
    let mismatches: Vec<String> = samples
        .par_iter()
        .filter_map(|(label, q)| {
            let got = classify_pair(q).label;
            (got.as_deref() != Some(label.as_str())).then(|| format!("{label} classified as {got:?}"))
        })
        .collect();
    if !mismatches.is_empty() {
        return Err(summarize(&mismatches));
    }
    let cat = Catalog::builtin();
    for (label, p) in &reps {
        let (mine, theirs) = (p.to_superalgebra(), &cat.get(label).map_err(|e| e.to_string())?.algebra);
        let same = center(&mine).dim() == center(theirs).dim()
            && derived(&mine).dim() == derived(theirs).dim()
            && orbit_dim(&mine) == orbit_dim(theirs)
            && h2_even(&mine).dim == h2_even(theirs).dim;
        if !same {
            return Err(format!("{label}: representative fingerprint differs from the catalog entry"));
        }
    }
    Ok(format!("12 labels, {} random actions, 0 mismatches, fingerprints match", samples.len()))
}

fn rigid_families() -> Result<String, String> {
    for n in 1..=6 {
        let h = heisenberg_1n(n).map_err(|e| e.to_string())?;
        let d = h2_even(&h).dim;
        if d != 0 {
            return Err(format!("H(1|{n}) has h2_even = {d}"));
        }
    }
    for m in [3, 5] {
        let k = k2m(m).map_err(|e| e.to_string())?;
        if !k.check_jacobi().is_empty() || !k.check_j1_j2().is_empty() || !k.is_nilpotent() {
            return Err(format!("K(2|{m}) fails the axioms or nilpotency"));
        }
    }
    Ok("H(1|1..6) rigid, K(2|3) and K(2|5) valid".into())
}

fn property_suites() -> Result<String, String> {
    let runs: [(&str, fn() -> Result<u32, String>); 10] = [
        ("field", || common::field_properties(1000)),
        ("series", || common::series_properties(1000)),
        ("parser", || common::parser_properties(1000)),
        ("formats", || common::format_properties(1000)),
        ("composition", || common::composition_properties(256)),
        ("jacobi", || common::jacobi_agreement(200)),
        ("d2 d1 random", || common::complex_property(300)),
        ("d2 d1 catalog", common::complex_on_catalog),
        ("invariance", || common::invariance_properties(200)),
        ("verified pairs", common::verified_pairs_consistent),
    ];
    let mut parts = Vec::new();
    for (name, f) in runs {
        let n = f().map_err(|e| format!("{name}: {e}"))?;
        parts.push(format!("{name} {n}"));
    }
    Ok(parts.join(", "))
}
