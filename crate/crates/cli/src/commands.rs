//! One function per subcommand; each returns a [`Report`] or a [`CliError`].

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use superlie::catalog::{Catalog, CatalogEntry};
use superlie::cohomology::{h2_even, independent_mod_coboundaries, is_cocycle, Cochain2Even};
use superlie::gamma23::{classify_pair, SymPair};
use superlie::invariants::{invariant_report_with, orbit_dim};
use superlie::orbitrel::{
    auto_nondegen, build_hasse, components, discrepancy_report_with, verify_adaptive, DegenerationWitness,
    HasseDiagram, NonDegConfig, Profile, Verdict, DEFAULT_DEPTH,
};
use superlie::{GradedDim, SuperAlgebra};

use crate::{selftest, CliConfig, CliError, Command, Report};

/// Doubling rounds tried when a witness needs more precision.
const RETRY_ROUNDS: usize = 3;

pub fn run(command: Command, config: &CliConfig) -> Result<Report, CliError> {
    match command {
        Command::List { m, n } => list(m, n),
        Command::Show { algebra } => show(&algebra),
        Command::Check { algebra } => check(&algebra),
        Command::Invariants { algebra } => invariants(&algebra, config),
        Command::H2 { algebra } => h2(&algebra),
        Command::Degenerate { from, to, witness } => degenerate(&from, &to, witness.as_deref(), config),
        Command::Nondegen { from, to } => nondegen(&from, &to),
        Command::Hasse { m, n, dot } => hasse(m, n, dot.as_deref(), config),
        Command::Components { m, n } => components_cmd(m, n, config),
        Command::Gamma23 { g1, g2 } => gamma23(&g1, &g2),
        Command::VerifyAll { m, n } => verify_all(m, n, config),
        Command::Selftest { seed, cases } => Ok(selftest::run(seed, cases, config)),
    }
}

fn cat() -> &'static Catalog {
    Catalog::builtin()
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// A catalog label or a path to an algebra JSON file.
fn resolve(arg: &str) -> Result<(String, SuperAlgebra), CliError> {
    let path = Path::new(arg);
    if path.is_file() || arg.ends_with(".json") {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: arg.into(), source })?;
        let g = SuperAlgebra::from_json(&text)?;
        let name = g.name.clone().unwrap_or_else(|| arg.to_string());
        return Ok((name, g));
    }
    let e = cat().get(arg)?;
    Ok((e.label.clone(), e.algebra.clone()))
}

fn entry(label: &str) -> Result<&'static CatalogEntry, CliError> {
    Ok(cat().get(label)?)
}

fn shape(m: usize, n: usize) -> Result<GradedDim, CliError> {
    let d = GradedDim::new(m, n);
    if cat().list(d).is_empty() {
        return Err(CliError::Usage(format!("no catalog entries of shape {d}")));
    }
    Ok(d)
}

fn list(m: Option<usize>, n: Option<usize>) -> Result<Report, CliError> {
    let entries: Vec<&CatalogEntry> = match (m, n) {
        (Some(m), Some(n)) => shape(m, n).map(|d| cat().list(d))?,
        (None, None) => cat().entries().iter().collect(),
        _ => return Err(CliError::Usage("give both m and n, or neither".into())),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for e in entries {
        let g = &e.algebra;
        let brackets = if g.is_abelian() { "abelian".to_string() } else { g.brackets_text() };
        writeln!(text, "{:<10} {}", e.label, brackets).unwrap();
        rows.push(json!({ "label": e.label, "dim": g.dim(), "brackets": brackets }));
    }
    Ok(Report { ok: true, text, json: Value::Array(rows) })
}

fn show(arg: &str) -> Result<Report, CliError> {
    let (_, g) = resolve(arg)?;
    let json: Value = serde_json::from_str(&g.to_json()).expect("algebra JSON is valid");
    Ok(Report { ok: true, text: format!("{g}\n"), json })
}

fn check(arg: &str) -> Result<Report, CliError> {
    let (name, g) = resolve(arg)?;
    let (m, n) = (g.m(), g.n());
    let jacobi: Vec<String> = g.check_jacobi().iter().map(|v| v.describe(m, n)).collect();
    let j1j2: Vec<String> = g.check_j1_j2().iter().map(|v| v.describe(m, n)).collect();
    let nilpotent = g.is_nilpotent();
    let lcs = g.lower_central_series();
    let ok = jacobi.is_empty() && j1j2.is_empty() && nilpotent;

    let mut text = format!("{name} {}\n", g.dim());
    for (what, list) in [("super Jacobi", &jacobi), ("J1/J2", &j1j2)] {
        if list.is_empty() {
            writeln!(text, "{what}: ok").unwrap();
        } else {
            writeln!(text, "{what}: {} violations", list.len()).unwrap();
            for v in list {
                writeln!(text, "  {v}").unwrap();
            }
        }
    }
    let series: Vec<String> = lcs.iter().map(GradedDim::to_string).collect();
    writeln!(text, "nilpotent: {} (lower central series {})", if nilpotent { "yes" } else { "no" }, series.join(" > "))
        .unwrap();
    writeln!(text, "{}", if ok { "OK" } else { "FAILED" }).unwrap();
    let json = json!({
        "name": name,
        "dim": g.dim(),
        "jacobi_violations": jacobi,
        "j1_j2_violations": j1j2,
        "nilpotent": nilpotent,
        "lower_central_series": lcs,
        "ok": ok,
    });
    Ok(Report { ok, text, json })
}

fn invariants(arg: &str, config: &CliConfig) -> Result<Report, CliError> {
    let (name, g) = resolve(arg)?;
    let r = invariant_report_with(&g, config.caps);
    let mut text = format!("{name} {}\n", r.dim);
    writeln!(text, "center: {}", r.center).unwrap();
    writeln!(text, "derived: {}", r.derived).unwrap();
    writeln!(text, "gamma = 0: {}", r.gamma_zero).unwrap();
    writeln!(text, "even derivations: {}", r.der0_dim).unwrap();
    writeln!(text, "orbit dimension: {}", r.orbit_dim).unwrap();
    for a in &r.abc_entries {
        writeln!(text, "({}, {}, {})-derivations, {:?}: {}", a.alpha, a.beta, a.gamma, a.degree, a.dim).unwrap();
    }
    let exact = r.trivial_max.exact.map_or_else(|| "undecided above".to_string(), |e| format!("exactly {e}"));
    writeln!(text, "trivial subalgebra: {} ({exact}), e.g. {}", r.trivial_max.lower, r.trivial_max.witness).unwrap();
    let lcs: Vec<String> = r.lower_central_series.iter().map(GradedDim::to_string).collect();
    writeln!(text, "lower central series: {}", lcs.join(" > ")).unwrap();
    let mut json = to_value(&r);
    json["name"] = json!(name);
    Ok(Report { ok: true, text, json })
}

fn listed_h2(label: &str) -> Option<usize> {
    let e = cat().get(label).ok()?;
    cat().expected().h2_even.get(&e.label).copied().or(e.expected.h2_dim)
}

fn h2(arg: &str) -> Result<Report, CliError> {
    let (name, g) = resolve(arg)?;
    let h = h2_even(&g);
    let listed = listed_h2(arg);
    let ok = listed.is_none_or(|l| l == h.dim);
    let mut text =
        format!("h2_even({name}) = {} (cocycles {}, coboundaries {})\n", h.dim, h.cocycle_dim, h.coboundary_dim);
    for c in &h.basis {
        writeln!(text, "  {c}").unwrap();
    }
    match listed {
        Some(l) if l == h.dim => writeln!(text, "listed {l}: match").unwrap(),
        Some(l) => writeln!(text, "listed {l}: MISMATCH").unwrap(),
        None => {}
    }
    let basis: Vec<String> = h.basis.iter().map(Cochain2Even::to_string).collect();
    let json = json!({
        "name": name,
        "dim": h.dim,
        "cocycle_dim": h.cocycle_dim,
        "coboundary_dim": h.coboundary_dim,
        "basis": basis,
        "listed": listed,
        "ok": ok,
    });
    Ok(Report { ok, text, json })
}

fn pick_witness(from: &CatalogEntry, to: &CatalogEntry) -> Option<(DegenerationWitness, &'static str)> {
    if let Some(w) = cat().find_witness(&from.label, &to.label) {
        return Some((w.clone(), "builtin"));
    }
    let (m, n) = (from.algebra.m(), from.algebra.n());
    if from.label == to.label {
        return Some((DegenerationWitness::identity(&from.label, m, n), "identity"));
    }
    if to.algebra.is_abelian() && from.algebra.dim() == to.algebra.dim() {
        return Some((DegenerationWitness::scaling(&from.label, &to.label, m, n), "scaling"));
    }
    None
}

fn degenerate(from: &str, to: &str, file: Option<&str>, config: &CliConfig) -> Result<Report, CliError> {
    let (g, h) = (entry(from)?, entry(to)?);
    let (w, source) = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
            let w = DegenerationWitness::from_json(&text)?;
            if cat().get(&w.from)?.label != g.label || cat().get(&w.to)?.label != h.label {
                return Err(CliError::Usage(format!(
                    "witness file is for {} -> {}, not {} -> {}",
                    w.from, w.to, g.label, h.label
                )));
            }
            (w, "file")
        }
        None => match pick_witness(g, h) {
            Some(found) => found,
            None => {
                let text = format!("{} -> {}: no witness available\n", g.label, h.label);
                let json = json!({ "from": g.label, "to": h.label, "verdict": null, "ok": false });
                return Ok(Report { ok: false, text, json });
            }
        },
    };
    let (verdict, used) = verify_adaptive(&g.algebra, &h.algebra, &w, &config.precision, RETRY_ROUNDS)?;
    let ok = verdict.is_verified();
    let mut text = match &verdict {
        Verdict::Verified { .. } => {
            format!("{} -> {}: Verified ({source} witness, precision {used})\n", g.label, h.label)
        }
        Verdict::Failed { failure } => format!("{} -> {}: Failed: {failure}\n", g.label, h.label),
    };
    for (k, v) in &w.basis {
        writeln!(text, "  {k} = {v}").unwrap();
    }
    for (k, alts) in &w.params {
        writeln!(text, "  {k} in {{{}}}", alts.join(", ")).unwrap();
    }
    if w.printed.is_some() {
        writeln!(text, "  (corrected from the printed table row)").unwrap();
    }
    let json = json!({
        "from": g.label,
        "to": h.label,
        "source": source,
        "basis": w.basis,
        "params": w.params,
        "corrected": w.printed.is_some(),
        "precision": used.to_string(),
        "verdict": to_value(&verdict),
        "ok": ok,
    });
    Ok(Report { ok, text, json })
}

fn nondegen(from: &str, to: &str) -> Result<Report, CliError> {
    let (g, h) = (entry(from)?, entry(to)?);
    let (pg, ph) = (Profile::new(&g.label, g.algebra.clone()), Profile::new(&h.label, h.algebra.clone()));
    let certs = auto_nondegen(&pg, &ph, DEFAULT_DEPTH, g.label != h.label, &NonDegConfig::default());
    let ok = !certs.is_empty();
    let mut text = String::new();
    if ok {
        for c in &certs {
            writeln!(text, "{c}").unwrap();
        }
    } else {
        writeln!(text, "{} -> {}: no certificate found", g.label, h.label).unwrap();
    }
    let json = json!({ "from": g.label, "to": h.label, "certificates": to_value(&certs), "ok": ok });
    Ok(Report { ok, text, json })
}

fn hasse_for(m: usize, n: usize, config: &CliConfig) -> Result<HasseDiagram, CliError> {
    Ok(build_hasse(cat(), shape(m, n)?, &config.precision)?)
}

fn failed_witnesses(h: &HasseDiagram) -> Vec<String> {
    h.witnesses
        .iter()
        .filter_map(|w| match &w.verdict {
            Ok(Verdict::Verified { .. }) => None,
            Ok(Verdict::Failed { failure }) => Some(format!("{} -> {} ({}): {failure}", w.from, w.to, w.source)),
            Err(e) => Some(format!("{} -> {} ({}): {e}", w.from, w.to, w.source)),
        })
        .collect()
}

fn hasse(m: usize, n: usize, dot: Option<&str>, config: &CliConfig) -> Result<Report, CliError> {
    let h = hasse_for(m, n, config)?;
    let failed = failed_witnesses(&h);
    let ok = failed.is_empty();
    let mut text = String::new();
    match dot {
        Some("-") => text.push_str(&h.to_dot()),
        Some(path) => {
            std::fs::write(path, h.to_dot()).map_err(|source| CliError::Io { path: path.into(), source })?;
            writeln!(text, "wrote {path}: {} nodes, {} edges", h.nodes.len(), h.edges.len()).unwrap();
        }
        None => {
            let mut nodes: Vec<_> = h.nodes.iter().collect();
            nodes.sort_by_key(|n| std::cmp::Reverse(n.orbit_dim));
            for node in nodes {
                let below: Vec<&str> = h.edges.iter().filter(|e| e.from == node.label).map(|e| e.to.as_str()).collect();
                writeln!(text, "{:<10} orbit {:>2}  -> {}", node.label, node.orbit_dim, below.join(", ")).unwrap();
            }
        }
    }
    if dot != Some("-") {
        for f in &failed {
            writeln!(text, "witness failed: {f}").unwrap();
        }
    } else {
        for f in &failed {
            eprintln!("witness failed: {f}");
        }
    }
    let mut json = to_value(&h);
    json["failed_witnesses"] = json!(failed);
    Ok(Report { ok, text, json })
}

/// `5 components: (2|3)_6, _18, _19, _23, _24`
pub fn component_line(labels: &[String]) -> String {
    let mut sorted: Vec<&String> = labels.iter().collect();
    sorted.sort_by_key(|l| index_of(l));
    let mut parts = Vec::new();
    let mut prefix: Option<&str> = None;
    for l in sorted {
        match (l.rfind('_'), prefix) {
            (Some(k), Some(p)) if &l[..k] == p => parts.push(l[k..].to_string()),
            (k, _) => {
                prefix = k.map(|k| &l[..k]);
                parts.push(l.clone());
            }
        }
    }
    let noun = if labels.len() == 1 { "component" } else { "components" };
    format!("{} {noun}: {}", labels.len(), parts.join(", "))
}

fn index_of(label: &str) -> (String, usize) {
    match label.rsplit_once('_') {
        Some((p, k)) => (p.to_string(), k.parse().unwrap_or(usize::MAX)),
        None => (label.to_string(), 0),
    }
}

fn components_cmd(m: usize, n: usize, config: &CliConfig) -> Result<Report, CliError> {
    let h = hasse_for(m, n, config)?;
    let r = components(&h);
    let mut text = format!("{}\n", component_line(&r.components));
    for c in &r.separations {
        writeln!(text, "  {c}").unwrap();
    }
    for (a, b) in &r.warnings {
        writeln!(text, "warning: no certificate separates {a} from {b}").unwrap();
    }
    Ok(Report { ok: true, text, json: to_value(&r) })
}

fn gamma23(g1: &str, g2: &str) -> Result<Report, CliError> {
    let pair = SymPair::parse_json(g1, g2)?;
    let c = classify_pair(&pair);
    let ok = c.label.is_some();
    let s = &c.signature;
    let mut text = format!("{}\n", c.label.as_deref().unwrap_or("Unknown"));
    writeln!(
        text,
        "  span {} generic rank {} invertible member {}",
        s.span_dim, s.generic_rank, s.has_invertible_member
    )
    .unwrap();
    writeln!(text, "  det multiplicities {:?} drop points {:?}", s.det_multiplicities, s.drop_points).unwrap();
    writeln!(text, "  simultaneously diagonalizable {}", s.simdiag).unwrap();
    Ok(Report { ok, text, json: to_value(&c) })
}

struct Section {
    name: &'static str,
    checked: usize,
    problems: Vec<String>,
    notes: Vec<String>,
}

impl Section {
    fn new(name: &'static str) -> Self {
        Section { name, checked: 0, problems: Vec::new(), notes: Vec::new() }
    }

    fn json(&self) -> Value {
        json!({ "checked": self.checked, "problems": self.problems, "notes": self.notes, "ok": self.problems.is_empty() })
    }
}

fn verify_all(m: usize, n: usize, config: &CliConfig) -> Result<Report, CliError> {
    let dim = shape(m, n)?;
    let key = dim.to_string();
    let entries = cat().list(dim);
    let expected = cat().expected();

    let mut axioms = Section::new("axioms");
    for e in &entries {
        axioms.checked += 1;
        let g = &e.algebra;
        for v in g.check_jacobi().iter().chain(&g.check_j1_j2()) {
            axioms.problems.push(format!("{}: {}", e.label, v.describe(m, n)));
        }
        if !g.is_nilpotent() {
            axioms.problems.push(format!("{} is not nilpotent", e.label));
        }
    }

    let hasse = build_hasse(cat(), dim, &config.precision)?;
    let mut witnesses = Section::new("witnesses");
    witnesses.checked = hasse.witnesses.len();
    witnesses.problems = failed_witnesses(&hasse);

    let mut discrepancies = Section::new("discrepancy report");
    discrepancies.checked = cat().nondegen_for(dim).len();
    let rows = discrepancy_report_with(cat(), dim, Some(&hasse));
    for r in &rows {
        let line = format!("row {} {}: {} -/-> {} cited {}, {:?}", r.row, r.table, r.from, r.to, r.cited, r.status);
        if r.known {
            discrepancies.notes.push(format!("{line} (known)"));
        } else {
            discrepancies.problems.push(line);
        }
    }

    let mut cohomology = Section::new("h2 regression");
    for e in &entries {
        if let Some(&want) = expected.h2_even.get(&e.label) {
            cohomology.checked += 1;
            let got = h2_even(&e.algebra).dim;
            if got != want {
                cohomology.problems.push(format!("{}: computed {got}, listed {want}", e.label));
            }
        }
        if let Some(list) = expected.cocycles.get(&e.label) {
            let g = &e.algebra;
            let parsed: Vec<Cochain2Even> =
                list.iter().map(|t| Cochain2Even::parse(m, n, t)).collect::<Result<_, _>>()?;
            for (t, c) in list.iter().zip(&parsed) {
                cohomology.checked += 1;
                if !is_cocycle(g, c)? {
                    cohomology.problems.push(format!("{}: `{t}` is not a cocycle", e.label));
                }
            }
            let indep = independent_mod_coboundaries(g, &parsed);
            if indep != parsed.len() {
                cohomology.problems.push(format!(
                    "{}: {} listed cocycles, {indep} independent mod coboundaries",
                    e.label,
                    parsed.len()
                ));
            }
        }
    }

    let mut levels = Section::new("orbit levels");
    for e in &entries {
        if let Some(&want) = expected.orbit_levels.get(&e.label) {
            levels.checked += 1;
            let got = hasse.profile(&e.label).map_or_else(|| orbit_dim(&e.algebra), |p| p.orbit_dim());
            if got != want {
                levels.problems.push(format!("{}: computed {got}, listed {want}", e.label));
            }
        }
    }

    let report = components(&hasse);
    let line = component_line(&report.components);
    let mut comps = Section::new("components");
    match expected.components.get(&key) {
        Some(want) => {
            comps.checked = 1;
            let (mut got, mut want) = (report.components.clone(), want.clone());
            got.sort();
            want.sort();
            if got != want {
                comps.problems.push(format!("computed {got:?}, listed {want:?}"));
            }
        }
        None => comps.notes.push("no listed components".into()),
    }
    for (a, b) in &report.warnings {
        comps.notes.push(format!("no certificate separates {a} from {b}"));
    }

    let sections = [axioms, witnesses, discrepancies, cohomology, levels, comps];
    let ok = sections.iter().all(|s| s.problems.is_empty());
    let mut text = format!("verify-all {key}: {} algebras\n", entries.len());
    for s in &sections {
        let status = if s.problems.is_empty() { "ok" } else { "FAILED" };
        writeln!(text, "{}: {} checked, {status}", s.name, s.checked).unwrap();
        for p in &s.problems {
            writeln!(text, "  {p}").unwrap();
        }
        for note in &s.notes {
            writeln!(text, "  note: {note}").unwrap();
        }
    }
    writeln!(text, "{line}").unwrap();
    writeln!(text, "{}", if ok { "all checks match" } else { "verification FAILED" }).unwrap();
    let mut json = json!({
        "shape": key,
        "algebras": entries.len(),
        "components": report.components,
        "component_line": line,
        "discrepancies": to_value(&rows),
        "ok": ok,
    });
    for s in &sections {
        json[s.name.replace(' ', "_")] = s.json();
    }
    Ok(Report { ok, text, json })
}
