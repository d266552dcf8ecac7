//! Subcommand bodies. Each appends its rendering to `out` and fails with the
//! error that decides the exit code; output produced before a golden
//! mismatch is kept so the table and the diff can both be shown.

use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Value};

use kodaira_core::enumeration::{
    diff_rows, enumerate_graph_rows, enumerate_sig4_rows, graph_reference, sig4_reference, GraphTypeRow, SigFourRow,
};
use kodaira_core::fibration::{format_rational, InvariantRow};
use kodaira_core::fpf::{
    config_classes, enumerate_fpf, exceptional_report, fpf_reference, FpfType, NielsenClass, ReferenceStatus,
};
use kodaira_core::golden::{self, format_list};
use kodaira_core::group::FiniteGroupModel;
use kodaira_core::linalg::char_poly;
use kodaira_core::monodromy::RealizationReport;
use kodaira_core::par::Execution;
use kodaira_core::surface::{nielsen_charpoly, CoverHomology};

use crate::corpus::{Corpus, TABLE4_IDS};
use crate::output::{json_int, key_values, row_json, Format, Table};
use crate::schema::{parse_element, EnumerationSpec, Expected, Problem, ProblemFile, TableKind};
use crate::Failure;

fn invariant<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Invariant(e.to_string())
}

fn emit_object(out: &mut String, v: &Value, format: Format, csv: &Table) {
    match format {
        Format::Json => out.push_str(&crate::schema::canonical_json(v)),
        Format::Table => out.push_str(&key_values(v)),
        Format::Csv => out.push_str(&csv.to_csv()),
    }
}

fn wrong_kind(expected: &str, file: &ProblemFile) -> Failure {
    Failure::Schema(format!("expected a {} file, got {:?}", expected, file.problem.kind()))
}

pub fn invariants(file: &ProblemFile, format: Format, out: &mut String) -> Result<(), Failure> {
    let (vf, degree) = match &file.problem {
        Problem::VirtualFibration(s) => (s.build()?, s.pullback_degree),
        Problem::Monodromy(s) => (s.build()?.fibration().clone(), None),
        _ => return Err(wrong_kind("virtual-fibration or monodromy-problem", file)),
    };
    let inv = vf.virtual_invariants();
    let mut v = json!({
        "c2": format_rational(&inv.c2),
        "c1_sq": format_rational(&inv.c1_sq),
        "sigma": format_rational(&inv.sigma),
        "slope": format_rational(&inv.slope),
        "sigma_integral": inv.sigma_is_integral(),
    });
    if vf.etale_both_ways {
        v["component_genera"] = json!(vf.component_genera());
    }
    let mut csv = Table::new(["c2", "c1_sq", "sigma", "slope"]);
    csv.push(
        vec![
            format_rational(&inv.c2),
            format_rational(&inv.c1_sq),
            format_rational(&inv.sigma),
            format_rational(&inv.slope),
        ],
        Value::Null,
    );
    if let Some(deg) = degree {
        let row = vf.realized_invariants(deg).map_err(invariant)?;
        v["pullback_degree"] = json!(deg);
        v["realized"] = row_json(&row);
    }
    emit_object(out, &v, format, &csv);
    if let Some(want) = file.expected().and_then(|e| e.sigma.as_ref()) {
        let got = format_rational(&inv.sigma);
        if &got != want {
            return Err(Failure::Golden(format!("sigma: expected {}, got {}", want, got)));
        }
    }
    Ok(())
}

pub fn realization(file: &ProblemFile) -> Result<RealizationReport, Failure> {
    match &file.problem {
        Problem::Monodromy(s) => s.build()?.realize().map_err(invariant),
        _ => Err(wrong_kind("monodromy-problem", file)),
    }
}

fn report_json(id: Option<&str>, r: &RealizationReport) -> Value {
    json!({
        "id": id,
        "obstruction": r.obstruction.to_string(),
        "obstruction_order": r.obstruction_order,
        "stabilizer_index": json_int(&r.stabilizer_index),
        "minimal_degree": json_int(&r.minimal_degree),
        "row": row_json(&r.realized),
    })
}

/// Differences between a report and the expectations of a corpus entry.
pub fn check_expected(r: &RealizationReport, e: &Expected) -> Vec<String> {
    let mut diffs = Vec::new();
    if let Some(i) = e.stabilizer_index {
        if r.stabilizer_index != BigInt::from(i) {
            diffs.push(format!("stabilizer index: expected {}, got {}", i, r.stabilizer_index));
        }
    }
    if let Some(d) = e.minimal_degree {
        if r.minimal_degree != BigInt::from(d) {
            diffs.push(format!("minimal degree: expected {}, got {}", d, r.minimal_degree));
        }
    }
    if let Some(row) = &e.row {
        if row.cells() != r.realized.cells() {
            diffs.push(format!("row: expected ({}), got {}", row.cells().join(", "), r.realized));
        }
    }
    diffs
}

fn row_header() -> Vec<String> {
    InvariantRow::HEADER.iter().map(|s| s.to_string()).collect()
}

pub fn realize(file: &ProblemFile, format: Format, out: &mut String) -> Result<(), Failure> {
    let r = realization(file)?;
    let mut header = vec!["stabilizer_index".to_string(), "minimal_degree".to_string()];
    header.extend(row_header());
    let mut csv = Table::new(header);
    let mut cells = vec![r.stabilizer_index.to_string(), r.minimal_degree.to_string()];
    cells.extend(r.realized.cells());
    csv.push(cells, Value::Null);
    emit_object(out, &report_json(file.id(), &r), format, &csv);
    if let Some(e) = file.expected() {
        let diffs = check_expected(&r, e);
        if !diffs.is_empty() {
            return Err(Failure::Golden(diffs.join("\n")));
        }
    }
    Ok(())
}

/// Runs every monodromy problem of the corpus and compares with the expected
/// values and, for the nine table examples, with the bundled invariant table.
pub fn examples(corpus: &Corpus, ids: &[String], exec: Execution) -> Result<Table, (Table, Failure)> {
    let files: Vec<&ProblemFile> = if ids.is_empty() {
        let mut v: Vec<&ProblemFile> = corpus.monodromy_problems().collect();
        let rank = |f: &ProblemFile| TABLE4_IDS.iter().position(|id| f.id() == Some(id)).unwrap_or(TABLE4_IDS.len());
        v.sort_by_key(|f| rank(f));
        v
    } else {
        let mut v = Vec::new();
        for id in ids {
            match corpus.get(id) {
                Some(f) => v.push(f),
                None => return Err((Table::default(), Failure::Io(format!("{}: no such corpus entry", id)))),
            }
        }
        v
    };
    let reference = table4_reference().map_err(|e| (Table::default(), e))?;
    let results = exec.map(&files, |f| (f.id().unwrap_or("-").to_string(), realization(f), f.expected().cloned()));
    let mut header = vec!["id".to_string(), "index".to_string(), "degree".to_string()];
    header.extend(row_header());
    header.push("status".into());
    let mut table = Table::new(header);
    let mut problems = Vec::new();
    for (id, res, expected) in results {
        match res {
            Ok(r) => {
                let mut diffs = expected.map(|e| check_expected(&r, &e)).unwrap_or_default();
                if let Some(cells) = reference.iter().find(|(rid, _)| rid == &id).map(|(_, c)| c) {
                    let mut got = r.realized.cells().to_vec();
                    got.extend([r.stabilizer_index.to_string(), r.minimal_degree.to_string()]);
                    if &got != cells {
                        diffs.push(format!("bundled table: expected {:?}, got {:?}", cells, got));
                    }
                }
                let status = if diffs.is_empty() { "match" } else { "MISMATCH" };
                let mut cells = vec![id.clone(), r.stabilizer_index.to_string(), r.minimal_degree.to_string()];
                cells.extend(r.realized.cells());
                cells.push(status.into());
                let mut rec = report_json(Some(&id), &r);
                rec["status"] = json!(status);
                table.push(cells, rec);
                problems.extend(diffs.into_iter().map(|d| format!("{}: {}", id, d)));
            }
            Err(e) => {
                let mut cells = vec![id.clone()];
                cells.extend(std::iter::repeat_n("-".to_string(), 10));
                cells.push("ERROR".into());
                table.push(cells, json!({"id": id, "error": e.to_string()}));
                problems.push(format!("{}: {}", id, e));
            }
        }
    }
    if ids.is_empty() {
        for id in TABLE4_IDS {
            if corpus.get(id).is_none() {
                problems.push(format!("{}: missing from the corpus", id));
            }
        }
    }
    if problems.is_empty() {
        Ok(table)
    } else {
        Err((table, Failure::Golden(problems.join("\n"))))
    }
}

/// Bundled invariant table: id → the eight row cells, index and degree.
fn table4_reference() -> Result<Vec<(String, Vec<String>)>, Failure> {
    let (_, recs) = golden::records(golden::TABLE4_CSV).map_err(|e| Failure::Schema(e.to_string()))?;
    Ok(recs.into_iter().map(|r| (r[0].clone(), r[1..].to_vec())).collect())
}

pub fn cover_action(
    file: &ProblemFile,
    extra_elements: &[String],
    format: Format,
    out: &mut String,
) -> Result<(), Failure> {
    let spec = match &file.problem {
        Problem::GeneratingVector(s) => s,
        _ => return Err(wrong_kind("generating-vector", file)),
    };
    let gv = spec.build()?;
    let report = gv.validate();
    if !report.is_valid() {
        let issues: Vec<String> = report.issues.iter().map(|i| i.to_string()).collect();
        return Err(Failure::Invariant(issues.join("; ")));
    }
    let h = CoverHomology::new(&gv).map_err(invariant)?;
    let labels: Vec<&String> = if extra_elements.is_empty() { spec.elements.iter().collect() } else { extra_elements.iter().collect() };
    let mut elements = Vec::new();
    let mut csv = Table::new(["element", "charpoly"]);
    for label in labels {
        let k = parse_element(&gv.group, label)?;
        let m = h.action(k).map_err(invariant)?;
        let p = char_poly(&m).map_err(invariant)?.to_string();
        let rows: Vec<Value> = m.to_rows().iter().map(|r| Value::Array(r.iter().map(json_int).collect())).collect();
        csv.push(vec![label.clone(), p.clone()], Value::Null);
        elements.push(json!({"element": label, "matrix": rows, "charpoly": p}));
    }
    let mut v = json!({"cover_genus": h.genus(), "elements": elements});
    let mut verdict_failed = None;
    let mut generator_poly = None;
    if let FiniteGroupModel::Abelian(g) = &gv.group {
        if g.rank() == 1 {
            let d = g.order() as u32;
            let expected = nielsen_charpoly(spec.q, d, &spec.periods).map_err(invariant)?;
            let gen = parse_element(&gv.group, "1")?;
            let actual = char_poly(&h.action(gen).map_err(invariant)?).map_err(invariant)?;
            let pass = actual == expected;
            v["nielsen"] = json!({
                "formula": expected.to_string(),
                "generator_charpoly": actual.to_string(),
                "verdict": if pass { "PASS" } else { "FAIL" },
            });
            if !pass {
                verdict_failed = Some(format!("charpoly {} differs from the Nielsen formula {}", actual, expected));
            }
            generator_poly = Some(actual.to_string());
        }
    }
    match format {
        Format::Table => {
            out.push_str(&format!("cover genus: {}\n", h.genus()));
            for e in v["elements"].as_array().into_iter().flatten() {
                out.push_str(&format!("element {}:\n", e["element"].as_str().unwrap_or("")));
                for r in e["matrix"].as_array().into_iter().flatten() {
                    let cells: Vec<String> = r.as_array().into_iter().flatten().map(|x| format!("{:>4}", x.to_string())).collect();
                    out.push_str(&format!("  [{} ]\n", cells.join("")));
                }
                out.push_str(&format!("  charpoly: {}\n", e["charpoly"].as_str().unwrap_or("")));
            }
            if let Some(n) = v.get("nielsen") {
                out.push_str(&format!(
                    "Nielsen formula: {} ({})\n",
                    n["formula"].as_str().unwrap_or(""),
                    n["verdict"].as_str().unwrap_or("")
                ));
            }
        }
        _ => emit_object(out, &v, format, &csv),
    }
    if let Some(msg) = verdict_failed {
        return Err(Failure::Invariant(msg));
    }
    if let (Some(want), Some(got)) = (file.expected().and_then(|e| e.charpoly.as_ref()), generator_poly) {
        if want != &got {
            return Err(Failure::Golden(format!("charpoly: expected {}, got {}", want, got)));
        }
    }
    Ok(())
}

fn graph_table(rows: &[GraphTypeRow]) -> Table {
    let mut t = Table::new(["sigma", "b", "order", "r", "annotation", "flags"]);
    for r in rows {
        let flags = if r.unbounded_graph_count { "unbounded-graph-count" } else { "" };
        t.push(
            vec![
                r.sigma.to_string(),
                r.b.to_string(),
                r.d.to_string(),
                format_list(&r.r),
                r.annotation.to_string(),
                flags.to_string(),
            ],
            json!({
                "sigma": r.sigma,
                "b": r.b,
                "order": r.d,
                "r": r.r,
                "annotation": r.annotation.to_string(),
                "unbounded_graph_count": r.unbounded_graph_count,
            }),
        );
    }
    t
}

fn sig4_table(rows: &[SigFourRow]) -> Table {
    let mut t = Table::new(["label", "b", "f", "order", "components", "realisable"]);
    for r in rows {
        let comps: Vec<String> = r.components.iter().map(|(g, d, e)| format!("{}:{}:{}", g, d, e)).collect();
        t.push(
            vec![
                r.label.clone().unwrap_or_else(|| "-".into()),
                r.b.to_string(),
                r.f.to_string(),
                r.order.to_string(),
                comps.join(" "),
                r.realisable.clone().unwrap_or_default(),
            ],
            json!({
                "label": r.label,
                "b": r.b,
                "f": r.f,
                "order": r.order,
                "components": r.components.iter().map(|(g, d, e)| json!({"genus": g, "d": d, "e": e})).collect::<Vec<_>>(),
                "realisable": r.realisable,
            }),
        );
    }
    t
}

fn fpf_table(types: &[FpfType]) -> Table {
    let mut t = Table::new(["genus", "order", "q", "periods"]);
    for ty in types {
        t.push(
            vec![ty.b.to_string(), ty.d.to_string(), ty.q.to_string(), ty.periods_label()],
            json!({"genus": ty.b, "order": ty.d, "q": ty.q, "periods": ty.periods}),
        );
    }
    t
}

fn orbit_text(orbits: &[Vec<NielsenClass>]) -> String {
    orbits
        .iter()
        .map(|o| o.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ~ "))
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn orbit_json(orbits: &[Vec<NielsenClass>]) -> Value {
    json!(orbits.iter().map(|o| o.iter().map(|c| c.entries.clone()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub const DEFAULT_SIGMA_MAX: u64 = 16;
pub const DEFAULT_GENUS_MAX: u64 = 9;

/// Computes the requested table. With `check_golden` the table is compared
/// against the bundled reference and mismatches are returned as the second
/// component.
pub fn enumerate(spec: &EnumerationSpec, check_golden: bool, exec: Execution) -> Result<(Table, Vec<String>), Failure> {
    let mut diffs = Vec::new();
    let table = match spec.table {
        TableKind::Graph => {
            let sigma_max = spec.sigma_max.unwrap_or(DEFAULT_SIGMA_MAX);
            let rows = enumerate_graph_rows(sigma_max, exec).map_err(invariant)?;
            if check_golden {
                let reference: Vec<GraphTypeRow> =
                    graph_reference().map_err(invariant)?.into_iter().filter(|r| r.sigma <= sigma_max).collect();
                diffs = diff_rows(&reference, &rows);
            }
            graph_table(&rows)
        }
        TableKind::Sig4 => {
            let rows = enumerate_sig4_rows(exec).map_err(invariant)?;
            if check_golden {
                diffs = diff_rows(&sig4_reference().map_err(invariant)?, &rows);
            }
            sig4_table(&rows)
        }
        TableKind::Fpf => {
            let genus_max = spec.genus_max.unwrap_or(DEFAULT_GENUS_MAX);
            let types = enumerate_fpf(genus_max, exec).map_err(invariant)?;
            if check_golden {
                let reference: Vec<FpfType> =
                    fpf_reference().map_err(invariant)?.into_iter().filter(|t| t.b <= genus_max).collect();
                let mine: BTreeSet<&FpfType> = types.iter().collect();
                let theirs: BTreeSet<&FpfType> = reference.iter().collect();
                diffs.extend(theirs.difference(&mine).map(|t| format!("- {}", t)));
                diffs.extend(mine.difference(&theirs).map(|t| format!("+ {}", t)));
            }
            fpf_table(&types)
        }
        TableKind::Nielsen => nielsen_table(spec, check_golden, exec, &mut diffs)?,
    };
    Ok((table, diffs))
}

fn nielsen_table(spec: &EnumerationSpec, check_golden: bool, exec: Execution, diffs: &mut Vec<String>) -> Result<Table, Failure> {
    let genus_max = spec.genus.or(spec.genus_max).unwrap_or(DEFAULT_GENUS_MAX);
    let types: Vec<FpfType> = enumerate_fpf(genus_max, exec)
        .map_err(invariant)?
        .into_iter()
        .filter(|t| spec.genus.is_none_or(|g| t.b == g) && spec.order.is_none_or(|d| t.d == d))
        .collect();
    let report = if check_golden { exceptional_report(genus_max, exec).map_err(invariant)? } else { Vec::new() };
    let orbits = exec.map(&types, config_classes);
    let mut t = Table::new(["genus", "order", "q", "periods", "classes", "orbits", "status"]);
    for (ty, orbits) in types.iter().zip(&orbits) {
        let count: usize = orbits.iter().map(Vec::len).sum();
        let status = report
            .iter()
            .find(|e| e.computed.as_ref().is_some_and(|c| &c.fpf == ty))
            .map(|e| e.status.label())
            .unwrap_or(if check_golden { "unique" } else { "" });
        t.push(
            vec![
                ty.b.to_string(),
                ty.d.to_string(),
                ty.q.to_string(),
                ty.periods_label(),
                count.to_string(),
                orbit_text(orbits),
                status.to_string(),
            ],
            json!({
                "genus": ty.b,
                "order": ty.d,
                "q": ty.q,
                "periods": ty.periods,
                "classes": count,
                "orbits": orbit_json(orbits),
                "status": status,
            }),
        );
    }
    for e in &report {
        let scope = |b: u64, d: Option<u64>| {
            spec.genus.is_none_or(|g| g == b) && spec.order.is_none_or(|o| d.is_none_or(|d| d == o))
        };
        match &e.status {
            ReferenceStatus::Mismatch { reference } if scope(reference.genus, reference.fpf.as_ref().map(|f| f.d)) => {
                diffs.push(format!("{}: reference {:?}", e.computed.as_ref().map(|c| c.fpf.to_string()).unwrap_or_default(), reference.orbits))
            }
            ReferenceStatus::Missing { reference } if scope(reference.genus, reference.fpf.as_ref().map(|f| f.d)) => {
                diffs.push(format!("reference row without a computed type: genus {} {:?}", reference.genus, reference.orbits))
            }
            _ => {}
        }
    }
    Ok(t)
}

pub fn table_name(spec: &EnumerationSpec) -> &'static str {
    match spec.table {
        TableKind::Graph => "graph",
        TableKind::Sig4 => "sig4",
        TableKind::Fpf => "fpf",
        TableKind::Nielsen => "nielsen",
    }
}

/// Writes the table files and renders the table; fails after rendering when
/// the golden comparison found differences.
pub fn run_enumeration(
    spec: &EnumerationSpec,
    check_golden: bool,
    out_dir: Option<&Path>,
    format: Format,
    exec: Execution,
    out: &mut String,
) -> Result<(), Failure> {
    let (table, diffs) = enumerate(spec, check_golden, exec)?;
    if let Some(dir) = out_dir {
        table.write_files(dir, table_name(spec))?;
    }
    out.push_str(&table.render(format));
    if format == Format::Table {
        out.push_str(&format!("{} rows\n", table.len()));
    }
    if !diffs.is_empty() {
        return Err(Failure::Golden(diffs.join("\n")));
    }
    Ok(())
}

pub fn list(corpus: &Corpus, format: Format) -> String {
    let mut t = Table::new(["id", "kind", "description"]);
    for (name, f) in &corpus.entries {
        let id = f.id().unwrap_or(name);
        let kind = serde_json::to_value(f.problem.kind()).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let desc = f.corpus.as_ref().map(|c| c.description.clone()).unwrap_or_default();
        t.push(vec![id.to_string(), kind.clone(), desc.clone()], json!({"id": id, "kind": kind, "description": desc}));
    }
    t.render(format)
}
