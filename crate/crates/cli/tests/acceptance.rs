//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on failure.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestRunner};

use kodaira_cli::commands::{enumerate, examples, realization};
use kodaira_cli::corpus::{Corpus, TABLE4_IDS};
use kodaira_cli::schema::{EnumerationSpec, Problem, TableKind};
use kodaira_core::abelian::FiniteAbelianGroup;
use kodaira_core::enumeration::nonabelian_order;
use kodaira_core::fibration::{free_action_possible, FreeAction};
use kodaira_core::fpf::{enumerate_fpf, exceptional_report, ReferenceStatus};
use kodaira_core::par::Execution;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);

const EXEC: Execution = Execution::Parallel;

fn spec(table: TableKind) -> EnumerationSpec {
    EnumerationSpec { table, sigma_max: None, genus_max: None, genus: None, order: None }
}

fn table_one() -> Outcome {
    let (table, diffs) = enumerate(&spec(TableKind::Graph), true, EXEC).map_err(|e| e.to_string())?;
    if !diffs.is_empty() {
        return Err(diffs.join("; "));
    }
    let mut blocks: BTreeMap<u64, usize> = BTreeMap::new();
    for r in &table.rows {
        *blocks.entry(r[0].parse().map_err(|_| "bad sigma cell")?).or_default() += 1;
    }
    let want = BTreeMap::from([(4, 3), (8, 6), (12, 11), (16, 12)]);
    if table.len() != 32 || blocks != want {
        return Err(format!("{} rows, blocks {:?}", table.len(), blocks));
    }
    Ok("32 rows, blocks 3/6/11/12, identical to the reference".into())
}

fn table_two() -> Outcome {
    let (table, diffs) = enumerate(&spec(TableKind::Sig4), true, EXEC).map_err(|e| e.to_string())?;
    if !diffs.is_empty() || table.len() != 16 {
        return Err(format!("{} rows; {}", table.len(), diffs.join("; ")));
    }
    Ok("16 rows, identical to the reference".into())
}

fn fpf_types() -> Outcome {
    let types = enumerate_fpf(9, EXEC).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = (2..=9).map(|b| types.iter().filter(|t| t.b == b).count()).collect();
    if types.len() != 53 || counts != [1, 2, 4, 6, 5, 12, 9, 14] {
        return Err(format!("{} types, per genus {:?}", types.len(), counts));
    }
    let (_, diffs) = enumerate(&spec(TableKind::Fpf), true, EXEC).map_err(|e| e.to_string())?;
    if !diffs.is_empty() {
        return Err(diffs.join("; "));
    }
    Ok("53 types, per genus 1,2,4,6,5,12,9,14".into())
}

fn nielsen() -> Outcome {
    let report = exceptional_report(9, EXEC).map_err(|e| e.to_string())?;
    let matched = report.iter().filter(|e| e.status == ReferenceStatus::Match).count();
    let flagged: Vec<String> = report
        .iter()
        .filter(|e| e.status.is_flagged())
        .map(|e| e.computed.as_ref().map(|c| c.fpf.to_string()).unwrap_or_default())
        .collect();
    let broken = report
        .iter()
        .filter(|e| matches!(e.status, ReferenceStatus::Mismatch { .. } | ReferenceStatus::Missing { .. }))
        .count();
    if broken > 0 || flagged.len() != 2 || matched == 0 {
        return Err(format!("{} matched, {} flagged, {} mismatched or missing", matched, flagged.len(), broken));
    }
    Ok(format!("{} rows match; flagged: {}", matched, flagged.join(" | ")))
}

fn table_four(corpus: &Corpus) -> Outcome {
    let ids: Vec<String> = TABLE4_IDS.iter().map(|s| s.to_string()).collect();
    let table = examples(corpus, &ids, EXEC).map_err(|(_, e)| e.to_string())?;
    if table.len() != 9 {
        return Err(format!("{} rows", table.len()));
    }
    Ok("9 rows reproduced with their indices and degrees".into())
}

fn cover_homology(corpus: &Corpus) -> Outcome {
    let mut checked = 0;
    for id in ["gv-genus2-order6", "gv-genus3-order4", "gv-sl23"] {
        let file = corpus.get(id).ok_or(format!("{} missing", id))?;
        let Problem::GeneratingVector(s) = &file.problem else { return Err(format!("{}: wrong kind", id)) };
        let gv = s.build().map_err(|e| e.to_string())?;
        let bad = support::nielsen_mismatches(&gv);
        if !bad.is_empty() {
            return Err(format!("{}: {}", id, bad.join("; ")));
        }
        checked += gv.group.order() - 1;
    }
    let mut indices = Vec::new();
    for (id, want) in [
        ("free-auto-genus2-order6", 16),
        ("free-auto-genus3-order4", 16),
        ("sl23-genus2", 9),
        ("four-disjoint-graphs", 2),
    ] {
        for variant in [id.to_string(), format!("{}-recomputed", id)] {
            let file = corpus.get(&variant).ok_or(format!("{} missing", variant))?;
            let r = realization(file).map_err(|e| format!("{}: {}", variant, e))?;
            if r.stabilizer_index != BigInt::from(want) {
                return Err(format!("{}: index {}", variant, r.stabilizer_index));
            }
        }
        indices.push(want.to_string());
    }
    Ok(format!("{} element charpolys agree with the Nielsen formula; recomputed indices {}", checked, indices.join(", ")))
}

fn prop<S: Strategy>(name: &str, cases: u32, s: S, check: impl Fn(&S::Value) -> support::Check) -> Outcome {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&s, |v| check(&v)).map_err(|e| format!("{}: {}", name, e))?;
    Ok(format!("{} {}", cases, name))
}

fn properties(corpus: &Corpus) -> Outcome {
    let mut done = vec![
        prop("snf", 1000, support::matrix(6, 50), support::check_snf)?,
        prop("charpoly", 300, support::square(5, 9), support::check_char_poly)?,
        prop("image", 300, support::modular_maps(), |m| support::check_image(m))?,
        prop("fixed-set", 200, support::problem(), support::check_fixed_set)?,
        prop("idempotence", 200, support::problem(), support::check_realization)?,
        prop("double-etale", 500, support::double_etale(), support::check_double_etale)?,
    ];
    let mut realized = 0;
    for (id, file) in &corpus.entries {
        let sigma = match &file.problem {
            Problem::Monodromy(_) => realization(file).map_err(|e| e.to_string())?.realized.sigma,
            Problem::VirtualFibration(s) => match s.pullback_degree {
                Some(deg) => {
                    let vf = s.build().map_err(|e| e.to_string())?;
                    vf.realized_invariants(deg).map_err(|e| e.to_string())?.sigma
                }
                None => continue,
            },
            _ => continue,
        };
        if &sigma % 4 != BigInt::from(0) {
            return Err(format!("{}: realized signature {}", id, sigma));
        }
        realized += 1;
    }
    done.push(format!("{} realized signatures divisible by 4", realized));
    Ok(done.join(", "))
}

fn feasibility() -> Outcome {
    let v4 = FiniteAbelianGroup::new(vec![2, 2]).map_err(|e| e.to_string())?;
    let cases = [
        (free_action_possible(5, 8, None), FreeAction::Impossible),
        (free_action_possible(2, 2, None), FreeAction::Impossible),
        (free_action_possible(5, 4, Some(&v4)), FreeAction::ExistsAbelian { quotient_genus: 2 }),
    ];
    for (got, want) in cases {
        if got != want {
            return Err(format!("{:?} instead of {:?}", got, want));
        }
    }
    let bad = support::feasibility_disagreements(16);
    if !bad.is_empty() {
        return Err(format!("abelian feasibility differs on {}", bad.join(", ")));
    }
    for n in 2..=32 {
        if nonabelian_order(n).map_err(|e| e.to_string())? == support::only_abelian(n) {
            return Err(format!("non-abelian order test wrong for {}", n));
        }
    }
    Ok("free actions as expected; feasibility agrees with exhaustive search for d <= 16".into())
}

fn main() {
    let corpus = Corpus::bundled().expect("bundled corpus");
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria: Vec<Criterion> = vec![
        ("graph-type table", secs(1), Box::new(table_one)),
        ("signature 4 table", secs(1), Box::new(table_two)),
        ("fixed-point-free types", secs(10), Box::new(fpf_types)),
        ("Nielsen classes", None, Box::new(nielsen)),
        ("realized examples", secs(1), Box::new(|| table_four(&corpus))),
        ("cover homology", secs(5), Box::new(|| cover_homology(&corpus))),
        ("property suites", None, Box::new(|| properties(&corpus))),
        ("feasibility", None, Box::new(feasibility)),
    ];
    let mut failed = 0;
    for (n, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(_), Some(l)) = (&outcome, limit) {
            if took > *l {
                outcome = Err(format!("took {:.2?}, limit {:?}", took, l));
            }
        }
        let limit_text = limit.map(|l| format!(", limit {:?}", l)).unwrap_or_default();
        match outcome {
            Ok(msg) => println!("PASS {} {}: {} ({:.2?}{})", n + 1, name, msg, took, limit_text),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {}: {} ({:.2?}{})", n + 1, name, msg, took, limit_text);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
