//! Fixed-point-free automorphisms of curves: ramification types, Nielsen
//! classes of the branch data, and configurations of two disjoint graphs.
//!
//! An automorphism `φ` of order `d` on a genus `b` curve with quotient of
//! genus `q` is encoded by a generating vector of `ℤ/d` on the orbifold
//! group of signature `(q | r₁..rₘ)` sending `φ` to `1`. The elliptic images
//! `aᵢ` have order `rᵢ`, and `φ` has no fixed point exactly when no `aᵢ`
//! generates `ℤ/d`.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::abelian::{is_prime, FiniteAbelianGroup};
use crate::error::{Error, Result};
use crate::golden;
use crate::group::FiniteGroupModel;
use crate::par::Execution;
use crate::surface::{GeneratingVector, OrbifoldSignature};

pub const MAX_GENUS: u64 = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpfType {
    pub b: u64,
    pub d: u64,
    pub q: u64,
    /// Ascending; empty for free actions.
    pub periods: Vec<u64>,
}

impl FpfType {
    pub fn new(b: u64, d: u64, q: u64, mut periods: Vec<u64>) -> Result<Self> {
        periods.sort_unstable();
        let t = FpfType { b, d, q, periods };
        if d < 2 || !t.hurwitz_holds() {
            return Err(Error::NonIntegralGenus(format!("{} violates Riemann-Hurwitz", t)));
        }
        if let Some(r) = t.periods.iter().find(|&&r| r < 2 || r >= d || !d.is_multiple_of(r)) {
            return Err(Error::InvalidGeneratingVector(format!(
                "period {} is not a proper divisor of {}",
                r, d
            )));
        }
        Ok(t)
    }

    pub fn is_unramified(&self) -> bool {
        self.periods.is_empty()
    }

    /// `2b − 2 = d(2q − 2 + Σ(1 − 1/rᵢ))`, cleared of denominators.
    pub fn hurwitz_holds(&self) -> bool {
        let (b, d, q) = (self.b as i128, self.d as i128, self.q as i128);
        let m = self.periods.len() as i128;
        let branch: i128 = self.periods.iter().map(|&r| d / r as i128).sum();
        self.periods.iter().all(|&r| self.d.is_multiple_of(r)) && 2 * b - 2 == d * (2 * q - 2 + m) - branch
    }

    pub fn signature(&self) -> OrbifoldSignature {
        OrbifoldSignature::new(self.q as u32, self.periods.iter().map(|&r| r as u32).collect())
            .expect("periods are at least 2")
    }

    pub fn periods_label(&self) -> String {
        golden::format_list(&self.periods)
    }
}

impl fmt::Display for FpfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.periods.iter().map(u64::to_string).collect();
        let p = if p.is_empty() { "-".to_string() } else { p.join(",") };
        write!(f, "genus {}, order {}, ({}|{})", self.b, self.d, self.q, p)
    }
}

/// Elliptic images `aᵢ ∈ ℤ/d`, listed in the period order of the type and
/// ascending within each period. Two classes are equal as multisets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NielsenClass {
    pub d: u64,
    pub entries: Vec<u64>,
}

impl NielsenClass {
    pub fn multiset(&self) -> Vec<u64> {
        let mut v = self.entries.clone();
        v.sort_unstable();
        v
    }

    /// Image under `a ↦ −a`, entry by entry.
    pub fn negated(&self) -> NielsenClass {
        NielsenClass {
            d: self.d,
            entries: self.entries.iter().map(|&a| (self.d - a) % self.d).collect(),
        }
    }

    fn canonical(&self, t: &FpfType) -> NielsenClass {
        let mut entries = Vec::with_capacity(self.entries.len());
        let mut start = 0;
        while start < t.periods.len() {
            let r = t.periods[start];
            let end = start + t.periods[start..].iter().take_while(|&&x| x == r).count();
            let mut block: Vec<u64> = self.entries[start..end].to_vec();
            block.sort_unstable();
            entries.extend(block);
            start = end;
        }
        NielsenClass { d: self.d, entries }
    }

    /// Generating vector sending `α₁` to `1`, the other hyperbolic generators
    /// to `0` and `γᵢ` to `aᵢ`.
    pub fn generating_vector(&self, t: &FpfType) -> GeneratingVector {
        let g = FiniteAbelianGroup::cyclic(t.d).expect("order at least 2");
        let mut images = vec![0usize; 2 * t.q as usize];
        if t.q > 0 {
            images[0] = 1;
        }
        images.extend(self.entries.iter().map(|&a| a as usize));
        GeneratingVector::new(t.signature(), FiniteGroupModel::Abelian(g), images)
    }
}

impl fmt::Display for NielsenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", golden::format_list(&self.entries))
    }
}

fn divisor_multisets(divisors: &[u64], budget: u64, d: u64) -> Vec<Vec<u64>> {
    // each period r costs d − d/r against the budget
    fn go(divs: &[u64], start: usize, left: u64, d: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..divs.len() {
            let cost = d - d / divs[i];
            if cost <= left {
                cur.push(divs[i]);
                go(divs, i, left - cost, d, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(divisors, 0, budget, d, &mut Vec::new(), &mut out);
    out
}

fn types_for(d: u64, b_max: u64) -> Vec<FpfType> {
    let divisors: Vec<u64> = (2..d).filter(|r| d.is_multiple_of(*r)).collect();
    let mut out = Vec::new();
    for b in 2..=b_max {
        // 2b − 2 = d(2q − 2) + Σ(d − d/rᵢ)
        let mut q: u64 = 0;
        while d * (2 * q).saturating_sub(2) <= 2 * b - 2 {
            let base = d as i64 * (2 * q as i64 - 2);
            let budget = 2 * b as i64 - 2 - base;
            if budget == 0 && q >= 2 {
                out.push(FpfType { b, d, q, periods: Vec::new() });
            } else if budget > 0 {
                for periods in divisor_multisets(&divisors, budget as u64, d) {
                    let t = FpfType { b, d, q, periods };
                    if !nielsen_classes(&t).is_empty() {
                        out.push(t);
                    }
                }
            }
            q += 1;
        }
    }
    out
}

/// Ramification types of fixed-point-free automorphisms on curves of genus
/// `2..=b_max`. The search runs over orders `d ≤ 4·b_max + 2`.
pub fn enumerate_fpf(b_max: u64, exec: Execution) -> Result<Vec<FpfType>> {
    if !(2..=MAX_GENUS).contains(&b_max) {
        return Err(Error::OutOfRange(format!("genus bound {} outside 2..={}", b_max, MAX_GENUS)));
    }
    let orders: Vec<u64> = (2..=4 * b_max + 2).collect();
    let mut types = exec.flat_map(&orders, |&d| types_for(d, b_max));
    types.sort_by(|x, y| {
        (x.b, Reverse(x.q), x.periods.len(), x.d, &x.periods).cmp(&(y.b, Reverse(y.q), y.periods.len(), y.d, &y.periods))
    });
    types.dedup();
    for t in &types {
        if !t.is_unramified() && is_prime(t.d) {
            return Err(Error::Group(format!("ramified type with prime order: {}", t)));
        }
    }
    Ok(types)
}

fn choose_block(candidates: &[u64], k: usize, start: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..candidates.len() {
        cur.push(candidates[i]);
        choose_block(candidates, k, i, cur, out);
        cur.pop();
    }
}

/// All multisets of elliptic images compatible with the type.
pub fn nielsen_classes(t: &FpfType) -> Vec<NielsenClass> {
    if t.is_unramified() {
        return vec![NielsenClass { d: t.d, entries: Vec::new() }];
    }
    let d = t.d;
    let mut blocks: Vec<Vec<Vec<u64>>> = Vec::new();
    let mut start = 0;
    while start < t.periods.len() {
        let r = t.periods[start];
        let k = t.periods[start..].iter().take_while(|&&x| x == r).count();
        let of_order: Vec<u64> = (1..d).filter(|a| d / a.gcd(&d) == r).collect();
        let mut choices = Vec::new();
        choose_block(&of_order, k, 0, &mut Vec::new(), &mut choices);
        blocks.push(choices);
        start += k;
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    product(&blocks, 0, &mut cur, &mut |entries: &[u64]| {
        if entries.iter().sum::<u64>() % d != 0 {
            return;
        }
        let generated = entries.iter().fold(d, |g, &a| g.gcd(&a)) == 1;
        if t.q == 0 && !generated {
            return;
        }
        out.push(NielsenClass { d, entries: entries.to_vec() });
    });
    out.sort();
    out
}

fn product(blocks: &[Vec<Vec<u64>>], i: usize, cur: &mut Vec<u64>, f: &mut dyn FnMut(&[u64])) {
    if i == blocks.len() {
        f(cur);
        return;
    }
    for choice in &blocks[i] {
        let n = cur.len();
        cur.extend(choice);
        product(blocks, i + 1, cur, f);
        cur.truncate(n);
    }
}

/// Nielsen classes grouped into orbits of the negation involution.
pub fn config_classes(t: &FpfType) -> Vec<Vec<NielsenClass>> {
    let classes = nielsen_classes(t);
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for c in &classes {
        if seen.contains(&c.multiset()) {
            continue;
        }
        let neg = c.negated().canonical(t);
        seen.insert(c.multiset());
        let mut orbit = vec![c.clone()];
        if seen.insert(neg.multiset()) {
            orbit.push(neg);
        }
        orbits.push(orbit);
    }
    orbits
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalType {
    #[serde(rename = "type")]
    pub fpf: FpfType,
    pub orbits: Vec<Vec<NielsenClass>>,
}

impl ExceptionalType {
    pub fn class_count(&self) -> usize {
        self.orbits.iter().map(Vec::len).sum()
    }

    fn orbit_sets(&self) -> BTreeSet<BTreeSet<Vec<u64>>> {
        self.orbits.iter().map(|o| o.iter().map(NielsenClass::multiset).collect()).collect()
    }
}

/// Types realised by more than one Nielsen class.
pub fn exceptional_types(b_max: u64, exec: Execution) -> Result<Vec<ExceptionalType>> {
    let types = enumerate_fpf(b_max, exec)?;
    let found = exec.map(&types, |t| {
        let orbits = config_classes(t);
        (orbits.iter().map(Vec::len).sum::<usize>() > 1).then(|| ExceptionalType { fpf: t.clone(), orbits })
    });
    Ok(found.into_iter().flatten().collect())
}

/// A row of the bundled exceptional table. The type is absent for a printed
/// equivalence that has no ramification type of its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceRow {
    pub genus: u64,
    pub fpf: Option<FpfType>,
    pub orbits: Vec<Vec<Vec<u64>>>,
    pub note: String,
}

impl ReferenceRow {
    fn orbit_sets(&self) -> BTreeSet<BTreeSet<Vec<u64>>> {
        self.orbits
            .iter()
            .map(|o| {
                o.iter()
                    .map(|c| {
                        let mut c = c.clone();
                        c.sort_unstable();
                        c
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn fpf_reference() -> Result<Vec<FpfType>> {
    let (_, recs) = golden::records(golden::FPF_TYPES_CSV)?;
    recs.iter()
        .map(|r| {
            FpfType::new(
                golden::parse_u64(&r[0])?,
                golden::parse_u64(&r[1])?,
                golden::parse_u64(&r[2])?,
                golden::parse_list(&r[3])?,
            )
        })
        .collect()
}

pub fn nielsen_reference() -> Result<Vec<ReferenceRow>> {
    let (_, recs) = golden::records(golden::NIELSEN_EXCEPTIONS_CSV)?;
    recs.iter()
        .map(|r| {
            let genus = golden::parse_u64(&r[0])?;
            let fpf = if r[1] == "-" {
                None
            } else {
                Some(FpfType::new(
                    genus,
                    golden::parse_u64(&r[1])?,
                    golden::parse_u64(&r[2])?,
                    golden::parse_list(&r[3])?,
                )?)
            };
            let orbits = r[4]
                .split(';')
                .map(|o| o.split('~').map(|c| golden::parse_list(c.trim())).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(ReferenceRow { genus, fpf, orbits, note: r[5].clone() })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReferenceStatus {
    Match,
    /// Agrees with a reference row whose printed form is ambiguous.
    MatchFlagged,
    /// Not in the reference table; `attributed` holds an orphan reference row
    /// whose orbits all belong to this type.
    Unprinted { attributed: Option<ReferenceRow> },
    Mismatch { reference: ReferenceRow },
    /// A reference row with no computed counterpart.
    Missing { reference: ReferenceRow },
}

impl ReferenceStatus {
    pub fn is_flagged(&self) -> bool {
        !matches!(self, ReferenceStatus::Match)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ReferenceStatus::Match => "match",
            ReferenceStatus::MatchFlagged => "match (flagged: ambiguous reference)",
            ReferenceStatus::Unprinted { attributed: Some(_) } => "flagged: unprinted type, orphan row attributed",
            ReferenceStatus::Unprinted { attributed: None } => "flagged: unprinted type",
            ReferenceStatus::Mismatch { .. } => "MISMATCH",
            ReferenceStatus::Missing { .. } => "MISSING",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportEntry {
    pub computed: Option<ExceptionalType>,
    pub status: ReferenceStatus,
}

/// Exceptional types compared against the bundled table.
pub fn exceptional_report(b_max: u64, exec: Execution) -> Result<Vec<ReportEntry>> {
    let computed = exceptional_types(b_max, exec)?;
    let reference: Vec<ReferenceRow> = nielsen_reference()?.into_iter().filter(|r| r.genus <= b_max).collect();
    let mut used = vec![false; reference.len()];
    let mut out = Vec::new();
    for ex in computed {
        let mine = ex.orbit_sets();
        let status = match reference.iter().position(|r| r.fpf.as_ref() == Some(&ex.fpf)) {
            Some(i) => {
                used[i] = true;
                let r = &reference[i];
                if r.orbit_sets() != mine {
                    ReferenceStatus::Mismatch { reference: r.clone() }
                } else if r.note.is_empty() {
                    ReferenceStatus::Match
                } else {
                    ReferenceStatus::MatchFlagged
                }
            }
            None => {
                let orphan = reference.iter().position(|r| {
                    r.fpf.is_none() && r.genus == ex.fpf.b && r.orbit_sets().is_subset(&mine)
                });
                if let Some(i) = orphan {
                    used[i] = true;
                }
                ReferenceStatus::Unprinted { attributed: orphan.map(|i| reference[i].clone()) }
            }
        };
        out.push(ReportEntry { computed: Some(ex), status });
    }
    for (r, u) in reference.into_iter().zip(used) {
        if !u {
            out.push(ReportEntry { computed: None, status: ReferenceStatus::Missing { reference: r } });
        }
    }
    Ok(out)
}
