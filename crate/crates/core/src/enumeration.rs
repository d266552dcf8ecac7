//! Exhaustive searches for virtual Kodaira fibrations of small signature.
//!
//! Knowledge imported from the classification of small groups and of
//! automorphisms of low genus curves is kept as explicit tables below.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::abelian::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::fibration::{FibrationComponent, GroupData, Rational, VirtualFibration};
use crate::golden;
use crate::group::FiniteGroupModel;
use crate::par::Execution;

/// Orders up to 32 admitting a non-abelian group. An order is in this list
/// exactly when it is not cube-free or has prime factors p, q with q | p−1
/// (resp. p² with q | p²−1); the list is kept literal.
const NONABELIAN_ORDERS: [u64; 16] = [6, 8, 10, 12, 14, 16, 18, 20, 21, 22, 24, 26, 27, 28, 30, 32];

pub fn nonabelian_order(d: u64) -> Result<bool> {
    if !(2..=32).contains(&d) {
        return Err(Error::OutOfRange(format!("group order {} outside 2..=32", d)));
    }
    Ok(NONABELIAN_ORDERS.contains(&d))
}

/// Single puncture: the local monodromy must be a commutator in a non-abelian
/// group. The only non-abelian group of order 6 is S₃, whose commutator
/// subgroup has no element of order 2.
pub fn m1_commutator_feasible(d: u64, r: u64) -> Result<bool> {
    Ok(nonabelian_order(d)? && !(d == 6 && r == 2))
}

/// Bound on pairwise disjoint graphs of automorphisms of a curve of genus `b`,
/// known for genus 2 (three) and 3 (six).
pub fn max_disjoint_graphs(b: u64) -> Option<usize> {
    match b {
        2 => Some(3),
        3 => Some(6),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Infeasible,
    /// Every abelian group of the order works.
    Feasible,
    /// Only the listed abelian groups work.
    Constrained(Vec<FiniteAbelianGroup>),
}

/// Whether `g` has elements `x_i` of exact orders `r_i` with `Σ w_i x_i = 0`.
pub fn weighted_zero_sum(g: &FiniteAbelianGroup, orders: &[u64], weights: &[u64]) -> bool {
    let model = FiniteGroupModel::Abelian(g.clone());
    let n = model.order();
    let mut reach = vec![false; n];
    reach[model.identity()] = true;
    for (&r, &w) in orders.iter().zip(weights) {
        let candidates: BTreeSet<usize> = (0..n)
            .filter(|&x| model.element_order(x) as u64 == r)
            .map(|x| model.power(x, w as usize))
            .collect();
        if candidates.is_empty() {
            return false;
        }
        let mut next = vec![false; n];
        for s in (0..n).filter(|&s| reach[s]) {
            for &c in &candidates {
                next[model.mul(s, c)] = true;
            }
        }
        reach = next;
    }
    reach[model.identity()]
}

fn feasibility(d: u64, orders: &[u64], weights: &[u64]) -> Feasibility {
    let all = FiniteAbelianGroup::all_of_order(d);
    let ok: Vec<FiniteAbelianGroup> = all.iter().filter(|g| weighted_zero_sum(g, orders, weights)).cloned().collect();
    if ok.is_empty() {
        Feasibility::Infeasible
    } else if ok.len() == all.len() {
        Feasibility::Feasible
    } else {
        Feasibility::Constrained(ok)
    }
}

/// Abelian groups of order `d` containing elements of orders `r` summing to zero.
pub fn abelian_feasible(d: u64, r: &[u64]) -> Feasibility {
    feasibility(d, r, &vec![1; r.len()])
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Annotation {
    None,
    NonAbelian,
    NonCyclic,
    Groups(Vec<FiniteAbelianGroup>),
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::None => Ok(()),
            Annotation::NonAbelian => write!(f, "non-abelian"),
            Annotation::NonCyclic => write!(f, "non-cyclic"),
            Annotation::Groups(gs) => {
                let parts: Vec<String> = gs
                    .iter()
                    .map(|g| g.factors().iter().map(|n| format!("Z/{}", n)).collect::<Vec<_>>().join("x"))
                    .collect();
                write!(f, "{}", parts.join(" or "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphTypeRow {
    pub sigma: u64,
    pub b: u64,
    pub d: u64,
    /// Descending.
    pub r: Vec<u64>,
    pub annotation: Annotation,
    /// No bound on disjoint graphs is known at this genus.
    pub unbounded_graph_count: bool,
}

impl GraphTypeRow {
    pub fn key(&self) -> (u64, u64, u64, Vec<u64>) {
        (self.sigma, self.b, self.d, self.r.clone())
    }

    pub fn fibration(&self) -> VirtualFibration {
        let comps = self.r.iter().map(|&r| FibrationComponent::new(1, 1, r)).collect();
        VirtualFibration::new(self.b, self.b, GroupData::Order(self.d), comps, true).expect("enumerated rows are consistent")
    }
}

/// `(2/3)(b−1)·d·Σ(1 − 1/rᵢ²)`
pub fn graph_sigma(b: u64, d: u64, r: &[u64]) -> Rational {
    let s: Rational = r
        .iter()
        .map(|&r| Rational::new(BigInt::from(r * r - 1), BigInt::from(r * r)))
        .fold(Rational::zero(), |a, x| a + x);
    Rational::new(BigInt::from(2 * (b - 1) * d), BigInt::from(3)) * s
}

fn multisets(choices: &[u64], len: usize) -> Vec<Vec<u64>> {
    fn go(choices: &[u64], start: usize, len: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..choices.len() {
            cur.push(choices[i]);
            go(choices, i, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(choices, 0, len, &mut Vec::new(), &mut out);
    out
}

fn graph_rows_for(b: u64, d: u64, sigma_max: u64) -> Vec<GraphTypeRow> {
    let divisors: Vec<u64> = (2..=d).filter(|r| d.is_multiple_of(*r)).collect();
    let mut rows = Vec::new();
    let mut m = 1;
    while (b - 1) * d * m <= 2 * sigma_max {
        for mut r in multisets(&divisors, m as usize) {
            let sigma = graph_sigma(b, d, &r);
            if !sigma.is_integer() {
                continue;
            }
            let sigma = sigma.to_integer();
            let four = BigInt::from(4);
            if sigma > BigInt::from(sigma_max) || !(&sigma % &four).is_zero() {
                continue;
            }
            let sigma: u64 = sigma.try_into().expect("bounded by sigma_max");
            r.sort_unstable_by(|a, b| b.cmp(a));
            if let Some(annotation) = graph_annotation(b, d, &r) {
                rows.push(GraphTypeRow {
                    sigma,
                    b,
                    d,
                    unbounded_graph_count: m >= 2 && max_disjoint_graphs(b).is_none(),
                    r,
                    annotation,
                });
            }
        }
        m += 1;
    }
    rows
}

/// `None` when excluded.
fn graph_annotation(b: u64, d: u64, r: &[u64]) -> Option<Annotation> {
    let nonab = nonabelian_order(d).unwrap_or(false);
    if r.len() == 1 {
        return m1_commutator_feasible(d, r[0]).unwrap_or(false).then_some(Annotation::NonAbelian);
    }
    if max_disjoint_graphs(b).is_some_and(|k| r.len() > k) {
        return None;
    }
    match abelian_feasible(d, r) {
        Feasibility::Feasible => Some(Annotation::None),
        Feasibility::Infeasible => nonab.then_some(Annotation::NonAbelian),
        Feasibility::Constrained(groups) => {
            let non_cyclic: Vec<FiniteAbelianGroup> =
                FiniteAbelianGroup::all_of_order(d).into_iter().filter(|g| !g.is_cyclic()).collect();
            if nonab && groups == non_cyclic {
                Some(Annotation::NonCyclic)
            } else {
                Some(Annotation::Groups(groups))
            }
        }
    }
}

/// Graph-type virtual fibrations with `0 < σ ≤ sigma_max`, `σ ∈ 4ℤ`.
pub fn enumerate_graph_rows(sigma_max: u64, exec: Execution) -> Result<Vec<GraphTypeRow>> {
    if !sigma_max.is_multiple_of(4) {
        return Err(Error::OutOfRange(format!("sigma bound {} is not a multiple of 4", sigma_max)));
    }
    // (b−1)·d·m ≤ 2σ_max with d ≥ 2, m ≥ 1
    let mut branches = Vec::new();
    for b in 2..=1 + sigma_max {
        for d in 2..=2 * sigma_max / (b - 1) {
            branches.push((b, d));
        }
    }
    if branches.iter().any(|&(_, d)| d > 32) {
        return Err(Error::OutOfRange(format!("sigma bound {} needs group orders above 32", sigma_max)));
    }
    let mut rows = exec.flat_map(&branches, |&(b, d)| graph_rows_for(b, d, sigma_max));
    rows.sort_by(|x, y| {
        (x.sigma, x.r.len(), &x.r, x.d).cmp(&(y.sigma, y.r.len(), &y.r, y.d))
    });
    Ok(rows)
}

/// Component `(g(D), d, e)`.
pub type SigFourComponent = (u64, u64, u64);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SigFourRow {
    pub label: Option<String>,
    pub b: u64,
    pub f: u64,
    pub order: u64,
    /// Sorted descending by `(g(D), d, e)`.
    pub components: Vec<SigFourComponent>,
    /// Known non-realisability, from the bundled annotation table.
    pub realisable: Option<String>,
}

impl SigFourRow {
    pub fn key(&self) -> (u64, u64, u64, Vec<SigFourComponent>) {
        (self.b, self.f, self.order, self.components.clone())
    }

    pub fn fibration(&self) -> VirtualFibration {
        let comps = self.components.iter().map(|&(_, d, e)| FibrationComponent::new(d, e, 2)).collect();
        VirtualFibration::new(self.b, self.f, GroupData::Order(self.order), comps, true).expect("enumerated rows are consistent")
    }

    /// Every component is the graph of a map `B → F`.
    pub fn is_graph_type(&self) -> bool {
        self.components.iter().all(|&(_, d, _)| d == 1)
    }
}

/// Reference rows of the signature 4 table with labels and realisability notes.
pub fn sig4_reference() -> Result<Vec<SigFourRow>> {
    let (_, recs) = golden::records(golden::TABLE2_CSV)?;
    recs.iter()
        .map(|r| {
            let components = r[4]
                .split_whitespace()
                .map(|c| {
                    let p = c.split(':').map(golden::parse_u64).collect::<Result<Vec<_>>>()?;
                    match p[..] {
                        [g, d, e] => Ok((g, d, e)),
                        _ => Err(Error::Schema(format!("bad component {:?}", c))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SigFourRow {
                label: Some(r[0].clone()),
                b: golden::parse_u64(&r[1])?,
                f: golden::parse_u64(&r[2])?,
                order: golden::parse_u64(&r[3])?,
                components,
                realisable: (!r[5].is_empty()).then(|| r[5].clone()),
            })
        })
        .collect()
}

fn sig4_rows_for(order: u64, f: u64) -> Vec<SigFourRow> {
    let mut out = Vec::new();
    if !order.is_multiple_of(2) {
        return out;
    }
    // |G|(f−1)Σe = 8 when every rᵢ = 2
    if 8 % (order * (f - 1)) != 0 {
        return out;
    }
    let e_total = 8 / (order * (f - 1));
    for m in 1..=4usize {
        for es in multisets(&[1, 2, 3, 4], m) {
            if es.iter().sum::<u64>() != e_total {
                continue;
            }
            let max_b = 1 + es.iter().map(|e| e * (f - 1)).max().unwrap_or(0);
            for b in 2..=max_b {
                if es.iter().any(|e| !(e * (f - 1)).is_multiple_of(b - 1)) {
                    continue;
                }
                let ds: Vec<u64> = es.iter().map(|e| e * (f - 1) / (b - 1)).collect();
                if !sig4_allowed(order, b, f, &ds, &es) {
                    continue;
                }
                let mut components: Vec<SigFourComponent> =
                    ds.iter().zip(&es).map(|(&d, &e)| (d * (b - 1) + 1, d, e)).collect();
                components.sort_unstable_by(|x, y| y.cmp(x));
                out.push(SigFourRow { label: None, b, f, order, components, realisable: None });
            }
        }
    }
    out
}

fn sig4_allowed(order: u64, b: u64, f: u64, ds: &[u64], es: &[u64]) -> bool {
    let r = vec![2; ds.len()];
    let d_total: u64 = ds.iter().sum();
    // the fibre F meets D in Σdᵢ points whose local monodromies multiply to 1
    let fibre_ok = if d_total == 1 {
        m1_commutator_feasible(order, 2).unwrap_or(false)
    } else {
        feasibility(order, &r, ds) != Feasibility::Infeasible || nonabelian_order(order).unwrap_or(false)
    };
    let automorphism_graphs = ds.iter().zip(es).filter(|&(&d, &e)| d == 1 && e == 1).count();
    let graphs_ok = b != f || max_disjoint_graphs(b).is_none_or(|k| automorphism_graphs <= k);
    fibre_ok && graphs_ok
}

/// Double étale virtual fibrations of virtual signature 4, labelled from the
/// bundled table where they match.
pub fn enumerate_sig4_rows(exec: Execution) -> Result<Vec<SigFourRow>> {
    let mut branches = Vec::new();
    for order in 2..=8 {
        for f in 2..=5 {
            branches.push((order, f));
        }
    }
    let mut rows = exec.flat_map(&branches, |&(order, f)| sig4_rows_for(order, f));
    let reference = sig4_reference()?;
    for row in rows.iter_mut() {
        if let Some(known) = reference.iter().find(|k| k.key() == row.key()) {
            row.label = known.label.clone();
            row.realisable = known.realisable.clone();
        }
    }
    let position = |r: &SigFourRow| reference.iter().position(|k| k.key() == r.key()).unwrap_or(usize::MAX);
    rows.sort_by_key(|x| (position(x), x.key()));
    Ok(rows)
}

/// Reference rows of the graph type table.
pub fn graph_reference() -> Result<Vec<GraphTypeRow>> {
    let (_, recs) = golden::records(golden::TABLE1_CSV)?;
    recs.iter()
        .map(|r| {
            let annotation = match r[4].as_str() {
                "" => Annotation::None,
                "non-abelian" => Annotation::NonAbelian,
                "non-cyclic" => Annotation::NonCyclic,
                other => Annotation::Groups(
                    other
                        .split(" or ")
                        .map(|g| {
                            let f = g
                                .split('x')
                                .map(|c| golden::parse_u64(c.trim_start_matches("Z/")))
                                .collect::<Result<Vec<_>>>()?;
                            FiniteAbelianGroup::new(f)
                        })
                        .collect::<Result<Vec<_>>>()?,
                ),
            };
            let b = golden::parse_u64(&r[1])?;
            let r_list = golden::parse_list(&r[3])?;
            Ok(GraphTypeRow {
                sigma: golden::parse_u64(&r[0])?,
                b,
                d: golden::parse_u64(&r[2])?,
                unbounded_graph_count: r_list.len() >= 2 && max_disjoint_graphs(b).is_none(),
                r: r_list,
                annotation,
            })
        })
        .collect()
}

/// Differences between two row sets, as human-readable lines.
pub fn diff_rows<T: Eq + std::hash::Hash + fmt::Debug>(expected: &[T], actual: &[T]) -> Vec<String> {
    use std::collections::HashSet;
    let e: HashSet<&T> = expected.iter().collect();
    let a: HashSet<&T> = actual.iter().collect();
    let mut out: Vec<String> = e.difference(&a).map(|r| format!("- {:?}", r)).collect();
    out.extend(a.difference(&e).map(|r| format!("+ {:?}", r)));
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_tables() {
        assert!(nonabelian_order(8).unwrap());
        assert!(!nonabelian_order(9).unwrap());
        assert!(nonabelian_order(21).unwrap());
        assert!(nonabelian_order(40).is_err());
        assert!(m1_commutator_feasible(8, 2).unwrap());
        assert!(!m1_commutator_feasible(6, 2).unwrap());
        assert!(!m1_commutator_feasible(4, 2).unwrap());
        assert_eq!(max_disjoint_graphs(5), None);
    }

    #[test]
    fn feasibility_examples() {
        assert_eq!(abelian_feasible(2, &[2, 2]), Feasibility::Feasible);
        let v4 = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        assert_eq!(abelian_feasible(4, &[2, 2, 2]), Feasibility::Constrained(vec![v4]));
        match abelian_feasible(8, &[2, 2, 2]) {
            Feasibility::Constrained(gs) => assert!(gs.iter().all(|g| !g.is_cyclic()) && gs.len() == 2),
            other => panic!("{:?}", other),
        }
        assert_eq!(abelian_feasible(2, &[2]), Feasibility::Infeasible);
        assert_eq!(abelian_feasible(6, &[4, 2]), Feasibility::Infeasible);
    }

    #[test]
    fn small_sigma() {
        let rows = enumerate_graph_rows(4, Execution::Sequential).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.sigma, r.b, r.d, r.r.clone())).collect();
        assert_eq!(keys.len(), 3);
        assert!(keys.contains(&(4, 2, 8, vec![2])));
        assert!(keys.contains(&(4, 3, 2, vec![2, 2])));
        assert!(keys.contains(&(4, 2, 4, vec![2, 2])));
        assert!(enumerate_graph_rows(0, Execution::Sequential).unwrap().is_empty());
        assert!(enumerate_graph_rows(6, Execution::Sequential).is_err());
    }
}
