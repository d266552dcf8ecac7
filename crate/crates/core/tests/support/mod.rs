//! Brute-force oracles, generators and property checks shared by the test
//! suites and the acceptance runner.
#![allow(dead_code)]

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use kodaira_core::abelian::{element_order, AbelianElement, FiniteAbelianGroup};
use kodaira_core::enumeration::{abelian_feasible, Feasibility};
use kodaira_core::fibration::{FibrationComponent, GroupData, VirtualFibration};
use kodaira_core::linalg::{char_poly, image_cardinality, snf, stabilizer_lattice, IntMatrix, ModularMap};
use kodaira_core::monodromy::{lattice_index, ComponentAction, MonodromyProblem};
use kodaira_core::poly::IntPoly;
use kodaira_core::surface::{nielsen_charpoly, CoverHomology, GeneratingVector};

pub type Check = Result<(), TestCaseError>;

pub fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |e| IntMatrix::from_i64(r, c, &e).unwrap())
    })
}

pub fn square(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim).prop_flat_map(move |n| {
        prop::collection::vec(-bound..=bound, n * n).prop_map(move |e| IntMatrix::from_i64(n, n, &e).unwrap())
    })
}

pub fn check_snf(m: &IntMatrix) -> Check {
    let s = snf(m);
    prop_assert_eq!(s.left.try_mul(m).unwrap().try_mul(&s.right).unwrap(), s.form.clone());
    prop_assert_eq!(s.left.try_mul(s.left_inverse()).unwrap(), IntMatrix::identity(m.rows()));
    prop_assert_eq!(s.right.try_mul(s.right_inverse()).unwrap(), IntMatrix::identity(m.cols()));
    prop_assert_eq!(s.diagonal.len(), m.rows().min(m.cols()));
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let want = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
            prop_assert_eq!(s.form.get(i, j), &want);
        }
    }
    for w in s.diagonal.windows(2) {
        prop_assert!(!w[0].is_negative());
        if w[0].is_zero() {
            prop_assert!(w[1].is_zero());
        } else {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
    }
    prop_assert_eq!(s.rank(), m.rank());
    Ok(())
}

/// `det(xI − M)` by Laplace expansion along the first row.
pub fn cofactor_char_poly(m: &IntMatrix) -> IntPoly {
    let n = m.rows();
    let entries: Vec<Vec<IntPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = -m.get(i, j).clone();
                    if i == j {
                        IntPoly::new(vec![c, BigInt::one()])
                    } else {
                        IntPoly::new(vec![c])
                    }
                })
                .collect()
        })
        .collect();
    laplace(&entries)
}

fn laplace(a: &[Vec<IntPoly>]) -> IntPoly {
    if a.len() == 1 {
        return a[0][0].clone();
    }
    let mut acc = IntPoly::zero();
    for j in 0..a.len() {
        let minor: Vec<Vec<IntPoly>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = &a[0][j] * &laplace(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

pub fn check_char_poly(m: &IntMatrix) -> Check {
    let p = char_poly(m).unwrap();
    prop_assert_eq!(&p, &cofactor_char_poly(m));
    let sign = if m.rows().is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    prop_assert_eq!(p.coeff(0), sign * m.det().unwrap());
    Ok(())
}

/// Points of `[0, n)^rank`.
pub fn box_points(rank: usize, n: u64) -> Vec<Vec<BigInt>> {
    let total = (n as usize).pow(rank as u32);
    (0..total)
        .map(|mut k| {
            (0..rank)
                .map(|_| {
                    let v = k as u64 % n;
                    k /= n as usize;
                    BigInt::from(v)
                })
                .collect()
        })
        .collect()
}

pub fn brute_image(maps: &[(IntMatrix, i64)]) -> usize {
    let l = maps.iter().fold(1i64, |acc, (_, n)| acc.lcm(n));
    let mut seen = HashSet::new();
    for x in box_points(maps[0].0.cols(), l as u64) {
        let img: Vec<BigInt> = maps
            .iter()
            .flat_map(|(a, n)| a.mul_vec(&x).unwrap().into_iter().map(move |y| y.mod_floor(&BigInt::from(*n))))
            .collect();
        seen.insert(img);
    }
    seen.len()
}

/// Up to two maps `ℤ^c → (ℤ/n)^k` with `c ≤ 4`, `k ≤ 3`, `n ≤ 3`.
pub fn modular_maps() -> impl Strategy<Value = Vec<(IntMatrix, i64)>> {
    (1usize..=4).prop_flat_map(|cols| {
        prop::collection::vec(
            (1usize..=3, 2i64..=3).prop_flat_map(move |(rows, n)| {
                prop::collection::vec(-3i64..=3, rows * cols)
                    .prop_map(move |e| (IntMatrix::from_i64(rows, cols, &e).unwrap(), n))
            }),
            1..=2,
        )
    })
}

pub fn check_image(maps: &[(IntMatrix, i64)]) -> Check {
    let mm: Vec<ModularMap> = maps.iter().map(|(a, n)| ModularMap::new(a.clone(), *n)).collect();
    let got = image_cardinality(&mm).unwrap();
    prop_assert_eq!(got.clone(), BigInt::from(brute_image(maps)));
    let basis = stabilizer_lattice(&mm).unwrap();
    prop_assert_eq!(lattice_index(&basis), Some(got));
    for j in 0..basis.cols() {
        let v = basis.column(j);
        for (a, n) in maps {
            for y in a.mul_vec(&v).unwrap() {
                prop_assert!(y.is_multiple_of(&BigInt::from(*n)));
            }
        }
    }
    Ok(())
}

const SMALL_GROUPS: [&[u64]; 4] = [&[2], &[3], &[4], &[2, 2]];

/// Random problems with `b = 2`, `f ≤ 3` and `|G| ≤ 4`.
pub fn problem() -> impl Strategy<Value = MonodromyProblem> {
    (0..SMALL_GROUPS.len(), 2u64..=3, 1usize..=3).prop_flat_map(|(gi, f, k)| {
        let b = 2u64;
        let cells = (4 * f * b) as usize;
        let comp = (prop::collection::vec(-2i64..=2, cells), 0usize..16, 1u64..=3, 1u64..=3);
        prop::collection::vec(comp, k).prop_map(move |raw| {
            let g = FiniteAbelianGroup::new(SMALL_GROUPS[gi].to_vec()).unwrap();
            let weights: Vec<AbelianElement> = g.elements().filter(|x| !x.is_zero()).collect();
            let components = raw
                .into_iter()
                .map(|(t, w, d, e)| {
                    let weight = weights[w % weights.len()].clone();
                    ComponentAction {
                        transfer_push: IntMatrix::from_i64(2 * f as usize, 2 * b as usize, &t).unwrap(),
                        r: element_order(&weight),
                        weight,
                        d,
                        e,
                    }
                })
                .collect();
            MonodromyProblem::new(b, f, g, components).unwrap()
        })
    })
}

/// The tautological class is fixed exactly by `ker ι`, whose index is the
/// number of distinct values of `ι` on a fundamental box.
pub fn check_fixed_set(p: &MonodromyProblem) -> Check {
    let g = p.group().clone();
    let theta = p.tautological_class(vec![g.zero(); 2 * p.f() as usize]);
    let mut images = HashSet::new();
    for alpha in box_points(p.base_rank(), g.exponent()) {
        let image = p.iota(&alpha).unwrap();
        let in_kernel = image.iter().all(|x| x.is_zero());
        prop_assert_eq!(p.apply_monodromy(&theta, &alpha).unwrap() == theta, in_kernel);
        images.insert(image);
    }
    prop_assert_eq!(p.stabilizer_index().unwrap(), BigInt::from(images.len()));
    let basis = p.stabilizer_basis().unwrap();
    for j in 0..basis.cols() {
        prop_assert_eq!(p.apply_monodromy(&theta, &basis.column(j)).unwrap(), theta.clone());
    }
    Ok(())
}

/// Pulling back to the minimal degree leaves nothing to pull back.
pub fn check_realization(p: &MonodromyProblem) -> Check {
    let deg = p.minimal_pullback_degree().unwrap().to_u64().unwrap();
    let q = p.pullback(deg).unwrap();
    prop_assert!(q.obstruction().is_zero());
    prop_assert_eq!(q.stabilizer_index().unwrap(), BigInt::one());
    prop_assert_eq!(q.minimal_pullback_degree().unwrap(), BigInt::one());
    prop_assert_eq!(q.b() - 1, deg * (p.b() - 1));
    let index = p.stabilizer_index().unwrap();
    prop_assert_eq!(p.pullback(index.to_u64().unwrap()).unwrap().stabilizer_index().unwrap(), BigInt::one());
    if index > BigInt::one() {
        prop_assert!(p.pullback(1).is_err());
    }
    Ok(())
}

/// Random data with `dᵢ(b−1) = eᵢ(f−1)`.
pub fn double_etale() -> impl Strategy<Value = VirtualFibration> {
    (2u64..=8, 2u64..=8, 2u64..=12).prop_flat_map(|(b, f, n)| {
        let divisors: Vec<u64> = (2..=n).filter(|r| n % r == 0).collect();
        let g = (b - 1).gcd(&(f - 1));
        prop::collection::vec((1u64..=3, 0..divisors.len()), 1..=4).prop_map(move |raw| {
            let components = raw
                .into_iter()
                .map(|(k, ri)| FibrationComponent::new(k * (f - 1) / g, k * (b - 1) / g, divisors[ri]))
                .collect();
            VirtualFibration::new(b, f, GroupData::Order(n), components, true).unwrap()
        })
    })
}

pub fn check_double_etale(vf: &VirtualFibration) -> Check {
    let sigma = vf.virtual_invariants().sigma;
    prop_assert_eq!(vf.double_etale_signature().unwrap(), sigma.clone());
    prop_assert_eq!(vf.base_side_signature(), sigma.clone());
    prop_assert_eq!(vf.pullback(3).unwrap().virtual_invariants().sigma, sigma * BigInt::from(3));
    Ok(())
}

pub fn prime_powers(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while n > 1 {
        let mut a = 0;
        while n.is_multiple_of(p) {
            n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
        p += 1;
    }
    out
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    (1..=n.min(max))
        .rev()
        .flat_map(|k| {
            partitions(n - k, k).into_iter().map(move |mut rest| {
                rest.insert(0, k);
                rest
            })
        })
        .collect()
}

/// Primary decompositions, one partition of the exponent per prime.
pub fn abelian_groups(n: u64) -> Vec<Vec<u64>> {
    let mut groups = vec![vec![]];
    for (p, a) in prime_powers(n) {
        let mut next = Vec::new();
        for g in &groups {
            for part in partitions(a, a) {
                let mut h: Vec<u64> = g.clone();
                h.extend(part.iter().map(|&k| p.pow(k)));
                next.push(h);
            }
        }
        groups = next;
    }
    groups
}

fn elements(factors: &[u64]) -> Vec<Vec<u64>> {
    factors.iter().fold(vec![vec![]], |acc, &n| {
        acc.into_iter()
            .flat_map(|x| {
                (0..n).map(move |c| {
                    let mut y = x.clone();
                    y.push(c);
                    y
                })
            })
            .collect()
    })
}

fn order(factors: &[u64], x: &[u64]) -> u64 {
    factors.iter().zip(x).fold(1, |acc, (&n, &c)| acc.lcm(&(n / c.gcd(&n))))
}

/// Tuples `x₁..x_{k−1}` of the prescribed orders; `x_k` is forced to be `−Σ`.
pub fn zero_sum_exists(factors: &[u64], orders: &[u64]) -> bool {
    let els = elements(factors);
    let (last, init) = orders.split_last().unwrap();
    let pools: Vec<Vec<&Vec<u64>>> =
        init.iter().map(|&r| els.iter().filter(|x| order(factors, x) == r).collect()).collect();
    let mut stack: Vec<(usize, Vec<u64>)> = vec![(0, vec![0; factors.len()])];
    while let Some((i, sum)) = stack.pop() {
        if i == init.len() {
            let neg: Vec<u64> = sum.iter().zip(factors).map(|(&s, &n)| (n - s % n) % n).collect();
            if order(factors, &neg) == *last {
                return true;
            }
            continue;
        }
        for x in &pools[i] {
            let s = sum.iter().zip(x.iter()).zip(factors).map(|((&a, &b), &n)| (a + b) % n).collect();
            stack.push((i + 1, s));
        }
    }
    false
}

pub fn multisets(items: &[u64], k: usize) -> Vec<Vec<u64>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Cases `(d, r)` with `d ≤ d_max` and at most four orders where
/// [`abelian_feasible`] disagrees with exhaustive search.
pub fn feasibility_disagreements(d_max: u64) -> Vec<String> {
    let mut bad = Vec::new();
    for d in 2..=d_max {
        let divisors: Vec<u64> = (2..=d).filter(|r| d % r == 0).collect();
        let groups = abelian_groups(d);
        for k in 1..=4 {
            for r in multisets(&divisors, k) {
                let ok: Vec<&Vec<u64>> = groups.iter().filter(|g| zero_sum_exists(g, &r)).collect();
                let agrees = match abelian_feasible(d, &r) {
                    Feasibility::Infeasible => ok.is_empty(),
                    Feasibility::Feasible => ok.len() == groups.len(),
                    Feasibility::Constrained(list) => {
                        !ok.is_empty()
                            && ok.len() < groups.len()
                            && list.len() == ok.len()
                            && list.iter().all(|g| {
                                ok.iter().any(|h| g.is_isomorphic(&FiniteAbelianGroup::new(h.to_vec()).unwrap()))
                            })
                    }
                };
                if !agrees {
                    bad.push(format!("d={} r={:?}", d, r));
                }
            }
        }
    }
    bad
}

/// Every group of order `n` is abelian iff `n = ∏ pᵢ^aᵢ` with `aᵢ ≤ 2` and
/// `pᵢ^k ≢ 1 mod pⱼ` for `1 ≤ k ≤ aᵢ`.
pub fn only_abelian(n: u64) -> bool {
    let pp = prime_powers(n);
    pp.iter().all(|&(_, a)| a <= 2)
        && pp.iter().all(|&(p, a)| pp.iter().all(|&(q, _)| (1..=a).all(|k| p.pow(k) % q != 1)))
}

/// `|Fix(h)|` on the cover, `h ≠ 1`: `|C_G(h)|·Σⱼ |cl(h) ∩ ⟨cⱼ⟩| / rⱼ` over
/// the elliptic images `cⱼ`.
pub fn fixed_points(gv: &GeneratingVector, h: usize) -> u64 {
    let g = &gv.group;
    let n = g.order();
    let centralizer = (0..n).filter(|&x| g.mul(x, h) == g.mul(h, x)).count() as u64;
    let class: HashSet<usize> = (0..n).map(|x| g.mul(g.mul(x, h), g.inv(x))).collect();
    let elliptic = &gv.images[2 * gv.signature.q as usize..];
    gv.signature
        .periods
        .iter()
        .zip(elliptic)
        .map(|(&r, &c)| {
            let hits = (0..r as usize).filter(|&k| class.contains(&g.power(c, k))).count() as u64;
            centralizer * hits / r as u64
        })
        .sum()
}

/// Ramification type `(q, d, periods)` of `⟨h⟩` acting on the cover, read
/// off the fixed point counts of its powers.
pub fn cyclic_type(gv: &GeneratingVector, h: usize) -> (u32, u32, Vec<u32>) {
    let g = &gv.group;
    let d = g.element_order(h) as u64;
    let genus = gv.cover_genus().unwrap();
    // exact[s]: points whose stabilizer in ⟨h⟩ has order exactly s
    let mut exact = vec![0u64; d as usize + 1];
    for s in (2..=d).rev().filter(|s| d.is_multiple_of(*s)) {
        let at_least = fixed_points(gv, g.power(h, (d / s) as usize));
        let above: u64 = (2 * s..=d).step_by(s as usize).map(|t| exact[t as usize]).sum();
        exact[s as usize] = at_least - above;
    }
    let mut periods = Vec::new();
    for s in 2..=d {
        assert_eq!(exact[s as usize] * s % d, 0);
        periods.extend(std::iter::repeat_n(s as u32, (exact[s as usize] * s / d) as usize));
    }
    // 2g − 2 = d(2q − 2) + Σ (d − d/s)
    let ram: i64 = periods.iter().map(|&s| (d - d / s as u64) as i64).sum();
    let rest = 2 * genus as i64 - 2 - ram;
    assert_eq!(rest % d as i64, 0);
    let twice_q = rest / d as i64 + 2;
    (twice_q as u32 / 2, d as u32, periods)
}

/// Char poly of every non-trivial element against the Nielsen formula for
/// the cyclic subgroup it generates.
pub fn nielsen_mismatches(gv: &GeneratingVector) -> Vec<String> {
    let h = CoverHomology::new(gv).unwrap();
    let mut bad = Vec::new();
    for k in (0..gv.group.order()).filter(|&k| k != gv.group.identity()) {
        let (q, d, periods) = cyclic_type(gv, k);
        let want = nielsen_charpoly(q, d, &periods).unwrap();
        let got = char_poly(&h.action(k).unwrap()).unwrap();
        if got != want {
            bad.push(format!("{}: {} vs {}", gv.group.label(k), got, want));
        }
    }
    bad
}
