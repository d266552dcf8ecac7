mod support;

use num_bigint::BigInt;
use num_traits::One;

use kodaira_core::abelian::FiniteAbelianGroup;
use kodaira_core::group::{bundled, FiniteGroupModel};
use kodaira_core::linalg::{char_poly, IntMatrix};
use kodaira_core::surface::{nielsen_charpoly, CoverHomology, GeneratingVector, OrbifoldSignature, TransversalOrder};

fn cyclic(d: u64, q: u32, periods: Vec<u32>, images: &[i64]) -> GeneratingVector {
    let g = FiniteAbelianGroup::cyclic(d).unwrap();
    let idx = images.iter().map(|&a| FiniteGroupModel::abelian_index(&g, &g.element(&[a]).unwrap())).collect();
    GeneratingVector::new(OrbifoldSignature::new(q, periods).unwrap(), FiniteGroupModel::Abelian(g), idx)
}

fn table(name: &str, q: u32, periods: Vec<u32>, labels: &[&str]) -> GeneratingVector {
    let g = bundled::group(name).unwrap();
    let idx = labels.iter().map(|l| g.find_label(l).unwrap_or_else(|| panic!("{}: no {}", name, l))).collect();
    GeneratingVector::new(OrbifoldSignature::new(q, periods).unwrap(), g, idx)
}

fn samples() -> Vec<GeneratingVector> {
    vec![
        cyclic(6, 0, vec![2, 2, 3, 3], &[3, 3, 2, 4]),
        cyclic(4, 1, vec![2, 2], &[0, 1, 2, 2]),
        cyclic(2, 2, vec![], &[1, 0, 0, 0]),
        cyclic(5, 0, vec![5, 5, 5], &[1, 1, 3]),
        table("d4", 1, vec![2], &["s", "sr", "r2"]),
        table("q8", 1, vec![2], &["i", "j", "-1"]),
        table("d6", 1, vec![3], &["s", "sr", "r4"]),
        table("sl2_z3", 0, vec![3, 3, 4], &["[[0,2],[1,2]]", "[[0,1],[2,2]]", "[[2,2],[2,1]]"]),
    ]
}

fn trace(m: &IntMatrix) -> BigInt {
    (0..m.rows()).map(|i| m.get(i, i).clone()).sum()
}

#[test]
fn action_is_a_homomorphism() {
    for gv in samples() {
        assert!(gv.validate().is_valid());
        let h = CoverHomology::new(&gv).unwrap();
        let g = &gv.group;
        let n = g.order();
        let mats: Vec<IntMatrix> = (0..n).map(|k| h.action(k).unwrap()).collect();
        assert_eq!(mats[g.identity()], IntMatrix::identity(2 * h.genus()));
        for a in 0..n {
            assert_eq!(mats[a].det().unwrap(), BigInt::one());
            for b in 0..n {
                assert_eq!(mats[g.mul(a, b)], mats[a].try_mul(&mats[b]).unwrap(), "{:?}", gv.group);
            }
        }
    }
}

// dim H₁(C)^G = 2·(genus of the quotient)
#[test]
fn invariant_subspace_has_quotient_rank() {
    for gv in samples() {
        let h = CoverHomology::new(&gv).unwrap();
        let n = gv.group.order();
        let total: BigInt = (0..n).map(|k| trace(&h.action(k).unwrap())).sum();
        assert_eq!(total, BigInt::from(n * 2 * gv.signature.q as usize));
        assert_eq!(h.genus() as u64, gv.cover_genus().unwrap());
    }
}

#[test]
fn charpolys_do_not_depend_on_transversal() {
    for gv in samples() {
        let a = CoverHomology::with_order(&gv, TransversalOrder::Standard).unwrap();
        let b = CoverHomology::with_order(&gv, TransversalOrder::Reversed).unwrap();
        for k in 0..gv.group.order() {
            assert_eq!(char_poly(&a.action(k).unwrap()).unwrap(), char_poly(&b.action(k).unwrap()).unwrap());
        }
    }
}

#[test]
fn cyclic_generators_match_nielsen() {
    for gv in samples() {
        let FiniteGroupModel::Abelian(g) = &gv.group else { continue };
        let d = g.order() as u32;
        let one = FiniteGroupModel::abelian_index(g, &g.element(&[1]).unwrap());
        let m = CoverHomology::new(&gv).unwrap().action(one).unwrap();
        let want = nielsen_charpoly(gv.signature.q, d, &gv.signature.periods).unwrap();
        assert_eq!(char_poly(&m).unwrap(), want);
    }
}

#[test]
fn every_element_matches_nielsen_for_its_cyclic_subgroup() {
    for gv in samples() {
        assert_eq!(support::nielsen_mismatches(&gv), Vec::<String>::new(), "{:?}", gv.group);
    }
}

#[test]
fn lefschetz_traces() {
    for gv in samples() {
        let h = CoverHomology::new(&gv).unwrap();
        for k in (0..gv.group.order()).filter(|&k| k != gv.group.identity()) {
            let fix = support::fixed_points(&gv, k) as i64;
            assert_eq!(trace(&h.action(k).unwrap()), BigInt::from(2 - fix));
        }
    }
}
