use std::collections::{BTreeMap, BTreeSet};

use kodaira_core::fpf::{
    config_classes, enumerate_fpf, exceptional_report, fpf_reference, nielsen_classes, FpfType, ReferenceStatus,
};
use kodaira_core::linalg::char_poly;
use kodaira_core::par::Execution;
use kodaira_core::surface::{homology_action, nielsen_charpoly};

#[test]
fn ramification_types_match_reference() {
    let types = enumerate_fpf(9, Execution::Sequential).unwrap();
    let mine: BTreeSet<FpfType> = types.iter().cloned().collect();
    let reference: BTreeSet<FpfType> = fpf_reference().unwrap().into_iter().collect();
    assert_eq!(mine, reference);
    let mut per_genus = BTreeMap::new();
    for t in &types {
        *per_genus.entry(t.b).or_insert(0) += 1;
    }
    assert_eq!(per_genus.into_values().collect::<Vec<_>>(), vec![1, 2, 4, 6, 5, 12, 9, 14]);
}

#[test]
fn parallel_agrees() {
    assert_eq!(
        enumerate_fpf(9, Execution::Sequential).unwrap(),
        enumerate_fpf(9, Execution::Parallel).unwrap()
    );
}

#[test]
fn exceptional_report_flags_only_the_known_ambiguities() {
    let report = exceptional_report(9, Execution::Sequential).unwrap();
    let matched = report.iter().filter(|e| e.status == ReferenceStatus::Match).count();
    assert_eq!(matched, 12);
    let flagged: Vec<_> = report.iter().filter(|e| e.status.is_flagged()).collect();
    assert_eq!(flagged.len(), 2, "{:#?}", flagged);
    for e in flagged {
        let t = &e.computed.as_ref().unwrap().fpf;
        match &e.status {
            ReferenceStatus::MatchFlagged => assert_eq!((t.b, t.d, t.q), (9, 12, 0)),
            ReferenceStatus::Unprinted { attributed: Some(_) } => {
                assert_eq!((t.b, t.d, t.q, t.periods.clone()), (7, 12, 0, vec![3, 4, 4, 6]));
                assert_eq!(e.computed.as_ref().unwrap().orbits.len(), 2);
            }
            other => panic!("{:?}", other),
        }
    }
}

#[test]
fn negation_preserves_classes() {
    for t in enumerate_fpf(9, Execution::Sequential).unwrap() {
        let classes: BTreeSet<Vec<u64>> = nielsen_classes(&t).iter().map(|c| c.multiset()).collect();
        for c in nielsen_classes(&t) {
            assert!(classes.contains(&c.negated().multiset()), "{} {:?}", t, c);
        }
        let orbits = config_classes(&t);
        assert_eq!(orbits.iter().map(Vec::len).sum::<usize>(), classes.len());
    }
}

#[test]
fn low_genus_counts_used_by_the_signature_four_search() {
    let types = enumerate_fpf(3, Execution::Sequential).unwrap();
    assert_eq!(types.iter().filter(|t| t.b == 2).count(), 1);
    assert_eq!(types.iter().filter(|t| t.b == 3).count(), 2);
}

#[test]
fn generating_vectors_recover_the_genus() {
    for t in enumerate_fpf(9, Execution::Sequential).unwrap() {
        let p = nielsen_charpoly(t.q as u32, t.d as u32, &t.periods.iter().map(|&r| r as u32).collect::<Vec<_>>()).unwrap();
        assert_eq!(p.degree(), Some(2 * t.b as usize));
        for c in nielsen_classes(&t) {
            let gv = c.generating_vector(&t);
            assert!(gv.validate().is_valid(), "{} {:?}", t, c);
            assert_eq!(gv.cover_genus().unwrap(), t.b);
        }
    }
}

#[test]
fn homology_action_has_the_nielsen_charpoly() {
    // φ is the element 1 of ℤ/d; its Lefschetz data fixes the characteristic polynomial
    for t in enumerate_fpf(4, Execution::Sequential).unwrap() {
        let expected =
            nielsen_charpoly(t.q as u32, t.d as u32, &t.periods.iter().map(|&r| r as u32).collect::<Vec<_>>()).unwrap();
        for c in nielsen_classes(&t) {
            let m = homology_action(&c.generating_vector(&t), 1).unwrap();
            assert_eq!(char_poly(&m).unwrap(), expected, "{} {:?}", t, c);
        }
    }
}
