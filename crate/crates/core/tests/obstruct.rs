mod common;

use std::collections::BTreeSet;

use rmlt::catalog::CaseId;
use rmlt::lingroup::LinearGroup;
use rmlt::obstruct::{certificate_for_case, find_obstruction, intersection_certificate, Strategy};
use rmlt::Error;

use common::catalog;

/// `{|A ∩ B^g|}` by matrix action, walking the group backwards.
fn sizes_by_matrices(g: &LinearGroup, a: &[u32], b: &[u32]) -> Vec<usize> {
    let a: BTreeSet<u32> = a.iter().copied().collect();
    let mut out = BTreeSet::new();
    for m in g.elements().iter().rev() {
        out.insert(b.iter().filter(|&&y| a.contains(&m.act(y))).count());
    }
    out.into_iter().collect()
}

#[test]
fn full_orbit_against_itself_fails() {
    let g = catalog().build(CaseId::K360).unwrap().group;
    let all: Vec<u32> = (0..g.degree() as u32).collect();
    let c = intersection_certificate(&g, &all, &all);
    assert!(!c.hypothesis_holds);
    assert_eq!(c.intersection_sizes, vec![all.len()]);
}

#[test]
fn a6_certificate_is_reproducible() {
    for id in [CaseId::K360, CaseId::K720] {
        let g = catalog().build(id).unwrap().group;
        let c = certificate_for_case(id, &g).unwrap();
        assert!(c.hypothesis_holds, "{id}");
        assert_eq!((c.orbit_a.len(), c.orbit_b.len()), (5, 5));
        assert_eq!(c.intersection_sizes, vec![0, 2]);
        assert_eq!(sizes_by_matrices(&g, &c.orbit_a, &c.orbit_b), c.intersection_sizes);
    }
}

#[test]
fn invalid_prime_is_rejected() {
    let g = catalog().build(CaseId::K360).unwrap().group;
    assert!(matches!(find_obstruction(&g, 4, Strategy::Sylow), Err(Error::InvalidPrime(4))));
}

#[test]
fn no_certificate_where_sets_exist() {
    // 4.b carries 12 sharply transitive sets; nothing may certify otherwise
    let g = catalog().build(CaseId::B).unwrap().group;
    let c = find_obstruction(&g, 3, Strategy::Sylow).unwrap();
    assert!(!c.hypothesis_holds);
}
