mod common;

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rmlt::catalog::CaseId;
use rmlt::classify::{
    autotopism_group, fingerprint, isotopy_witness_verify, parastrophy_classes, spread_to_quasifield,
    ParastrophyClass,
};
use rmlt::lingroup::{is_fixed_point_free, LinearGroup};
use rmlt::stset::{build_graph, enumerate_cliques, Clique, PermGraph, SpreadSet};

use common::{catalog, is_spread_set};

/// Everything the properties need about one case, computed once.
struct Case {
    id: CaseId,
    group: Arc<LinearGroup>,
    normalizer: Arc<LinearGroup>,
    graph: PermGraph,
    cliques: Vec<Clique>,
    spreads: Vec<SpreadSet>,
    classes: Vec<ParastrophyClass>,
}

impl std::fmt::Debug for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.id)
    }
}

const SMALL: [CaseId; 6] = [CaseId::A48, CaseId::A96, CaseId::B, CaseId::C, CaseId::F, CaseId::L];

fn case(id: CaseId) -> &'static Case {
    static CASES: [OnceLock<Case>; 6] = [const { OnceLock::new() }; 6];
    let slot = SMALL.iter().position(|&c| c == id).expect("small case");
    CASES[slot].get_or_init(|| {
        let group = catalog().build(id).unwrap().group;
        let normalizer = catalog().normalizer(id).unwrap();
        let graph = build_graph(group.clone());
        let cliques = enumerate_cliques(&graph, graph.full_clique_size());
        let spreads: Vec<SpreadSet> = cliques
            .iter()
            .map(|c| SpreadSet::from_clique(&graph, c, Some(id)))
            .collect();
        let classes = parastrophy_classes(&spreads, &group, &normalizer).unwrap();
        Case {
            id,
            group,
            normalizer,
            graph,
            cliques,
            spreads,
            classes,
        }
    })
}

fn any_case() -> impl Strategy<Value = &'static Case> {
    prop::sample::select(SMALL.to_vec()).prop_map(case)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric_and_fpf_quotient(c in any_case(), a in any::<u32>(), b in any::<u32>()) {
        let n = c.graph.vertex_count() as u32;
        let (u, v) = (a % n, b % n);
        prop_assert_eq!(c.graph.adjacent(u, v), c.graph.adjacent(v, u));
        if u != v {
            let q = c.graph.matrix(u) * c.graph.matrix(v).inv().unwrap();
            prop_assert_eq!(c.graph.adjacent(u, v), is_fixed_point_free(&q));
        }
    }

    #[test]
    fn fingerprint_ignores_member_order(c in any_case(), pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let s = &c.spreads[pick.index(c.spreads.len())];
        let mut shuffled = s.clone();
        // deterministic Fisher-Yates from the seed
        let mut x = seed | 1;
        for i in (1..shuffled.matrices.len()).rev() {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            shuffled.matrices.swap(i, (x % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(fingerprint(&shuffled), fingerprint(s));
    }

    #[test]
    fn clique_set_is_invariant_under_normalizer_conjugation(c in any_case(), t in any::<prop::sample::Index>()) {
        let t = c.normalizer.element(t.index(c.normalizer.order()) as u32);
        let ti = t.inv().unwrap();
        let all: BTreeSet<Vec<u32>> = c.cliques.iter().map(|k| k.vertices().to_vec()).collect();
        for k in &c.cliques {
            let image: Vec<u32> = c.graph
                .clique_matrices(k)
                .iter()
                .map(|m| c.graph.vertex_of_matrix(&(ti * *m * t)).expect("conjugate is fpf in G"))
                .collect();
            prop_assert!(all.contains(Clique::new(image).vertices()));
        }
    }

    #[test]
    fn quasifield_axioms_hold(c in any_case(), pick in any::<prop::sample::Index>()) {
        let s = &c.spreads[pick.index(c.spreads.len())];
        let q = spread_to_quasifield(s).unwrap();
        let r = q.check_axioms();
        prop_assert!(r.all(), "{:?}", r);
    }
}

#[test]
fn every_clique_is_a_spread_set() {
    for id in SMALL {
        let c = case(id);
        assert!(!c.cliques.is_empty(), "{id}");
        for s in &c.spreads {
            assert!(is_spread_set(&s.matrices), "{id}");
        }
    }
}

#[test]
fn class_members_add_up_and_witnesses_replay() {
    for id in SMALL {
        let c = case(id);
        let total: usize = c.classes.iter().map(|k| k.member_count).sum();
        assert_eq!(total, c.cliques.len(), "{id}");
        for k in &c.classes {
            for (m, w) in k.members.iter().zip(&k.witnesses) {
                assert!(
                    isotopy_witness_verify(&k.representative, &c.spreads[*m], &w.t, &w.u, w.inverted),
                    "{id}: witness for member {m}"
                );
            }
        }
    }
}

#[test]
fn fingerprints_are_constant_on_classes() {
    for id in SMALL {
        let c = case(id);
        for k in &c.classes {
            let f = fingerprint(&k.representative);
            for &m in &k.members {
                assert_eq!(fingerprint(&c.spreads[m]), f, "{id}: member {m}");
            }
        }
    }
}

#[test]
fn autotopisms_agree_on_classes_and_satisfy_the_normal_form() {
    // the 7^2 and 2^4 scales, exhaustively
    for id in [CaseId::B, CaseId::L] {
        let c = case(id);
        for k in &c.classes {
            let Ok(rep) = autotopism_group(&k.representative, &c.group, &c.normalizer) else {
                continue; // the class does not generate G
            };
            for &m in &k.members {
                let a = autotopism_group(&c.spreads[m], &c.group, &c.normalizer).unwrap();
                assert_eq!(a.order, rep.order, "{id}");
                assert_eq!(a.orbit_profile, rep.orbit_profile, "{id}");
                assert_eq!(a.orbit_profile.iter().sum::<usize>(), c.spreads[m].len() + 2);
                for (t, u) in &a.pairs {
                    assert!(c.group.contains(&(t.inv().unwrap() * *u)), "{id}");
                }
            }
        }
    }
}

#[test]
fn a_regular_group_is_its_own_unique_sharply_transitive_set() {
    // SL(2,3) is regular on the 24 nonzero vectors of GF(5)^2
    let g0 = catalog().build(CaseId::A48).unwrap().g0;
    assert_eq!(g0.order(), 24);
    let graph = build_graph(g0.clone());
    assert_eq!(graph.vertex_count(), 23);
    assert_eq!(graph.edge_count(), 23 * 22 / 2);
    let cs = enumerate_cliques(&graph, graph.full_clique_size());
    assert_eq!(cs.len(), 1);
    let s = SpreadSet::from_clique(&graph, &cs[0], None);
    let mut all = g0.elements().to_vec();
    all.sort_unstable();
    assert_eq!(s.matrices, all);
}

#[test]
fn recorded_graph_sizes() {
    // regression values from the first verified runs
    for (id, vertices) in [(CaseId::B, 127), (CaseId::F, 551)] {
        let g = catalog().build(id).unwrap().group;
        assert_eq!(build_graph(g).vertex_count(), vertices, "{id}");
    }
    for (id, vertices, edges) in [(CaseId::K360, 184, 8336), (CaseId::K720, 304, 19136)] {
        let graph = build_graph(catalog().build(id).unwrap().group);
        assert_eq!((graph.vertex_count(), graph.edge_count()), (vertices, edges), "{id}");
    }
}
