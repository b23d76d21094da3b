mod common;

use rmlt::catalog::CaseId;
use rmlt::classify::parastrophy_classes;
use rmlt::stset::{build_graph, enumerate_cliques, SpreadSet};

use common::{brute_force_classes, catalog};

fn compare(id: CaseId) {
    let g = catalog().build(id).unwrap().group;
    let n = catalog().normalizer(id).unwrap();
    let graph = build_graph(g.clone());
    let cliques = enumerate_cliques(&graph, graph.full_clique_size());
    let spreads: Vec<SpreadSet> = cliques.iter().map(|c| SpreadSet::from_clique(&graph, c, Some(id))).collect();

    let mut fast: Vec<Vec<usize>> = parastrophy_classes(&spreads, &g, &n)
        .unwrap()
        .into_iter()
        .map(|c| c.members)
        .collect();
    fast.sort();
    let sets: Vec<_> = spreads.iter().map(|s| s.matrices.clone()).collect();
    let mut slow = brute_force_classes(&sets, &g, &n);
    slow.sort();
    assert_eq!(fast, slow, "{id}");
}

#[test]
fn restricted_generators_match_the_full_action_on_4a48() {
    compare(CaseId::A48);
}

#[test]
fn restricted_generators_match_the_full_action_on_4b() {
    compare(CaseId::B);
}
