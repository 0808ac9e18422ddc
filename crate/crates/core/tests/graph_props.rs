mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use uniprior_ic::graph::{predecessors, scc_partition};
use uniprior_ic::{is_grounded, leaf_sccs, WorkGraph};

fn digraph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=10).prop_flat_map(|n| {
        let arcs = proptest::collection::vec((1..=n, 1..=n), 0..=3 * n)
            .prop_map(|a| a.into_iter().filter(|(i, j)| i != j).collect::<Vec<_>>());
        (Just(n), arcs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scc_partition_is_a_partition_with_acyclic_condensation((n, arcs) in digraph()) {
        let g = WorkGraph::from_arcs(n, &arcs);
        let p = scc_partition(&g);
        let mut seen = BTreeSet::new();
        for c in &p.components {
            for &v in c {
                prop_assert!(seen.insert(v));
            }
        }
        prop_assert_eq!(seen, (1..=n).collect::<BTreeSet<_>>());
        let firsts: Vec<usize> = p.components.iter().map(|c| *c.iter().next().unwrap()).collect();
        prop_assert!(firsts.windows(2).all(|w| w[0] < w[1]));

        let reach = common::reach_matrix(&g);
        for c in &p.components {
            for &a in c {
                for &b in c {
                    prop_assert!(a == b || (reach[a][b] && reach[b][a]));
                }
            }
        }
        // Acyclic condensation: no two components reach each other.
        for (x, cx) in p.components.iter().enumerate() {
            for cy in &p.components[x + 1..] {
                let a = *cx.iter().next().unwrap();
                let b = *cy.iter().next().unwrap();
                prop_assert!(!(reach[a][b] && reach[b][a]));
            }
        }
    }

    #[test]
    fn leaf_sccs_match_matrix_oracle((n, arcs) in digraph()) {
        let g = WorkGraph::from_arcs(n, &arcs);
        prop_assert_eq!(leaf_sccs(&g), common::leaf_sccs_by_matrix(&g));
    }

    #[test]
    fn grounded_iff_no_leaf_scc((n, arcs) in digraph()) {
        let g = WorkGraph::from_arcs(n, &arcs);
        prop_assert_eq!(is_grounded(&g), leaf_sccs(&g).is_empty());
        prop_assert_eq!(is_grounded(&g), common::grounded_by_matrix(&g));
    }

    #[test]
    fn predecessors_are_transitive((n, arcs) in digraph()) {
        let g = WorkGraph::from_arcs(n, &arcs);
        let preds: Vec<BTreeSet<usize>> = (0..=n).map(|v| if v == 0 { BTreeSet::new() } else { predecessors(&g, v) }).collect();
        for w in 1..=n {
            for &v in &preds[w] {
                prop_assert!(preds[v].is_subset(&preds[w]));
            }
        }
    }

    #[test]
    fn removing_an_arc_never_grows_predecessor_sets((n, arcs) in digraph(), pick in any::<prop::sample::Index>()) {
        prop_assume!(!arcs.is_empty());
        let g = WorkGraph::from_arcs(n, &arcs);
        let (a, b) = arcs[pick.index(arcs.len())];
        let mut h = g.clone();
        h.remove_arc(a, b);
        for v in 1..=n {
            prop_assert!(predecessors(&h, v).is_subset(&predecessors(&g, v)));
        }
    }
}
