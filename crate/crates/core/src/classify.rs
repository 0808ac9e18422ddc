//! Classification of leaf SCCs against the message graph.
//!
//! A leaf SCC is message-connected when the message graph restricted to it is
//! connected, message-disconnected when two of its vertices are not joined by
//! any message-graph path at all, and semi otherwise. A semi leaf SCC is
//! degenerated when a [`DegeneracyWitness`] exists.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{grounded_vertices, leaf_vertices, predecessors_of_set, scc_partition, WorkGraph};
use crate::instance::MessageGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LeafSccKind {
    MessageConnected,
    MessageDisconnected,
    Degenerated,
    NonDegenerated,
}

/// Certificate that a semi leaf SCC can be appended.
///
/// * no message-graph edge joins `s_inside` to the rest of the SCC;
/// * `s_outside` holds at most one non-leaf vertex;
/// * every message-graph neighbor of `s_inside` is in `s_outside` or is a
///   predecessor of a vertex in `s_outside`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegeneracyWitness {
    pub s_inside: BTreeSet<usize>,
    pub s_outside: BTreeSet<usize>,
    pub v_inside: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafSccClass {
    pub kind: LeafSccKind,
    pub disconnected_pair: Option<(usize, usize)>,
    pub degeneracy: Option<DegeneracyWitness>,
}

impl LeafSccClass {
    fn plain(kind: LeafSccKind) -> Self {
        LeafSccClass {
            kind,
            disconnected_pair: None,
            degeneracy: None,
        }
    }
}

pub fn classify_leaf_scc(g: &WorkGraph, u: &MessageGraph, scc: &BTreeSet<usize>) -> Result<LeafSccClass> {
    if !scc_partition(g).is_leaf_scc(scc) {
        return Err(Error::Precondition(format!("{scc:?} is not a leaf SCC")));
    }
    Ok(classify_unchecked(g, u, scc))
}

/// Classification without re-deriving the SCC partition; `scc` must be a leaf
/// SCC of `g`.
pub(crate) fn classify_unchecked(g: &WorkGraph, u: &MessageGraph, scc: &BTreeSet<usize>) -> LeafSccClass {
    if u.components_within(scc).len() == 1 {
        return LeafSccClass::plain(LeafSccKind::MessageConnected);
    }
    if let Some(pair) = disconnected_pair(u, scc) {
        return LeafSccClass {
            kind: LeafSccKind::MessageDisconnected,
            disconnected_pair: Some(pair),
            degeneracy: None,
        };
    }
    match find_degeneracy_witness(g, u, scc) {
        Some(w) => LeafSccClass {
            kind: LeafSccKind::Degenerated,
            disconnected_pair: None,
            degeneracy: Some(w),
        },
        None => LeafSccClass::plain(LeafSccKind::NonDegenerated),
    }
}

/// Smallest vertex of the SCC paired with the smallest SCC vertex it cannot
/// reach in the full message graph. If the smallest vertex reaches every
/// other, all pairs are connected.
fn disconnected_pair(u: &MessageGraph, scc: &BTreeSet<usize>) -> Option<(usize, usize)> {
    let labels = u.component_labels();
    let label = |v: usize| labels.get(v).copied().unwrap_or(0);
    let first = *scc.iter().next()?;
    // Dummies (ids past n) are isolated; they never sit inside an SCC anyway.
    scc.iter()
        .skip(1)
        .find(|&&v| label(v) == 0 || label(v) != label(first))
        .map(|&v| (first, v))
}

/// Canonical search: `s_inside` ranges over the message-graph components
/// inside the SCC, and `s_outside` is every leaf outside the SCC plus at most
/// one extra non-leaf vertex `w`, tried as "none" first and then in ascending
/// order. Any valid `s_inside` is a union of such components and each member
/// component works with the same `s_outside`, so the search is complete.
pub fn find_degeneracy_witness(g: &WorkGraph, u: &MessageGraph, scc: &BTreeSet<usize>) -> Option<DegeneracyWitness> {
    witness_search(g, u, scc, true).into_iter().next()
}

/// Every canonical witness: each valid component paired with each valid
/// choice of extra vertex, in the same order `find_degeneracy_witness` tries
/// them.
pub fn all_degeneracy_witnesses(g: &WorkGraph, u: &MessageGraph, scc: &BTreeSet<usize>) -> Vec<DegeneracyWitness> {
    witness_search(g, u, scc, false)
}

fn witness_search(g: &WorkGraph, u: &MessageGraph, scc: &BTreeSet<usize>, first_only: bool) -> Vec<DegeneracyWitness> {
    let mut found = Vec::new();
    let leaves = leaf_vertices(g);
    let outside_leaves: BTreeSet<usize> = leaves.iter().copied().filter(|v| !scc.contains(v)).collect();
    let grounded = grounded_vertices(g);
    let non_leaf_outside: Vec<usize> = g
        .vertices()
        .filter(|v| !scc.contains(v) && !leaves.contains(v))
        .collect();
    let mut pred_cache: Vec<Option<BTreeSet<usize>>> = vec![None; g.len() + 1];

    for s_inside in u.components_within(scc) {
        if s_inside.len() == scc.len() {
            continue;
        }
        let neighbors: BTreeSet<usize> = s_inside
            .iter()
            .flat_map(|&v| u.neighbors(v))
            .filter(|v| !s_inside.contains(v))
            .collect();
        let v_inside = *s_inside.iter().next().expect("component is non-empty");

        // Covered without any extra vertex: leaves, or grounded non-leaves.
        let uncovered: BTreeSet<usize> = neighbors
            .iter()
            .copied()
            .filter(|v| !grounded.contains(v))
            .collect();
        if uncovered.is_empty() && !outside_leaves.is_empty() {
            let target = *outside_leaves.iter().next().expect("non-empty");
            found.push(DegeneracyWitness {
                s_inside: s_inside.clone(),
                s_outside: outside_leaves.clone(),
                v_inside,
                target,
            });
            if first_only {
                return found;
            }
        }
        for &w in &non_leaf_outside {
            let preds = pred_cache[w].get_or_insert_with(|| predecessors_of_set(g, [w]));
            if uncovered.iter().all(|&v| v == w || preds.contains(&v)) {
                let mut s_outside = outside_leaves.clone();
                s_outside.insert(w);
                found.push(DegeneracyWitness {
                    s_inside: s_inside.clone(),
                    s_outside,
                    v_inside,
                    target: w,
                });
                if first_only {
                    return found;
                }
            }
        }
    }
    found
}

/// Checks the three witness conditions directly, plus the shape constraints
/// (non-empty proper `s_inside`, `s_outside` outside the SCC, `v_inside` and
/// `target` drawn from the right sets and the target rule).
pub fn check_witness(g: &WorkGraph, u: &MessageGraph, scc: &BTreeSet<usize>, w: &DegeneracyWitness) -> bool {
    if w.s_inside.is_empty() || !w.s_inside.is_subset(scc) || w.s_inside.len() == scc.len() {
        return false;
    }
    if w.s_outside.is_empty() || w.s_outside.iter().any(|v| scc.contains(v) || !g.contains(*v)) {
        return false;
    }
    if !w.s_inside.contains(&w.v_inside) || !w.s_outside.contains(&w.target) {
        return false;
    }
    let rest: BTreeSet<usize> = scc.difference(&w.s_inside).copied().collect();
    if w.s_inside.iter().any(|&a| u.neighbors(a).any(|b| rest.contains(&b))) {
        return false;
    }
    let non_leaf: Vec<usize> = w.s_outside.iter().copied().filter(|&v| g.out_degree(v) > 0).collect();
    if non_leaf.len() > 1 {
        return false;
    }
    if let Some(&only) = non_leaf.first() {
        if w.target != only {
            return false;
        }
    }
    let preds = predecessors_of_set(g, w.s_outside.iter().copied());
    w.s_inside
        .iter()
        .flat_map(|&v| u.neighbors(v))
        .filter(|v| !w.s_inside.contains(v))
        .all(|v| w.s_outside.contains(&v) || preds.contains(&v))
}

/// Every leaf SCC of `g` with its classification, in partition order.
pub fn classify_all(g: &WorkGraph, u: &MessageGraph) -> Vec<(BTreeSet<usize>, LeafSccClass)> {
    scc_partition(g)
        .leaf_sccs()
        .map(|scc| (scc.clone(), classify_unchecked(g, u, scc)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{derive_message_graph, Instance};

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn message_graph(n: usize, edges: &[(usize, usize)]) -> MessageGraph {
        let mut u = MessageGraph::empty(n);
        for &(a, b) in edges {
            u.add_edge(a, b);
        }
        u
    }

    fn three_cycles() -> (WorkGraph, MessageGraph) {
        let inst = Instance {
            n: 6,
            q: vec![1; 6],
            arcs: vec![(1, 2), (2, 1), (3, 4), (4, 3), (5, 6), (6, 5)],
            senders: vec![vec![1, 3, 5], vec![3, 5, 2], vec![5, 2, 4], vec![2, 4, 6]],
        };
        (WorkGraph::from_instance(&inst), derive_message_graph(&inst))
    }

    #[test]
    fn connected_two_cycle() {
        let g = WorkGraph::from_arcs(2, &[(1, 2), (2, 1)]);
        let u = message_graph(2, &[(1, 2)]);
        let c = classify_leaf_scc(&g, &u, &set(&[1, 2])).unwrap();
        assert_eq!(c.kind, LeafSccKind::MessageConnected);
    }

    #[test]
    fn split_four_cycle_is_disconnected() {
        let g = WorkGraph::from_arcs(4, &[(1, 3), (4, 2), (1, 2), (2, 1), (3, 4), (4, 3)]);
        let u = message_graph(4, &[(1, 2), (3, 4)]);
        let c = classify_leaf_scc(&g, &u, &set(&[1, 2, 3, 4])).unwrap();
        assert_eq!(c.kind, LeafSccKind::MessageDisconnected);
        assert_eq!(c.disconnected_pair, Some((1, 3)));
    }

    #[test]
    fn three_cycles_start_non_degenerated() {
        let (g, u) = three_cycles();
        for scc in [set(&[1, 2]), set(&[3, 4]), set(&[5, 6])] {
            assert!(find_degeneracy_witness(&g, &u, &scc).is_none());
            let c = classify_leaf_scc(&g, &u, &scc).unwrap();
            assert_eq!(c.kind, LeafSccKind::NonDegenerated);
        }
    }

    #[test]
    fn three_cycles_degenerate_after_pruning_vertex_three() {
        let (mut g, u) = three_cycles();
        g.remove_out_arcs(3);
        let w = find_degeneracy_witness(&g, &u, &set(&[1, 2])).unwrap();
        assert_eq!(w.s_inside, set(&[1]));
        assert_eq!(w.s_outside, set(&[3, 5]));
        assert_eq!((w.v_inside, w.target), (1, 5));
        assert!(check_witness(&g, &u, &set(&[1, 2]), &w));
    }

    #[test]
    fn semi_triangle_witness() {
        let g = WorkGraph::from_arcs(3, &[(1, 2), (2, 1), (3, 1)]);
        let u = message_graph(3, &[(1, 3), (2, 3)]);
        let w = find_degeneracy_witness(&g, &u, &set(&[1, 2])).unwrap();
        assert_eq!(w.s_inside, set(&[1]));
        assert_eq!(w.s_outside, set(&[3]));
        assert_eq!((w.v_inside, w.target), (1, 3));
        let c = classify_leaf_scc(&g, &u, &set(&[1, 2])).unwrap();
        assert_eq!(c.kind, LeafSccKind::Degenerated);
    }

    #[test]
    fn non_leaf_scc_is_rejected() {
        let g = WorkGraph::from_arcs(3, &[(1, 2), (2, 1), (2, 3)]);
        let u = message_graph(3, &[(1, 2)]);
        assert!(matches!(
            classify_leaf_scc(&g, &u, &set(&[1, 2])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn checker_rejects_bad_witnesses() {
        let g = WorkGraph::from_arcs(3, &[(1, 2), (2, 1), (3, 1)]);
        let u = message_graph(3, &[(1, 3), (2, 3)]);
        let scc = set(&[1, 2]);
        let good = find_degeneracy_witness(&g, &u, &scc).unwrap();
        let mut whole = good.clone();
        whole.s_inside = set(&[1, 2]);
        assert!(!check_witness(&g, &u, &scc, &whole));
        let mut empty_out = good.clone();
        empty_out.s_outside = BTreeSet::new();
        assert!(!check_witness(&g, &u, &scc, &empty_out));
    }
}
