//! Exact solution of the single-sender case.
//!
//! The optimal codelength is the total message length, minus the leaf
//! vertices' lengths (nobody wants those), minus the shortest message length
//! in each leaf SCC. Pruning one minimum-weight vertex per leaf SCC yields a
//! grounded graph certifying the bound, and a cyclic XOR chain over each leaf
//! SCC meets it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::code::{LinearIndexCode, Symbol};
use crate::error::{Error, Result};
use crate::graph::{leaf_vertices, scc_partition, WorkGraph};
use crate::instance::Instance;

/// Sender id used for codes produced here.
pub const SINGLE_SENDER: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneStep {
    pub scc: BTreeSet<usize>,
    pub selected: usize,
    pub removed_arcs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneTrace {
    pub steps: Vec<PruneStep>,
}

/// The three terms of the closed-form optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBreakdown {
    pub total_weight: u64,
    pub leaf_weight: u64,
    pub leaf_count: usize,
    pub leaf_scc_count: usize,
    /// Sum over leaf SCCs of the shortest message length inside it.
    pub scc_savings: u64,
}

impl LengthBreakdown {
    pub fn value(&self) -> u64 {
        self.total_weight - self.leaf_weight - self.scc_savings
    }

    pub fn formula(&self) -> String {
        format!(
            "l* = {} - {} - {} = {}",
            self.total_weight,
            self.leaf_weight,
            self.scc_savings,
            self.value()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleSolution {
    pub optimal_length: u64,
    pub lower_bound: u64,
    pub breakdown: LengthBreakdown,
    pub code: LinearIndexCode,
    pub trace: PruneTrace,
    pub pruned_graph: WorkGraph,
}

fn min_weight_vertex(g: &WorkGraph, scc: &BTreeSet<usize>) -> usize {
    // BTreeSet iterates ascending, and min_by_key keeps the first minimum.
    *scc.iter()
        .min_by_key(|&&v| g.weight(v))
        .expect("leaf SCC is non-empty")
}

/// Removes all out-arcs of one minimum-weight vertex (smallest id on ties)
/// in every leaf SCC.
pub fn prune_all(g: &WorkGraph) -> (WorkGraph, PruneTrace) {
    debug_assert!(!g.has_dummies(), "prune_all expects a graph without dummies");
    let partition = scc_partition(g);
    let mut pruned = g.clone();
    let mut trace = PruneTrace::default();
    for scc in partition.leaf_sccs() {
        let selected = min_weight_vertex(g, scc);
        let removed_arcs = pruned.remove_out_arcs(selected);
        trace.steps.push(PruneStep {
            scc: scc.clone(),
            selected,
            removed_arcs,
        });
    }
    (pruned, trace)
}

pub fn length_breakdown(g: &WorkGraph) -> LengthBreakdown {
    let partition = scc_partition(g);
    let leaves = leaf_vertices(g);
    LengthBreakdown {
        total_weight: g.total_weight(),
        leaf_weight: leaves.iter().map(|&v| u64::from(g.weight(v))).sum(),
        leaf_count: leaves.len(),
        leaf_scc_count: partition.leaf_count(),
        scc_savings: partition
            .leaf_sccs()
            .map(|scc| u64::from(g.weight(min_weight_vertex(g, scc))))
            .sum(),
    }
}

pub fn lower_bound_single(g: &WorkGraph) -> u64 {
    length_breakdown(g).value()
}

/// Cyclic XOR chains over the first `q_min` bits of each leaf SCC, then every
/// other wanted bit uncoded in ascending (message, bit) order. Leaf messages
/// are never sent.
pub fn encode_single(g: &WorkGraph) -> LinearIndexCode {
    let partition = scc_partition(g);
    let mut coded = Vec::new();
    let mut uncoded: Vec<(usize, usize)> = Vec::new();
    let mut in_leaf_scc = BTreeSet::new();

    for scc in partition.leaf_sccs() {
        let q_min = scc.iter().map(|&v| g.weight(v)).min().unwrap_or(0) as usize;
        let members: Vec<usize> = scc.iter().copied().collect();
        for pair in members.windows(2) {
            for b in 1..=q_min {
                coded.push(Symbol::new(SINGLE_SENDER, vec![(pair[0], b), (pair[1], b)]));
            }
        }
        for &v in &members {
            uncoded.extend((q_min + 1..=g.weight(v) as usize).map(|b| (v, b)));
        }
        in_leaf_scc.extend(members);
    }
    for v in g.vertices() {
        if g.out_degree(v) > 0 && !in_leaf_scc.contains(&v) && !g.is_dummy(v) {
            uncoded.extend((1..=g.weight(v) as usize).map(|b| (v, b)));
        }
    }
    uncoded.sort_unstable();

    coded.extend(uncoded.into_iter().map(|t| Symbol::new(SINGLE_SENDER, vec![t])));
    LinearIndexCode::new(coded)
}

pub fn solve_single(inst: &Instance) -> Result<SingleSolution> {
    inst.check()?;
    if inst.sender_count() != 1 {
        return Err(Error::NotSingleSender(inst.sender_count()));
    }
    let g = WorkGraph::from_instance(inst);
    let (pruned_graph, trace) = prune_all(&g);
    let breakdown = length_breakdown(&g);
    let code = encode_single(&g);
    let lower_bound = breakdown.value();
    debug_assert_eq!(lower_bound, crate::graph::predecessor_weight_bound(&pruned_graph));
    debug_assert_eq!(code.len() as u64, lower_bound);
    Ok(SingleSolution {
        optimal_length: code.len() as u64,
        lower_bound,
        breakdown,
        code,
        trace,
        pruned_graph,
    })
}
