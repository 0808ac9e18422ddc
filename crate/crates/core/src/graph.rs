//! Directed information-flow graphs and the structural queries the bounds
//! are built from: strongly connected components, leaf SCCs, predecessor
//! sets and groundedness.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::instance::Instance;

/// Mutable information-flow graph. Vertices are `1..=len()`; ids past the
/// instance's `n` are dummy vertices created by appending steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkGraph {
    out: Vec<BTreeSet<usize>>,
    weight: Vec<u32>,
    dummy: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccPartition {
    /// Components ordered by smallest member.
    pub components: Vec<BTreeSet<usize>>,
    pub leaf_flags: Vec<bool>,
}

impl SccPartition {
    pub fn leaf_sccs(&self) -> impl Iterator<Item = &BTreeSet<usize>> {
        self.components
            .iter()
            .zip(&self.leaf_flags)
            .filter(|(_, &leaf)| leaf)
            .map(|(c, _)| c)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_flags.iter().filter(|&&f| f).count()
    }

    pub fn is_leaf_scc(&self, set: &BTreeSet<usize>) -> bool {
        self.leaf_sccs().any(|c| c == set)
    }
}

impl WorkGraph {
    /// Graph with vertices `1..=weights.len()` and no arcs.
    pub fn new(weights: Vec<u32>) -> Self {
        let n = weights.len();
        WorkGraph {
            out: vec![BTreeSet::new(); n + 1],
            weight: std::iter::once(0).chain(weights).collect(),
            dummy: vec![false; n + 1],
        }
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let mut g = WorkGraph::new(inst.q.clone());
        for (i, j) in inst.arc_set() {
            g.add_arc(i, j);
        }
        g
    }

    /// Unit-weight graph on `1..=n`.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Self {
        let mut g = WorkGraph::new(vec![1; n]);
        for &(i, j) in arcs {
            g.add_arc(i, j);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.out.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.len()
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weight[v]
    }

    pub fn is_dummy(&self, v: usize) -> bool {
        self.dummy[v]
    }

    pub fn has_dummies(&self) -> bool {
        self.dummy.iter().any(|&d| d)
    }

    pub fn contains(&self, v: usize) -> bool {
        v >= 1 && v <= self.len()
    }

    pub fn add_arc(&mut self, from: usize, to: usize) {
        assert!(from != to, "self-arc {from}->{to}");
        assert!(self.contains(from) && self.contains(to), "arc {from}->{to} out of range");
        assert!(!self.dummy[from], "dummy vertex {from} cannot be an arc source");
        self.out[from].insert(to);
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.contains(from) && self.out[from].contains(&to)
    }

    /// Appends a weight-0 dummy leaf and returns its id.
    pub fn add_dummy(&mut self) -> usize {
        self.out.push(BTreeSet::new());
        self.weight.push(0);
        self.dummy.push(true);
        self.len()
    }

    /// Removes every out-arc of `v`, returning the removed arcs in order.
    pub fn remove_out_arcs(&mut self, v: usize) -> Vec<(usize, usize)> {
        std::mem::take(&mut self.out[v])
            .into_iter()
            .map(|w| (v, w))
            .collect()
    }

    pub fn remove_arc(&mut self, from: usize, to: usize) -> bool {
        self.out[from].remove(&to)
    }

    pub fn successors(&self, v: usize) -> &BTreeSet<usize> {
        &self.out[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.vertices()
            .flat_map(|v| self.out[v].iter().map(move |&w| (v, w)))
            .collect()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(BTreeSet::len).sum()
    }

    pub(crate) fn reverse_adjacency(&self) -> Vec<Vec<usize>> {
        let mut rev = vec![Vec::new(); self.len() + 1];
        for (v, w) in self.arcs() {
            rev[w].push(v);
        }
        rev
    }

    /// Number of non-leaf vertices (dummies are always leaves).
    pub fn v_out(&self) -> usize {
        self.vertices().filter(|&v| self.out_degree(v) > 0).count()
    }

    /// Total weight of non-leaf vertices.
    pub fn non_leaf_weight(&self) -> u64 {
        self.vertices()
            .filter(|&v| self.out_degree(v) > 0)
            .map(|v| u64::from(self.weight[v]))
            .sum()
    }

    pub fn total_weight(&self) -> u64 {
        self.weight.iter().map(|&w| u64::from(w)).sum()
    }

    /// Vertices reachable from `v` by a path of length at least one.
    pub fn reachable_from(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = self.out[v].iter().copied().collect();
        while let Some(u) = stack.pop() {
            if seen.insert(u) {
                stack.extend(self.out[u].iter().copied());
            }
        }
        seen
    }
}

/// Tarjan's algorithm, iterative. Components are returned sorted by their
/// smallest vertex so that traces are reproducible.
pub fn scc_partition(g: &WorkGraph) -> SccPartition {
    let n = g.len();
    let succ: Vec<Vec<usize>> = (0..=n)
        .map(|v| if v == 0 { Vec::new() } else { g.successors(v).iter().copied().collect() })
        .collect();

    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n + 1];
    let mut low = vec![0; n + 1];
    let mut on_stack = vec![false; n + 1];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut components: Vec<BTreeSet<usize>> = Vec::new();

    for root in 1..=n {
        if index[root] != UNSEEN {
            continue;
        }
        // (vertex, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = BTreeSet::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.insert(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(comp);
                }
            }
        }
    }

    components.sort_by_key(|c| *c.iter().next().expect("non-empty component"));
    let leaf_flags = components
        .iter()
        .map(|c| c.len() >= 2 && c.iter().all(|&v| g.successors(v).is_subset(c)))
        .collect();
    SccPartition {
        components,
        leaf_flags,
    }
}

pub fn leaf_sccs(g: &WorkGraph) -> Vec<BTreeSet<usize>> {
    scc_partition(g).leaf_sccs().cloned().collect()
}

/// Vertices with no outgoing arc.
pub fn leaf_vertices(g: &WorkGraph) -> BTreeSet<usize> {
    g.vertices().filter(|&v| g.out_degree(v) == 0).collect()
}

/// All vertices with a directed path to `v`. `v` itself is included only
/// when it lies on a cycle.
pub fn predecessors(g: &WorkGraph, v: usize) -> BTreeSet<usize> {
    predecessors_of_set(g, std::iter::once(v))
}

/// Vertices with a directed path (length at least one) into any target.
pub fn predecessors_of_set(g: &WorkGraph, targets: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let rev = g.reverse_adjacency();
    let mut seen = BTreeSet::new();
    let mut stack: Vec<usize> = targets.into_iter().flat_map(|t| rev[t].iter().copied()).collect();
    while let Some(u) = stack.pop() {
        if seen.insert(u) {
            stack.extend(rev[u].iter().copied());
        }
    }
    seen
}

/// Vertices that are leaves or predecessors of a leaf.
pub fn grounded_vertices(g: &WorkGraph) -> BTreeSet<usize> {
    let leaves = leaf_vertices(g);
    let mut grounded = predecessors_of_set(g, leaves.iter().copied());
    grounded.extend(leaves);
    grounded
}

/// Every vertex is a leaf or reaches one. Computed by backward search from
/// the leaves, without reference to the SCC decomposition.
pub fn is_grounded(g: &WorkGraph) -> bool {
    grounded_vertices(g).len() == g.len()
}

/// Sum of weights of all vertices that are predecessors of some leaf.
pub fn predecessor_weight_bound(g: &WorkGraph) -> u64 {
    let leaves = leaf_vertices(g);
    predecessors_of_set(g, leaves)
        .into_iter()
        .map(|v| u64::from(g.weight(v)))
        .sum()
}
