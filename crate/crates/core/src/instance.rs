//! Problem instances: receivers, want-arcs, sender message sets.
//!
//! Vertex `i` (1-based) stands for receiver `i` and for the message `x_i` it
//! already holds. An arc `[i, j]` means receiver `j` wants `x_i`. Sender `s`
//! (also 1-based) can transmit any function of the messages in its set.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub n: usize,
    /// Bits per message.
    pub q: Vec<u32>,
    pub arcs: Vec<(usize, usize)>,
    pub senders: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
    /// Findings that do not make the instance invalid, such as duplicates
    /// that were merged.
    pub notes: Vec<String>,
}

/// Undirected co-ownership graph: `{i, j}` is an edge iff some sender holds
/// both `x_i` and `x_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageGraph {
    pub n: usize,
    adj: Vec<BTreeSet<usize>>,
}

/// Decodes an instance document. Only syntax and field shapes are checked;
/// call [`validate`] for the semantic rules.
pub fn parse_instance(text: &str) -> Result<Instance> {
    Ok(serde_json::from_str(text)?)
}

pub fn validate(inst: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    let n = inst.n;

    if n == 0 {
        violations.push("n: must be at least 1".to_string());
    }
    if inst.q.len() != n {
        violations.push(format!("q: has {} entries, expected n = {}", inst.q.len(), n));
    }
    for (idx, &bits) in inst.q.iter().enumerate() {
        if bits == 0 {
            violations.push(format!("q[{idx}]: message {} has zero length", idx + 1));
        }
    }

    let mut seen_arcs = HashSet::new();
    for (idx, &(i, j)) in inst.arcs.iter().enumerate() {
        let mut bad = false;
        for v in [i, j] {
            if v == 0 || v > n {
                violations.push(format!("arcs[{idx}]: vertex {v} out of range 1..={n}"));
                bad = true;
            }
        }
        if i == j {
            violations.push(format!("arcs[{idx}]: self-arc [{i}, {j}]"));
            bad = true;
        }
        if !bad && !seen_arcs.insert((i, j)) {
            notes.push(format!("arcs[{idx}]: duplicate arc [{i}, {j}] merged"));
        }
    }

    let mut owned = vec![false; n + 1];
    let mut seen_senders: Vec<BTreeSet<usize>> = Vec::new();
    for (idx, members) in inst.senders.iter().enumerate() {
        if members.is_empty() {
            violations.push(format!("senders[{idx}]: sender {} owns no message", idx + 1));
        }
        let mut set = BTreeSet::new();
        for &m in members {
            if m == 0 || m > n {
                violations.push(format!("senders[{idx}]: message {m} out of range 1..={n}"));
                continue;
            }
            owned[m] = true;
            if !set.insert(m) {
                notes.push(format!("senders[{idx}]: duplicate message {m} merged"));
            }
        }
        if let Some(first) = seen_senders.iter().position(|s| *s == set) {
            if !set.is_empty() {
                notes.push(format!(
                    "senders[{idx}]: same message set as senders[{first}]"
                ));
            }
        }
        seen_senders.push(set);
    }
    for (m, &is_owned) in owned.iter().enumerate().skip(1) {
        if !is_owned {
            violations.push(format!("message {m} unowned"));
        }
    }

    ValidationReport {
        ok: violations.is_empty(),
        violations,
        notes,
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_instance(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Returns an error listing every violation if the instance is invalid.
    pub fn check(&self) -> Result<()> {
        let report = validate(self);
        if report.ok {
            Ok(())
        } else {
            Err(Error::InvalidInstance(report.violations))
        }
    }

    pub fn sender_count(&self) -> usize {
        self.senders.len()
    }

    pub fn is_binary(&self) -> bool {
        self.q.iter().all(|&b| b == 1)
    }

    pub fn require_binary(&self) -> Result<()> {
        match self.q.iter().position(|&b| b != 1) {
            Some(idx) => Err(Error::NonBinary {
                message: idx + 1,
                bits: self.q[idx],
            }),
            None => Ok(()),
        }
    }

    /// Deduplicated, sorted arc list.
    pub fn arc_set(&self) -> BTreeSet<(usize, usize)> {
        self.arcs.iter().copied().collect()
    }

    /// Senders (1-based) holding message `m`, ascending.
    pub fn owners(&self, m: usize) -> Vec<usize> {
        self.senders
            .iter()
            .enumerate()
            .filter(|(_, set)| set.contains(&m))
            .map(|(s, _)| s + 1)
            .collect()
    }

    pub fn sender_owns(&self, sender: usize, m: usize) -> bool {
        sender >= 1
            && sender <= self.senders.len()
            && self.senders[sender - 1].contains(&m)
    }

    /// Smallest-id sender holding every message in `msgs`.
    pub fn common_owner(&self, msgs: &[usize]) -> Option<usize> {
        (1..=self.senders.len()).find(|&s| msgs.iter().all(|&m| self.sender_owns(s, m)))
    }

    /// Whether no message is held by two different senders.
    pub fn senders_disjoint(&self) -> bool {
        let mut seen = vec![false; self.n + 1];
        for set in &self.senders {
            let set: BTreeSet<usize> = set.iter().copied().collect();
            for m in set {
                if m <= self.n {
                    if seen[m] {
                        return false;
                    }
                    seen[m] = true;
                }
            }
        }
        true
    }

    pub fn total_bits(&self) -> usize {
        self.q.iter().map(|&b| b as usize).sum()
    }

    /// Position of bit 1 of every message in the flattened bit vector,
    /// indexed by message id (entry 0 unused).
    pub fn bit_offsets(&self) -> Vec<usize> {
        let mut offsets = vec![0; self.n + 2];
        for m in 1..=self.n {
            offsets[m + 1] = offsets[m] + self.q[m - 1] as usize;
        }
        offsets
    }

    /// Messages wanted by receiver `r`, ascending.
    pub fn wants(&self, r: usize) -> Vec<usize> {
        self.arc_set()
            .into_iter()
            .filter(|&(_, j)| j == r)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn derive_message_graph(inst: &Instance) -> MessageGraph {
    let mut graph = MessageGraph::empty(inst.n);
    for set in &inst.senders {
        let members: BTreeSet<usize> = set.iter().copied().filter(|&m| m >= 1 && m <= inst.n).collect();
        for &a in &members {
            for &b in members.range(a + 1..) {
                graph.add_edge(a, b);
            }
        }
    }
    graph
}

impl MessageGraph {
    pub fn empty(n: usize) -> Self {
        MessageGraph {
            n,
            adj: vec![BTreeSet::new(); n + 1],
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "message graph has no self-loops");
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a <= self.n && self.adj[a].contains(&b)
    }

    /// Neighbors of `v`; vertices beyond `n` (dummies) are isolated.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.get(v).into_iter().flat_map(|s| s.iter().copied())
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 1..=self.n {
            for &b in self.adj[a].range(a + 1..) {
                out.push((a, b));
            }
        }
        out
    }

    /// Connected components of the subgraph induced by `within`, each sorted,
    /// listed by smallest member.
    pub fn components_within(&self, within: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for &start in within {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for u in self.neighbors(v) {
                    if within.contains(&u) && seen.insert(u) {
                        stack.push(u);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// Component label of every vertex `1..=n` in the full graph.
    pub fn component_labels(&self) -> Vec<usize> {
        let all: BTreeSet<usize> = (1..=self.n).collect();
        let mut label = vec![0; self.n + 1];
        for (c, comp) in self.components_within(&all).into_iter().enumerate() {
            for v in comp {
                label[v] = c + 1;
            }
        }
        label
    }

    /// Breadth-first spanning tree of the subgraph induced by `within`, rooted
    /// at its smallest vertex, as `(parent, child)` pairs in discovery order.
    /// Returns `None` if the induced subgraph is disconnected.
    pub fn spanning_tree(&self, within: &BTreeSet<usize>) -> Option<Vec<(usize, usize)>> {
        let root = *within.iter().next()?;
        let mut seen = BTreeSet::from([root]);
        let mut queue = std::collections::VecDeque::from([root]);
        let mut edges = Vec::new();
        while let Some(v) = queue.pop_front() {
            for u in self.neighbors(v) {
                if within.contains(&u) && seen.insert(u) {
                    edges.push((v, u));
                    queue.push_back(u);
                }
            }
        }
        (seen.len() == within.len()).then_some(edges)
    }
}
