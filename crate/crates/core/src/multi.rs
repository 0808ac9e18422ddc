//! Multi-sender bounds for binary messages.
//!
//! The lower bound comes from turning the information-flow graph into a
//! grounded one by a sequence of steps on its leaf SCCs. Appending a step
//! never changes the number of non-leaf vertices; pruning removes exactly one.
//! The upper bound comes from a pairwise XOR code over disjoint connecting
//! trees.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::classify::{
    all_degeneracy_witnesses, check_witness, classify_all, classify_unchecked, DegeneracyWitness, LeafSccKind,
};
use crate::code::{LinearIndexCode, Symbol};
use crate::error::{Error, Result};
use crate::graph::{is_grounded, scc_partition, WorkGraph};
use crate::instance::{derive_message_graph, Instance, MessageGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    PruneConnected,
    PruneNonDegenerated,
    AppendDisconnected,
    AppendDegenerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepDetail {
    Pruned {
        vertex: usize,
        removed_arcs: Vec<(usize, usize)>,
    },
    Dummy {
        arc: (usize, usize),
    },
    Witness {
        arc: (usize, usize),
        witness: DegeneracyWitness,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub kind: StepKind,
    pub scc: BTreeSet<usize>,
    pub detail: StepDetail,
    /// 0 during initialization, otherwise the iteration number.
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub bound: usize,
    pub v_out_original: usize,
    pub connected_count: usize,
    pub iterations: usize,
    pub steps: Vec<StepRecord>,
    pub final_graph: WorkGraph,
    /// Whether initialization alone already grounded the graph.
    pub grounded_after_init: bool,
}

impl LowerBoundReport {
    pub fn formula(&self) -> String {
        format!(
            "lower = V_out - (connected + I) = {} - ({} + {}) = {}",
            self.v_out_original, self.connected_count, self.iterations, self.bound
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectingTree {
    pub vertices: BTreeSet<usize>,
    /// Message-graph edges `(parent, child)` spanning `vertices`.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSearch {
    pub trees: Vec<ConnectingTree>,
    /// True when the count is a proven maximum.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveResult {
    pub bound: usize,
    pub states: usize,
    /// False when the state cap cut the search short; `bound` is then the
    /// best value found, still a valid lower bound.
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TightReason {
    NoLeafSccAfterInit,
    DisjointSenders,
    BoundsCoincide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCaps {
    pub exhaustive: bool,
    pub max_states: usize,
    /// Largest `n` for which connecting trees are packed exactly.
    pub tree_exact_max_n: usize,
}

pub const DEFAULT_MAX_STATES: usize = 1_000_000;
pub const DEFAULT_TREE_EXACT_MAX_N: usize = 12;

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            exhaustive: false,
            max_states: DEFAULT_MAX_STATES,
            tree_exact_max_n: DEFAULT_TREE_EXACT_MAX_N,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lower: usize,
    pub upper: usize,
    pub tight: bool,
    pub tight_reason: Option<TightReason>,
    pub lower_report: LowerBoundReport,
    pub exhaustive: Option<ExhaustiveResult>,
    pub trees: Vec<ConnectingTree>,
    pub trees_exact: bool,
    pub code: LinearIndexCode,
}

fn require_leaf_scc(g: &WorkGraph, scc: &BTreeSet<usize>) -> Result<()> {
    if scc_partition(g).is_leaf_scc(scc) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{scc:?} is not a leaf SCC")))
    }
}

fn smallest(scc: &BTreeSet<usize>) -> usize {
    *scc.iter().next().expect("leaf SCC is non-empty")
}

fn apply_prune(g: &mut WorkGraph, v: usize) -> StepDetail {
    StepDetail::Pruned {
        vertex: v,
        removed_arcs: g.remove_out_arcs(v),
    }
}

fn apply_dummy(g: &mut WorkGraph, scc: &BTreeSet<usize>) -> StepDetail {
    let from = smallest(scc);
    let dummy = g.add_dummy();
    g.add_arc(from, dummy);
    StepDetail::Dummy { arc: (from, dummy) }
}

fn apply_witness(g: &mut WorkGraph, w: &DegeneracyWitness) -> StepDetail {
    g.add_arc(w.v_inside, w.target);
    StepDetail::Witness {
        arc: (w.v_inside, w.target),
        witness: w.clone(),
    }
}

/// Adds a dummy leaf and an arc into it from the smallest vertex of a
/// message-disconnected leaf SCC.
pub fn append_disconnected(g: &WorkGraph, u: &MessageGraph, scc: &BTreeSet<usize>) -> Result<WorkGraph> {
    require_leaf_scc(g, scc)?;
    if classify_unchecked(g, u, scc).kind != LeafSccKind::MessageDisconnected {
        return Err(Error::Precondition(format!("{scc:?} is not message-disconnected")));
    }
    let mut out = g.clone();
    apply_dummy(&mut out, scc);
    Ok(out)
}

/// Adds the arc `v_inside -> target` named by a witness.
pub fn append_degenerated(
    g: &WorkGraph,
    u: &MessageGraph,
    scc: &BTreeSet<usize>,
    w: &DegeneracyWitness,
) -> Result<WorkGraph> {
    require_leaf_scc(g, scc)?;
    if !check_witness(g, u, scc, w) {
        return Err(Error::Precondition(format!("invalid degeneracy witness for {scc:?}")));
    }
    let mut out = g.clone();
    apply_witness(&mut out, w);
    Ok(out)
}

/// Removes the out-arcs of the smallest vertex of a leaf SCC.
pub fn prune_leaf_scc(g: &WorkGraph, scc: &BTreeSet<usize>) -> Result<WorkGraph> {
    prune_leaf_scc_at(g, scc, smallest_checked(scc)?)
}

fn smallest_checked(scc: &BTreeSet<usize>) -> Result<usize> {
    scc.iter()
        .next()
        .copied()
        .ok_or_else(|| Error::Precondition("empty vertex set".into()))
}

/// Removes the out-arcs of a chosen vertex of a leaf SCC.
pub fn prune_leaf_scc_at(g: &WorkGraph, scc: &BTreeSet<usize>, v: usize) -> Result<WorkGraph> {
    require_leaf_scc(g, scc)?;
    if !scc.contains(&v) {
        return Err(Error::Precondition(format!("vertex {v} is not in {scc:?}")));
    }
    if let Some(&bad) = scc.iter().find(|&&x| g.weight(x) != 1) {
        return Err(Error::Precondition(format!("vertex {bad} does not carry a single bit")));
    }
    let mut out = g.clone();
    out.remove_out_arcs(v);
    Ok(out)
}

struct Runner<'a> {
    g: WorkGraph,
    u: &'a MessageGraph,
    steps: Vec<StepRecord>,
    iteration: usize,
}

impl Runner<'_> {
    fn record(&mut self, kind: StepKind, scc: BTreeSet<usize>, detail: StepDetail) {
        self.steps.push(StepRecord {
            kind,
            scc,
            detail,
            iteration: self.iteration,
        });
    }

    /// Appends until only message-connected and non-degenerated leaf SCCs
    /// remain. Disconnected SCCs go first, all at once; degenerated ones are
    /// appended one at a time since each can change the others.
    fn settle(&mut self) {
        loop {
            let classes = classify_all(&self.g, self.u);
            let disconnected: Vec<BTreeSet<usize>> = classes
                .iter()
                .filter(|(_, c)| c.kind == LeafSccKind::MessageDisconnected)
                .map(|(s, _)| s.clone())
                .collect();
            if !disconnected.is_empty() {
                for scc in disconnected {
                    let detail = apply_dummy(&mut self.g, &scc);
                    self.record(StepKind::AppendDisconnected, scc, detail);
                }
                continue;
            }
            let degenerated = classes
                .into_iter()
                .find(|(_, c)| c.kind == LeafSccKind::Degenerated);
            match degenerated {
                Some((scc, class)) => {
                    let w = class.degeneracy.expect("degenerated class carries a witness");
                    let detail = apply_witness(&mut self.g, &w);
                    self.record(StepKind::AppendDegenerated, scc, detail);
                }
                None => return,
            }
        }
    }

    /// Among non-degenerated leaf SCCs, the one whose pruning degenerates the
    /// most others.
    fn lookahead_choice(&self, candidates: &[BTreeSet<usize>]) -> BTreeSet<usize> {
        let mut best: Option<(usize, &BTreeSet<usize>)> = None;
        for scc in candidates {
            let mut trial = self.g.clone();
            trial.remove_out_arcs(smallest(scc));
            let gained = classify_all(&trial, self.u)
                .into_iter()
                .filter(|(s, c)| c.kind == LeafSccKind::Degenerated && s != scc && candidates.contains(s))
                .count();
            if best.is_none_or(|(b, _)| gained > b) {
                best = Some((gained, scc));
            }
        }
        best.expect("at least one candidate").1.clone()
    }
}

/// The combined appending-pruning procedure. Initialization prunes every
/// message-connected leaf SCC of the original graph and then appends; each
/// iteration prunes one leaf SCC (message-connected first, otherwise the
/// lookahead choice among non-degenerated ones) and appends again.
pub fn run_append_prune(inst: &Instance) -> Result<LowerBoundReport> {
    inst.check()?;
    inst.require_binary()?;
    let u = derive_message_graph(inst);
    let g = WorkGraph::from_instance(inst);
    let v_out_original = g.v_out();
    let mut run = Runner {
        g,
        u: &u,
        steps: Vec::new(),
        iteration: 0,
    };

    let connected: Vec<BTreeSet<usize>> = classify_all(&run.g, &u)
        .into_iter()
        .filter(|(_, c)| c.kind == LeafSccKind::MessageConnected)
        .map(|(s, _)| s)
        .collect();
    let connected_count = connected.len();
    for scc in connected {
        let detail = apply_prune(&mut run.g, smallest(&scc));
        run.record(StepKind::PruneConnected, scc, detail);
    }
    run.settle();
    let grounded_after_init = is_grounded(&run.g);

    loop {
        let classes = classify_all(&run.g, &u);
        if classes.is_empty() {
            break;
        }
        run.iteration += 1;
        let (kind, scc) = match classes.iter().find(|(_, c)| c.kind == LeafSccKind::MessageConnected) {
            Some((scc, _)) => (StepKind::PruneConnected, scc.clone()),
            None => {
                let candidates: Vec<BTreeSet<usize>> = classes.into_iter().map(|(s, _)| s).collect();
                (StepKind::PruneNonDegenerated, run.lookahead_choice(&candidates))
            }
        };
        let detail = apply_prune(&mut run.g, smallest(&scc));
        run.record(kind, scc, detail);
        run.settle();
    }

    let iterations = run.iteration;
    let bound = v_out_original - connected_count - iterations;
    debug_assert_eq!(bound, run.g.v_out());
    debug_assert!(is_grounded(&run.g));
    Ok(LowerBoundReport {
        bound,
        v_out_original,
        connected_count,
        iterations,
        steps: run.steps,
        final_graph: run.g,
        grounded_after_init,
    })
}

/// Memo key. All dummies are interchangeable leaves with no message-graph
/// edges, so a state is fixed by the arcs among original vertices and by
/// which originals point into some dummy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct StateKey {
    arcs: Vec<(u16, u16)>,
    to_dummy: Vec<u16>,
}

fn state_key(g: &WorkGraph, n: usize) -> StateKey {
    let mut arcs = Vec::new();
    let mut to_dummy = Vec::new();
    for v in 1..=n {
        let mut points_to_dummy = false;
        for &w in g.successors(v) {
            if w <= n {
                arcs.push((v as u16, w as u16));
            } else {
                points_to_dummy = true;
            }
        }
        if points_to_dummy {
            to_dummy.push(v as u16);
        }
    }
    StateKey { arcs, to_dummy }
}

struct Exhaustive<'a> {
    u: &'a MessageGraph,
    n: usize,
    memo: HashMap<StateKey, usize>,
    max_states: usize,
    truncated: bool,
}

impl Exhaustive<'_> {
    fn children(&self, g: &WorkGraph) -> Vec<WorkGraph> {
        let mut out = Vec::new();
        for (scc, class) in classify_all(g, self.u) {
            match class.kind {
                LeafSccKind::MessageConnected | LeafSccKind::NonDegenerated => {
                    for &v in &scc {
                        let mut child = g.clone();
                        child.remove_out_arcs(v);
                        out.push(child);
                    }
                }
                LeafSccKind::MessageDisconnected => {
                    let mut child = g.clone();
                    apply_dummy(&mut child, &scc);
                    out.push(child);
                }
                LeafSccKind::Degenerated => {
                    let mut seen = BTreeSet::new();
                    for w in all_degeneracy_witnesses(g, self.u, &scc) {
                        for &v in &w.s_inside {
                            if seen.insert((v, w.target)) {
                                let mut child = g.clone();
                                child.add_arc(v, w.target);
                                out.push(child);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn visit(&mut self, g: &WorkGraph) -> Option<usize> {
        let key = state_key(g, self.n);
        if let Some(&v) = self.memo.get(&key) {
            return Some(v);
        }
        if self.memo.len() >= self.max_states {
            self.truncated = true;
            return None;
        }
        let children = self.children(g);
        let value = if children.is_empty() {
            Some(g.v_out())
        } else {
            children.iter().filter_map(|c| self.visit(c)).max()
        };
        if let Some(v) = value {
            self.memo.insert(key, v);
        }
        value
    }
}

/// Largest non-leaf vertex count of a grounded graph reachable by any
/// admissible sequence of steps: prune any vertex of a message-connected or
/// non-degenerated leaf SCC, append a disconnected one to a dummy, or append
/// a degenerated one along any witness arc.
pub fn exhaustive_lower_bound(inst: &Instance, max_states: usize) -> Result<ExhaustiveResult> {
    inst.check()?;
    inst.require_binary()?;
    if max_states == 0 {
        return Err(Error::Precondition("state cap must be positive".into()));
    }
    let u = derive_message_graph(inst);
    let g = WorkGraph::from_instance(inst);
    let mut search = Exhaustive {
        u: &u,
        n: inst.n,
        memo: HashMap::new(),
        max_states,
        truncated: false,
    };
    let found = search.visit(&g);
    let bound = match found {
        Some(b) => b,
        None => run_append_prune(inst)?.bound,
    };
    Ok(ExhaustiveResult {
        bound,
        states: search.memo.len(),
        complete: !search.truncated,
    })
}

fn message_connected_vertices(g: &WorkGraph, u: &MessageGraph) -> (Vec<BTreeSet<usize>>, BTreeSet<usize>) {
    let sccs: Vec<BTreeSet<usize>> = classify_all(g, u)
        .into_iter()
        .filter(|(_, c)| c.kind == LeafSccKind::MessageConnected)
        .map(|(s, _)| s)
        .collect();
    let covered = sccs.iter().flatten().copied().collect();
    (sccs, covered)
}

fn is_tree_candidate(g: &WorkGraph, u: &MessageGraph, set: &BTreeSet<usize>, banned: &BTreeSet<usize>) -> bool {
    set.len() >= 2
        && set.iter().all(|&v| {
            !banned.contains(&v) && g.out_degree(v) > 0 && g.successors(v).iter().all(|w| set.contains(w))
        })
        && u.components_within(set).len() == 1
}

fn to_set(mask: u64) -> BTreeSet<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

/// Maximum number of pairwise-disjoint masks, by branching on the lowest
/// still-undecided vertex: either it stays uncovered or one of the sets
/// containing it is taken.
fn max_packing(cands: &[u64], universe: u64, blocked: u64, memo: &mut HashMap<u64, Vec<usize>>) -> Vec<usize> {
    if let Some(hit) = memo.get(&blocked) {
        return hit.clone();
    }
    let live: Vec<usize> = (0..cands.len()).filter(|&i| cands[i] & blocked == 0).collect();
    let result = match live.iter().map(|&i| cands[i] & universe).fold(0, |a, m| a | m) {
        0 => Vec::new(),
        reach => {
            let v = reach.trailing_zeros();
            let bit = 1u64 << v;
            let mut best = max_packing(cands, universe, blocked | bit, memo);
            for &i in live.iter().filter(|&&i| cands[i] & bit != 0) {
                let mut with = max_packing(cands, universe, blocked | cands[i], memo);
                if with.len() + 1 > best.len() {
                    with.insert(0, i);
                    best = with;
                }
            }
            best
        }
    };
    memo.insert(blocked, result.clone());
    result
}

fn tree_of(u: &MessageGraph, vertices: BTreeSet<usize>) -> ConnectingTree {
    let edges = u.spanning_tree(&vertices).expect("candidate is message-connected");
    ConnectingTree { vertices, edges }
}

/// Disjoint connecting trees. Each tree is a vertex set whose out-arcs stay
/// inside it, with no leaves, none of its vertices in a message-connected
/// leaf SCC, and connected in the message graph. Up to `exact_max_n` vertices
/// the count is maximised over inclusion-minimal candidates; beyond that a
/// greedy pass over reachability closures is used.
pub fn find_connecting_trees(inst: &Instance, exact_max_n: usize) -> Result<TreeSearch> {
    inst.check()?;
    inst.require_binary()?;
    let u = derive_message_graph(inst);
    let g = WorkGraph::from_instance(inst);
    let (_, banned) = message_connected_vertices(&g, &u);
    let n = inst.n;

    if n <= exact_max_n.min(20) {
        let mut valid: Vec<u64> = (1u64..1 << n)
            .filter(|&mask| is_tree_candidate(&g, &u, &to_set(mask), &banned))
            .collect();
        valid.sort_by_key(|m| (m.count_ones(), *m));
        let mut minimal: Vec<u64> = Vec::new();
        for m in valid {
            if minimal.iter().all(|&k| k & m != k) {
                minimal.push(m);
            }
        }
        minimal.sort_by_key(|m| m.trailing_zeros());
        let universe = (1u64 << n) - 1;
        let picked = max_packing(&minimal, universe, 0, &mut HashMap::new());
        let mut trees: Vec<ConnectingTree> = picked.into_iter().map(|i| tree_of(&u, to_set(minimal[i]))).collect();
        trees.sort_by_key(|t| smallest(&t.vertices));
        return Ok(TreeSearch { trees, exact: true });
    }

    // Greedy: grow each leaf-free closure by message-graph neighbours'
    // closures until it is connected in the message graph.
    let leaf_free = |set: &BTreeSet<usize>| set.iter().all(|&v| g.out_degree(v) > 0 && !banned.contains(&v));
    let closure = |v: usize| {
        let mut c = g.reachable_from(v);
        c.insert(v);
        c
    };
    let mut seeds: Vec<BTreeSet<usize>> = g.vertices().map(closure).filter(|c| leaf_free(c)).collect();
    seeds.sort_by_key(|s| (s.len(), smallest(s)));
    seeds.dedup();
    let mut used = BTreeSet::new();
    let mut trees = Vec::new();
    for seed in seeds {
        if !seed.is_disjoint(&used) {
            continue;
        }
        let mut grown = seed;
        while u.components_within(&grown).len() > 1 {
            let extension = g
                .vertices()
                .filter(|v| !grown.contains(v) && !used.contains(v))
                .filter(|&v| u.neighbors(v).any(|x| grown.contains(&x)))
                .map(closure)
                .find(|c| leaf_free(c) && c.is_disjoint(&used));
            match extension {
                Some(c) => grown.extend(c),
                None => break,
            }
        }
        if is_tree_candidate(&g, &u, &grown, &banned) {
            used.extend(grown.iter().copied());
            trees.push(tree_of(&u, grown));
        }
    }
    trees.sort_by_key(|t| smallest(&t.vertices));
    Ok(TreeSearch { trees, exact: false })
}

/// Pairwise XOR code: one symbol per tree edge and per spanning-tree edge of
/// each message-connected leaf SCC, then every other non-leaf message uncoded.
/// Each symbol goes to the smallest sender owning all its messages.
pub fn encode_multi(inst: &Instance, trees: &[ConnectingTree]) -> Result<LinearIndexCode> {
    inst.check()?;
    inst.require_binary()?;
    let u = derive_message_graph(inst);
    let g = WorkGraph::from_instance(inst);
    let (connected, banned) = message_connected_vertices(&g, &u);

    let mut symbols = Vec::new();
    let mut covered = BTreeSet::new();
    let pair = |a: usize, b: usize, symbols: &mut Vec<Symbol>| -> Result<()> {
        let (lo, hi) = (a.min(b), a.max(b));
        let sender = inst
            .common_owner(&[lo, hi])
            .ok_or_else(|| Error::Precondition(format!("no sender owns both x{lo} and x{hi}")))?;
        symbols.push(Symbol::xor_of(sender, &[lo, hi]));
        Ok(())
    };

    for tree in trees {
        if !is_tree_candidate(&g, &u, &tree.vertices, &banned) {
            return Err(Error::Precondition(format!("{:?} is not a connecting tree", tree.vertices)));
        }
        if !tree.vertices.is_disjoint(&covered) {
            return Err(Error::Precondition("connecting trees overlap".into()));
        }
        if tree.edges.len() + 1 != tree.vertices.len() {
            return Err(Error::Precondition(format!("{:?} has the wrong edge count", tree.vertices)));
        }
        for &(a, b) in &tree.edges {
            if !tree.vertices.contains(&a) || !tree.vertices.contains(&b) {
                return Err(Error::Precondition(format!("tree edge ({a}, {b}) leaves its tree")));
            }
            pair(a, b, &mut symbols)?;
        }
        covered.extend(tree.vertices.iter().copied());
    }
    for scc in &connected {
        for (a, b) in u.spanning_tree(scc).expect("message-connected") {
            pair(a, b, &mut symbols)?;
        }
        covered.extend(scc.iter().copied());
    }
    for v in g.vertices() {
        if g.out_degree(v) > 0 && !covered.contains(&v) {
            let sender = inst.common_owner(&[v]).expect("validated instance: every message has an owner");
            symbols.push(Symbol::xor_of(sender, &[v]));
        }
    }
    Ok(LinearIndexCode::new(symbols))
}

/// Lower bound, upper bound and pairwise code together.
pub fn bound_multi(inst: &Instance, caps: SearchCaps) -> Result<BoundReport> {
    let lower_report = run_append_prune(inst)?;
    let exhaustive = if caps.exhaustive {
        Some(exhaustive_lower_bound(inst, caps.max_states)?)
    } else {
        None
    };
    let lower = exhaustive.map_or(lower_report.bound, |e| e.bound.max(lower_report.bound));
    let search = find_connecting_trees(inst, caps.tree_exact_max_n)?;
    let code = encode_multi(inst, &search.trees)?;
    let upper = code.len();
    let tight = lower == upper;
    let tight_reason = if !tight {
        None
    } else if inst.senders_disjoint() {
        Some(TightReason::DisjointSenders)
    } else if lower_report.grounded_after_init {
        Some(TightReason::NoLeafSccAfterInit)
    } else {
        Some(TightReason::BoundsCoincide)
    };
    Ok(BoundReport {
        lower,
        upper,
        tight,
        tight_reason,
        lower_report,
        exhaustive,
        trees: search.trees,
        trees_exact: search.exact,
        code,
    })
}
