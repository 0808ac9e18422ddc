#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use uniprior_ic::{Instance, WorkGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data(name: &str) -> Instance {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    Instance::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

pub fn random_arcs(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j && rng.gen_bool(p) {
                arcs.push((i, j));
            }
        }
    }
    arcs
}

/// Arcs biased toward cycles: a few random cycles plus sparse noise.
pub fn cyclic_arcs(rng: &mut impl Rng, n: usize) -> Vec<(usize, usize)> {
    let mut arcs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut verts: Vec<usize> = (1..=n).collect();
    verts.shuffle(rng);
    let mut rest = &verts[..];
    while rest.len() >= 2 {
        let len = rng.gen_range(2..=rest.len().min(4));
        let (cycle, tail) = rest.split_at(len);
        for k in 0..len {
            arcs.insert((cycle[k], cycle[(k + 1) % len]));
        }
        rest = tail;
    }
    let p = rng.gen_range(0.0..0.25);
    arcs.extend(random_arcs(rng, n, p));
    arcs.into_iter().collect()
}

/// Senders covering every message at least once.
pub fn random_senders(rng: &mut impl Rng, n: usize, count: usize, extra: f64) -> Vec<Vec<usize>> {
    let mut senders = vec![BTreeSet::new(); count];
    for m in 1..=n {
        senders[rng.gen_range(0..count)].insert(m);
        for s in senders.iter_mut() {
            if rng.gen_bool(extra) {
                s.insert(m);
            }
        }
    }
    senders.retain(|s| !s.is_empty());
    senders.into_iter().map(|s| s.into_iter().collect()).collect()
}

pub fn disjoint_senders(rng: &mut impl Rng, n: usize) -> Vec<Vec<usize>> {
    let count = rng.gen_range(1..=n);
    random_senders(rng, n, count, 0.0)
}

pub fn binary_instance(rng: &mut impl Rng, n_range: std::ops::RangeInclusive<usize>) -> Instance {
    let n = rng.gen_range(n_range);
    let p = rng.gen_range(0.1..0.5);
    let arcs = if rng.gen_bool(0.6) { cyclic_arcs(rng, n) } else { random_arcs(rng, n, p) };
    let count = rng.gen_range(1..=n.min(4));
    let extra = rng.gen_range(0.0..0.5);
    Instance {
        n,
        q: vec![1; n],
        arcs,
        senders: random_senders(rng, n, count, extra),
    }
}

pub fn single_sender(n: usize, q: Vec<u32>, arcs: Vec<(usize, usize)>) -> Instance {
    Instance {
        n,
        q,
        arcs,
        senders: vec![(1..=n).collect()],
    }
}

/// Reachability closure by repeated squaring of the boolean matrix.
pub fn reach_matrix(g: &WorkGraph) -> Vec<Vec<bool>> {
    let n = g.len();
    let mut r = vec![vec![false; n + 1]; n + 1];
    for (a, b) in g.arcs() {
        r[a][b] = true;
    }
    for k in 1..=n {
        for i in 1..=n {
            if r[i][k] {
                for j in 1..=n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Leaf SCCs from the reachability matrix: classes of mutual reachability
/// with at least two members and nothing reachable outside the class.
pub fn leaf_sccs_by_matrix(g: &WorkGraph) -> Vec<BTreeSet<usize>> {
    let n = g.len();
    let r = reach_matrix(g);
    let mut out = Vec::new();
    let mut seen = vec![false; n + 1];
    for v in 1..=n {
        if seen[v] {
            continue;
        }
        let class: BTreeSet<usize> = (1..=n).filter(|&w| w == v || (r[v][w] && r[w][v])).collect();
        for &w in &class {
            seen[w] = true;
        }
        let closed = (1..=n).all(|w| !r[v][w] || class.contains(&w));
        if class.len() >= 2 && closed {
            out.push(class);
        }
    }
    out
}

/// Every vertex reaches a vertex with no out-arcs, checked on the matrix.
pub fn grounded_by_matrix(g: &WorkGraph) -> bool {
    let r = reach_matrix(g);
    g.vertices()
        .all(|v| g.out_degree(v) == 0 || g.vertices().any(|w| g.out_degree(w) == 0 && r[v][w]))
}

/// Instances rich in leaf SCCs: disjoint short cycles, a few extra vertices
/// feeding into them, and small sender sets, so that semi and degenerated
/// leaf SCCs show up often.
pub fn leafy_instance(rng: &mut impl Rng, n_range: std::ops::RangeInclusive<usize>) -> Instance {
    let n = rng.gen_range(n_range);
    let mut verts: Vec<usize> = (1..=n).collect();
    verts.shuffle(rng);
    let mut arcs = BTreeSet::new();
    let mut in_cycles = Vec::new();
    let mut rest = &verts[..];
    while rest.len() >= 2 && (in_cycles.is_empty() || rng.gen_bool(0.7)) {
        let len = rng.gen_range(2..=rest.len().min(3));
        let (cycle, tail) = rest.split_at(len);
        for k in 0..len {
            arcs.insert((cycle[k], cycle[(k + 1) % len]));
        }
        if len == 3 && rng.gen_bool(0.3) {
            arcs.insert((cycle[1], cycle[0]));
        }
        in_cycles.extend_from_slice(cycle);
        rest = tail;
    }
    for &v in rest {
        let targets = rng.gen_range(0..=2);
        for _ in 0..targets {
            let w = verts[rng.gen_range(0..n)];
            if w != v {
                arcs.insert((v, w));
            }
        }
    }
    if rng.gen_bool(0.3) {
        let a = in_cycles[rng.gen_range(0..in_cycles.len())];
        let b = verts[rng.gen_range(0..n)];
        if a != b {
            arcs.insert((a, b));
        }
    }
    let count = rng.gen_range(2..=5);
    let mut senders: Vec<BTreeSet<usize>> = (0..count)
        .map(|_| {
            let size = rng.gen_range(2..=3.min(n));
            verts.choose_multiple(rng, size).copied().collect()
        })
        .collect();
    for m in 1..=n {
        if !senders.iter().any(|s| s.contains(&m)) {
            let k = rng.gen_range(0..senders.len());
            senders[k].insert(m);
        }
    }
    Instance {
        n,
        q: vec![1; n],
        arcs: arcs.into_iter().collect(),
        senders: senders.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

/// Disjoint 2-cycles covered by a few three-message senders. Bound gaps are
/// common here.
pub fn paired_cycles_instance(rng: &mut impl Rng, max_n: usize) -> Instance {
    let n = 2 * rng.gen_range(2..=max_n / 2);
    let mut arcs = Vec::new();
    for k in 0..n / 2 {
        arcs.push((2 * k + 1, 2 * k + 2));
        arcs.push((2 * k + 2, 2 * k + 1));
    }
    let verts: Vec<usize> = (1..=n).collect();
    let count = rng.gen_range(2..=5);
    let mut senders: Vec<BTreeSet<usize>> = (0..count)
        .map(|_| verts.choose_multiple(rng, 3).copied().collect())
        .collect();
    for m in 1..=n {
        if !senders.iter().any(|s| s.contains(&m)) {
            let k = rng.gen_range(0..count);
            senders[k].insert(m);
        }
    }
    Instance {
        n,
        q: vec![1; n],
        arcs,
        senders: senders.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

/// Draws from the three binary generators in turn.
pub fn mixed_instance(rng: &mut impl Rng, n_range: std::ops::RangeInclusive<usize>) -> Instance {
    match rng.gen_range(0..3) {
        0 => leafy_instance(rng, n_range),
        1 if *n_range.end() >= 4 => paired_cycles_instance(rng, *n_range.end()),
        _ => binary_instance(rng, n_range),
    }
}
