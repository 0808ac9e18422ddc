//! Minimum-length scalar linear code by exhaustive search, for small
//! instances.
//!
//! Bits of messages nobody wants are dropped first: zeroing those coordinates
//! in any valid code gives a valid code that is no longer. What decides
//! validity is the span `V` of the code, so the search runs over subspaces in
//! reduced echelon form, smallest dimension first. A subspace is realisable
//! by `dim V` symbols exactly when it is the sum of its intersections with the
//! senders' coordinate sets.

use serde::{Deserialize, Serialize};

use crate::code::{LinearIndexCode, Symbol};
use crate::error::Result;
use crate::graph::WorkGraph;
use crate::instance::Instance;

pub const DEFAULT_MAX_BITS: usize = 12;
pub const DEFAULT_MAX_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCaps {
    pub max_len: usize,
    pub max_bits: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_len: DEFAULT_MAX_LEN,
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Always "linear optimum": the search covers scalar linear codes only.
    pub label: String,
    pub value: usize,
    pub code: LinearIndexCode,
    /// False when a cap stopped the search; `value` is then the length of the
    /// uncoded scheme, an upper bound.
    pub exact: bool,
}

pub const ORACLE_LABEL: &str = "linear optimum";

struct Space {
    /// `coords[c]` is the (message, bit) behind coordinate `c`.
    coords: Vec<(usize, usize)>,
    own: Vec<u64>,
    wanted: Vec<u64>,
    senders: Vec<u64>,
}

impl Space {
    fn build(inst: &Instance) -> Self {
        let g = WorkGraph::from_instance(inst);
        let mut index = vec![Vec::new(); inst.n + 1];
        let mut coords = Vec::new();
        for m in 1..=inst.n {
            if g.out_degree(m) > 0 {
                for b in 1..=inst.q[m - 1] as usize {
                    index[m].push(coords.len());
                    coords.push((m, b));
                }
            }
        }
        let mask_of = |msgs: &mut dyn Iterator<Item = usize>| -> u64 {
            msgs.flat_map(|m| index[m].iter()).fold(0, |acc, &c| acc | 1 << c)
        };
        let own = (0..=inst.n)
            .map(|r| if r == 0 { 0 } else { mask_of(&mut std::iter::once(r)) })
            .collect();
        let wanted = (0..=inst.n)
            .map(|r| if r == 0 { 0 } else { mask_of(&mut inst.wants(r).into_iter()) })
            .collect();
        let senders = inst.senders.iter().map(|s| mask_of(&mut s.iter().copied())).collect();
        Space {
            coords,
            own,
            wanted,
            senders,
        }
    }

    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn decodable(&self, rows: &[u64]) -> bool {
        self.own.iter().zip(&self.wanted).all(|(&own, &wanted)| {
            if wanted == 0 {
                return true;
            }
            let basis = Basis::from_rows(rows.iter().map(|r| r & !own));
            bits(wanted).all(|c| basis.contains(1 << c))
        })
    }

    /// Span vectors lying inside a single sender's coordinates, ascending.
    fn sender_vectors(&self, rows: &[u64]) -> Vec<u64> {
        let mut out: Vec<u64> = span(rows)
            .filter(|&v| v != 0 && self.senders.iter().any(|&s| v & !s == 0))
            .collect();
        out.sort_unstable();
        out
    }

    fn to_symbol(&self, v: u64) -> Symbol {
        let sender = self
            .senders
            .iter()
            .position(|&s| v & !s == 0)
            .expect("vector lies inside some sender")
            + 1;
        Symbol::new(sender, bits(v).map(|c| self.coords[c]).collect())
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |b| mask >> b & 1 == 1)
}

/// Every vector of the span of `rows`, in Gray-code order.
fn span(rows: &[u64]) -> impl Iterator<Item = u64> + '_ {
    let mut acc = 0u64;
    (0u64..1 << rows.len()).map(move |i| {
        if i > 0 {
            acc ^= rows[i.trailing_zeros() as usize];
        }
        acc
    })
}

struct Basis {
    rows: Vec<u64>,
}

impl Basis {
    fn from_rows(rows: impl Iterator<Item = u64>) -> Self {
        let mut b = Basis { rows: Vec::new() };
        for r in rows {
            b.insert(r);
        }
        b
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let top = 63 - r.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    /// Rows kept sorted by descending leading bit.
    fn insert(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let pos = self.rows.partition_point(|&r| r.leading_zeros() < v.leading_zeros());
        self.rows.insert(pos, v);
        true
    }

    fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }
}

/// Calls `visit` on every `d`-dimensional subspace of `k`-bit space, given by
/// reduced echelon rows whose pivot is their lowest set bit. Stops as soon as
/// `visit` returns true.
fn for_each_subspace(k: usize, d: usize, visit: &mut dyn FnMut(&[u64]) -> bool) -> bool {
    let mut pivots = Vec::with_capacity(d);
    choose_pivots(k, d, 0, &mut pivots, visit)
}

fn choose_pivots(k: usize, d: usize, from: usize, pivots: &mut Vec<usize>, visit: &mut dyn FnMut(&[u64]) -> bool) -> bool {
    if pivots.len() == d {
        let pivot_mask = pivots.iter().fold(0u64, |m, &p| m | 1 << p);
        let mut rows: Vec<u64> = pivots.iter().map(|&p| 1 << p).collect();
        return fill_rows(k, pivots, pivot_mask, 0, &mut rows, visit);
    }
    for p in from..k {
        if k - p < d - pivots.len() {
            break;
        }
        pivots.push(p);
        if choose_pivots(k, d, p + 1, pivots, visit) {
            return true;
        }
        pivots.pop();
    }
    false
}

fn fill_rows(
    k: usize,
    pivots: &[usize],
    pivot_mask: u64,
    i: usize,
    rows: &mut [u64],
    visit: &mut dyn FnMut(&[u64]) -> bool,
) -> bool {
    if i == pivots.len() {
        return visit(rows);
    }
    let free: Vec<usize> = (pivots[i] + 1..k).filter(|c| pivot_mask >> c & 1 == 0).collect();
    for assign in 0u64..1 << free.len() {
        let extra = free
            .iter()
            .enumerate()
            .filter(|(j, _)| assign >> j & 1 == 1)
            .fold(0u64, |m, (_, &c)| m | 1 << c);
        rows[i] = 1 << pivots[i] | extra;
        if fill_rows(k, pivots, pivot_mask, i + 1, rows, visit) {
            return true;
        }
    }
    false
}

fn uncoded(inst: &Instance) -> LinearIndexCode {
    let g = WorkGraph::from_instance(inst);
    let mut symbols = Vec::new();
    for m in 1..=inst.n {
        if g.out_degree(m) > 0 {
            let sender = inst.common_owner(&[m]).expect("every message has an owner");
            for b in 1..=inst.q[m - 1] as usize {
                symbols.push(Symbol::new(sender, vec![(m, b)]));
            }
        }
    }
    LinearIndexCode::new(symbols)
}

/// Shortest scalar linear code for the instance, with a witness. Beyond the
/// caps, returns the uncoded scheme flagged as not exact.
pub fn oracle_min_linear(inst: &Instance, caps: OracleCaps) -> Result<OracleResult> {
    inst.check()?;
    let fallback = |inst: &Instance| {
        let code = uncoded(inst);
        OracleResult {
            label: ORACLE_LABEL.into(),
            value: code.len(),
            code,
            exact: false,
        }
    };
    if inst.total_bits() > caps.max_bits || inst.total_bits() > 63 {
        return Ok(fallback(inst));
    }
    let space = Space::build(inst);
    let k = space.dim();
    let start = space.wanted.iter().map(|w| w.count_ones() as usize).max().unwrap_or(0);

    for d in start..=k.min(caps.max_len) {
        let mut witness = None;
        for_each_subspace(k, d, &mut |rows| {
            if !space.decodable(rows) {
                return false;
            }
            let candidates = space.sender_vectors(rows);
            let mut basis = Basis { rows: Vec::new() };
            let mut chosen = Vec::new();
            for v in candidates {
                if basis.insert(v) {
                    chosen.push(v);
                }
            }
            if chosen.len() == d {
                witness = Some(chosen);
                true
            } else {
                false
            }
        });
        if let Some(vectors) = witness {
            let code = LinearIndexCode::new(vectors.into_iter().map(|v| space.to_symbol(v)).collect());
            return Ok(OracleResult {
                label: ORACLE_LABEL.into(),
                value: d,
                code,
                exact: true,
            });
        }
    }
    Ok(fallback(inst))
}
