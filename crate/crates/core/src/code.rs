//! Scalar binary linear index codes and their decodability checks.
//!
//! A code is an ordered list of transmitted bits. Each bit is the XOR of a set
//! of message bits, all held by the sender that transmits it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitRow, EchelonBasis};
use crate::instance::Instance;

/// One message bit: `(message, bit)`, both 1-based.
pub type Term = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Symbol {
    pub sender: usize,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearIndexCode {
    pub symbols: Vec<Symbol>,
}

/// A wanted bit some receiver cannot recover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecodeFailure {
    pub receiver: usize,
    pub message: usize,
    pub bit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub failures: Vec<DecodeFailure>,
}

impl Symbol {
    pub fn new(sender: usize, terms: Vec<Term>) -> Self {
        Symbol { sender, terms }
    }

    /// XOR of bit 1 of each listed message.
    pub fn xor_of(sender: usize, messages: &[usize]) -> Self {
        Symbol::new(sender, messages.iter().map(|&m| (m, 1)).collect())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (m, b)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "x{m}[{b}]")?;
        }
        write!(f, "  (sender {})", self.sender)
    }
}

impl LinearIndexCode {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        LinearIndexCode { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("code serializes")
    }

    /// Checks that every symbol is transmittable: known sender, non-empty and
    /// duplicate-free terms, every term a real bit of a message the sender
    /// holds.
    pub fn check_well_formed(&self, inst: &Instance) -> Result<()> {
        for (k, sym) in self.symbols.iter().enumerate() {
            let idx = k + 1;
            if sym.sender == 0 || sym.sender > inst.sender_count() {
                return Err(Error::MalformedCode(format!(
                    "symbol {idx}: sender {} does not exist",
                    sym.sender
                )));
            }
            if sym.terms.is_empty() {
                return Err(Error::MalformedCode(format!("symbol {idx}: no terms")));
            }
            let mut seen = BTreeSet::new();
            for &(m, b) in &sym.terms {
                if m == 0 || m > inst.n {
                    return Err(Error::MalformedCode(format!(
                        "symbol {idx}: message {m} does not exist"
                    )));
                }
                if b == 0 || b > inst.q[m - 1] as usize {
                    return Err(Error::MalformedCode(format!(
                        "symbol {idx}: message {m} has no bit {b}"
                    )));
                }
                if !inst.sender_owns(sym.sender, m) {
                    return Err(Error::MalformedCode(format!(
                        "symbol {idx}: sender {} does not hold x{m}",
                        sym.sender
                    )));
                }
                if !seen.insert((m, b)) {
                    return Err(Error::MalformedCode(format!(
                        "symbol {idx}: term x{m}[{b}] repeated"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Coefficient vectors over the flattened message bits.
    pub fn rows(&self, inst: &Instance) -> Vec<BitRow> {
        let offsets = inst.bit_offsets();
        let bits = inst.total_bits();
        self.symbols
            .iter()
            .map(|s| BitRow::from_positions(bits, s.terms.iter().map(|&(m, b)| offsets[m] + b - 1)))
            .collect()
    }
}

impl fmt::Display for LinearIndexCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.symbols.iter().enumerate() {
            writeln!(f, "  c{} = {}", k + 1, s)?;
        }
        Ok(())
    }
}

impl VerifyReport {
    fn from_failures(mut failures: Vec<DecodeFailure>) -> Self {
        failures.sort();
        VerifyReport {
            valid: failures.is_empty(),
            failures,
        }
    }
}

/// Every wanted bit as (receiver, message, bit), in ascending order.
fn wanted_bits(inst: &Instance) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut per_receiver: Vec<Vec<(usize, usize)>> = vec![Vec::new(); inst.n + 1];
    for (i, j) in inst.arc_set() {
        for b in 1..=inst.q[i - 1] as usize {
            per_receiver[j].push((i, b));
        }
    }
    per_receiver
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(r, mut w)| {
            w.sort_unstable();
            (r, w)
        })
        .collect()
}

fn receiver_mask(inst: &Instance, offsets: &[usize], r: usize) -> BitRow {
    BitRow::from_positions(inst.total_bits(), offsets[r]..offsets[r + 1])
}

/// Rank criterion: receiver `r` recovers bit `w` iff the unit vector of `w`
/// lies in the span of the code rows together with the unit vectors of
/// `r`'s own bits. Projecting out `r`'s coordinates turns that into plain
/// membership in the span of the masked code rows.
pub fn verify_linear(inst: &Instance, code: &LinearIndexCode) -> Result<VerifyReport> {
    code.check_well_formed(inst)?;
    let rows = code.rows(inst);
    let offsets = inst.bit_offsets();
    let bits = inst.total_bits();
    let mut failures = Vec::new();
    for (r, wants) in wanted_bits(inst) {
        if wants.is_empty() {
            continue;
        }
        let mask = receiver_mask(inst, &offsets, r);
        let mut basis = EchelonBasis::new();
        for row in &rows {
            let mut masked = row.clone();
            masked.clear_mask(&mask);
            basis.insert(masked);
        }
        for (m, b) in wants {
            if !basis.contains(&BitRow::unit(bits, offsets[m] + b - 1)) {
                failures.push(DecodeFailure {
                    receiver: r,
                    message: m,
                    bit: b,
                });
            }
        }
    }
    Ok(VerifyReport::from_failures(failures))
}

pub const DEFAULT_EXHAUSTIVE_BITS: usize = 20;

/// Brute-force zero-error check: enumerates all `2^B` message assignments
/// and declares wanted bit `w` decodable at receiver `r` iff `w` is constant
/// on every class of assignments sharing the same codeword and the same
/// side information of `r`.
pub fn verify_exhaustive(inst: &Instance, code: &LinearIndexCode, cap: usize) -> Result<VerifyReport> {
    code.check_well_formed(inst)?;
    let bits = inst.total_bits();
    if bits > cap || bits > 30 {
        return Err(Error::CapExceeded(format!(
            "exhaustive verification over {bits} message bits exceeds cap {}",
            cap.min(30)
        )));
    }
    let offsets = inst.bit_offsets();
    let masks: Vec<u64> = code
        .symbols
        .iter()
        .map(|s| s.terms.iter().fold(0u64, |acc, &(m, b)| acc ^ (1 << (offsets[m] + b - 1))))
        .collect();
    let codeword = |x: u64| -> Vec<u64> {
        let mut words = vec![0u64; masks.len().div_ceil(64).max(1)];
        for (k, &mask) in masks.iter().enumerate() {
            if (x & mask).count_ones() % 2 == 1 {
                words[k / 64] |= 1 << (k % 64);
            }
        }
        words
    };
    let codewords: Vec<Vec<u64>> = (0..1u64 << bits).map(codeword).collect();

    let mut failures = Vec::new();
    for (r, wants) in wanted_bits(inst) {
        if wants.is_empty() {
            continue;
        }
        let own_mask: u64 = (offsets[r]..offsets[r + 1]).fold(0, |acc, p| acc | 1 << p);
        let want_mask: u64 = wants.iter().fold(0, |acc, &(m, b)| acc | 1 << (offsets[m] + b - 1));
        // class key -> (first wanted values seen, bits that disagreed)
        let mut classes: HashMap<(&[u64], u64), (u64, u64)> = HashMap::new();
        for (x, cw) in codewords.iter().enumerate() {
            let x = x as u64;
            let entry = classes
                .entry((cw.as_slice(), x & own_mask))
                .or_insert((x & want_mask, 0));
            entry.1 |= entry.0 ^ (x & want_mask);
        }
        let conflicts = classes.values().fold(0u64, |acc, &(_, c)| acc | c);
        for (m, b) in wants {
            if conflicts >> (offsets[m] + b - 1) & 1 == 1 {
                failures.push(DecodeFailure {
                    receiver: r,
                    message: m,
                    bit: b,
                });
            }
        }
    }
    Ok(VerifyReport::from_failures(failures))
}
