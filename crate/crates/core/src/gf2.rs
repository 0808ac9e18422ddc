//! Bit-packed vectors over GF(2) and an incremental echelon basis.

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(bits: usize) -> Self {
        BitRow {
            words: vec![0; bits.div_ceil(WORD).max(1)],
        }
    }

    pub fn unit(bits: usize, pos: usize) -> Self {
        let mut row = BitRow::zeros(bits);
        row.set(pos);
        row
    }

    pub fn from_positions(bits: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut row = BitRow::zeros(bits);
        for p in positions {
            row.flip(p);
        }
        row
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        self.words[pos / WORD] >> (pos % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize) {
        self.words[pos / WORD] |= 1 << (pos % WORD);
    }

    #[inline]
    pub fn flip(&mut self, pos: usize) {
        self.words[pos / WORD] ^= 1 << (pos % WORD);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Clears every bit set in `mask`.
    pub fn clear_mask(&mut self, mask: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&mask.words) {
            *a &= !b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Lowest set bit.
    pub fn lowest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * WORD + t)
                }
            })
        })
    }

    /// Parity of the AND of two rows.
    pub fn dot(&self, other: &BitRow) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }
}

/// Fully reduced echelon basis: each stored row owns a pivot column that is
/// zero in every other stored row, so reduction is a single pass.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, BitRow)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis in place.
    pub fn reduce(&self, row: &mut BitRow) {
        for (pivot, basis_row) in &self.rows {
            if row.get(*pivot) {
                row.xor_assign(basis_row);
            }
        }
    }

    pub fn contains(&self, row: &BitRow) -> bool {
        let mut r = row.clone();
        self.reduce(&mut r);
        r.is_zero()
    }

    /// Adds `row` if it is independent of the basis. Returns whether the rank
    /// grew.
    pub fn insert(&mut self, mut row: BitRow) -> bool {
        self.reduce(&mut row);
        let Some(pivot) = row.lowest() else {
            return false;
        };
        for (_, basis_row) in self.rows.iter_mut() {
            if basis_row.get(pivot) {
                basis_row.xor_assign(&row);
            }
        }
        self.rows.push((pivot, row));
        true
    }
}

/// Rank of a set of rows.
pub fn rank(rows: impl IntoIterator<Item = BitRow>) -> usize {
    let mut basis = EchelonBasis::new();
    for r in rows {
        basis.insert(r);
    }
    basis.rank()
}
