//! GF(2) linear solver over subfile symbols.
//!
//! Unknowns are `b`-bit blocks with 0/1 coefficients, so elimination cost is
//! independent of the block width up to block XORs. Coefficient rows are
//! bitsets; right-hand sides are blocks.

use crate::model::{xor_into, Block};

struct Row {
    mask: Vec<u64>,
    rhs: Block,
}

impl Row {
    fn bit(&self, col: usize) -> bool {
        self.mask[col / 64] >> (col % 64) & 1 == 1
    }

    fn toggle(&mut self, col: usize) {
        self.mask[col / 64] ^= 1u64 << (col % 64);
    }

    fn popcount(&self) -> u32 {
        self.mask.iter().map(|w| w.count_ones()).sum()
    }
}

/// A system of XOR equations over block-valued unknowns.
pub struct GfSystem {
    n_cols: usize,
    words: usize,
    rows: Vec<Row>,
}

impl GfSystem {
    pub fn new(n_cols: usize) -> Self {
        GfSystem {
            n_cols,
            words: n_cols.div_ceil(64).max(1),
            rows: Vec::new(),
        }
    }

    /// Adds the equation `xor of unknowns at cols = rhs`. Repeated columns
    /// cancel, as they do in GF(2).
    pub fn add_equation(&mut self, cols: impl IntoIterator<Item = usize>, rhs: Block) {
        let mut row = Row {
            mask: vec![0u64; self.words],
            rhs,
        };
        for c in cols {
            debug_assert!(c < self.n_cols);
            row.toggle(c);
        }
        self.rows.push(row);
    }

    /// Reduces the system and extracts each requested unknown. An unknown is
    /// determined exactly when, after full reduction, some row pins it alone.
    /// Returns the first column that cannot be determined otherwise.
    pub fn solve(mut self, needed: &[usize]) -> Result<Vec<Block>, usize> {
        let mut pivot_of: Vec<Option<usize>> = vec![None; self.n_cols];
        let mut next_pivot = 0usize;
        for (col, pivot_slot) in pivot_of.iter_mut().enumerate() {
            let Some(r) = (next_pivot..self.rows.len()).find(|&r| self.rows[r].bit(col)) else {
                continue;
            };
            self.rows.swap(next_pivot, r);
            let pivot_mask = self.rows[next_pivot].mask.clone();
            let pivot_rhs = self.rows[next_pivot].rhs.clone();
            for (i, other) in self.rows.iter_mut().enumerate() {
                if i != next_pivot && other.bit(col) {
                    for (w, pw) in other.mask.iter_mut().zip(&pivot_mask) {
                        *w ^= pw;
                    }
                    xor_into(&mut other.rhs, &pivot_rhs);
                }
            }
            *pivot_slot = Some(next_pivot);
            next_pivot += 1;
        }
        needed
            .iter()
            .map(|&col| {
                let row = pivot_of[col].map(|r| &self.rows[r]).ok_or(col)?;
                if row.popcount() == 1 {
                    Ok(row.rhs.clone())
                } else {
                    Err(col)
                }
            })
            .collect()
    }
}
