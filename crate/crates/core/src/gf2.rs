//! Matrices over GF(2).
//!
//! [`SparseBitMatrix`] stores columns as sorted row-id lists and reduces them
//! by lowest-pivot elimination. [`DenseBitMatrix`] packs rows into words and
//! runs ordinary Gaussian elimination; it is used for small blocks and as an
//! independent check on the sparse path.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Blocks with both dimensions below this go through the dense path.
pub const DENSE_LIMIT: usize = 4096;

/// Sparse GF(2) matrix in compressed column form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseBitMatrix {
    rows: usize,
    cols: usize,
    starts: Vec<usize>,
    entries: Vec<u32>,
}

/// Sorts and cancels repeated ids in pairs.
pub fn normalize(ids: &mut Vec<u32>) {
    ids.sort_unstable();
    let mut out = 0;
    let mut i = 0;
    while i < ids.len() {
        let mut j = i;
        while j < ids.len() && ids[j] == ids[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            ids[out] = ids[i];
            out += 1;
        }
        i = j;
    }
    ids.truncate(out);
}

/// Symmetric difference of two sorted id lists.
pub fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl SparseBitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseBitMatrix {
            rows,
            cols,
            starts: vec![0; cols + 1],
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_columns(n, (0..n as u32).map(|i| vec![i]).collect())
    }

    /// Builds from explicit columns; repeated entries cancel.
    pub fn from_columns(rows: usize, columns: Vec<Vec<u32>>) -> Self {
        let cols = columns.len();
        let mut starts = Vec::with_capacity(cols + 1);
        let mut entries = Vec::new();
        starts.push(0);
        for mut c in columns {
            normalize(&mut c);
            if let Some(&last) = c.last() {
                assert!((last as usize) < rows, "row id {last} out of range {rows}");
            }
            entries.extend_from_slice(&c);
            starts.push(entries.len());
        }
        SparseBitMatrix {
            rows,
            cols,
            starts,
            entries,
        }
    }

    /// Builds from `(row, col)` pairs; repeated pairs cancel.
    pub fn from_entries(rows: usize, cols: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut columns = vec![Vec::new(); cols];
        for (r, c) in pairs {
            columns[c as usize].push(r);
        }
        Self::from_columns(rows, columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn column(&self, c: usize) -> &[u32] {
        &self.entries[self.starts[c]..self.starts[c + 1]]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.column(c).binary_search(&(r as u32)).is_ok()
    }

    /// Nonzero `(row, col)` positions in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.cols).flat_map(move |c| self.column(c).iter().map(move |&r| (r, c as u32)))
    }

    /// Image of the chain given by a list of column ids.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = v.iter().flat_map(|&c| self.column(c as usize).iter().copied()).collect();
        normalize(&mut out);
        out
    }

    /// Matrix product `self * rhs`.
    pub fn multiply(&self, rhs: &SparseBitMatrix) -> SparseBitMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let columns: Vec<Vec<u32>> = (0..rhs.cols)
            .into_par_iter()
            .map(|c| self.apply(rhs.column(c)))
            .collect();
        Self::from_columns(self.rows, columns)
    }

    pub fn add(&self, other: &SparseBitMatrix) -> SparseBitMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        let columns = (0..self.cols)
            .map(|c| xor_sorted(self.column(c), other.column(c)))
            .collect();
        Self::from_columns(self.rows, columns)
    }

    pub fn transpose(&self) -> SparseBitMatrix {
        let mut columns = vec![Vec::new(); self.rows];
        for (r, c) in self.entries() {
            columns[r as usize].push(c);
        }
        Self::from_columns(self.cols, columns)
    }

    /// Rank by column reduction.
    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut rank = 0;
        for c in 0..self.cols {
            let mut col = self.column(c).to_vec();
            while let Some(&low) = col.last() {
                match pivots.get(&low) {
                    Some(p) => col = xor_sorted(&col, p),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivots.insert(low, col);
                rank += 1;
            }
        }
        rank
    }

    /// Rank, choosing the dense path for small matrices.
    pub fn rank_auto(&self) -> usize {
        if self.rows < DENSE_LIMIT && self.cols < DENSE_LIMIT {
            DenseBitMatrix::from_sparse(self).rank()
        } else {
            self.rank()
        }
    }

    /// A set of columns summing to `b`, if one exists.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        let mut target = b.to_vec();
        normalize(&mut target);
        let mut pivots: HashMap<u32, (Vec<u32>, Vec<u32>)> = HashMap::new();
        for c in 0..self.cols {
            let mut col = self.column(c).to_vec();
            let mut combo = vec![c as u32];
            while let Some(&low) = col.last() {
                match pivots.get(&low) {
                    Some((p, pc)) => {
                        col = xor_sorted(&col, p);
                        combo = xor_sorted(&combo, pc);
                    }
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivots.insert(low, (col, combo));
            }
        }
        let mut witness = Vec::new();
        while let Some(&low) = target.last() {
            let (p, pc) = pivots.get(&low)?;
            target = xor_sorted(&target, p);
            witness = xor_sorted(&witness, pc);
        }
        Some(witness)
    }
}

/// Dense GF(2) matrix with bit-packed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseBitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl DenseBitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        DenseBitMatrix {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn from_sparse(m: &SparseBitMatrix) -> Self {
        let mut d = Self::zero(m.rows(), m.cols());
        for (r, c) in m.entries() {
            d.set(r as usize, c as usize, true);
        }
        d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.bits[r * self.stride + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    /// Rank by row reduction.
    pub fn rank(&self) -> usize {
        let mut m = self.bits.clone();
        let s = self.stride;
        let mut rank = 0;
        for c in 0..self.cols {
            let (word, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..self.rows).find(|&r| m[r * s + word] & bit != 0) else {
                continue;
            };
            if p != rank {
                for w in 0..s {
                    m.swap(p * s + w, rank * s + w);
                }
            }
            let pivot: Vec<u64> = m[rank * s..(rank + 1) * s].to_vec();
            for r in 0..self.rows {
                if r != rank && m[r * s + word] & bit != 0 {
                    for w in word..s {
                        m[r * s + w] ^= pivot[w];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_sparse(rng: &mut impl Rng, rows: usize, cols: usize, per_col: usize) -> SparseBitMatrix {
        let columns = (0..cols)
            .map(|_| (0..per_col).map(|_| rng.gen_range(0..rows as u32)).collect())
            .collect();
        SparseBitMatrix::from_columns(rows, columns)
    }

    #[test]
    fn duplicates_cancel() {
        let m = SparseBitMatrix::from_entries(3, 2, [(0, 0), (0, 0), (2, 1), (1, 1), (2, 1)]);
        assert_eq!(m.nnz(), 1);
        assert!(m.get(1, 1));
        assert!(!m.get(0, 0));
    }

    #[test]
    fn identity_rank_and_product() {
        let i = SparseBitMatrix::identity(5);
        assert_eq!(i.rank(), 5);
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let a = random_sparse(&mut rng, 5, 7, 3);
        assert_eq!(i.multiply(&a), a);
        assert_eq!(a.transpose().transpose(), a);
        assert!(a.add(&a).is_zero());
    }

    #[test]
    fn sparse_rank_matches_dense_on_random_matrices() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
        for trial in 0..100 {
            let rows = rng.gen_range(1..=2000);
            let cols = rng.gen_range(1..=2000);
            let per_col = if trial % 3 == 0 { 1 } else { rng.gen_range(1..6) };
            let m = random_sparse(&mut rng, rows, cols, per_col);
            assert_eq!(m.rank(), DenseBitMatrix::from_sparse(&m).rank(), "trial {trial}");
        }
    }

    #[test]
    fn solve_agrees_with_augmented_rank() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let rows = rng.gen_range(1..40);
            let cols = rng.gen_range(1..40);
            let m = random_sparse(&mut rng, rows, cols, 2);
            let mut b: Vec<u32> = (0..3).map(|_| rng.gen_range(0..rows as u32)).collect();
            normalize(&mut b);
            let mut augmented: Vec<Vec<u32>> = (0..cols).map(|c| m.column(c).to_vec()).collect();
            augmented.push(b.clone());
            let solvable = SparseBitMatrix::from_columns(rows, augmented).rank() == m.rank();
            match m.solve(&b) {
                Some(v) => {
                    assert!(solvable);
                    assert_eq!(m.apply(&v), b);
                }
                None => assert!(!solvable),
            }
        }
    }

    proptest! {
        #[test]
        fn rank_of_product_is_bounded(seed in any::<u64>()) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let a = random_sparse(&mut rng, 30, 20, 2);
            let b = random_sparse(&mut rng, 20, 25, 2);
            let ab = a.multiply(&b);
            prop_assert!(ab.rank() <= a.rank().min(b.rank()));
            prop_assert_eq!(ab.transpose(), b.transpose().multiply(&a.transpose()));
        }

        #[test]
        fn normalize_is_parity(mut ids in prop::collection::vec(0u32..10, 0..30)) {
            let mut counts = [0usize; 10];
            for &i in &ids {
                counts[i as usize] += 1;
            }
            normalize(&mut ids);
            let expected: Vec<u32> = (0..10).filter(|&i| counts[i as usize] % 2 == 1).collect();
            prop_assert_eq!(ids, expected);
        }
    }
}
