//! The grid chain complexes over GF(2).
//!
//! Generators are grid states identified with their Lehmer ranks. The
//! tilde differential counts empty rectangles avoiding every marking; the
//! minus differential allows O markings and records them as `U` powers.

mod grading;
mod homology;
mod minus;
mod rect;

pub use grading::{gradings, Bigrading, GradingTable, HalfInt};
pub use homology::{
    homology_ranks, homology_ranks_with, is_boundary, is_boundary_dense, BoundaryCertificate, BucketRank,
    HomologyRanks, RankMethod,
};
pub use minus::{minus_differential, MinusDifferential, UMonomial};
pub use rect::{empty_rectangles, rectangles, Rect};

pub(crate) use rect::for_each_empty;

use rayon::prelude::*;

use crate::config::Limits;
use crate::error::Result;
use crate::gf2::{normalize, SparseBitMatrix};
use crate::grid::{GridDiagram, GridState};
use crate::perm::{self, check_cap, factorial, unrank};

/// Ranks of `∂̃ x` for the state with the given rows.
pub fn tilde_boundary_of(g: &GridDiagram, rows: &[usize]) -> Vec<u64> {
    let mut out = Vec::new();
    let mut y = rows.to_vec();
    for_each_empty(g, rows, true, |i, j| {
        y.swap(i, j);
        out.push(perm::rank(&y));
        y.swap(i, j);
    });
    out.sort_unstable();
    out
}

/// Ranks of `∂̃` applied to a chain given by state ranks.
pub fn tilde_boundary_of_chain(g: &GridDiagram, chain: &[u64]) -> Vec<u64> {
    let k = g.size();
    let mut out: Vec<u64> = chain
        .par_iter()
        .flat_map_iter(|&r| tilde_boundary_of(g, &unrank(k, r)))
        .collect();
    out.sort_unstable();
    let mut parity = Vec::with_capacity(out.len());
    let mut i = 0;
    while i < out.len() {
        let mut j = i;
        while j < out.len() && out[j] == out[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            parity.push(out[i]);
        }
        i = j;
    }
    parity
}

/// The whole tilde differential as a `k! × k!` matrix indexed by rank.
pub fn tilde_differential(g: &GridDiagram, limits: &Limits) -> Result<SparseBitMatrix> {
    let k = g.size();
    check_cap(k, limits.max_k_homology)?;
    let n = factorial(k);
    let columns: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|r| {
            let mut col: Vec<u32> = tilde_boundary_of(g, &unrank(k, r)).into_iter().map(|v| v as u32).collect();
            normalize(&mut col);
            col
        })
        .collect();
    Ok(SparseBitMatrix::from_columns(n as usize, columns))
}

/// Whether `∂̃ ∘ ∂̃` vanishes.
pub fn squares_to_zero(d: &SparseBitMatrix) -> bool {
    d.multiply(d).is_zero()
}

/// The distinguished state: upper-right corners of the X squares.
pub fn z_plus(g: &GridDiagram) -> GridState {
    g.z_plus()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::braid_to_grid;

    #[test]
    fn unknot_differential_vanishes() {
        let g = GridDiagram::new(vec![0, 1], vec![1, 0]).unwrap();
        let d = tilde_differential(&g, &Limits::default()).unwrap();
        assert_eq!(d.rows(), 2);
        assert!(d.is_zero());
    }

    #[test]
    fn trefoil_squares_to_zero() {
        let g = braid_to_grid(&"2: 1 1 1".parse().unwrap());
        let d = tilde_differential(&g, &Limits::default()).unwrap();
        assert!(!d.is_zero());
        assert!(squares_to_zero(&d));
    }

    #[test]
    fn cap_is_enforced() {
        let g = braid_to_grid(&"3: 1 2 1 2".parse().unwrap());
        let err = tilde_differential(&g, &Limits::default().capped_at(3)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn z_plus_is_a_cycle() {
        for text in ["1:", "2: 1", "2: -1", "3: 1 -2 1", "3:"] {
            let g = braid_to_grid(&text.parse().unwrap());
            let z = perm::rank(g.z_plus().rows());
            assert!(tilde_boundary_of_chain(&g, &[z]).is_empty(), "{text}");
        }
    }
}
