//! Permutations of `{0..k}` ranked in lexicographic order (Lehmer code).
//!
//! Grid states are identified with these ranks everywhere else in the crate.

use crate::error::{Error, Result};

/// Largest `k` whose factorial fits in a `u64`.
pub const MAX_RANKABLE: usize = 20;

pub fn factorial(k: usize) -> u64 {
    assert!(k <= MAX_RANKABLE, "{k}! overflows u64");
    (1..=k as u64).product()
}

/// Lexicographic rank of a permutation.
pub fn rank(perm: &[usize]) -> u64 {
    let k = perm.len();
    let mut used: u32 = 0;
    let mut r: u64 = 0;
    for (i, &v) in perm.iter().enumerate() {
        let smaller_unused = v as u32 - (used & ((1u32 << v) - 1)).count_ones();
        r += smaller_unused as u64 * factorial(k - 1 - i);
        used |= 1 << v;
    }
    r
}

/// Inverse of [`rank`].
pub fn unrank(k: usize, mut r: u64) -> Vec<usize> {
    debug_assert!(r < factorial(k));
    let mut pool: Vec<usize> = (0..k).collect();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let f = factorial(k - 1 - i);
        let idx = (r / f) as usize;
        r %= f;
        out.push(pool.remove(idx));
    }
    out
}

/// Fails with a sizing estimate when `k` exceeds `limit`.
pub fn check_cap(k: usize, limit: usize) -> Result<()> {
    if k > limit || k > MAX_RANKABLE {
        Err(Error::cap(k, limit.min(MAX_RANKABLE)))
    } else {
        Ok(())
    }
}

/// All permutations of `{0..k}` in rank order, generated lazily.
#[derive(Debug, Clone)]
pub struct Permutations {
    current: Option<Vec<usize>>,
}

impl Permutations {
    pub fn new(k: usize) -> Self {
        Permutations {
            current: Some((0..k).collect()),
        }
    }
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut p = out.clone();
        if let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) {
            let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
            p.swap(i - 1, j);
            p[i..].reverse();
            self.current = Some(p);
        }
        Some(out)
    }
}

/// States of a size-`k` grid, checked against a cap.
pub fn enumerate_states(k: usize, limit: usize) -> Result<Permutations> {
    check_cap(k, limit)?;
    Ok(Permutations::new(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn counts() {
        assert_eq!(Permutations::new(2).count(), 2);
        assert_eq!(Permutations::new(5).count(), 120);
        assert_eq!(Permutations::new(0).count(), 1);
    }

    #[test]
    fn enumeration_order_is_rank_order() {
        for (r, p) in Permutations::new(5).enumerate() {
            assert_eq!(rank(&p), r as u64);
            assert_eq!(unrank(5, r as u64), p);
        }
    }

    #[test]
    fn random_round_trip_at_eight() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(8);
        let mut p: Vec<usize> = (0..8).collect();
        for _ in 0..1000 {
            p.shuffle(&mut rng);
            assert_eq!(unrank(8, rank(&p)), p);
        }
    }

    #[test]
    fn caps() {
        assert!(enumerate_states(10, 10).is_ok());
        let err = enumerate_states(11, 10).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("39916800"));
    }
}
