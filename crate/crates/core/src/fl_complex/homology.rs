use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grading::{BucketKey, GradingTable, HalfInt};
use super::{tilde_boundary_of, tilde_boundary_of_chain};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::gf2::{normalize, DenseBitMatrix, SparseBitMatrix};
use crate::grid::GridDiagram;
use crate::perm::{check_cap, factorial, unrank};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankMethod {
    /// Dense below the size threshold, sparse above.
    #[default]
    Auto,
    Sparse,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketRank {
    pub maslov: i32,
    pub alexander: Vec<HalfInt>,
    pub rank: u64,
}

/// Ranks of the tilde homology, by bigrading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyRanks {
    pub k: usize,
    pub components: usize,
    /// Nonzero buckets, Alexander ascending then Maslov descending.
    pub buckets: Vec<BucketRank>,
    pub total: u64,
    pub hat_total: u64,
}

impl HomologyRanks {
    pub fn rank_at(&self, maslov: i32, alexander: &[HalfInt]) -> u64 {
        self.buckets
            .iter()
            .find(|b| b.maslov == maslov && b.alexander == alexander)
            .map_or(0, |b| b.rank)
    }
}

fn check_buckets<'a>(buckets: impl Iterator<Item = &'a Vec<u64>>, limits: &Limits) -> Result<()> {
    match buckets.map(Vec::len).max() {
        Some(size) if size > limits.max_bucket => Err(Error::BucketCap {
            size,
            limit: limits.max_bucket,
        }),
        _ => Ok(()),
    }
}

fn rank_of(m: &SparseBitMatrix, method: RankMethod) -> usize {
    match method {
        RankMethod::Auto => m.rank_auto(),
        RankMethod::Sparse => m.rank(),
        RankMethod::Dense => DenseBitMatrix::from_sparse(m).rank(),
    }
}

/// Matrix of `∂̃` from bucket `src` into bucket `dst` (both sorted rank lists).
fn block(g: &GridDiagram, src: &[u64], dst: &[u64]) -> Result<SparseBitMatrix> {
    let k = g.size();
    let columns: Vec<Vec<u32>> = src
        .par_iter()
        .map(|&r| {
            let mut col = Vec::new();
            for y in tilde_boundary_of(g, &unrank(k, r)) {
                match dst.binary_search(&y) {
                    Ok(idx) => col.push(idx as u32),
                    Err(_) => {
                        return Err(Error::Invariant(format!(
                            "differential from state {r} leaves the expected grading bucket"
                        )))
                    }
                }
            }
            normalize(&mut col);
            Ok(col)
        })
        .collect::<Result<_>>()?;
    Ok(SparseBitMatrix::from_columns(dst.len(), columns))
}

pub fn homology_ranks(g: &GridDiagram, limits: &Limits) -> Result<HomologyRanks> {
    homology_ranks_with(g, limits, RankMethod::Auto)
}

pub fn homology_ranks_with(g: &GridDiagram, limits: &Limits, method: RankMethod) -> Result<HomologyRanks> {
    let k = g.size();
    check_cap(k, limits.max_k_homology)?;
    let table = GradingTable::new(g)?;
    let l = table.components();
    let buckets = table.bucket_states(|_| true);
    check_buckets(buckets.values(), limits)?;
    let empty: Vec<u64> = Vec::new();

    let keys: Vec<BucketKey> = buckets.keys().copied().collect();
    // rank of the differential leaving each bucket
    let out_ranks: HashMap<BucketKey, usize> = keys
        .par_iter()
        .map(|&key| {
            let below = BucketKey {
                alex: key.alex,
                maslov: key.maslov - 1,
            };
            let dst = buckets.get(&below).unwrap_or(&empty);
            let m = block(g, &buckets[&key], dst)?;
            Ok((key, rank_of(&m, method)))
        })
        .collect::<Result<_>>()?;

    let mut rows: BTreeMap<(u128, std::cmp::Reverse<i32>), u64> = BTreeMap::new();
    let mut total: u64 = 0;
    for &key in &keys {
        let above = BucketKey {
            alex: key.alex,
            maslov: key.maslov + 1,
        };
        let incoming = out_ranks.get(&above).copied().unwrap_or(0);
        let dim = buckets[&key].len();
        let h = dim - out_ranks[&key] - incoming;
        if h > 0 {
            rows.insert((key.alex, std::cmp::Reverse(key.maslov)), h as u64);
            total += h as u64;
        }
    }
    let mut bucket_list: Vec<BucketRank> = rows
        .into_iter()
        .map(|((alex, m), rank)| {
            let bg = table.bigrading_of(BucketKey { alex, maslov: m.0 });
            BucketRank {
                maslov: bg.maslov,
                alexander: bg.alexander,
                rank,
            }
        })
        .collect();
    bucket_list.sort_by(|a, b| a.alexander.cmp(&b.alexander).then(b.maslov.cmp(&a.maslov)));

    let divisor = 1u64 << (k - l);
    if !total.is_multiple_of(divisor) {
        return Err(Error::Invariant(format!(
            "tilde rank {total} is not divisible by 2^{}",
            k - l
        )));
    }
    Ok(HomologyRanks {
        k,
        components: l,
        buckets: bucket_list,
        total,
        hat_total: total / divisor,
    })
}

/// Outcome of a boundary-membership query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCertificate {
    pub is_boundary: bool,
    /// Sorted state ranks whose boundary is the chain, when it is a boundary.
    pub witness: Option<Vec<u64>>,
}

fn normalized_chain(g: &GridDiagram, chain: &[u64]) -> Result<Vec<u64>> {
    let n = factorial(g.size());
    if let Some(&bad) = chain.iter().find(|&&r| r >= n) {
        return Err(Error::InvalidState(format!("state rank {bad} out of range {n}")));
    }
    let mut c = chain.to_vec();
    c.sort_unstable();
    let mut out = Vec::with_capacity(c.len());
    let mut i = 0;
    while i < c.len() {
        let mut j = i;
        while j < c.len() && c[j] == c[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(c[i]);
        }
        i = j;
    }
    Ok(out)
}

/// Decides whether a tilde cycle is a boundary, one grading bucket at a time.
pub fn is_boundary(g: &GridDiagram, chain: &[u64], limits: &Limits) -> Result<BoundaryCertificate> {
    let k = g.size();
    check_cap(k, limits.max_k_boundary)?;
    let chain = normalized_chain(g, chain)?;
    let boundary = tilde_boundary_of_chain(g, &chain);
    if !boundary.is_empty() {
        return Err(Error::NotACycle(boundary.len()));
    }
    if chain.is_empty() {
        return Ok(BoundaryCertificate {
            is_boundary: true,
            witness: Some(Vec::new()),
        });
    }
    let table = GradingTable::new(g)?;
    let mut parts: HashMap<BucketKey, Vec<u64>> = HashMap::new();
    for &r in &chain {
        parts.entry(table.key(&unrank(k, r))).or_default().push(r);
    }
    let sources: HashSet<BucketKey> = parts
        .keys()
        .map(|key| BucketKey {
            alex: key.alex,
            maslov: key.maslov + 1,
        })
        .collect();
    let domains = table.bucket_states(|key| sources.contains(key));
    check_buckets(domains.values(), limits)?;

    let empty: Vec<u64> = Vec::new();
    let mut witness = Vec::new();
    for (key, target) in &parts {
        let src = domains
            .get(&BucketKey {
                alex: key.alex,
                maslov: key.maslov + 1,
            })
            .unwrap_or(&empty);
        let mut row_of: HashMap<u64, u32> = HashMap::new();
        for &t in target {
            let next = row_of.len() as u32;
            row_of.entry(t).or_insert(next);
        }
        let images: Vec<Vec<u64>> = src.par_iter().map(|&r| tilde_boundary_of(g, &unrank(k, r))).collect();
        let mut columns = Vec::with_capacity(images.len());
        for img in images {
            let col: Vec<u32> = img
                .into_iter()
                .map(|y| {
                    let next = row_of.len() as u32;
                    *row_of.entry(y).or_insert(next)
                })
                .collect();
            columns.push(col);
        }
        let m = SparseBitMatrix::from_columns(row_of.len(), columns);
        let b: Vec<u32> = target.iter().map(|t| row_of[t]).collect();
        match m.solve(&b) {
            Some(v) => witness.extend(v.into_iter().map(|c| src[c as usize])),
            None => {
                return Ok(BoundaryCertificate {
                    is_boundary: false,
                    witness: None,
                })
            }
        }
    }
    witness.sort_unstable();
    Ok(BoundaryCertificate {
        is_boundary: true,
        witness: Some(witness),
    })
}

/// Boundary membership over the whole generator set with dense ranks; an
/// independent route for small grids.
pub fn is_boundary_dense(g: &GridDiagram, chain: &[u64], limits: &Limits) -> Result<bool> {
    let k = g.size();
    check_cap(k, limits.max_k_homology.min(8))?;
    let chain = normalized_chain(g, chain)?;
    let n = factorial(k) as usize;
    let mut d = DenseBitMatrix::zero(n, n + 1);
    for x in 0..n {
        for y in tilde_boundary_of(g, &unrank(k, x as u64)) {
            let cur = d.get(y as usize, x);
            d.set(y as usize, x, !cur);
        }
    }
    let without = d.rank();
    for &c in &chain {
        d.set(c as usize, n, true);
    }
    Ok(d.rank() == without)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_cap() {
        let g = crate::grid::braid_to_grid(&"2: 1 1 1".parse().unwrap());
        let limits = Limits {
            max_bucket: 3,
            ..Limits::default()
        };
        let err = homology_ranks(&g, &limits).unwrap_err();
        assert!(matches!(err, Error::BucketCap { limit: 3, .. }));
        assert_eq!(err.exit_code(), 2);
    }
    use crate::grid::braid_to_grid;
    use crate::perm::rank;

    fn z(g: &GridDiagram) -> Vec<u64> {
        vec![rank(g.z_plus().rows())]
    }

    #[test]
    fn unknot_two() {
        let g = GridDiagram::new(vec![0, 1], vec![1, 0]).unwrap();
        let h = homology_ranks(&g, &Limits::default()).unwrap();
        assert_eq!((h.total, h.hat_total, h.components), (2, 1, 1));
    }

    #[test]
    fn sparse_and_dense_agree() {
        for text in ["2: 1 1 1", "3: 1 2 1 2", "2: 1 1", "3: -1 2"] {
            let g = braid_to_grid(&text.parse().unwrap());
            let a = homology_ranks_with(&g, &Limits::default(), RankMethod::Sparse).unwrap();
            let b = homology_ranks_with(&g, &Limits::default(), RankMethod::Dense).unwrap();
            assert_eq!(a, b, "{text}");
        }
    }

    #[test]
    fn json_schema() {
        let g = braid_to_grid(&"2: 1 1 1".parse().unwrap());
        let h = homology_ranks(&g, &Limits::default()).unwrap();
        let v = serde_json::to_value(&h).unwrap();
        for key in ["k", "components", "buckets", "total", "hat_total"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let first = &v["buckets"][0];
        assert!(first["alexander"][0].as_str().unwrap().ends_with("/2"));
        let back: HomologyRanks = serde_json::from_value(v).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn boundary_queries() {
        let limits = Limits::default();
        let i1 = braid_to_grid(&"1:".parse().unwrap());
        let cert = is_boundary(&i1, &[], &limits).unwrap();
        assert!(cert.is_boundary);
        assert_eq!(cert.witness, Some(vec![]));
        assert!(!is_boundary(&i1, &z(&i1), &limits).unwrap().is_boundary);

        let neg = braid_to_grid(&"2: -1".parse().unwrap());
        let cert = is_boundary(&neg, &z(&neg), &limits).unwrap();
        assert!(cert.is_boundary);
        let w = cert.witness.unwrap();
        assert_eq!(tilde_boundary_of_chain(&neg, &w), z(&neg));
    }

    #[test]
    fn boundary_agrees_with_dense_route() {
        let limits = Limits::default();
        for text in ["1:", "2: 1", "2: -1", "2:", "2: 1 -1", "3: 1 -2", "2: 1 1 1"] {
            let g = braid_to_grid(&text.parse().unwrap());
            let fast = is_boundary(&g, &z(&g), &limits).unwrap().is_boundary;
            assert_eq!(fast, is_boundary_dense(&g, &z(&g), &limits).unwrap(), "{text}");
        }
    }

    #[test]
    fn non_cycles_are_rejected() {
        let g = braid_to_grid(&"2: 1 1 1".parse().unwrap());
        let k = g.size();
        let x = (0..factorial(k))
            .find(|&r| !tilde_boundary_of_chain(&g, &[r]).is_empty())
            .unwrap();
        assert!(matches!(is_boundary(&g, &[x], &Limits::default()), Err(Error::NotACycle(_))));
        assert!(matches!(
            is_boundary(&g, &[factorial(k)], &Limits::default()),
            Err(Error::InvalidState(_))
        ));
    }
}
