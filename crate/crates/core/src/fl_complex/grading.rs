//! Maslov and Alexander gradings.
//!
//! Both are computed in the fundamental domain `[0,k)²` with state points on
//! integer lattice points and markings at square centres. For planar finite
//! sets put `I(A,B) = #{(a,b) : a strictly left of and below b}` and
//! `T(A,B) = I(A,B) + I(B,A)`. Then
//!
//! ```text
//! M(x)    = I(x,x) - T(x,O) + I(O,O) + 1
//! 4 A_j(x) = 2T(x,X_j) - 2T(x,O_j) - T(X,X_j) + T(X,O_j) - T(O,X_j) + T(O,O_j) - 2(n_j - 1)
//! ```
//!
//! where `X_j`, `O_j` are the markings on component `j` and `n_j` their
//! number. Every term involving `x` is a sum over its points, so the
//! gradings of all states come out of one depth-first pass with per-column
//! lookup tables.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{GridDiagram, GridState};
use crate::perm;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub fn from_twice(t: i32) -> Self {
        HalfInt(t)
    }

    pub fn twice(self) -> i32 {
        self.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

impl FromStr for HalfInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad half-integer `{s}`"));
        match s.split_once('/') {
            Some((p, "2")) => p.trim().parse().map(HalfInt).map_err(|_| bad()),
            Some(_) => Err(bad()),
            None => s.trim().parse::<i32>().map(|v| HalfInt(2 * v)).map_err(|_| bad()),
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bigrading {
    pub maslov: i32,
    pub alexander: Vec<HalfInt>,
}

/// Up to this many components fit in a packed bucket key.
pub(crate) const MAX_PACKED_COMPONENTS: usize = 8;

/// Grading bucket `(packed Alexander vector, Maslov)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct BucketKey {
    pub alex: u128,
    pub maslov: i32,
}

pub(crate) fn pack_alexander(twice: &[i32]) -> u128 {
    twice
        .iter()
        .enumerate()
        .fold(0u128, |acc, (j, &a)| acc | (((a + (1 << 15)) as u16 as u128) << (16 * j)))
}

pub(crate) fn unpack_alexander(packed: u128, l: usize) -> Vec<HalfInt> {
    (0..l)
        .map(|j| HalfInt(((packed >> (16 * j)) & 0xffff) as i32 - (1 << 15)))
        .collect()
}

/// Lookup tables turning a state into its gradings.
#[derive(Debug, Clone)]
pub struct GradingTable {
    k: usize,
    l: usize,
    maslov_const: i32,
    /// `[i * k + v]`: contribution of a point on line `i` at height `v`.
    maslov_col: Vec<i32>,
    alex_const: Vec<i32>,
    /// `[(j * k + i) * k + v]`: twice-Alexander contribution for component `j`.
    alex_col: Vec<i32>,
}

/// `#{c in set : c >= i, r_c >= v} + #{c in set : c < i, r_c < v}`: the
/// value of `T({(i,v)}, set)` for a lattice point against markings.
fn point_vs_markings(set: &[(usize, usize)], i: usize, v: usize) -> i32 {
    set.iter()
        .filter(|&&(c, r)| (c >= i && r >= v) || (c < i && r < v))
        .count() as i32
}

/// `T(P, Q)` for two sets of markings.
fn markings_pair_count(p: &[(usize, usize)], q: &[(usize, usize)]) -> i32 {
    let mut t = 0;
    for &(a, b) in p {
        for &(c, d) in q {
            if (a < c && b < d) || (c < a && d < b) {
                t += 1;
            }
        }
    }
    t
}

impl GradingTable {
    pub fn new(g: &GridDiagram) -> Result<Self> {
        let k = g.size();
        let comps = g.column_components();
        let l = g.component_count();
        if l > MAX_PACKED_COMPONENTS {
            return Err(Error::Precondition(format!(
                "{l} components; at most {MAX_PACKED_COMPONENTS} are supported"
            )));
        }
        let xs: Vec<(usize, usize)> = (0..k).map(|c| (c, g.x_rows()[c])).collect();
        let os: Vec<(usize, usize)> = (0..k).map(|c| (c, g.o_rows()[c])).collect();

        let i_oo = {
            let mut n = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if os[a].1 < os[b].1 {
                        n += 1;
                    }
                }
            }
            n
        };
        let maslov_const = i_oo + 1;
        let mut maslov_col = vec![0; k * k];
        for i in 0..k {
            for v in 0..k {
                maslov_col[i * k + v] = -point_vs_markings(&os, i, v);
            }
        }

        let mut alex_const = vec![0; l];
        let mut alex_col = vec![0; l * k * k];
        for j in 0..l {
            let xj: Vec<(usize, usize)> = (0..k).filter(|&c| comps[c] == j).map(|c| xs[c]).collect();
            let oj: Vec<(usize, usize)> = (0..k).filter(|&c| comps[c] == j).map(|c| os[c]).collect();
            let nj = xj.len() as i32;
            let four_const = -markings_pair_count(&xs, &xj) + markings_pair_count(&xs, &oj)
                - markings_pair_count(&os, &xj)
                + markings_pair_count(&os, &oj)
                - 2 * (nj - 1);
            if four_const % 2 != 0 {
                return Err(Error::Invariant(format!(
                    "Alexander constant {four_const}/4 for component {j} is not a half-integer"
                )));
            }
            alex_const[j] = four_const / 2;
            for i in 0..k {
                for v in 0..k {
                    alex_col[(j * k + i) * k + v] = point_vs_markings(&xj, i, v) - point_vs_markings(&oj, i, v);
                }
            }
        }
        Ok(GradingTable {
            k,
            l,
            maslov_const,
            maslov_col,
            alex_const,
            alex_col,
        })
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn components(&self) -> usize {
        self.l
    }

    /// Maslov grading and twice the Alexander gradings of a state.
    pub fn raw(&self, rows: &[usize]) -> (i32, Vec<i32>) {
        let k = self.k;
        let mut m = self.maslov_const;
        for i in 0..k {
            for j in i + 1..k {
                if rows[i] < rows[j] {
                    m += 1;
                }
            }
            m += self.maslov_col[i * k + rows[i]];
        }
        let a = (0..self.l)
            .map(|j| self.alex_const[j] + (0..k).map(|i| self.alex_col[(j * k + i) * k + rows[i]]).sum::<i32>())
            .collect();
        (m, a)
    }

    pub fn grading(&self, x: &GridState) -> Bigrading {
        let (maslov, a) = self.raw(x.rows());
        Bigrading {
            maslov,
            alexander: a.into_iter().map(HalfInt).collect(),
        }
    }

    pub(crate) fn key(&self, rows: &[usize]) -> BucketKey {
        let (maslov, a) = self.raw(rows);
        BucketKey {
            alex: pack_alexander(&a),
            maslov,
        }
    }

    pub(crate) fn bigrading_of(&self, key: BucketKey) -> Bigrading {
        Bigrading {
            maslov: key.maslov,
            alexander: unpack_alexander(key.alex, self.l),
        }
    }

    /// Ranks of all states grouped by bucket, keeping only buckets accepted
    /// by `keep`. Rank lists come out sorted.
    pub(crate) fn bucket_states(&self, keep: impl Fn(&BucketKey) -> bool + Sync) -> HashMap<BucketKey, Vec<u64>> {
        let k = self.k;
        let tasks: Vec<(usize, usize)> = if k >= 2 {
            (0..k)
                .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)))
                .collect()
        } else {
            vec![(0, usize::MAX)]
        };
        let partials: Vec<HashMap<BucketKey, Vec<u64>>> = tasks
            .par_iter()
            .map(|&(a, b)| {
                let mut out: HashMap<BucketKey, Vec<u64>> = HashMap::new();
                let mut dfs = Dfs::new(self);
                if b == usize::MAX {
                    dfs.push(a);
                } else {
                    dfs.push(a);
                    dfs.push(b);
                }
                let mut next_rank = perm::rank(&dfs.prefix_completed_low());
                dfs.run(&mut |maslov, alex| {
                    let key = BucketKey { alex, maslov };
                    if keep(&key) {
                        out.entry(key).or_default().push(next_rank);
                    }
                    next_rank += 1;
                });
                out
            })
            .collect();
        let mut merged: HashMap<BucketKey, Vec<u64>> = HashMap::new();
        for part in partials {
            for (key, ranks) in part {
                merged.entry(key).or_default().extend(ranks);
            }
        }
        merged
    }
}

/// Depth-first walk over completions of a prefix, in rank order.
struct Dfs<'a> {
    t: &'a GradingTable,
    rows: Vec<usize>,
    used: u32,
    /// Partial Maslov sums by depth.
    maslov: Vec<i32>,
    /// Partial twice-Alexander sums, `l` entries per depth.
    alex: Vec<i32>,
}

impl<'a> Dfs<'a> {
    fn new(t: &'a GradingTable) -> Self {
        let mut maslov = vec![0; t.k + 1];
        maslov[0] = t.maslov_const;
        let mut alex = vec![0; (t.k + 1) * t.l];
        alex[..t.l].copy_from_slice(&t.alex_const);
        Dfs {
            t,
            rows: Vec::with_capacity(t.k),
            used: 0,
            maslov,
            alex,
        }
    }

    fn push(&mut self, v: usize) {
        let t = self.t;
        let (k, l) = (t.k, t.l);
        let i = self.rows.len();
        let smaller_used = (self.used & ((1u32 << v) - 1)).count_ones() as i32;
        self.maslov[i + 1] = self.maslov[i] + smaller_used + t.maslov_col[i * k + v];
        for j in 0..l {
            self.alex[(i + 1) * l + j] = self.alex[i * l + j] + t.alex_col[(j * k + i) * k + v];
        }
        self.rows.push(v);
        self.used |= 1 << v;
    }

    fn pop(&mut self) {
        let v = self.rows.pop().expect("nonempty");
        self.used &= !(1 << v);
    }

    /// The prefix extended by the remaining values in increasing order.
    fn prefix_completed_low(&self) -> Vec<usize> {
        let mut p = self.rows.clone();
        p.extend((0..self.t.k).filter(|&v| self.used & (1 << v) == 0));
        p
    }

    fn run(&mut self, leaf: &mut impl FnMut(i32, u128)) {
        let (k, l) = (self.t.k, self.t.l);
        let depth = self.rows.len();
        if depth == k {
            leaf(self.maslov[depth], pack_alexander(&self.alex[depth * l..(depth + 1) * l]));
            return;
        }
        for v in 0..k {
            if self.used & (1 << v) == 0 {
                self.push(v);
                self.run(leaf);
                self.pop();
            }
        }
    }
}

pub fn gradings(g: &GridDiagram, x: &GridState) -> Result<Bigrading> {
    Ok(GradingTable::new(g)?.grading(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::braid_to_grid;
    use crate::perm::{unrank, Permutations};

    #[test]
    fn half_int_text() {
        assert_eq!(HalfInt(3).to_string(), "3/2");
        assert_eq!("-4/2".parse::<HalfInt>().unwrap(), HalfInt(-4));
        assert_eq!("2".parse::<HalfInt>().unwrap(), HalfInt(4));
        assert!("1/3".parse::<HalfInt>().is_err());
        let json = serde_json::to_string(&HalfInt(-1)).unwrap();
        assert_eq!(json, "\"-1/2\"");
        assert_eq!(serde_json::from_str::<HalfInt>(&json).unwrap(), HalfInt(-1));
    }

    #[test]
    fn packing_round_trip() {
        let v = [-7, 0, 12, -1];
        assert_eq!(unpack_alexander(pack_alexander(&v), 4), v.map(HalfInt).to_vec());
    }

    #[test]
    fn unknot_states_differ_by_one() {
        // the two generators span V, bigradings (0,0) and (-1,-1)
        let g = GridDiagram::new(vec![0, 1], vec![1, 0]).unwrap();
        let t = GradingTable::new(&g).unwrap();
        let a = t.grading(&GridState::new(vec![0, 1]).unwrap());
        let b = t.grading(&GridState::new(vec![1, 0]).unwrap());
        assert_eq!((a.maslov, b.maslov), (0, -1));
        assert_eq!(a.alexander, vec![HalfInt(0)]);
        assert_eq!(b.alexander, vec![HalfInt(-2)]);
    }

    #[test]
    fn dfs_matches_direct_evaluation() {
        for text in ["2: 1 1 1", "3: 1 -2 1", "2: 1 1"] {
            let g = braid_to_grid(&text.parse().unwrap());
            let t = GradingTable::new(&g).unwrap();
            let buckets = t.bucket_states(|_| true);
            let mut seen = 0;
            for (key, ranks) in &buckets {
                assert!(ranks.windows(2).all(|w| w[0] < w[1]));
                for &r in ranks {
                    assert_eq!(t.key(&unrank(g.size(), r)), *key);
                    seen += 1;
                }
            }
            assert_eq!(seen, Permutations::new(g.size()).count());
        }
    }
}
