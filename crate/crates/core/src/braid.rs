//! Braid words and the word-level moves used to build transverse examples.
//!
//! A letter `e` stands for `σ_|e|` with exponent `sign(e)`. Strands are
//! labelled `1..=n` by their position at the bottom of the braid. Word
//! equality is literal sequence equality; nothing here performs free
//! reduction unless asked to.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidBraid("strand count must be positive".into()));
        }
        for &e in &letters {
            let idx = e.unsigned_abs() as usize;
            if e == 0 || idx >= strands {
                return Err(Error::InvalidBraid(format!(
                    "letter {e} out of range for {strands} strands"
                )));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// The trivial braid `I_n`.
    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Positive letters minus negative letters.
    pub fn algebraic_length(&self) -> i64 {
        self.letters.iter().map(|&e| e.signum() as i64).sum()
    }

    /// Self-linking number of the transverse closure: `a(w) - n`.
    pub fn self_linking(&self) -> i64 {
        self.algebraic_length() - self.strands as i64
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord> {
        self.same_strands(other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    /// Letters reversed and negated.
    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|&e| -e).collect(),
        }
    }

    pub fn pow(&self, exp: usize) -> BraidWord {
        let mut letters = Vec::with_capacity(self.letters.len() * exp);
        for _ in 0..exp {
            letters.extend_from_slice(&self.letters);
        }
        BraidWord {
            strands: self.strands,
            letters,
        }
    }

    /// Cancels adjacent `e, -e` pairs until none remain.
    pub fn free_reduce(&self) -> BraidWord {
        let mut out: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &e in &self.letters {
            if out.last() == Some(&-e) {
                out.pop();
            } else {
                out.push(e);
            }
        }
        BraidWord {
            strands: self.strands,
            letters: out,
        }
    }

    /// `perm[j-1]` is the top position reached by the strand starting at bottom position `j`.
    pub fn permutation(&self) -> Vec<usize> {
        let n = self.strands;
        // pos_to_strand[p] = strand label currently at position p (0-based)
        let mut pos_to_strand: Vec<usize> = (0..n).collect();
        for &e in &self.letters {
            let i = e.unsigned_abs() as usize - 1;
            pos_to_strand.swap(i, i + 1);
        }
        let mut perm = vec![0; n];
        for (pos, &strand) in pos_to_strand.iter().enumerate() {
            perm[strand] = pos + 1;
        }
        perm
    }

    pub fn component_partition(&self) -> ComponentPartition {
        let perm = self.permutation();
        let n = self.strands;
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j + 1);
                j = perm[j] - 1;
            }
            cycle.sort_unstable();
            cycles.push(cycle);
        }
        // starts are visited in increasing order, so cycles are already
        // sorted by their least strand
        ComponentPartition { cycles }
    }

    pub fn component_count(&self) -> usize {
        self.component_partition().component_count()
    }

    /// Deletes every strand not in `keep` (bottom labels, 1-based).
    pub fn restrict_to_strands(&self, keep: &BTreeSet<usize>) -> Result<BraidWord> {
        let n = self.strands;
        if keep.is_empty() {
            return Err(Error::Precondition("cannot restrict to no strands".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::Precondition(format!(
                "strand {bad} out of range 1..={n}"
            )));
        }
        for cycle in self.component_partition().cycles() {
            let kept = cycle.iter().filter(|s| keep.contains(s)).count();
            if kept != 0 && kept != cycle.len() {
                return Err(Error::Precondition(format!(
                    "strand set splits the component {cycle:?}"
                )));
            }
        }
        let mut pos_to_strand: Vec<usize> = (1..=n).collect();
        let mut letters = Vec::new();
        for &e in &self.letters {
            let i = e.unsigned_abs() as usize;
            let (left, right) = (pos_to_strand[i - 1], pos_to_strand[i]);
            if keep.contains(&left) && keep.contains(&right) {
                let rank = pos_to_strand[..i]
                    .iter()
                    .filter(|s| keep.contains(s))
                    .count() as i32;
                letters.push(rank * e.signum());
            }
            pos_to_strand.swap(i - 1, i);
        }
        BraidWord::new(keep.len(), letters)
    }

    /// Self-linking numbers of every nonempty sublink, keyed by component labels.
    pub fn self_linking_data(&self) -> SelfLinkingData {
        let partition = self.component_partition();
        let l = partition.component_count();
        let mut entries = BTreeMap::new();
        for mask in 1u64..(1u64 << l) {
            let labels: Vec<usize> = (0..l).filter(|c| mask >> c & 1 == 1).map(|c| c + 1).collect();
            let keep: BTreeSet<usize> = labels
                .iter()
                .flat_map(|&c| partition.cycles()[c - 1].iter().copied())
                .collect();
            let sub = self
                .restrict_to_strands(&keep)
                .expect("unions of components are always restrictable");
            entries.insert(labels, sub.self_linking());
        }
        SelfLinkingData { entries }
    }

    /// `u · self · u⁻¹`.
    pub fn conjugate(&self, u: &BraidWord) -> Result<BraidWord> {
        u.concat(self)?.concat(&u.inverse())
    }

    /// Cyclic rotation moving the first `shift` letters to the end.
    pub fn rotate(&self, shift: usize) -> BraidWord {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let s = shift % letters.len();
            letters.rotate_left(s);
        }
        BraidWord {
            strands: self.strands,
            letters,
        }
    }

    /// Markov stabilization: appends `σ_n^{sign}` on `n + 1` strands.
    pub fn stabilize(&self, sign: i32) -> Result<BraidWord> {
        if sign != 1 && sign != -1 {
            return Err(Error::Precondition(format!("stabilization sign must be ±1, got {sign}")));
        }
        let mut letters = self.letters.clone();
        letters.push(sign * self.strands as i32);
        BraidWord::new(self.strands + 1, letters)
    }

    /// Inverse of [`BraidWord::stabilize`] for words already in destabilizable form.
    pub fn destabilize(&self) -> Result<BraidWord> {
        let n = self.strands;
        let top = n as i32 - 1;
        match self.letters.last() {
            Some(&e) if e.abs() == top => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "last letter is not σ_{top}^±1"
                )))
            }
        }
        let count = self.letters.iter().filter(|e| e.abs() == top).count();
        if count != 1 {
            return Err(Error::Precondition(format!(
                "σ_{top} occurs {count} times; destabilization needs exactly one"
            )));
        }
        BraidWord::new(n - 1, self.letters[..self.letters.len() - 1].to_vec())
    }

    /// Deletes the positive letter at 1-based `position`.
    pub fn resolve_positive_letter(&self, position: usize) -> Result<BraidWord> {
        if position == 0 || position > self.letters.len() {
            return Err(Error::Precondition(format!(
                "position {position} out of range 1..={}",
                self.letters.len()
            )));
        }
        if self.letters[position - 1] < 0 {
            return Err(Error::Precondition(format!(
                "letter at position {position} is negative"
            )));
        }
        let mut letters = self.letters.clone();
        letters.remove(position - 1);
        BraidWord::new(self.strands, letters)
    }

    fn same_strands(&self, other: &BraidWord) -> Result<()> {
        if self.strands != other.strands {
            return Err(Error::Precondition(format!(
                "strand counts differ: {} vs {}",
                self.strands, other.strands
            )));
        }
        Ok(())
    }

    fn avoids_first_generator(&self) -> bool {
        self.letters.iter().all(|e| e.abs() != 1)
    }
}

impl fmt::Display for BraidWord {
    /// Text format `n: e1 e2 ... ek`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.strands)?;
        for e in &self.letters {
            write!(f, " {e}")?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `n: letters`, got `{s}`")))?;
        let strands: usize = head
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad strand count `{}`", head.trim())))?;
        let letters = tail
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i32>()
                    .map_err(|_| Error::Parse(format!("bad letter `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        BraidWord::new(strands, letters)
    }
}

/// Orbits of the closed braid's permutation; one per link component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentPartition {
    cycles: Vec<Vec<usize>>,
}

impl ComponentPartition {
    /// Cycles ordered by least strand; component `c` (1-based) is `cycles()[c - 1]`.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn component_count(&self) -> usize {
        self.cycles.len()
    }

    /// 1-based component label of a strand.
    pub fn component_of(&self, strand: usize) -> Option<usize> {
        self.cycles
            .iter()
            .position(|c| c.contains(&strand))
            .map(|i| i + 1)
    }
}

/// `sl` of every nonempty sublink, keyed by sorted 1-based component labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfLinkingData {
    entries: BTreeMap<Vec<usize>, i64>,
}

impl SelfLinkingData {
    pub fn entries(&self) -> &BTreeMap<Vec<usize>, i64> {
        &self.entries
    }

    pub fn get(&self, labels: &[usize]) -> Option<i64> {
        self.entries.get(labels).copied()
    }

    pub fn component_count(&self) -> usize {
        self.entries.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    pub fn full(&self) -> Option<i64> {
        let l = self.component_count();
        self.get(&(1..=l).collect::<Vec<_>>())
    }
}

/// Every word on `strands` strands of length at most `max_len`, shortest
/// first, letters ordered `σ₁, σ₁⁻¹, σ₂, …`.
pub fn all_words(strands: usize, max_len: usize) -> Vec<BraidWord> {
    let gens: Vec<i32> = (1..strands as i32).flat_map(|i| [i, -i]).collect();
    let mut out = vec![BraidWord {
        strands,
        letters: Vec::new(),
    }];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for idx in start..end {
            for &g in &gens {
                let mut letters = out[idx].letters.clone();
                letters.push(g);
                out.push(BraidWord { strands, letters });
            }
        }
        start = end;
    }
    out
}

/// Exchange move pair `(a σ₁ b σ₁⁻¹ c, a σ₁⁻¹ b σ₁ c)`.
pub fn exchange_move(a: &BraidWord, b: &BraidWord, c: &BraidWord) -> Result<(BraidWord, BraidWord)> {
    let flype = negative_flype_pair(a, b, c, 1)?;
    Ok((flype.w1, flype.w2))
}

/// Result of [`negative_flype_pair`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlypePair {
    pub w1: BraidWord,
    pub w2: BraidWord,
    /// Whether equal self-linking data is guaranteed for the pair.
    pub sl_data_equal: bool,
}

/// Negative flype pair `(a σ₁^m b σ₁⁻¹ c, a σ₁⁻¹ b σ₁^m c)`.
pub fn negative_flype_pair(a: &BraidWord, b: &BraidWord, c: &BraidWord, m: usize) -> Result<FlypePair> {
    a.same_strands(b)?;
    a.same_strands(c)?;
    let n = a.strands;
    if n < 2 {
        return Err(Error::Precondition("flype needs at least two strands".into()));
    }
    if m == 0 {
        return Err(Error::Precondition("flype exponent must be at least 1".into()));
    }
    for (name, frag) in [("a", a), ("b", b), ("c", c)] {
        if !frag.avoids_first_generator() {
            return Err(Error::Precondition(format!("fragment {name} uses σ₁")));
        }
    }
    let build = |first: &[i32], second: &[i32]| {
        let mut letters = a.letters.clone();
        letters.extend_from_slice(first);
        letters.extend_from_slice(&b.letters);
        letters.extend_from_slice(second);
        letters.extend_from_slice(&c.letters);
        BraidWord { strands: n, letters }
    };
    let power = vec![1; m];
    let w1 = build(&power, &[-1]);
    let w2 = build(&[-1], &power);

    let sl_data_equal = if m % 2 == 1 {
        true
    } else {
        // strands sitting at positions 1 and 2 once `a` has been read
        let mut pos_to_strand: Vec<usize> = (1..=n).collect();
        for &e in &a.letters {
            let i = e.unsigned_abs() as usize;
            pos_to_strand.swap(i - 1, i);
        }
        let parts = w1.component_partition();
        parts.component_of(pos_to_strand[0]) == parts.component_of(pos_to_strand[1])
    };
    Ok(FlypePair { w1, w2, sl_data_equal })
}

/// `ψ_{j,k,l}`: re-embeds a `j`-strand word into `B_k`, shifting indices by `l`.
pub fn translate_psi(g: &BraidWord, j: usize, k: usize, l: usize) -> Result<BraidWord> {
    if g.strands != j || j == 0 || j > k || l > k - j {
        return Err(Error::Precondition(format!(
            "ψ needs 1 ≤ j ≤ k, 0 ≤ l ≤ k - j and a word on j strands (j={j}, k={k}, l={l}, word on {})",
            g.strands
        )));
    }
    let shift = l as i32;
    BraidWord::new(
        k,
        g.letters.iter().map(|&e| e.signum() * (e.abs() + shift)).collect(),
    )
}

/// Braid on `n + m - 1` strands whose closure is the connected sum along the shared strand.
pub fn connected_sum_word(g: &BraidWord, h: &BraidWord) -> Result<BraidWord> {
    let total = g.strands + h.strands - 1;
    let lifted_g = translate_psi(g, g.strands, total, 0)?;
    let shifted_h = translate_psi(h, h.strands, total, g.strands - 1)?;
    lifted_g.concat(&shifted_h)
}

/// Product of conjugates `u σ_i u⁻¹` on `strands` strands.
pub fn quasipositive_witness(strands: usize, factors: &[(BraidWord, usize)]) -> Result<BraidWord> {
    let mut letters = Vec::new();
    for (u, i) in factors {
        if u.strands != strands {
            return Err(Error::Precondition(format!(
                "conjugator on {} strands, expected {strands}",
                u.strands
            )));
        }
        if *i == 0 || *i >= strands {
            return Err(Error::Precondition(format!("generator index {i} out of range")));
        }
        letters.extend_from_slice(&u.letters);
        letters.push(*i as i32);
        letters.extend(u.inverse().letters);
    }
    BraidWord::new(strands, letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_enumeration_counts() {
        assert_eq!(all_words(1, 4).len(), 1);
        assert_eq!(all_words(2, 3).len(), 1 + 2 + 4 + 8);
        assert_eq!(all_words(3, 2).len(), 1 + 4 + 16);
        assert_eq!(all_words(3, 1)[1].letters(), &[1]);
    }

    fn w(s: &str) -> BraidWord {
        s.parse().unwrap()
    }

    fn keep(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn algebraic_length_and_sl() {
        assert_eq!(w("2: 1 1 1").algebraic_length(), 3);
        assert_eq!(w("2: -1").algebraic_length(), -1);
        assert_eq!(w("1:").self_linking(), -1);
        assert_eq!(w("2: -1").self_linking(), -3);
    }

    #[test]
    fn parse_rejects_bad_letters() {
        assert!("2: 2".parse::<BraidWord>().is_err());
        assert!("2: 0".parse::<BraidWord>().is_err());
        assert!("0:".parse::<BraidWord>().is_err());
        assert!("2 1 1".parse::<BraidWord>().is_err());
        assert!("2: x".parse::<BraidWord>().is_err());
        assert_eq!(w("3:").letters(), &[] as &[i32]);
    }

    #[test]
    fn components() {
        assert_eq!(w("2: 1").component_count(), 1);
        assert_eq!(w("3:").component_count(), 3);
        assert_eq!(w("2: 1 1").component_partition().cycles(), &[vec![1], vec![2]]);
        assert_eq!(w("3: 1 2").component_partition().cycles(), &[vec![1, 2, 3]]);
    }

    #[test]
    fn restriction() {
        let hopf = w("2: 1 1");
        assert_eq!(hopf.restrict_to_strands(&keep(&[1, 2])).unwrap(), hopf);
        assert_eq!(hopf.restrict_to_strands(&keep(&[1])).unwrap(), w("1:"));
        assert_eq!(w("3:").restrict_to_strands(&keep(&[2])).unwrap(), w("1:"));
        assert!(w("2: 1").restrict_to_strands(&keep(&[1])).is_err());
        // strand 3 crossing both others twice; dropping it re-indexes σ₂ away
        let x = w("3: 1 1 2 2");
        assert_eq!(x.restrict_to_strands(&keep(&[1, 2])).unwrap(), w("2: 1 1"));
        assert_eq!(x.restrict_to_strands(&keep(&[3])).unwrap(), w("1:"));
    }

    #[test]
    fn sl_data() {
        let d = w("2: 1 1").self_linking_data();
        assert_eq!(d.get(&[1, 2]), Some(0));
        assert_eq!(d.get(&[1]), Some(-1));
        assert_eq!(d.get(&[2]), Some(-1));
        let e = w("2:").self_linking_data();
        assert_eq!(e.full(), Some(-2));
        assert_eq!(e.get(&[1]), Some(-1));
        assert_eq!(e.entries().len(), 3);
    }

    #[test]
    fn conjugation() {
        assert_eq!(w("2: 1").conjugate(&w("2:")).unwrap(), w("2: 1"));
        let c = w("3: 1 2").conjugate(&w("3: 1")).unwrap();
        assert_eq!(c, w("3: 1 1 2 -1"));
        assert_eq!(c.self_linking(), w("3: 1 2").self_linking());
        assert_eq!(c.component_count(), 1);
    }

    #[test]
    fn stabilization_round_trip() {
        assert_eq!(w("1:").stabilize(1).unwrap(), w("2: 1"));
        assert_eq!(w("2: 1 1 1").stabilize(-1).unwrap(), w("3: 1 1 1 -2"));
        assert_eq!(w("2: 1").destabilize().unwrap(), w("1:"));
        assert_eq!(w("3: 1 1 1 -2").destabilize().unwrap(), w("2: 1 1 1"));
        assert!(w("3: 2 1 2").destabilize().is_err());
        assert!(w("3: 2 1").destabilize().is_err());
        assert!(w("2: 1").stabilize(0).is_err());
    }

    #[test]
    fn exchange() {
        let (w1, w2) = exchange_move(&w("3: 2"), &w("3: 2"), &w("3:")).unwrap();
        assert_eq!(w1, w("3: 2 1 2 -1"));
        assert_eq!(w2, w("3: 2 -1 2 1"));
        let (e1, e2) = exchange_move(&w("2:"), &w("2:"), &w("2:")).unwrap();
        assert_eq!((e1, e2), (w("2: 1 -1"), w("2: -1 1")));
        assert!(exchange_move(&w("3: 1"), &w("3:"), &w("3:")).is_err());
    }

    #[test]
    fn flype() {
        let p = negative_flype_pair(&w("2:"), &w("2:"), &w("2:"), 1).unwrap();
        assert_eq!(p.w1, w("2: 1 -1"));
        assert_eq!(p.w2, w("2: -1 1"));
        assert!(p.sl_data_equal);
        let q = negative_flype_pair(&w("3: 2"), &w("3:"), &w("3:"), 2).unwrap();
        assert_eq!(q.w1.permutation(), q.w2.permutation());
        assert!(negative_flype_pair(&w("3:"), &w("3:"), &w("3:"), 0).is_err());
    }

    #[test]
    fn psi() {
        let g = w("4: 3 2 3 1 2 3");
        assert_eq!(translate_psi(&g, 4, 8, 3).unwrap(), w("8: 6 5 6 4 5 6"));
        assert_eq!(translate_psi(&w("2: 1"), 2, 2, 0).unwrap(), w("2: 1"));
        assert!(translate_psi(&w("2: 1"), 2, 3, 2).is_err());
        assert!(translate_psi(&w("2: 1"), 3, 4, 0).is_err());
        let shifted = translate_psi(&w("2: 1"), 2, 5, 1).unwrap();
        assert_eq!(shifted.component_count(), 1 + 3);
    }

    #[test]
    fn connected_sums() {
        let s = connected_sum_word(&w("2: 1"), &w("2: 1")).unwrap();
        assert_eq!(s, w("3: 1 2"));
        assert_eq!(s.component_count(), 1);
        assert_eq!(s.self_linking(), w("2: 1").self_linking() * 2 + 1);
        assert_eq!(connected_sum_word(&w("1:"), &w("3: 1 -2")).unwrap(), w("3: 1 -2"));
        assert_eq!(
            connected_sum_word(&w("2: 1 1 1"), &w("2: 1 1 1")).unwrap(),
            w("3: 1 1 1 2 2 2")
        );
    }

    #[test]
    fn quasipositive() {
        let one = w("2:");
        let q = quasipositive_witness(2, &[(one.clone(), 1), (one.clone(), 1), (one, 1)]).unwrap();
        assert_eq!(q, w("2: 1 1 1"));
        let r = quasipositive_witness(3, &[(w("3: 2"), 1)]).unwrap();
        assert_eq!(r, w("3: 2 1 -2"));
        assert_eq!(r.algebraic_length(), 1);
    }

    #[test]
    fn resolving_letters() {
        assert_eq!(w("2: 1 1 1").resolve_positive_letter(3).unwrap(), w("2: 1 1"));
        assert!(w("2: -1").resolve_positive_letter(1).is_err());
        // deleting the conjugated generators of a quasipositive witness leaves a freely trivial word
        let q = quasipositive_witness(3, &[(w("3: 2 -1"), 1), (w("3: -2"), 2)]).unwrap();
        assert_eq!(q.letters(), &[2, -1, 1, 1, -2, -2, 2, 2]);
        let r = q.resolve_positive_letter(7).unwrap().resolve_positive_letter(3).unwrap();
        assert!(r.free_reduce().is_empty());
    }
}
