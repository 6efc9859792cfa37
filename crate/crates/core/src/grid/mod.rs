//! Toroidal grid diagrams.
//!
//! Columns and rows are 0-indexed from the bottom-left corner. Marking
//! squares are `(column, row)`; the grid lines are the `k` vertical and `k`
//! horizontal circles, and square `(c, r)` has its upper-right corner at the
//! intersection of vertical line `c + 1` and horizontal line `r + 1`
//! (mod `k`).

mod examples;
mod layout;

pub use examples::{lookup_example, named_examples, Example};
pub use layout::{braid_to_grid, layout_with_bands, Band, Layout};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDiagram {
    size: usize,
    x_rows: Vec<usize>,
    o_rows: Vec<usize>,
}

impl GridDiagram {
    /// Builds and validates a diagram from per-column marking rows.
    pub fn new(x_rows: Vec<usize>, o_rows: Vec<usize>) -> Result<Self> {
        let g = GridDiagram {
            size: x_rows.len(),
            x_rows,
            o_rows,
        };
        g.validate()?;
        Ok(g)
    }

    /// Skips validation; callers must uphold the diagram invariants.
    pub(crate) fn from_parts_unchecked(x_rows: Vec<usize>, o_rows: Vec<usize>) -> Self {
        GridDiagram {
            size: x_rows.len(),
            x_rows,
            o_rows,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.size;
        if k == 0 {
            return Err(Error::InvalidGrid("grid size must be positive".into()));
        }
        if self.o_rows.len() != k {
            return Err(Error::InvalidGrid(format!(
                "X has {} entries but O has {}",
                k,
                self.o_rows.len()
            )));
        }
        for (name, rows) in [("x_rows", &self.x_rows), ("o_rows", &self.o_rows)] {
            if !is_permutation(rows) {
                return Err(Error::InvalidGrid(format!("{name} is not a bijection")));
            }
        }
        if let Some(c) = (0..k).find(|&c| self.x_rows[c] == self.o_rows[c]) {
            return Err(Error::InvalidGrid(format!("shared square in column {c}")));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn x_rows(&self) -> &[usize] {
        &self.x_rows
    }

    pub fn o_rows(&self) -> &[usize] {
        &self.o_rows
    }

    /// Column holding the X of `row`.
    pub fn x_column_of_row(&self, row: usize) -> usize {
        self.x_rows.iter().position(|&r| r == row).expect("valid grid")
    }

    /// Column holding the O of `row`.
    pub fn o_column_of_row(&self, row: usize) -> usize {
        self.o_rows.iter().position(|&r| r == row).expect("valid grid")
    }

    /// Columns whose X sits above their O; each carries one braid strand through the top edge.
    pub fn wrapping_columns(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&c| self.x_rows[c] > self.o_rows[c])
            .collect()
    }

    /// Link component label of every column, numbered by least column.
    ///
    /// The O of column `c` shares its row with the X of the next column
    /// along the link.
    pub fn column_components(&self) -> Vec<usize> {
        let k = self.size;
        let mut label = vec![usize::MAX; k];
        let mut next = 0;
        for start in 0..k {
            if label[start] != usize::MAX {
                continue;
            }
            let mut c = start;
            while label[c] == usize::MAX {
                label[c] = next;
                c = self.x_column_of_row(self.o_rows[c]);
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.column_components().iter().max().map_or(0, |m| m + 1)
    }

    /// Number of O markings on each component.
    pub fn markings_per_component(&self) -> Vec<usize> {
        let comps = self.column_components();
        let mut counts = vec![0; self.component_count()];
        for c in comps {
            counts[c] += 1;
        }
        counts
    }

    /// The generator made of the upper-right corners of the X squares.
    pub fn z_plus(&self) -> GridState {
        let k = self.size;
        let mut rows = vec![0; k];
        for c in 0..k {
            rows[(c + 1) % k] = (self.x_rows[c] + 1) % k;
        }
        GridState { rows }
    }

    /// Reads the closed braid of the diagram bottom-up.
    ///
    /// Horizontal segments run from O to X and pass over the vertical
    /// segments. A strand moving right over `m` strands from position `p`
    /// contributes `σ_p … σ_{p+m-1}`; moving left contributes
    /// `σ_{p-1}⁻¹ … σ_{p-m}⁻¹`.
    pub fn to_braid(&self) -> Result<BraidWord> {
        let k = self.size;
        let strands = self.wrapping_columns().len();
        if strands == 0 {
            return Err(Error::InvalidGrid("no wrapping column; braid has no strands".into()));
        }
        let mut letters = Vec::new();
        for r in 0..k {
            let from = self.o_column_of_row(r);
            let to = self.x_column_of_row(r);
            let active = |c: usize| {
                if c == from || c == to {
                    return false;
                }
                let (x, o) = (self.x_rows[c], self.o_rows[c]);
                if x < o {
                    x < r && r < o
                } else {
                    r > x || r < o
                }
            };
            let position = 1 + (0..from).filter(|&c| active(c)).count() as i32;
            if to > from {
                let crossed = (from + 1..to).filter(|&c| active(c)).count() as i32;
                letters.extend((0..crossed).map(|j| position + j));
            } else {
                let crossed = (to + 1..from).filter(|&c| active(c)).count() as i32;
                letters.extend((1..=crossed).map(|j| -(position - j)));
            }
        }
        BraidWord::new(strands, letters)
    }

    /// ASCII picture, top row first.
    pub fn render(&self) -> String {
        let k = self.size;
        let mut out = String::new();
        for r in (0..k).rev() {
            for c in 0..k {
                out.push(if self.x_rows[c] == r {
                    'X'
                } else if self.o_rows[c] == r {
                    'O'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }
}

pub fn grid_to_braid(g: &GridDiagram) -> Result<BraidWord> {
    g.to_braid()
}

impl fmt::Display for GridDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "k={}", self.size)?;
        writeln!(f, "X: {}", join(&self.x_rows))?;
        write!(f, "O: {}", join(&self.o_rows))
    }
}

impl FromStr for GridDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .map(str::trim)
                .ok_or_else(|| Error::Parse(format!("missing {what} line")))
        };
        let k_line = next("k=")?;
        let k: usize = k_line
            .strip_prefix("k=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad size line `{k_line}`")))?;
        let parse_rows = |line: &str, prefix: &str| -> Result<Vec<usize>> {
            let body = line
                .strip_prefix(prefix)
                .ok_or_else(|| Error::Parse(format!("expected `{prefix}` line, got `{line}`")))?;
            let rows = body
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad row `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            if rows.len() != k {
                return Err(Error::Parse(format!(
                    "`{prefix}` line has {} entries, expected {k}",
                    rows.len()
                )));
            }
            Ok(rows)
        };
        let x = parse_rows(next("X:")?, "X:")?;
        let o = parse_rows(next("O:")?, "O:")?;
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("unexpected trailing line `{extra}`")));
        }
        GridDiagram::new(x, o)
    }
}

/// A generator: `rows[i]` is the horizontal circle met on vertical circle `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridState {
    rows: Vec<usize>,
}

impl GridState {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if !is_permutation(&rows) {
            return Err(Error::InvalidState(format!("{rows:?} is not a bijection")));
        }
        Ok(GridState { rows })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Vertical circle carrying the point on horizontal circle `row`.
    pub fn column_of_row(&self, row: usize) -> usize {
        self.rows.iter().position(|&r| r == row).expect("bijection")
    }

    /// Same state with the points on vertical circles `a` and `b` exchanged.
    pub fn swapped(&self, a: usize, b: usize) -> GridState {
        let mut rows = self.rows.clone();
        rows.swap(a, b);
        GridState { rows }
    }
}

pub(crate) fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    for &r in v {
        if r >= v.len() || seen[r] {
            return false;
        }
        seen[r] = true;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GridDiagram::new(vec![0, 1], vec![1, 0]).is_ok());
        let shared = GridDiagram::new(vec![0, 1], vec![0, 1]).unwrap_err();
        assert_eq!(shared, Error::InvalidGrid("shared square in column 0".into()));
        let dup = GridDiagram::new(vec![0, 0, 1], vec![1, 2, 0]).unwrap_err();
        assert_eq!(dup, Error::InvalidGrid("x_rows is not a bijection".into()));
    }

    #[test]
    fn text_format() {
        let g = GridDiagram::new(vec![0, 1], vec![1, 0]).unwrap();
        let text = g.to_string();
        assert_eq!(text, "k=2\nX: 0 1\nO: 1 0");
        assert_eq!(text.parse::<GridDiagram>().unwrap(), g);
        assert!("k=2\nX: 0 1\nO: 0 1".parse::<GridDiagram>().is_err());
        assert!("k=3\nX: 0 1\nO: 1 0".parse::<GridDiagram>().is_err());
        assert!("X: 0 1\nO: 1 0".parse::<GridDiagram>().is_err());
    }

    #[test]
    fn z_plus_on_two_by_two() {
        let g = GridDiagram::new(vec![0, 1], vec![1, 0]).unwrap();
        assert_eq!(g.z_plus().rows(), &[0, 1]);
    }

    #[test]
    fn unknot_reads_as_one_strand() {
        // column 0 has its X above its O and wraps; column 1 does not
        let g = GridDiagram::new(vec![1, 0], vec![0, 1]).unwrap();
        let w = g.to_braid().unwrap();
        assert_eq!(w.strands(), 1);
        assert!(w.is_empty());
        assert_eq!(g.component_count(), 1);
    }

    #[test]
    fn components_of_a_two_component_grid() {
        // two unknots side by side
        let g = GridDiagram::new(vec![1, 0, 3, 2], vec![0, 1, 2, 3]).unwrap();
        assert_eq!(g.column_components(), vec![0, 0, 1, 1]);
        assert_eq!(g.markings_per_component(), vec![2, 2]);
        assert_eq!(g.to_braid().unwrap(), "2:".parse().unwrap());
    }

    /// A 5×5 grid reading σ₁σ₂σ₁σ₂ exists, found by exhaustive search.
    #[test]
    fn grid_number_five_trefoil_reading() {
        let target: BraidWord = "3: 1 2 1 2".parse().unwrap();
        let perms = all_perms(5);
        let found = perms.iter().any(|x| {
            perms.iter().any(|o| {
                (0..5).all(|c| x[c] != o[c])
                    && GridDiagram::from_parts_unchecked(x.clone(), o.clone()).to_braid().ok()
                        == Some(target.clone())
            })
        });
        assert!(found);
    }

    fn all_perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(k - 1) {
            for pos in 0..k {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }
}
