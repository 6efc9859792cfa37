//! Braid word to grid diagram.
//!
//! The construction places one horizontal move per row. Strands start in
//! `n` wrapping columns; every letter moves one strand into a freshly
//! inserted column past exactly one neighbour, and closure rows bring the
//! strands back to the wrapping columns without crossings. Reading the
//! result with [`GridDiagram::to_braid`] returns the input word exactly.
//!
//! A letter can also be laid out as a two-row *band*: the crossing row is
//! followed by a row that parks the crossed strand just left of where the
//! moving strand started. Exchanging the two X markings of such a band
//! deletes the letter from the reading, which is what the pentagon maps
//! need.

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::grid::GridDiagram;

/// A resolvable positive letter inside a layout.
///
/// Rows `upper_row - 1` and `upper_row` hold the band. Column `right` held
/// the moving strand before the crossing, `left` is immediately to its left
/// and receives the crossed strand; `crossed` and `landing` are the other
/// two marked columns of the band rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Band {
    /// Index (1-based) of the letter in the source word.
    pub letter: usize,
    pub generator: usize,
    pub upper_row: usize,
    pub left: usize,
    pub right: usize,
    pub crossed: usize,
    pub landing: usize,
}

#[derive(Debug, Clone)]
pub struct Layout {
    pub grid: GridDiagram,
    pub bands: Vec<Band>,
}

/// Canonical grid for a braid word.
pub fn braid_to_grid(w: &BraidWord) -> GridDiagram {
    layout_with_bands(w, &[]).expect("no bands requested").grid
}

/// Grid for `w` where the listed 1-based letter positions (all positive) are laid out as bands.
pub fn layout_with_bands(w: &BraidWord, band_letters: &[usize]) -> Result<Layout> {
    for &p in band_letters {
        match w.letters().get(p.wrapping_sub(1)) {
            Some(&e) if e > 0 => {}
            Some(_) => return Err(Error::Precondition(format!("letter {p} is not positive"))),
            None => return Err(Error::Precondition(format!("letter {p} out of range"))),
        }
    }
    let mut b = Builder::new(w.strands());
    let mut pending_bands = Vec::new();
    for (idx, &e) in w.letters().iter().enumerate() {
        if band_letters.contains(&(idx + 1)) {
            pending_bands.push(b.band(idx + 1, e as usize));
        } else {
            b.letter(e);
        }
    }
    b.close()?;
    let (grid, index_of) = b.finish();
    let bands = pending_bands
        .into_iter()
        .map(|pb| Band {
            letter: pb.letter,
            generator: pb.generator,
            upper_row: pb.upper_row,
            left: index_of[pb.left],
            right: index_of[pb.right],
            crossed: index_of[pb.crossed],
            landing: index_of[pb.landing],
        })
        .collect();
    Ok(Layout { grid, bands })
}

#[derive(Debug, Clone, Copy, Default)]
struct Column {
    x_row: Option<usize>,
    o_row: Option<usize>,
}

struct PendingBand {
    letter: usize,
    generator: usize,
    upper_row: usize,
    left: usize,
    right: usize,
    crossed: usize,
    landing: usize,
}

struct Builder {
    /// Abstract column ids, left to right.
    order: Vec<usize>,
    columns: Vec<Column>,
    /// Column currently carrying the strand at each position.
    current: Vec<usize>,
    /// Wrapping column of each position.
    home: Vec<usize>,
    /// Band column pairs `(left, right)` that must stay adjacent.
    glued: Vec<(usize, usize)>,
    next_row: usize,
}

impl Builder {
    fn new(strands: usize) -> Self {
        Builder {
            order: (0..strands).collect(),
            columns: vec![Column::default(); strands],
            current: (0..strands).collect(),
            home: (0..strands).collect(),
            glued: Vec::new(),
            next_row: 0,
        }
    }

    fn slot(&self, col: usize) -> usize {
        self.order.iter().position(|&c| c == col).expect("known column")
    }

    fn insert_after(&mut self, mut col: usize) -> usize {
        while let Some(&(_, r)) = self.glued.iter().find(|(l, _)| *l == col) {
            col = r;
        }
        let id = self.columns.len();
        self.columns.push(Column::default());
        let at = self.slot(col) + 1;
        self.order.insert(at, id);
        id
    }

    fn insert_before(&mut self, mut col: usize) -> usize {
        while let Some(&(l, _)) = self.glued.iter().find(|(_, r)| *r == col) {
            col = l;
        }
        let id = self.columns.len();
        self.columns.push(Column::default());
        let at = self.slot(col);
        self.order.insert(at, id);
        id
    }

    fn horizontal(&mut self, from: usize, to: usize) -> usize {
        let row = self.next_row;
        debug_assert!(self.columns[from].o_row.is_none() && self.columns[to].x_row.is_none());
        self.columns[from].o_row = Some(row);
        self.columns[to].x_row = Some(row);
        self.next_row += 1;
        row
    }

    fn letter(&mut self, e: i32) {
        let i = e.unsigned_abs() as usize;
        if e > 0 {
            let fresh = self.insert_after(self.current[i]);
            self.horizontal(self.current[i - 1], fresh);
            self.current[i - 1] = self.current[i];
            self.current[i] = fresh;
        } else {
            let fresh = self.insert_before(self.current[i - 1]);
            self.horizontal(self.current[i], fresh);
            self.current[i] = self.current[i - 1];
            self.current[i - 1] = fresh;
        }
    }

    fn band(&mut self, letter: usize, generator: usize) -> PendingBand {
        let i = generator;
        let right = self.current[i - 1];
        let crossed = self.current[i];
        let landing = self.insert_after(crossed);
        self.horizontal(right, landing);
        let left = self.insert_before(right);
        self.glued.push((left, right));
        let upper_row = self.horizontal(crossed, left);
        self.current[i - 1] = left;
        self.current[i] = landing;
        PendingBand {
            letter,
            generator,
            upper_row,
            left,
            right,
            crossed,
            landing,
        }
    }

    fn is_active(&self, col: usize) -> bool {
        self.current.contains(&col)
    }

    /// Returns every strand to its wrapping column without crossings.
    fn close(&mut self) -> Result<()> {
        let n = self.current.len();
        let mut done = vec![false; n];
        while done.iter().any(|d| !d) {
            let movable = (0..n).find(|&p| {
                if done[p] {
                    return false;
                }
                let target = self.home[p];
                if self.is_active(target) {
                    return false;
                }
                let (a, b) = (self.slot(self.current[p]), self.slot(target));
                let (lo, hi) = (a.min(b), a.max(b));
                !self.order[lo + 1..hi].iter().any(|&c| self.is_active(c))
            });
            if let Some(p) = movable {
                let target = self.home[p];
                self.horizontal(self.current[p], target);
                self.current[p] = target;
                done[p] = true;
                continue;
            }
            let parked = (0..n).find(|&p| !done[p] && self.home.contains(&self.current[p]));
            match parked {
                Some(p) => {
                    let fresh = self.insert_after(self.current[p]);
                    self.horizontal(self.current[p], fresh);
                    self.current[p] = fresh;
                }
                None => {
                    return Err(Error::Invariant(
                        "closure rows cannot be scheduled without crossings".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> (GridDiagram, Vec<usize>) {
        let k = self.order.len();
        let mut index_of = vec![0; k];
        for (idx, &id) in self.order.iter().enumerate() {
            index_of[id] = idx;
        }
        let mut x_rows = vec![0; k];
        let mut o_rows = vec![0; k];
        for (id, col) in self.columns.iter().enumerate() {
            x_rows[index_of[id]] = col.x_row.expect("every column receives an X");
            o_rows[index_of[id]] = col.o_row.expect("every column receives an O");
        }
        (GridDiagram::from_parts_unchecked(x_rows, o_rows), index_of)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> BraidWord {
        s.parse().unwrap()
    }

    #[test]
    fn small_grids() {
        let g = braid_to_grid(&w("1:"));
        assert_eq!(g.size(), 2);
        assert!(g.validate().is_ok());
        assert_eq!(g.to_braid().unwrap(), w("1:"));

        let g = braid_to_grid(&w("2: 1"));
        assert_eq!(g.size(), 3);
        assert_eq!(g.to_braid().unwrap(), w("2: 1"));

        let g = braid_to_grid(&w("2: 1 1 1"));
        assert!(g.size() <= 5);
        assert_eq!(g.to_braid().unwrap(), w("2: 1 1 1"));
    }

    #[test]
    fn trivial_braids_need_two_columns_per_strand() {
        for n in 1..=4 {
            let g = braid_to_grid(&BraidWord::identity(n).unwrap());
            assert_eq!(g.size(), 2 * n);
            assert_eq!(g.component_count(), n);
        }
    }

    #[test]
    fn deterministic() {
        let word = w("3: 1 -2 1 2");
        assert_eq!(braid_to_grid(&word), braid_to_grid(&word));
    }

    #[test]
    fn band_swap_deletes_letter() {
        for text in ["2: 1", "2: 1 1 1", "3: 1 2 1 2", "3: -2 1 2", "4: 3 -1 2"] {
            let word = w(text);
            for pos in 1..=word.len() {
                if word.letters()[pos - 1] < 0 {
                    continue;
                }
                let layout = layout_with_bands(&word, &[pos]).unwrap();
                assert_eq!(layout.grid.to_braid().unwrap(), word, "{text} band at {pos}");
                let band = layout.bands[0];
                let mut x = layout.grid.x_rows().to_vec();
                x[band.left] = band.upper_row - 1;
                x[band.landing] = band.upper_row;
                let resolved = GridDiagram::new(x, layout.grid.o_rows().to_vec()).unwrap();
                assert_eq!(
                    resolved.to_braid().unwrap(),
                    word.resolve_positive_letter(pos).unwrap(),
                    "{text} resolving {pos}"
                );
                assert_eq!(band.right, band.left + 1);
            }
        }
    }

    fn word_strategy() -> impl Strategy<Value = BraidWord> {
        (1usize..=5).prop_flat_map(|n| {
            let letter = if n == 1 {
                Just(0i32).boxed()
            } else {
                (1..n as i32).prop_flat_map(|i| prop_oneof![Just(i), Just(-i)]).boxed()
            };
            prop::collection::vec(letter, 0..8).prop_map(move |ls| {
                BraidWord::new(n, ls.into_iter().filter(|&e| e != 0).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip(word in word_strategy()) {
            let g = braid_to_grid(&word);
            prop_assert!(g.validate().is_ok());
            prop_assert_eq!(g.to_braid().unwrap(), word.clone());
            prop_assert!(g.size() <= 2 * word.strands() + word.len());
            prop_assert_eq!(g.wrapping_columns().len(), word.strands());
            prop_assert_eq!(g.component_count(), word.component_count());
        }

        #[test]
        fn banded_round_trip(word in word_strategy(), pick in any::<u64>()) {
            let positive: Vec<usize> = (1..=word.len()).filter(|&p| word.letters()[p - 1] > 0).collect();
            let chosen: Vec<usize> = positive
                .iter()
                .enumerate()
                .filter(|(j, _)| pick >> (j % 64) & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let layout = layout_with_bands(&word, &chosen).unwrap();
            prop_assert!(layout.grid.validate().is_ok());
            prop_assert_eq!(layout.grid.to_braid().unwrap(), word.clone());
            for band in &layout.bands {
                prop_assert_eq!(band.right, band.left + 1);
            }
        }
    }
}
