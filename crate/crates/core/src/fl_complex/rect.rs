use serde::{Deserialize, Serialize};

use crate::grid::{GridDiagram, GridState};

/// A rectangle on the torus from `start` to `end`.
///
/// It spans vertical lines `left` to `right` going rightwards and horizontal
/// lines `bottom` to `top` going upwards, both modulo `k`. The start state
/// occupies the lower-left and upper-right corners.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub start: GridState,
    pub end: GridState,
    pub left: usize,
    pub right: usize,
    pub bottom: usize,
    pub top: usize,
}

impl Rect {
    fn k(&self) -> usize {
        self.start.size()
    }

    pub fn width(&self) -> usize {
        (self.right + self.k() - self.left) % self.k()
    }

    pub fn height(&self) -> usize {
        (self.top + self.k() - self.bottom) % self.k()
    }

    /// Whether the unit square with lower-left corner `(c, r)` lies inside.
    pub fn contains_square(&self, c: usize, r: usize) -> bool {
        let k = self.k();
        (c + k - self.left) % k < self.width() && (r + k - self.bottom) % k < self.height()
    }

    /// Whether the lattice point `(c, r)` lies in the open interior.
    pub fn contains_point(&self, c: usize, r: usize) -> bool {
        let k = self.k();
        let (dc, dr) = ((c + k - self.left) % k, (r + k - self.bottom) % k);
        dc > 0 && dc < self.width() && dr > 0 && dr < self.height()
    }

    pub fn x_count(&self, g: &GridDiagram) -> usize {
        (0..g.size()).filter(|&c| self.contains_square(c, g.x_rows()[c])).count()
    }

    pub fn o_columns(&self, g: &GridDiagram) -> Vec<usize> {
        (0..g.size()).filter(|&c| self.contains_square(c, g.o_rows()[c])).collect()
    }

    pub fn interior_points(&self) -> usize {
        let rows = self.start.rows();
        (0..rows.len()).filter(|&c| self.contains_point(c, rows[c])).count()
    }

    /// No X, no interior start point, and with `forbid_o` no O either.
    pub fn is_empty(&self, g: &GridDiagram, forbid_o: bool) -> bool {
        self.x_count(g) == 0 && self.interior_points() == 0 && !(forbid_o && !self.o_columns(g).is_empty())
    }
}

/// Both toroidal rectangles from `x` to `y`, or none.
pub fn rectangles(x: &GridState, y: &GridState) -> Vec<Rect> {
    let (xs, ys) = (x.rows(), y.rows());
    if xs.len() != ys.len() {
        return Vec::new();
    }
    let diff: Vec<usize> = (0..xs.len()).filter(|&c| xs[c] != ys[c]).collect();
    let &[i, j] = diff.as_slice() else {
        return Vec::new();
    };
    if ys[i] != xs[j] || ys[j] != xs[i] {
        return Vec::new();
    }
    [(i, j), (j, i)]
        .into_iter()
        .map(|(l, r)| Rect {
            start: x.clone(),
            end: y.clone(),
            left: l,
            right: r,
            bottom: xs[l],
            top: xs[r],
        })
        .collect()
}

pub fn empty_rectangles(g: &GridDiagram, x: &GridState, y: &GridState, forbid_o: bool) -> Vec<Rect> {
    rectangles(x, y)
        .into_iter()
        .filter(|r| r.is_empty(g, forbid_o))
        .collect()
}

/// Calls `f(i, j)` for every empty rectangle with lower-left corner on line
/// `i` and upper-right corner on line `j`. X markings always block; O
/// markings block when `forbid_o` is set.
pub(crate) fn for_each_empty(g: &GridDiagram, x: &[usize], forbid_o: bool, mut f: impl FnMut(usize, usize)) {
    let k = x.len();
    let (xr, or) = (g.x_rows(), g.o_rows());
    for i in 0..k {
        let b = x[i];
        let mut ceil = k;
        for step in 1..k {
            let prev = (i + step - 1) % k;
            ceil = ceil.min((xr[prev] + k - b) % k);
            if forbid_o {
                ceil = ceil.min((or[prev] + k - b) % k);
            }
            if step > 1 {
                ceil = ceil.min((x[prev] + k - b) % k);
            }
            if ceil == 0 {
                break;
            }
            let j = (i + step) % k;
            if (x[j] + k - b) % k <= ceil {
                f(i, j);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::braid_to_grid;
    use crate::perm::Permutations;

    fn unknot() -> GridDiagram {
        GridDiagram::new(vec![0, 1], vec![1, 0]).unwrap()
    }

    fn st(rows: &[usize]) -> GridState {
        GridState::new(rows.to_vec()).unwrap()
    }

    /// Every (left, right, bottom, top) whose corners match the two states.
    fn brute_force_count(g: &GridDiagram, x: &GridState, y: &GridState, forbid_o: bool) -> usize {
        let k = g.size();
        let (xs, ys) = (x.rows(), y.rows());
        let mut count = 0;
        for left in 0..k {
            for right in 0..k {
                for bottom in 0..k {
                    for top in 0..k {
                        if left == right || bottom == top {
                            continue;
                        }
                        let corners_ok = xs[left] == bottom
                            && xs[right] == top
                            && ys[left] == top
                            && ys[right] == bottom
                            && (0..k).all(|c| c == left || c == right || xs[c] == ys[c]);
                        if !corners_ok {
                            continue;
                        }
                        let w = (right + k - left) % k;
                        let h = (top + k - bottom) % k;
                        let sq = |c: usize, r: usize| (c + k - left) % k < w && (r + k - bottom) % k < h;
                        let pt = |c: usize, r: usize| {
                            let (dc, dr) = ((c + k - left) % k, (r + k - bottom) % k);
                            dc > 0 && dc < w && dr > 0 && dr < h
                        };
                        let blocked = (0..k).any(|c| {
                            sq(c, g.x_rows()[c]) || (forbid_o && sq(c, g.o_rows()[c])) || pt(c, xs[c])
                        });
                        if !blocked {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn rectangle_counts() {
        let x = st(&[0, 1]);
        let y = st(&[1, 0]);
        assert!(rectangles(&x, &x).is_empty());
        assert_eq!(rectangles(&x, &y).len(), 2);
        assert!(rectangles(&st(&[0, 1, 2]), &st(&[1, 2, 0])).is_empty());
        for flag in [false, true] {
            assert!(empty_rectangles(&unknot(), &x, &y, flag).is_empty());
        }
        assert!(empty_rectangles(&unknot(), &y, &x, true).is_empty());
        assert_eq!(empty_rectangles(&unknot(), &y, &x, false).len(), 2);
    }

    #[test]
    fn complementary_rectangles_are_disjoint() {
        let g = braid_to_grid(&"2: 1 1 1".parse().unwrap());
        let k = g.size();
        let x = GridState::new((0..k).collect()).unwrap();
        let y = x.swapped(1, 3);
        let rs = rectangles(&x, &y);
        for c in 0..k {
            for r in 0..k {
                assert!(!(rs[0].contains_square(c, r) && rs[1].contains_square(c, r)));
            }
        }
        assert_eq!(rs[0].width() + rs[1].width(), k);
        assert_eq!(rs[0].height() + rs[1].height(), k);
    }

    #[test]
    fn sweep_matches_brute_force() {
        for text in ["2: 1", "2: 1 1 1", "3: 1 -2", "2:"] {
            let g = braid_to_grid(&text.parse().unwrap());
            for perm in Permutations::new(g.size()) {
                let x = GridState::new(perm.clone()).unwrap();
                for forbid_o in [false, true] {
                    let mut fast = Vec::new();
                    for_each_empty(&g, &perm, forbid_o, |i, j| fast.push((i, j)));
                    let mut targets: Vec<Vec<usize>> = Vec::new();
                    for &(i, j) in &fast {
                        targets.push(x.swapped(i, j).rows().to_vec());
                    }
                    let mut brute: Vec<Vec<usize>> = Vec::new();
                    for other in Permutations::new(g.size()) {
                        let y = GridState::new(other.clone()).unwrap();
                        let n = brute_force_count(&g, &x, &y, forbid_o);
                        assert_eq!(n, empty_rectangles(&g, &x, &y, forbid_o).len());
                        for _ in 0..n {
                            brute.push(other.clone());
                        }
                    }
                    targets.sort();
                    brute.sort();
                    assert_eq!(targets, brute, "{text} x={perm:?} forbid_o={forbid_o}");
                }
            }
        }
    }

    #[test]
    fn dropping_o_condition_only_adds_rectangles() {
        let g = braid_to_grid(&"3: 1 2 1".parse().unwrap());
        for perm in Permutations::new(g.size()).step_by(7) {
            let x = GridState::new(perm.clone()).unwrap();
            for i in 0..g.size() {
                for j in i + 1..g.size() {
                    let y = x.swapped(i, j);
                    let strict = empty_rectangles(&g, &x, &y, true);
                    let loose = empty_rectangles(&g, &x, &y, false);
                    assert!(strict.iter().all(|r| loose.contains(r)));
                }
            }
        }
    }
}
