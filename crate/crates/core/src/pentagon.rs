//! Resolution of a positive crossing by counting pentagons.
//!
//! A positive letter laid out as a band (see [`layout_with_bands`]) gives a
//! grid `G_β` in which the horizontal circle `β` separates the two band rows.
//! Replacing `β` by a curve `γ` that bends up into the upper band row over
//! the band's two left columns, and down into the lower row everywhere else,
//! gives a grid `G_γ` that reads the word with the letter deleted. In the
//! straightened picture `G_γ` is `G_β` with the X markings of the band's
//! outer columns exchanged.
//!
//! Geometry is measured in quarter units: vertical line `c` sits at `4c`,
//! a marking column is centred at `4c + 2`, horizontal line `r` at height
//! `4r` and markings at height `4r + 2`. With band columns `N < P = N + 1`,
//! `γ` meets `β` at `u = 4N + 1` and `v = 4P + 3`, and lies at height
//! `4s + 3` between them and `4s - 3` elsewhere.
//!
//! A pentagon from `x` on `G_β` to `y` on `G_γ` uses the point of `x` on
//! `β` (line `c1`) and one other point `(c2, t)` of `x`; `y` swaps the two
//! heights. Its boundary runs along `β`, turns onto `γ` at the convex
//! intersection point `b = u`, and closes with two vertical arcs and an arc
//! of the circle at height `t`. Whether the region lies above or below the
//! curves depends on which side of `c1` the point `u` falls.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::fl_complex::tilde_differential;
use crate::gf2::{normalize, SparseBitMatrix};
use crate::grid::{layout_with_bands, Band, GridDiagram, GridState};
use crate::perm::{self, check_cap, factorial, unrank};
use crate::transverse::{theta, ThetaCertificate};

/// A point of the torus in quarter units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionPair {
    /// Reading of `g_beta`.
    pub word: BraidWord,
    /// Reading of `g_gamma`.
    pub resolved_word: BraidWord,
    pub g_beta: GridDiagram,
    pub g_gamma: GridDiagram,
    pub band: Band,
    /// Index of the horizontal circle replaced by `γ`.
    pub special_circle: usize,
    /// The corner point `b` followed by the other intersection of `β` and `γ`.
    pub intersections: [CurvePoint; 2],
}

impl ResolutionPair {
    /// Pair for a band of `g_beta`; `g_gamma` exchanges the band's outer X markings.
    pub fn from_band(word: BraidWord, g_beta: GridDiagram, band: Band) -> Result<Self> {
        let k = g_beta.size();
        let s = band.upper_row;
        let lower = (s + k - 1) % k;
        let (n, p, q, m) = (band.left, band.right, band.crossed, band.landing);
        let x = g_beta.x_rows();
        let o = g_beta.o_rows();
        if p != (n + 1) % k || x[n] != s || x[m] != lower || o[p] != lower || o[q] != s {
            return Err(Error::Precondition("band markings do not match the layout".into()));
        }
        let mut gx = x.to_vec();
        gx[n] = lower;
        gx[m] = s;
        let g_gamma = GridDiagram::new(gx, o.to_vec())?;
        let resolved_word = g_gamma.to_braid()?;
        let hgt = 4 * s % (4 * k);
        Ok(ResolutionPair {
            word,
            resolved_word,
            g_beta,
            g_gamma,
            band,
            special_circle: s,
            intersections: [
                CurvePoint {
                    x: 4 * n + 1,
                    height: hgt,
                },
                CurvePoint {
                    x: (4 * p + 3) % (4 * k),
                    height: hgt,
                },
            ],
        })
    }

    pub fn size(&self) -> usize {
        self.g_beta.size()
    }

    /// The same pair with the two exchanged X markings of `g_gamma` put back.
    pub fn corrupted(&self) -> ResolutionPair {
        let mut out = self.clone();
        out.g_gamma = self.g_beta.clone();
        out
    }

    fn quarter(&self) -> usize {
        4 * self.size()
    }

    /// Height of `γ` at a horizontal position in quarter units.
    fn gamma_height(&self, xq: usize) -> usize {
        let kq = self.quarter();
        let [u, v] = [self.intersections[0].x, self.intersections[1].x];
        let s4 = 4 * self.special_circle;
        if xq != u && (xq + kq - u) % kq < (v + kq - u) % kq {
            (s4 + 3) % kq
        } else {
            (s4 + kq - 3) % kq
        }
    }
}

/// The pair resolving the final letter of `w · σ_i`.
pub fn build_resolution(w: &BraidWord, i: usize) -> Result<ResolutionPair> {
    if i == 0 || i >= w.strands() {
        return Err(Error::Precondition(format!("generator {i} out of range")));
    }
    let mut letters = w.letters().to_vec();
    letters.push(i as i32);
    let word = BraidWord::new(w.strands(), letters)?;
    build_resolution_at(&word, word.len())
}

/// The pair resolving the positive letter at a 1-based position.
pub fn build_resolution_at(word: &BraidWord, position: usize) -> Result<ResolutionPair> {
    let layout = layout_with_bands(word, &[position])?;
    ResolutionPair::from_band(word.clone(), layout.grid, layout.bands[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PentagonShape {
    /// The region lies above `β ∪ γ`, sweeping right from the `β` point.
    AboveCurves,
    /// The region lies below `β ∪ γ`, sweeping right to the `β` point.
    BelowCurves,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pentagon {
    pub source: GridState,
    pub target: GridState,
    /// Column of the source point on `β`.
    pub beta_column: usize,
    /// The other column where source and target differ.
    pub other_column: usize,
    /// Row of the source point in `other_column`.
    pub level: usize,
    pub shape: PentagonShape,
    /// Corners in boundary order, in quarter units: source point on `β`,
    /// `b`, target point on `γ`, then the two corners at height `level`.
    pub corners: [CurvePoint; 5],
}

/// Inside test for the open arc `(lower, upper)` measured upwards on a circle of length `kq`.
fn strictly_between(h: usize, lower: usize, upper: usize, kq: usize) -> bool {
    let d = (h + kq - lower) % kq;
    d > 0 && d < (upper + kq - lower) % kq
}

/// Checks the pentagon from `x` using columns `c1` (on `β`) and `c2`.
fn pentagon_shape(pair: &ResolutionPair, x: &[usize], c1: usize, c2: usize, forbid_o: bool) -> Option<PentagonShape> {
    let k = x.len();
    let kq = 4 * k;
    let s4 = 4 * pair.special_circle;
    let t4 = 4 * x[c2];
    let u = pair.intersections[0].x;
    let above = (u + kq - 4 * c1) % kq < (4 * c2 + kq - 4 * c1) % kq;
    let (left, right) = if above { (c1, c2) } else { (c2, c1) };
    // horizontal offset of `u` from the left side of the sweep
    let du = (u + kq - 4 * left) % kq;
    let curve = |xq: usize| -> usize {
        let before_u = (xq + kq - 4 * left) % kq < du;
        match (above, before_u) {
            (true, true) | (false, false) => s4,
            _ => pair.gamma_height(xq),
        }
    };
    let bounds = |xq: usize| if above { (curve(xq), t4) } else { (t4, curve(xq)) };
    let width = (right + k - left) % k;
    let xr = pair.g_beta.x_rows();
    let or = pair.g_beta.o_rows();
    for step in 0..width {
        let c = (left + step) % k;
        let (lo, hi) = bounds(4 * c + 2);
        if strictly_between(4 * xr[c] + 2, lo, hi, kq) {
            return None;
        }
        if forbid_o && strictly_between(4 * or[c] + 2, lo, hi, kq) {
            return None;
        }
        if step > 0 {
            let (lo, hi) = bounds(4 * c);
            if strictly_between(4 * x[c], lo, hi, kq) {
                return None;
            }
        }
    }
    Some(if above {
        PentagonShape::AboveCurves
    } else {
        PentagonShape::BelowCurves
    })
}

/// Calls `f(c2)` for every empty pentagon leaving `x`.
fn for_each_pentagon(pair: &ResolutionPair, x: &[usize], forbid_o: bool, mut f: impl FnMut(usize, usize, PentagonShape)) {
    let s = pair.special_circle;
    let c1 = x.iter().position(|&r| r == s).expect("state meets every circle");
    for c2 in 0..x.len() {
        if c2 != c1 {
            if let Some(shape) = pentagon_shape(pair, x, c1, c2, forbid_o) {
                f(c1, c2, shape);
            }
        }
    }
}

/// Empty pentagons from `x` (on `G_β`) to `y` (on `G_γ`).
pub fn pentagons(pair: &ResolutionPair, x: &GridState, y: &GridState, forbid_o: bool) -> Vec<Pentagon> {
    let (xs, ys) = (x.rows(), y.rows());
    let k = pair.size();
    if xs.len() != k || ys.len() != k {
        return Vec::new();
    }
    let s = pair.special_circle;
    let mut out = Vec::new();
    for_each_pentagon(pair, xs, forbid_o, |c1, c2, shape| {
        let mut target = xs.to_vec();
        target.swap(c1, c2);
        if target != ys {
            return;
        }
        let t = xs[c2];
        let b = pair.intersections[0];
        let gamma_at_c2 = pair.gamma_height(4 * c2);
        out.push(Pentagon {
            source: x.clone(),
            target: y.clone(),
            beta_column: c1,
            other_column: c2,
            level: t,
            shape,
            corners: [
                CurvePoint {
                    x: 4 * c1,
                    height: 4 * s,
                },
                b,
                CurvePoint {
                    x: 4 * c2,
                    height: gamma_at_c2,
                },
                CurvePoint {
                    x: 4 * c2,
                    height: 4 * t,
                },
                CurvePoint {
                    x: 4 * c1,
                    height: 4 * t,
                },
            ],
        });
    });
    out
}

/// Ranks of `φ̃ x`.
fn phi_of(pair: &ResolutionPair, x: &[usize]) -> Vec<u64> {
    let mut out = Vec::new();
    let mut y = x.to_vec();
    for_each_pentagon(pair, x, true, |c1, c2, _| {
        y.swap(c1, c2);
        out.push(perm::rank(&y));
        y.swap(c1, c2);
    });
    out
}

/// The pentagon map as a `k! × k!` matrix indexed by rank.
pub fn phi_tilde(pair: &ResolutionPair, limits: &Limits) -> Result<SparseBitMatrix> {
    let k = pair.size();
    check_cap(k, limits.max_k_homology)?;
    let n = factorial(k);
    let columns: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|r| {
            let mut col: Vec<u32> = phi_of(pair, &unrank(k, r)).into_iter().map(|v| v as u32).collect();
            normalize(&mut col);
            col
        })
        .collect();
    Ok(SparseBitMatrix::from_columns(n as usize, columns))
}

/// Whether `∂̃_γ φ̃ = φ̃ ∂̃_β`.
pub fn is_chain_map(pair: &ResolutionPair, phi: &SparseBitMatrix, limits: &Limits) -> Result<bool> {
    let d_beta = tilde_differential(&pair.g_beta, limits)?;
    let d_gamma = tilde_differential(&pair.g_gamma, limits)?;
    Ok(d_gamma.multiply(phi) == phi.multiply(&d_beta))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaPentagonReport {
    /// Empty pentagons (O markings allowed) from `z⁺(G_β)` to `z⁺(G_γ)`.
    pub to_theta: usize,
    /// The same count to every other target.
    pub elsewhere: usize,
    /// `φ̃(z⁺(G_β)) = z⁺(G_γ)` as chains.
    pub phi_maps_theta: bool,
    pub pass: bool,
}

/// The pentagon facts pinning the layout: exactly one pentagon leaves
/// `z⁺(G_β)` and it ends at `z⁺(G_γ)`.
pub fn verify_theta_pentagon(pair: &ResolutionPair) -> ThetaPentagonReport {
    let zb = pair.g_beta.z_plus();
    let zg = pair.g_gamma.z_plus();
    let mut to_theta = 0;
    let mut elsewhere = 0;
    for_each_pentagon(pair, zb.rows(), false, |c1, c2, _| {
        let mut y = zb.rows().to_vec();
        y.swap(c1, c2);
        if y == zg.rows() {
            to_theta += 1;
        } else {
            elsewhere += 1;
        }
    });
    let mut image = phi_of(pair, zb.rows());
    image.sort_unstable();
    let phi_maps_theta = image == vec![perm::rank(zg.rows())];
    ThetaPentagonReport {
        to_theta,
        elsewhere,
        phi_maps_theta,
        pass: to_theta == 1 && elsewhere == 0 && phi_maps_theta,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Composition {
    pub start_word: BraidWord,
    pub final_word: BraidWord,
    pub stages: Vec<ResolutionPair>,
    /// Product of the stage maps, first stage rightmost.
    pub matrix: SparseBitMatrix,
    /// The composite sends `z⁺` of the first grid to `z⁺` of the last.
    pub maps_theta: bool,
}

/// Resolves the listed positive letters one after another.
///
/// All letters are laid out as bands in one grid, so each stage's target
/// grid is the next stage's source and the stage maps compose.
pub fn compose_resolutions(w: &BraidWord, positions: &[usize], limits: &Limits) -> Result<Composition> {
    let mut seen = positions.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != positions.len() {
        return Err(Error::Precondition("positions repeat".into()));
    }
    let layout = layout_with_bands(w, positions)?;
    let k = layout.grid.size();
    check_cap(k, limits.max_k_homology)?;
    let start = layout.grid.clone();
    let mut current = layout.grid.clone();
    let mut current_word = w.clone();
    let mut removed: Vec<usize> = Vec::new();
    let mut stages = Vec::new();
    let mut matrix = SparseBitMatrix::identity(factorial(k) as usize);
    for &pos in positions {
        let band = *layout
            .bands
            .iter()
            .find(|b| b.letter == pos)
            .expect("every position has a band");
        let pair = ResolutionPair::from_band(current_word.clone(), current.clone(), band)?;
        removed.push(pos);
        let expected = BraidWord::new(
            w.strands(),
            w.letters()
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(&(i + 1)))
                .map(|(_, &e)| e)
                .collect(),
        )?;
        if pair.resolved_word != expected {
            return Err(Error::Invariant(format!(
                "stage resolving letter {pos} reads {} instead of {expected}",
                pair.resolved_word
            )));
        }
        let phi = phi_tilde(&pair, limits)?;
        matrix = phi.multiply(&matrix);
        current = pair.g_gamma.clone();
        current_word = expected;
        stages.push(pair);
    }
    let z0 = perm::rank(start.z_plus().rows()) as u32;
    let z1 = perm::rank(current.z_plus().rows()) as u32;
    let maps_theta = matrix.apply(&[z0]) == vec![z1];
    Ok(Composition {
        start_word: w.clone(),
        final_word: current_word,
        stages,
        matrix,
        maps_theta,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComultiplicationReport {
    pub product: ThetaCertificate,
    pub connected_sum: ThetaCertificate,
    /// θ of the connected sum is nonzero.
    pub hypothesis: bool,
    pub holds: bool,
}

/// θ of `hg` against θ of `g # h`: a nonzero class on the sum forces a
/// nonzero class on the product.
pub fn comultiplication_check(g: &BraidWord, h: &BraidWord, limits: &Limits) -> Result<ComultiplicationReport> {
    let product = h.concat(g)?;
    let sum = crate::braid::connected_sum_word(g, h)?;
    let tp = theta(&product, limits)?;
    let ts = theta(&sum, limits)?;
    let hypothesis = ts.nonzero();
    Ok(ComultiplicationReport {
        holds: !hypothesis || tp.nonzero(),
        product: tp,
        connected_sum: ts,
        hypothesis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BraidWord {
        s.parse().unwrap()
    }

    #[test]
    fn pair_readings() {
        let p = build_resolution(&w("2:"), 1).unwrap();
        assert_eq!(p.word, w("2: 1"));
        assert_eq!(p.resolved_word, w("2:"));
        let q = build_resolution(&w("2: 1 1"), 1).unwrap();
        assert_eq!(q.word, w("2: 1 1 1"));
        assert_eq!(q.resolved_word, w("2: 1 1"));
        assert_eq!(q.g_beta.size(), q.g_gamma.size());
        assert!(build_resolution_at(&w("2: -1"), 1).is_err());
    }

    #[test]
    fn theta_pentagon_small() {
        for (base, i) in [("2:", 1), ("2: 1 1", 1), ("3: 1", 2), ("3: 2 -1", 1)] {
            let pair = build_resolution(&w(base), i).unwrap();
            let r = verify_theta_pentagon(&pair);
            assert!(r.pass, "{base} + σ{i}: {r:?}");
        }
    }

    #[test]
    fn corrupted_pair_fails() {
        let pair = build_resolution(&w("2: 1 1"), 1).unwrap();
        assert!(!verify_theta_pentagon(&pair.corrupted()).pass);
    }

    #[test]
    fn chain_map_small() {
        let limits = Limits::default();
        for (base, i) in [("2:", 1), ("2: 1 1", 1), ("3: 1", 2), ("3: -2", 1)] {
            let pair = build_resolution(&w(base), i).unwrap();
            let phi = phi_tilde(&pair, &limits).unwrap();
            assert!(is_chain_map(&pair, &phi, &limits).unwrap(), "{base} + σ{i}");
        }
    }

    #[test]
    fn pentagon_listing_matches_matrix() {
        let limits = Limits::default();
        let pair = build_resolution(&w("2: 1"), 1).unwrap();
        let phi = phi_tilde(&pair, &limits).unwrap();
        let k = pair.size();
        for xr in 0..factorial(k) {
            let x = GridState::new(unrank(k, xr)).unwrap();
            for yr in 0..factorial(k) {
                let y = GridState::new(unrank(k, yr)).unwrap();
                let n = pentagons(&pair, &x, &y, true).len();
                assert!(n <= 1);
                assert_eq!(n == 1, phi.get(yr as usize, xr as usize));
                let loose = pentagons(&pair, &x, &y, false).len();
                assert!(loose >= n);
            }
        }
    }

    #[test]
    fn compositions() {
        let limits = Limits::default();
        let one = compose_resolutions(&w("2: 1"), &[1], &limits).unwrap();
        assert_eq!(one.final_word, w("2:"));
        assert!(one.maps_theta);
        let two = compose_resolutions(&w("2: 1 1"), &[2, 1], &limits).unwrap();
        assert_eq!(two.final_word, w("2:"));
        assert!(two.maps_theta);
        let none = compose_resolutions(&w("2: 1"), &[], &limits).unwrap();
        assert_eq!(none.matrix, SparseBitMatrix::identity(none.matrix.cols()));
        assert!(compose_resolutions(&w("2: 1 1"), &[1, 1], &limits).is_err());
    }

    #[test]
    fn comultiplication() {
        let limits = Limits::default();
        let r = comultiplication_check(&w("2: 1"), &w("2: 1"), &limits).unwrap();
        assert!(r.hypothesis && r.holds && r.product.nonzero());
        let r = comultiplication_check(&w("2: 1"), &w("2: -1 1"), &limits).unwrap();
        assert!(r.holds);
    }
}
