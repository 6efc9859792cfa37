use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rect::for_each_empty;
use crate::config::Limits;
use crate::error::Result;
use crate::gf2::SparseBitMatrix;
use crate::grid::GridDiagram;
use crate::perm::{self, check_cap, factorial, unrank};

/// `U_0^{e_0} ⋯ U_{k-1}^{e_{k-1}}`, one variable per O marking (by column).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UMonomial {
    pub exponents: Vec<u32>,
}

impl UMonomial {
    pub fn one(k: usize) -> Self {
        UMonomial { exponents: vec![0; k] }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn mul(&self, other: &UMonomial) -> UMonomial {
        UMonomial {
            exponents: self.exponents.iter().zip(&other.exponents).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Minus differential: for each source rank, the target ranks with their
/// F2 polynomial coefficients (a set of monomials).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinusDifferential {
    k: usize,
    columns: Vec<BTreeMap<u64, Vec<UMonomial>>>,
}

/// Adds `m` to a coefficient polynomial over F2.
fn toggle(poly: &mut Vec<UMonomial>, m: UMonomial) {
    match poly.binary_search(&m) {
        Ok(i) => {
            poly.remove(i);
        }
        Err(i) => poly.insert(i, m),
    }
}

impl MinusDifferential {
    pub fn size(&self) -> usize {
        self.k
    }

    pub fn entry(&self, y: u64, x: u64) -> &[UMonomial] {
        self.columns[x as usize].get(&y).map_or(&[], |v| v.as_slice())
    }

    pub fn column(&self, x: u64) -> &BTreeMap<u64, Vec<UMonomial>> {
        &self.columns[x as usize]
    }

    /// `∂⁻ ∘ ∂⁻` computed with full monomial bookkeeping.
    pub fn square(&self) -> Vec<BTreeMap<u64, Vec<UMonomial>>> {
        self.columns
            .par_iter()
            .map(|col| {
                let mut out: BTreeMap<u64, Vec<UMonomial>> = BTreeMap::new();
                for (&y, p) in col {
                    for (&z, q) in &self.columns[y as usize] {
                        let slot = out.entry(z).or_default();
                        for a in p {
                            for b in q {
                                toggle(slot, a.mul(b));
                            }
                        }
                    }
                }
                out.retain(|_, v| !v.is_empty());
                out
            })
            .collect()
    }

    pub fn squares_to_zero(&self) -> bool {
        self.square().iter().all(|c| c.is_empty())
    }

    /// Setting every `U` to zero.
    pub fn at_u_zero(&self) -> SparseBitMatrix {
        let n = self.columns.len();
        let columns = self
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .filter(|(_, p)| p.iter().any(|m| m.degree() == 0))
                    .map(|(&y, _)| y as u32)
                    .collect()
            })
            .collect();
        SparseBitMatrix::from_columns(n, columns)
    }
}

pub fn minus_differential(g: &GridDiagram, limits: &Limits) -> Result<MinusDifferential> {
    let k = g.size();
    check_cap(k, limits.max_k_minus)?;
    let or = g.o_rows();
    let columns = (0..factorial(k))
        .into_par_iter()
        .map(|r| {
            let x = unrank(k, r);
            let mut col: BTreeMap<u64, Vec<UMonomial>> = BTreeMap::new();
            for_each_empty(g, &x, false, |i, j| {
                let width = (j + k - i) % k;
                let height = (x[j] + k - x[i]) % k;
                let mut m = UMonomial::one(k);
                for step in 0..width {
                    let c = (i + step) % k;
                    if (or[c] + k - x[i]) % k < height {
                        m.exponents[c] += 1;
                    }
                }
                let mut y = x.clone();
                y.swap(i, j);
                toggle(col.entry(perm::rank(&y)).or_default(), m);
            });
            col.retain(|_, v| !v.is_empty());
            col
        })
        .collect();
    Ok(MinusDifferential { k, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fl_complex::tilde_differential;
    use crate::grid::braid_to_grid;

    #[test]
    fn unknot_two_by_two() {
        let g = GridDiagram::new(vec![0, 1], vec![1, 0]).unwrap();
        let d = minus_differential(&g, &Limits::default()).unwrap();
        // rank 0 is [0,1], rank 1 is [1,0]
        assert!(d.column(0).is_empty());
        let coeff = d.entry(0, 1);
        assert_eq!(coeff.len(), 2);
        assert!(coeff.iter().all(|m| m.degree() == 1));
        assert_eq!(coeff[0].exponents, vec![0, 1]);
        assert_eq!(coeff[1].exponents, vec![1, 0]);
        assert!(d.squares_to_zero());
        assert!(d.at_u_zero().is_zero());
    }

    #[test]
    fn specialization_recovers_tilde() {
        for text in ["2: 1", "2: 1 1", "3: 1 -2"] {
            let g = braid_to_grid(&text.parse().unwrap());
            let d = minus_differential(&g, &Limits::default()).unwrap();
            assert!(d.squares_to_zero(), "{text}");
            assert_eq!(d.at_u_zero(), tilde_differential(&g, &Limits::default()).unwrap());
        }
    }

    #[test]
    fn cap() {
        let g = braid_to_grid(&"3: 1 2 1 2".parse().unwrap());
        assert_eq!(minus_differential(&g, &Limits::default()).unwrap_err().exit_code(), 2);
    }
}
