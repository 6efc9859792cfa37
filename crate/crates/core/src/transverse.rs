//! The transverse class: the homology class of the distinguished state.
//!
//! A certificate records the grid, the state, its gradings and, when the
//! class vanishes, an explicit chain whose boundary is the state, so that a
//! consumer can re-check the verdict with one boundary computation.

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::fl_complex::{is_boundary, tilde_boundary_of_chain, Bigrading, GradingTable, HalfInt};
use crate::grid::{braid_to_grid, GridDiagram, GridState};
use crate::perm;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaCertificate {
    pub word: BraidWord,
    pub grid: GridDiagram,
    pub state: GridState,
    pub state_rank: u64,
    pub is_cycle: bool,
    pub vanishes: bool,
    pub witness: Option<Vec<u64>>,
    pub gradings: Bigrading,
}

impl ThetaCertificate {
    pub fn nonzero(&self) -> bool {
        !self.vanishes
    }

    /// Re-checks the stored data: the state is `z⁺` of the grid, and a
    /// witness, when present, bounds it.
    pub fn verify(&self) -> bool {
        if self.state != self.grid.z_plus() || perm::rank(self.state.rows()) != self.state_rank || !self.is_cycle {
            return false;
        }
        match (&self.witness, self.vanishes) {
            (Some(w), true) => tilde_boundary_of_chain(&self.grid, w) == vec![self.state_rank],
            (None, false) => true,
            _ => false,
        }
    }
}

/// θ for a braid word, laid out with [`braid_to_grid`].
pub fn theta(w: &BraidWord, limits: &Limits) -> Result<ThetaCertificate> {
    theta_on_grid(w, &braid_to_grid(w), limits)
}

/// θ for a grid diagram whose reading is `w`.
pub fn theta_on_grid(w: &BraidWord, g: &GridDiagram, limits: &Limits) -> Result<ThetaCertificate> {
    perm::check_cap(g.size(), limits.max_k_boundary)?;
    let state = g.z_plus();
    let state_rank = perm::rank(state.rows());
    let boundary = tilde_boundary_of_chain(g, &[state_rank]);
    if !boundary.is_empty() {
        return Err(Error::Invariant(format!(
            "z+ is not a cycle: boundary has {} terms",
            boundary.len()
        )));
    }
    let cert = is_boundary(g, &[state_rank], limits)?;
    let gradings = GradingTable::new(g)?.grading(&state);
    Ok(ThetaCertificate {
        word: w.clone(),
        grid: g.clone(),
        state,
        state_rank,
        is_cycle: true,
        vanishes: cert.is_boundary,
        witness: cert.witness,
        gradings,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NegativeStabilizationReport {
    pub original: ThetaCertificate,
    pub stabilized: ThetaCertificate,
    pub holds: bool,
}

/// θ before and after a negative stabilization; the latter must vanish.
pub fn check_negative_stabilization(w: &BraidWord, limits: &Limits) -> Result<NegativeStabilizationReport> {
    let stabilized_word = w.stabilize(-1)?;
    let stabilized = theta(&stabilized_word, limits)?;
    let original = theta(w, limits)?;
    let holds = stabilized.vanishes;
    Ok(NegativeStabilizationReport {
        original,
        stabilized,
        holds,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropagationReport {
    pub g: ThetaCertificate,
    pub h: ThetaCertificate,
    pub hg: ThetaCertificate,
    /// Both factors have nonzero θ.
    pub hypothesis: bool,
    /// The implication holds for this pair.
    pub holds: bool,
}

/// If θ(g) and θ(h) are nonzero then so is θ(hg).
pub fn check_nonzero_propagation(g: &BraidWord, h: &BraidWord, limits: &Limits) -> Result<PropagationReport> {
    let product = h.concat(g)?;
    let tg = theta(g, limits)?;
    let th = theta(h, limits)?;
    let thg = theta(&product, limits)?;
    let hypothesis = tg.nonzero() && th.nonzero();
    let holds = !hypothesis || thg.nonzero();
    Ok(PropagationReport {
        g: tg,
        h: th,
        hg: thg,
        hypothesis,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlexanderReport {
    pub word: BraidWord,
    pub self_linking: i64,
    pub expected: HalfInt,
    pub actual: HalfInt,
    pub holds: bool,
}

/// The Alexander grading of `z⁺` against `(sl + 1) / 2` for a knot.
///
/// Needs only the grading of one state, so it runs on grids far beyond the
/// homology caps.
pub fn theta_alexander_consistency(w: &BraidWord) -> Result<AlexanderReport> {
    let l = w.component_count();
    if l != 1 {
        return Err(Error::NotAKnot(l));
    }
    let g = braid_to_grid(w);
    let gr = GradingTable::new(&g)?.grading(&g.z_plus());
    let sl = w.self_linking();
    let expected = HalfInt((sl + 1) as i32);
    let actual = gr.alexander[0];
    Ok(AlexanderReport {
        word: w.clone(),
        self_linking: sl,
        expected,
        actual,
        holds: expected == actual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BraidWord {
        s.parse().unwrap()
    }

    #[test]
    fn basic_verdicts() {
        let limits = Limits::default();
        let a = theta(&w("1:"), &limits).unwrap();
        assert!(a.nonzero() && a.verify());
        let b = theta(&w("2: -1"), &limits).unwrap();
        assert!(b.vanishes && b.verify());
        let c = theta(&w("2: 1 1 1"), &limits).unwrap();
        assert!(c.nonzero() && c.verify());
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let mut b = theta(&w("2: -1"), &Limits::default()).unwrap();
        b.witness = Some(vec![]);
        assert!(!b.verify());
    }

    #[test]
    fn negative_stabilization() {
        for text in ["1:", "2: 1", "2: 1 1 1"] {
            let r = check_negative_stabilization(&w(text), &Limits::default()).unwrap();
            assert!(r.holds, "{text}");
        }
        let r = check_negative_stabilization(&w("2: 1 1 1"), &Limits::default()).unwrap();
        assert!(r.original.nonzero());
    }

    #[test]
    fn propagation() {
        let limits = Limits::default();
        let r = check_nonzero_propagation(&w("2: 1"), &w("2: 1"), &limits).unwrap();
        assert!(r.hypothesis && r.holds && r.hg.nonzero());
        let r = check_nonzero_propagation(&w("2: 1"), &w("2:"), &limits).unwrap();
        assert!(r.holds && r.hg.nonzero());
        let r = check_nonzero_propagation(&w("3: 1 2"), &w("3: 2 1"), &limits).unwrap();
        assert!(r.hypothesis && r.hg.nonzero());
    }

    #[test]
    fn alexander_of_theta() {
        assert_eq!(theta_alexander_consistency(&w("2: 1 1 1")).unwrap().actual, HalfInt(2));
        assert_eq!(theta_alexander_consistency(&w("1:")).unwrap().actual, HalfInt(0));
        assert_eq!(theta_alexander_consistency(&w("2: -1")).unwrap().actual, HalfInt(-2));
        assert!(matches!(theta_alexander_consistency(&w("2: 1 1")), Err(Error::NotAKnot(2))));
    }
}
