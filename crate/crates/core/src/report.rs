//! Batch checks over small instances, one per acceptance item.
//!
//! Each check returns pass, fail or skipped. A check is skipped when one of
//! its instances exceeds the configured grid-size caps.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::braid::{all_words, connected_sum_word, exchange_move, negative_flype_pair, quasipositive_witness, BraidWord};
use crate::config::{Limits, RunConfig};
use crate::error::{Error, Result};
use crate::fl_complex::{
    homology_ranks, homology_ranks_with, minus_differential, squares_to_zero, tilde_boundary_of, tilde_differential,
    GradingTable, HomologyRanks, RankMethod,
};
use crate::gf2::SparseBitMatrix;
use crate::grid::{braid_to_grid, lookup_example, GridDiagram};
use crate::pentagon::{build_resolution_at, is_chain_map, phi_tilde, verify_theta_pentagon};
use crate::perm::{check_cap, factorial, unrank};
use crate::transverse::{check_nonzero_propagation, theta, theta_alexander_consistency};

pub const CRITERIA: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail(String),
    Skipped(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_secs: Option<u64>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match &self.outcome {
            Outcome::Pass => "PASS".to_string(),
            Outcome::Fail(r) => format!("FAIL ({r})"),
            Outcome::Skipped(r) => format!("SKIPPED ({r})"),
        };
        write!(
            f,
            "[{:>2}] {:<44} {} in {} ms: {}",
            self.id, self.name, status, self.elapsed_ms, self.detail
        )
    }
}

fn name_of(id: usize) -> &'static str {
    match id {
        1 => "tilde differential squares to zero",
        2 => "minus differential squares to zero",
        3 => "differential respects gradings",
        4 => "sparse and dense ranks agree",
        5 => "theta vanishing and nonvanishing",
        6 => "pentagon maps",
        7 => "nonzero theta propagates to products",
        8 => "hat rank multiplies under connected sum",
        9 => "word-level facts",
        10 => "invariance under conjugation and stabilization",
        _ => "unknown",
    }
}

fn budget_of(id: usize) -> Option<u64> {
    match id {
        1 | 2 => Some(60),
        5 | 6 => Some(600),
        9 => Some(5),
        _ => None,
    }
}

/// Runs one check; `id` is 1-based.
pub fn run_criterion(id: usize, config: &RunConfig) -> CriterionResult {
    let start = Instant::now();
    let limits = &config.limits;
    let result = match id {
        1 => differential_squares(limits, config.tamper_differential),
        2 => minus_squares(limits),
        3 => grading_coherence(limits),
        4 => rank_oracle(limits),
        5 => theta_behaviour(limits),
        6 => pentagon_suite(limits),
        7 => propagation_pairs(limits),
        8 => connected_sum_ranks(limits),
        9 => word_facts(),
        10 => invariance_pairs(limits),
        _ => Err(Error::Precondition(format!("no check numbered {id}"))),
    };
    let elapsed = start.elapsed();
    let budget = budget_of(id);
    let (outcome, detail) = match result {
        Ok((true, detail)) => match budget {
            Some(b) if elapsed.as_secs_f64() > b as f64 => (Outcome::Fail(format!("over the {b} s budget")), detail),
            _ => (Outcome::Pass, detail),
        },
        Ok((false, detail)) => (Outcome::Fail("check failed".into()), detail),
        Err(e @ (Error::ResourceCap { .. } | Error::BucketCap { .. })) => (Outcome::Skipped("cap".into()), e.to_string()),
        Err(e) => (Outcome::Fail("error".into()), e.to_string()),
    };
    CriterionResult {
        id,
        name: name_of(id).to_string(),
        outcome,
        detail,
        elapsed_ms: elapsed.as_millis(),
        budget_secs: budget,
    }
}

pub fn run_all(config: &RunConfig) -> Vec<CriterionResult> {
    (1..=CRITERIA).map(|id| run_criterion(id, config)).collect()
}

type Check = Result<(bool, String)>;

fn w(text: &str) -> BraidWord {
    text.parse().expect("built-in word parses")
}

/// Grids of every word with at most `strands` strands and `max_len` letters,
/// preceded by the 2×2 unknot.
pub fn grid_corpus(strands: usize, max_len: usize) -> Vec<(String, GridDiagram)> {
    let mut out = vec![(
        "unknot2".to_string(),
        lookup_example("unknot2").expect("registered").grid(),
    )];
    for n in 2..=strands {
        for word in all_words(n, max_len) {
            out.push((word.to_string(), braid_to_grid(&word)));
        }
    }
    out
}

fn differential_squares(limits: &Limits, tamper: bool) -> Check {
    let corpus = grid_corpus(3, 4);
    let mut tampered = !tamper;
    let mut bad = Vec::new();
    for (label, g) in &corpus {
        let mut d = tilde_differential(g, limits)?;
        if !tampered {
            if let Some(t) = tamper_entry(&d) {
                d = d.add(&t);
                tampered = true;
            }
        }
        if !squares_to_zero(&d) {
            bad.push(label.clone());
        }
    }
    Ok((
        bad.is_empty(),
        format!("{} grids, failures: {:?}", corpus.len(), bad),
    ))
}

/// A single entry `(y, x)` whose addition forces `∂² ≠ 0`: `y` has a
/// nonzero boundary and `x ≠ y`.
fn tamper_entry(d: &SparseBitMatrix) -> Option<SparseBitMatrix> {
    let n = d.cols();
    let y = (0..n).find(|&c| !d.column(c).is_empty())?;
    let x = if y == 0 { 1 } else { 0 };
    Some(SparseBitMatrix::from_entries(n, n, [(y as u32, x as u32)]))
}

fn minus_squares(limits: &Limits) -> Check {
    let mut grids: Vec<(String, GridDiagram)> = grid_corpus(3, 4).into_iter().filter(|(_, g)| g.size() <= 4).collect();
    let trefoil = braid_to_grid(&w("2: 1 1 1"));
    if trefoil.size() != 5 {
        return Err(Error::Invariant(format!("trefoil grid has size {}", trefoil.size())));
    }
    grids.push(("2: 1 1 1".into(), trefoil));
    let mut bad = Vec::new();
    for (label, g) in &grids {
        if !minus_differential(g, limits)?.squares_to_zero() {
            bad.push(label.clone());
        }
    }
    Ok((bad.is_empty(), format!("{} grids, failures: {:?}", grids.len(), bad)))
}

fn grading_coherence(limits: &Limits) -> Check {
    let grids: Vec<(String, GridDiagram)> = grid_corpus(3, 4).into_iter().filter(|(_, g)| g.size() <= 6).collect();
    let mut entries = 0usize;
    let mut bad = Vec::new();
    for (label, g) in &grids {
        let k = g.size();
        check_cap(k, limits.max_k_homology)?;
        let table = GradingTable::new(g)?;
        for r in 0..factorial(k) {
            let x = unrank(k, r);
            let (mx, ax) = table.raw(&x);
            for y in tilde_boundary_of(g, &x) {
                entries += 1;
                let (my, ay) = table.raw(&unrank(k, y));
                if my != mx - 1 || ay != ax {
                    bad.push(format!("{label}: {r} -> {y}"));
                }
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!("{} grids, {entries} entries, failures: {:?}", grids.len(), bad.iter().take(5).collect::<Vec<_>>()),
    ))
}

fn rank_oracle(limits: &Limits) -> Check {
    let grids: Vec<(String, GridDiagram)> = grid_corpus(3, 4).into_iter().filter(|(_, g)| g.size() <= 6).collect();
    let mut bad = Vec::new();
    for (label, g) in &grids {
        let sparse = homology_ranks_with(g, limits, RankMethod::Sparse)?;
        let dense = homology_ranks_with(g, limits, RankMethod::Dense)?;
        if sparse != dense {
            bad.push(label.clone());
        }
    }
    let trefoil = homology_ranks(&braid_to_grid(&w("3: 1 2 1 2")), limits)?;
    let unknot = homology_ranks(&lookup_example("unknot2")?.grid(), limits)?;
    let ok = bad.is_empty() && trefoil.hat_total == 3 && unknot.hat_total == 1;
    Ok((
        ok,
        format!(
            "{} grids compared, disagreements: {:?}, trefoil hat {}, unknot hat {}",
            grids.len(),
            bad,
            trefoil.hat_total,
            unknot.hat_total
        ),
    ))
}

/// Quasipositive words used as nonvanishing witnesses.
pub fn quasipositive_words() -> Vec<BraidWord> {
    let id = |n: usize| BraidWord::identity(n).expect("positive strands");
    let specs: Vec<(usize, Vec<(BraidWord, usize)>)> = vec![
        (2, vec![(id(2), 1)]),
        (2, vec![(id(2), 1), (id(2), 1)]),
        (2, vec![(id(2), 1), (id(2), 1), (id(2), 1)]),
        (3, vec![(id(3), 1), (id(3), 2)]),
        (3, vec![(w("3: 2"), 1)]),
        (3, vec![(w("3: -2"), 1)]),
        (3, vec![(w("3: 1"), 2)]),
        (3, vec![(w("3: -1"), 2), (id(3), 1)]),
        (3, vec![(w("3: 2"), 1), (id(3), 2)]),
        (3, vec![(id(3), 2), (id(3), 1), (id(3), 2)]),
    ];
    specs
        .into_iter()
        .map(|(n, f)| quasipositive_witness(n, &f).expect("valid factors"))
        .collect()
}

fn theta_behaviour(limits: &Limits) -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let c = theta(&BraidWord::identity(n)?, limits)?;
        if c.vanishes || !c.verify() {
            ok = false;
            notes.push(format!("identity on {n} strands vanishes"));
        }
    }
    let mut stabilized = 0;
    for word in [all_words(1, 0), all_words(2, 3), all_words(3, 1)].concat().into_iter().take(20) {
        stabilized += 1;
        let c = theta(&word.stabilize(-1)?, limits)?;
        if !c.vanishes || !c.verify() {
            ok = false;
            notes.push(format!("negative stabilization of {word} survives"));
        }
    }
    let qp = quasipositive_words();
    for word in &qp {
        let c = theta(word, limits)?;
        if c.vanishes || c.grid.size() > 9 {
            ok = false;
            notes.push(format!("quasipositive {word} vanishes or is too large"));
        }
    }
    let mut knots = 0;
    let mut knot_words: Vec<BraidWord> = [all_words(2, 4), all_words(3, 4)].concat();
    knot_words.extend(qp);
    for name in ["mm_w1", "mm_w2"] {
        knot_words.push(lookup_example(name)?.word()?);
    }
    for word in knot_words.iter().filter(|v| v.component_count() == 1) {
        knots += 1;
        if !theta_alexander_consistency(word)?.holds {
            ok = false;
            notes.push(format!("Alexander grading of theta off for {word}"));
        }
    }
    notes.push(format!("{stabilized} stabilizations, {knots} knots"));
    Ok((ok, notes.join("; ")))
}

fn pentagon_suite(limits: &Limits) -> Check {
    let mut pairs = 0;
    let mut max_k = 0;
    let mut bad = Vec::new();
    for n in 2..=3 {
        for word in all_words(n, 3) {
            for (idx, &e) in word.letters().iter().enumerate() {
                if e < 0 {
                    continue;
                }
                let pair = build_resolution_at(&word, idx + 1)?;
                check_cap(pair.size(), limits.max_k_homology)?;
                pairs += 1;
                max_k = max_k.max(pair.size());
                let report = verify_theta_pentagon(&pair);
                let phi = phi_tilde(&pair, limits)?;
                let chain = is_chain_map(&pair, &phi, limits)?;
                if !report.pass || !chain {
                    bad.push(format!("{word} at {}", idx + 1));
                }
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!("{pairs} pairs up to k = {max_k}, failures: {bad:?}"),
    ))
}

/// Pairs `(g, h)` with nonvanishing θ on both factors.
pub fn propagation_corpus() -> Vec<(BraidWord, BraidWord)> {
    [
        ("2: 1", "2: 1"),
        ("2: 1", "2: 1 1"),
        ("2: 1 1 1", "2: 1"),
        ("2:", "2: 1"),
        ("3: 1 2", "3: 1 2"),
        ("3: 1 2", "3: 2 1"),
        ("3: 2 1 -2", "3: 1"),
        ("3: 1", "3: 2"),
        ("3:", "3: 1 2"),
        ("3: -2 1 2", "3: 2"),
    ]
    .into_iter()
    .map(|(g, h)| (w(g), w(h)))
    .collect()
}

fn propagation_pairs(limits: &Limits) -> Check {
    let mut bad = Vec::new();
    let pairs = propagation_corpus();
    for (g, h) in &pairs {
        let r = check_nonzero_propagation(g, h, limits)?;
        if !r.hypothesis || !r.holds {
            bad.push(format!("({g}, {h})"));
        }
    }
    Ok((bad.is_empty(), format!("{} pairs, failures: {bad:?}", pairs.len())))
}

fn connected_sum_ranks(limits: &Limits) -> Check {
    let pairs = [
        ("1:", "1:"),
        ("2: 1 1 1", "1:"),
        ("1:", "2: -1 -1 -1"),
        ("2: 1 1 1", "2: -1"),
        ("2: 1", "2: -1 -1 -1"),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (g, h) in pairs {
        let (g, h) = (w(g), w(h));
        let sum = connected_sum_word(&g, &h)?;
        let rg = homology_ranks(&braid_to_grid(&g), limits)?.hat_total;
        let rh = homology_ranks(&braid_to_grid(&h), limits)?.hat_total;
        let rs = homology_ranks(&braid_to_grid(&sum), limits)?.hat_total;
        ok &= rs == rg * rh;
        notes.push(format!("{rg}*{rh}={rs}"));
    }
    Ok((ok, notes.join(", ")))
}

fn word_facts() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    let w1 = lookup_example("mm_w1")?.word()?;
    let w2 = lookup_example("mm_w2")?.word()?;
    let h = lookup_example("mm_h")?.word()?;
    ok &= w1.self_linking() == 3 && w2.self_linking() == 3 && w1.algebraic_length() == 11;
    notes.push(format!(
        "sl {} and {}, a {}",
        w1.self_linking(),
        w2.self_linking(),
        w1.algebraic_length()
    ));
    let mut counts = Vec::new();
    for n in 0..=6 {
        let c = h.pow(n).concat(&w1)?.component_count();
        ok &= c == if n % 2 == 0 { 1 } else { 3 };
        counts.push(c);
    }
    notes.push(format!("components {counts:?}"));
    let frags: Vec<BraidWord> = ["3:", "3: 2", "3: -2"].into_iter().map(w).collect();
    let mut moves = 0;
    for a in &frags {
        for b in &frags {
            for c in &frags {
                let (x, y) = exchange_move(a, b, c)?;
                ok &= x.self_linking_data() == y.self_linking_data();
                for m in [1, 3] {
                    let pair = negative_flype_pair(a, b, c, m)?;
                    ok &= pair.sl_data_equal && pair.w1.self_linking_data() == pair.w2.self_linking_data();
                }
                moves += 1;
            }
        }
    }
    notes.push(format!("{moves} fragment triples"));
    Ok((ok, notes.join("; ")))
}

/// Hat homology ranks with the Alexander coordinates summed, keyed by
/// `(maslov, twice the summed Alexander grading)`.
///
/// The tilde complex is the hat complex tensored with one copy of a
/// two-dimensional space per extra O marking, so dividing its Poincaré
/// polynomial by `(1 + q⁻¹a⁻¹)^(k - l)` recovers hat ranks.
pub fn hat_poincare(h: &HomologyRanks) -> Result<BTreeMap<(i32, i32), u64>> {
    let mut tilde: BTreeMap<(i32, i32), i64> = BTreeMap::new();
    for b in &h.buckets {
        let a: i32 = b.alexander.iter().map(|x| x.twice()).sum();
        *tilde.entry((b.maslov, a)).or_default() += b.rank as i64;
    }
    let mut poly = tilde.clone();
    for _ in 0..h.k - h.components {
        let mut quotient: BTreeMap<(i32, i32), i64> = BTreeMap::new();
        // descending Maslov so the shifted term is known before it is used
        let mut keys: Vec<(i32, i32)> = poly.keys().copied().collect();
        keys.sort_by(|x, y| y.0.cmp(&x.0).then(y.1.cmp(&x.1)));
        for (m, a) in keys {
            let above = quotient.get(&(m + 1, a + 2)).copied().unwrap_or(0);
            let v = poly[&(m, a)] - above;
            if v != 0 {
                quotient.insert((m, a), v);
            }
        }
        let mut check: BTreeMap<(i32, i32), i64> = BTreeMap::new();
        for (&(m, a), &v) in &quotient {
            *check.entry((m, a)).or_default() += v;
            *check.entry((m - 1, a - 2)).or_default() += v;
        }
        check.retain(|_, v| *v != 0);
        if check != poly || quotient.values().any(|&v| v < 0) {
            return Err(Error::Invariant("tilde ranks do not factor through hat ranks".into()));
        }
        poly = quotient;
    }
    Ok(poly.into_iter().map(|(key, v)| (key, v as u64)).collect())
}

/// Word pairs related by conjugation or positive stabilization.
pub fn invariance_corpus() -> Vec<(BraidWord, BraidWord)> {
    let mut out = Vec::new();
    for text in ["2: 1 1 1", "2: -1", "3: 1 -2", "3: 1 2 1 2"] {
        let word = w(text);
        out.push((word.clone(), word.rotate(1)));
    }
    for (text, u) in [("2: 1 1 1", "2: 1"), ("3: 1 -2", "3: 2")] {
        let word = w(text);
        out.push((word.clone(), word.conjugate(&w(u)).expect("same strands")));
    }
    for text in ["1:", "2: 1", "2: 1 1 1", "2: -1"] {
        let word = w(text);
        out.push((word.clone(), word.stabilize(1).expect("stabilizes")));
    }
    out
}

fn invariance_pairs(limits: &Limits) -> Check {
    let mut bad = Vec::new();
    let pairs = invariance_corpus();
    for (a, b) in &pairs {
        let (ga, gb) = (braid_to_grid(a), braid_to_grid(b));
        let (ha, hb) = (homology_ranks(&ga, limits)?, homology_ranks(&gb, limits)?);
        let same_ranks = if ga.size() == gb.size() && ha.components == 1 {
            ha.buckets == hb.buckets
        } else {
            hat_poincare(&ha)? == hat_poincare(&hb)?
        };
        let same_theta = theta(a, limits)?.vanishes == theta(b, limits)?.vanishes;
        if !same_ranks || !same_theta {
            bad.push(format!("({a}, {b})"));
        }
    }
    Ok((bad.is_empty(), format!("{} pairs, failures: {bad:?}", pairs.len())))
}
