//! Search over negative flype families for pairs that θ tells apart.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use gridtheta::braid::{all_words, negative_flype_pair};
use gridtheta::grid::braid_to_grid;
use gridtheta::transverse::theta;
use gridtheta::{BraidWord, Error, Limits, Result};

#[derive(Debug, Clone)]
pub struct SearchParams {
    pub strands: usize,
    pub max_len: usize,
    pub m: usize,
    pub limits: Limits,
    pub sample: Option<usize>,
    pub seed: u64,
    pub time_budget: Option<Duration>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub index: usize,
    pub a: String,
    pub b: String,
    pub c: String,
    pub w1: String,
    pub w2: String,
    pub k1: usize,
    pub k2: usize,
    pub sl_data_equal: bool,
    pub w1_vanishes: Option<bool>,
    pub w2_vanishes: Option<bool>,
    pub skipped: Option<String>,
}

impl Candidate {
    /// Exactly one of the two classes vanishes.
    pub fn split(&self) -> bool {
        matches!((self.w1_vanishes, self.w2_vanishes), (Some(x), Some(y)) if x != y)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub strands: usize,
    pub max_len: usize,
    pub m: usize,
    pub candidates: usize,
    pub computed: usize,
    pub skipped: usize,
    pub split: Vec<Candidate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all: Option<Vec<Candidate>>,
}

/// Fragments over `σ₂, …, σ_{n-1}` with at most `max_len` letters.
fn fragments(strands: usize, max_len: usize) -> Vec<BraidWord> {
    if strands < 3 {
        return Vec::new();
    }
    all_words(strands, max_len)
        .into_iter()
        .filter(|w| w.letters().iter().all(|e| e.abs() != 1))
        .collect()
}

/// Triples `(a, b, c)` with `b` nonempty, in a fixed order.
pub fn candidates(strands: usize, max_len: usize) -> Vec<(BraidWord, BraidWord, BraidWord)> {
    let frags = fragments(strands, max_len);
    let mut out = Vec::new();
    for a in &frags {
        for b in frags.iter().filter(|b| !b.is_empty()) {
            for c in &frags {
                out.push((a.clone(), b.clone(), c.clone()));
            }
        }
    }
    out
}

fn evaluate(index: usize, a: &BraidWord, b: &BraidWord, c: &BraidWord, params: &SearchParams, deadline: Option<Instant>) -> Result<Candidate> {
    let pair = negative_flype_pair(a, b, c, params.m)?;
    let (k1, k2) = (braid_to_grid(&pair.w1).size(), braid_to_grid(&pair.w2).size());
    let mut cand = Candidate {
        index,
        a: a.to_string(),
        b: b.to_string(),
        c: c.to_string(),
        w1: pair.w1.to_string(),
        w2: pair.w2.to_string(),
        k1,
        k2,
        sl_data_equal: pair.sl_data_equal,
        w1_vanishes: None,
        w2_vanishes: None,
        skipped: None,
    };
    if deadline.is_some_and(|d| Instant::now() > d) {
        cand.skipped = Some("time budget".into());
        return Ok(cand);
    }
    let outcome = theta(&pair.w1, &params.limits).and_then(|t1| Ok((t1, theta(&pair.w2, &params.limits)?)));
    match outcome {
        Ok((t1, t2)) => {
            cand.w1_vanishes = Some(t1.vanishes);
            cand.w2_vanishes = Some(t2.vanishes);
        }
        Err(e @ (Error::ResourceCap { .. } | Error::BucketCap { .. })) => {
            eprintln!("candidate {index}: skipped, {e}");
            cand.skipped = Some("cap".into());
        }
        Err(e) => return Err(e),
    }
    Ok(cand)
}

pub fn flype_search(params: &SearchParams, keep_all: bool) -> Result<SearchResult> {
    let mut triples: Vec<(usize, (BraidWord, BraidWord, BraidWord))> =
        candidates(params.strands, params.max_len).into_iter().enumerate().collect();
    let total = triples.len();
    if let Some(n) = params.sample {
        if n < total {
            let mut rng = StdRng::seed_from_u64(params.seed);
            let mut picked = rand::seq::index::sample(&mut rng, total, n).into_vec();
            picked.sort_unstable();
            triples = picked.into_iter().map(|i| triples[i].clone()).collect();
        }
    }
    let deadline = params.time_budget.map(|d| Instant::now() + d);
    let mut results: Vec<Candidate> = triples
        .par_iter()
        .map(|(i, (a, b, c))| evaluate(*i, a, b, c, params, deadline))
        .collect::<Result<_>>()?;
    results.sort_by_key(|c| c.index);
    let computed = results.iter().filter(|c| c.skipped.is_none()).count();
    Ok(SearchResult {
        strands: params.strands,
        max_len: params.max_len,
        m: params.m,
        candidates: results.len(),
        computed,
        skipped: results.len() - computed,
        split: results.iter().filter(|c| c.split()).cloned().collect(),
        all: keep_all.then_some(results),
    })
}
