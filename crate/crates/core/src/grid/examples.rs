use serde::{Deserialize, Serialize};

use crate::braid::{negative_flype_pair, translate_psi, BraidWord};
use crate::error::{Error, Result};
use crate::grid::GridDiagram;

/// Entry of the example registry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Example {
    Grid(GridDiagram),
    Word(BraidWord),
}

impl Example {
    /// Braid word of the example, reading grids when necessary.
    pub fn word(&self) -> Result<BraidWord> {
        match self {
            Example::Word(w) => Ok(w.clone()),
            Example::Grid(g) => g.to_braid(),
        }
    }

    /// Grid of the example, laying out words when necessary.
    pub fn grid(&self) -> GridDiagram {
        match self {
            Example::Grid(g) => g.clone(),
            Example::Word(w) => super::braid_to_grid(w),
        }
    }
}

const MM_A: &[i32] = &[
    4, 3, 5, 6, 4, 5, 5, 6, 4, 5, 7, 6, -5, -4, -3, 2, 3, 3, 4, 5, -4, -3, -2,
];
const MM_B: &[i32] = &[
    5, 6, 7, -6, -5, -4, -6, -5, -4, 3, 4, 5, 2, 3, 4, 4, 5, 6, -5, -4, -3, -2,
];
const MM_C: &[i32] = &[-7, -6, -5];
const MM_G: &[i32] = &[3, 2, 3, 1, 2, 3];

fn word(strands: usize, letters: &[i32]) -> BraidWord {
    BraidWord::new(strands, letters.to_vec()).expect("registry word is valid")
}

/// Every registered name with its value, in a fixed order.
pub fn named_examples() -> Vec<(String, Example)> {
    let mut out = vec![(
        "unknot2".to_string(),
        Example::Grid(GridDiagram::new(vec![0, 1], vec![1, 0]).expect("valid")),
    )];
    out.push(("trefoil_b2".into(), Example::Word(word(2, &[1, 1, 1]))));
    out.push(("trefoil_b3".into(), Example::Word(word(3, &[1, 2, 1, 2]))));
    for n in 1..=4 {
        out.push((format!("trivial_I{n}"), Example::Word(word(n, &[]))));
    }
    let (a, b, c) = (word(8, MM_A), word(8, MM_B), word(8, MM_C));
    let pair = negative_flype_pair(&a, &b, &c, 2).expect("fragments avoid σ₁");
    out.push(("mm_w1".into(), Example::Word(pair.w1)));
    out.push(("mm_w2".into(), Example::Word(pair.w2)));
    let h = translate_psi(&word(4, MM_G), 4, 8, 3).expect("in range");
    out.push(("mm_h".into(), Example::Word(h)));
    out.push(("mm_a".into(), Example::Word(a)));
    out.push(("mm_b".into(), Example::Word(b)));
    out.push(("mm_c".into(), Example::Word(c)));
    out
}

pub fn lookup_example(name: &str) -> Result<Example> {
    named_examples()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, e)| e)
        .ok_or_else(|| Error::UnknownExample(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lookup_word(name: &str) -> BraidWord {
        lookup_example(name).unwrap().word().unwrap()
    }

    #[test]
    fn registry_contents() {
        let w1 = lookup_word("mm_w1");
        assert_eq!(w1.strands(), 8);
        assert_eq!(w1.algebraic_length(), 11);
        assert_eq!(w1.self_linking(), 3);
        assert_eq!(lookup_word("mm_w2").self_linking(), 3);
        assert_eq!(lookup_word("trivial_I3"), BraidWord::identity(3).unwrap());
        assert_eq!(lookup_word("mm_h"), "8: 6 5 6 4 5 6".parse().unwrap());
        assert_eq!(lookup_word("mm_a").algebraic_length(), 11);
        assert_eq!(lookup_word("mm_b").algebraic_length(), 2);
        assert_eq!(lookup_word("mm_c").algebraic_length(), -3);
        assert_eq!(lookup_word("unknot2").strands(), 1);
        assert!(matches!(lookup_example("nope"), Err(Error::UnknownExample(_))));
    }

    #[test]
    fn letter_count_oracle() {
        // w₁ = a σ₁² b σ₁⁻¹ c, counted letter by letter
        let total: i64 = [MM_A, &[1, 1], MM_B, &[-1], MM_C]
            .iter()
            .flat_map(|s| s.iter())
            .map(|&e| e.signum() as i64)
            .sum();
        assert_eq!(total, 11);
    }
}
