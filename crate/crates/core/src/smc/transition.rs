use super::{ModelError, SmcModel};
use crate::rational::Rational;
use crate::words::Word;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

pub const DEFAULT_SUCCESSOR_CAP: usize = 1_000_000;

/// Exact one-step probability `P(w, v)`: the sum over all splittings of `v`
/// into `|w|` nonempty blocks of the product of the letter probabilities.
///
/// `ways[j]` holds the probability that the letters processed so far produce
/// exactly `v[..j]`.
pub fn transition_prob(model: &SmcModel, w: &Word, v: &Word) -> Rational {
    if w.is_empty() {
        return if v.is_empty() { Rational::one() } else { Rational::zero() };
    }
    if v.len() < w.len() {
        return Rational::zero();
    }
    let n = v.len();
    let mut ways = vec![Rational::zero(); n + 1];
    ways[0] = Rational::one();
    for (i, &letter) in w.letters().iter().enumerate() {
        let rule = model.rule(letter);
        let mut next = vec![Rational::zero(); n + 1];
        // the remaining letters each need at least one symbol
        let remaining = w.len() - i - 1;
        for start in 0..=n {
            if ways[start].is_zero() {
                continue;
            }
            let max_end = (start + rule.max_len()).min(n - remaining);
            for end in start + 1..=max_end {
                if let Some(p) = rule.prob(&v.letters()[start..end]) {
                    next[end] += &ways[start] * p;
                }
            }
        }
        ways = next;
    }
    ways.swap_remove(n)
}

/// The full one-step image distribution of `w`.
pub fn successors(model: &SmcModel, w: &Word) -> Result<BTreeMap<Word, Rational>, ModelError> {
    successors_with_cap(model, w, DEFAULT_SUCCESSOR_CAP)
}

pub fn successors_with_cap(
    model: &SmcModel,
    w: &Word,
    cap: usize,
) -> Result<BTreeMap<Word, Rational>, ModelError> {
    let mut partial: HashMap<Vec<_>, Rational> = HashMap::new();
    partial.insert(Vec::new(), Rational::one());
    for &letter in w.letters() {
        let rule = model.rule(letter);
        let mut next: HashMap<Vec<_>, Rational> = HashMap::with_capacity(partial.len() * rule.len());
        for (prefix, p) in &partial {
            for e in rule.entries() {
                let mut word = Vec::with_capacity(prefix.len() + e.word.len());
                word.extend_from_slice(prefix);
                word.extend_from_slice(e.word.letters());
                *next.entry(word).or_insert_with(Rational::zero) += p * &e.prob;
            }
        }
        if next.len() > cap {
            return Err(ModelError::Budget { what: "successor set", cap });
        }
        partial = next;
    }
    Ok(partial.into_iter().map(|(k, v)| (Word(k), v)).collect())
}
