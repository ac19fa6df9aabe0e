use super::{successors_with_cap, ModelError, SmcModel};
use crate::rational::Rational;
use crate::words::{Letter, Word};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_LEVEL_CAP: usize = 1_000_000;

/// Words reachable from a root, by step count, with their exact `P^(n)(root, ·)`.
#[derive(Debug, Clone)]
pub struct Language {
    pub root: Letter,
    pub levels: Vec<BTreeMap<Word, Rational>>,
}

impl Language {
    /// All words seen at any level, duplicates removed.
    pub fn union(&self) -> BTreeSet<Word> {
        self.levels.iter().flat_map(|l| l.keys().cloned()).collect()
    }

    pub fn level(&self, n: usize) -> Option<&BTreeMap<Word, Rational>> {
        self.levels.get(n)
    }

    pub fn max_steps(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }
}

pub fn enumerate_language(model: &SmcModel, root: Letter, max_steps: usize) -> Result<Language, ModelError> {
    enumerate_language_with_cap(model, root, max_steps, DEFAULT_LEVEL_CAP)
}

pub fn enumerate_language_with_cap(
    model: &SmcModel,
    root: Letter,
    max_steps: usize,
    cap: usize,
) -> Result<Language, ModelError> {
    let mut levels = Vec::with_capacity(max_steps + 1);
    let mut current: BTreeMap<Word, Rational> = BTreeMap::new();
    current.insert(Word::single(root), Rational::one());
    levels.push(current.clone());
    for _ in 0..max_steps {
        let mut next: BTreeMap<Word, Rational> = BTreeMap::new();
        for (w, p) in &current {
            for (v, q) in successors_with_cap(model, w, cap)? {
                *next.entry(v).or_insert_with(Rational::zero) += p * q;
            }
            if next.len() > cap {
                return Err(ModelError::Budget { what: "language level", cap });
            }
        }
        levels.push(next.clone());
        current = next;
    }
    Ok(Language { root, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smc::preset;

    fn words(m: &SmcModel, list: &[&str]) -> BTreeSet<Word> {
        list.iter().map(|s| m.parse_word(s).unwrap()).collect()
    }

    #[test]
    fn eg3_levels() {
        let m = preset("eg3").unwrap();
        let lang = enumerate_language(&m, Letter(0), 4).unwrap();
        let l1: BTreeSet<Word> = lang.level(1).unwrap().keys().cloned().collect();
        assert_eq!(l1, words(&m, &["ab", "ba", "ac", "ca"]));
        for n in 0..=4usize {
            // (n+1) positions for the root times 2^n fillings
            assert_eq!(lang.level(n).unwrap().len(), (n + 1) << n);
            let total: Rational = lang.level(n).unwrap().values().sum();
            assert!(total.is_one());
        }
    }

    #[test]
    fn eg1_two_steps() {
        let m = preset("eg1").unwrap();
        let lang = enumerate_language(&m, Letter(0), 2).unwrap();
        let l2: BTreeSet<Word> = lang.level(2).unwrap().keys().cloned().collect();
        assert_eq!(l2, words(&m, &["abb", "bab", "bba"]));
    }

    #[test]
    fn rooted_words_have_one_root() {
        for name in ["eg1", "eg3", "eg4", "eg5", "test-harmonic"] {
            let m = preset(name).unwrap();
            let root = m.root().unwrap();
            let lang = enumerate_language(&m, root, 4).unwrap();
            for w in lang.union() {
                assert_eq!(w.count_letter(root), 1, "{name} {}", m.render(&w));
            }
        }
    }

    #[test]
    fn level_cap() {
        let m = preset("eg3").unwrap();
        let err = enumerate_language_with_cap(&m, Letter(0), 5, 50).unwrap_err();
        assert_eq!(err.name(), "BudgetExceeded");
    }
}
