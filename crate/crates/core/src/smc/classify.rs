use super::SmcModel;
use crate::words::Letter;
use std::collections::BTreeSet;

/// Structural predicates read off the rule supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Letters that can reproduce themselves in one step.
    pub persistent_letters: BTreeSet<Letter>,
    /// Persistent letters witnessed by a support word of length at least two.
    pub expanding_letters: BTreeSet<Letter>,
    pub is_persistent: bool,
    pub roots: BTreeSet<Letter>,
    /// `Some(L)` when every support word of every rule has length `L`.
    pub constant_length: Option<usize>,
}

impl Classification {
    pub fn is_constant_length(&self) -> bool {
        self.constant_length.is_some()
    }

    pub fn is_expanding_root(&self, letter: Letter) -> bool {
        self.roots.contains(&letter) && self.expanding_letters.contains(&letter)
    }
}

pub fn classify(model: &SmcModel) -> Classification {
    let mut persistent_letters = BTreeSet::new();
    let mut expanding_letters = BTreeSet::new();
    for (letter, rule) in model.rules() {
        for w in rule.support() {
            if w.contains_letter(letter) {
                persistent_letters.insert(letter);
                if w.len() >= 2 {
                    expanding_letters.insert(letter);
                }
            }
        }
    }
    let is_persistent = persistent_letters.len() == model.alphabet().len();
    let roots = model.alphabet().letters().filter(|&l| model.is_root(l)).collect();
    let lengths: BTreeSet<usize> = model
        .rules()
        .flat_map(|(_, r)| r.support().map(|w| w.len()))
        .collect();
    let constant_length = (lengths.len() == 1).then(|| *lengths.iter().next().expect("one length"));
    Classification {
        persistent_letters,
        expanding_letters,
        is_persistent,
        roots,
        constant_length,
    }
}
