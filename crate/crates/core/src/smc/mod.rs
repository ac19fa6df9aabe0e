//! Substitution Markov chain models.
//!
//! A model assigns to every letter a finite probability distribution over
//! nonempty words. One step of the chain replaces every letter of the current
//! word independently and concatenates the results.

mod classify;
mod config;
mod language;
mod presets;
mod sampling;
mod transition;

pub use classify::{classify, Classification};
pub use config::{export_model, parse_model, parse_model_with};
pub use language::{enumerate_language, enumerate_language_with_cap, Language, DEFAULT_LEVEL_CAP};
pub use presets::{preset, preset_names, preset_text, preset_with};
pub use sampling::{rng_from_seed, sample_step, simulate, Sampler, SeedRng};
pub use transition::{successors, successors_with_cap, transition_prob, DEFAULT_SUCCESSOR_CAP};

use crate::rational::{self, Rational};
use crate::words::{Alphabet, Letter, Word, WordError};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("SyntaxError (line {line}): {message}")]
    Syntax { line: usize, message: String },
    #[error("ProbabilitySumError (line {line}): weights for letter '{letter}' sum to {sum}, expected 1")]
    ProbabilitySum { line: usize, letter: String, sum: String },
    #[error("UnknownLetter (line {line}): '{token}' is not in the alphabet")]
    UnknownLetter { line: usize, token: String },
    #[error("MissingRule: letter '{0}' has no rule")]
    MissingRule(String),
    #[error("InvalidWeight (line {line}): {message}")]
    InvalidWeight { line: usize, message: String },
    #[error("InvalidRoot: letter '{0}' does not satisfy the root condition")]
    InvalidRoot(String),
    #[error("UnknownPreset: '{0}'")]
    UnknownPreset(String),
    #[error("BudgetExceeded: {what} exceeded cap {cap}")]
    Budget { what: &'static str, cap: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

impl ModelError {
    pub fn name(&self) -> &'static str {
        match self {
            ModelError::Syntax { .. } => "SyntaxError",
            ModelError::ProbabilitySum { .. } => "ProbabilitySumError",
            ModelError::UnknownLetter { .. } => "UnknownLetter",
            ModelError::MissingRule(_) => "MissingRule",
            ModelError::InvalidWeight { .. } => "InvalidWeight",
            ModelError::InvalidRoot(_) => "InvalidRoot",
            ModelError::UnknownPreset(_) => "UnknownPreset",
            ModelError::Budget { .. } => "BudgetExceeded",
            ModelError::Word(e) => e.name(),
        }
    }
}

/// One support word of a letter rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleEntry {
    pub word: Word,
    pub prob: Rational,
    /// Source expression (e.g. `q/4`) when the weight was given symbolically.
    pub expr: Option<String>,
}

/// The distribution `P_a` of a single letter.
#[derive(Debug, Clone, PartialEq)]
pub struct LetterRule {
    entries: Vec<RuleEntry>,
    index: HashMap<Word, usize>,
    max_len: usize,
}

impl LetterRule {
    fn new(entries: Vec<RuleEntry>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.word.clone(), i))
            .collect();
        let max_len = entries.iter().map(|e| e.word.len()).max().unwrap_or(0);
        LetterRule { entries, index, max_len }
    }

    pub fn entries(&self) -> &[RuleEntry] {
        &self.entries
    }

    /// `P_a(word)`, zero off the support.
    pub fn prob(&self, word: &[Letter]) -> Option<&Rational> {
        self.index.get(word).map(|&i| &self.entries[i].prob)
    }

    pub fn support(&self) -> impl Iterator<Item = &Word> {
        self.entries.iter().map(|e| &e.word)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn min_len(&self) -> usize {
        self.entries.iter().map(|e| e.word.len()).min().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A validated substitution Markov chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SmcModel {
    alphabet: Alphabet,
    rules: Vec<LetterRule>,
    root: Option<Letter>,
    params: Vec<(String, Rational)>,
}

impl SmcModel {
    /// Builds a model from plain rational rules, validating every invariant.
    pub fn new(
        alphabet: Alphabet,
        rules: Vec<(Letter, Vec<(Word, Rational)>)>,
        root: Option<Letter>,
    ) -> Result<Self, ModelError> {
        let rules = rules
            .into_iter()
            .map(|(l, entries)| {
                let entries = entries
                    .into_iter()
                    .map(|(word, prob)| RuleEntry { word, prob, expr: None })
                    .collect();
                (l, entries, 0)
            })
            .collect();
        Self::assemble(alphabet, rules, root, Vec::new())
    }

    pub(crate) fn assemble(
        alphabet: Alphabet,
        rules: Vec<(Letter, Vec<RuleEntry>, usize)>,
        root: Option<Letter>,
        params: Vec<(String, Rational)>,
    ) -> Result<Self, ModelError> {
        let mut slots: Vec<Option<LetterRule>> = vec![None; alphabet.len()];
        for (letter, entries, line) in rules {
            let name = alphabet.symbol(letter).to_string();
            if slots[letter.index()].is_some() {
                return Err(ModelError::Syntax {
                    line,
                    message: format!("duplicate rule for letter '{name}'"),
                });
            }
            if entries.is_empty() {
                return Err(ModelError::Syntax { line, message: format!("rule for '{name}' is empty") });
            }
            let mut seen = std::collections::HashSet::new();
            let mut sum = Rational::zero();
            for e in &entries {
                if e.word.is_empty() {
                    return Err(ModelError::Syntax {
                        line,
                        message: format!("rule for '{name}' has an empty word"),
                    });
                }
                if !alphabet.contains_word(&e.word) {
                    return Err(ModelError::UnknownLetter { line, token: format!("{}", e.word) });
                }
                if !e.prob.is_positive() {
                    return Err(ModelError::InvalidWeight {
                        line,
                        message: format!(
                            "weight {} for '{name}' must be positive",
                            rational::format(&e.prob)
                        ),
                    });
                }
                if !seen.insert(e.word.clone()) {
                    return Err(ModelError::Syntax {
                        line,
                        message: format!("word '{}' listed twice for '{name}'", alphabet.render(&e.word)),
                    });
                }
                sum += &e.prob;
            }
            if !sum.is_one() {
                return Err(ModelError::ProbabilitySum {
                    line,
                    letter: name,
                    sum: rational::format(&sum),
                });
            }
            slots[letter.index()] = Some(LetterRule::new(entries));
        }
        let mut rules = Vec::with_capacity(slots.len());
        for (i, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(r) => rules.push(r),
                None => {
                    return Err(ModelError::MissingRule(alphabet.symbol(Letter(i as u8)).to_string()))
                }
            }
        }
        let model = SmcModel { alphabet, rules, root, params };
        if let Some(r) = root {
            if !model.is_root(r) {
                return Err(ModelError::InvalidRoot(model.alphabet.symbol(r).to_string()));
            }
        }
        Ok(model)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rule(&self, letter: Letter) -> &LetterRule {
        &self.rules[letter.index()]
    }

    pub fn rules(&self) -> impl Iterator<Item = (Letter, &LetterRule)> {
        self.rules.iter().enumerate().map(|(i, r)| (Letter(i as u8), r))
    }

    pub fn root(&self) -> Option<Letter> {
        self.root
    }

    pub fn params(&self) -> &[(String, Rational)] {
        &self.params
    }

    /// Root condition: every own support word contains the letter exactly once,
    /// and no other letter's support word contains it.
    pub fn is_root(&self, letter: Letter) -> bool {
        self.rules().all(|(l, rule)| {
            rule.support().all(|w| {
                let n = w.count_letter(letter);
                if l == letter {
                    n == 1
                } else {
                    n == 0
                }
            })
        })
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        self.alphabet.parse_word(text)
    }

    pub fn render(&self, word: &Word) -> String {
        self.alphabet.render(word)
    }

    /// The declared root, or the unique root found by classification.
    pub fn effective_root(&self) -> Option<Letter> {
        self.root.or_else(|| {
            let roots: Vec<_> = self.alphabet.letters().filter(|&l| self.is_root(l)).collect();
            (roots.len() == 1).then(|| roots[0])
        })
    }
}
