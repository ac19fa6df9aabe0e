//! Words over a finite alphabet.
//!
//! Letters are stored as indices into an [`Alphabet`]; a [`Word`] is a plain
//! sequence of letters and carries no reference to its alphabet, so rendering
//! and parsing go through the alphabet explicitly.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("EmptyPattern: subword pattern must be nonempty")]
    EmptyPattern,
    #[error("RootCountError: root letter occurs {found} times, expected exactly 1")]
    RootCount { found: usize },
    #[error("UnknownLetter: '{0}' is not in the alphabet")]
    UnknownLetter(String),
    #[error("AlphabetError: {0}")]
    Alphabet(String),
}

impl WordError {
    pub fn name(&self) -> &'static str {
        match self {
            WordError::EmptyPattern => "EmptyPattern",
            WordError::RootCount { .. } => "RootCountError",
            WordError::UnknownLetter(_) => "UnknownLetter",
            WordError::Alphabet(_) => "AlphabetError",
        }
    }
}

/// Index of a symbol in its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An ordered set of distinct printable tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    lookup: HashMap<String, Letter>,
}

fn valid_token(token: &str) -> bool {
    !token.is_empty()
        && token != "ε"
        && token.chars().all(|c| c.is_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(symbols: &[S]) -> Result<Self, WordError> {
        if symbols.is_empty() {
            return Err(WordError::Alphabet("alphabet must be nonempty".into()));
        }
        if symbols.len() > u8::MAX as usize + 1 {
            return Err(WordError::Alphabet("at most 256 symbols supported".into()));
        }
        let mut lookup = HashMap::new();
        let mut owned = Vec::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            let s = s.as_ref();
            if !valid_token(s) {
                return Err(WordError::Alphabet(format!("invalid symbol token '{s}'")));
            }
            if lookup.insert(s.to_string(), Letter(i as u8)).is_some() {
                return Err(WordError::Alphabet(format!("duplicate symbol '{s}'")));
            }
            owned.push(s.to_string());
        }
        Ok(Alphabet { symbols: owned, lookup })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.symbols.len()).map(|i| Letter(i as u8))
    }

    pub fn symbol(&self, letter: Letter) -> &str {
        &self.symbols[letter.index()]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn letter(&self, token: &str) -> Result<Letter, WordError> {
        self.lookup
            .get(token)
            .copied()
            .ok_or_else(|| WordError::UnknownLetter(token.to_string()))
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word: contiguous characters for single-character alphabets,
    /// `.`-separated tokens otherwise. `ε` and the empty string denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Word::empty());
        }
        let letters = if self.single_char() {
            text.chars()
                .map(|c| self.letter(c.encode_utf8(&mut [0; 4])))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            text.split('.')
                .map(|t| self.letter(t.trim()))
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(Word(letters))
    }

    pub fn render(&self, word: &Word) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.single_char() { "" } else { "." };
        word.0
            .iter()
            .map(|&l| self.symbol(l))
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn contains_word(&self, word: &Word) -> bool {
        word.0.iter().all(|l| l.index() < self.len())
    }
}

/// A finite sequence of letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(letter: Letter) -> Self {
        Word(vec![letter])
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        Word(letters.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn count_letter(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    pub fn contains_letter(&self, letter: Letter) -> bool {
        self.0.contains(&letter)
    }

    pub fn starts_with(&self, prefix: &[Letter]) -> bool {
        self.0.starts_with(prefix)
    }

    pub fn ends_with(&self, suffix: &[Letter]) -> bool {
        self.0.ends_with(suffix)
    }
}

impl Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Alphabet-free debug rendering: letters by index, e.g. `[0 1 1]`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l.0)?;
        }
        write!(f, "]")
    }
}

/// Number of (possibly overlapping) occurrences of `pattern` in `word`.
pub fn subword_count(word: &Word, pattern: &Word) -> Result<usize, WordError> {
    if pattern.is_empty() {
        return Err(WordError::EmptyPattern);
    }
    if pattern.len() > word.len() {
        return Ok(0);
    }
    Ok(word
        .0
        .windows(pattern.len())
        .filter(|w| *w == pattern.0.as_slice())
        .count())
}

/// Length of the longest common prefix.
pub fn common_prefix_len(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// The word metric `2^-n`, `n` the common prefix length; `0` on equal words.
pub fn word_metric(w: &Word, v: &Word) -> f64 {
    if w == v {
        return 0.0;
    }
    2f64.powi(-(common_prefix_len(&w.0, &v.0) as i32))
}

/// A word split around its unique root occurrence: `left · root · right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnchoredWord {
    pub left: Word,
    pub root: Letter,
    pub right: Word,
}

impl AnchoredWord {
    pub fn reassemble(&self) -> Word {
        let mut v = Vec::with_capacity(self.left.len() + 1 + self.right.len());
        v.extend_from_slice(&self.left.0);
        v.push(self.root);
        v.extend_from_slice(&self.right.0);
        Word(v)
    }
}

pub fn anchor_decompose(word: &Word, root: Letter) -> Result<AnchoredWord, WordError> {
    let found = word.count_letter(root);
    if found != 1 {
        return Err(WordError::RootCount { found });
    }
    let pos = word.0.iter().position(|&l| l == root).expect("counted once");
    Ok(AnchoredWord {
        left: Word::from_letters(&word.0[..pos]),
        root,
        right: Word::from_letters(&word.0[pos + 1..]),
    })
}
