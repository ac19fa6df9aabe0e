//! A strictly positive, non-constant harmonic function for constant-length
//! chains with an expanding root, built along the iterates of a
//! deterministic substitution.

use crate::rational::{self, Rational};
use crate::smc::{classify, successors, transition_prob, ModelError, SmcModel};
use crate::words::{Letter, Word};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// The structural condition a model failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    ConstantLength,
    Persistent,
    ExpandingRoot,
    RootSupport,
    ExclusiveWord,
}

impl Hypothesis {
    pub fn describe(self) -> &'static str {
        match self {
            Hypothesis::ConstantLength => "not constant length",
            Hypothesis::Persistent => "not persistent",
            Hypothesis::ExpandingRoot => "no expanding root",
            Hypothesis::RootSupport => "root rule has fewer than two support words",
            Hypothesis::ExclusiveWord => "some letter has no support word outside every other rule",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarmonicError {
    #[error("HypothesisError: {} ({detail})", .failed.describe())]
    Hypothesis { failed: Hypothesis, detail: String },
    #[error("DepthError: {0}")]
    Depth(String),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl HarmonicError {
    pub fn name(&self) -> &'static str {
        match self {
            HarmonicError::Hypothesis { .. } => "HypothesisError",
            HarmonicError::Depth(_) => "DepthError",
            HarmonicError::InvalidArgument(_) => "InvalidArgument",
            HarmonicError::Model(e) => e.name(),
        }
    }

    fn hypothesis(failed: Hypothesis, detail: impl Into<String>) -> Self {
        HarmonicError::Hypothesis { failed, detail: detail.into() }
    }
}

/// The data defining the function: selector, constant, iterates and values.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpec {
    pub root: Letter,
    /// `σ(c)` for every letter `c`, indexed by letter.
    pub selector: Vec<Word>,
    pub k: Rational,
    /// `σ^n(root)` for `n = 0..=depth`.
    pub iterates: Vec<Word>,
    /// `P(σ^n(root), σ^(n+1)(root))` for `n < depth`.
    pub step_probs: Vec<Rational>,
    /// `s_n` for `n = 0..=depth`.
    pub values: Vec<Rational>,
    /// Support word length shared by every rule.
    pub word_len: usize,
}

impl HarmonicSpec {
    pub fn depth(&self) -> usize {
        self.iterates.len() - 1
    }

    /// `f(w)`: `s_n` on the `n`-th iterate, `k` elsewhere.
    pub fn value(&self, w: &Word) -> Result<Rational, HarmonicError> {
        // |σ^n(root)| = L^n, so the length pins down the only candidate n
        let mut len = 1usize;
        let mut n = 0usize;
        while len < w.len() {
            len = len.saturating_mul(self.word_len);
            n += 1;
        }
        if len != w.len() || w.count_letter(self.root) != 1 {
            return Ok(self.k.clone());
        }
        match self.iterates.get(n) {
            Some(it) if it == w => Ok(self.values[n].clone()),
            Some(_) => Ok(self.k.clone()),
            None => Err(HarmonicError::Depth(format!(
                "a word of length {} needs iterate {n}, table stops at {}",
                w.len(),
                self.depth()
            ))),
        }
    }

    /// Indices `n` with `s_n ≤ 0`.
    pub fn nonpositive(&self) -> Vec<usize> {
        self.values.iter().enumerate().filter(|(_, s)| !s.is_positive()).map(|(i, _)| i).collect()
    }
}

fn exclusive_words(model: &SmcModel, letter: Letter) -> Vec<Word> {
    let mut out: Vec<Word> = model
        .rule(letter)
        .support()
        .filter(|w| {
            model
                .rules()
                .all(|(other, rule)| other == letter || rule.prob(w.letters()).is_none())
        })
        .cloned()
        .collect();
    out.sort();
    out
}

/// Checks the structural conditions and returns the root letter.
pub fn check_hypotheses(model: &SmcModel) -> Result<Letter, HarmonicError> {
    let c = classify(model);
    if c.constant_length.is_none() {
        return Err(HarmonicError::hypothesis(Hypothesis::ConstantLength, "support words have different lengths"));
    }
    if !c.is_persistent {
        let missing: Vec<_> = model
            .alphabet()
            .letters()
            .filter(|l| !c.persistent_letters.contains(l))
            .map(|l| model.alphabet().symbol(l).to_string())
            .collect();
        return Err(HarmonicError::hypothesis(Hypothesis::Persistent, format!("letters {missing:?} never reproduce")));
    }
    let root = match model.root() {
        Some(r) if c.is_expanding_root(r) => Some(r),
        Some(_) => None,
        None => model.alphabet().letters().find(|&l| c.is_expanding_root(l)),
    };
    let Some(root) = root else {
        return Err(HarmonicError::hypothesis(Hypothesis::ExpandingRoot, "no letter is both a root and expanding"));
    };
    if model.rule(root).len() < 2 {
        return Err(HarmonicError::hypothesis(Hypothesis::RootSupport, model.alphabet().symbol(root).to_string()));
    }
    for l in model.alphabet().letters() {
        if exclusive_words(model, l).is_empty() {
            return Err(HarmonicError::hypothesis(Hypothesis::ExclusiveWord, model.alphabet().symbol(l).to_string()));
        }
    }
    Ok(root)
}

fn apply(selector: &[Word], w: &Word) -> Word {
    Word(w.letters().iter().flat_map(|l| selector[l.index()].letters().iter().copied()).collect())
}

/// Builds the table with the default selector (least exclusive word per letter).
pub fn build_harmonic(model: &SmcModel, k: &Rational, depth: usize) -> Result<HarmonicSpec, HarmonicError> {
    build_harmonic_with(model, k, depth, None)
}

pub fn build_harmonic_with(
    model: &SmcModel,
    k: &Rational,
    depth: usize,
    selector: Option<Vec<Word>>,
) -> Result<HarmonicSpec, HarmonicError> {
    let root = check_hypotheses(model)?;
    if !k.is_positive() || k.is_one() {
        return Err(HarmonicError::InvalidArgument(format!("k = {} must be positive and not 1", rational::format(k))));
    }
    let selector = match selector {
        None => model.alphabet().letters().map(|l| exclusive_words(model, l).remove(0)).collect(),
        Some(sel) => {
            if sel.len() != model.alphabet().len() {
                return Err(HarmonicError::InvalidArgument("selector needs one word per letter".into()));
            }
            for (l, w) in model.alphabet().letters().zip(&sel) {
                if !exclusive_words(model, l).contains(w) {
                    return Err(HarmonicError::InvalidArgument(format!(
                        "'{}' is not an exclusive support word of '{}'",
                        model.render(w),
                        model.alphabet().symbol(l)
                    )));
                }
            }
            sel
        }
    };
    let mut iterates = vec![Word::single(root)];
    let mut values = vec![Rational::one()];
    let mut step_probs = Vec::with_capacity(depth);
    for n in 0..depth {
        let next = apply(&selector, &iterates[n]);
        let p = transition_prob(model, &iterates[n], &next);
        debug_assert!(p.is_positive(), "selector words are in the support");
        let s = (&values[n] - k) / &p + k;
        step_probs.push(p);
        values.push(s);
        iterates.push(next);
    }
    Ok(HarmonicSpec {
        root,
        selector,
        k: k.clone(),
        iterates,
        step_probs,
        values,
        word_len: classify(model).constant_length.expect("checked"),
    })
}

/// Exact `Pf(w) = Σ_v P(w, v) f(v)` and whether it equals `f(w)`.
pub fn verify_harmonic(model: &SmcModel, f: &HarmonicSpec, w: &Word) -> Result<(Rational, bool), HarmonicError> {
    let mut pf = Rational::zero();
    for (v, p) in successors(model, w)? {
        pf += p * f.value(&v)?;
    }
    let equal = pf == f.value(w)?;
    Ok((pf, equal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::smc::{enumerate_language, preset};

    #[test]
    fn table_for_test_preset() {
        let m = preset("test-harmonic").unwrap();
        let f = build_harmonic(&m, &ratio(1, 2), 6).unwrap();
        assert_eq!(m.render(&f.selector[0]), "ab");
        assert_eq!(m.render(&f.selector[1]), "bb");
        for n in 0..=6 {
            // s_n = 2^(n-1) + 1/2
            assert_eq!(f.values[n], rational::pow(&int(2), n as u32) / int(2) + ratio(1, 2));
        }
        assert_eq!(m.render(&f.iterates[2]), "abbb");
        assert!(f.nonpositive().is_empty());
    }

    #[test]
    fn pinned_evaluations() {
        let m = preset("test-harmonic").unwrap();
        let f = build_harmonic(&m, &ratio(1, 2), 4).unwrap();
        let w = |s: &str| m.parse_word(s).unwrap();
        assert_eq!(verify_harmonic(&m, &f, &w("ab")).unwrap(), (ratio(3, 2), true));
        assert_eq!(verify_harmonic(&m, &f, &w("bb")).unwrap(), (ratio(1, 2), true));
        assert_eq!(verify_harmonic(&m, &f, &w("a")).unwrap(), (int(1), true));
        assert_eq!(f.value(&w("ba")).unwrap(), ratio(1, 2));
        let deep = f.iterates[4].clone();
        assert_eq!(verify_harmonic(&m, &f, &deep).unwrap_err().name(), "DepthError");
    }

    #[test]
    fn exhaustive_up_to_length_16() {
        let m = preset("test-harmonic").unwrap();
        let f = build_harmonic(&m, &ratio(1, 2), 5).unwrap();
        let lang = enumerate_language(&m, Letter(0), 4).unwrap();
        for w in lang.union() {
            assert!(verify_harmonic(&m, &f, &w).unwrap().1, "{}", m.render(&w));
        }
    }

    #[test]
    fn k_above_one_loses_positivity_but_stays_harmonic() {
        let m = preset("test-harmonic").unwrap();
        let f = build_harmonic(&m, &int(3), 4).unwrap();
        assert_eq!(f.nonpositive(), vec![1, 2, 3, 4]);
        assert!(verify_harmonic(&m, &f, &f.iterates[1]).unwrap().1);
    }

    #[test]
    fn hypothesis_failures() {
        let failed = |name: &str| match build_harmonic(&preset(name).unwrap(), &ratio(1, 2), 3).unwrap_err() {
            HarmonicError::Hypothesis { failed, .. } => failed,
            other => panic!("{other}"),
        };
        assert_eq!(failed("eg1"), Hypothesis::ConstantLength);
        assert_eq!(failed("eg2"), Hypothesis::ExpandingRoot);
        assert_eq!(failed("eg3"), Hypothesis::ConstantLength);
        let m = preset("test-harmonic").unwrap();
        assert_eq!(build_harmonic(&m, &int(1), 3).unwrap_err().name(), "InvalidArgument");
        let bad = vec![m.parse_word("ba").unwrap(), m.parse_word("ab").unwrap()];
        assert_eq!(build_harmonic_with(&m, &ratio(1, 2), 3, Some(bad)).unwrap_err().name(), "InvalidArgument");
    }
}
