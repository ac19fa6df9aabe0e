//! Green's function, Martin kernel and Martin metric of a rooted chain,
//! computed exactly on finite parts of the state space.
//!
//! Since transitions never shorten a word, `G(x, y)` only involves words of
//! length at most `|y|`; the engine explores that finite region from `x`
//! and solves for the expected number of visits exactly.

mod graph;

pub use graph::TransitionGraph;

use crate::rational::{self, Rational};
use crate::smc::{successors, ModelError, SmcModel};
use crate::words::{Letter, Word};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

/// Longest target word accepted by the generic engine.
pub const MAX_TARGET_LEN: usize = 64;
/// Largest intermediate word set explored for a single query.
pub const MAX_INTERMEDIATE: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MartinError {
    #[error("NonTransient: the chain returns to {word} with probability one")]
    NonTransient { word: String },
    #[error("UnreachableTarget: {0} is not reachable from the root")]
    UnreachableTarget(String),
    #[error("BudgetExceeded: {what} exceeded cap {cap}")]
    Budget { what: &'static str, cap: usize },
    #[error("TransienceHypothesis: no strictly expanding transition out of {0} (eta = 0)")]
    NoExpansion(String),
    #[error("MissingRoot: the model declares no root")]
    MissingRoot,
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl MartinError {
    pub fn name(&self) -> &'static str {
        match self {
            MartinError::NonTransient { .. } => "NonTransient",
            MartinError::UnreachableTarget(_) => "UnreachableTarget",
            MartinError::Budget { .. } => "BudgetExceeded",
            MartinError::NoExpansion(_) => "TransienceHypothesis",
            MartinError::MissingRoot => "MissingRoot",
            MartinError::Model(e) => e.name(),
        }
    }
}

/// Positive weights `w_z` of the Martin metric.
pub trait WeightScheme {
    fn weight(&self, z: &Word) -> Rational;
}

/// `w_z = 16 · 4^(-2|z|)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultWeights;

impl WeightScheme for DefaultWeights {
    fn weight(&self, z: &Word) -> Rational {
        rational::int(16) * rational::pow4(-2 * z.len() as i64)
    }
}

impl<F: Fn(&Word) -> Rational> WeightScheme for F {
    fn weight(&self, z: &Word) -> Rational {
        self(z)
    }
}

fn check_target(y: &Word) -> Result<(), MartinError> {
    if y.len() > MAX_TARGET_LEN {
        return Err(MartinError::Budget { what: "target word length", cap: MAX_TARGET_LEN });
    }
    Ok(())
}

/// Exact `P^(n)(x, y)`.
pub fn nstep_prob(model: &SmcModel, x: &Word, y: &Word, n: usize) -> Result<Rational, MartinError> {
    check_target(y)?;
    let mut dist: HashMap<Word, Rational> = HashMap::new();
    if x.len() <= y.len() {
        dist.insert(x.clone(), Rational::one());
    }
    for _ in 0..n {
        let mut next: HashMap<Word, Rational> = HashMap::new();
        for (z, p) in &dist {
            for (v, q) in successors(model, z)? {
                if v.len() <= y.len() {
                    *next.entry(v).or_insert_with(Rational::zero) += p * q;
                }
            }
        }
        if next.len() > MAX_INTERMEDIATE {
            return Err(MartinError::Budget { what: "intermediate word set", cap: MAX_INTERMEDIATE });
        }
        dist = next;
    }
    Ok(dist.remove(y).unwrap_or_else(Rational::zero))
}

/// Exact Green's function `G(x, y) = Σ_n P^(n)(x, y)`.
pub fn green(model: &SmcModel, x: &Word, y: &Word) -> Result<Rational, MartinError> {
    check_target(y)?;
    if x.len() > y.len() {
        return Ok(Rational::zero());
    }
    let g = TransitionGraph::explore(model, std::slice::from_ref(x), y.len(), MAX_INTERMEDIATE)?;
    let column = g.green_column(y)?;
    Ok(g.id(x).and_then(|i| column.get(&i).cloned()).unwrap_or_else(Rational::zero))
}

/// `K(z, x) = G(z, x) / G(root, x)`.
pub fn kernel(model: &SmcModel, z: &Word, x: &Word, root: Letter) -> Result<Rational, MartinError> {
    check_target(x)?;
    let root_word = Word::single(root);
    let g = TransitionGraph::explore(model, &[root_word.clone(), z.clone()], x.len(), MAX_INTERMEDIATE)?;
    let column = g.green_column(x)?;
    let at = |w: &Word| g.id(w).and_then(|i| column.get(&i).cloned()).unwrap_or_else(Rational::zero);
    let from_root = at(&root_word);
    if from_root.is_zero() {
        return Err(MartinError::UnreachableTarget(model.render(x)));
    }
    Ok(at(z) / from_root)
}

/// Martin kernel profile `z ↦ K(z, x)` restricted to the ancestors of `x`.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    pub target: Word,
    pub green_from_root: Rational,
    pub values: HashMap<Word, Rational>,
}

/// The language of a rooted model truncated at a word length, with the
/// transition graph shared by all kernel and metric queries inside it.
#[derive(Debug, Clone)]
pub struct MartinContext<'m> {
    model: &'m SmcModel,
    root: Letter,
    graph: TransitionGraph,
}

impl<'m> MartinContext<'m> {
    pub fn new(model: &'m SmcModel, root: Letter, max_len: usize) -> Result<Self, MartinError> {
        if max_len > MAX_TARGET_LEN {
            return Err(MartinError::Budget { what: "target word length", cap: MAX_TARGET_LEN });
        }
        let graph = TransitionGraph::explore(model, &[Word::single(root)], max_len, MAX_INTERMEDIATE)?;
        Ok(MartinContext { model, root, graph })
    }

    pub fn for_model(model: &'m SmcModel, max_len: usize) -> Result<Self, MartinError> {
        let root = model.root().ok_or(MartinError::MissingRoot)?;
        Self::new(model, root, max_len)
    }

    pub fn root(&self) -> Letter {
        self.root
    }

    pub fn model(&self) -> &SmcModel {
        self.model
    }

    /// Language words of length at most the context bound.
    pub fn words(&self) -> &[Word] {
        self.graph.words()
    }

    pub fn graph(&self) -> &TransitionGraph {
        &self.graph
    }

    /// `G(z, x)` for every language word `z` with `G(z, x) > 0`.
    pub fn green_column(&self, x: &Word) -> Result<HashMap<Word, Rational>, MartinError> {
        check_target(x)?;
        let column = self.graph.green_column(x)?;
        Ok(column
            .into_iter()
            .map(|(i, g)| (self.graph.word(i).clone(), g))
            .collect())
    }

    pub fn kernel_profile(&self, x: &Word) -> Result<KernelProfile, MartinError> {
        if x.len() > self.graph.max_len() {
            return Err(MartinError::Budget { what: "context word length", cap: self.graph.max_len() });
        }
        let column = self.green_column(x)?;
        let root_word = Word::single(self.root);
        let from_root = column.get(&root_word).cloned().unwrap_or_else(Rational::zero);
        if from_root.is_zero() {
            return Err(MartinError::UnreachableTarget(self.model.render(x)));
        }
        let values = column.into_iter().map(|(z, g)| (z, g / &from_root)).collect();
        Ok(KernelProfile { target: x.clone(), green_from_root: from_root, values })
    }

    pub fn theta(&self, x: &Word, y: &Word, weights: &dyn WeightScheme) -> Result<Rational, MartinError> {
        if x == y {
            self.kernel_profile(x)?;
            return Ok(Rational::zero());
        }
        let px = self.kernel_profile(x)?;
        let py = self.kernel_profile(y)?;
        Ok(theta_between(&px, &py, weights))
    }
}

/// `Σ_z w_z |K(z, x) - K(z, y)|` over the union of both ancestor sets.
pub fn theta_between(px: &KernelProfile, py: &KernelProfile, weights: &dyn WeightScheme) -> Rational {
    let zs: BTreeSet<&Word> = px.values.keys().chain(py.values.keys()).collect();
    let zero = Rational::zero();
    zs.into_iter()
        .map(|z| {
            let a = px.values.get(z).unwrap_or(&zero);
            let b = py.values.get(z).unwrap_or(&zero);
            weights.weight(z) * (a - b).abs()
        })
        .sum()
}

/// Martin metric `θ(x, y)` between two language words.
pub fn theta(
    model: &SmcModel,
    x: &Word,
    y: &Word,
    weights: &dyn WeightScheme,
    root: Letter,
) -> Result<Rational, MartinError> {
    let ctx = MartinContext::new(model, root, x.len().max(y.len()))?;
    ctx.theta(x, y, weights)
}

/// Result of the return-probability bound `G(v, v) ≤ 1/η`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransienceReport {
    /// Probability of a strictly longer word after one step.
    pub eta: Rational,
    pub green_vv: Rational,
    pub bound_ok: bool,
}

pub fn transience_check(model: &SmcModel, v: &Word) -> Result<TransienceReport, MartinError> {
    let succ = successors(model, v)?;
    let eta: Rational = succ
        .iter()
        .filter(|(w, _)| w.len() > v.len())
        .map(|(_, p)| p.clone())
        .sum();
    if !eta.is_positive() {
        return Err(MartinError::NoExpansion(model.render(v)));
    }
    let green_vv = green(model, v, v)?;
    let bound_ok = green_vv <= Rational::one() / &eta;
    Ok(TransienceReport { eta, green_vv, bound_ok })
}

/// Partial sums of `Σ_z w_z / G(root, z)` level by level over the enumerated
/// language. Boundedness here is evidence, not a certificate, of weight admissibility.
pub fn admissibility_partial_sums(
    ctx: &MartinContext<'_>,
    weights: &dyn WeightScheme,
) -> Result<Vec<Rational>, MartinError> {
    let max_len = ctx.graph().max_len();
    let mut by_len = vec![Rational::zero(); max_len + 1];
    for z in ctx.words() {
        let g = ctx.kernel_profile(z)?.green_from_root;
        by_len[z.len()] += weights.weight(z) / g;
    }
    let mut acc = Rational::zero();
    Ok(by_len
        .into_iter()
        .skip(1)
        .map(|s| {
            acc += s;
            acc.clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::smc::{parse_model, preset};

    const A: Letter = Letter(0);

    fn w(m: &SmcModel, s: &str) -> Word {
        m.parse_word(s).unwrap()
    }

    #[test]
    fn nstep_examples() {
        let eg3 = preset("eg3").unwrap();
        assert_eq!(nstep_prob(&eg3, &w(&eg3, "a"), &w(&eg3, "bca"), 2).unwrap(), ratio(1, 16));
        assert_eq!(nstep_prob(&eg3, &w(&eg3, "a"), &w(&eg3, "bca"), 1).unwrap(), int(0));
        assert_eq!(nstep_prob(&eg3, &w(&eg3, "ab"), &w(&eg3, "ab"), 0).unwrap(), int(1));
        let eg4 = preset("eg4").unwrap();
        assert_eq!(nstep_prob(&eg4, &w(&eg4, "a"), &w(&eg4, "a"), 3).unwrap(), ratio(1, 8));
    }

    #[test]
    fn green_examples() {
        let eg3 = preset("eg3").unwrap();
        assert_eq!(green(&eg3, &w(&eg3, "a"), &w(&eg3, "bca")).unwrap(), ratio(1, 16));
        assert_eq!(green(&eg3, &w(&eg3, "ba"), &w(&eg3, "bca")).unwrap(), ratio(1, 4));
        assert_eq!(green(&eg3, &w(&eg3, "bca"), &w(&eg3, "ba")).unwrap(), int(0));
        let eg4 = preset("eg4").unwrap();
        assert_eq!(green(&eg4, &w(&eg4, "a"), &w(&eg4, "a")).unwrap(), int(2));
        // 1/q visits to a, each leaving for ab with q/4, then 1/q visits to ab
        assert_eq!(green(&eg4, &w(&eg4, "a"), &w(&eg4, "ab")).unwrap(), ratio(1, 2));
    }

    #[test]
    fn same_length_cycles_are_solved() {
        // a <-> b swap with escape: a -> b (1/2) | ab (1/2), b -> a (1/2) | b (1/2)
        let m = parse_model("alphabet = a b\nrule a = 1/2: b | 1/2: ab\nrule b = 1/2: a | 1/2: b\n").unwrap();
        let a = w(&m, "a");
        let g = green(&m, &a, &a).unwrap();
        // expected visits: solve g_a = 1 + g_b/2, g_b = g_a/2 + g_b/2  =>  g_b = g_a, g_a = 2
        assert_eq!(g, int(2));
        let direct: Rational = (0..200).map(|n| nstep_prob(&m, &a, &a, n).unwrap()).sum();
        assert!((rational::to_f64(&direct) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn recurrent_letter_is_rejected() {
        let eg1 = preset("eg1").unwrap();
        let b = w(&eg1, "b");
        assert_eq!(green(&eg1, &b, &b).unwrap_err().name(), "NonTransient");
        assert_eq!(transience_check(&eg1, &b).unwrap_err().name(), "TransienceHypothesis");
    }

    #[test]
    fn kernels() {
        let eg3 = preset("eg3").unwrap();
        assert_eq!(kernel(&eg3, &w(&eg3, "ba"), &w(&eg3, "bca"), A).unwrap(), int(4));
        assert_eq!(kernel(&eg3, &w(&eg3, "a"), &w(&eg3, "bca"), A).unwrap(), int(1));
        assert_eq!(kernel(&eg3, &w(&eg3, "ca"), &w(&eg3, "bca"), A).unwrap(), int(0));
        let x = w(&eg3, "bca");
        assert_eq!(kernel(&eg3, &x, &x, A).unwrap(), int(16));
        assert_eq!(kernel(&eg3, &x, &w(&eg3, "bb"), A).unwrap_err().name(), "UnreachableTarget");
    }

    #[test]
    fn theta_examples() {
        let eg3 = preset("eg3").unwrap();
        let t = |x: &str, y: &str| theta(&eg3, &w(&eg3, x), &w(&eg3, y), &DefaultWeights, A).unwrap();
        assert_eq!(t("ba", "ba"), int(0));
        assert_eq!(t("ba", "ab"), ratio(1, 2));
        // regression values from exact enumeration
        assert_eq!(t("ba", "ca"), ratio(1, 2));
        assert_eq!(t("bca", "ba"), ratio(1, 16));
        assert_eq!(t("ba", "ab"), t("ab", "ba"));
    }

    #[test]
    fn transience() {
        let eg3 = preset("eg3").unwrap();
        let r = transience_check(&eg3, &w(&eg3, "a")).unwrap();
        assert_eq!((r.eta, r.green_vv, r.bound_ok), (int(1), int(1), true));
        let eg4 = preset("eg4").unwrap();
        let r = transience_check(&eg4, &w(&eg4, "a")).unwrap();
        assert_eq!((r.eta.clone(), r.green_vv.clone()), (ratio(1, 2), int(2)));
        assert!(r.bound_ok && r.green_vv == Rational::one() / r.eta);
    }

    #[test]
    fn target_length_budget() {
        let eg3 = preset("eg3").unwrap();
        let long = Word(vec![Letter(1); MAX_TARGET_LEN + 1]);
        assert_eq!(green(&eg3, &w(&eg3, "a"), &long).unwrap_err().name(), "BudgetExceeded");
    }

    #[test]
    fn root_kernel_is_one() {
        let eg5 = preset("eg5").unwrap();
        let ctx = MartinContext::for_model(&eg5, 5).unwrap();
        for x in ctx.words() {
            let p = ctx.kernel_profile(x).unwrap();
            assert_eq!(p.values[&Word::single(A)], int(1));
            assert_eq!(p.values[x], Rational::one() / &p.green_from_root);
        }
    }
}
