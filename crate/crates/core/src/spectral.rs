//! Letter-frequency analysis through the expected-count matrix of the
//! associated multitype branching process.
//!
//! `M[c][c']` is the expected number of letters `c` produced by one letter
//! `c'`. When `M` is primitive its Perron-Frobenius right eigenvector,
//! normalized to unit L1 norm, gives the limiting letter frequencies.

use crate::linalg;
use crate::rational::{self, Rational};
use crate::smc::{rng_from_seed, SmcModel, Sampler};
use crate::words::{Letter, Word};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("NotPrimitive: no power up to {max_power} of the frequency matrix is strictly positive")]
    NotPrimitive { max_power: usize },
    #[error("NoConvergence: power iteration did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

impl SpectralError {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralError::NotPrimitive { .. } => "NotPrimitive",
            SpectralError::NoConvergence(_) => "NoConvergence",
            SpectralError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

/// Expected letter counts per produced word; row `c`, column `c'`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMatrix {
    pub entries: Vec<Vec<Rational>>,
}

impl FrequencyMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.size())
            .map(|j| self.entries.iter().map(|row| &row[j]).sum())
            .collect()
    }

    fn support(&self) -> Vec<Vec<bool>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|x| !x.is_zero()).collect())
            .collect()
    }

    /// Exact primitivity test on the zero pattern: some power up to `n^2`
    /// has every entry positive.
    pub fn primitive_power(&self) -> Option<usize> {
        let n = self.size();
        let base = self.support();
        let mut power = base.clone();
        for k in 1..=n * n {
            if power.iter().all(|row| row.iter().all(|&b| b)) {
                return Some(k);
            }
            power = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).any(|m| power[i][m] && base[m][j]))
                        .collect()
                })
                .collect();
        }
        None
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(rational::to_f64).collect())
            .collect()
    }
}

pub fn frequency_matrix(model: &SmcModel) -> FrequencyMatrix {
    let n = model.alphabet().len();
    let mut entries = vec![vec![Rational::zero(); n]; n];
    for (producer, rule) in model.rules() {
        for e in rule.entries() {
            for &l in e.word.letters() {
                entries[l.index()][producer.index()] += &e.prob;
            }
        }
    }
    FrequencyMatrix { entries }
}

/// Dominant eigenpair of a primitive frequency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Perron {
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
    /// Exact rational eigenpair, when the eigenvalue is rational.
    pub exact: Option<(Rational, Vec<Rational>)>,
    /// `max_c |(M e)_c - rho e_c|` of the floating point pair.
    pub residual: f64,
}

const POWER_ITERATIONS: usize = 200_000;

pub fn perron_frequencies(m: &FrequencyMatrix) -> Result<Perron, SpectralError> {
    let n = m.size();
    if n == 0 {
        return Err(SpectralError::InvalidArgument("empty matrix".into()));
    }
    if m.primitive_power().is_none() {
        return Err(SpectralError::NotPrimitive { max_power: n * n });
    }
    let a = m.to_f64();
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| a[i][j] * x[j]).sum()).collect()
    };
    let mut e = vec![1.0 / n as f64; n];
    let mut rho = 0.0;
    let mut converged = false;
    for _ in 0..POWER_ITERATIONS {
        let next = apply(&e);
        rho = next.iter().sum::<f64>();
        let next: Vec<f64> = next.iter().map(|x| x / rho).collect();
        let change = next
            .iter()
            .zip(&e)
            .map(|(p, q)| (p - q).abs() / p.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        e = next;
        if change < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpectralError::NoConvergence(POWER_ITERATIONS));
    }
    let me = apply(&e);
    let residual = me
        .iter()
        .zip(&e)
        .map(|(x, y)| (x - rho * y).abs())
        .fold(0.0, f64::max);
    let exact = exact_eigenpair(m, rho, &e);
    if let Some((r, v)) = &exact {
        rho = rational::to_f64(r);
        e = v.iter().map(rational::to_f64).collect();
    }
    Ok(Perron { eigenvalue: rho, vector: e, exact, residual })
}

/// Recovers a rational eigenvalue near `rho` and verifies it exactly through
/// the null space of `M - rho I`.
fn exact_eigenpair(m: &FrequencyMatrix, rho: f64, approx: &[f64]) -> Option<(Rational, Vec<Rational>)> {
    let candidate = rational::approximate(rho, 1_000_000)?;
    let n = m.size();
    let shifted: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        &m.entries[i][j] - &candidate
                    } else {
                        m.entries[i][j].clone()
                    }
                })
                .collect()
        })
        .collect();
    let v = linalg::null_vector(shifted)?;
    let total: Rational = v.iter().sum();
    if total.is_zero() {
        return None;
    }
    let v: Vec<Rational> = v.into_iter().map(|x| x / &total).collect();
    if !v.iter().all(|x| x.is_positive()) {
        return None;
    }
    let close = v
        .iter()
        .zip(approx)
        .all(|(x, y)| (rational::to_f64(x) - y).abs() < 1e-9);
    close.then_some((candidate, v))
}

/// Per-letter occurrence counts of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterCountVector(pub Vec<u64>);

impl LetterCountVector {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

pub fn letter_counts(word: &Word, alphabet_len: usize) -> LetterCountVector {
    let mut counts = vec![0u64; alphabet_len];
    for &l in word.letters() {
        counts[l.index()] += 1;
    }
    LetterCountVector(counts)
}

/// Monte-Carlo mean of `|X_steps|_c / |X_steps|` over independent seeded runs.
///
/// Run `i` draws from stream `i` of the generator seeded with `seed`, so the
/// result does not depend on how runs are scheduled.
pub fn empirical_frequency(
    model: &SmcModel,
    start: &Word,
    steps: usize,
    runs: usize,
    seed: u64,
) -> Result<Vec<f64>, SpectralError> {
    if runs == 0 {
        return Err(SpectralError::InvalidArgument("runs must be at least 1".into()));
    }
    if start.is_empty() {
        return Err(SpectralError::InvalidArgument("start word must be nonempty".into()));
    }
    let n = model.alphabet().len();
    let sampler = Sampler::new(model);
    let per_run: Vec<Vec<f64>> = (0..runs as u64)
        .into_par_iter()
        .map(|run| {
            let mut rng = rng_from_seed(seed);
            rng.set_stream(run);
            let mut w = start.clone();
            for _ in 0..steps {
                w = sampler.step(&w, &mut rng);
            }
            let counts = letter_counts(&w, n);
            let len = w.len() as f64;
            counts.0.iter().map(|&c| c as f64 / len).collect()
        })
        .collect();
    let mut mean = vec![0.0; n];
    for freq in &per_run {
        for (m, f) in mean.iter_mut().zip(freq) {
            *m += f;
        }
    }
    Ok(mean.into_iter().map(|m| m / runs as f64).collect())
}

/// Unit vector for a single starting letter (the branching process `Z_0`).
pub fn initial_counts(letter: Letter, alphabet_len: usize) -> LetterCountVector {
    letter_counts(&Word::single(letter), alphabet_len)
}
