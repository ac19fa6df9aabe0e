use super::SmcModel;
use crate::rational;
use crate::words::{Letter, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seedable generator used by every randomized operation.
pub type SeedRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeedRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
enum Picker {
    /// Exact: uniform integer below the common denominator against cumulative numerators.
    Exact { denom: u64, cumulative: Vec<u64> },
    Float { cumulative: Vec<f64> },
}

/// Precomputed per-letter samplers for one model.
#[derive(Debug, Clone)]
pub struct Sampler<'m> {
    model: &'m SmcModel,
    pickers: Vec<Picker>,
}

impl<'m> Sampler<'m> {
    pub fn new(model: &'m SmcModel) -> Self {
        let pickers = model
            .rules()
            .map(|(_, rule)| {
                let denom = rule
                    .entries()
                    .iter()
                    .fold(BigInt::one(), |acc, e| acc.lcm(e.prob.denom()));
                match denom.to_u64() {
                    Some(d) => {
                        let mut acc = 0u64;
                        let cumulative = rule
                            .entries()
                            .iter()
                            .map(|e| {
                                let scaled = e.prob.numer() * (&denom / e.prob.denom());
                                acc += scaled.to_u64().expect("bounded by denominator");
                                acc
                            })
                            .collect();
                        Picker::Exact { denom: d, cumulative }
                    }
                    None => {
                        let mut acc = 0.0;
                        let cumulative = rule
                            .entries()
                            .iter()
                            .map(|e| {
                                acc += rational::to_f64(&e.prob);
                                acc
                            })
                            .collect();
                        Picker::Float { cumulative }
                    }
                }
            })
            .collect();
        Sampler { model, pickers }
    }

    fn pick<R: Rng + ?Sized>(&self, letter: Letter, rng: &mut R) -> &'m Word {
        let entries = self.model.rule(letter).entries();
        if entries.len() == 1 {
            return &entries[0].word;
        }
        let idx = match &self.pickers[letter.index()] {
            Picker::Exact { denom, cumulative } => {
                let r = rng.random_range(0..*denom);
                cumulative.partition_point(|&c| c <= r)
            }
            Picker::Float { cumulative } => {
                let r: f64 = rng.random::<f64>() * cumulative.last().copied().unwrap_or(1.0);
                cumulative.partition_point(|&c| c <= r)
            }
        };
        &entries[idx.min(entries.len() - 1)].word
    }

    pub fn step<R: Rng + ?Sized>(&self, w: &Word, rng: &mut R) -> Word {
        let mut out = Vec::with_capacity(w.len() * 2);
        for &l in w.letters() {
            out.extend_from_slice(self.pick(l, rng).letters());
        }
        Word(out)
    }
}

/// One random step: every letter replaced independently by a draw from its rule.
pub fn sample_step<R: Rng + ?Sized>(model: &SmcModel, w: &Word, rng: &mut R) -> Word {
    Sampler::new(model).step(w, rng)
}

/// The trajectory `X_0 = start, ..., X_steps`.
pub fn simulate(model: &SmcModel, start: &Word, steps: usize, seed: u64) -> Vec<Word> {
    let sampler = Sampler::new(model);
    let mut rng = rng_from_seed(seed);
    let mut path = Vec::with_capacity(steps + 1);
    path.push(start.clone());
    for _ in 0..steps {
        let next = sampler.step(path.last().expect("nonempty"), &mut rng);
        path.push(next);
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smc::{preset, successors};
    use std::collections::BTreeMap;

    fn word(m: &SmcModel, s: &str) -> Word {
        m.parse_word(s).unwrap()
    }

    #[test]
    fn point_mass_is_deterministic() {
        let m = preset("eg1").unwrap();
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            assert_eq!(sample_step(&m, &word(&m, "b"), &mut rng), word(&m, "b"));
        }
    }

    #[test]
    fn supports() {
        let eg3 = preset("eg3").unwrap();
        let allowed: Vec<Word> = ["ab", "ba", "ac", "ca"].iter().map(|s| word(&eg3, s)).collect();
        let eg2 = preset("eg2").unwrap();
        let allowed2 = [word(&eg2, "aaba"), word(&eg2, "abba")];
        for seed in 0..50 {
            let mut rng = rng_from_seed(seed);
            assert!(allowed.contains(&sample_step(&eg3, &word(&eg3, "a"), &mut rng)));
            assert!(allowed2.contains(&sample_step(&eg2, &word(&eg2, "ab"), &mut rng)));
        }
    }

    #[test]
    fn trajectories() {
        let eg1 = preset("eg1").unwrap();
        assert_eq!(simulate(&eg1, &word(&eg1, "a"), 0, 3), vec![word(&eg1, "a")]);
        let eg3 = preset("eg3").unwrap();
        for n in [1usize, 5, 17] {
            let path = simulate(&eg3, &word(&eg3, "a"), n, 11);
            let last = path.last().unwrap();
            assert_eq!(last.len(), n + 1);
            assert_eq!(last.count_letter(Letter(0)), 1);
        }
        let eg2 = preset("eg2").unwrap();
        let path = simulate(&eg2, &word(&eg2, "a"), 8, 5);
        assert_eq!(path.last().unwrap().len(), 256);
        assert_eq!(path, simulate(&eg2, &word(&eg2, "a"), 8, 5));
    }

    /// Pearson chi-square of empirical successor counts against exact probabilities.
    #[test]
    fn empirical_successors_match_transition_probabilities() {
        let cases = [("eg3", "bab"), ("eg1", "ab"), ("eg4", "ba"), ("eg5", "ab")];
        for (name, start) in cases {
            let m = preset(name).unwrap();
            let w = word(&m, start);
            let exact = successors(&m, &w).unwrap();
            let sampler = Sampler::new(&m);
            let mut rng = rng_from_seed(2024);
            let draws = 20_000usize;
            let mut counts: BTreeMap<Word, usize> = BTreeMap::new();
            for _ in 0..draws {
                *counts.entry(sampler.step(&w, &mut rng)).or_default() += 1;
            }
            assert!(counts.keys().all(|k| exact.contains_key(k)));
            let chi2: f64 = exact
                .iter()
                .map(|(v, p)| {
                    let expected = rational::to_f64(p) * draws as f64;
                    let observed = *counts.get(v).unwrap_or(&0) as f64;
                    (observed - expected).powi(2) / expected
                })
                .sum();
            let dof = (exact.len() - 1) as f64;
            // generous bound: mean dof, sd sqrt(2 dof)
            assert!(chi2 < dof + 6.0 * (2.0 * dof).sqrt() + 10.0, "{name}: chi2 {chi2} dof {dof}");
        }
    }
}
