use super::{Eg3Error, Symbol};
use num_integer::Integer;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// How a stream continues after its explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Generator {
    /// No continuation: the stream has exactly the prefix's depth.
    Finite,
    /// The pattern repeats forever.
    Periodic(Vec<Symbol>),
    /// Position `i` (counted from the outer end, prefix included) holds bit
    /// `i` of the ChaCha8 keystream for `seed`, so two streams with the same
    /// seed coincide beyond their prefixes.
    Random(u64),
}

/// An infinite (or finite) sequence over `{b, c}`, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stream {
    prefix: Vec<Symbol>,
    generator: Generator,
}

/// Length of the longest common prefix of two streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Agreement {
    Finite(usize),
    Infinite,
}

impl Agreement {
    pub fn finite(self) -> Option<usize> {
        match self {
            Agreement::Finite(n) => Some(n),
            Agreement::Infinite => None,
        }
    }
}

/// Scan length after which two streams that are not provably equal are
/// reported as undecided.
pub const AGREEMENT_SCAN_CAP: usize = 1 << 16;

struct RandomBits {
    rng: ChaCha8Rng,
    word: u32,
    used: u32,
}

impl RandomBits {
    fn at(seed: u64, index: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos((index / 32) as u128);
        let word = rng.next_u32();
        let used = (index % 32) as u32;
        RandomBits { rng, word, used }
    }

    fn next_symbol(&mut self) -> Symbol {
        if self.used == 32 {
            self.word = self.rng.next_u32();
            self.used = 0;
        }
        let bit = (self.word >> self.used) & 1;
        self.used += 1;
        if bit == 1 {
            Symbol::C
        } else {
            Symbol::B
        }
    }
}

impl Stream {
    pub fn new(prefix: Vec<Symbol>, generator: Generator) -> Result<Self, Eg3Error> {
        if let Generator::Periodic(p) = &generator {
            if p.is_empty() {
                return Err(Eg3Error::Parse("periodic pattern must be nonempty".into()));
            }
        }
        Ok(Stream { prefix, generator })
    }

    pub fn finite(prefix: Vec<Symbol>) -> Self {
        Stream { prefix, generator: Generator::Finite }
    }

    pub fn constant(s: Symbol) -> Self {
        Stream { prefix: Vec::new(), generator: Generator::Periodic(vec![s]) }
    }

    pub fn periodic(prefix: Vec<Symbol>, pattern: Vec<Symbol>) -> Result<Self, Eg3Error> {
        Self::new(prefix, Generator::Periodic(pattern))
    }

    pub fn random(prefix: Vec<Symbol>, seed: u64) -> Self {
        Stream { prefix, generator: Generator::Random(seed) }
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Number of available symbols, `None` when unbounded.
    pub fn depth(&self) -> Option<usize> {
        match self.generator {
            Generator::Finite => Some(self.prefix.len()),
            _ => None,
        }
    }

    /// The symbol at 1-based position `k`.
    pub fn get(&self, k: usize) -> Result<Symbol, Eg3Error> {
        assert!(k >= 1, "stream positions start at 1");
        Ok(self.take_from(k, 1)?[0])
    }

    /// The first `n` symbols.
    pub fn take(&self, n: usize) -> Result<Vec<Symbol>, Eg3Error> {
        self.take_from(1, n)
    }

    /// Symbols at positions `start .. start + n` (1-based).
    pub fn take_from(&self, start: usize, n: usize) -> Result<Vec<Symbol>, Eg3Error> {
        let end = start + n - 1;
        if let Some(d) = self.depth() {
            if end > d && n > 0 {
                return Err(Eg3Error::InsufficientDepth { needed: end, available: d });
            }
        }
        let mut out = Vec::with_capacity(n);
        let mut random: Option<RandomBits> = None;
        for k in start..start + n {
            if k <= self.prefix.len() {
                out.push(self.prefix[k - 1]);
                continue;
            }
            match &self.generator {
                Generator::Finite => unreachable!("depth checked above"),
                Generator::Periodic(p) => out.push(p[(k - self.prefix.len() - 1) % p.len()]),
                Generator::Random(seed) => {
                    let bits = random.get_or_insert_with(|| RandomBits::at(*seed, k - 1));
                    out.push(bits.next_symbol());
                }
            }
        }
        Ok(out)
    }

    /// Position after which both streams are certainly equal forever, if
    /// their generators make that decidable.
    fn equal_beyond(&self, other: &Stream) -> Option<usize> {
        let start = self.prefix.len().max(other.prefix.len());
        match (&self.generator, &other.generator) {
            (Generator::Periodic(p), Generator::Periodic(q)) => Some(start + p.len().lcm(&q.len())),
            (Generator::Random(s), Generator::Random(t)) if s == t => Some(start),
            _ => None,
        }
    }

    pub fn agreement(&self, other: &Stream) -> Result<Agreement, Eg3Error> {
        self.agreement_with_cap(other, AGREEMENT_SCAN_CAP)
    }

    pub fn agreement_with_cap(&self, other: &Stream, cap: usize) -> Result<Agreement, Eg3Error> {
        let provable = self.equal_beyond(other);
        let limit = match (self.depth(), other.depth()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => provable.unwrap_or(cap),
        };
        const CHUNK: usize = 256;
        let mut k = 1;
        while k <= limit {
            let n = CHUNK.min(limit - k + 1);
            let xs = self.take_from(k, n)?;
            let ys = other.take_from(k, n)?;
            if let Some(i) = xs.iter().zip(&ys).position(|(x, y)| x != y) {
                return Ok(Agreement::Finite(k - 1 + i));
            }
            k += n;
        }
        if provable.is_some() && self.depth().is_none() && other.depth().is_none() {
            return Ok(Agreement::Infinite);
        }
        if self.depth().is_some() || other.depth().is_some() {
            Err(Eg3Error::InsufficientDepth { needed: limit + 1, available: limit })
        } else {
            Err(Eg3Error::UndecidedAgreement { scanned: limit })
        }
    }

    /// Parses `bcb` (finite), `bc(cb)` (prefix then periodic pattern) or
    /// `bc~42` (prefix then seeded random symbols).
    pub fn parse(text: &str) -> Result<Self, Eg3Error> {
        let text = text.trim();
        let syms = |s: &str| -> Result<Vec<Symbol>, Eg3Error> {
            s.chars()
                .map(|ch| Symbol::from_char(ch).ok_or_else(|| Eg3Error::Parse(format!("'{ch}' is not b or c"))))
                .collect()
        };
        if let Some((prefix, seed)) = text.split_once('~') {
            let seed = seed.parse::<u64>().map_err(|e| Eg3Error::Parse(format!("seed '{seed}': {e}")))?;
            return Ok(Stream::random(syms(prefix)?, seed));
        }
        if let Some((prefix, rest)) = text.split_once('(') {
            let pattern = rest
                .strip_suffix(')')
                .ok_or_else(|| Eg3Error::Parse(format!("unclosed pattern in '{text}'")))?;
            return Stream::periodic(syms(prefix)?, syms(pattern)?);
        }
        Ok(Stream::finite(syms(text)?))
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chars = |s: &[Symbol]| s.iter().map(|x| x.as_char()).collect::<String>();
        write!(f, "{}", chars(&self.prefix))?;
        match &self.generator {
            Generator::Finite => Ok(()),
            Generator::Periodic(p) => write!(f, "({})", chars(p)),
            Generator::Random(seed) => write!(f, "~{seed}"),
        }
    }
}
