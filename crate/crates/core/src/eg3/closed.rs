use super::{Eg3Error, Symbol, A};
use crate::rational::{self, Rational};
use crate::words::{anchor_decompose, Word};
use num_bigint::BigInt;
use num_traits::Zero;

/// A language word `z = H a T`, stored by its head `H` and tail `T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeadTail {
    pub head: Vec<Symbol>,
    pub tail: Vec<Symbol>,
}

fn symbols(w: &Word) -> Result<Vec<Symbol>, Eg3Error> {
    w.letters()
        .iter()
        .map(|&l| Symbol::from_letter(l).ok_or_else(|| Eg3Error::InvalidWord(format!("letter {} is not b or c", l.0))))
        .collect()
}

impl HeadTail {
    pub fn new(head: Vec<Symbol>, tail: Vec<Symbol>) -> Self {
        HeadTail { head, tail }
    }

    pub fn from_word(w: &Word) -> Result<Self, Eg3Error> {
        let anchored = anchor_decompose(w, A)?;
        Ok(HeadTail { head: symbols(&anchored.left)?, tail: symbols(&anchored.right)? })
    }

    pub fn h(&self) -> usize {
        self.head.len()
    }

    pub fn t(&self) -> usize {
        self.tail.len()
    }

    pub fn to_word(&self) -> Word {
        let mut letters: Vec<_> = self.head.iter().map(|s| s.letter()).collect();
        letters.push(A);
        letters.extend(self.tail.iter().map(|s| s.letter()));
        Word(letters)
    }
}

/// Splits `x = H L a R T` relative to `z`, returning `(l, r)`, or `None` when
/// `x` does not extend `z` on both sides.
fn split(z: &HeadTail, x: &Word) -> Result<Option<(u64, u64)>, Eg3Error> {
    let x = HeadTail::from_word(x)?;
    if x.head.starts_with(&z.head) && x.tail.ends_with(&z.tail) {
        Ok(Some(((x.h() - z.h()) as u64, (x.t() - z.t()) as u64)))
    } else {
        Ok(None)
    }
}

/// `G(HaT, x) = 4^-(l+r) · C(l+r, r)` when `x = H L a R T`, else 0.
pub fn green_closed(z: &HeadTail, x: &Word) -> Result<Rational, Eg3Error> {
    let Some((l, r)) = split(z, x)? else {
        return Ok(Rational::zero());
    };
    Ok(Rational::from_integer(rational::binomial(l + r, r)) * rational::pow4(-((l + r) as i64)))
}

/// `K(HaT, x) = 4^(h+t) (h+l)_h (t+r)_t / (h+t+l+r)_(h+t)` when `x = H L a R T`, else 0.
pub fn kernel_closed(z: &HeadTail, x: &Word) -> Result<Rational, Eg3Error> {
    let Some((l, r)) = split(z, x)? else {
        return Ok(Rational::zero());
    };
    let (h, t) = (z.h() as u64, z.t() as u64);
    let num: BigInt = rational::falling(h + l, h) * rational::falling(t + r, t);
    let den = rational::falling(h + t + l + r, h + t);
    Ok(Rational::new(num, den) * rational::pow4((h + t) as i64))
}
