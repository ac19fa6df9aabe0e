use super::{Eg3Error, HeadTail, Stream, A};
use crate::rational::{self, Rational};
use crate::words::Word;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// A point of the boundary: ratio `λ` plus the streams that carry weight.
/// The left stream exists iff `λ > 0`, the right stream iff `λ < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    lambda: Rational,
    left: Option<Stream>,
    right: Option<Stream>,
}

impl BoundaryPoint {
    pub fn new(lambda: Rational, left: Option<Stream>, right: Option<Stream>) -> Result<Self, Eg3Error> {
        if lambda.is_negative() || lambda > Rational::one() {
            return Err(Eg3Error::InvalidLambda(format!("{} is outside [0, 1]", rational::format(&lambda))));
        }
        if left.is_some() != lambda.is_positive() {
            return Err(Eg3Error::StreamPresence(format!(
                "left stream must be {} when lambda = {}",
                if lambda.is_positive() { "present" } else { "absent" },
                rational::format(&lambda)
            )));
        }
        if right.is_some() != (lambda < Rational::one()) {
            return Err(Eg3Error::StreamPresence(format!(
                "right stream must be {} when lambda = {}",
                if lambda < Rational::one() { "present" } else { "absent" },
                rational::format(&lambda)
            )));
        }
        Ok(BoundaryPoint { lambda, left, right })
    }

    /// Parses `lambda,L,R`, where an absent stream is written `-`.
    pub fn parse(text: &str) -> Result<Self, Eg3Error> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [lam, l, r] = parts.as_slice() else {
            return Err(Eg3Error::Parse(format!("expected 'lambda,L,R', got '{text}'")));
        };
        let lambda = rational::parse(lam).ok_or_else(|| Eg3Error::Parse(format!("bad lambda '{lam}'")))?;
        let side = |s: &str| -> Result<Option<Stream>, Eg3Error> {
            if s == "-" {
                Ok(None)
            } else {
                Stream::parse(s).map(Some)
            }
        };
        Self::new(lambda, side(l)?, side(r)?)
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn lambda_f64(&self) -> f64 {
        rational::to_f64(&self.lambda)
    }

    pub fn left(&self) -> Option<&Stream> {
        self.left.as_ref()
    }

    pub fn right(&self) -> Option<&Stream> {
        self.right.as_ref()
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &Option<Stream>| s.as_ref().map_or("-".to_string(), |s| s.to_string());
        write!(f, "{},{},{}", rational::format(&self.lambda), side(&self.left), side(&self.right))
    }
}

/// `λ^h (1-λ)^t` with `0^0 = 1`.
pub(crate) fn mass(lambda: &Rational, h: usize, t: usize) -> Rational {
    rational::pow(lambda, h as u32) * rational::pow(&(Rational::one() - lambda), t as u32)
}

/// Limit of `K(z, x_n)` along any sequence converging to `xi`.
pub fn kernel_at_boundary(z: &HeadTail, xi: &BoundaryPoint) -> Result<Rational, Eg3Error> {
    let (h, t) = (z.h(), z.t());
    let m = mass(&xi.lambda, h, t);
    if m.is_zero() {
        return Ok(m);
    }
    // m > 0 forces every stream with a nonzero requested length to be present
    if h > 0 && xi.left.as_ref().expect("present when lambda > 0").take(h)? != z.head {
        return Ok(Rational::zero());
    }
    if t > 0 {
        let mut tail = z.tail.clone();
        tail.reverse();
        if xi.right.as_ref().expect("present when lambda < 1").take(t)? != tail {
            return Ok(Rational::zero());
        }
    }
    Ok(m * rational::pow4((h + t) as i64))
}

/// The word `L_n a R_n` with `|L_n| = round(λ n)` and `|L_n| + |R_n| = n`.
pub fn converge_to_boundary(xi: &BoundaryPoint, n: usize) -> Result<Word, Eg3Error> {
    let scaled = &xi.lambda * Rational::from_integer(n.into()) + Rational::new(1.into(), 2.into());
    let l = scaled.numer().div_floor(scaled.denom()).to_usize().expect("bounded by n");
    let r = n - l;
    let mut letters = Vec::with_capacity(n + 1);
    if l > 0 {
        letters.extend(xi.left.as_ref().expect("l > 0 needs lambda > 0").take(l)?.iter().map(|s| s.letter()));
    }
    letters.push(A);
    if r > 0 {
        let right = xi.right.as_ref().expect("r > 0 needs lambda < 1").take(r)?;
        letters.extend(right.iter().rev().map(|s| s.letter()));
    }
    Ok(Word(letters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eg3::{kernel_closed, Symbol};
    use crate::rational::{int, ratio};
    use crate::smc::preset;

    fn p(text: &str) -> BoundaryPoint {
        BoundaryPoint::parse(text).unwrap()
    }

    #[test]
    fn presence_rules() {
        assert_eq!(BoundaryPoint::parse("0,b,(b)").unwrap_err().name(), "StreamPresence");
        assert_eq!(BoundaryPoint::parse("1,(b),c").unwrap_err().name(), "StreamPresence");
        assert_eq!(BoundaryPoint::parse("1/2,-,(b)").unwrap_err().name(), "StreamPresence");
        assert_eq!(BoundaryPoint::parse("3/2,(b),(b)").unwrap_err().name(), "InvalidLambda");
        assert_eq!(BoundaryPoint::parse("1/2,(b)").unwrap_err().name(), "ParseError");
        assert_eq!(p("0.25,bc~3,(c)").to_string(), "1/4,bc~3,(c)");
    }

    #[test]
    fn boundary_kernel() {
        let z = |h: &[Symbol], t: &[Symbol]| HeadTail::new(h.to_vec(), t.to_vec());
        use Symbol::{B, C};
        assert_eq!(kernel_at_boundary(&z(&[], &[]), &p("1/3,(c),(b)")).unwrap(), int(1));
        assert_eq!(kernel_at_boundary(&z(&[B], &[]), &p("1/2,b(c),(c)")).unwrap(), int(2));
        assert_eq!(kernel_at_boundary(&z(&[C], &[]), &p("1/2,b(c),(c)")).unwrap(), int(0));
        assert_eq!(kernel_at_boundary(&z(&[B], &[]), &p("0,-,(b)")).unwrap(), int(0));
        // tail is read inside-out, the stream outside-in
        assert_eq!(kernel_at_boundary(&z(&[], &[B, C]), &p("1/4,(b),cb(b)")).unwrap(), ratio(9, 1));
        assert_eq!(kernel_at_boundary(&z(&[], &[C, B]), &p("1/4,(b),cb(b)")).unwrap(), int(0));
        assert_eq!(kernel_at_boundary(&z(&[B, B], &[]), &p("1/2,b,(b)")).unwrap_err().name(), "InsufficientDepth");
        assert_eq!(kernel_at_boundary(&z(&[], &[B]), &p("1,(b),-")).unwrap(), int(0));
    }

    #[test]
    fn rays() {
        let eg3 = preset("eg3").unwrap();
        assert_eq!(eg3.render(&converge_to_boundary(&p("1/2,(b),(b)"), 2).unwrap()), "bab");
        assert_eq!(eg3.render(&converge_to_boundary(&p("0,-,cbb(b)"), 3).unwrap()), "abbc");
        assert_eq!(eg3.render(&converge_to_boundary(&p("1,bcc,-"), 3).unwrap()), "bcca");
        let xi = p("1/3,(bc),~4");
        let z = HeadTail::new(vec![Symbol::B], vec![]);
        let limit = kernel_at_boundary(&z, &xi).unwrap();
        let near = kernel_closed(&z, &converge_to_boundary(&xi, 300).unwrap()).unwrap();
        assert!((rational::to_f64(&near) - rational::to_f64(&limit)).abs() < 1e-2);
    }
}
