use super::{Agreement, BoundaryPoint, Eg3Error, Stream, Symbol};
use crate::rational::{self, int, Rational};
use num_traits::{One, Signed, Zero};
use num_bigint::BigInt;
use num_integer::Integer;

/// Double-sum cutoff for the floating-point evaluation; later terms are
/// below `4^-200` relative to the leading ones.
const F64_CUTOFF: usize = 200;
/// Largest double sum evaluated exactly inside [`rho`].
const EXACT_TERMS: usize = 4096;

fn side(a: Option<&Stream>, b: Option<&Stream>) -> Result<Agreement, Eg3Error> {
    match (a, b) {
        (Some(a), Some(b)) => a.agreement(b),
        // a missing side carries zero weight for every head (or tail) length
        _ => Ok(Agreement::Finite(0)),
    }
}

/// Left and right agreement lengths `(n, m)` of two boundary points.
pub fn agreements(xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<(Agreement, Agreement), Eg3Error> {
    Ok((side(xi.left(), eta.left())?, side(xi.right(), eta.right())?))
}

fn tail_exact(lambda: &Rational, n: usize, m: usize) -> Rational {
    let four = int(4);
    let a = rational::pow(&(lambda / &four), n as u32 + 1);
    let b = rational::pow(&((Rational::one() - lambda) / &four), m as u32 + 1);
    let scale = int(16) / ((int(3) + lambda) * (int(4) - lambda));
    scale * (&a + &b - &a * &b)
}

/// The boundary metric in exact arithmetic. `None` when a side has infinite
/// agreement, where the double sum does not terminate.
pub fn rho_exact(xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<Option<Rational>, Eg3Error> {
    let (n, m) = agreements(xi, eta)?;
    let (Agreement::Finite(n), Agreement::Finite(m)) = (n, m) else {
        return Ok(None);
    };
    Ok(Some(rho_exact_with(xi.lambda(), eta.lambda(), n, m)))
}

pub(crate) fn rho_exact_with(lambda: &Rational, mu: &Rational, n: usize, m: usize) -> Rational {
    let mut total = tail_exact(lambda, n, m) + tail_exact(mu, n, m);
    if lambda != mu {
        let common = lambda.denom().lcm(mu.denom());
        let p = scaled_cells(lambda, &common, n, m, n + m);
        let q = scaled_cells(mu, &common, n, m, n + m);
        let sum: BigInt = p.iter().flatten().zip(q.iter().flatten()).map(|(a, b)| (a - b).abs()).sum();
        total += Rational::new(sum, num_traits::pow(BigInt::from(4) * common, n + m));
    }
    total
}

fn rho_f64_with(lambda: f64, mu: f64, n: Agreement, m: Agreement) -> f64 {
    let tail = |l: f64| {
        let a = match n {
            Agreement::Finite(n) => (l / 4.0).powi(n as i32 + 1),
            Agreement::Infinite => 0.0,
        };
        let b = match m {
            Agreement::Finite(m) => ((1.0 - l) / 4.0).powi(m as i32 + 1),
            Agreement::Infinite => 0.0,
        };
        16.0 / ((3.0 + l) * (4.0 - l)) * (a + b - a * b)
    };
    let mut total = tail(lambda) + tail(mu);
    if lambda != mu {
        let nh = n.finite().unwrap_or(F64_CUTOFF).min(F64_CUTOFF);
        let mt = m.finite().unwrap_or(F64_CUTOFF).min(F64_CUTOFF);
        let powers = |x: f64, k: usize| -> Vec<f64> {
            std::iter::successors(Some(1.0), |p| Some(p * x)).take(k + 1).collect()
        };
        let (pla, plb) = (powers(lambda / 4.0, nh), powers((1.0 - lambda) / 4.0, mt));
        let (pma, pmb) = (powers(mu / 4.0, nh), powers((1.0 - mu) / 4.0, mt));
        for h in 0..=nh {
            for t in 0..=mt {
                total += (pla[h] * plb[t] - pma[h] * pmb[t]).abs();
            }
        }
    }
    total
}

/// The boundary metric `ρ(ξ, η)`.
///
/// With `n` and `m` the common prefix lengths of the left and right streams,
/// `ρ = Σ_{h≤n, t≤m} 4^-(h+t) |λ^h(1-λ)^t - μ^h(1-μ)^t| + T(λ) + T(μ)` where
/// `T(λ) = 16/((3+λ)(4-λ)) · (A + B - AB)`, `A = (λ/4)^(n+1)`, `B = ((1-λ)/4)^(m+1)`.
pub fn rho(xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<f64, Eg3Error> {
    let (n, m) = agreements(xi, eta)?;
    if let (Agreement::Finite(nf), Agreement::Finite(mf)) = (n, m) {
        if (nf + 1) * (mf + 1) <= EXACT_TERMS {
            return Ok(rational::to_f64(&rho_exact_with(xi.lambda(), eta.lambda(), nf, mf)));
        }
    }
    Ok(rho_f64_with(xi.lambda_f64(), eta.lambda_f64(), n, m))
}

/// Same as [`rho`] but always in floating point; used by the large scans.
pub fn rho_fast(xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<f64, Eg3Error> {
    let (n, m) = agreements(xi, eta)?;
    Ok(rho_f64_with(xi.lambda_f64(), eta.lambda_f64(), n, m))
}

/// A truncated direct sum with a certified bound on the omitted part.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated {
    pub value: Rational,
    pub tail_bound: Rational,
}

impl Truncated {
    pub fn value_f64(&self) -> f64 {
        rational::to_f64(&self.value)
    }

    pub fn tail_bound_f64(&self) -> f64 {
        rational::to_f64(&self.tail_bound)
    }

    /// Whether `x` lies within the certified interval.
    pub fn brackets(&self, x: &Rational) -> bool {
        (x - &self.value).abs() <= self.tail_bound
    }
}

/// `2 Σ_{s > depth} (s+1) 4^-s`: each point has one word `z` per `(h, t)`
/// with `w_z K(z, ·) ≤ 4^-(h+t)`, and there are `s+1` pairs with `h+t = s`.
pub fn theta_tail_bound(depth: usize) -> Rational {
    let x = Rational::new(1.into(), 4.into());
    let d = depth as i64;
    let one_minus = Rational::one() - &x;
    int(2) * rational::pow(&x, depth as u32 + 1) * (int(d + 2) - int(d + 1) * &x) / (&one_minus * &one_minus)
}

/// The first `depth` symbols of each stream, empty for an absent side.
fn prefixes(xi: &BoundaryPoint, depth: usize) -> Result<(Vec<Symbol>, Vec<Symbol>), Eg3Error> {
    let lambda = xi.lambda();
    let left = match xi.left() {
        Some(s) if lambda.is_positive() => s.take(depth)?,
        _ => Vec::new(),
    };
    let right = match xi.right() {
        Some(s) if *lambda < Rational::one() => s.take(depth)?,
        _ => Vec::new(),
    };
    Ok((left, right))
}

/// `x^0, .., x^depth`.
fn powers(x: &BigInt, depth: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(depth + 1);
    out.push(BigInt::one());
    for k in 0..depth {
        let next = &out[k] * x;
        out.push(next);
    }
    out
}

/// Weighted kernel values `λ^h (1-λ)^t 4^-(h+t)` for `h ≤ hmax`, `t ≤ tmax`,
/// `h + t ≤ exp`, as numerators over the common denominator `(4Q)^exp`
/// where `Q` is a multiple of the denominator of `λ`. Row `h` holds
/// `t = 0..=min(tmax, exp - h)`.
fn scaled_cells(lambda: &Rational, common: &BigInt, hmax: usize, tmax: usize, exp: usize) -> Vec<Vec<BigInt>> {
    let factor = common / lambda.denom();
    let a = lambda.numer() * &factor;
    let b = (lambda.denom() - lambda.numer()) * &factor;
    let c: BigInt = common * 4;
    let (pa, pb, pc) = (powers(&a, hmax), powers(&b, tmax), powers(&c, exp));
    (0..=hmax.min(exp))
        .map(|h| (0..=tmax.min(exp - h)).map(|t| &pa[h] * &pb[t] * &pc[exp - h - t]).collect())
        .collect()
}

/// Direct evaluation of `Σ_z 16·4^(-2|z|) |K(z, ξ) - K(z, η)|` over all
/// `z = H a T` with `h + t ≤ depth`.
///
/// Each point contributes one word per `(h, t)`: its own `h` left symbols and
/// `t` right symbols. The two words coincide exactly when the prefixes agree,
/// so the sum pairs cells by `(h, t)` instead of by word.
pub fn theta_boundary_truncated(xi: &BoundaryPoint, eta: &BoundaryPoint, depth: usize) -> Result<Truncated, Eg3Error> {
    let (lx, rx) = prefixes(xi, depth)?;
    let (ly, ry) = prefixes(eta, depth)?;
    let n = lx.iter().zip(&ly).take_while(|(a, b)| a == b).count();
    let m = rx.iter().zip(&ry).take_while(|(a, b)| a == b).count();
    let common = xi.lambda().denom().lcm(eta.lambda().denom());
    let p = scaled_cells(xi.lambda(), &common, depth, depth, depth);
    let q = scaled_cells(eta.lambda(), &common, depth, depth, depth);
    let mut total = BigInt::zero();
    for h in 0..=depth {
        for t in 0..=depth - h {
            let (a, b) = (&p[h][t], &q[h][t]);
            if h <= n && t <= m {
                total += (a - b).abs();
            } else {
                total += a + b;
            }
        }
    }
    let value = Rational::new(total, num_traits::pow(BigInt::from(4) * common, depth));
    Ok(Truncated { value, tail_bound: theta_tail_bound(depth) })
}
