use super::{BoundaryPoint, Eg3Error, Stream, Symbol};
use crate::rational::{self, Rational};
use crate::smc::SeedRng;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rayon::prelude::*;

/// Lazily produced bit sequence of the Cantor-coordinate map.
///
/// For `λ ≤ 1/2` the left stream occupies the sparse positions
/// `p_(k-1) = floor(k log2(4/λ))` and the right stream fills the rest in
/// order; for `λ > 1/2` the roles of the streams swap and `1 - λ` is used.
/// At `λ ∈ {0, 1}` only the present stream remains and fills every position.
pub struct PhiBits<'a> {
    sparse: Option<Reader<'a>>,
    dense: Option<Reader<'a>>,
    /// `(num, den)` of the effective ratio, when positive.
    ratio: Option<(BigUint, BigUint)>,
    num_pow: BigUint,
    rhs_pow: BigUint,
    next_sparse: Option<u64>,
    pos: u64,
}

struct Reader<'a> {
    stream: &'a Stream,
    buf: Vec<Symbol>,
    start: usize,
    next: usize,
}

impl<'a> Reader<'a> {
    fn new(stream: &'a Stream) -> Self {
        Reader { stream, buf: Vec::new(), start: 1, next: 1 }
    }

    fn next(&mut self) -> Result<Symbol, Eg3Error> {
        if self.next >= self.start + self.buf.len() {
            let chunk = match self.stream.depth() {
                Some(d) if d < self.next => 1,
                Some(d) => (d - self.next + 1).min(256),
                None => 256,
            };
            self.buf = self.stream.take_from(self.next, chunk)?;
            self.start = self.next;
        }
        let s = self.buf[self.next - self.start];
        self.next += 1;
        Ok(s)
    }
}

impl<'a> PhiBits<'a> {
    pub fn new(xi: &'a BoundaryPoint) -> Self {
        let half = Rational::new(1.into(), 2.into());
        let lambda = xi.lambda();
        let (eff, sparse, dense) = if *lambda <= half {
            (lambda.clone(), xi.left(), xi.right())
        } else {
            (Rational::one() - lambda, xi.right(), xi.left())
        };
        let ratio = (!eff.is_zero()).then(|| {
            (
                eff.numer().to_biguint().expect("positive"),
                eff.denom().to_biguint().expect("positive"),
            )
        });
        let mut bits = PhiBits {
            sparse: sparse.map(Reader::new),
            dense: dense.map(Reader::new),
            ratio,
            num_pow: BigUint::one(),
            rhs_pow: BigUint::one(),
            next_sparse: None,
            pos: 0,
        };
        bits.advance_sparse();
        bits
    }

    /// Computes the next sparse position `max{p : 2^p num^k ≤ 4^k den^k}`.
    fn advance_sparse(&mut self) {
        let Some((num, den)) = &self.ratio else {
            return;
        };
        self.num_pow *= num;
        self.rhs_pow *= den * 4u32;
        let c = self.rhs_pow.bits() as i64 - self.num_pow.bits() as i64;
        let p = if c >= 0 && (&self.num_pow << c as u64) <= self.rhs_pow { c } else { c - 1 };
        self.next_sparse = Some(p as u64);
    }
}

impl Iterator for PhiBits<'_> {
    type Item = Result<u8, Eg3Error>;

    fn next(&mut self) -> Option<Self::Item> {
        let sym = if self.next_sparse == Some(self.pos) {
            self.advance_sparse();
            self.sparse.as_mut().expect("sparse stream present when ratio > 0").next()
        } else {
            self.dense.as_mut().expect("dense stream present when ratio < 1").next()
        };
        self.pos += 1;
        Some(sym.map(Symbol::bit))
    }
}

pub fn phi_bits(xi: &BoundaryPoint) -> PhiBits<'_> {
    PhiBits::new(xi)
}

/// `Φ(ξ)` truncated to `out_depth` bits.
pub fn phi(xi: &BoundaryPoint, out_depth: usize) -> Result<(f64, Vec<u8>), Eg3Error> {
    let bits = phi_bits(xi).take(out_depth).collect::<Result<Vec<_>, _>>()?;
    Ok((xi.lambda_f64(), bits))
}

/// `|λ - μ| + 2^-i` with `i` the first index where the bit sequences differ,
/// or `None` when the first `max_bits` bits coincide.
pub fn phi_distance(xi: &BoundaryPoint, eta: &BoundaryPoint, max_bits: usize) -> Result<Option<f64>, Eg3Error> {
    let gap = rational::to_f64(&(xi.lambda() - eta.lambda())).abs();
    for (i, (a, b)) in phi_bits(xi).zip(phi_bits(eta)).take(max_bits).enumerate() {
        if a? != b? {
            return Ok(Some(gap + 2f64.powi(-(i as i32))));
        }
    }
    Ok(None)
}

/// A point of the Euclidean model of the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedPoint {
    pub lambda: f64,
    pub y: f64,
    pub z: f64,
}

impl EmbeddedPoint {
    /// Whether `y ∈ [λ/(4-λ), 3λ/(4-λ)]` and `z ∈ [(1-λ)/(3+λ), 3(1-λ)/(3+λ)]`.
    pub fn in_bounds(&self) -> bool {
        let (ylo, yhi) = coordinate_bounds(self.lambda);
        let (zlo, zhi) = coordinate_bounds(1.0 - self.lambda);
        (0.0..=1.0).contains(&self.lambda) && (ylo..=yhi).contains(&self.y) && (zlo..=zhi).contains(&self.z)
    }
}

/// `[x/(4-x), 3x/(4-x)]`, the range of `Σ d_k (x/4)^k` with digits in {1, 3}.
pub fn coordinate_bounds(x: f64) -> (f64, f64) {
    (x / (4.0 - x), 3.0 * x / (4.0 - x))
}

/// `Ψ(ξ)` from the first `terms` digits of each stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiImage {
    pub point: EmbeddedPoint,
    /// Per-coordinate bound on `|computed - exact|` for `y` and `z`:
    /// `3 r^(terms+1) / (1 - r)` plus a few ulps of rounding.
    pub error: [f64; 2],
}

fn series(x: f64, stream: Option<&Stream>, terms: usize) -> Result<(f64, f64), Eg3Error> {
    let (lo, hi) = coordinate_bounds(x);
    let r = x / 4.0;
    let mut extra = 0.0;
    if let (Some(s), true) = (stream, x > 0.0) {
        let digits = s.take(terms)?;
        let mut rk = 1.0;
        for d in digits {
            rk *= r;
            if d == Symbol::C {
                extra += 2.0 * rk;
            }
        }
    }
    // `lo` accounts for the digit 1 in every position; only the surplus
    // of the digit 3 is truncated. Rounding can carry a run of 3s one ulp
    // past the closed upper edge.
    let value = (lo + extra).min(hi);
    let err = if x > 0.0 { 3.0 * r.powi(terms as i32 + 1) / (1.0 - r) } else { 0.0 };
    Ok((value, err + 8.0 * f64::EPSILON * hi))
}

pub fn psi(xi: &BoundaryPoint, terms: usize) -> Result<PsiImage, Eg3Error> {
    let lambda = xi.lambda_f64();
    let mu = rational::to_f64(&(Rational::one() - xi.lambda()));
    let (y, ey) = series(lambda, xi.left(), terms)?;
    let (z, ez) = series(mu, xi.right(), terms)?;
    Ok(PsiImage { point: EmbeddedPoint { lambda, y, z }, error: [ey, ez] })
}

/// Termwise `Ψ(ξ) - Ψ(η)` over `terms` digits, accurate even when the two
/// images agree to far more digits than an `f64` carries.
pub fn psi_difference(xi: &BoundaryPoint, eta: &BoundaryPoint, terms: usize) -> Result<[f64; 3], Eg3Error> {
    let one = Rational::one();
    let d_lambda = xi.lambda() - eta.lambda();
    let dy = series_difference(xi.lambda(), eta.lambda(), xi.left(), eta.left(), terms)?;
    let dz = series_difference(&(&one - xi.lambda()), &(&one - eta.lambda()), xi.right(), eta.right(), terms)?;
    Ok([rational::to_f64(&d_lambda), dy, dz])
}

fn series_difference(
    x: &Rational,
    u: &Rational,
    xs: Option<&Stream>,
    us: Option<&Stream>,
    terms: usize,
) -> Result<f64, Eg3Error> {
    let four = Rational::from_integer(4.into());
    // x/(4-x) - u/(4-u) = 4(x-u)/((4-x)(4-u))
    let base = rational::to_f64(&(&four * (x - u) / ((&four - x) * (&four - u))));
    let digits = |s: Option<&Stream>, ratio: &Rational| -> Result<Vec<u8>, Eg3Error> {
        match s {
            Some(s) if !ratio.is_zero() => Ok(s.take(terms)?.into_iter().map(Symbol::bit).collect()),
            _ => Ok(vec![0; terms]),
        }
    };
    let (dx, du) = (digits(xs, x)?, digits(us, u)?);
    let r = rational::to_f64(&(x / &four));
    let s = rational::to_f64(&(u / &four));
    let delta = rational::to_f64(&((x - u) / &four));
    // rk = r^k, sk = s^k, gap = r^k - s^k = r·gap_(k-1) + (r - s)·s^(k-1)
    let (mut rk, mut sk, mut gap) = (1.0, 1.0, 0.0);
    let mut extra = 0.0;
    for k in 0..terms {
        gap = r * gap + delta * sk;
        rk *= r;
        sk *= s;
        extra += 2.0
            * match (dx[k], du[k]) {
                (1, 1) => gap,
                (1, 0) => rk,
                (0, 1) => -sk,
                _ => 0.0,
            };
    }
    Ok(base + extra)
}

pub const CLOUD_HEADER: &str = "lambda,y,z";
const CLOUD_CHUNK: usize = 2048;

/// Samples `samples` boundary points (uniform `λ`, uniform streams) and
/// renders their images as CSV, one row per sample.
///
/// Chunk `c` of the output always comes from ChaCha8 stream `c` of `seed`,
/// so the result does not depend on the number of worker threads.
pub fn generate_cloud(samples: usize, terms: usize, seed: u64) -> Result<String, Eg3Error> {
    let chunks: Vec<usize> = (0..samples.div_ceil(CLOUD_CHUNK)).collect();
    let rendered = chunks
        .par_iter()
        .map(|&c| {
            let mut rng = SeedRng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CLOUD_CHUNK.min(samples - c * CLOUD_CHUNK);
            let mut out = String::with_capacity(count * 72);
            for _ in 0..count {
                let lambda: f64 = rng.random();
                let mut draw = || -> Vec<Symbol> {
                    (0..terms).map(|_| if rng.random::<bool>() { Symbol::C } else { Symbol::B }).collect()
                };
                let (left, right) = (draw(), draw());
                let lam = rational::from_f64(lambda).expect("finite");
                let xi = BoundaryPoint::new(
                    lam,
                    (lambda > 0.0).then(|| Stream::finite(left)),
                    Some(Stream::finite(right)),
                )?;
                let p = psi(&xi, terms)?.point;
                out.push_str(&format!(
                    "{},{},{}\n",
                    rational::format_f64(p.lambda),
                    rational::format_f64(p.y),
                    rational::format_f64(p.z)
                ));
            }
            Ok(out)
        })
        .collect::<Result<Vec<String>, Eg3Error>>()?;
    let mut csv = String::from(CLOUD_HEADER);
    csv.push('\n');
    for chunk in rendered {
        csv.push_str(&chunk);
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> BoundaryPoint {
        BoundaryPoint::parse(text).unwrap()
    }

    fn sparse_positions(lambda: &str, count: usize) -> Vec<usize> {
        // mark the left stream with c and the right with b
        let xi = p(&format!("{lambda},(c),(b)"));
        let bits: Vec<u8> = phi_bits(&xi).take(400).map(Result::unwrap).collect();
        bits.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).take(count).collect()
    }

    #[test]
    fn positions_at_half() {
        assert_eq!(sparse_positions("1/2", 4), vec![3, 6, 9, 12]);
    }

    #[test]
    fn positions_match_float_floor() {
        for (lam, x) in [("1/8", 0.125f64), ("1/3", 1.0 / 3.0), ("1/100", 0.01)] {
            let expected: Vec<usize> = (1..=10).map(|k| (k as f64 * (4.0 / x).log2()).floor() as usize).collect();
            assert_eq!(sparse_positions(lam, 10), expected, "lambda {lam}");
        }
    }

    #[test]
    fn zero_lambda_uses_right_stream() {
        let (_, bits) = phi(&p("0,-,cbc(b)"), 5).unwrap();
        assert_eq!(bits, vec![1, 0, 1, 0, 0]);
        let (_, bits) = phi(&p("1,cbc(b),-"), 5).unwrap();
        assert_eq!(bits, vec![1, 0, 1, 0, 0]);
    }

    #[test]
    fn role_swap() {
        let (_, a) = phi(&p("3/4,cb~1,b~2"), 200).unwrap();
        let (_, b) = phi(&p("1/4,b~2,cb~1"), 200).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn psi_limits() {
        let img = psi(&p("1/2,(b),(b)"), 60).unwrap();
        assert!((img.point.y - 1.0 / 7.0).abs() < 1e-15 && (img.point.z - 1.0 / 7.0).abs() < 1e-15);
        let img = psi(&p("1/2,(c),(c)"), 60).unwrap();
        assert!((img.point.y - 3.0 / 7.0).abs() < 1e-15 && (img.point.z - 3.0 / 7.0).abs() < 1e-15);
        assert_eq!(psi(&p("0,-,(c)"), 10).unwrap().point.y, 0.0);
        assert!(psi(&p("1/2,(c),(c)"), 60).unwrap().point.in_bounds());
    }

    #[test]
    fn psi_difference_matches_subtraction() {
        let (x, y) = (p("1/3,cb~1,b~2"), p("2/7,c~3,bb~2"));
        let (a, b) = (psi(&x, 50).unwrap().point, psi(&y, 50).unwrap().point);
        let d = psi_difference(&x, &y, 50).unwrap();
        assert!((d[0] - (a.lambda - b.lambda)).abs() < 1e-15);
        assert!((d[1] - (a.y - b.y)).abs() < 1e-15);
        assert!((d[2] - (a.z - b.z)).abs() < 1e-15);
    }

    #[test]
    fn cloud_basics() {
        assert_eq!(generate_cloud(0, 30, 1).unwrap(), "lambda,y,z\n");
        let a = generate_cloud(5000, 30, 7).unwrap();
        assert_eq!(a, generate_cloud(5000, 30, 7).unwrap());
        assert_eq!(a.lines().count(), 5001);
        assert_ne!(a, generate_cloud(5000, 30, 8).unwrap());
    }
}
