use super::embed::{phi_distance, psi_difference};
use super::metric::rho_fast;
use super::{BoundaryPoint, Eg3Error, Stream, Symbol};
use crate::rational::Rational;
use crate::smc::SeedRng;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rayon::prelude::*;

/// Binary precision of sampled ratios.
const LAMBDA_BITS: u32 = 32;
/// Longest shared prefix used by nested and perturbed pairs.
const MAX_SHARED: usize = 40;
/// Bits of the Cantor coordinate compared before a pair counts as unresolved.
const PHI_BITS: usize = 8192;

/// How a sampled pair was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Unrelated ratios and streams.
    Independent,
    /// Same ratio, streams sharing prefixes of random length.
    Nested,
    /// Ratios `2^-k` apart, streams sharing prefixes of random length.
    Perturbed,
}

fn dyadic(rng: &mut SeedRng) -> Rational {
    let den = 1u64 << LAMBDA_BITS;
    // endpoints get extra mass so the one-stream cases are exercised
    match rng.random_range(0..40) {
        0 => Rational::zero(),
        1 => Rational::one(),
        _ => Rational::new(rng.random_range(1..den).into(), den.into()),
    }
}

fn symbols(rng: &mut SeedRng, n: usize) -> Vec<Symbol> {
    (0..n).map(|_| if rng.random::<bool>() { Symbol::C } else { Symbol::B }).collect()
}

fn flip(s: Symbol) -> Symbol {
    match s {
        Symbol::B => Symbol::C,
        Symbol::C => Symbol::B,
    }
}

/// Two streams agreeing on exactly `shared` symbols, or identical when
/// `shared` is `None`.
fn stream_pair(rng: &mut SeedRng, shared: Option<usize>) -> (Stream, Stream) {
    let (s1, s2) = (rng.random::<u64>(), rng.random::<u64>());
    match shared {
        None => {
            let s = Stream::random(symbols(rng, 4), s1);
            (s.clone(), s)
        }
        Some(n) => {
            let mut p = symbols(rng, n + 1);
            let a = Stream::random(p.clone(), s1);
            p[n] = flip(p[n]);
            (a, Stream::random(p, s2))
        }
    }
}

fn assemble(lambda: Rational, left: Stream, right: Stream) -> BoundaryPoint {
    let l = (!lambda.is_zero()).then_some(left);
    let r = (lambda < Rational::one()).then_some(right);
    BoundaryPoint::new(lambda, l, r).expect("presence follows lambda")
}

/// The `index`-th pair of the deterministic sample for `seed`.
pub fn sample_pair(seed: u64, index: u64) -> (BoundaryPoint, BoundaryPoint, PairKind) {
    let mut rng = SeedRng::seed_from_u64(seed);
    rng.set_stream(index);
    let kind = match rng.random_range(0..4) {
        0 => PairKind::Independent,
        1 | 2 => PairKind::Nested,
        _ => PairKind::Perturbed,
    };
    let lambda = dyadic(&mut rng);
    let mu = match kind {
        PairKind::Independent => dyadic(&mut rng),
        PairKind::Nested => lambda.clone(),
        PairKind::Perturbed => {
            let k = rng.random_range(2..=30u32);
            let step = Rational::new(1.into(), (1u64 << k).into());
            let up = &lambda + &step;
            if up <= Rational::one() && (rng.random::<bool>() || lambda < step) {
                up
            } else {
                &lambda - &step
            }
        }
    };
    let shared = |rng: &mut SeedRng| match kind {
        PairKind::Independent => Some(rng.random_range(0..2)),
        _ if rng.random_range(0..10) == 0 => None,
        _ => Some(rng.random_range(0..=MAX_SHARED)),
    };
    let (nl, nr) = (shared(&mut rng), shared(&mut rng));
    let (l1, l2) = stream_pair(&mut rng, nl);
    let (r1, r2) = stream_pair(&mut rng, nr);
    (assemble(lambda, l1, r1), assemble(mu, l2, r2), kind)
}

/// Growth of `log2(d^r / ρ)` along pairs that share ever longer prefixes on
/// one side at a fixed ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct NestingTrend {
    pub r: f64,
    pub lambda: f64,
    /// `"left"` or `"right"`: the side whose shared prefix grows.
    pub side: &'static str,
    pub points: Vec<(usize, f64)>,
    /// Least-squares slope of the points; a nonzero slope means the ratio
    /// is unbounded in one direction.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub pairs: usize,
    /// Pairs with `ρ = 0` or an unresolved Cantor coordinate.
    pub skipped: usize,
    /// `sup ρ / d(Φξ, Φη)`.
    pub sup_rho_over_phi: f64,
    /// `inf` and `sup` of `ρ / ‖Ψξ - Ψη‖₂`.
    pub inf_rho_over_psi: f64,
    pub sup_rho_over_psi: f64,
    pub trends: Vec<NestingTrend>,
}

struct PairRatios {
    phi: Option<f64>,
    psi: Option<f64>,
}

fn pair_ratios(xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<PairRatios, Eg3Error> {
    let rho = rho_fast(xi, eta)?;
    if rho == 0.0 || !rho.is_normal() {
        return Ok(PairRatios { phi: None, psi: None });
    }
    let phi = phi_distance(xi, eta, PHI_BITS)?.map(|d| rho / d);
    let (n, m) = super::metric::agreements(xi, eta)?;
    let depth = n.finite().unwrap_or(0).max(m.finite().unwrap_or(0));
    let d = psi_difference(xi, eta, depth + 80)?;
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    let psi = (norm.is_normal()).then(|| rho / norm);
    Ok(PairRatios { phi, psi })
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn nesting_trends() -> Result<Vec<NestingTrend>, Eg3Error> {
    let lambdas = [Rational::new(1.into(), 2.into()), Rational::new(1.into(), 8.into()), Rational::new(1.into(), 1024.into())];
    let depths = [4usize, 8, 12, 16, 20, 24];
    let mut out = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        for lam in &lambdas {
            for side in ["left", "right"] {
                let mut points = Vec::new();
                for &j in &depths {
                    let mut differ = vec![Symbol::B; j];
                    differ.push(Symbol::C);
                    let base = Stream::constant(Symbol::B);
                    let other = Stream::periodic(differ, vec![Symbol::B])?;
                    let (xi, eta) = if side == "left" {
                        (assemble(lam.clone(), base.clone(), base.clone()), assemble(lam.clone(), other, base))
                    } else {
                        (assemble(lam.clone(), base.clone(), base.clone()), assemble(lam.clone(), base, other))
                    };
                    let rho = rho_fast(&xi, &eta)?;
                    let d = phi_distance(&xi, &eta, PHI_BITS)?.expect("streams differ");
                    points.push((j, r * d.log2() - rho.log2()));
                }
                let fit: Vec<(f64, f64)> = points.iter().map(|&(j, v)| (j as f64, v)).collect();
                out.push(NestingTrend {
                    r,
                    lambda: crate::rational::to_f64(lam),
                    side,
                    slope: least_squares_slope(&fit).unwrap_or(0.0),
                    points,
                });
            }
        }
    }
    Ok(out)
}

/// Compares the boundary metric with the Cantor-coordinate and Euclidean
/// models on `pairs` sampled pairs.
pub fn lipschitz_scan(pairs: usize, seed: u64) -> Result<LipschitzReport, Eg3Error> {
    if pairs == 0 {
        return Err(Eg3Error::InvalidArgument("pairs must be at least 1".into()));
    }
    let ratios = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let (xi, eta, _) = sample_pair(seed, i);
            pair_ratios(&xi, &eta)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = LipschitzReport {
        pairs,
        skipped: 0,
        sup_rho_over_phi: 0.0,
        inf_rho_over_psi: f64::INFINITY,
        sup_rho_over_psi: 0.0,
        trends: nesting_trends()?,
    };
    for r in ratios {
        match (r.phi, r.psi) {
            (Some(a), Some(b)) => {
                report.sup_rho_over_phi = report.sup_rho_over_phi.max(a);
                report.inf_rho_over_psi = report.inf_rho_over_psi.min(b);
                report.sup_rho_over_psi = report.sup_rho_over_psi.max(b);
            }
            _ => report.skipped += 1,
        }
    }
    Ok(report)
}

/// Diameter under `ρ` of the set of points with ratio `λ` whose left and
/// right streams start with fixed words of lengths `i` and `j`.
pub fn fiber_diameter(lambda: f64, i: usize, j: usize) -> f64 {
    let s = 16.0 / ((3.0 + lambda) * (4.0 - lambda));
    let a = (lambda / 4.0).powi(i as i32 + 1);
    let b = ((1.0 - lambda) / 4.0).powi(j as i32 + 1);
    2.0 * s * (a + b - a * b)
}

/// `log 2 / log(4/λ) + log 2 / log(4/(1-λ))`, with a vanishing ratio
/// contributing nothing.
pub fn fiber_dimension(lambda: f64) -> f64 {
    let part = |x: f64| if x > 0.0 { std::f64::consts::LN_2 / (4.0 / x).ln() } else { 0.0 };
    part(lambda) + part(1.0 - lambda)
}

/// Box-counting estimate of the dimension of the fixed-`λ` fiber.
///
/// Cylinders of prefix lengths `(i, j) ≤ depth` are the covering sets: `N(ε)`
/// is the smallest count `2^(i+j)` among those with diameter at most `ε`,
/// and the estimate is the least-squares slope of `log N(ε)` against
/// `log(1/ε)` over `scales` log-spaced values of `ε`.
pub fn box_dimension(lambda: f64, depth: usize, scales: usize) -> Result<f64, Eg3Error> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Eg3Error::InvalidLambda(format!("{lambda} is outside [0, 1]")));
    }
    if depth < 2 || scales < 2 {
        return Err(Eg3Error::InvalidArgument("depth and scales must be at least 2".into()));
    }
    let rmax = (lambda / 4.0).max((1.0 - lambda) / 4.0);
    let top = fiber_diameter(lambda, 0, 0) * rmax;
    let bottom = fiber_diameter(lambda, depth, depth).max(top * rmax.powi(depth as i32 - 2));
    let (lt, lb) = (top.ln(), bottom.ln());
    let mut points = Vec::with_capacity(scales);
    for s in 0..scales {
        let eps = (lt + (lb - lt) * s as f64 / (scales - 1) as f64).exp();
        let mut best: Option<usize> = None;
        for i in 0..=depth {
            // diameters fall as j grows, so the first admissible j is the cheapest
            if let Some(j) = (0..=depth).find(|&j| fiber_diameter(lambda, i, j) <= eps) {
                best = Some(best.map_or(i + j, |b| b.min(i + j)));
            }
        }
        if let Some(k) = best {
            points.push((-eps.ln(), k as f64 * std::f64::consts::LN_2));
        }
    }
    let distinct = points.windows(2).any(|w| w[0].1 != w[1].1);
    match least_squares_slope(&points) {
        Some(slope) if distinct => Ok(slope),
        _ => Err(Eg3Error::DegenerateFit(format!("covering counts do not vary for lambda = {lambda}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        for i in 0..20 {
            assert_eq!(sample_pair(3, i), sample_pair(3, i));
        }
        assert_ne!(sample_pair(3, 0).0, sample_pair(4, 0).0);
    }

    #[test]
    fn nested_pairs_have_the_requested_agreement() {
        let mut seen_nested = false;
        for i in 0..200 {
            let (xi, eta, kind) = sample_pair(11, i);
            if kind == PairKind::Nested {
                seen_nested = true;
                assert_eq!(xi.lambda(), eta.lambda());
            }
            super::super::metric::agreements(&xi, &eta).unwrap();
        }
        assert!(seen_nested);
    }

    #[test]
    fn analytic_dimensions() {
        assert!((fiber_dimension(0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert!((fiber_dimension(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(fiber_dimension(0.1), fiber_dimension(0.9));
    }

    #[test]
    fn dimension_estimates() {
        for lam in [0.0, 0.5, 0.25, 0.1, 1.0] {
            let est = box_dimension(lam, 40, 30).unwrap();
            assert!((est - fiber_dimension(lam)).abs() < 0.05, "lambda {lam}: {est}");
        }
        assert_eq!(box_dimension(0.5, 1, 10).unwrap_err().name(), "InvalidArgument");
    }

    #[test]
    fn small_scan() {
        let r = lipschitz_scan(200, 5).unwrap();
        assert!(r.sup_rho_over_phi.is_finite() && r.sup_rho_over_phi > 0.0);
        assert!(r.inf_rho_over_psi > 0.0 && r.sup_rho_over_psi.is_finite());
        assert!(r.skipped < 200);
        assert_eq!(r.trends.len(), 18);
    }
}
