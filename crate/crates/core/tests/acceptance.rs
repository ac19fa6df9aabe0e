//! Acceptance gate. Each test checks one criterion and writes a single
//! `criterion N: PASS|FAIL ...` line to stderr, uncaptured, so the verdicts
//! show up in ordinary `cargo test` output.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smc::eg3::{self, BoundaryPoint, EmbeddedPoint, HeadTail, Stream, Symbol};
use smc::harmonic::{self, Hypothesis, HarmonicError};
use smc::martin::{self, theta_between, DefaultWeights, KernelProfile, MartinContext};
use smc::rational::{self, int, ratio, Rational};
use smc::smc::{enumerate_language, preset, preset_with, simulate};
use smc::spectral;
use smc::words::{Letter, Word};
use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

fn report(id: u32, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {id:>2}: {verdict}  {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn gate(id: u32, pass: bool, detail: String) {
    report(id, pass, detail.clone());
    assert!(pass, "criterion {id}: {detail}");
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = smc::cli::run(std::iter::once("smc").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn criterion_01_frequency_matrix_of_eg2() {
    let start = Instant::now();
    let (code, text) = run_cli(&["freq", "eg2"]);
    let m = preset("eg2").unwrap();
    let fm = spectral::frequency_matrix(&m);
    let perron = spectral::perron_frequencies(&fm).unwrap();
    let elapsed = start.elapsed();
    let matrix_ok = fm.entries == vec![vec![ratio(3, 2), int(1)], vec![ratio(1, 2), int(1)]];
    let exact_ok = perron.exact == Some((int(2), vec![ratio(2, 3), ratio(1, 3)]));
    let text_ok = text.contains("M = [[3/2,1],[1/2,1]]") && text.contains("e = (2/3, 1/3)");
    let pass = code == 0 && matrix_ok && exact_ok && text_ok && elapsed < Duration::from_secs(1);
    gate(
        1,
        pass,
        format!("matrix {matrix_ok}, eigenpair {exact_ok}, printed {text_ok}, {:.3}s < 1s", secs(elapsed)),
    );
}

#[test]
fn criterion_02_empirical_frequency() {
    let start = Instant::now();
    let m = preset("eg2").unwrap();
    let a = m.parse_word("a").unwrap();
    let freq = spectral::empirical_frequency(&m, &a, 15, 200, 2024).unwrap();
    let elapsed = start.elapsed();
    let gap = (freq[0] - 2.0 / 3.0).abs();
    gate(
        2,
        gap <= 0.05 && elapsed < Duration::from_secs(10),
        format!("mean frequency of a = {:.6}, |gap| = {gap:.2e} <= 0.05, {:.2}s < 10s", freq[0], secs(elapsed)),
    );
}

#[test]
fn criterion_03_closed_forms_match_engine() {
    let start = Instant::now();
    let m = preset("eg3").unwrap();
    let ctx = MartinContext::for_model(&m, 8).unwrap();
    let words: Vec<Word> = ctx.words().to_vec();
    let heads: Vec<HeadTail> = words.iter().map(|w| HeadTail::from_word(w).unwrap()).collect();
    let mut compared = 0usize;
    let mut mismatches = 0usize;
    for x in &words {
        let column = ctx.green_column(x).unwrap();
        let profile = ctx.kernel_profile(x).unwrap();
        for (z, zt) in words.iter().zip(&heads) {
            if z.len() > x.len() {
                continue;
            }
            let g = column.get(z).cloned().unwrap_or_else(Rational::zero);
            let k = profile.values.get(z).cloned().unwrap_or_else(Rational::zero);
            if eg3::green_closed(zt, x).unwrap() != g || eg3::kernel_closed(zt, x).unwrap() != k {
                mismatches += 1;
            }
            compared += 1;
        }
    }
    let elapsed = start.elapsed();
    gate(
        3,
        mismatches == 0 && words.len() >= 1793 && elapsed < Duration::from_secs(60),
        format!(
            "{} targets, {compared} (z, x) pairs, {mismatches} mismatches in G or K, {:.1}s < 60s",
            words.len(),
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_04_rho_against_truncated_sum() {
    let start = Instant::now();
    let mut pairs: Vec<(BoundaryPoint, BoundaryPoint)> = vec![
        (BoundaryPoint::parse("1/2,(b),(c)").unwrap(), BoundaryPoint::parse("1/2,(c),(b)").unwrap()),
        (BoundaryPoint::parse("0,-,(b)").unwrap(), BoundaryPoint::parse("0,-,(c)").unwrap()),
    ];
    let pinned = [ratio(30, 49), ratio(2, 3)];
    let mut pinned_ok = true;
    for ((x, y), want) in pairs.iter().zip(&pinned) {
        pinned_ok &= eg3::rho_exact(x, y).unwrap().as_ref() == Some(want);
    }
    let mut index = 0u64;
    while pairs.len() < 1002 {
        let (x, y, _) = eg3::sample_pair(4, index);
        index += 1;
        if eg3::rho_exact(&x, &y).unwrap().is_some() {
            pairs.push((x, y));
        }
    }
    let bound = eg3::theta_tail_bound(40);
    let mut worst = 0.0f64;
    let mut outside = 0usize;
    for (x, y) in &pairs {
        let exact = eg3::rho_exact(x, y).unwrap().expect("filtered");
        let t = eg3::theta_boundary_truncated(x, y, 40).unwrap();
        if !t.brackets(&exact) || t.tail_bound != bound {
            outside += 1;
        }
        worst = worst.max(rational::to_f64(&(&exact - &t.value)).abs());
    }
    let elapsed = start.elapsed();
    let tail = rational::to_f64(&bound);
    gate(
        4,
        pinned_ok && outside == 0 && tail < 1e-9 && elapsed < Duration::from_secs(30),
        format!(
            "pinned 30/49 and 2/3 {pinned_ok}, {} pairs, {outside} outside the bracket, max gap {worst:.2e} <= tail {tail:.2e} < 1e-9, {:.1}s < 30s",
            pairs.len(),
            secs(elapsed)
        ),
    );
}

fn random_point(rng: &mut ChaCha8Rng, base: &BoundaryPoint) -> BoundaryPoint {
    // A neighbour of `base`: same ratio or a nearby one, streams sharing a
    // random prefix with those of `base`.
    let lambda = if rng.random_bool(0.5) {
        base.lambda().clone()
    } else {
        Rational::new(rng.random_range(0..=1024u64).into(), 1024u64.into())
    };
    let mut derive = |s: Option<&Stream>| -> Stream {
        let keep = rng.random_range(0..24);
        let mut prefix = s.map(|s| s.take(keep).unwrap()).unwrap_or_default();
        prefix.push(if rng.random_bool(0.5) { Symbol::B } else { Symbol::C });
        Stream::random(prefix, rng.random())
    };
    let left = derive(base.left());
    let right = derive(base.right());
    let l = (!lambda.is_zero()).then_some(left);
    let r = (lambda < Rational::one()).then_some(right);
    BoundaryPoint::new(lambda, l, r).unwrap()
}

#[test]
fn criterion_05_metric_axioms() {
    let start = Instant::now();
    let m = preset("eg3").unwrap();
    let lang = enumerate_language(&m, Letter(0), 4).unwrap();
    let words: Vec<Word> = lang.union().into_iter().collect();
    let ctx = MartinContext::for_model(&m, 5).unwrap();
    let profiles: Vec<KernelProfile> = words.iter().map(|w| ctx.kernel_profile(w).unwrap()).collect();
    let n = words.len();
    let mut theta = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            theta[i][j] = theta_between(&profiles[i], &profiles[j], &DefaultWeights);
        }
    }
    let mut theta_bad = 0usize;
    for i in 0..n {
        for j in 0..n {
            if theta[i][j] != theta[j][i] || (theta[i][j].is_zero() != (i == j)) {
                theta_bad += 1;
            }
            for k in 0..n {
                if theta[i][k] > &theta[i][j] + &theta[j][k] {
                    theta_bad += 1;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rho_bad = 0usize;
    let mut triples = 0usize;
    for i in 0..1000u64 {
        let (x, _, _) = eg3::sample_pair(5, i);
        let y = random_point(&mut rng, &x);
        let z = random_point(&mut rng, &y);
        let d = |a: &BoundaryPoint, b: &BoundaryPoint| eg3::rho(a, b).unwrap();
        let (xy, yx, yz, xz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
        if (xy - yx).abs() > 1e-12 || xz > xy + yz + 1e-12 || d(&x, &x) != 0.0 {
            rho_bad += 1;
        }
        triples += 1;
    }
    let elapsed = start.elapsed();
    gate(
        5,
        theta_bad == 0 && rho_bad == 0,
        format!(
            "theta on {n} words ({} ordered triples): {theta_bad} violations; rho on {triples} triples: {rho_bad} violations; {:.1}s",
            n * n * n,
            secs(elapsed)
        ),
    );
}

const KAPPA_HAT: f64 = 5.5;
const C1_BAR: f64 = 0.35;
const C2_BAR: f64 = 3.5;
const LIPSCHITZ_SEED: u64 = 2024;

#[test]
fn criterion_06_and_07_lipschitz_bounds() {
    let start = Instant::now();
    let base = eg3::lipschitz_scan(10_000, LIPSCHITZ_SEED).unwrap();
    let doubled = eg3::lipschitz_scan(20_000, LIPSCHITZ_SEED).unwrap();
    let elapsed = start.elapsed();

    let growth = doubled.sup_rho_over_phi / base.sup_rho_over_phi;
    let pass6 = base.sup_rho_over_phi <= KAPPA_HAT && doubled.sup_rho_over_phi <= KAPPA_HAT && growth <= 1.10;
    report(
        6,
        pass6,
        format!(
            "sup rho/d_phi = {:.4} over 1e4 pairs, {:.4} over 2e4 (x{growth:.4} <= 1.10), kappa = {KAPPA_HAT}; {:.1}s for both scans",
            base.sup_rho_over_phi,
            doubled.sup_rho_over_phi,
            secs(elapsed)
        ),
    );
    let pass7 = C1_BAR > 0.0
        && base.inf_rho_over_psi >= C1_BAR
        && base.sup_rho_over_psi <= C2_BAR
        && doubled.inf_rho_over_psi >= C1_BAR
        && doubled.sup_rho_over_psi <= C2_BAR;
    report(
        7,
        pass7,
        format!(
            "rho/|dpsi| in [{:.4}, {:.4}] over 1e4 pairs ({} degenerate excluded), [{:.4}, {:.4}] over 2e4, band [{C1_BAR}, {C2_BAR}]",
            base.inf_rho_over_psi,
            base.sup_rho_over_psi,
            base.skipped,
            doubled.inf_rho_over_psi,
            doubled.sup_rho_over_psi
        ),
    );
    assert!(pass6, "criterion 6");
    assert!(pass7, "criterion 7");
}

#[test]
fn criterion_08_box_dimension() {
    let est = |l: f64| eg3::box_dimension(l, 40, 30).unwrap();
    let (d0, d1, d5, d9) = (est(0.0), est(0.1), est(0.5), est(0.9));
    let near = (d0 - 0.5).abs() <= 0.1 && (d5 - 2.0 / 3.0).abs() <= 0.1;
    let spread = d1.max(d5).max(d9) - d1.min(d5).min(d9);
    gate(
        8,
        near && spread > 0.05,
        format!(
            "dim(0) = {d0:.4} (1/2), dim(0.5) = {d5:.4} (2/3): within 0.1 {near}; spread over 0.1/0.5/0.9 = {spread:.4} > 0.05 ({d1:.4}, {d5:.4}, {d9:.4})"
        ),
    );
}

#[test]
fn criterion_09_harmonic_function() {
    let start = Instant::now();
    let m = preset("test-harmonic").unwrap();
    let f = harmonic::build_harmonic(&m, &ratio(1, 2), 6).unwrap();
    let lang = enumerate_language(&m, Letter(0), 5).unwrap();
    let mut checked = 0usize;
    let mut failed = 0usize;
    for w in lang.union().into_iter().filter(|w| w.len() <= 32) {
        checked += 1;
        if !harmonic::verify_harmonic(&m, &f, &w).unwrap().1 {
            failed += 1;
        }
    }
    let rejects = |name: &str, want: Hypothesis| {
        matches!(
            harmonic::build_harmonic(&preset(name).unwrap(), &ratio(1, 2), 3),
            Err(HarmonicError::Hypothesis { failed, .. }) if failed == want
        )
    };
    let eg1 = rejects("eg1", Hypothesis::ConstantLength);
    let eg2 = rejects("eg2", Hypothesis::ExpandingRoot);
    gate(
        9,
        failed == 0 && checked > 0 && eg1 && eg2 && f.nonpositive().is_empty(),
        format!(
            "Pf = f on {checked} reachable words of length <= 32 ({failed} failures); eg1 rejected for length {eg1}, eg2 for root {eg2}; {:.1}s",
            secs(start.elapsed())
        ),
    );
}

#[test]
fn criterion_10_transience_bound() {
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for name in ["eg1", "eg2", "eg3", "eg4", "eg5"] {
        let m = preset(name).unwrap();
        let start = m.parse_word("a").unwrap();
        let mut sample: BTreeSet<Word> = BTreeSet::new();
        for seed in 0..6 {
            sample.extend(simulate(&m, &start, 3, seed));
        }
        for v in sample {
            let r = martin::transience_check(&m, &v).unwrap();
            checked += 1;
            if !r.bound_ok {
                violations.push(format!("{name}:{}", m.render(&v)));
            }
        }
    }
    let eg4 = preset_with("eg4", &[("q".into(), ratio(1, 2))]).unwrap();
    let r = martin::transience_check(&eg4, &eg4.parse_word("a").unwrap()).unwrap();
    let equality = r.green_vv == int(2) && r.green_vv == Rational::one() / &r.eta;
    gate(
        10,
        violations.is_empty() && equality,
        format!(
            "G(v,v) <= 1/eta on {checked} sampled words of eg1-eg5, violations {violations:?}; eg4 G(a,a) = {} = 1/eta {equality}",
            rational::format(&r.green_vv)
        ),
    );
}

#[test]
fn criterion_11_kernel_limit_along_rays() {
    let mut zs = Vec::new();
    for s in 0..=3usize {
        for h in 0..=s {
            for bits in 0..(1u32 << s) {
                let sym = |i: usize| if bits >> i & 1 == 1 { Symbol::C } else { Symbol::B };
                zs.push(HeadTail::new((0..h).map(sym).collect(), (h..s).map(sym).collect()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for _ in 0..10 {
        let lambda = Rational::new(rng.random_range(1..1024u64).into(), 1024u64.into());
        let left = Stream::random(Vec::new(), rng.random());
        let right = Stream::random(Vec::new(), rng.random());
        let xi = BoundaryPoint::new(lambda, Some(left), Some(right)).unwrap();
        let x = eg3::converge_to_boundary(&xi, 1000).unwrap();
        for z in &zs {
            let gap = rational::to_f64(&(eg3::kernel_closed(z, &x).unwrap() - eg3::kernel_at_boundary(z, &xi).unwrap())).abs();
            if gap > worst {
                worst = gap;
                worst_at = format!("lambda = {}, |z| = {}", rational::format(xi.lambda()), z.h() + z.t() + 1);
            }
        }
    }
    gate(
        11,
        worst < 1e-6,
        format!("max |K(z, x_1000) - K(z, xi)| = {worst:.3e} < 1e-6 over 10 points x {} words z ({worst_at})", zs.len()),
    );
}

#[test]
fn criterion_12_point_cloud() {
    let start = Instant::now();
    let args = ["eg3", "cloud", "--samples", "100000", "--seed", "7"];
    let (code, first) = run_cli(&args);
    let elapsed = start.elapsed();
    let (code2, second) = run_cli(&args);
    let mut lines = first.lines();
    let header_ok = lines.next() == Some(eg3::CLOUD_HEADER);
    let mut rows = 0usize;
    let mut out_of_bounds = 0usize;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        rows += 1;
        if v.len() != 3 || !(EmbeddedPoint { lambda: v[0], y: v[1], z: v[2] }).in_bounds() {
            out_of_bounds += 1;
        }
    }
    let identical = first == second;
    gate(
        12,
        code == 0 && code2 == 0 && header_ok && rows == 100_000 && out_of_bounds == 0 && identical && elapsed < Duration::from_secs(30),
        format!(
            "{rows} rows, {out_of_bounds} outside the coordinate bounds, byte-identical rerun {identical}, {:.1}s < 30s",
            secs(elapsed)
        ),
    );
}
