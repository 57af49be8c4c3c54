use crossnum::numth::{factorize, omega};
use crossnum::primes::PrimeTable;
use crossnum::rational::Rational;
use crossnum::sequences::{alpha_of, beta_of, check_sequences, sequence_triples};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `α(n)` grouped by least prime factor: the divisors `d` with
/// `P⁻(d) = p_i` are `p_i^j · m` with `m` built from larger primes.
fn alpha_by_least_prime(n: u64) -> f64 {
    let f = factorize(n);
    let inv_powers = |p: f64, from: u32, e: u32| (from..=e).map(|j| p.powi(-(j as i32))).sum::<f64>();
    (0..f.len())
        .map(|i| {
            let (p, e) = (f[i].0 as f64, f[i].1);
            let tail: f64 = f[i + 1..].iter().map(|&(q, k)| inv_powers(q as f64, 0, k)).product();
            (p - 1.0) * inv_powers(p, 1, e) * tail
        })
        .sum()
}

#[test]
fn alpha_matches_telescoped_sum() {
    let max_l = 1000;
    let primes = PrimeTable::with_count(max_l);
    let triples = sequence_triples(max_l, &primes);
    let mut partial = Rational::zero();
    for l in 1..=max_l {
        let p = primes.nth(l) as i64;
        partial += triples[l - 1].alpha.clone() / Rational::integer(p - 1);
        assert_eq!(triples[l].alpha, Rational::integer(l as i64) + partial.clone(), "l = {l}");
    }
}

#[test]
fn beta_l_is_beta_of_primorial() {
    let primes = PrimeTable::with_count(15);
    let triples = sequence_triples(15, &primes);
    let mut primorial = 1u64;
    for t in &triples[1..] {
        primorial *= primes.nth(t.l);
        assert_eq!(t.beta, beta_of(primorial));
        assert!(alpha_of(primorial) <= t.alpha);
    }
}

#[test]
fn random_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let primes = PrimeTable::with_count(16);
    let triples = sequence_triples(16, &primes);
    let sample: Vec<u64> = (0..10_000).map(|_| rng.gen_range(2..=1_000_000_000u64)).collect();
    for &n in &sample {
        let t = &triples[omega(n)];
        let (a, b) = (alpha_of(n), beta_of(n));
        assert!(t.beta <= b && b <= a && a <= t.alpha, "n = {n}");
        let oracle = alpha_by_least_prime(n);
        assert!((a.to_f64() - oracle).abs() <= 1e-12 * oracle.max(1.0), "n = {n}");
    }
    let report = check_sequences(20, &sample[..200], 20).unwrap();
    assert!(report.samples.iter().all(|s| s.holds));
}

#[test]
fn sweep_to_ten_thousand() {
    let report = check_sequences(10_000, &[], 10_000).unwrap();
    assert!(report.alpha_at_most_2l && report.gamma_at_least_2l);
    assert!(report.alpha_ratio_bounded && report.gamma_ratio_bounded);
    assert_eq!((report.argmax_alpha_over_l, report.argmax_gamma_over_l), (9, 8));
    assert!(report.alpha_ratio_unimodal && report.gamma_ratio_unimodal);
    assert!(report.rosser && report.beta_lower_bound);
    assert_eq!(report.five_halves_l_holds_through, 1988);
}
