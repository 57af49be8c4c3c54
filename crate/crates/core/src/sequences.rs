//! The divisor sums `α(n)`, `β(n)` and the sequences `α_l`, `β_l`, `γ_l`.
//!
//! `β_l` is `β` of the product of the first `l` primes, and `α_l` is the
//! limit of `α` along `Π_{i ≤ l} p_i^e` as `e → ∞`; together they bound
//! `α(n)` and `β(n)` over all `n` with `ω(n) = l`:
//!
//! ```text
//! α_1 = 1,   α_l = 1 + p_l/(p_l - 1) · α_{l-1}
//! β_l = Σ_{i ≤ l} (p_i - 1)/p_i
//! γ_l = 3 α_l - β_l
//! ```
//!
//! Both recurrences also hold from `α_0 = β_0 = 0`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::numth::{divisors, factorize, omega};
use crate::primes::PrimeTable;
use crate::rational::Rational;

/// `α(n) = Σ_{d | n} (P⁻(d) - 1)/d`; the `d = 1` term is 0.
pub fn alpha_of(n: u64) -> Rational {
    assert!(n >= 1, "α(0) is undefined");
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    let mut numer: u128 = 0;
    for d in divisors(n).expect("n >= 1").list.into_iter().skip(1) {
        let least = primes.iter().copied().find(|p| d % p == 0).expect("d > 1");
        numer += u128::from(least - 1) * u128::from(n / d);
    }
    Rational::from_bigints(numer.into(), n.into())
}

/// `β(n) = Σ_{p | n prime} (p - 1)/p`.
pub fn beta_of(n: u64) -> Rational {
    assert!(n >= 1, "β(0) is undefined");
    factorize(n)
        .into_iter()
        .map(|(p, _)| Rational::new(p as i64 - 1, p as i64))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceTriple {
    pub l: usize,
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

/// `(α_l, β_l, γ_l)` for every `l` in `0..=max_l`, by the recurrences.
pub fn sequence_triples(max_l: usize, primes: &PrimeTable) -> Vec<SequenceTriple> {
    assert!(primes.len() >= max_l, "prime table too short");
    let mut alpha = Rational::zero();
    let mut beta = Rational::zero();
    let mut out = Vec::with_capacity(max_l + 1);
    for l in 0..=max_l {
        if l > 0 {
            let p = primes.nth(l) as i64;
            alpha = Rational::one() + Rational::new(p, p - 1) * alpha;
            beta += Rational::new(p - 1, p);
        }
        let gamma = Rational::from(3i64) * alpha.clone() - beta.clone();
        out.push(SequenceTriple {
            l,
            alpha: alpha.clone(),
            beta: beta.clone(),
            gamma,
        });
    }
    out
}

pub fn sequence_triple(l: usize) -> SequenceTriple {
    let primes = PrimeTable::with_count(l);
    sequence_triples(l, &primes).pop().expect("nonempty")
}

/// `max_l α_l / l`, attained at `l = 9`.
pub fn alpha_ratio_constant() -> Rational {
    sequence_triple(9).alpha / Rational::from(9i64)
}

/// `max_l γ_l / l`, attained at `l = 8`.
pub fn gamma_ratio_constant() -> Rational {
    sequence_triple(8).gamma / Rational::from(8i64)
}

/// Unreduced `α_l = alpha/m`, `β_l = beta/m` over the common denominator
/// `m = Π_{i ≤ l} p_i (p_i - 1)`. Each step is a few big-by-small products,
/// which keeps a sweep to `l = 10^4` cheap.
struct Unreduced {
    l: usize,
    p: u64,
    m: BigInt,
    alpha: BigInt,
    beta: BigInt,
}

impl Unreduced {
    fn start() -> Self {
        Unreduced {
            l: 0,
            p: 1,
            m: BigInt::one(),
            alpha: BigInt::zero(),
            beta: BigInt::zero(),
        }
    }

    fn advance(&mut self, p: u64) {
        let step = BigInt::from(p) * BigInt::from(p - 1);
        let m = &self.m * &step;
        self.alpha = &m + &self.alpha * BigInt::from(p * p);
        self.beta = &self.beta * &step + &self.m * BigInt::from((p - 1) * (p - 1));
        self.m = m;
        self.p = p;
        self.l += 1;
    }

    fn gamma(&self) -> BigInt {
        &self.alpha * 3 - &self.beta
    }
}

/// Tracks where `value_l / l` peaks and whether it rises strictly up to the
/// peak and falls strictly after it.
struct RatioShape {
    bound: (BigInt, BigInt),
    bound_holds: bool,
    best_l: usize,
    best: (BigInt, BigInt),
    rises_until: usize,
    falls_after_peak: bool,
    prev: Option<BigInt>,
}

impl RatioShape {
    fn new(bound: &Rational) -> Self {
        RatioShape {
            bound: (bound.numer().clone(), bound.denom().clone()),
            bound_holds: true,
            best_l: 0,
            best: (BigInt::zero(), BigInt::one()),
            rises_until: 1,
            falls_after_peak: true,
            prev: None,
        }
    }

    /// Feeds `value_l = numer/m` with `m_l = m_{l-1} · step`.
    fn observe(&mut self, l: usize, numer: &BigInt, m: &BigInt, step: &BigInt) {
        let lm = m * BigInt::from(l);
        if numer * &self.bound.1 > &self.bound.0 * &lm {
            self.bound_holds = false;
        }
        if self.best_l == 0 || numer * &self.best.1 > &self.best.0 * &lm {
            let g = numer.gcd(&lm);
            self.best = (numer / &g, &lm / g);
            self.best_l = l;
        }
        if let Some(prev) = &self.prev {
            // value_l/l vs value_{l-1}/(l-1), both over m_l
            let lhs = numer * BigInt::from(l - 1);
            let rhs = prev * step * BigInt::from(l);
            if lhs > rhs {
                if self.rises_until == l - 1 {
                    self.rises_until = l;
                } else {
                    self.falls_after_peak = false;
                }
            } else if lhs == rhs {
                self.falls_after_peak = false;
            }
        }
        self.prev = Some(numer.clone());
    }

    fn unimodal(&self) -> bool {
        self.falls_after_peak && self.rises_until == self.best_l
    }
}

/// Outcome for one sampled `n` of `β_l ≤ β(n) ≤ α(n) ≤ α_l`, `l = ω(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub n: u64,
    pub l: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub max_l: usize,
    pub samples: Vec<SampleCheck>,
    /// `α_l ≤ 2l`.
    pub alpha_at_most_2l: bool,
    /// `γ_l ≥ 2l`.
    pub gamma_at_least_2l: bool,
    /// Largest `L ≤ max_l` with `5l/2 ≤ γ_l` for every `l ≤ L`. This bound
    /// is false in general: `γ_l / l` tends to 2, and the first failure is
    /// at `l = 1989`.
    pub five_halves_l_holds_through: usize,
    /// `α_l / l ≤ α_9 / 9`.
    pub alpha_ratio_bounded: bool,
    /// `γ_l / l ≤ γ_8 / 8`.
    pub gamma_ratio_bounded: bool,
    pub argmax_alpha_over_l: usize,
    pub argmax_gamma_over_l: usize,
    /// `α_l / l` strictly increases up to its argmax and strictly decreases
    /// after it.
    pub alpha_ratio_unimodal: bool,
    pub gamma_ratio_unimodal: bool,
    /// `p_l ≥ l ln l`, certified with interval logarithms.
    pub rosser: bool,
    /// `β_l ≥ l - 2 - ln ln l` for `l ≥ 3`, certified likewise.
    pub beta_lower_bound: bool,
}

impl SequenceReport {
    pub fn all_hold(&self) -> bool {
        self.samples.iter().all(|s| s.holds)
            && self.alpha_at_most_2l
            && self.gamma_at_least_2l
            && self.five_halves_l_holds_through == self.max_l
            && self.alpha_ratio_bounded
            && self.gamma_ratio_bounded
            && self.argmax_alpha_over_l == 9.min(self.max_l)
            && self.argmax_gamma_over_l == 8.min(self.max_l)
            && self.alpha_ratio_unimodal
            && self.gamma_ratio_unimodal
            && self.rosser
            && self.beta_lower_bound
    }
}

/// Default largest index for sweeps.
pub const DEFAULT_SEQUENCE_BUDGET: usize = 10_000;

fn check_budget(max_l: usize, budget: usize) -> Result<()> {
    if max_l > budget {
        return Err(Error::Budget {
            what: "sequence index".into(),
            needed: max_l,
            budget,
        });
    }
    if max_l == 0 {
        return Err(Error::Domain("max_l must be at least 1".into()));
    }
    Ok(())
}

/// Checks the bounds relating `α`, `β`, `γ` and the prime sequence for
/// every `l ≤ max_l`, plus the sandwich `β_l ≤ β(n) ≤ α(n) ≤ α_l` for each
/// sampled `n`.
pub fn check_sequences(max_l: usize, sample_n: &[u64], budget: usize) -> Result<SequenceReport> {
    check_budget(max_l, budget)?;
    let primes = PrimeTable::with_count(max_l.max(16));

    let small = sequence_triples(16, &primes);
    let samples = sample_n
        .iter()
        .map(|&n| {
            let l = omega(n);
            let t = &small[l];
            let (a, b) = (alpha_of(n), beta_of(n));
            SampleCheck {
                n,
                l,
                holds: t.beta <= b && b <= a && a <= t.alpha,
            }
        })
        .collect();

    let mut alpha_shape = RatioShape::new(&alpha_ratio_constant());
    let mut gamma_shape = RatioShape::new(&gamma_ratio_constant());
    let mut alpha_at_most_2l = true;
    let mut gamma_at_least_2l = true;
    let mut five_halves_through = 0;
    let mut rosser = true;
    let mut beta_lower_bound = true;
    let mut reciprocal_sum = Interval::point(0.0);

    let mut state = Unreduced::start();
    for l in 1..=max_l {
        let p = primes.nth(l);
        let step = BigInt::from(p) * BigInt::from(p - 1);
        state.advance(p);
        let gamma = state.gamma();
        let lm = &state.m * BigInt::from(l);
        if state.alpha > &lm * 2 {
            alpha_at_most_2l = false;
        }
        if &lm * 2 > gamma {
            gamma_at_least_2l = false;
        }
        if five_halves_through == l - 1 && &lm * 5 <= &gamma * 2 {
            five_halves_through = l;
        }
        alpha_shape.observe(l, &state.alpha, &state.m, &step);
        gamma_shape.observe(l, &gamma, &state.m, &step);

        let li = Interval::from_u64(l as u64);
        if l >= 2 && !(li * li.ln()).certainly_le(&Interval::from_u64(p)) {
            rosser = false;
        }
        // β_l = l - Σ 1/p_i, so the bound reads Σ 1/p_i ≤ 2 + ln ln l.
        reciprocal_sum = reciprocal_sum + Interval::point(1.0) / Interval::from_u64(p);
        if l >= 3 {
            let rhs = Interval::point(2.0) + li.ln().ln();
            if !reciprocal_sum.certainly_le(&rhs) {
                beta_lower_bound = false;
            }
        }
    }

    Ok(SequenceReport {
        max_l,
        samples,
        alpha_at_most_2l,
        gamma_at_least_2l,
        five_halves_l_holds_through: five_halves_through,
        alpha_ratio_bounded: alpha_shape.bound_holds,
        gamma_ratio_bounded: gamma_shape.bound_holds,
        argmax_alpha_over_l: alpha_shape.best_l,
        argmax_gamma_over_l: gamma_shape.best_l,
        alpha_ratio_unimodal: alpha_shape.unimodal(),
        gamma_ratio_unimodal: gamma_shape.unimodal(),
        rosser,
        beta_lower_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    AlphaOverL,
    BetaOverL,
}

impl TrajectoryKind {
    fn column(self) -> &'static str {
        match self {
            TrajectoryKind::AlphaOverL => "alpha_l",
            TrajectoryKind::BetaOverL => "beta_l",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub l: usize,
    /// `α_l` or `β_l`.
    pub value: Rational,
    /// `value / l`.
    pub ratio: Rational,
}

/// `(l, value_l, value_l / l)` for `l = 1..=max_l`. Values are reduced
/// fractions, so long trajectories are slower than [`check_sequences`].
pub fn limit_trajectory(kind: TrajectoryKind, max_l: usize, budget: usize) -> Result<Vec<TrajectoryRow>> {
    check_budget(max_l, budget)?;
    let primes = PrimeTable::with_count(max_l);
    let rows = sequence_triples(max_l, &primes)
        .into_iter()
        .skip(1)
        .map(|t| {
            let value = match kind {
                TrajectoryKind::AlphaOverL => t.alpha,
                TrajectoryKind::BetaOverL => t.beta,
            };
            let ratio = value.clone() / Rational::from(t.l as u64);
            TrajectoryRow { l: t.l, value, ratio }
        })
        .collect();
    Ok(rows)
}

/// CSV with columns `l`, `alpha_l` or `beta_l` (exact fraction) and `ratio`
/// (12 decimals, truncated).
pub fn trajectory_csv(kind: TrajectoryKind, rows: &[TrajectoryRow]) -> String {
    let mut out = format!("l,{},ratio\n", kind.column());
    for row in rows {
        let _ = writeln!(out, "{},{},{}", row.l, row.value, row.ratio.to_decimal(12));
    }
    out
}
