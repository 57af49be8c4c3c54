//! Upper bounds for `k(G)` other than the polytope, and the lower bound
//! `k*(G)`, in a common tagged form for side-by-side comparison.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::interval::Interval;
use crate::kstar::{kstar, phi_quotient};
use crate::numth::{divisors, least_prime_divisor, omega};
use crate::polytope::PolytopeSolution;
use crate::provider::{InvariantProvider, Provenance, ValueWithProvenance};
use crate::rational::Rational;
use crate::sequences::{alpha_of, beta_of};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    KstarLower,
    /// `min_d (d-1)/P⁻(n) + log(|G|/d)`.
    Gs,
    /// The `d = 1` case of [`BoundMethod::Gs`], `log |G|`.
    GsLogOrder,
    Kz,
    AlphaRank1,
    AlphaRank2,
    QualitativeSharp,
    QualitativeSmooth,
    Polytope,
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lower,
    Upper,
}

/// A bound is an exact rational, or a certified enclosure of a real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundNumber {
    Exact(Rational),
    Interval(Interval),
}

impl BoundNumber {
    pub fn enclosure(&self) -> Interval {
        match self {
            BoundNumber::Exact(r) => Interval::from_rational(r),
            BoundNumber::Interval(i) => *i,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            BoundNumber::Exact(r) => Some(r),
            BoundNumber::Interval(_) => None,
        }
    }

    /// `self >= r`, exactly for rationals; for an interval, true unless the
    /// whole interval lies below `r`.
    pub fn not_below(&self, r: &Rational) -> bool {
        match self {
            BoundNumber::Exact(v) => v >= r,
            BoundNumber::Interval(i) => Interval::from_rational(r).lo <= i.hi,
        }
    }

    /// Decimal rendering for tables.
    pub fn decimal(&self) -> String {
        match self {
            BoundNumber::Exact(r) => r.to_decimal(6),
            BoundNumber::Interval(i) => format!("{:.6}", i.mid()),
        }
    }
}

impl fmt::Display for BoundNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundNumber::Exact(r) => write!(f, "{r}"),
            BoundNumber::Interval(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub method: BoundMethod,
    pub direction: Direction,
    pub value: BoundNumber,
    /// Inputs the bound relies on beyond proven formulas.
    pub assumptions: Vec<String>,
    /// True when a conjectured invariant value was used.
    pub conjectural: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundValue {
    fn upper(method: BoundMethod, value: BoundNumber) -> Self {
        BoundValue {
            method,
            direction: Direction::Upper,
            value,
            assumptions: Vec::new(),
            conjectural: false,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// The conjectured lower bound `k*(G) <= k(G)`.
pub fn kstar_lower(group: &GroupSpec) -> BoundValue {
    BoundValue {
        direction: Direction::Lower,
        ..BoundValue::upper(BoundMethod::KstarLower, BoundNumber::Exact(kstar(group)))
    }
}

/// `(d-1)/P⁻(n) + log(|G|/d)` for every divisor `d` of `n`.
pub fn gs_terms(group: &GroupSpec) -> Vec<(u64, Interval)> {
    let n = group.exponent();
    let least = least_prime_divisor(n);
    divisors(n)
        .expect("n >= 1")
        .list
        .into_iter()
        .map(|d| {
            let linear = Interval::from_rational(&Rational::new(d as i64 - 1, least as i64));
            (d, linear + Interval::from_u64(group.order() / d).ln())
        })
        .collect()
}

/// The smallest of [`gs_terms`], with the minimizing divisor in the note.
pub fn gs_bound(group: &GroupSpec) -> BoundValue {
    let terms = gs_terms(group);
    let (d, _) = terms
        .iter()
        .min_by(|a, b| a.1.hi.total_cmp(&b.1.hi))
        .expect("1 divides n");
    let value = terms.iter().skip(1).fold(terms[0].1, |acc, (_, t)| acc.min(t));
    BoundValue::upper(BoundMethod::Gs, BoundNumber::Interval(value)).with_note(format!("minimum at d = {d}"))
}

/// `k(G) <= log |G|`.
pub fn gs_log_order(group: &GroupSpec) -> BoundValue {
    BoundValue::upper(
        BoundMethod::GsLogOrder,
        BoundNumber::Interval(Interval::from_u64(group.order()).ln()),
    )
}

/// `k(C_n) <= 2 ω(n)`, cyclic groups only.
pub fn kz_bound(group: &GroupSpec) -> Result<BoundValue> {
    if group.rank() != 1 {
        return Err(Error::Domain(format!(
            "the 2ω(n) bound needs a nontrivial cyclic group, got {}",
            group.label()
        )));
    }
    let w = omega(group.exponent()) as u64;
    Ok(BoundValue::upper(BoundMethod::Kz, BoundNumber::Exact(Rational::from(2 * w))))
}

/// `α(n)` for rank at most 1, `3α(n) - β(n) - φ(G, C_n^2)` for rank 2.
pub fn alpha_bound(group: &GroupSpec) -> Result<BoundValue> {
    let n = group.exponent();
    match group.rank() {
        0 | 1 => Ok(BoundValue::upper(BoundMethod::AlphaRank1, BoundNumber::Exact(alpha_of(n)))),
        2 => {
            let phi = phi_quotient(group);
            let value = Rational::from(3u64) * alpha_of(n) - beta_of(n) - phi.value;
            let bound = BoundValue::upper(BoundMethod::AlphaRank2, BoundNumber::Exact(value));
            Ok(if phi.summand {
                bound
            } else {
                bound.with_note("not a direct summand of C_n^2: φ uses k*(H/G)/n")
            })
        }
        r => Err(Error::Domain(format!("the α bound needs rank <= 2, got rank {r}"))),
    }
}

/// The two forms of the bound obtained from the polytope of `C_n^r`.
#[derive(Debug, Clone)]
pub struct QualitativeBounds {
    /// `Σ_{d | n} (min(η(C_{P⁻(d)}^r), D(C_d^r)) - 1)/d - φ(G, C_n^r)`.
    pub sharp: Result<BoundValue>,
    /// `c_r (α(n) - β(n)) + r β(n) - φ(G, C_n^r)`.
    pub smooth: Result<BoundValue>,
}

fn describe(name: &str, group: &GroupSpec, v: &ValueWithProvenance) -> Option<String> {
    match v.provenance {
        Provenance::ExactFormula | Provenance::ExactSearch => None,
        Provenance::UpperBound => Some(format!("{name}({}) <= {} ({})", group.label(), v.value, v.source_note)),
        Provenance::Conjectural => Some(format!("{name}({}) = {} ({})", group.label(), v.value, v.source_note)),
    }
}

fn sharp_form(group: &GroupSpec, provider: &InvariantProvider) -> Result<BoundValue> {
    let n = group.exponent();
    let r = group.rank();
    let mut total = Rational::zero();
    let mut assumptions = Vec::new();
    let mut conjectural = false;
    for d in divisors(n)?.list {
        let small = GroupSpec::power(least_prime_divisor(d), r);
        let eta = provider.eta(&small)?;
        let full = GroupSpec::power(d, r);
        let dav = provider.davenport(&full);
        let (used_group, name, used) = if eta.value <= dav.value {
            (&small, "η", &eta)
        } else {
            (&full, "D", &dav)
        };
        if let Some(text) = describe(name, used_group, used) {
            if !assumptions.contains(&text) {
                assumptions.push(text);
            }
        }
        conjectural |= used.provenance == Provenance::Conjectural;
        total += Rational::from(used.value - 1) / Rational::from(d);
    }
    let value = total - phi_quotient(group).value;
    Ok(BoundValue {
        assumptions,
        conjectural,
        ..BoundValue::upper(BoundMethod::QualitativeSharp, BoundNumber::Exact(value))
    })
}

fn smooth_form(group: &GroupSpec, provider: &InvariantProvider) -> Result<BoundValue> {
    let n = group.exponent();
    let r = group.rank().max(1);
    let c = provider
        .policy()
        .c_r(r)
        .ok_or_else(|| Error::Policy(format!("no value of c_{r} is configured")))?
        .clone();
    let (a, b) = (alpha_of(n), beta_of(n));
    let value = &c * &(&a - &b) + Rational::from(r as u64) * b - phi_quotient(group).value;
    Ok(BoundValue {
        assumptions: vec![format!("c_{r} = {c}")],
        ..BoundValue::upper(BoundMethod::QualitativeSmooth, BoundNumber::Exact(value))
    })
}

pub fn qualitative_bound(group: &GroupSpec, provider: &InvariantProvider) -> QualitativeBounds {
    QualitativeBounds {
        sharp: sharp_form(group, provider),
        smooth: smooth_form(group, provider),
    }
}

/// The polytope optimum as a bound, with its non-exact inputs listed.
pub fn polytope_bound(solution: &PolytopeSolution) -> BoundValue {
    let mut assumptions = Vec::new();
    for (prov, count) in &solution.provenance_summary {
        if !prov.is_exact() {
            assumptions.push(format!("{count} cap input(s) with provenance {prov}"));
        }
    }
    BoundValue {
        assumptions,
        conjectural: solution.provenance_summary.contains_key(&Provenance::Conjectural),
        ..BoundValue::upper(BoundMethod::Polytope, BoundNumber::Exact(solution.optimum.clone()))
    }
}

/// `D(G) <= n k + 1` for any upper bound `k` of `k(G)`.
pub fn davenport_from_k(group: &GroupSpec, k_upper: &Rational) -> u64 {
    let scaled = (Rational::from(group.exponent()) * k_upper.clone()).floor();
    scaled.to_u64().expect("non-negative and small") + 1
}

/// `k(G) + 1/n <= K(G) <= k(G) + 1/P⁻(n)` from the exact `k(G)`.
pub fn k_interval_from_k(group: &GroupSpec, k: &Rational) -> (Rational, Rational) {
    let n = group.exponent();
    (
        k + &Rational::recip_of(n),
        k + &Rational::recip_of(least_prime_divisor(n)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_spec;
    use crate::provider::ProviderPolicy;

    fn g(s: &str) -> GroupSpec {
        parse_group_spec(s).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn exact(b: &BoundValue) -> Rational {
        b.value.as_exact().unwrap().clone()
    }

    #[test]
    fn gs_examples() {
        let b = gs_bound(&g("6"));
        let BoundNumber::Interval(i) = b.value else { panic!() };
        assert!(i.contains(0.5 + 3f64.ln()) && i.width() <= 1e-9);
        assert!((i.mid() - 1.5986).abs() < 1e-4);
        assert_eq!(b.note.as_deref(), Some("minimum at d = 2"));

        let i = gs_bound(&g("2,2")).value.enclosure();
        assert!((i.mid() - 1.1931).abs() < 1e-4);

        for p in [2u64, 3, 7, 13] {
            let (d, t) = *gs_terms(&GroupSpec::cyclic(p)).last().unwrap();
            assert_eq!(d, p);
            assert!(t.contains((p - 1) as f64 / p as f64) && t.width() <= 1e-9);
        }
        let log = gs_log_order(&g("2,2")).value.enclosure();
        assert!(log.contains(4f64.ln()));
    }

    #[test]
    fn kz_examples() {
        assert_eq!(exact(&kz_bound(&g("6")).unwrap()), r(4, 1));
        assert_eq!(exact(&kz_bound(&g("30")).unwrap()), r(6, 1));
        assert_eq!(exact(&kz_bound(&g("27")).unwrap()), r(2, 1));
        assert!(kz_bound(&g("2,2")).is_err());
        assert!(kz_bound(&GroupSpec::trivial()).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(exact(&alpha_bound(&g("6")).unwrap()), r(4, 3));
        assert_eq!(exact(&alpha_bound(&g("2,2")).unwrap()), r(1, 1));
        assert_eq!(exact(&alpha_bound(&g("12")).unwrap()), r(5, 3));
        assert!(alpha_bound(&g("2,2,2")).is_err());
    }

    #[test]
    fn qualitative_examples() {
        let provider = InvariantProvider::new(ProviderPolicy::default());
        let q = qualitative_bound(&g("6"), &provider);
        assert_eq!(exact(&q.sharp.unwrap()), r(4, 3));
        let q = qualitative_bound(&g("2,2"), &provider);
        assert_eq!(exact(&q.smooth.unwrap()), r(1, 1));

        let q = qualitative_bound(&g("2,4,4"), &provider);
        assert!(matches!(q.smooth, Err(Error::Policy(_))));
        assert!(q.sharp.is_ok());
    }

    #[test]
    fn sharp_form_on_squares_uses_the_smaller_invariant() {
        let provider = InvariantProvider::new(ProviderPolicy::without_search());
        for n in 2..=30u64 {
            let group = GroupSpec::power(n, 2);
            let expected: Rational = divisors(n)
                .unwrap()
                .list
                .into_iter()
                .skip(1)
                .map(|d| {
                    let p = least_prime_divisor(d);
                    if p != d {
                        assert!(2 * d > 3 * p - 2);
                    }
                    Rational::from((3 * p - 2).min(2 * d - 1) - 1) / Rational::from(d)
                })
                .sum();
            let sharp = qualitative_bound(&group, &provider).sharp.unwrap();
            assert_eq!(exact(&sharp), expected, "{n}");
            assert!(sharp.assumptions.is_empty());
        }
    }

    #[test]
    fn conjectural_values_are_flagged() {
        let mut policy = ProviderPolicy::without_search();
        policy.allow_conjectural = true;
        let provider = InvariantProvider::new(policy);
        // D(C_3^3) = 7 is below the conjectured η(C_3^3) = 17, so the
        // conjecture only enters through d = 9, where D(C_9^3) = 25.
        let sharp = qualitative_bound(&g("3,3,3"), &provider).sharp.unwrap();
        assert!(!sharp.conjectural);
        let sharp = qualitative_bound(&g("9,9,9"), &provider).sharp.unwrap();
        assert!(sharp.conjectural);
        assert_eq!(sharp.assumptions.len(), 1);
        let plain = InvariantProvider::new(ProviderPolicy::without_search());
        let sharp = qualitative_bound(&g("9,9,9"), &plain).sharp.unwrap();
        assert!(!sharp.conjectural);
    }

    #[test]
    fn davenport_and_cross_intervals() {
        assert_eq!(davenport_from_k(&g("3"), &r(2, 3)), 3);
        assert_eq!(davenport_from_k(&g("6"), &r(4, 3)), 9);
        assert_eq!(davenport_from_k(&g("2,2"), &r(1, 1)), 3);
        assert_eq!(k_interval_from_k(&g("6"), &r(7, 6)), (r(4, 3), r(5, 3)));
        assert_eq!(k_interval_from_k(&g("7"), &r(6, 7)), (r(1, 1), r(1, 1)));
        assert_eq!(k_interval_from_k(&g("2,2"), &r(1, 1)), (r(3, 2), r(3, 2)));
    }

    #[test]
    fn bound_values_round_trip_through_json() {
        let provider = InvariantProvider::new(ProviderPolicy::default());
        let bounds = vec![
            kstar_lower(&g("6")),
            gs_bound(&g("6")),
            kz_bound(&g("6")).unwrap(),
            qualitative_bound(&g("6"), &provider).sharp.unwrap(),
        ];
        let text = serde_json::to_string(&bounds).unwrap();
        let back: Vec<BoundValue> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, bounds);
    }
}
