use super::*;
use crate::group::{groups_up_to, parse_group_spec};
use crate::kstar::{kstar, kstar_upper};

fn g(s: &str) -> GroupSpec {
    parse_group_spec(s).unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn davenport_examples() {
    for n in 1..=16 {
        assert_eq!(davenport_exact(&GroupSpec::cyclic(n), &cfg()).unwrap(), n);
    }
    assert_eq!(davenport_exact(&g("2,4"), &cfg()).unwrap(), 5);
    assert_eq!(davenport_exact(&g("3,3"), &cfg()).unwrap(), 5);
    assert_eq!(davenport_exact(&g("2,2,2"), &cfg()).unwrap(), 4);
}

#[test]
fn eta_examples() {
    assert_eq!(eta_exact(&g("2,2"), &cfg()).unwrap(), 4);
    assert_eq!(eta_exact(&g("3,3"), &cfg()).unwrap(), 7);
    assert_eq!(eta_exact(&g("2,2,2"), &cfg()).unwrap(), 8);
    assert_eq!(eta_exact(&g("12"), &cfg()).unwrap(), 12);
}

#[test]
fn trivial_group_values() {
    let t = GroupSpec::trivial();
    assert_eq!(davenport_exact(&t, &cfg()).unwrap(), 1);
    assert_eq!(eta_exact(&t, &cfg()).unwrap(), 1);
    let k = little_cross_exact(&t, &cfg()).unwrap();
    assert_eq!(k.value, Rational::zero());
    assert_eq!(k.witnesses.len(), 1);
    assert!(k.witnesses[0].sequence.is_empty());
    assert_eq!(cross_exact(&t, &cfg()).unwrap(), Rational::one());
}

#[test]
fn relative_examples() {
    assert_eq!(d_relative_exact(&g("2,4"), 2, 4, &cfg()).unwrap(), 2);
    assert_eq!(d_relative_exact(&g("6"), 6, 6, &cfg()).unwrap(), 6);
    for (group, d) in [("2,4", 4), ("6", 3), ("3,3", 3), ("12", 12)] {
        assert_eq!(d_relative_exact(&g(group), 1, d, &cfg()).unwrap(), 1);
        assert_eq!(eta_relative_exact(&g(group), 1, d, &cfg()).unwrap(), 1);
    }
    assert_eq!(eta_relative_exact(&g("2,4"), 2, 4, &cfg()).unwrap(), 2);
    assert_eq!(eta_relative_exact(&g("6"), 2, 2, &cfg()).unwrap(), 2);
    assert_eq!(eta_relative_exact(&g("3,3"), 3, 3, &cfg()).unwrap(), 7);
}

#[test]
fn relative_rejects_bad_divisors() {
    assert!(matches!(d_relative_exact(&g("6"), 2, 4, &cfg()), Err(Error::Domain(_))));
    assert!(matches!(eta_relative_exact(&g("6"), 4, 6, &cfg()), Err(Error::Domain(_))));
}

#[test]
fn little_cross_examples() {
    assert_eq!(little_cross_exact(&g("2"), &cfg()).unwrap().value, r(1, 2));
    for p in [3, 5, 7] {
        assert_eq!(little_cross_exact(&GroupSpec::cyclic(p), &cfg()).unwrap().value, r(p as i64 - 1, p as i64));
    }
    assert_eq!(little_cross_exact(&g("6"), &cfg()).unwrap().value, r(7, 6));
}

#[test]
fn cross_examples() {
    assert_eq!(cross_exact(&g("2"), &cfg()).unwrap(), Rational::one());
    assert_eq!(cross_exact(&g("3"), &cfg()).unwrap(), Rational::one());
    assert_eq!(cross_exact(&g("6"), &cfg()).unwrap(), r(4, 3));
}

#[test]
fn witnesses_are_minimal_length_maximizers() {
    for group in groups_up_to(16) {
        let k = little_cross_exact(&group, &cfg()).unwrap();
        assert!(!k.witnesses.is_empty());
        let len = k.witnesses[0].sequence.len();
        for w in &k.witnesses {
            assert_eq!(w.sequence.len(), len, "{group}");
            assert!(sumset(&w.sequence).is_zero_sumfree(), "{group}: {}", w.sequence);
            assert_eq!(w.cross_number, k.value);
            assert_eq!(w.sequence.cross_number(), k.value);
            assert_eq!(w.profile.values().sum::<u64>(), len as u64);
        }
        assert!(k.witnesses.windows(2).all(|p| p[0].sequence.elements() < p[1].sequence.elements()));
    }
}

#[test]
fn budget_is_enforced() {
    let cfg = SearchConfig::with_budget(10);
    assert!(matches!(davenport_exact(&g("12"), &cfg), Err(Error::Budget { needed: 12, budget: 10, .. })));
    assert!(matches!(little_cross_exact(&g("2,6"), &cfg), Err(Error::Budget { .. })));
    // the budget applies to G_d, not G
    assert!(eta_relative_exact(&g("2,6"), 2, 2, &cfg).is_ok());
}

#[test]
fn pruning_does_not_change_results() {
    let fast = cfg();
    let slow = cfg().unpruned();
    for group in groups_up_to(12) {
        assert_eq!(davenport_exact(&group, &fast).unwrap(), davenport_exact(&group, &slow).unwrap(), "{group}");
        assert_eq!(eta_exact(&group, &fast).unwrap(), eta_exact(&group, &slow).unwrap(), "{group}");
        let a = little_cross_exact(&group, &fast).unwrap();
        let b = little_cross_exact(&group, &slow).unwrap();
        assert_eq!(a, b, "{group}");
        assert_eq!(cross_exact(&group, &fast).unwrap(), cross_exact(&group, &slow).unwrap(), "{group}");
        let n = group.exponent();
        for d in crate::numth::divisor_list(n) {
            for dp in crate::numth::divisor_list(d) {
                assert_eq!(
                    d_relative_exact(&group, dp, d, &fast).unwrap(),
                    d_relative_exact(&group, dp, d, &slow).unwrap()
                );
                assert_eq!(
                    eta_relative_exact(&group, dp, d, &fast).unwrap(),
                    eta_relative_exact(&group, dp, d, &slow).unwrap()
                );
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    for spec in ["2,6", "3,6", "20", "2,2,4"] {
        let group = g(spec);
        let runs: Vec<_> = [1, 2, 4, 0]
            .iter()
            .map(|&t| {
                let c = cfg().threads(t);
                (
                    davenport_exact(&group, &c).unwrap(),
                    eta_exact(&group, &c).unwrap(),
                    little_cross_exact(&group, &c).unwrap(),
                    cross_exact(&group, &c).unwrap(),
                )
            })
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{spec}");
    }
}

/// `K(G)` straight from the definition: every multiset of length at most
/// `|G|` that sums to zero and has no proper nonempty zero-sum subsequence.
fn cross_by_minimal_zero_sums(group: &GroupSpec) -> Rational {
    let elems: Vec<_> = group.elements().collect();
    let mut best = Rational::zero();
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(vec![], 0)];
    while let Some((idx, start)) = stack.pop() {
        if !idx.is_empty() {
            let seq = ElementSequence::new(group, idx.iter().map(|&i| elems[i].clone()).collect()).unwrap();
            if seq.sum() == group.zero() {
                let proper_zero = (1..(1u64 << idx.len()) - 1).any(|mask| {
                    let part = (0..idx.len())
                        .filter(|b| mask >> b & 1 == 1)
                        .fold(group.zero(), |acc, b| group.add(&acc, &elems[idx[b]]));
                    part == group.zero()
                });
                if !proper_zero && seq.cross_number() > best {
                    best = seq.cross_number();
                }
            }
        }
        if idx.len() < group.order() as usize {
            for next in start..elems.len() {
                let mut more = idx.clone();
                more.push(next);
                stack.push((more, next));
            }
        }
    }
    best
}

#[test]
fn cross_matches_direct_enumeration() {
    for spec in ["", "2", "3", "4", "2,2", "5", "6"] {
        let group = g(spec);
        assert_eq!(cross_exact(&group, &cfg()).unwrap(), cross_by_minimal_zero_sums(&group), "{spec}");
    }
}

#[test]
fn oracle_values_respect_basic_relations() {
    for group in groups_up_to(16) {
        let d = davenport_exact(&group, &cfg()).unwrap();
        let eta = eta_exact(&group, &cfg()).unwrap();
        let k = little_cross_exact(&group, &cfg()).unwrap().value;
        let big_k = cross_exact(&group, &cfg()).unwrap();
        let n = group.exponent();
        let p = crate::numth::least_prime_divisor(n);
        assert!(d <= eta, "{group}");
        assert!(kstar(&group) <= k, "{group}");
        assert!(kstar_upper(&group) <= big_k, "{group}");
        if !group.is_trivial() {
            assert!(k.clone() + Rational::recip_of(n) <= big_k, "{group}");
            assert!(big_k <= k.clone() + Rational::recip_of(p), "{group}");
        }
        assert!(Rational::from(d) <= Rational::from(n) * k + Rational::one(), "{group}");
    }
}
