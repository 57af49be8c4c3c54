//! Brute-force computation of zero-sum invariants on small groups.
//!
//! These are the ground truth every formula and bound in the crate is
//! checked against, so they use nothing beyond the definitions: a search
//! over multisets of group elements, tracking subsums.

mod search;
mod sumset;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ElementSequence, GroupSpec};
use crate::numth::gcd;
use crate::rational::Rational;

use search::{
    AvoidRule, BranchAndBound, Canonical, CrossRule, LengthRule, LittleCrossRule, Memoized, Rule, ShortAvoidRule,
};
use table::GroupTable;

pub use sumset::{sumset, SumsetState};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest group order searched for `D`, `η` and the relative variants.
    pub budget: u64,
    /// Largest group order searched for `k` and `K`.
    pub cross_budget: u64,
    /// Cache per-state optima. When false every multiset is visited.
    pub prune: bool,
    /// Worker threads for the first search level; 0 uses the global rayon
    /// pool, 1 runs sequentially.
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 64,
            cross_budget: 32,
            prune: true,
            threads: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: u64) -> Self {
        SearchConfig {
            budget,
            cross_budget: budget,
            ..Default::default()
        }
    }

    pub fn unpruned(mut self) -> Self {
        self.prune = false;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    fn check(&self, what: &str, size: u64, budget: u64) -> Result<()> {
        if size > budget {
            return Err(Error::Budget {
                what: what.into(),
                needed: size as usize,
                budget: budget as usize,
            });
        }
        Ok(())
    }

    fn run<R: Rule>(&self, rule: &R) -> Option<R::Value> {
        if !self.prune {
            return Canonical::new(rule).solve();
        }
        self.solve_memo(&Memoized::new(rule))
    }

    fn optimal_multisets<R: Rule>(&self, rule: &R) -> Vec<Vec<usize>> {
        if !self.prune {
            return Canonical::new(rule).optimal_multisets();
        }
        let memo = Memoized::new(rule);
        self.solve_memo(&memo);
        memo.optimal_multisets()
    }

    fn run_length<R: LengthRule>(&self, rule: &R) -> u32 {
        if !self.prune {
            return Canonical::new(rule).solve().expect("the empty sequence is admissible");
        }
        let bb = BranchAndBound::new(rule);
        self.in_pool(|parallel| bb.solve(parallel))
    }

    fn solve_memo<R: Rule>(&self, memo: &Memoized<'_, R>) -> Option<R::Value> {
        self.in_pool(|parallel| memo.solve(parallel))
    }

    fn in_pool<T: Send>(&self, job: impl FnOnce(bool) -> T + Send) -> T {
        match self.threads {
            1 => job(false),
            0 => job(true),
            n => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool")
                .install(|| job(true)),
        }
    }
}

/// `G_d` realized as `⊕ C_{gcd(d, n_i)}` in the coordinates `a'_i` of
/// `a_i = (n_i / gcd(d, n_i)) a'_i`.
fn torsion_subgroup(group: &GroupSpec, d: u64) -> GroupSpec {
    let moduli: Vec<u64> = group.factors().iter().map(|&n| gcd(d, n)).collect();
    GroupSpec::from_moduli(&moduli)
}

fn check_pair(group: &GroupSpec, d_prime: u64, d: u64) -> Result<()> {
    let n = group.exponent();
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::Domain(format!("{d} does not divide the exponent {n}")));
    }
    if d_prime == 0 || !d.is_multiple_of(d_prime) {
        return Err(Error::Domain(format!("{d_prime} does not divide {d}")));
    }
    Ok(())
}

fn longest_avoiding(table: &GroupTable, forbidden_order: u64, short: Option<u64>, cfg: &SearchConfig) -> u64 {
    let universe: Vec<usize> = (0..table.size).collect();
    let forbidden = table.torsion(forbidden_order);
    let best = match short {
        None => cfg.run_length(&AvoidRule {
            table,
            universe,
            forbidden,
        }),
        Some(bound) => cfg.run_length(&ShortAvoidRule {
            table,
            universe,
            forbidden,
            bound: bound as usize,
        }),
    };
    u64::from(best)
}

/// `D(G)`: one more than the longest zero-sumfree sequence.
pub fn davenport_exact(group: &GroupSpec, cfg: &SearchConfig) -> Result<u64> {
    cfg.check("D(G)", group.order(), cfg.budget)?;
    let table = GroupTable::new(group);
    Ok(longest_avoiding(&table, 1, None, cfg) + 1)
}

/// `η(G)`: one more than the longest sequence without a zero-sum
/// subsequence of length at most `exp(G)`.
pub fn eta_exact(group: &GroupSpec, cfg: &SearchConfig) -> Result<u64> {
    cfg.check("η(G)", group.order(), cfg.budget)?;
    let table = GroupTable::new(group);
    Ok(longest_avoiding(&table, 1, Some(group.exponent()), cfg) + 1)
}

/// `D_(d',d)(G)`: least `t` such that every sequence of `G_d` of length `t`
/// has a nonempty subsequence with sum in `G_{d/d'}`.
pub fn d_relative_exact(group: &GroupSpec, d_prime: u64, d: u64, cfg: &SearchConfig) -> Result<u64> {
    check_pair(group, d_prime, d)?;
    let sub = torsion_subgroup(group, d);
    cfg.check("D_(d',d)(G)", sub.order(), cfg.budget)?;
    let table = GroupTable::new(&sub);
    Ok(longest_avoiding(&table, d / d_prime, None, cfg) + 1)
}

/// `η_(d',d)(G)`: as [`d_relative_exact`] with the subsequence length
/// limited to `d'`.
pub fn eta_relative_exact(group: &GroupSpec, d_prime: u64, d: u64, cfg: &SearchConfig) -> Result<u64> {
    check_pair(group, d_prime, d)?;
    let sub = torsion_subgroup(group, d);
    cfg.check("η_(d',d)(G)", sub.order(), cfg.budget)?;
    let table = GroupTable::new(&sub);
    Ok(longest_avoiding(&table, d / d_prime, Some(d_prime), cfg) + 1)
}

/// A zero-sumfree sequence of maximal cross number, of minimal length
/// among those.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalWitness {
    #[serde(with = "witness_elems")]
    pub sequence: ElementSequence,
    pub cross_number: Rational,
    /// `x_d = |S_d|` for every divisor `d` of the exponent.
    pub profile: BTreeMap<u64, u64>,
}

mod witness_elems {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        group: GroupSpec,
        elements: Vec<crate::group::GroupElement>,
    }

    pub fn serialize<S: Serializer>(seq: &ElementSequence, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            group: seq.group().clone(),
            elements: seq.elements().to_vec(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ElementSequence, D::Error> {
        let r = Repr::deserialize(d)?;
        ElementSequence::new(&r.group, r.elements).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LittleCross {
    pub value: Rational,
    /// Every minimal-length maximizer, in lexicographic element order.
    pub witnesses: Vec<ExtremalWitness>,
}

fn zero_sumfree_rule(table: &GroupTable) -> AvoidRule<'_> {
    AvoidRule {
        table,
        universe: (1..table.size).collect(),
        forbidden: vec![0],
    }
}

/// `k(G)`, the maximal cross number of a zero-sumfree sequence, with all
/// minimal-length maximizers.
pub fn little_cross_exact(group: &GroupSpec, cfg: &SearchConfig) -> Result<LittleCross> {
    cfg.check("k(G)", group.order(), cfg.cross_budget)?;
    let table = GroupTable::new(group);
    let rule = LittleCrossRule {
        inner: zero_sumfree_rule(&table),
    };
    let mut witnesses: Vec<ExtremalWitness> = cfg
        .optimal_multisets(&rule)
        .into_iter()
        .map(|idx| {
            let sequence = ElementSequence::from_indices(group, &idx);
            ExtremalWitness {
                cross_number: sequence.cross_number(),
                profile: sequence.profile(),
                sequence,
            }
        })
        .collect();
    witnesses.sort_by(|a, b| a.sequence.elements().cmp(b.sequence.elements()));
    let value = witnesses
        .first()
        .map(|w| w.cross_number.clone())
        .unwrap_or_default();
    Ok(LittleCross { value, witnesses })
}

/// `K(G)`, the maximal cross number of a minimal zero-sum sequence. The
/// one-element sequence `(0)` only counts for the trivial group.
pub fn cross_exact(group: &GroupSpec, cfg: &SearchConfig) -> Result<Rational> {
    cfg.check("K(G)", group.order(), cfg.cross_budget)?;
    if group.is_trivial() {
        return Ok(Rational::one());
    }
    let table = GroupTable::new(group);
    let rule = CrossRule {
        inner: zero_sumfree_rule(&table),
    };
    let scaled = cfg.run(&rule).expect("a nonzero element exists");
    Ok(Rational::new(scaled as i64, group.exponent() as i64))
}

#[cfg(test)]
mod tests;
