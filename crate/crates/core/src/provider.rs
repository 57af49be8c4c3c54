//! `D(G)` and `η(G)` values with their provenance.
//!
//! Bound construction asks this module for the invariants of many small
//! groups. Each answer says where it came from: a closed formula, an
//! exhaustive search, a certified upper bound, or (only when explicitly
//! allowed) a conjectured value.

use std::collections::BTreeMap;
use std::fmt;

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::oracle::{davenport_exact, eta_exact, SearchConfig};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactFormula,
    ExactSearch,
    UpperBound,
    Conjectural,
}

impl Provenance {
    pub fn is_exact(self) -> bool {
        matches!(self, Provenance::ExactFormula | Provenance::ExactSearch)
    }

    /// Exact values and upper bounds are safe to use as caps.
    pub fn is_sound_upper(self) -> bool {
        self != Provenance::Conjectural
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ExactFormula => "exact-formula",
            Provenance::ExactSearch => "exact-search",
            Provenance::UpperBound => "upper-bound",
            Provenance::Conjectural => "conjectural",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueWithProvenance {
    pub value: u64,
    pub provenance: Provenance,
    pub source_note: String,
}

impl ValueWithProvenance {
    fn new(value: u64, provenance: Provenance, note: impl Into<String>) -> Self {
        ValueWithProvenance {
            value,
            provenance,
            source_note: note.into(),
        }
    }
}

/// How invariant values may be obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderPolicy {
    pub allow_search: bool,
    /// Largest group order handed to the exhaustive search.
    pub search_budget: u64,
    /// Constants `c_r` with `η(C_p^r) <= c_r (p-1) + 1`, keyed by rank.
    c_r_values: BTreeMap<usize, Rational>,
    pub allow_conjectural: bool,
    /// Refuse instead of falling back to the crude `η` bound.
    pub strict: bool,
    /// Worker threads for searches, as in [`SearchConfig::threads`].
    pub threads: usize,
}

impl Default for ProviderPolicy {
    fn default() -> Self {
        let mut c_r_values = BTreeMap::new();
        c_r_values.insert(1, Rational::integer(1));
        c_r_values.insert(2, Rational::integer(3));
        ProviderPolicy {
            allow_search: true,
            search_budget: 32,
            c_r_values,
            allow_conjectural: false,
            strict: false,
            threads: 0,
        }
    }
}

impl ProviderPolicy {
    /// Formulas and fallbacks only.
    pub fn without_search() -> Self {
        ProviderPolicy {
            allow_search: false,
            ..Default::default()
        }
    }

    pub fn with_search_budget(budget: u64) -> Self {
        ProviderPolicy {
            search_budget: budget,
            ..Default::default()
        }
    }

    /// Sets `c_r`; values below `r` are rejected.
    pub fn set_c_r(&mut self, r: usize, value: Rational) -> Result<()> {
        if r == 0 {
            return Err(Error::Domain("c_r is defined for r >= 1".into()));
        }
        if value < Rational::from(r as u64) {
            return Err(Error::Domain(format!("c_{r} = {value} is below {r}")));
        }
        self.c_r_values.insert(r, value);
        Ok(())
    }

    pub fn c_r(&self, r: usize) -> Option<&Rational> {
        self.c_r_values.get(&r)
    }

    pub fn c_r_values(&self) -> &BTreeMap<usize, Rational> {
        &self.c_r_values
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            budget: self.search_budget,
            cross_budget: self.search_budget,
            ..SearchConfig::default()
        }
        .threads(self.threads)
    }

    fn can_search(&self, group: &GroupSpec) -> bool {
        self.allow_search && group.order() <= self.search_budget
    }
}

/// `D(G)`. Never fails: `|G|` is always a valid upper bound.
pub fn davenport_value(group: &GroupSpec, policy: &ProviderPolicy) -> ValueWithProvenance {
    use Provenance::*;
    if group.is_trivial() {
        return ValueWithProvenance::new(1, ExactFormula, "trivial group");
    }
    if let Some((p, exps)) = group.p_group() {
        let value = exps.iter().map(|&a| p.pow(a) - 1).sum::<u64>() + 1;
        return ValueWithProvenance::new(value, ExactFormula, "p-group: Σ(p^a_i - 1) + 1");
    }
    match group.factors() {
        [n] => return ValueWithProvenance::new(*n, ExactFormula, "cyclic: n"),
        [m, n] => return ValueWithProvenance::new(m + n - 1, ExactFormula, "rank 2: m + n - 1"),
        _ => {}
    }
    if policy.can_search(group) {
        if let Ok(value) = davenport_exact(group, &policy.search_config()) {
            return ValueWithProvenance::new(value, ExactSearch, "exhaustive search");
        }
    }
    ValueWithProvenance::new(group.order(), UpperBound, "D(G) <= |G|")
}

/// `η(G)`. Fails only in strict mode, when nothing better than the crude
/// bound `|G| (exp(G) - 1) + 1` is available.
pub fn eta_value(group: &GroupSpec, policy: &ProviderPolicy) -> Result<ValueWithProvenance> {
    use Provenance::*;
    if group.is_trivial() {
        return Ok(ValueWithProvenance::new(1, ExactFormula, "trivial group"));
    }
    match group.factors() {
        [n] => return Ok(ValueWithProvenance::new(*n, ExactFormula, "cyclic: n")),
        [m, n] => return Ok(ValueWithProvenance::new(2 * m + n - 2, ExactFormula, "rank 2: 2m + n - 2")),
        _ => {}
    }
    let r = group.rank();
    let elementary = group.elementary_prime();
    if elementary == Some(2) && r < 64 {
        return Ok(ValueWithProvenance::new(1 << r, ExactFormula, "C_2^r: 2^r"));
    }
    if policy.can_search(group) {
        if let Ok(value) = eta_exact(group, &policy.search_config()) {
            return Ok(ValueWithProvenance::new(value, ExactSearch, "exhaustive search"));
        }
    }
    if let Some(p) = elementary {
        if policy.allow_conjectural {
            match r {
                3 => return Ok(ValueWithProvenance::new(8 * p - 7, Conjectural, "conjectured η(C_p^3) = 8p - 7")),
                4 => return Ok(ValueWithProvenance::new(19 * p - 18, Conjectural, "conjectured η(C_p^4) = 19p - 18")),
                _ => {}
            }
        }
        if let Some(c) = policy.c_r(r) {
            let bound = (c * &Rational::from(p - 1)).ceil() + 1u32;
            let value = u64::try_from(bound).map_err(|_| Error::Domain(format!("c_{r}(p-1)+1 overflows")))?;
            return Ok(ValueWithProvenance::new(
                value,
                UpperBound,
                format!("η(C_p^r) <= c_r(p-1)+1 with c_{r} = {c}"),
            ));
        }
    }
    if policy.strict {
        return Err(Error::Policy(format!(
            "no exact value or certified bound for η({}) under the current policy",
            group.canonical()
        )));
    }
    let crude = group
        .order()
        .checked_mul(group.exponent() - 1)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::Domain("crude η bound overflows".into()))?;
    Ok(ValueWithProvenance::new(
        crude,
        UpperBound,
        "crude: some element repeats exp(G) times in |G|(exp(G)-1)+1 terms",
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Invariant {
    Davenport,
    Eta,
}

/// A policy together with a cache of the values already computed. Filling
/// the cache is idempotent, so concurrent lookups are safe.
#[derive(Debug, Default)]
pub struct InvariantProvider {
    policy: ProviderPolicy,
    cache: DashMap<(Invariant, GroupSpec), ValueWithProvenance>,
}

impl InvariantProvider {
    pub fn new(policy: ProviderPolicy) -> Self {
        InvariantProvider {
            policy,
            cache: DashMap::new(),
        }
    }

    pub fn policy(&self) -> &ProviderPolicy {
        &self.policy
    }

    pub fn davenport(&self, group: &GroupSpec) -> ValueWithProvenance {
        let key = (Invariant::Davenport, group.clone());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let v = davenport_value(group, &self.policy);
        self.cache.insert(key, v.clone());
        v
    }

    pub fn eta(&self, group: &GroupSpec) -> Result<ValueWithProvenance> {
        let key = (Invariant::Eta, group.clone());
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let v = eta_value(group, &self.policy)?;
        self.cache.insert(key, v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_spec;

    fn g(s: &str) -> GroupSpec {
        parse_group_spec(s).unwrap()
    }

    #[test]
    fn davenport_dispatch() {
        let p = ProviderPolicy::default();
        let v = davenport_value(&g("8"), &p);
        assert_eq!((v.value, v.provenance), (8, Provenance::ExactFormula));
        let v = davenport_value(&g("2,2,2"), &p);
        assert_eq!((v.value, v.provenance), (4, Provenance::ExactFormula));
        assert_eq!(davenport_value(&GroupSpec::trivial(), &p).value, 1);
        assert_eq!(davenport_value(&g("6,6"), &p).value, 11);

        let v = davenport_value(&g("2,2,6"), &p);
        assert_eq!(v.provenance, Provenance::ExactSearch);
        let v = davenport_value(&g("2,2,6"), &ProviderPolicy::without_search());
        assert_eq!((v.value, v.provenance), (24, Provenance::UpperBound));
        let v = davenport_value(&g("2,2,6"), &ProviderPolicy::with_search_budget(16));
        assert_eq!(v.provenance, Provenance::UpperBound);
    }

    #[test]
    fn eta_dispatch() {
        let p = ProviderPolicy::default();
        let v = eta_value(&g("3,3"), &p).unwrap();
        assert_eq!((v.value, v.provenance), (7, Provenance::ExactFormula));
        let v = eta_value(&g("2,2,2,2"), &p).unwrap();
        assert_eq!((v.value, v.provenance), (16, Provenance::ExactFormula));
        assert_eq!(eta_value(&g("12"), &p).unwrap().value, 12);

        let mut conj = ProviderPolicy::without_search();
        conj.allow_conjectural = true;
        let v = eta_value(&g("3,3,3"), &conj).unwrap();
        assert_eq!((v.value, v.provenance), (17, Provenance::Conjectural));
        let v = eta_value(&g("5,5,5,5"), &conj).unwrap();
        assert_eq!((v.value, v.provenance), (77, Provenance::Conjectural));
    }

    #[test]
    fn c_r_bound_rounds_up() {
        let mut p = ProviderPolicy::without_search();
        assert!(p.set_c_r(3, Rational::new(5, 2)).is_err());
        p.set_c_r(3, Rational::new(17, 2)).unwrap();
        let v = eta_value(&g("3,3,3"), &p).unwrap();
        assert_eq!((v.value, v.provenance), (18, Provenance::UpperBound));
    }

    #[test]
    fn strict_mode_refuses_crude_bound() {
        let mut p = ProviderPolicy::without_search();
        let v = eta_value(&g("2,2,4"), &p).unwrap();
        assert_eq!((v.value, v.provenance), (49, Provenance::UpperBound));
        p.strict = true;
        assert!(matches!(eta_value(&g("2,2,4"), &p), Err(Error::Policy(_))));
        assert!(matches!(eta_value(&g("3,3,3"), &p), Err(Error::Policy(_))));
        p.allow_search = true;
        assert_eq!(eta_value(&g("2,2,4"), &p).unwrap().provenance, Provenance::ExactSearch);
    }

    #[test]
    fn cache_returns_same_values() {
        let provider = InvariantProvider::new(ProviderPolicy::default());
        for s in ["2,2,4", "3,3", "", "2,2,2,2"] {
            let a = provider.eta(&g(s)).unwrap();
            assert_eq!(provider.eta(&g(s)).unwrap(), a);
            assert_eq!(a, eta_value(&g(s), provider.policy()).unwrap());
            assert_eq!(provider.davenport(&g(s)), davenport_value(&g(s), provider.policy()));
        }
    }
}
