//! The profile polytope of a group and the integer maximization of the
//! cross number over it.
//!
//! A profile is a vector `x` indexed by the divisors `d` of `n = exp(G)`,
//! where `x_d` counts the elements of order `d` in a sequence. The polytope
//! `P_G` is cut out by
//!
//! * `x_d <= f_cap(d) = min_{d' | d, d' > 1} η(G_υ(d',d)) - 1`,
//! * `Σ_{d' | d} x_{d'} <= g_cap(d) = D(G_υ(d,d)) - 1`,
//!
//! and the half-space `H_G` by `Σ x_d / d >= k*(G)`. The profile of a
//! zero-sumfree sequence of maximal cross number and minimal length lies in
//! `P_G ∩ H_G`, so `max_{x ∈ P_G} Σ x_d / d` bounds `k(G)` from above.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::kstar::kstar;
use crate::numth::divisors;
use crate::oracle::{little_cross_exact, SearchConfig};
use crate::provider::{InvariantProvider, Provenance, ProviderPolicy, ValueWithProvenance};
use crate::rational::Rational;

/// `x_d` for every divisor `d` of the exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProfileVector(BTreeMap<u64, u64>);

impl ProfileVector {
    pub fn new(entries: BTreeMap<u64, u64>) -> Self {
        ProfileVector(entries)
    }

    /// The all-zero profile over the divisors of `n`.
    pub fn zero(n: u64) -> Self {
        let ds = divisors(n).expect("n >= 1");
        ProfileVector(ds.list.iter().map(|&d| (d, 0)).collect())
    }

    pub fn get(&self, d: u64) -> u64 {
        self.0.get(&d).copied().unwrap_or(0)
    }

    pub fn set(&mut self, d: u64, count: u64) {
        self.0.insert(d, count);
    }

    pub fn entries(&self) -> &BTreeMap<u64, u64> {
        &self.0
    }

    /// `Σ x_d / d`.
    pub fn cross_number(&self) -> Rational {
        self.0.iter().map(|(&d, &x)| Rational::from(x) / Rational::from(d)).sum()
    }
}

impl From<BTreeMap<u64, u64>> for ProfileVector {
    fn from(entries: BTreeMap<u64, u64>) -> Self {
        ProfileVector(entries)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorCaps {
    pub d: u64,
    /// `None` stands for `+∞`, the empty minimum at `d = 1`.
    pub f_cap: Option<u64>,
    pub g_cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapKind {
    /// Per-order cap from `η`.
    F,
    /// Cumulative cap from `D`.
    G,
}

/// One invariant value that went into a cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapSource {
    pub cap: CapKind,
    pub d_prime: u64,
    pub d: u64,
    /// `G_υ(d',d)` in canonical form.
    pub upsilon: String,
    #[serde(flatten)]
    pub value: ValueWithProvenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfilePolytope {
    pub group: String,
    pub n: u64,
    /// Ascending in `d`.
    pub caps: Vec<DivisorCaps>,
    /// `k*(G)`, the threshold of the half-space `H_G`.
    pub h_threshold: Rational,
    pub sources: Vec<CapSource>,
}

impl ProfilePolytope {
    pub fn divisors(&self) -> impl Iterator<Item = u64> + '_ {
        self.caps.iter().map(|c| c.d)
    }

    fn caps_of(&self, d: u64) -> Result<&DivisorCaps> {
        self.caps
            .iter()
            .find(|c| c.d == d)
            .ok_or_else(|| Error::Domain(format!("{d} does not divide {}", self.n)))
    }

    pub fn f_cap(&self, d: u64) -> Result<Option<u64>> {
        Ok(self.caps_of(d)?.f_cap)
    }

    pub fn g_cap(&self, d: u64) -> Result<u64> {
        Ok(self.caps_of(d)?.g_cap)
    }

    pub fn set_f_cap(&mut self, d: u64, cap: Option<u64>) -> Result<()> {
        self.caps
            .iter_mut()
            .find(|c| c.d == d)
            .map(|c| c.f_cap = cap)
            .ok_or_else(|| Error::Domain(format!("{d} does not divide {}", self.n)))
    }

    pub fn set_g_cap(&mut self, d: u64, cap: u64) -> Result<()> {
        self.caps
            .iter_mut()
            .find(|c| c.d == d)
            .map(|c| c.g_cap = cap)
            .ok_or_else(|| Error::Domain(format!("{d} does not divide {}", self.n)))
    }

    /// How many cap inputs have each provenance.
    pub fn provenance_summary(&self) -> BTreeMap<Provenance, usize> {
        let mut out = BTreeMap::new();
        for s in &self.sources {
            *out.entry(s.value.provenance).or_insert(0) += 1;
        }
        out
    }

    pub fn all_exact(&self) -> bool {
        self.sources.iter().all(|s| s.value.provenance.is_exact())
    }

    pub fn uses_conjecture(&self) -> bool {
        self.sources.iter().any(|s| s.value.provenance == Provenance::Conjectural)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeSolution {
    pub optimum: Rational,
    pub argmax: ProfileVector,
    pub node_count: u64,
    pub provenance_summary: BTreeMap<Provenance, usize>,
}

/// Builds `P_G` with invariant values from a fresh provider.
pub fn build_polytope(group: &GroupSpec, policy: &ProviderPolicy) -> Result<ProfilePolytope> {
    build_polytope_with(group, &InvariantProvider::new(policy.clone()))
}

/// Builds `P_G`, reusing the provider's cached values.
pub fn build_polytope_with(group: &GroupSpec, provider: &InvariantProvider) -> Result<ProfilePolytope> {
    let n = group.exponent();
    let ds = divisors(n)?;
    let mut caps = Vec::with_capacity(ds.tau());
    let mut sources = Vec::new();
    for &d in ds.list.iter() {
        let mut f_cap: Option<u64> = None;
        for &dp in ds.list.iter().filter(|&&dp| dp > 1 && d % dp == 0) {
            let ups = group.upsilon(dp, d)?.group;
            let eta = provider.eta(&ups)?;
            let cap = eta.value - 1;
            f_cap = Some(f_cap.map_or(cap, |c| c.min(cap)));
            sources.push(CapSource {
                cap: CapKind::F,
                d_prime: dp,
                d,
                upsilon: ups.canonical(),
                value: eta,
            });
        }
        let ups = group.upsilon(d, d)?.group;
        let dav = provider.davenport(&ups);
        let g_cap = dav.value - 1;
        sources.push(CapSource {
            cap: CapKind::G,
            d_prime: d,
            d,
            upsilon: ups.canonical(),
            value: dav,
        });
        caps.push(DivisorCaps { d, f_cap, g_cap });
    }
    Ok(ProfilePolytope {
        group: group.canonical(),
        n,
        caps,
        h_threshold: kstar(group),
        sources,
    })
}

/// Whether `x` lies in `P_G`, or in `P_G ∩ H_G` when `include_h` is set.
/// `x` must be indexed by exactly the divisors of `n`.
pub fn membership(x: &ProfileVector, polytope: &ProfilePolytope, include_h: bool) -> Result<bool> {
    let keys: Vec<u64> = x.entries().keys().copied().collect();
    let ds: Vec<u64> = polytope.divisors().collect();
    if keys != ds {
        return Err(Error::Domain(format!(
            "profile is indexed by {keys:?}, the polytope by {ds:?}"
        )));
    }
    for c in &polytope.caps {
        if c.f_cap.is_some_and(|cap| x.get(c.d) > cap) {
            return Ok(false);
        }
        let cumulative: u64 = ds.iter().filter(|&&dp| c.d % dp == 0).map(|&dp| x.get(dp)).sum();
        if cumulative > c.g_cap {
            return Ok(false);
        }
    }
    Ok(!include_h || x.cross_number() >= polytope.h_threshold)
}

struct Solver {
    /// `n / d`, the objective scaled by `n`; strictly decreasing.
    weight: Vec<u128>,
    f_cap: Vec<u64>,
    /// For each divisor, the indices of its multiples (itself included).
    multiples: Vec<Vec<usize>>,
    slack: Vec<u64>,
    x: Vec<u64>,
    best: Option<(u128, Vec<u64>)>,
    nodes: u64,
}

impl Solver {
    fn room(&self, i: usize) -> u64 {
        self.multiples[i]
            .iter()
            .map(|&e| self.slack[e])
            .min()
            .expect("d divides itself")
            .min(self.f_cap[i])
    }

    /// Optimum of a relaxation of the remaining problem: each `x_j` keeps
    /// its own caps against the current slacks, and only the cap at `n`,
    /// which every divisor feeds, couples them. With unit sizes the greedy
    /// fill by weight solves that relaxation exactly.
    fn bound(&self, from: usize) -> u128 {
        let mut capacity = *self.slack.last().expect("n is a divisor");
        let mut total = 0u128;
        for j in from..self.weight.len() {
            if capacity == 0 {
                break;
            }
            let take = self.room(j).min(capacity);
            total += take as u128 * self.weight[j];
            capacity -= take;
        }
        total
    }

    /// Depth-first over divisors in ascending order (descending weight),
    /// larger values first. Profiles are visited in decreasing lexicographic
    /// order and only strict improvements replace the incumbent, so the
    /// result is the lexicographically largest maximizer.
    fn search(&mut self, i: usize, value: u128) {
        self.nodes += 1;
        if i == self.weight.len() {
            if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
                self.best = Some((value, self.x.clone()));
            }
            return;
        }
        let room = self.room(i);
        for t in (0..=room).rev() {
            for &e in &self.multiples[i] {
                self.slack[e] -= t;
            }
            let gained = value + t as u128 * self.weight[i];
            let promising = match &self.best {
                None => true,
                Some((b, _)) => gained + self.bound(i + 1) > *b,
            };
            if promising {
                self.x[i] = t;
                self.search(i + 1, gained);
            }
            for &e in &self.multiples[i] {
                self.slack[e] += t;
            }
        }
        self.x[i] = 0;
    }
}

/// `max Σ x_d / d` over the integer points of `P_G` (the half-space is not
/// imposed), exact, with the lexicographically largest maximizer.
pub fn maximize(polytope: &ProfilePolytope) -> PolytopeSolution {
    let ds: Vec<u64> = polytope.divisors().collect();
    let n = polytope.n;
    let multiples = ds
        .iter()
        .map(|&d| (0..ds.len()).filter(|&e| ds[e].is_multiple_of(d)).collect())
        .collect();
    let mut solver = Solver {
        weight: ds.iter().map(|&d| (n / d) as u128).collect(),
        f_cap: polytope.caps.iter().map(|c| c.f_cap.unwrap_or(u64::MAX)).collect(),
        multiples,
        slack: polytope.caps.iter().map(|c| c.g_cap).collect(),
        x: vec![0; ds.len()],
        best: None,
        nodes: 0,
    };
    solver.search(0, 0);
    let (scaled, x) = solver.best.expect("the zero profile is feasible");
    let argmax = ProfileVector(ds.iter().copied().zip(x).collect());
    PolytopeSolution {
        optimum: Rational::from_bigints((scaled as u64).into(), n.into()),
        argmax,
        node_count: solver.nodes,
        provenance_summary: polytope.provenance_summary(),
    }
}

/// Checks that the profile of every minimal-length maximizer of `k(G)` lies
/// in `P_G ∩ H_G`, with the polytope built from exact values only.
pub fn verify_extremal_membership(group: &GroupSpec, cfg: &SearchConfig) -> Result<bool> {
    let mut policy = ProviderPolicy::with_search_budget(cfg.budget);
    policy.threads = cfg.threads;
    let polytope = build_polytope(group, &policy)?;
    if !polytope.all_exact() {
        return Err(Error::Policy(format!(
            "the polytope of {} needs values without exact provenance",
            group.canonical()
        )));
    }
    let k = little_cross_exact(group, cfg)?;
    for w in &k.witnesses {
        if !membership(&ProfileVector(w.profile.clone()), &polytope, true)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{groups_up_to, parse_group_spec};

    fn g(s: &str) -> GroupSpec {
        parse_group_spec(s).unwrap()
    }

    fn exact(s: &str) -> ProfilePolytope {
        build_polytope(&g(s), &ProviderPolicy::default()).unwrap()
    }

    fn profile(pairs: &[(u64, u64)]) -> ProfileVector {
        ProfileVector(pairs.iter().copied().collect())
    }

    #[test]
    fn build_examples() {
        let p = exact("3");
        assert_eq!(p.f_cap(3).unwrap(), Some(2));
        assert_eq!(p.g_cap(3).unwrap(), 2);
        assert_eq!(p.g_cap(1).unwrap(), 0);
        assert_eq!(p.f_cap(1).unwrap(), None);

        let p = exact("2,4");
        let s = p.sources.iter().find(|s| s.cap == CapKind::F && s.d_prime == 2 && s.d == 4).unwrap();
        assert_eq!(s.upsilon, "2");
        assert_eq!(s.value.value - 1, 1);

        let p = exact("");
        assert_eq!(p.caps, vec![DivisorCaps { d: 1, f_cap: None, g_cap: 0 }]);
        let sol = maximize(&p);
        assert_eq!(sol.optimum, Rational::zero());
        assert_eq!(sol.argmax, profile(&[(1, 0)]));
    }

    #[test]
    fn membership_examples() {
        let p = exact("3");
        assert!(membership(&profile(&[(1, 0), (3, 0)]), &p, false).unwrap());
        assert!(!membership(&profile(&[(1, 0), (3, 0)]), &p, true).unwrap());
        assert!(membership(&profile(&[(1, 0), (3, 2)]), &p, true).unwrap());
        assert!(!membership(&profile(&[(1, 0), (3, 3)]), &p, false).unwrap());
        assert!(!membership(&profile(&[(1, 1), (3, 0)]), &p, false).unwrap());
        assert!(membership(&profile(&[(3, 2)]), &p, false).is_err());
    }

    #[test]
    fn maximize_examples() {
        let sol = maximize(&exact("3"));
        assert_eq!(sol.optimum, Rational::new(2, 3));
        assert_eq!(sol.argmax, profile(&[(1, 0), (3, 2)]));
        for p in [2i64, 5, 7] {
            assert_eq!(maximize(&exact(&p.to_string())).optimum, Rational::new(p - 1, p));
        }
        let six = maximize(&exact("6")).optimum;
        assert!(six >= Rational::new(7, 6) && six <= Rational::new(4, 3), "{six}");
    }

    #[test]
    fn extremal_membership_examples() {
        for s in ["3", "2,2", "6"] {
            assert!(verify_extremal_membership(&g(s), &SearchConfig::default()).unwrap(), "{s}");
        }
    }

    #[test]
    fn non_exact_polytope_is_rejected() {
        let cfg = SearchConfig::with_budget(4);
        assert!(matches!(verify_extremal_membership(&g("2,2,2"), &cfg), Err(Error::Budget { .. })));
        assert!(matches!(verify_extremal_membership(&g("2,2,6"), &cfg), Err(Error::Policy(_))));
    }

    /// Exhaustive maximum over the box `∏ [0, cap(d)]`, with the infinite
    /// `f_cap(1)` replaced by `g_cap(1)`. Ties go to the lexicographically
    /// largest profile.
    fn brute_force(p: &ProfilePolytope) -> (Rational, ProfileVector) {
        let ds: Vec<u64> = p.divisors().collect();
        let m = ds.len();
        let caps: Vec<u64> = p.caps.iter().map(|c| c.f_cap.unwrap_or(c.g_cap).min(c.g_cap)).collect();
        let downsets: Vec<Vec<usize>> = (0..m).map(|e| (0..m).filter(|&i| ds[e].is_multiple_of(ds[i])).collect()).collect();
        let mut best: Option<(u64, Vec<u64>)> = None;
        let mut x = vec![0u64; m];
        loop {
            let feasible = (0..m).all(|e| downsets[e].iter().map(|&i| x[i]).sum::<u64>() <= p.caps[e].g_cap);
            if feasible {
                let val: u64 = (0..m).map(|i| x[i] * (p.n / ds[i])).sum();
                if best.as_ref().is_none_or(|(b, bx)| val > *b || (val == *b && x > *bx)) {
                    best = Some((val, x.clone()));
                }
            }
            let mut i = 0;
            while i < m && x[i] == caps[i] {
                x[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
            x[i] += 1;
        }
        let (val, x) = best.unwrap();
        (Rational::new(val as i64, p.n as i64), ProfileVector(ds.into_iter().zip(x).collect()))
    }

    #[test]
    fn solver_matches_exhaustive_enumeration() {
        for group in groups_up_to(36) {
            let p = build_polytope(&group, &ProviderPolicy::with_search_budget(16)).unwrap();
            if p.caps.len() > 6 {
                continue;
            }
            let sol = maximize(&p);
            let (opt, arg) = brute_force(&p);
            assert_eq!(sol.optimum, opt, "{group}");
            assert_eq!(sol.argmax, arg, "{group}");
        }
    }

    #[test]
    fn enlarging_a_cap_never_lowers_the_optimum() {
        for s in ["6", "12", "2,6", "3,6", "30"] {
            let p = exact(s);
            let base = maximize(&p).optimum;
            for d in p.divisors().collect::<Vec<_>>() {
                let mut q = p.clone();
                q.set_g_cap(d, p.g_cap(d).unwrap() + 1).unwrap();
                assert!(maximize(&q).optimum >= base, "{s} g {d}");
                let mut q = p.clone();
                q.set_f_cap(d, p.f_cap(d).unwrap().map(|c| c + 1)).unwrap();
                assert!(maximize(&q).optimum >= base, "{s} f {d}");
            }
        }
    }
}
