//! Finite slices of group families whose smallest prime grows, for
//! tabulating how the bounds behave along them.
//!
//! The family `E(l_1, …, l_r)` contains the groups `C_{n_1} ⊕ … ⊕ C_{n_r}`
//! with `ω(n_i) = l_i` and `gcd(n_i, n_r/n_i) = 1`. Members are generated
//! from runs of consecutive primes `q_1 < … < q_{l_r}` starting at each
//! prime `p` up to a limit, with `n_i = q_1 ⋯ q_{l_i}`; they are listed by
//! increasing `P⁻(n_r) = p`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{alpha_bound, gs_bound, kz_bound, polytope_bound, qualitative_bound, BoundNumber};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::kstar::kstar;
use crate::numth::{gcd, least_prime_divisor, omega};
use crate::polytope::{build_polytope_with, maximize};
use crate::primes::PrimeTable;
use crate::provider::{InvariantProvider, ProviderPolicy};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `C_n` with `ω(n) = omega`.
    Cyclic { omega: usize, max_prime: u64 },
    /// `C_n^rank` with `ω(n) = omega`.
    Power { rank: usize, omega: usize, max_prime: u64 },
    /// `E(l_1, …, l_r)`.
    Profile { ls: Vec<usize>, max_prime: u64 },
}

impl FamilySpec {
    /// The `l_i`, nondecreasing.
    pub fn ls(&self) -> Vec<usize> {
        match self {
            FamilySpec::Cyclic { omega, .. } => vec![*omega],
            FamilySpec::Power { rank, omega, .. } => vec![*omega; *rank],
            FamilySpec::Profile { ls, .. } => ls.clone(),
        }
    }

    pub fn max_prime(&self) -> u64 {
        match self {
            FamilySpec::Cyclic { max_prime, .. }
            | FamilySpec::Power { max_prime, .. }
            | FamilySpec::Profile { max_prime, .. } => *max_prime,
        }
    }

    /// `Σ l_i`, the value `k` tends to along the family.
    pub fn limit(&self) -> usize {
        self.ls().iter().sum()
    }

    /// Members in order of increasing least prime. Members whose factors
    /// overflow `u64` are dropped.
    pub fn members(&self) -> Result<Vec<GroupSpec>> {
        let ls = self.ls();
        if ls.is_empty() || ls.contains(&0) {
            return Err(Error::Domain("every l_i must be at least 1".into()));
        }
        if ls.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain(format!("{ls:?} is not nondecreasing")));
        }
        let top = *ls.last().expect("nonempty");
        let mut table = PrimeTable::with_count(64);
        let mut out = Vec::new();
        let mut start = 1;
        loop {
            table.extend_to(start + top);
            let p = table.nth(start);
            if p > self.max_prime() {
                break;
            }
            let factors: Option<Vec<u64>> = ls.iter().map(|&l| table.product(start, l)).collect();
            if let Some(factors) = factors {
                out.push(GroupSpec::new(factors).expect("nested squarefree products"));
            }
            start += 1;
        }
        if out.is_empty() {
            return Err(Error::Domain(format!("no member has least prime <= {}", self.max_prime())));
        }
        Ok(out)
    }
}

/// Membership in `E(l_1, …, l_r)`: `ω(n_i) = l_i` and `gcd(n_i, n_r/n_i) = 1`.
pub fn in_family(group: &GroupSpec, ls: &[usize]) -> bool {
    let f = group.factors();
    let n = group.exponent();
    f.len() == ls.len() && f.iter().zip(ls).all(|(&ni, &l)| omega(ni) == l && gcd(ni, n / ni) == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMethod {
    Alpha,
    Gs,
    Kz,
    Sharp,
    Smooth,
    Polytope,
}

impl FamilyMethod {
    pub const ALL: [FamilyMethod; 6] = [
        FamilyMethod::Alpha,
        FamilyMethod::Gs,
        FamilyMethod::Kz,
        FamilyMethod::Sharp,
        FamilyMethod::Smooth,
        FamilyMethod::Polytope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyMethod::Alpha => "alpha",
            FamilyMethod::Gs => "gs",
            FamilyMethod::Kz => "kz",
            FamilyMethod::Sharp => "sharp",
            FamilyMethod::Smooth => "smooth",
            FamilyMethod::Polytope => "polytope",
        }
    }
}

impl fmt::Display for FamilyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::parse(s, "expected one of alpha, gs, kz, sharp, smooth, polytope"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub group: String,
    pub least_prime: u64,
    pub limit: usize,
    pub kstar: Rational,
    /// One entry per requested method, `None` where it does not apply.
    pub values: Vec<(FamilyMethod, Option<BoundNumber>)>,
}

fn evaluate(group: &GroupSpec, method: FamilyMethod, provider: &InvariantProvider) -> Result<Option<BoundNumber>> {
    let value = match method {
        FamilyMethod::Alpha => alpha_bound(group).ok().map(|b| b.value),
        FamilyMethod::Gs => Some(gs_bound(group).value),
        FamilyMethod::Kz => kz_bound(group).ok().map(|b| b.value),
        FamilyMethod::Sharp => qualitative_bound(group, provider).sharp.ok().map(|b| b.value),
        FamilyMethod::Smooth => qualitative_bound(group, provider).smooth.ok().map(|b| b.value),
        FamilyMethod::Polytope => {
            let p = build_polytope_with(group, provider)?;
            Some(polytope_bound(&maximize(&p)).value)
        }
    };
    Ok(value)
}

/// Evaluates the requested bounds on every member of the family.
pub fn family_table(spec: &FamilySpec, methods: &[FamilyMethod], policy: &ProviderPolicy) -> Result<Vec<FamilyRow>> {
    let provider = InvariantProvider::new(policy.clone());
    spec.members()?
        .into_iter()
        .map(|group| {
            let values = methods
                .iter()
                .map(|&m| Ok((m, evaluate(&group, m, &provider)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(FamilyRow {
                least_prime: least_prime_divisor(group.exponent()),
                limit: spec.limit(),
                kstar: kstar(&group),
                group: group.canonical(),
                values,
            })
        })
        .collect()
}

/// CSV with exact and decimal columns for `k*` and each method. The
/// `limit` column repeats `Σ l_i` as a reference line.
pub fn family_csv(rows: &[FamilyRow], methods: &[FamilyMethod]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["group".to_string(), "least_prime".into(), "limit".into(), "kstar".into(), "kstar_decimal".into()];
    for m in methods {
        header.push(m.name().into());
        header.push(format!("{}_decimal", m.name()));
    }
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        let mut rec = vec![
            row.group.clone(),
            row.least_prime.to_string(),
            row.limit.to_string(),
            row.kstar.to_string(),
            row.kstar.to_decimal(9),
        ];
        for (_, v) in &row.values {
            match v {
                Some(BoundNumber::Exact(r)) => {
                    rec.push(r.to_string());
                    rec.push(r.to_decimal(9));
                }
                Some(BoundNumber::Interval(i)) => {
                    rec.push(format!("[{},{}]", i.lo, i.hi));
                    rec.push(format!("{:.9}", i.mid()));
                }
                None => {
                    rec.push(String::new());
                    rec.push(String::new());
                }
            }
        }
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_primes() {
        let spec = FamilySpec::Cyclic { omega: 1, max_prime: 97 };
        let members = spec.members().unwrap();
        assert_eq!(members.len(), 25);
        assert_eq!(members[0], GroupSpec::cyclic(2));
        assert_eq!(members[24], GroupSpec::cyclic(97));
        assert!(members.iter().all(|g| in_family(g, &[1])));
    }

    #[test]
    fn profile_members_satisfy_the_predicate() {
        let spec = FamilySpec::Profile { ls: vec![1, 2], max_prime: 50 };
        let members = spec.members().unwrap();
        assert_eq!(members[0].factors(), &[2, 6]);
        assert_eq!(members[1].factors(), &[3, 15]);
        assert!(members.iter().all(|g| in_family(g, &[1, 2])));
        assert!(members.windows(2).all(|w| w[0].factors()[0] < w[1].factors()[0]));
        assert_eq!(spec.limit(), 3);

        let spec = FamilySpec::Profile { ls: vec![1, 2, 3], max_prime: 30 };
        assert!(spec.members().unwrap().iter().all(|g| in_family(g, &[1, 2, 3])));
    }

    #[test]
    fn predicate_rejects_non_members() {
        assert!(!in_family(&GroupSpec::new(vec![2, 4]).unwrap(), &[1, 1]));
        assert!(!in_family(&GroupSpec::new(vec![6, 6]).unwrap(), &[1, 2]));
        assert!(in_family(&GroupSpec::new(vec![6, 6]).unwrap(), &[2, 2]));
        assert!(!in_family(&GroupSpec::new(vec![2, 12]).unwrap(), &[1, 2]));
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(FamilySpec::Profile { ls: vec![2, 1], max_prime: 10 }.members().is_err());
        assert!(FamilySpec::Profile { ls: vec![], max_prime: 10 }.members().is_err());
        assert!(FamilySpec::Cyclic { omega: 1, max_prime: 1 }.members().is_err());
    }

    #[test]
    fn squares_of_primes_track_kstar() {
        let spec = FamilySpec::Power { rank: 2, omega: 1, max_prime: 60 };
        let methods = [FamilyMethod::Sharp, FamilyMethod::Smooth, FamilyMethod::Polytope];
        let rows = family_table(&spec, &methods, &ProviderPolicy::without_search()).unwrap();
        for row in rows {
            for (_, v) in &row.values {
                let v = v.as_ref().unwrap().as_exact().unwrap();
                assert_eq!(v, &row.kstar, "{}", row.group);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let spec = FamilySpec::Cyclic { omega: 2, max_prime: 7 };
        let methods = [FamilyMethod::Alpha, FamilyMethod::Kz];
        let rows = family_table(&spec, &methods, &ProviderPolicy::default()).unwrap();
        let text = family_csv(&rows, &methods);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "group,least_prime,limit,kstar,kstar_decimal,alpha,alpha_decimal,kz,kz_decimal");
        assert!(lines[1].starts_with("6,2,2,7/6,1.166666666,4/3,1.333333333,4,4.000000000"));
        assert_eq!(lines.len(), 5);
    }
}
