//! Per-group reports that put every bound next to `k*(G)` and, for small
//! groups, the exact invariants.
//!
//! The JSON form is the interchange format: field order is fixed, rationals
//! are `"num/den"` strings, and nothing depends on timing or thread count,
//! so two runs on the same input produce identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    alpha_bound, davenport_from_k, gs_bound, gs_log_order, k_interval_from_k, kstar_lower, kz_bound,
    polytope_bound, qualitative_bound, BoundMethod, BoundNumber, BoundValue, Direction,
};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::kstar::{kstar, kstar_upper, kstar_witness};
use crate::numth::divisors;
use crate::oracle::{cross_exact, davenport_exact, eta_exact, little_cross_exact};
use crate::polytope::{build_polytope_with, maximize, membership, CapSource, DivisorCaps, ProfileVector};
use crate::provider::{InvariantProvider, Provenance, ProviderPolicy};
use crate::rational::Rational;

/// Default group-order limit for the exhaustive searches a report runs.
pub const DEFAULT_REPORT_BUDGET: u64 = 24;

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub policy: ProviderPolicy,
    /// Largest order for which `k`, `K`, `D` and `η` are brute-forced.
    pub exact_budget: u64,
    /// Also test whether the `k*` witness profile lies in `P_G ∩ H_G`.
    pub include_h: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions::with_budget(DEFAULT_REPORT_BUDGET)
    }
}

impl ReportOptions {
    pub fn with_budget(budget: u64) -> Self {
        ReportOptions {
            policy: ProviderPolicy::with_search_budget(budget),
            exact_budget: budget,
            include_h: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStats {
    pub order: u64,
    pub exponent: u64,
    pub rank: usize,
    /// Number of divisors of the exponent.
    pub tau: usize,
    /// Number of distinct primes dividing the exponent.
    pub omega: usize,
    /// Least prime divisor of the exponent, 1 for the trivial group.
    pub least_prime: u64,
}

impl GroupStats {
    pub fn of(group: &GroupSpec) -> Self {
        let ds = divisors(group.exponent()).expect("exponent >= 1");
        GroupStats {
            order: group.order(),
            exponent: group.exponent(),
            rank: group.rank(),
            tau: ds.tau(),
            omega: ds.omega,
            least_prime: ds.least_prime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactBlock {
    pub budget: u64,
    pub k: Rational,
    #[serde(rename = "K")]
    pub big_k: Rational,
    #[serde(rename = "D")]
    pub davenport: u64,
    pub eta: u64,
    /// Number of minimal-length zero-sumfree maximizers found.
    pub witnesses: usize,
    /// `[k + 1/n, k + 1/P⁻(n)]`, which must contain `K`.
    pub k_interval: (Rational, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unavailable {
    pub method: BoundMethod,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeBlock {
    pub optimum: Rational,
    pub argmax: ProfileVector,
    pub node_count: u64,
    pub caps: Vec<DivisorCaps>,
    pub sources: Vec<CapSource>,
    pub provenance_summary: BTreeMap<Provenance, usize>,
    /// Whether the `k*` witness profile lies in `P_G ∩ H_G`; present only
    /// when requested. Experimental.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kstar_profile_in_h: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DavenportFromK {
    pub value: u64,
    pub from: BoundMethod,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    /// `max(k*, k)`, the best lower bound for `k(G)` in the report.
    pub max_lower: Rational,
    pub min_upper: Rational,
    pub min_upper_method: BoundMethod,
    /// Every upper bound is at least `max_lower`; certified intervals count
    /// as passing unless they lie entirely below it.
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub watermark: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub group: String,
    pub label: String,
    pub stats: GroupStats,
    pub kstar: Rational,
    #[serde(rename = "Kstar")]
    pub kstar_upper: Rational,
    pub kstar_witness: String,
    pub exact: Option<ExactBlock>,
    pub bounds: Vec<BoundValue>,
    pub unavailable: Vec<Unavailable>,
    pub polytope: PolytopeBlock,
    pub davenport_from_k: Option<DavenportFromK>,
    pub verdict: Verdict,
}

fn exact_block(group: &GroupSpec, options: &ReportOptions) -> Result<Option<ExactBlock>> {
    if group.order() > options.exact_budget {
        return Ok(None);
    }
    let mut cfg = options.policy.search_config();
    cfg.budget = options.exact_budget;
    cfg.cross_budget = options.exact_budget;
    let k = little_cross_exact(group, &cfg)?;
    let big_k = cross_exact(group, &cfg)?;
    Ok(Some(ExactBlock {
        budget: options.exact_budget,
        k_interval: k_interval_from_k(group, &k.value),
        k: k.value,
        big_k,
        davenport: davenport_exact(group, &cfg)?,
        eta: eta_exact(group, &cfg)?,
        witnesses: k.witnesses.len(),
    }))
}

/// Builds the full report for one group.
pub fn build_report(group: &GroupSpec, options: &ReportOptions) -> Result<BoundReport> {
    let provider = InvariantProvider::new(options.policy.clone());
    let mut bounds = vec![kstar_lower(group)];
    let mut unavailable = Vec::new();
    let mut push = |method: BoundMethod, result: Result<BoundValue>| match result {
        Ok(b) => bounds.push(b),
        Err(e) => unavailable.push(Unavailable {
            method,
            reason: e.to_string(),
        }),
    };

    let polytope = build_polytope_with(group, &provider)?;
    let solution = maximize(&polytope);
    push(BoundMethod::Polytope, Ok(polytope_bound(&solution)));
    push(BoundMethod::Gs, Ok(gs_bound(group)));
    push(BoundMethod::GsLogOrder, Ok(gs_log_order(group)));
    if group.rank() == 1 {
        push(BoundMethod::Kz, kz_bound(group));
    }
    match group.rank() {
        0 | 1 => push(BoundMethod::AlphaRank1, alpha_bound(group)),
        2 => push(BoundMethod::AlphaRank2, alpha_bound(group)),
        _ => {}
    }
    let q = qualitative_bound(group, &provider);
    push(BoundMethod::QualitativeSharp, q.sharp);
    push(BoundMethod::QualitativeSmooth, q.smooth);

    let kstar_profile_in_h = if options.include_h {
        let mut profile = ProfileVector::zero(group.exponent());
        for (d, x) in kstar_witness(group).profile() {
            profile.set(d, x);
        }
        Some(membership(&profile, &polytope, true)?)
    } else {
        None
    };
    let polytope_block = PolytopeBlock {
        optimum: solution.optimum,
        argmax: solution.argmax,
        node_count: solution.node_count,
        caps: polytope.caps.clone(),
        provenance_summary: solution.provenance_summary,
        sources: polytope.sources.clone(),
        kstar_profile_in_h,
    };

    let exact = exact_block(group, options)?;
    let verdict = verdict(group, &bounds, exact.as_ref(), polytope.uses_conjecture())?;
    let davenport_from_k = bounds
        .iter()
        .filter(|b| b.direction == Direction::Upper && !b.conjectural)
        .filter_map(|b| b.value.as_exact().map(|v| (v, b.method)))
        .min_by(|a, b| a.0.cmp(b.0))
        .map(|(v, method)| DavenportFromK {
            value: davenport_from_k(group, v),
            from: method,
        });

    Ok(BoundReport {
        group: group.canonical(),
        label: group.label(),
        stats: GroupStats::of(group),
        kstar: kstar(group),
        kstar_upper: kstar_upper(group),
        kstar_witness: kstar_witness(group).to_string(),
        exact,
        bounds,
        unavailable,
        polytope: polytope_block,
        davenport_from_k,
        verdict,
    })
}

fn verdict(group: &GroupSpec, bounds: &[BoundValue], exact: Option<&ExactBlock>, conjecture: bool) -> Result<Verdict> {
    let mut max_lower = kstar(group);
    if let Some(e) = exact {
        max_lower = max_lower.max(e.k.clone());
    }
    let uppers: Vec<&BoundValue> = bounds.iter().filter(|b| b.direction == Direction::Upper).collect();
    let holds = uppers.iter().all(|b| b.value.not_below(&max_lower));
    let (min_upper, min_upper_method) = uppers
        .iter()
        .filter_map(|b| b.value.as_exact().map(|v| (v.clone(), b.method)))
        .min_by(|a, b| a.0.cmp(&b.0))
        .ok_or_else(|| Error::Domain("no exact upper bound".into()))?;
    let conjectural: Vec<String> = bounds
        .iter()
        .filter(|b| b.conjectural)
        .map(|b| b.method.to_string())
        .collect();
    let watermark = if conjecture || !conjectural.is_empty() {
        let mut methods = conjectural;
        if conjecture && !methods.contains(&"polytope".to_string()) {
            methods.push("polytope".into());
        }
        Some(format!("CONJECTURAL: uses conjectured η values in {}", methods.join(", ")))
    } else {
        None
    };
    Ok(Verdict {
        max_lower,
        min_upper,
        min_upper_method,
        holds,
        watermark,
    })
}

impl BoundReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("report JSON", e.to_string()))
    }

    /// One row per bound.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["group", "method", "direction", "value", "decimal", "conjectural", "assumptions"])
            .expect("in-memory write");
        for b in &self.bounds {
            let direction = match b.direction {
                Direction::Lower => "lower",
                Direction::Upper => "upper",
            };
            let value = match &b.value {
                BoundNumber::Exact(r) => r.to_string(),
                BoundNumber::Interval(i) => format!("[{},{}]", i.lo, i.hi),
            };
            w.write_record([
                self.group.as_str(),
                &b.method.to_string(),
                direction,
                &value,
                &b.value.decimal(),
                if b.conjectural { "true" } else { "false" },
                &b.assumptions.join("; "),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Plain-text summary for terminals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let s = &self.stats;
        out += &format!("group      {} ({})\n", self.label, self.group);
        out += &format!(
            "stats      |G|={} exp={} rank={} tau={} omega={} P-={}\n",
            s.order, s.exponent, s.rank, s.tau, s.omega, s.least_prime
        );
        out += &format!("k*         {}\nK*         {}\n", self.kstar, self.kstar_upper);
        match &self.exact {
            Some(e) => {
                out += &format!(
                    "exact      k={} K={} D={} eta={} (budget {})\n",
                    e.k, e.big_k, e.davenport, e.eta, e.budget
                );
            }
            None => out += "exact      not computed (group above budget)\n",
        }
        out += "bounds\n";
        for b in &self.bounds {
            let mark = if b.conjectural { "  [CONJECTURAL]" } else { "" };
            out += &format!(
                "  {:<20} {:<6} {:<28} ~{}{}\n",
                b.method.to_string(),
                if b.direction == Direction::Lower { "lower" } else { "upper" },
                b.value.to_string(),
                b.value.decimal(),
                mark
            );
        }
        for u in &self.unavailable {
            out += &format!("  {:<20} unavailable: {}\n", u.method.to_string(), u.reason);
        }
        out += &format!(
            "polytope   optimum {} at {:?}\n",
            self.polytope.optimum,
            self.polytope.argmax.entries()
        );
        let v = &self.verdict;
        out += &format!(
            "verdict    {} (max lower {} <= min upper {} from {})\n",
            if v.holds { "holds" } else { "VIOLATED" },
            v.max_lower,
            v.min_upper,
            v.min_upper_method
        );
        if let Some(w) = &v.watermark {
            out += &format!("{w}\n");
        }
        out
    }
}
