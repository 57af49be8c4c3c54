use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crossnum::error::{Error, Result};
use crossnum::family::{family_csv, family_table, FamilyMethod, FamilySpec};
use crossnum::group::{parse_group_spec, GroupSpec};
use crossnum::kstar::{kstar, kstar_upper, kstar_witness};
use crossnum::oracle::{
    cross_exact, d_relative_exact, davenport_exact, eta_exact, eta_relative_exact, little_cross_exact, SearchConfig,
};
use crossnum::polytope::{build_polytope, maximize, membership, ProfileVector};
use crossnum::provider::ProviderPolicy;
use crossnum::rational::Rational;
use crossnum::report::{build_report, GroupStats, ReportOptions, DEFAULT_REPORT_BUDGET};
use crossnum::sequences::{
    check_sequences, limit_trajectory, sequence_triple, trajectory_csv, TrajectoryKind, DEFAULT_SEQUENCE_BUDGET,
};

#[derive(Parser)]
#[command(name = "crossnum", version, about = "Zero-sum invariants and cross number bounds of finite Abelian groups")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Accepted for compatibility; every command is deterministic already.
    #[arg(long, global = true)]
    seed_less: bool,
    /// Worker threads for searches (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Normal form, basic statistics, k*, K* and the k* witness.
    Info {
        /// Group as comma-separated cyclic orders, e.g. "2,4" ("" is trivial).
        group: String,
    },
    /// Brute-force value of one invariant.
    Exact {
        #[arg(value_enum)]
        invariant: Invariant,
        group: String,
        /// Largest group order searched.
        #[arg(long, default_value_t = 64)]
        budget: u64,
        /// `d',d` for the relative invariants.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Every bound for k(G) next to k*(G) and, for small groups, exact values.
    Report {
        group: String,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Also test the k* witness profile against the half-space (experimental).
        #[arg(long)]
        include_h: bool,
    },
    /// Dump the profile polytope and its maximum.
    Polytope {
        group: String,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Also test the k* witness and extremal profiles against the half-space (experimental).
        #[arg(long)]
        include_h: bool,
    },
    /// Bounds along a family of groups with growing least prime.
    Family {
        #[arg(value_enum)]
        kind: FamilyKind,
        /// Number of distinct primes of n (cyclic and power families).
        #[arg(long, default_value_t = 1)]
        omega: usize,
        /// Rank of the power family.
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Prime counts l_1,...,l_r of the profile family.
        #[arg(long, value_delimiter = ',')]
        ls: Vec<usize>,
        /// Largest least prime of a member.
        #[arg(long, default_value_t = 97)]
        max_prime: u64,
        /// Comma-separated subset of alpha,gs,kz,sharp,smooth,polytope.
        #[arg(long, value_delimiter = ',', default_value = "alpha,gs,kz,sharp,smooth,polytope")]
        methods: Vec<String>,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// The sequences alpha_l, beta_l, gamma_l.
    Seq {
        #[command(subcommand)]
        command: SeqCommand,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Invariant {
    #[value(name = "D")]
    Davenport,
    #[value(name = "eta")]
    Eta,
    #[value(name = "k")]
    LittleCross,
    #[value(name = "K")]
    Cross,
    #[value(name = "D-rel")]
    DavenportRelative,
    #[value(name = "eta-rel")]
    EtaRelative,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Cyclic,
    Power,
    Profile,
}

#[derive(Subcommand)]
enum SeqCommand {
    /// alpha_l and alpha_l / l.
    Alpha {
        #[arg(long)]
        l: usize,
    },
    /// beta_l and beta_l / l.
    Beta {
        #[arg(long)]
        l: usize,
    },
    /// gamma_l = 3 alpha_l - beta_l and gamma_l / l.
    Gamma {
        #[arg(long)]
        l: usize,
    },
    /// Check the sequence inequalities for every l up to max-l.
    Check {
        #[arg(long, default_value_t = DEFAULT_SEQUENCE_BUDGET)]
        max_l: usize,
        #[arg(long, default_value_t = DEFAULT_SEQUENCE_BUDGET)]
        budget: usize,
    },
    /// CSV of l, value_l and value_l / l.
    Trajectory {
        #[arg(value_enum)]
        kind: TrajectoryArg,
        #[arg(long)]
        max_l: usize,
        #[arg(long, default_value_t = DEFAULT_SEQUENCE_BUDGET)]
        budget: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrajectoryArg {
    Alpha,
    Beta,
}

#[derive(Args, Clone)]
struct PolicyArgs {
    /// Largest group order handed to exhaustive searches.
    #[arg(long, default_value_t = DEFAULT_REPORT_BUDGET)]
    budget: u64,
    /// Constant c_r for eta(C_p^r) <= c_r (p-1) + 1, as r=value (repeatable).
    #[arg(long = "c-r", value_name = "R=VALUE")]
    c_r: Vec<String>,
    /// Admit conjectured eta values (outputs are watermarked).
    #[arg(long)]
    allow_conjectural: bool,
    /// Refuse rather than fall back to crude eta bounds.
    #[arg(long)]
    strict: bool,
    /// Use formulas and fallbacks only.
    #[arg(long)]
    no_search: bool,
}

impl PolicyArgs {
    fn policy(&self, threads: usize) -> Result<ProviderPolicy> {
        let mut policy = ProviderPolicy::with_search_budget(self.budget);
        policy.allow_search = !self.no_search;
        policy.allow_conjectural = self.allow_conjectural;
        policy.strict = self.strict;
        policy.threads = threads;
        for item in &self.c_r {
            let (r, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse { input: item.clone(), reason: "expected r=value".into() })?;
            let r: usize = r
                .trim()
                .parse()
                .map_err(|_| Error::Parse { input: item.clone(), reason: "rank is not an integer".into() })?;
            let value: Rational = value.trim().parse()?;
            policy.set_c_r(r, value)?;
        }
        Ok(policy)
    }
}

fn group_arg(text: &str) -> Result<GroupSpec> {
    parse_group_spec(text)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value");
    s.push('\n');
    s
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn cmd_info(group: &GroupSpec, format: Format) -> String {
    let stats = GroupStats::of(group);
    let (ks, ku, witness) = (kstar(group), kstar_upper(group), kstar_witness(group).to_string());
    match format {
        Format::Json => pretty(&json!({
            "group": group.canonical(),
            "label": group.label(),
            "stats": stats,
            "kstar": ks,
            "Kstar": ku,
            "kstar_witness": witness,
        })),
        Format::Csv => {
            let header = ["group", "order", "exponent", "rank", "tau", "omega", "least_prime", "kstar", "Kstar"];
            csv_line(&header.map(String::from))
                + &csv_line(&[
                    group.canonical(),
                    stats.order.to_string(),
                    stats.exponent.to_string(),
                    stats.rank.to_string(),
                    stats.tau.to_string(),
                    stats.omega.to_string(),
                    stats.least_prime.to_string(),
                    ks.to_string(),
                    ku.to_string(),
                ])
        }
        Format::Table => format!(
            "group      {} ({})\norder      {}\nexponent   {}\nrank       {}\ntau        {}\nomega      {}\nP-         {}\nk*         {}\nK*         {}\nwitness    {}\n",
            group.label(),
            group.canonical(),
            stats.order,
            stats.exponent,
            stats.rank,
            stats.tau,
            stats.omega,
            stats.least_prime,
            ks,
            ku,
            witness
        ),
    }
}

fn parse_pair(text: Option<&str>) -> Result<(u64, u64)> {
    let text = text.ok_or_else(|| Error::Domain("relative invariants need --pair d',d".into()))?;
    let bad = || Error::Parse { input: text.into(), reason: "expected d',d".into() };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn cmd_exact(invariant: Invariant, group: &GroupSpec, budget: u64, pair: Option<&str>, threads: usize, format: Format) -> Result<String> {
    let cfg = SearchConfig::with_budget(budget).threads(threads);
    let start = Instant::now();
    let (name, value, extra) = match invariant {
        Invariant::Davenport => ("D", davenport_exact(group, &cfg)?.to_string(), None),
        Invariant::Eta => ("eta", eta_exact(group, &cfg)?.to_string(), None),
        Invariant::LittleCross => {
            let k = little_cross_exact(group, &cfg)?;
            ("k", k.value.to_string(), Some(k.witnesses.len()))
        }
        Invariant::Cross => ("K", cross_exact(group, &cfg)?.to_string(), None),
        Invariant::DavenportRelative => {
            let (dp, d) = parse_pair(pair)?;
            ("D-rel", d_relative_exact(group, dp, d, &cfg)?.to_string(), None)
        }
        Invariant::EtaRelative => {
            let (dp, d) = parse_pair(pair)?;
            ("eta-rel", eta_relative_exact(group, dp, d, &cfg)?.to_string(), None)
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(match format {
        Format::Json => pretty(&json!({
            "group": group.canonical(),
            "invariant": name,
            "pair": pair,
            "value": value,
            "witnesses": extra,
            "budget": budget,
            "elapsed_ms": elapsed_ms,
        })),
        Format::Csv => {
            csv_line(&["group", "invariant", "value", "budget", "elapsed_ms"].map(String::from))
                + &csv_line(&[group.canonical(), name.into(), value, budget.to_string(), format!("{elapsed_ms:.3}")])
        }
        Format::Table => {
            let mut s = format!("{name}({}) = {value}\n", group.label());
            if let Some(w) = extra {
                s += &format!("minimal-length maximizers: {w}\n");
            }
            s + &format!("budget {budget}, {elapsed_ms:.1} ms\n")
        }
    })
}

fn cmd_polytope(group: &GroupSpec, policy: &ProviderPolicy, include_h: bool, format: Format) -> Result<String> {
    let polytope = build_polytope(group, policy)?;
    let solution = maximize(&polytope);
    let mut h_checks = Vec::new();
    if include_h {
        let mut profile = ProfileVector::zero(group.exponent());
        for (d, x) in kstar_witness(group).profile() {
            profile.set(d, x);
        }
        h_checks.push(("kstar_witness".to_string(), membership(&profile, &polytope, true)?));
        if group.order() <= policy.search_budget && policy.allow_search {
            let k = little_cross_exact(group, &policy.search_config())?;
            for (i, w) in k.witnesses.iter().enumerate() {
                let in_h = membership(&ProfileVector::new(w.profile.clone()), &polytope, true)?;
                h_checks.push((format!("extremal_{i}"), in_h));
            }
        }
        // The maximum of Σ x_d/d over P_G ∩ H_G equals the maximum over P_G
        // whenever it exists, so it is not reported separately.
        h_checks.push(("maximum_in_h".to_string(), solution.optimum >= polytope.h_threshold));
    }
    let watermark = polytope.uses_conjecture().then_some("CONJECTURAL: caps use conjectured η values");
    Ok(match format {
        Format::Json => {
            let mut v = json!({ "polytope": polytope, "solution": solution });
            if include_h {
                v["h_checks"] = json!(h_checks.iter().cloned().collect::<std::collections::BTreeMap<_, _>>());
            }
            if let Some(w) = watermark {
                v["watermark"] = json!(w);
            }
            pretty(&v)
        }
        Format::Csv => {
            let mut out = csv_line(&["d", "f_cap", "g_cap", "argmax"].map(String::from));
            for c in &polytope.caps {
                out += &csv_line(&[
                    c.d.to_string(),
                    c.f_cap.map_or("inf".into(), |v| v.to_string()),
                    c.g_cap.to_string(),
                    solution.argmax.get(c.d).to_string(),
                ]);
            }
            out
        }
        Format::Table => {
            let mut out = format!("polytope of {} (n = {})\n", group.label(), polytope.n);
            out += "       d      f_cap      g_cap     argmax\n";
            for c in &polytope.caps {
                out += &format!(
                    "{:>8} {:>10} {:>10} {:>10}\n",
                    c.d,
                    c.f_cap.map_or("inf".into(), |v| v.to_string()),
                    c.g_cap,
                    solution.argmax.get(c.d)
                );
            }
            out += "sources\n";
            for s in &polytope.sources {
                let inv = match s.cap {
                    crossnum::polytope::CapKind::F => "eta",
                    crossnum::polytope::CapKind::G => "D",
                };
                out += &format!(
                    "  {:?} d'={} d={} {}(C[{}]) = {} [{}] {}\n",
                    s.cap, s.d_prime, s.d, inv, s.upsilon, s.value.value, s.value.provenance, s.value.source_note
                );
            }
            out += &format!(
                "maximum    {} (h threshold k* = {}, {} nodes)\n",
                solution.optimum, polytope.h_threshold, solution.node_count
            );
            for (name, ok) in &h_checks {
                out += &format!("in P∩H     {name}: {ok}\n");
            }
            if let Some(w) = watermark {
                out += w;
                out.push('\n');
            }
            out
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_family(
    kind: FamilyKind,
    omega: usize,
    rank: usize,
    ls: Vec<usize>,
    max_prime: u64,
    methods: &[String],
    policy: &ProviderPolicy,
    format: Format,
) -> Result<String> {
    let spec = match kind {
        FamilyKind::Cyclic => FamilySpec::Cyclic { omega, max_prime },
        FamilyKind::Power => FamilySpec::Power { rank, omega, max_prime },
        FamilyKind::Profile => FamilySpec::Profile { ls, max_prime },
    };
    let methods: Vec<FamilyMethod> = methods.iter().map(|m| m.trim().parse()).collect::<Result<_>>()?;
    let rows = family_table(&spec, &methods, policy)?;
    Ok(match format {
        Format::Json => pretty(&json!({ "family": spec, "limit": spec.limit(), "rows": rows })),
        Format::Csv | Format::Table => family_csv(&rows, &methods),
    })
}

fn cmd_seq(command: SeqCommand, format: Format) -> Result<String> {
    let single = |name: &str, l: usize, pick: fn(&crossnum::sequences::SequenceTriple) -> Rational| -> Result<String> {
        if l == 0 || l > DEFAULT_SEQUENCE_BUDGET {
            return Err(Error::Domain(format!("l must be in 1..={DEFAULT_SEQUENCE_BUDGET}")));
        }
        let t = sequence_triple(l);
        let value = pick(&t);
        let ratio = value.clone() / Rational::from(l as u64);
        Ok(match format {
            Format::Json => pretty(&json!({ "sequence": name, "l": l, "value": value, "ratio": ratio })),
            Format::Csv => {
                csv_line(&["sequence", "l", "value", "ratio", "ratio_decimal"].map(String::from))
                    + &csv_line(&[name.into(), l.to_string(), value.to_string(), ratio.to_string(), ratio.to_decimal(12)])
            }
            Format::Table => format!(
                "{name}_{l} = {value} (~{})\n{name}_{l}/{l} = {ratio} (~{})\n",
                value.to_decimal(12),
                ratio.to_decimal(12)
            ),
        })
    };
    match command {
        SeqCommand::Alpha { l } => single("alpha", l, |t| t.alpha.clone()),
        SeqCommand::Beta { l } => single("beta", l, |t| t.beta.clone()),
        SeqCommand::Gamma { l } => single("gamma", l, |t| t.gamma.clone()),
        SeqCommand::Check { max_l, budget } => {
            let r = check_sequences(max_l, &[], budget)?;
            Ok(match format {
                Format::Json => pretty(&serde_json::to_value(&r).expect("report")),
                Format::Csv | Format::Table => {
                    let line = |name: &str, ok: bool| format!("{} {name}\n", if ok { "PASS" } else { "FAIL" });
                    let mut out = format!("checked l = 1..={}\n", r.max_l);
                    out += &line("alpha_l <= 2l", r.alpha_at_most_2l);
                    out += &line("gamma_l >= 2l", r.gamma_at_least_2l);
                    out += &line(
                        &format!("5l/2 <= gamma_l (holds through l = {})", r.five_halves_l_holds_through),
                        r.five_halves_l_holds_through == r.max_l,
                    );
                    out += &line("alpha_l/l <= alpha_9/9", r.alpha_ratio_bounded);
                    out += &line("gamma_l/l <= gamma_8/8", r.gamma_ratio_bounded);
                    out += &format!("argmax alpha_l/l = {}, argmax gamma_l/l = {}\n", r.argmax_alpha_over_l, r.argmax_gamma_over_l);
                    out += &line("alpha_l/l rises then falls", r.alpha_ratio_unimodal);
                    out += &line("gamma_l/l rises then falls", r.gamma_ratio_unimodal);
                    out += &line("p_l >= l ln l (certified)", r.rosser);
                    out += &line("beta_l >= l - 2 - ln ln l (certified)", r.beta_lower_bound);
                    out
                }
            })
        }
        SeqCommand::Trajectory { kind, max_l, budget } => {
            let kind = match kind {
                TrajectoryArg::Alpha => TrajectoryKind::AlphaOverL,
                TrajectoryArg::Beta => TrajectoryKind::BetaOverL,
            };
            let rows = limit_trajectory(kind, max_l, budget)?;
            Ok(match format {
                Format::Json => pretty(&json!({ "kind": kind, "rows": rows })),
                Format::Csv | Format::Table => trajectory_csv(kind, &rows),
            })
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    let threads = cli.threads;
    let format = cli.format;
    match cli.command {
        Command::Info { group } => Ok(cmd_info(&group_arg(&group)?, format.unwrap_or(Format::Table))),
        Command::Exact { invariant, group, budget, pair } => cmd_exact(
            invariant,
            &group_arg(&group)?,
            budget,
            pair.as_deref(),
            threads,
            format.unwrap_or(Format::Table),
        ),
        Command::Report { group, policy, include_h } => {
            let group = group_arg(&group)?;
            let options = ReportOptions {
                policy: policy.policy(threads)?,
                exact_budget: policy.budget,
                include_h,
            };
            let report = build_report(&group, &options)?;
            Ok(match format.unwrap_or(Format::Json) {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
                Format::Table => report.to_table(),
            })
        }
        Command::Polytope { group, policy, include_h } => {
            cmd_polytope(&group_arg(&group)?, &policy.policy(threads)?, include_h, format.unwrap_or(Format::Table))
        }
        Command::Family { kind, omega, rank, ls, max_prime, methods, policy } => cmd_family(
            kind,
            omega,
            rank,
            ls,
            max_prime,
            &methods,
            &policy.policy(threads)?,
            format.unwrap_or(Format::Csv),
        ),
        Command::Seq { command } => cmd_seq(command, format.unwrap_or(Format::Table)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
