pub mod bounds;
pub mod error;
pub mod family;
pub mod group;
pub mod interval;
pub mod kstar;
pub mod numth;
pub mod oracle;
pub mod polytope;
pub mod primes;
pub mod provider;
pub mod rational;
pub mod report;
pub mod sequences;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/groups.md")]
    struct Groups;
    #[doc = include_str!("../../../book/src/oracles.md")]
    struct Oracles;
    #[doc = include_str!("../../../book/src/provider.md")]
    struct Provider;
    #[doc = include_str!("../../../book/src/polytope.md")]
    struct Polytope;
    #[doc = include_str!("../../../book/src/bounds.md")]
    struct Bounds;
    #[doc = include_str!("../../../book/src/sequences.md")]
    struct Sequences;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
    #[doc = include_str!("../../../book/src/report-format.md")]
    struct ReportFormat;
}
