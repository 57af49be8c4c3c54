//! The lower-bound constants `k*(G)`, `K*(G)` and their witness sequence.

use crate::group::{ElementSequence, GroupSpec};
use crate::numth::{gcd, mod_inverse, prime_power_parts};
use crate::rational::Rational;

/// `k*(G) = Σ (ν-1)/ν` over the prime-power parts `ν` of the finest cyclic
/// decomposition of `G`.
pub fn kstar(group: &GroupSpec) -> Rational {
    group
        .factors()
        .iter()
        .flat_map(|&n| prime_power_parts(n))
        .map(|nu| Rational::new(nu as i64 - 1, nu as i64))
        .sum()
}

/// `K*(G) = k*(G) + 1/exp(G)`.
pub fn kstar_upper(group: &GroupSpec) -> Rational {
    kstar(group) + Rational::recip_of(group.exponent())
}

/// The zero-sumfree sequence realizing `k*(G)`: for every prime-power part
/// `ν` of a factor `n_i`, `ν-1` copies of the element that is 1 modulo `ν`
/// and 0 modulo `n_i/ν` in coordinate `i`, zero elsewhere.
pub fn kstar_witness(group: &GroupSpec) -> ElementSequence {
    let mut elements = Vec::new();
    for (i, &n) in group.factors().iter().enumerate() {
        for nu in prime_power_parts(n) {
            let cofactor = n / nu;
            let inv = mod_inverse(cofactor % nu, nu).expect("coprime parts");
            let residue = (cofactor * inv) % n;
            let mut coords = vec![0i64; group.rank()];
            coords[i] = residue as i64;
            let e = group.element(&coords).expect("rank matches");
            for _ in 1..nu {
                elements.push(e.clone());
            }
        }
    }
    ElementSequence::new(group, elements).expect("elements belong to the group")
}

/// `φ(G, H)` for `H = C_n^r`, `n = exp(G)`, `r = rank(G)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiQuotient {
    pub value: Rational,
    /// True when the per-coordinate test `gcd(n_i, n/n_i) = 1` certified that
    /// `G` is a direct summand of `H`; false means the `k*(H/G)/n` branch.
    pub summand: bool,
    /// `H/G ≅ ⊕ C_{n/n_i}`.
    pub quotient: GroupSpec,
}

pub fn phi_quotient(group: &GroupSpec) -> PhiQuotient {
    let n = group.exponent();
    let moduli: Vec<u64> = group.factors().iter().map(|&ni| n / ni).collect();
    let quotient = GroupSpec::from_moduli(&moduli);
    let summand = group.factors().iter().all(|&ni| gcd(ni, n / ni) == 1);
    let ks = kstar(&quotient);
    let value = if summand { ks } else { ks / Rational::from(n) };
    PhiQuotient {
        value,
        summand,
        quotient,
    }
}
