//! Finite Abelian groups in invariant-factor form.
//!
//! A [`GroupSpec`] is `C_{n_1} ⊕ … ⊕ C_{n_r}` with `1 < n_1 | … | n_r`. The
//! empty factor list is the trivial group. Elements are coordinate vectors
//! and, for the search code, dense indices in `0..order` where the first
//! coordinate is the most significant digit, so index order is lexicographic
//! coordinate order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numth::{self, factorize, gcd, lcm};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct GroupSpec {
    factors: Vec<u64>,
}

impl GroupSpec {
    /// Builds a group from factors that already form a divisibility chain.
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::Domain(format!("invariant factor {bad} is < 2")));
        }
        if let Some(w) = factors.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(Error::Domain(format!(
                "{} does not divide {}; use GroupSpec::from_moduli to normalize",
                w[0], w[1]
            )));
        }
        Ok(GroupSpec { factors })
    }

    pub fn trivial() -> Self {
        GroupSpec { factors: vec![] }
    }

    pub fn cyclic(n: u64) -> Self {
        GroupSpec::from_moduli(&[n])
    }

    /// `C_n^r`.
    pub fn power(n: u64, r: usize) -> Self {
        GroupSpec::from_moduli(&vec![n; r])
    }

    /// Normalizes an arbitrary list of cyclic orders `C_{m_1} ⊕ … ⊕ C_{m_k}`
    /// into invariant-factor form. Moduli equal to 1 (trivial summands) are
    /// ignored; 0 is not a valid modulus and panics.
    pub fn from_moduli(moduli: &[u64]) -> Self {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &m in moduli {
            assert!(m > 0, "modulus 0");
            for (p, e) in factorize(m) {
                by_prime.entry(p).or_default().push(e);
            }
        }
        let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
        // Largest exponents go to the last factor.
        let mut factors = vec![1u64; rank];
        for (p, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (j, e) in exps.into_iter().enumerate() {
                factors[rank - 1 - j] *= p.pow(e);
            }
        }
        GroupSpec { factors }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    /// For a nontrivial p-group returns `p` and the exponents `α_i` with
    /// `n_i = p^{α_i}`.
    pub fn p_group(&self) -> Option<(u64, Vec<u32>)> {
        let fac = factorize(self.exponent());
        if fac.len() != 1 {
            return None;
        }
        let p = fac[0].0;
        let exps = self
            .factors
            .iter()
            .map(|&n| factorize(n)[0].1)
            .collect();
        Some((p, exps))
    }

    /// Returns `p` if the group is `C_p^r` with `r ≥ 1`.
    pub fn elementary_prime(&self) -> Option<u64> {
        let n = self.exponent();
        (!self.is_trivial() && numth::is_prime(n) && self.factors.iter().all(|&f| f == n))
            .then_some(n)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.rank() && g.coords.iter().zip(&self.factors).all(|(a, n)| a < n)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    /// Element with the given coordinates, reduced modulo each factor.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::Domain(format!(
                "element has {} coordinates, group has rank {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(&a, &n)| a.rem_euclid(n as i64) as u64)
                .collect(),
        })
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&h.coords)
                .zip(&self.factors)
                .map(|((a, b), n)| (a + b) % n)
                .collect(),
        }
    }

    pub fn neg(&self, g: &GroupElement) -> GroupElement {
        GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&self.factors)
                .map(|(a, n)| (n - a) % n)
                .collect(),
        }
    }

    /// `lcm_i n_i / gcd(a_i, n_i)`.
    pub fn element_order(&self, g: &GroupElement) -> u64 {
        g.coords
            .iter()
            .zip(&self.factors)
            .fold(1, |acc, (&a, &n)| lcm(acc, n / gcd(a, n)))
    }

    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.coords
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&a, &n)| acc * n as usize + a as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0u64; self.rank()];
        for (c, &n) in coords.iter_mut().zip(&self.factors).rev() {
            *c = (index % n as usize) as u64;
            index /= n as usize;
        }
        GroupElement { coords }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(|i| self.element_at(i))
    }

    /// `G_d = {x : d x = 0}` as ascending element indices.
    pub fn torsion_indices(&self, d: u64) -> Vec<usize> {
        self.elements()
            .enumerate()
            .filter(|(_, g)| d.is_multiple_of(self.element_order(g)))
            .map(|(i, _)| i)
            .collect()
    }

    /// The groups `C_{υ_1(d',d)} ⊕ … ⊕ C_{υ_r(d',d)}` with
    /// `A_i = gcd(d', n_i)`, `B_i = lcm(d, n_i) / lcm(d', n_i)` and
    /// `υ_i = A_i / gcd(A_i, B_i)`.
    pub fn upsilon(&self, d_prime: u64, d: u64) -> Result<Upsilon> {
        let n = self.exponent();
        if d == 0 || !n.is_multiple_of(d) {
            return Err(Error::Domain(format!("{d} does not divide the exponent {n}")));
        }
        if d_prime == 0 || !d.is_multiple_of(d_prime) {
            return Err(Error::Domain(format!("{d_prime} does not divide {d}")));
        }
        let positional: Vec<u64> = self
            .factors
            .iter()
            .map(|&ni| {
                let a = gcd(d_prime, ni);
                let b = lcm(d, ni) / lcm(d_prime, ni);
                a / gcd(a, b)
            })
            .collect();
        let group = GroupSpec::from_moduli(&positional);
        Ok(Upsilon { positional, group })
    }

    /// Canonical text form, `n1,n2,...,nr`; empty for the trivial group.
    pub fn canonical(&self) -> String {
        self.factors
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Human label such as `C_2 ⊕ C_4`.
    pub fn label(&self) -> String {
        if self.is_trivial() {
            return "C_1".into();
        }
        self.factors
            .iter()
            .map(|n| format!("C_{n}"))
            .collect::<Vec<_>>()
            .join(" ⊕ ")
    }
}

/// Every group of order at most `max_order`, trivial group first, then by
/// order and factor list.
pub fn groups_up_to(max_order: u64) -> Vec<GroupSpec> {
    fn extend(prefix: &mut Vec<u64>, product: u64, max: u64, out: &mut Vec<GroupSpec>) {
        out.push(GroupSpec {
            factors: prefix.clone(),
        });
        let last = prefix.last().copied().unwrap_or(1);
        let mut next = last.max(2);
        while product * next <= max {
            if next % last == 0 {
                prefix.push(next);
                extend(prefix, product * next, max, out);
                prefix.pop();
            }
            next += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max_order, &mut out);
    out.sort_by(|a, b| (a.order(), &a.factors).cmp(&(b.order(), &b.factors)));
    out
}

/// Parses `n1,n2,...` (ASCII digits and commas) and normalizes it to
/// invariant-factor form. The empty string is the trivial group.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(GroupSpec::trivial());
    }
    let mut moduli = Vec::new();
    for token in trimmed.split(',') {
        let token = token.trim();
        if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(text, format!("malformed token {token:?}")));
        }
        let m: u64 = token
            .parse()
            .map_err(|_| Error::parse(text, format!("token {token:?} out of range")))?;
        if m < 2 {
            return Err(Error::parse(text, format!("modulus {m} is < 2")));
        }
        moduli.push(m);
    }
    Ok(GroupSpec::from_moduli(&moduli))
}

impl FromStr for GroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_group_spec(s)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl TryFrom<Vec<u64>> for GroupSpec {
    type Error = Error;
    fn try_from(value: Vec<u64>) -> Result<Self> {
        GroupSpec::new(value)
    }
}

impl From<GroupSpec> for Vec<u64> {
    fn from(value: GroupSpec) -> Self {
        value.factors
    }
}

/// Result of [`GroupSpec::upsilon`]: the per-coordinate orders `υ_i`, with
/// trivial coordinates kept, and the normalized group they describe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Upsilon {
    pub positional: Vec<u64>,
    pub group: GroupSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A multiset of elements of one group, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementSequence {
    group: GroupSpec,
    elements: Vec<GroupElement>,
}

impl ElementSequence {
    pub fn new(group: &GroupSpec, mut elements: Vec<GroupElement>) -> Result<Self> {
        if let Some(bad) = elements.iter().find(|g| !group.contains(g)) {
            return Err(Error::Domain(format!("{bad} is not an element of {group}")));
        }
        elements.sort();
        Ok(ElementSequence {
            group: group.clone(),
            elements,
        })
    }

    pub(crate) fn from_indices(group: &GroupSpec, indices: &[usize]) -> Self {
        let mut elements: Vec<GroupElement> = indices.iter().map(|&i| group.element_at(i)).collect();
        elements.sort();
        ElementSequence {
            group: group.clone(),
            elements,
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sum(&self) -> GroupElement {
        self.elements
            .iter()
            .fold(self.group.zero(), |acc, g| self.group.add(&acc, g))
    }

    /// `k(S) = Σ 1/ord(g)`.
    pub fn cross_number(&self) -> Rational {
        self.elements
            .iter()
            .map(|g| Rational::recip_of(self.group.element_order(g)))
            .sum()
    }

    /// `x_d = |S_d|` for each divisor `d` of the exponent, ascending `d`.
    pub fn profile(&self) -> BTreeMap<u64, u64> {
        let mut x: BTreeMap<u64, u64> = numth::divisor_list(self.group.exponent())
            .into_iter()
            .map(|d| (d, 0))
            .collect();
        for g in &self.elements {
            *x.get_mut(&self.group.element_order(g)).expect("order divides exponent") += 1;
        }
        x
    }
}

impl fmt::Display for ElementSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_multiset(moduli: &[u64]) -> Vec<u64> {
        // Orders of all elements of the raw direct sum, independent of the
        // invariant-factor normalization.
        let total: u64 = moduli.iter().product();
        let mut out = Vec::new();
        for mut idx in 0..total {
            let mut ord = 1;
            for &m in moduli.iter().rev() {
                let a = idx % m;
                idx /= m;
                ord = lcm(ord, m / gcd(a, m));
            }
            out.push(ord);
        }
        out.sort_unstable();
        out
    }

    fn normalized_orders(g: &GroupSpec) -> Vec<u64> {
        let mut v: Vec<u64> = g.elements().map(|e| g.element_order(&e)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_group_spec("2,4").unwrap().factors(), &[2, 4]);
        assert_eq!(parse_group_spec("3,2").unwrap().factors(), &[6]);
        assert_eq!(parse_group_spec("6,4").unwrap().factors(), &[2, 12]);
        assert_eq!(order_multiset(&[3, 2]), normalized_orders(&parse_group_spec("3,2").unwrap()));
        assert_eq!(order_multiset(&[6, 4]), normalized_orders(&parse_group_spec("6,4").unwrap()));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_group_spec("2,x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_group_spec("1,4"), Err(Error::Parse { .. })));
        assert!(matches!(parse_group_spec("2,,4"), Err(Error::Parse { .. })));
        assert!(matches!(parse_group_spec("-2"), Err(Error::Parse { .. })));
        assert!(parse_group_spec("").unwrap().is_trivial());
    }

    #[test]
    fn new_rejects_broken_chains() {
        assert!(GroupSpec::new(vec![4, 6]).is_err());
        assert!(GroupSpec::new(vec![1, 6]).is_err());
        assert!(GroupSpec::new(vec![2, 6]).is_ok());
    }

    #[test]
    fn order_multiset_preserved_up_to_64() {
        // Every list of moduli >= 2 whose product is <= 64.
        fn rec(prefix: &mut Vec<u64>, prod: u64, out: &mut Vec<Vec<u64>>) {
            if !prefix.is_empty() {
                out.push(prefix.clone());
            }
            let start = prefix.last().copied().unwrap_or(2);
            for m in start..=64 {
                if prod * m > 64 {
                    break;
                }
                prefix.push(m);
                rec(prefix, prod * m, out);
                prefix.pop();
            }
        }
        let mut lists = Vec::new();
        rec(&mut vec![], 1, &mut lists);
        assert!(lists.len() > 100);
        for moduli in lists {
            let g = GroupSpec::from_moduli(&moduli);
            assert_eq!(g.order(), moduli.iter().product::<u64>());
            assert_eq!(order_multiset(&moduli), normalized_orders(&g), "{moduli:?}");
            // idempotence
            assert_eq!(parse_group_spec(&g.canonical()).unwrap(), g);
        }
    }

    #[test]
    fn element_order_examples() {
        let g = parse_group_spec("2,4").unwrap();
        assert_eq!(g.element_order(&g.element(&[0, 0]).unwrap()), 1);
        assert_eq!(g.element_order(&g.element(&[1, 2]).unwrap()), 2);
        assert_eq!(g.element_order(&g.element(&[1, 1]).unwrap()), 4);
    }

    #[test]
    fn index_roundtrip_is_lexicographic() {
        let g = parse_group_spec("2,6").unwrap();
        let all: Vec<GroupElement> = g.elements().collect();
        assert_eq!(all.len(), 12);
        for (i, e) in all.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn upsilon_examples() {
        let g = parse_group_spec("2,4").unwrap();
        assert_eq!(g.upsilon(2, 4).unwrap().positional, vec![1, 2]);
        // A = (2, 4), B = (1, 1): G_4 is all of G
        assert_eq!(g.upsilon(4, 4).unwrap().positional, vec![2, 4]);
        assert_eq!(g.upsilon(4, 4).unwrap().group.factors(), &[2, 4]);
        for d in [1, 2, 4] {
            assert_eq!(g.upsilon(1, d).unwrap().positional, vec![1, 1]);
            assert!(g.upsilon(1, d).unwrap().group.is_trivial());
        }
        assert!(g.upsilon(3, 4).is_err());
        assert!(g.upsilon(2, 8).is_err());
    }

    #[test]
    fn upsilon_divisibility_and_collapse() {
        for moduli in [vec![12], vec![2, 4], vec![2, 6], vec![3, 3], vec![2, 2, 4], vec![6, 12], vec![2, 30]] {
            let g = GroupSpec::from_moduli(&moduli);
            let n = g.exponent();
            for d in numth::divisor_list(n) {
                for dp in numth::divisor_list(d) {
                    let u = g.upsilon(dp, d).unwrap();
                    for (i, &ui) in u.positional.iter().enumerate() {
                        let ni = g.factors()[i];
                        assert_eq!(dp % ui, 0);
                        assert_eq!(ni % ui, 0);
                        if ni.is_multiple_of(d) {
                            assert_eq!(ui, dp, "υ_i = d' whenever d | n_i");
                        }
                    }
                    assert_eq!(*u.positional.last().unwrap(), dp);
                }
            }
        }
    }

    #[test]
    fn sequence_profile_and_cross_number() {
        let g = parse_group_spec("6").unwrap();
        let s = ElementSequence::new(
            &g,
            vec![g.element(&[3]).unwrap(), g.element(&[2]).unwrap(), g.element(&[2]).unwrap()],
        )
        .unwrap();
        assert_eq!(s.cross_number(), Rational::new(7, 6));
        let prof = s.profile();
        assert_eq!(prof.get(&2), Some(&1));
        assert_eq!(prof.get(&3), Some(&2));
        assert_eq!(prof.values().sum::<u64>(), 3);
        assert_eq!(s.sum(), g.element(&[1]).unwrap());
    }

    #[test]
    fn serde_uses_factor_list() {
        let g = parse_group_spec("4,2").unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), "[2,4]");
        assert!(serde_json::from_str::<GroupSpec>("[4,6]").is_err());
    }

    #[test]
    fn enumerates_groups_by_order() {
        let groups = groups_up_to(16);
        let count = |n: u64| groups.iter().filter(|g| g.order() == n).count();
        // number of Abelian groups of order n
        assert_eq!([1, 2, 4, 8, 9, 12, 16].map(count), [1, 1, 2, 3, 2, 2, 5]);
        assert!(groups[0].is_trivial());
        assert!(groups.windows(2).all(|w| w[0].order() <= w[1].order()));
        for g in &groups {
            assert_eq!(GroupSpec::new(g.factors().to_vec()).as_ref(), Ok(g));
        }
    }
}
