//! Elementary arithmetic functions on positive integers.

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime-power parts `p^e` of `n`, ascending by prime.
pub fn prime_power_parts(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, e)| p.pow(e)).collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// Number of distinct prime divisors.
pub fn omega(n: u64) -> usize {
    factorize(n).len()
}

/// Smallest prime divisor, with the convention `least_prime_divisor(1) = 1`.
pub fn least_prime_divisor(n: u64) -> u64 {
    factorize(n).first().map_or(1, |&(p, _)| p)
}

/// Positive divisors of `n` together with the usual counting functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisors {
    pub n: u64,
    pub list: Vec<u64>,
    pub omega: usize,
    pub least_prime: u64,
}

impl Divisors {
    pub fn tau(&self) -> usize {
        self.list.len()
    }

    /// Position of `d` in the ascending list.
    pub fn index_of(&self, d: u64) -> Option<usize> {
        self.list.binary_search(&d).ok()
    }
}

pub fn divisors(n: u64) -> Result<Divisors> {
    if n < 1 {
        return Err(Error::Domain("divisors of 0 are undefined".into()));
    }
    let fac = factorize(n);
    let mut list = vec![1u64];
    for &(p, e) in &fac {
        let len = list.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                list.push(list[i] * pk);
            }
        }
    }
    list.sort_unstable();
    Ok(Divisors {
        n,
        omega: fac.len(),
        least_prime: fac.first().map_or(1, |&(p, _)| p),
        list,
    })
}

/// Divisors of `n`, panicking on `n = 0`. Internal convenience.
pub(crate) fn divisor_list(n: u64) -> Vec<u64> {
    divisors(n).expect("n >= 1").list
}

/// Modular inverse of `a` modulo `m` (requires `gcd(a, m) = 1`).
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}
