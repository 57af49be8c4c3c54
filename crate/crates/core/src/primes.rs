//! The ascending primes `p_1 = 2, p_2 = 3, ...`.

/// The first `len()` primes, produced by a sieve of Eratosthenes. The table
/// is immutable once built, so it can be shared freely between threads;
/// [`PrimeTable::extend_to`] needs exclusive access.
#[derive(Debug, Clone, Default)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

/// An upper bound for `p_count`: `n (ln n + ln ln n)` for `n >= 6`.
fn sieve_limit(count: usize) -> usize {
    if count < 6 {
        return 15;
    }
    let n = count as f64;
    (n * (n.ln() + n.ln().ln())).ceil() as usize + 10
}

fn sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl PrimeTable {
    /// Table holding at least the first `count` primes.
    pub fn with_count(count: usize) -> Self {
        let mut table = PrimeTable::default();
        table.extend_to(count);
        table
    }

    pub fn extend_to(&mut self, count: usize) {
        if self.primes.len() >= count {
            return;
        }
        let mut primes = sieve(sieve_limit(count));
        primes.truncate(count);
        self.primes = primes;
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `p_l`, counting from `l = 1`.
    pub fn nth(&self, l: usize) -> u64 {
        assert!(l >= 1 && l <= self.primes.len(), "p_{l} is not tabulated");
        self.primes[l - 1]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    /// Product of `count` consecutive primes starting at the `start`-th.
    pub fn product(&self, start: usize, count: usize) -> Option<u64> {
        (start..start + count).try_fold(1u64, |acc, l| acc.checked_mul(self.nth(l)))
    }

    /// 1-based position of a prime in the table.
    pub fn position(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numth::is_prime;

    #[test]
    fn first_primes() {
        let t = PrimeTable::with_count(10);
        assert_eq!(t.as_slice(), &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(t.nth(1), 2);
        assert_eq!(t.position(23), Some(9));
        assert_eq!(t.position(24), None);
        assert_eq!(t.product(2, 3), Some(105));
    }

    #[test]
    fn sieve_bound_is_large_enough() {
        for count in [1, 5, 6, 7, 100, 1000, 10_000] {
            let t = PrimeTable::with_count(count);
            assert_eq!(t.len(), count);
        }
        let t = PrimeTable::with_count(10_000);
        assert_eq!(t.nth(10_000), 104_729);
        assert!(t.as_slice().iter().take(2000).all(|&p| is_prime(p)));
    }

    #[test]
    fn extension_keeps_prefix() {
        let mut t = PrimeTable::with_count(5);
        t.extend_to(50);
        assert_eq!(t.len(), 50);
        assert_eq!(t.nth(5), 11);
        assert_eq!(t.nth(50), 229);
    }
}
