//! Outward-rounded `f64` intervals.
//!
//! Every operation computes the round-to-nearest result and then widens it by
//! one ulp on each side, so the true real result is always enclosed. The
//! logarithm is evaluated from its `atanh` series with an explicit tail
//! bound instead of trusting the platform `ln`, which makes comparisons such
//! as `p_l >= l log l` certified rather than approximate.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    x.next_down()
}

fn up(x: f64) -> f64 {
    x.next_up()
}

/// `2^k` as an exact `f64` for `-1022 <= k <= 1023`.
fn pow2(k: i64) -> f64 {
    assert!((-1022..=1023).contains(&k), "2^{k} out of range");
    f64::from_bits(((1023 + k) as u64) << 52)
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// The degenerate interval at an exactly representable value.
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn from_u64(n: u64) -> Self {
        let x = n as f64;
        if x as u64 == n && n < (1u64 << 53) {
            Interval::point(x)
        } else {
            Interval::new(down(x), up(x))
        }
    }

    /// Enclosure of an exact rational.
    pub fn from_rational(r: &Rational) -> Self {
        Interval::from_ratio(r.numer(), r.denom())
    }

    /// Enclosure of `num / den` (`den > 0`).
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        assert!(den.sign() == Sign::Plus, "denominator must be positive");
        if num.is_zero() {
            return Interval::point(0.0);
        }
        if num.sign() == Sign::Minus {
            return -Interval::from_ratio(&-num, den);
        }
        // q = floor(num * 2^k / den) carries about 64 significant bits.
        let k = 64 - (num.bits() as i64 - den.bits() as i64);
        let scaled = if k >= 0 { num << k as usize } else { num >> (-k) as usize };
        let q = scaled / den;
        let q_lo = down(q.to_f64().expect("finite"));
        let q_hi = up((q + 1u32).to_f64().expect("finite"));
        let (lo, hi) = if k.abs() <= 1000 {
            (q_lo * pow2(-k), q_hi * pow2(-k))
        } else {
            // Split the scaling so each factor stays representable.
            let half = -k / 2;
            (q_lo * pow2(half) * pow2(-k - half), q_hi * pow2(half) * pow2(-k - half))
        };
        // The scaling is exact unless it lands in the subnormal range.
        Interval::new(down(lo).max(0.0), up(hi))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Interval {
        assert!(self.lo > 0.0, "ln of non-positive interval");
        Interval::new(ln_point(self.lo).lo, ln_point(self.hi).hi)
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    fn square(&self) -> Interval {
        let m = *self * *self;
        if self.lo <= 0.0 && self.hi >= 0.0 {
            Interval::new(0.0, m.hi)
        } else {
            Interval::new(m.lo.max(0.0), m.hi)
        }
    }
}

/// `2 atanh(y) = Σ 2 y^{2k+1}/(2k+1)` for `0 <= y <= 1/3`, with the
/// geometric tail bound `2 y^{2K+3} / ((2K+3)(1-y^2))`.
fn two_atanh(y: Interval) -> Interval {
    const TERMS: u32 = 24;
    assert!(y.lo >= 0.0 && y.hi <= 0.34);
    let y2 = y.square();
    let mut power = y;
    let mut sum = Interval::point(0.0);
    for k in 0..TERMS {
        sum = sum + power / Interval::from_u64(2 * k as u64 + 1);
        power = power * y2;
    }
    let tail_den = Interval::from_u64(2 * TERMS as u64 + 1) * (Interval::point(1.0) - y2);
    let tail = power / tail_den;
    let two = Interval::point(2.0);
    Interval::new((two * sum).lo, (two * (sum + Interval::new(0.0, tail.hi))).hi)
}

fn ln2() -> Interval {
    let third = Interval::point(1.0) / Interval::point(3.0);
    two_atanh(third)
}

fn ln_point(x: f64) -> Interval {
    assert!(x.is_finite() && x > 0.0);
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let (mantissa, exp) = if raw_exp == 0 {
        // subnormal: scale into the normal range first
        let scaled = x * pow2(64);
        let b = scaled.to_bits();
        (
            f64::from_bits((b & !(0x7ffu64 << 52)) | (1023u64 << 52)),
            ((b >> 52) & 0x7ff) as i64 - 1023 - 64,
        )
    } else {
        (f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52)), raw_exp - 1023)
    };
    // mantissa in [1, 2) exactly; y = (m-1)/(m+1) in [0, 1/3)
    let m = Interval::point(mantissa);
    let one = Interval::point(1.0);
    let y = (m - one) / (m + one);
    let y = Interval::new(y.lo.max(0.0), y.hi);
    let series = two_atanh(y);
    let e = Interval::point(exp as f64);
    e * ln2() + series
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::new(down(self.lo + rhs.lo), up(self.hi + rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::new(down(self.lo - rhs.hi), up(self.hi - rhs.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        assert!(rhs.lo > 0.0 || rhs.hi < 0.0, "division by interval containing 0");
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12}, {:.12}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_encloses_platform_ln() {
        for x in [1.0, 1.5, 2.0, 3.0, 6.0, 10.0, 1e-3, 12345.678, 1e300, 4.9e-320] {
            let i = Interval::point(x).ln();
            assert!(i.contains(x.ln()), "ln({x}) = {} not in {i}", x.ln());
            assert!(i.width() < 1e-12 * x.ln().abs().max(1.0), "too wide: {i}");
        }
    }

    #[test]
    fn ln_of_one_is_zero() {
        assert!(Interval::point(1.0).ln().contains(0.0));
    }

    #[test]
    fn known_constants() {
        let l2 = ln2();
        assert!(l2.contains(std::f64::consts::LN_2));
        let l10 = Interval::point(10.0).ln();
        assert!(l10.contains(std::f64::consts::LN_10));
    }

    #[test]
    fn from_ratio_encloses() {
        let one_third = Interval::from_ratio(&BigInt::from(1), &BigInt::from(3));
        assert!(one_third.contains(1.0 / 3.0));
        assert!(one_third.width() < 1e-15);
        let big = Interval::from_ratio(&(BigInt::from(1) << 2000usize), &(BigInt::from(3) << 1990usize));
        assert!(big.contains(1024.0 / 3.0));
        let neg = Interval::from_ratio(&BigInt::from(-7), &BigInt::from(2));
        assert!(neg.contains(-3.5));
        let tiny = Interval::from_ratio(&BigInt::from(1), &(BigInt::from(1) << 1100usize));
        assert!(tiny.lo >= 0.0 && tiny.hi > 0.0);
    }

    #[test]
    fn arithmetic_is_outward() {
        let a = Interval::point(0.1);
        let b = Interval::point(0.2);
        let s = a + b;
        assert!(s.lo < 0.1 + 0.2 && s.hi > 0.1 + 0.2);
        assert!((Interval::point(1.0) / Interval::point(3.0)).contains(1.0 / 3.0));
    }
}
