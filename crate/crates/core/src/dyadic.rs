//! Exact nonnegative dyadic rationals `p / 2^e`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// `numerator / 2^exponent`, kept canonical: the numerator is odd unless the
/// exponent is zero (integers), and zero is `0 / 2^0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    exp: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid dyadic literal {0:?}: expected \"p\", \"p/q\" with q a power of two, or \"p/2^e\"")]
pub struct DyadicParseError(pub String);

impl Dyadic {
    pub fn new(num: BigUint, exp: u64) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn from_parts(num: u64, exp: u64) -> Self {
        Self::new(BigUint::from(num), exp)
    }

    pub fn zero() -> Self {
        Dyadic { num: BigUint::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigUint::one(), exp: 0 }
    }

    pub fn from_int(v: u64) -> Self {
        Dyadic { num: BigUint::from(v), exp: 0 }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u64) -> Self {
        Dyadic { num: BigUint::one(), exp: k }
    }

    /// Influence `(1/2)^(d-1)` of a vertex at distance `d`.
    pub fn influence(d: usize) -> Self {
        if d == 0 {
            Self::from_int(2)
        } else {
            Self::pow2_neg(d as u64 - 1)
        }
    }

    /// `sum_d counts[d] * (1/2)^(d-1)`, built in one pass.
    pub fn from_distance_counts(counts: &[u64]) -> Self {
        let Some(top) = counts.iter().rposition(|&c| c > 0) else {
            return Self::zero();
        };
        // Horner: acc = sum_d counts[d] * 2^(top-d); value = acc / 2^(top-1)
        let mut acc = BigUint::zero();
        for &c in &counts[..=top] {
            acc <<= 1u32;
            acc += c;
        }
        if top == 0 {
            Self::new(acc << 1u32, 0)
        } else {
            Self::new(acc, top as u64 - 1)
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn half(&self) -> Self {
        self.scaled_down(1)
    }

    /// `self / 2^k`.
    pub fn scaled_down(&self, k: u64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.clone(), self.exp + k)
    }

    pub fn lt_one(&self) -> bool {
        *self < Self::one()
    }

    pub fn ge_one(&self) -> bool {
        !self.lt_one()
    }

    /// Display-only approximation.
    pub fn to_f64(&self) -> f64 {
        let num = self.num.to_f64().unwrap_or(f64::INFINITY);
        if self.exp <= 1000 {
            num / 2f64.powi(self.exp as i32)
        } else {
            // huge exponents: shift down in integer space first
            let keep = self.num.bits().saturating_sub(64);
            let top = (&self.num >> keep).to_f64().unwrap_or(0.0);
            top * 2f64.powf(keep as f64 - self.exp as f64)
        }
    }

    /// Exact decimal expansion, truncated after `max_frac_digits` fractional
    /// digits (marked with a trailing `...`).
    pub fn to_decimal(&self, max_frac_digits: usize) -> String {
        let int_part = &self.num >> self.exp;
        if self.exp == 0 {
            return int_part.to_string();
        }
        let frac_num = &self.num - (&int_part << self.exp);
        // the first max_frac_digits digits of frac_num / 2^e, and whether more follow
        let scaled = frac_num * BigUint::from(10u32).pow(max_frac_digits as u32);
        let head = &scaled >> self.exp;
        let exact = (&head << self.exp) == scaled;
        let mut digits = if max_frac_digits == 0 { String::new() } else { head.to_string() };
        if digits.len() < max_frac_digits {
            digits = "0".repeat(max_frac_digits - digits.len()) + &digits;
        }
        if exact {
            let digits = digits.trim_end_matches('0');
            if digits.is_empty() {
                int_part.to_string()
            } else {
                format!("{int_part}.{digits}")
            }
        } else if digits.is_empty() {
            format!("{int_part}...")
        } else {
            format!("{int_part}.{digits}...")
        }
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        // compare ⌊log₂⌋ first so wildly different exponents never shift
        let mag = |d: &Dyadic| (!d.num.is_zero()).then(|| d.num.bits() as i128 - d.exp as i128);
        match (mag(self), mag(other)) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(a), Some(b)) if a != b => return a.cmp(&b),
            _ => {}
        }
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.num.cmp(&other.num),
            Ordering::Less => (&self.num << (other.exp - self.exp)).cmp(&other.num),
            Ordering::Greater => self.num.cmp(&(&other.num << (self.exp - other.exp))),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.num << (e - self.exp);
        let b = &rhs.num << (e - rhs.exp);
        Dyadic::new(a + b, e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl FromStr for Dyadic {
    type Err = DyadicParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DyadicParseError(s.to_string());
        let s = s.trim();
        let Some((p, q)) = s.split_once('/') else {
            return s.parse::<BigUint>().map(|n| Dyadic::new(n, 0)).map_err(|_| bad());
        };
        let num: BigUint = p.trim().parse().map_err(|_| bad())?;
        let q = q.trim();
        let exp = if let Some(e) = q.strip_prefix("2^") {
            e.parse::<u64>().map_err(|_| bad())?
        } else {
            let den: BigUint = q.parse().map_err(|_| bad())?;
            if den.is_zero() || den.count_ones() != 1 {
                return Err(bad());
            }
            den.bits() - 1
        };
        Ok(Dyadic::new(num, exp))
    }
}
