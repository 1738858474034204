//! Exact rational support thresholds.
//!
//! Thresholds arrive as decimal strings ("0.02") and every derived count
//! is computed in integer arithmetic. `ceil(0.02 * 100)` must be 2, which
//! `f64` does not guarantee.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Non-negative rational number kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Fraction, Error> {
        if den == 0 {
            return Err(Error::BadFraction {
                text: format!("{num}/{den}"),
                msg: "zero denominator".into(),
            });
        }
        Ok(Fraction { num, den }.reduced())
    }

    fn reduced(self) -> Fraction {
        let g = gcd(self.num, self.den);
        Fraction {
            num: self.num / g,
            den: self.den / g,
        }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Smallest integer `c` with `c >= self * n`.
    pub fn ceil_mul(&self, n: usize) -> usize {
        let prod = self.num as u128 * n as u128;
        let den = self.den as u128;
        ((prod + den - 1) / den) as usize
    }

    /// `self * mul / div`, exact. `div` must be nonzero.
    pub fn scale(&self, mul: u64, div: u64) -> Result<Fraction, Error> {
        if div == 0 {
            return Err(Error::BadFraction {
                text: format!("{self} * {mul}/{div}"),
                msg: "zero denominator".into(),
            });
        }
        // Reduce cross-wise first so u64 arithmetic cannot overflow for
        // any inputs that came from decimal strings and log sizes.
        let a = Fraction { num: self.num, den: div }.reduced();
        let b = Fraction { num: mul, den: self.den }.reduced();
        let num = a.num.checked_mul(b.num).ok_or_else(|| Error::BadFraction {
            text: format!("{self} * {mul}/{div}"),
            msg: "overflow".into(),
        })?;
        let den = a.den.checked_mul(b.den).ok_or_else(|| Error::BadFraction {
            text: format!("{self} * {mul}/{div}"),
            msg: "overflow".into(),
        })?;
        Ok(Fraction { num, den }.reduced())
    }

    /// `count / n >= self`, compared exactly.
    pub fn le_ratio(&self, count: usize, n: usize) -> bool {
        // self <= count/n  <=>  num * n <= count * den
        self.num as u128 * n as u128 <= count as u128 * self.den as u128
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b.max(1);
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Parses a non-negative decimal string: "0", "1", "0.05", "2.5".
    fn from_str(text: &str) -> Result<Fraction, Error> {
        let bad = |msg: &str| Error::BadFraction {
            text: text.to_string(),
            msg: msg.to_string(),
        };
        let t = text.trim();
        if t.is_empty() {
            return Err(bad("empty"));
        }
        if t.starts_with('-') {
            return Err(bad("negative"));
        }
        let (int_part, frac_part) = match t.split_once('.') {
            Some((i, f)) => (i, f),
            None => (t, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad("no digits"));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad("expected decimal digits"));
        }
        if frac_part.len() > 18 {
            return Err(bad("more than 18 fractional digits"));
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let int_val: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad("integer part too large"))?
        };
        let frac_val: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad("fractional part too large"))?
        };
        let num = int_val
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(|| bad("value too large"))?;
        Ok(Fraction { num, den }.reduced())
    }
}

impl fmt::Display for Fraction {
    /// Minimal exact decimal when the denominator divides a power of ten,
    /// `num/den` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            return write!(f, "{}", self.num);
        }
        let mut twos = 0u32;
        let mut fives = 0u32;
        let mut rest = self.den;
        while rest % 2 == 0 {
            rest /= 2;
            twos += 1;
        }
        while rest % 5 == 0 {
            rest /= 5;
            fives += 1;
        }
        if rest != 1 {
            return write!(f, "{}/{}", self.num, self.den);
        }
        let places = twos.max(fives);
        // num * 10^places / den is an integer by construction.
        let scaled = self.num as u128 * 10u128.pow(places) / self.den as u128;
        let digits = format!("{scaled:0>width$}", width = places as usize + 1);
        let (int_digits, frac_digits) = digits.split_at(digits.len() - places as usize);
        write!(f, "{int_digits}.{frac_digits}")
    }
}
