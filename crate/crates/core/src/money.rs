//! Exact currency amounts.
//!
//! Profits are held as signed integer counts of minor units (hundredths), so
//! every sum the miner and the oracle compute is exact and the two can be
//! compared with `==`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minor units per whole currency unit.
pub const MINOR_PER_UNIT: i64 = 100;
const FRACTION_DIGITS: usize = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(i64);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoneyParseError {
    #[error("empty amount")]
    Empty,
    #[error("`{0}` is not a decimal amount")]
    NotNumeric(String),
    #[error("`{0}` has more than {FRACTION_DIGITS} fractional digits")]
    TooPrecise(String),
    #[error("`{0}` is out of range")]
    Overflow(String),
}

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_minor(minor: i64) -> Self {
        Money(minor)
    }

    /// Whole currency units, e.g. `Money::units(3)` is $3.
    pub const fn units(units: i64) -> Self {
        Money(units * MINOR_PER_UNIT)
    }

    pub const fn minor(self) -> i64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn positive_part(self) -> Money {
        Money(self.0.max(0))
    }

    pub fn negative_part(self) -> Money {
        Money(self.0.min(0))
    }

    pub fn checked_mul_qty(self, qty: u32) -> Option<Money> {
        self.0.checked_mul(i64::from(qty)).map(Money)
    }

    pub fn checked_add(self, other: Money) -> Option<Money> {
        self.0.checked_add(other.0).map(Money)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / MINOR_PER_UNIT as f64
    }
}

impl fmt::Display for Money {
    /// Whole amounts print without a fractional part (`21`, `-4`); others
    /// print with exactly two digits (`1.50`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / MINOR_PER_UNIT as u64;
        let frac = abs % MINOR_PER_UNIT as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            write!(f, "{sign}{whole}.{frac:0width$}", width = FRACTION_DIGITS)
        }
    }
}

impl FromStr for Money {
    type Err = MoneyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err(MoneyParseError::Empty);
        }
        let (negative, body) = match text.as_bytes()[0] {
            b'-' => (true, &text[1..]),
            b'+' => (false, &text[1..]),
            _ => (false, text),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        let digits_ok = |part: &str| part.bytes().all(|b| b.is_ascii_digit());
        if (whole.is_empty() && frac.is_empty()) || !digits_ok(whole) || !digits_ok(frac) {
            return Err(MoneyParseError::NotNumeric(text.to_string()));
        }
        if frac.len() > FRACTION_DIGITS {
            return Err(MoneyParseError::TooPrecise(text.to_string()));
        }
        let overflow = || MoneyParseError::Overflow(text.to_string());
        let whole_value: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| overflow())? };
        let mut frac_value: i64 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
        for _ in frac.len()..FRACTION_DIGITS {
            frac_value *= 10;
        }
        let magnitude = whole_value
            .checked_mul(MINOR_PER_UNIT)
            .and_then(|m| m.checked_add(frac_value))
            .ok_or_else(overflow)?;
        Ok(Money(if negative { -magnitude } else { magnitude }))
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Mul<u32> for Money {
    type Output = Money;
    fn mul(self, qty: u32) -> Money {
        Money(self.0 * i64::from(qty))
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_signed_decimals() {
        assert_eq!("3".parse::<Money>().unwrap(), Money::units(3));
        assert_eq!("-2".parse::<Money>().unwrap(), Money::units(-2));
        assert_eq!("+7".parse::<Money>().unwrap(), Money::units(7));
        assert_eq!("1.5".parse::<Money>().unwrap(), Money::from_minor(150));
        assert_eq!("-0.05".parse::<Money>().unwrap(), Money::from_minor(-5));
        assert_eq!(".25".parse::<Money>().unwrap(), Money::from_minor(25));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!("abc".parse::<Money>(), Err(MoneyParseError::NotNumeric(_))));
        assert!(matches!("1.2.3".parse::<Money>(), Err(MoneyParseError::NotNumeric(_))));
        assert!(matches!("-".parse::<Money>(), Err(MoneyParseError::NotNumeric(_))));
        assert!(matches!("".parse::<Money>(), Err(MoneyParseError::Empty)));
        assert!(matches!("0.125".parse::<Money>(), Err(MoneyParseError::TooPrecise(_))));
        assert!(matches!("99999999999999999999".parse::<Money>(), Err(MoneyParseError::Overflow(_))));
    }

    #[test]
    fn display_drops_zero_fraction() {
        assert_eq!(Money::units(21).to_string(), "21");
        assert_eq!(Money::units(-4).to_string(), "-4");
        assert_eq!(Money::from_minor(150).to_string(), "1.50");
        assert_eq!(Money::from_minor(-5).to_string(), "-0.05");
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(minor in -1_000_000_000_000i64..1_000_000_000_000) {
            let m = Money::from_minor(minor);
            prop_assert_eq!(m.to_string().parse::<Money>().unwrap(), m);
        }
    }
}
