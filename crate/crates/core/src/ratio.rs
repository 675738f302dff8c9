//! Exact fractions and decimal thresholds.
//!
//! `rf` and `rp` values are kept as integer fractions and compared against
//! thresholds by cross-multiplication, never through floating point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_THRESHOLD_DIGITS: usize = 12;

/// A fraction `num / den` with `den > 0` after normalization.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    /// Returns `None` when `den == 0`.
    pub fn new(num: i64, den: i64) -> Option<Ratio> {
        match den.cmp(&0) {
            Ordering::Equal => None,
            Ordering::Greater => Some(Ratio { num, den }),
            Ordering::Less => Some(Ratio { num: -num, den: -den }),
        }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn at_least(self, threshold: Threshold) -> bool {
        i128::from(self.num) * i128::from(threshold.den) >= i128::from(threshold.num) * i128::from(self.den)
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Ratio) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Ratio) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        (i128::from(self.num) * i128::from(other.den)).cmp(&(i128::from(other.num) * i128::from(self.den)))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A user threshold such as `minfre = 0.5`, parsed exactly from its decimal
/// spelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Threshold {
    num: i64,
    den: i64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThresholdParseError {
    #[error("`{0}` is not a decimal number")]
    NotNumeric(String),
    #[error("`{0}` has more than {MAX_THRESHOLD_DIGITS} fractional digits")]
    TooPrecise(String),
}

impl Threshold {
    pub const ZERO: Threshold = Threshold { num: 0, den: 1 };

    /// `num / den`; panics when `den <= 0`.
    pub fn new(num: i64, den: i64) -> Threshold {
        assert!(den > 0, "threshold denominator must be positive");
        Threshold { num, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    pub fn is_within_unit_interval(self) -> bool {
        self.num >= 0 && self.num <= self.den
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

impl FromStr for Threshold {
    type Err = ThresholdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let bad = || ThresholdParseError::NotNumeric(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
        if (whole.is_empty() && frac.is_empty())
            || !whole.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        if frac.len() > MAX_THRESHOLD_DIGITS {
            return Err(ThresholdParseError::TooPrecise(text.to_string()));
        }
        let den = 10i64.pow(frac.len() as u32);
        let whole_value: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
        let frac_value: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let magnitude =
            whole_value.checked_mul(den).and_then(|w| w.checked_add(frac_value)).ok_or_else(bad)?;
        Ok(Threshold { num: if negative { -magnitude } else { magnitude }, den })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Threshold {
        s.parse().unwrap()
    }

    #[test]
    fn thresholds_parse_exactly() {
        assert_eq!(t("0.4"), Threshold::new(4, 10));
        assert_eq!(t("1"), Threshold::new(1, 1));
        assert_eq!(t("2.0"), Threshold::new(20, 10));
        assert_eq!(t("-0.25"), Threshold::new(-25, 100));
        assert_eq!(t(".5"), Threshold::new(5, 10));
        assert!("x".parse::<Threshold>().is_err());
        assert!("0.1.2".parse::<Threshold>().is_err());
        assert!("".parse::<Threshold>().is_err());
    }

    #[test]
    fn comparison_is_exact_at_the_boundary() {
        // 0.3 is not representable in binary; 3/10 must still clear it.
        assert!(Ratio::new(3, 10).unwrap().at_least(t("0.3")));
        assert!(!Ratio::new(299_999, 1_000_000).unwrap().at_least(t("0.3")));
        assert!(Ratio::new(1, 2).unwrap().at_least(t("0.5")));
    }

    #[test]
    fn negative_denominators_normalize() {
        let r = Ratio::new(-18, -86).unwrap();
        assert_eq!(r, Ratio::new(18, 86).unwrap());
        assert!(Ratio::new(5, -10).unwrap().as_f64() < 0.0);
        assert!(!Ratio::new(5, -10).unwrap().at_least(Threshold::ZERO));
        assert!(Ratio::new(0, 7).unwrap().at_least(Threshold::ZERO));
        assert!(Ratio::new(1, 0).is_none());
    }

    #[test]
    fn equal_fractions_compare_equal() {
        assert_eq!(Ratio::new(2, 4).unwrap(), Ratio::new(1, 2).unwrap());
        assert!(Ratio::new(12, 35).unwrap() > Ratio::new(11, 35).unwrap());
    }
}
