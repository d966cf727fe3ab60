//! Exact decimal values for change costs and profits.
//!
//! Cost/profit estimates are entered as short decimal fractions and are
//! summed, compared and quantized exactly. Binary floating point would make
//! budget ties and byte-stable rendering unreliable, so values are kept as an
//! integer mantissa with a base-10 scale.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Maximum number of fractional digits accepted from input.
const MAX_SCALE: u32 = 9;
/// Maximum number of significant digits accepted from input.
const MAX_DIGITS: usize = 15;

/// An exact decimal number: `mantissa / 10^scale`.
///
/// Always stored in normalized form (no trailing fractional zeros), so
/// structural equality is value equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decimal {
    mantissa: i64,
    scale: u32,
}

/// Value rejected while converting text or numbers into a [`Decimal`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal {input:?}: {reason}")]
pub struct DecimalError {
    pub input: String,
    pub reason: &'static str,
}

const POW10: [i64; 19] = [
    1,
    10,
    100,
    1_000,
    10_000,
    100_000,
    1_000_000,
    10_000_000,
    100_000_000,
    1_000_000_000,
    10_000_000_000,
    100_000_000_000,
    1_000_000_000_000,
    10_000_000_000_000,
    100_000_000_000_000,
    1_000_000_000_000_000,
    10_000_000_000_000_000,
    100_000_000_000_000_000,
    1_000_000_000_000_000_000,
];

impl Decimal {
    pub const ZERO: Decimal = Decimal { mantissa: 0, scale: 0 };

    /// Builds `mantissa / 10^scale`, normalizing away trailing zeros.
    pub fn new(mantissa: i64, scale: u32) -> Decimal {
        let mut d = Decimal { mantissa, scale };
        d.normalize();
        d
    }

    pub fn from_int(value: i64) -> Decimal {
        Decimal { mantissa: value, scale: 0 }
    }

    fn normalize(&mut self) {
        if self.mantissa == 0 {
            self.scale = 0;
            return;
        }
        while self.scale > 0 && self.mantissa % 10 == 0 {
            self.mantissa /= 10;
            self.scale -= 1;
        }
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0
    }

    pub fn is_negative(self) -> bool {
        self.mantissa < 0
    }

    /// Mantissa and scale of the normalized value.
    pub fn parts(self) -> (i64, u32) {
        (self.mantissa, self.scale)
    }

    /// `self * factor` as an integer, or `None` when the product has a
    /// fractional part. This is the hook used by the budget solvers to map
    /// decimal costs onto an exact integer grid.
    pub fn quantize(self, factor: u32) -> Option<i64> {
        let scaled = self.mantissa as i128 * factor as i128;
        let div = POW10[self.scale as usize] as i128;
        if scaled % div != 0 {
            return None;
        }
        i64::try_from(scaled / div).ok()
    }

    /// Largest integer `n` with `n <= self * factor`.
    pub fn quantize_floor(self, factor: u32) -> i64 {
        let scaled = self.mantissa as i128 * factor as i128;
        let div = POW10[self.scale as usize] as i128;
        i64::try_from(scaled.div_euclid(div)).expect("quantized value out of range")
    }

    pub fn to_f64(self) -> f64 {
        self.mantissa as f64 / POW10[self.scale as usize] as f64
    }

    fn aligned(self, other: Decimal) -> (i128, i128, u32) {
        let scale = self.scale.max(other.scale);
        let a = self.mantissa as i128 * POW10[(scale - self.scale) as usize] as i128;
        let b = other.mantissa as i128 * POW10[(scale - other.scale) as usize] as i128;
        (a, b, scale)
    }
}

impl Add for Decimal {
    type Output = Decimal;

    fn add(self, rhs: Decimal) -> Decimal {
        let (a, b, scale) = self.aligned(rhs);
        let sum = a + b;
        let mantissa = i64::try_from(sum).expect("decimal sum out of range");
        Decimal::new(mantissa, scale)
    }
}

impl AddAssign for Decimal {
    fn add_assign(&mut self, rhs: Decimal) {
        *self = *self + rhs;
    }
}

impl Sum for Decimal {
    fn sum<I: Iterator<Item = Decimal>>(iter: I) -> Decimal {
        iter.fold(Decimal::ZERO, Add::add)
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Decimal) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Decimal) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl fmt::Display for Decimal {
    /// Renders with at least one fractional digit (`2` prints as `2.0`), so
    /// values are unambiguous decimals in text reports and model files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = self.scale.max(1) as usize;
        let sign = if self.mantissa < 0 { "-" } else { "" };
        let abs = self.mantissa.unsigned_abs() as u128 * if self.scale == 0 { 10 } else { 1 };
        let div = POW10[scale] as u128;
        write!(f, "{sign}{}.{:0width$}", abs / div, abs % div, width = scale)
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Decimal({self})")
    }
}

impl From<i64> for Decimal {
    fn from(value: i64) -> Decimal {
        Decimal::from_int(value)
    }
}

impl FromStr for Decimal {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Decimal, DecimalError> {
        let err = |reason| DecimalError { input: s.to_string(), reason };
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err("no digits"));
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err("expected only digits and an optional decimal point"));
        }
        if frac_part.len() as u32 > MAX_SCALE {
            return Err(err("too many fractional digits"));
        }
        let digits = int_part.trim_start_matches('0');
        if digits.len() + frac_part.len() > MAX_DIGITS {
            return Err(err("too many digits"));
        }
        let mut mantissa: i64 = 0;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            mantissa = mantissa * 10 + (b - b'0') as i64;
        }
        if negative {
            mantissa = -mantissa;
        }
        Ok(Decimal::new(mantissa, frac_part.len() as u32))
    }
}

impl TryFrom<f64> for Decimal {
    type Error = DecimalError;

    /// Converts through the shortest round-tripping text form, so every JSON
    /// number with a short decimal expansion maps to its exact value.
    fn try_from(value: f64) -> Result<Decimal, DecimalError> {
        if !value.is_finite() {
            return Err(DecimalError {
                input: value.to_string(),
                reason: "not a finite number",
            });
        }
        value.to_string().parse()
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Decimal, D::Error> {
        let raw = f64::deserialize(deserializer)?;
        Decimal::try_from(raw).map_err(D::Error::custom)
    }
}
