//! Working-precision scalar type and the helpers shared by every module.
//!
//! All matrix work is done in [`BigReal`], an MPFR float whose precision is
//! carried by each value. [`Precision`] is the number of mantissa bits a
//! computation is asked for; internal steps may add guard bits and round
//! back at the end.

use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::AssignRound;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type BigReal = Float;

/// Guard bits used when an intermediate is expected to lose a few digits
/// to cancellation (alternating sums, subtraction of nearby quantities).
pub const GUARD_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 24;
    pub const MAX_BITS: u32 = 1 << 16;

    pub fn new(bits: u32) -> Result<Self> {
        if !(Self::MIN_BITS..=Self::MAX_BITS).contains(&bits) {
            return Err(Error::InvalidArgument(format!(
                "precision must be between {} and {} bits, got {bits}",
                Self::MIN_BITS,
                Self::MAX_BITS
            )));
        }
        Ok(Self(bits))
    }

    /// Unchecked constructor for compile-time constants in tests and benches.
    pub const fn bits_unchecked(bits: u32) -> Self {
        Self(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn guarded(self) -> Self {
        Self(self.0 + GUARD_BITS)
    }

    pub fn plus(self, extra: u32) -> Self {
        Self(self.0 + extra)
    }

    /// Heuristic default for a basis of `n` functions: the roundoff floor
    /// must stay below the truncation error the basis can reach.
    pub fn default_for_basis(n: usize) -> Self {
        match n {
            0..=15 => Self(128),
            16..=40 => Self(256),
            _ => Self(384),
        }
    }

    /// 2^(-bits)
    pub fn epsilon(self) -> BigReal {
        Float::with_val(self.0, Float::i_exp(1, -(self.0 as i32)))
    }

    pub fn zero(self) -> BigReal {
        Float::new(self.0)
    }

    pub fn one(self) -> BigReal {
        Float::with_val(self.0, 1)
    }

    pub fn pi(self) -> BigReal {
        Float::with_val(self.0, Constant::Pi)
    }

    pub fn int(self, v: i64) -> BigReal {
        Float::with_val(self.0, v)
    }

    pub fn rational(self, v: &Rational) -> BigReal {
        Float::with_val(self.0, v)
    }

    pub fn from_f64(self, v: f64) -> BigReal {
        Float::with_val(self.0, v)
    }

    /// Parses a decimal string (`"1.25"`, `"-3e-4"`) rounding once to this
    /// precision.
    pub fn parse(self, s: &str) -> Result<BigReal> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::Parse(format!("`{s}` is not a decimal number: {e}")))?;
        Ok(Float::with_val(self.0, parsed))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self(128)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

pub fn precision_of(x: &BigReal) -> Precision {
    Precision(x.prec())
}

/// Rounds `x` to `prec` bits (nearest).
pub fn round_to(x: &BigReal, prec: Precision) -> BigReal {
    let mut out = Float::new(prec.bits());
    out.assign_round(x, Round::Nearest);
    out
}

/// `x^(num/den)` for x > 0.
pub fn pow_ratio(x: &BigReal, num: i64, den: i64) -> BigReal {
    let prec = x.prec();
    let e = Float::with_val(prec, num) / Float::with_val(prec, den);
    Float::with_val(prec, x.pow(&e))
}

/// Decimal string with enough digits that parsing it back at the same
/// precision reproduces the value bit-exactly.
pub fn to_decimal(x: &BigReal) -> String {
    x.to_string_radix(10, None)
}

/// Decimal string with `digits` significant digits, for human-facing tables.
pub fn to_sci(x: &BigReal, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Unit in the last place of `x` at its own precision.
pub fn ulp(x: &BigReal) -> BigReal {
    let prec = x.prec();
    match x.get_exp() {
        Some(e) => Float::with_val(prec, Float::i_exp(1, e - prec as i32)),
        None => Float::with_val(prec, Float::i_exp(1, -(prec as i32))),
    }
}

/// Exact conversion of a decimal literal (`"-2"`, `"0.125"`, `"1.5e-3"`,
/// `"3/4"`) into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not an exact decimal or fraction"));
    if s.contains('/') {
        return Rational::parse(s).map(Rational::from).map_err(|_| bad());
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(rug::Integer::parse(&digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = rug::Integer::from(10);
    if scale >= 0 {
        value *= ten.pow(scale as u32);
    } else {
        value /= ten.pow((-scale) as u32);
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rational_literals() {
        assert_eq!(parse_rational("-2").unwrap(), Rational::from(-2));
        assert_eq!(parse_rational("0.125").unwrap(), Rational::from((1, 8)));
        assert_eq!(parse_rational("1.5e-3").unwrap(), Rational::from((3, 2000)));
        assert_eq!(parse_rational("3/4").unwrap(), Rational::from((3, 4)));
        assert_eq!(parse_rational("2E2").unwrap(), Rational::from(200));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimal_round_trip_is_exact() {
        let prec = Precision::new(256).unwrap();
        let x = prec.pi() / prec.int(7);
        let s = to_decimal(&x);
        let back = prec.parse(&s).unwrap();
        assert_eq!(back, x);
        assert_eq!(to_decimal(&back), s);
    }

    #[test]
    fn precision_bounds() {
        assert!(Precision::new(8).is_err());
        assert_eq!(Precision::default_for_basis(10).bits(), 128);
        assert_eq!(Precision::default_for_basis(30).bits(), 256);
        assert_eq!(Precision::default_for_basis(60).bits(), 384);
    }

    #[test]
    fn ulp_matches_epsilon_at_one() {
        let prec = Precision::new(128).unwrap();
        // 1 has exponent 1 in MPFR's [0.5, 1) convention, so ulp(1) = 2^(1-128)
        assert_eq!(ulp(&prec.one()), prec.epsilon() * 2u32);
    }
}
