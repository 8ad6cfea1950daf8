//! Exact rational numbers for thresholds and neighborhood fractions.
//!
//! Every quantity the update rules compare -- the threshold and the fractions
//! `|N(a) ∩ X| / |N(a)|` -- is a [`Rat`]. The tie predicate `fraction = θ`
//! must be decidable exactly, so floating point is banned from the semantics;
//! input files spell thresholds as `"p/q"` strings and a float is rejected
//! outright at the parsing layer.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// An arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

/// Failure to read a rational from text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer part in rational literal: {0:?}")]
    BadInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
    #[error(
        "floating-point literal {0:?} rejected: thresholds must be exact rationals like \"1/2\""
    )]
    FloatRejected(String),
}

impl Rat {
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numerator), BigInt::from(denominator)))
    }

    pub fn from_big(numerator: BigInt, denominator: BigInt) -> Option<Self> {
        if denominator.is_zero() {
            return None;
        }
        Some(Rat(BigRational::new(numerator, denominator)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// Count-over-count fraction, e.g. `|N(a) ∩ X| / |N(a)|`.
    pub fn ratio(count: usize, total: usize) -> Self {
        assert!(total > 0, "fraction with zero denominator");
        Rat(BigRational::new(BigInt::from(count), BigInt::from(total)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True when the value lies in the closed unit interval.
    pub fn in_unit_interval(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }

    /// Numerator and denominator as `u64`, when both fit and the value is
    /// non-negative. The exhaustive formula sweep uses this to drop into
    /// machine-word arithmetic.
    pub fn to_u64_parts(&self) -> Option<(u64, u64)> {
        use num_traits::ToPrimitive;
        if self.0.is_negative() {
            return None;
        }
        Some((self.0.numer().to_u64()?, self.0.denom().to_u64()?))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `"p/q"` or a bare integer string. Anything with a decimal
    /// point or exponent is a [`ParseRatError::FloatRejected`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRatError::Empty);
        }
        if s.contains('.') || s.contains('e') || s.contains('E') {
            return Err(ParseRatError::FloatRejected(s.to_string()));
        }
        let parse_int = |part: &str| -> Result<BigInt, ParseRatError> {
            part.trim()
                .parse::<BigInt>()
                .map_err(|_| ParseRatError::BadInteger(part.trim().to_string()))
        };
        match s.split_once('/') {
            None => Ok(Rat(BigRational::from_integer(parse_int(s)?))),
            Some((num, den)) => {
                let num = parse_int(num)?;
                let den = parse_int(den)?;
                if den.is_zero() {
                    return Err(ParseRatError::ZeroDenominator);
                }
                Ok(Rat(BigRational::new(num, den)))
            }
        }
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        Rat(&self.0 - &rhs.0)
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.0.is_zero(), "division by zero rational");
        Rat(&self.0 / &rhs.0)
    }
}

/// Exact comparison against another rational given as `p/q`; convenience for
/// tests and table-driven assertions.
impl PartialEq<(i64, i64)> for Rat {
    fn eq(&self, other: &(i64, i64)) -> bool {
        *self == Rat::new(other.0, other.1)
    }
}

impl PartialOrd<(i64, i64)> for Rat {
    fn partial_cmp(&self, other: &(i64, i64)) -> Option<Ordering> {
        self.partial_cmp(&Rat::new(other.0, other.1))
    }
}
