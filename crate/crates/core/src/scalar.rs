//! Numeric scalars used for satisfaction levels, probabilities and payoffs.
//!
//! Games whose satisfaction entries are all written as decimal strings or
//! `p/q` ratios are evaluated with [`Rational`], so every derived quantity
//! (display probabilities, payoffs, potentials, welfare) is exact. Games that
//! carry binary floats are evaluated with `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive};

/// Absolute tolerance used when comparing float quantities that should agree.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Minimum payoff gain that counts as an improving deviation in float games.
pub const FLOAT_IMPROVEMENT_THRESHOLD: f64 = 1e-9;

/// Arithmetic required by the game machinery.
pub trait Scalar:
    Copy
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Sum
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(numer: i64, denom: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Total order; floats are validated finite before reaching this point.
    fn total_cmp(&self, other: &Self) -> Ordering;

    /// `true` if a payoff change of `gain` counts as a strict improvement.
    fn is_improvement(gain: &Self) -> bool;

    /// Equality up to the float tolerance (exact equality for exact types).
    fn approx_eq(&self, other: &Self) -> bool;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn max_of(self, other: Self) -> Self {
        if other.total_cmp(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other.total_cmp(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
    fn is_improvement(gain: &Self) -> bool {
        *gain > FLOAT_IMPROVEMENT_THRESHOLD
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOLERANCE
    }
}

/// Exact rational number backed by 128-bit integers.
///
/// Every operation is overflow-checked; an overflow panics instead of
/// silently producing a wrong value. Shapley distributions stay within range
/// up to 83 players on a 1/100 grid; use `f64` games beyond that.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    /// Largest denominator accepted from game files; keeps downstream sums
    /// comfortably inside 128-bit arithmetic.
    pub const MAX_INPUT_DENOMINATOR: i128 = 1_000_000_000_000;
}

fn overflow(op: &str) -> ! {
    panic!("rational overflow in {op}; use float satisfaction values for this game")
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_add(&rhs.0).unwrap_or_else(|| overflow("add")))
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_sub(&rhs.0).unwrap_or_else(|| overflow("sub")))
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_mul(&rhs.0).unwrap_or_else(|| overflow("mul")))
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(rhs.numer() != 0, "rational division by zero");
        Rational(self.0.checked_div(&rhs.0).unwrap_or_else(|| overflow("div")))
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational::from_integer(0)
    }
    fn one() -> Self {
        Rational::from_integer(1)
    }
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(numer as i128, denom as i128)
    }
    fn to_f64(&self) -> f64 {
        // Reduce magnitudes first so huge numerators do not saturate.
        let (q, r) = self.numer().div_rem(&self.denom());
        q.to_f64().unwrap_or(f64::NAN) + r as f64 / self.denom() as f64
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn is_improvement(gain: &Self) -> bool {
        *gain > Rational::zero()
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Failure to read an exact number from text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("not a decimal or p/q number: {0:?}")]
    Syntax(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("denominator of {0:?} is too large for exact arithmetic")]
    TooPrecise(String),
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts integers, decimals (`0.125`, `-.5`) and ratios (`3/8`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let syntax = || ParseRationalError::Syntax(s.to_string());
        if let Some((num, den)) = text.split_once('/') {
            let num: i128 = num.trim().parse().map_err(|_| syntax())?;
            let den: i128 = den.trim().parse().map_err(|_| syntax())?;
            if den == 0 {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            let r = Rational::new(num, den);
            if r.denom() > Rational::MAX_INPUT_DENOMINATOR {
                return Err(ParseRationalError::TooPrecise(s.to_string()));
            }
            return Ok(r);
        }
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(syntax());
        }
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) {
            return Err(syntax());
        }
        let frac_trimmed = frac_part.trim_end_matches('0');
        if frac_trimmed.len() > 12 {
            return Err(ParseRationalError::TooPrecise(s.to_string()));
        }
        let int_value: i128 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| syntax())?
        };
        let denom = 10i128.pow(frac_trimmed.len() as u32);
        let frac_value: i128 = if frac_trimmed.is_empty() {
            0
        } else {
            frac_trimmed.parse().map_err(|_| syntax())?
        };
        let numer = int_value
            .checked_mul(denom)
            .and_then(|v| v.checked_add(frac_value))
            .ok_or_else(syntax)?;
        Ok(Rational::new(if negative { -numer } else { numer }, denom))
    }
}

/// Formats a scalar for reports: rationals as `p/q` followed by a 12-digit
/// decimal, floats with 12 significant digits.
pub fn format_scalar<S: Scalar>(value: &S) -> String {
    if S::EXACT {
        format!("{} ({:.12})", value, value.to_f64())
    } else {
        format_float(value.to_f64())
    }
}

/// 12 significant digits, trailing zeros trimmed; scientific notation
/// below 1e-4 and from 1e15 on.
pub fn format_float(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-4..15).contains(&magnitude) {
        let s = format!("{v:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("scientific format has an exponent");
        return format!("{}e{exp}", mantissa.trim_end_matches('0').trim_end_matches('.'));
    }
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_ratios() {
        assert_eq!("0.1".parse::<Rational>().unwrap(), Rational::new(1, 10));
        assert_eq!("0.850".parse::<Rational>().unwrap(), Rational::new(17, 20));
        assert_eq!("3/8".parse::<Rational>().unwrap(), Rational::new(3, 8));
        assert_eq!("1".parse::<Rational>().unwrap(), Rational::one());
        assert_eq!(".5".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("-0.25".parse::<Rational>().unwrap(), Rational::new(-1, 4));
    }

    #[test]
    fn rejects_garbage() {
        assert!("abc".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!(".".parse::<Rational>().is_err());
        assert!("1e-3".parse::<Rational>().is_err());
        assert!("0.1234567890123".parse::<Rational>().is_err());
    }

    #[test]
    fn display_and_float_format() {
        assert_eq!(Rational::new(8, 5).to_string(), "8/5");
        assert_eq!(Rational::new(4, 2).to_string(), "2");
        assert_eq!(format_scalar(&Rational::new(7, 10)), "7/10 (0.700000000000)");
        assert_eq!(format_float(2.145), "2.145");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(5.72195849815e-17), "5.72195849815e-17");
        assert_eq!(format_float(-2.5e-9), "-2.5e-9");
        assert_eq!(format_float(0.0001), "0.0001");
    }

    #[test]
    #[should_panic(expected = "rational overflow")]
    fn overflow_is_loud() {
        let big = Rational::new(i128::MAX / 2, 1);
        let _ = big * big;
    }
}
