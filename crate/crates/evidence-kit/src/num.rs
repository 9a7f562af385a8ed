//! Extended nonnegative reals `[0, ∞]` with dual numerics.
//!
//! Every quantity in this crate is a value in `[0, ∞]`, carried either as an
//! exact `BigRational` or as a finite binary64. Arithmetic follows the
//! measure-theoretic conventions: `∞ · 0 = 0`, `∞ + x = ∞`, `0/0 = 0`,
//! `x/0 = ∞` for `x > 0`. Comparisons are always exact — a binary64 value is
//! a rational number and is compared as one — so ordering never depends on
//! which representation a value happens to use.
//!
//! Mixing representations degrades the result to binary64; an operation whose
//! inputs are all exact stays exact. [`ExtReal::mode`] reports which side a
//! value is on.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which arithmetic produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactRational,
    Binary64,
}

impl Mode {
    pub fn combine(self, other: Mode) -> Mode {
        match (self, other) {
            (Mode::ExactRational, Mode::ExactRational) => Mode::ExactRational,
            _ => Mode::Binary64,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::ExactRational => write!(f, "exact-rational"),
            Mode::Binary64 => write!(f, "binary64"),
        }
    }
}

/// A value in `[0, ∞]`.
///
/// Invariant: `Float` holds a finite, nonnegative, non-NaN number — build
/// values through [`ExtReal::from_f64`]/[`ExtReal::from_rational`] (or the
/// literal constructors below) rather than the variants when the input is
/// untrusted. Comparisons are total under this invariant.
#[derive(Clone, Debug)]
pub enum ExtReal {
    Exact(BigRational),
    Float(f64),
    Inf,
}

impl ExtReal {
    pub fn zero() -> Self {
        ExtReal::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        ExtReal::Exact(BigRational::one())
    }

    pub fn infinity() -> Self {
        ExtReal::Inf
    }

    /// Exact value from an integer.
    pub fn from_int(n: u64) -> Self {
        ExtReal::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact value `p/q`.
    pub fn from_ratio(p: u64, q: u64) -> Self {
        assert!(q != 0, "zero denominator");
        ExtReal::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(r: BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::NegativeValue(r.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(ExtReal::Exact(r))
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        if x.is_nan() {
            return Err(Error::NotANumber);
        }
        if x < 0.0 {
            return Err(Error::NegativeValue(x));
        }
        if x.is_infinite() {
            return Ok(ExtReal::Inf);
        }
        Ok(ExtReal::Float(x))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExtReal::Exact(r) => r.is_zero(),
            ExtReal::Float(x) => *x == 0.0,
            ExtReal::Inf => false,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Inf)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ExtReal::Exact(_) | ExtReal::Inf)
    }

    pub fn mode(&self) -> Mode {
        match self {
            ExtReal::Float(_) => Mode::Binary64,
            _ => Mode::ExactRational,
        }
    }

    /// The exact rational content of a finite value. Binary64 values convert
    /// losslessly (every finite f64 is rational); `None` for `∞`.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            ExtReal::Exact(r) => Some(r.clone()),
            ExtReal::Float(x) => BigRational::from_float(*x),
            ExtReal::Inf => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Exact(r) => r.to_f64().unwrap_or(f64::INFINITY),
            ExtReal::Float(x) => *x,
            ExtReal::Inf => f64::INFINITY,
        }
    }

    /// Addition; `∞` absorbs.
    pub fn add(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Inf, _) | (_, ExtReal::Inf) => ExtReal::Inf,
            (ExtReal::Exact(a), ExtReal::Exact(b)) => ExtReal::Exact(a + b),
            (a, b) => saturating_float(a.to_f64() + b.to_f64()),
        }
    }

    /// Multiplication with the convention `∞ · 0 = 0`.
    pub fn mul(&self, other: &ExtReal) -> ExtReal {
        if self.is_zero() || other.is_zero() {
            return ExtReal::zero();
        }
        match (self, other) {
            (ExtReal::Inf, _) | (_, ExtReal::Inf) => ExtReal::Inf,
            (ExtReal::Exact(a), ExtReal::Exact(b)) => ExtReal::Exact(a * b),
            (a, b) => saturating_float(a.to_f64() * b.to_f64()),
        }
    }

    /// Division with `0/0 = 0`, `x/0 = ∞` for `x > 0`, `x/∞ = 0` for finite
    /// `x`, and `∞/∞ = ∞` (such a divisor already fails any e-check loudly).
    pub fn div(&self, den: &ExtReal) -> ExtReal {
        if den.is_zero() {
            return if self.is_zero() {
                ExtReal::zero()
            } else {
                ExtReal::Inf
            };
        }
        match (self, den) {
            (ExtReal::Inf, _) => ExtReal::Inf,
            (_, ExtReal::Inf) => ExtReal::zero(),
            (ExtReal::Exact(a), ExtReal::Exact(b)) => ExtReal::Exact(a / b),
            (a, b) => saturating_float(a.to_f64() / b.to_f64()),
        }
    }

    /// Sum of a sequence of values.
    pub fn sum<'a, I: IntoIterator<Item = &'a ExtReal>>(iter: I) -> ExtReal {
        iter.into_iter().fold(ExtReal::zero(), |acc, x| acc.add(x))
    }

    /// `min(1, 1/x)` — the e-to-p direction of calibration.
    pub fn reciprocal_capped(&self) -> ExtReal {
        let inv = ExtReal::one().div(self);
        if inv > ExtReal::one() {
            ExtReal::one()
        } else {
            inv
        }
    }
}

fn saturating_float(x: f64) -> ExtReal {
    if x.is_infinite() {
        ExtReal::Inf
    } else {
        ExtReal::Float(x)
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Inf, ExtReal::Inf) => Ordering::Equal,
            (ExtReal::Inf, _) => Ordering::Greater,
            (_, ExtReal::Inf) => Ordering::Less,
            (ExtReal::Exact(a), ExtReal::Exact(b)) => a.cmp(b),
            (ExtReal::Float(a), ExtReal::Float(b)) => a.partial_cmp(b).expect("finite floats"),
            (a, b) => {
                let ra = a.to_rational().expect("finite");
                let rb = b.to_rational().expect("finite");
                ra.cmp(&rb)
            }
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Exact(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            ExtReal::Float(x) => write!(f, "{x}"),
            ExtReal::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Exact(_) | ExtReal::Inf => serializer.serialize_str(&self.to_string()),
            ExtReal::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(
                    f,
                    "a nonnegative number, a rational string \"p/q\", or \"inf\""
                )
            }

            fn visit_f64<E: de::Error>(self, x: f64) -> std::result::Result<ExtReal, E> {
                ExtReal::from_f64(x).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, x: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::from_int(x))
            }

            fn visit_i64<E: de::Error>(self, x: i64) -> std::result::Result<ExtReal, E> {
                if x < 0 {
                    return Err(E::custom(Error::NegativeValue(x as f64)));
                }
                Ok(ExtReal::from_int(x as u64))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<ExtReal, E> {
                parse_ext_real(s).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Parses `"p/q"`, an integer string, or `"inf"`.
pub fn parse_ext_real(s: &str) -> Result<ExtReal> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "\u{221e}" || s.eq_ignore_ascii_case("infinity") {
        return Ok(ExtReal::Inf);
    }
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::InvalidParameter(format!("not a rational: {s:?}")))
    };
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let denom = parse_int(q.trim())?;
            if denom.is_zero() {
                return Err(Error::InvalidParameter(format!("zero denominator: {s:?}")));
            }
            BigRational::new(parse_int(p.trim())?, denom)
        }
        None => BigRational::from_integer(parse_int(s)?),
    };
    ExtReal::from_rational(r)
}

/// Certified enclosure of `x^(num/den)` for exact rational `x > 0`.
///
/// Bisection on `y ↦ y^den` against `x^num` using exact comparisons only:
/// the returned bracket `[lo, hi]` satisfies `lo ≤ x^(num/den) ≤ hi` with
/// `hi − lo ≤ hi₀ · 2^−bits`. This is what lets membership checks involving
/// κp^{κ−1} run without any floating point in the decision path.
pub fn rational_pow_bracket(
    x: &BigRational,
    num: i64,
    den: u64,
    bits: u32,
) -> Result<(BigRational, BigRational)> {
    if !x.is_positive() {
        return Err(Error::InvalidParameter("power bracket needs x > 0".into()));
    }
    if den == 0 {
        return Err(Error::InvalidParameter("zero exponent denominator".into()));
    }
    // x^(num/den) = (x^num)^(1/den); x^num is exact.
    let target = pow_i(x, num);
    if den == 1 {
        return Ok((target.clone(), target));
    }
    // Initial bracket for y = target^(1/den) from the f64 estimate, widened
    // until it provably contains the root.
    let est = target.to_f64().unwrap_or(f64::MAX).powf(1.0 / den as f64);
    let mut lo = BigRational::from_float((est * 0.5).max(f64::MIN_POSITIVE))
        .unwrap_or_else(|| BigRational::new(BigInt::from(1), BigInt::from(u64::MAX)));
    let mut hi = BigRational::from_float(est * 2.0)
        .unwrap_or_else(|| BigRational::from_integer(BigInt::from(u64::MAX)));
    if lo.is_negative() || lo.is_zero() {
        lo = BigRational::new(BigInt::from(1), BigInt::from(u64::MAX));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    while pow_i(&lo, den as i64) > target {
        lo /= &two;
    }
    while pow_i(&hi, den as i64) < target {
        hi *= &two;
    }
    for _ in 0..bits {
        let mid = (&lo + &hi) / &two;
        if pow_i(&mid, den as i64) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn pow_i(x: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let abs = i32::try_from(e.unsigned_abs()).expect("exponent fits in i32");
    let p = x.pow(abs);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(p: i64, q: i64) -> ExtReal {
        ExtReal::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    #[test]
    fn infinity_times_zero_is_zero() {
        assert!(ExtReal::Inf.mul(&ExtReal::zero()).is_zero());
        assert!(ExtReal::zero().mul(&ExtReal::Inf).is_zero());
        assert!(ExtReal::Inf.mul(&ExtReal::Float(0.0)).is_zero());
    }

    #[test]
    fn infinity_absorbs_addition() {
        assert!(ExtReal::Inf.add(&ratio(5, 1)).is_infinite());
        assert!(ratio(5, 1).add(&ExtReal::Inf).is_infinite());
    }

    #[test]
    fn division_conventions() {
        assert!(ExtReal::zero().div(&ExtReal::zero()).is_zero());
        assert!(ratio(3, 1).div(&ExtReal::zero()).is_infinite());
        assert!(ratio(3, 1).div(&ExtReal::Inf).is_zero());
        assert_eq!(ratio(3, 1).div(&ratio(2, 1)), ratio(3, 2));
    }

    #[test]
    fn cross_mode_comparison_is_exact() {
        assert_eq!(ExtReal::Float(0.5), ratio(1, 2));
        assert!(ExtReal::Float(0.1) > ratio(1, 10)); // 0.1f64 is slightly above 1/10
        assert!(ratio(1, 3) > ExtReal::Float(0.333333));
    }

    #[test]
    fn mode_tracking() {
        assert_eq!(ratio(1, 2).add(&ratio(1, 2)).mode(), Mode::ExactRational);
        assert_eq!(ratio(1, 2).add(&ExtReal::Float(0.5)).mode(), Mode::Binary64);
    }

    #[test]
    fn reciprocal_capped() {
        assert_eq!(ExtReal::from_int(20).reciprocal_capped(), ratio(1, 20));
        assert_eq!(ExtReal::Float(0.5).reciprocal_capped(), ExtReal::one());
        assert!(ExtReal::Inf.reciprocal_capped().is_zero());
        assert_eq!(ExtReal::zero().reciprocal_capped(), ExtReal::one());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(parse_ext_real("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_ext_real("3").unwrap(), ratio(3, 1));
        assert!(parse_ext_real("inf").unwrap().is_infinite());
        assert!(parse_ext_real("-1/2").is_err());
        assert!(parse_ext_real("1/0").is_err());
        assert_eq!(ratio(1, 2).to_string(), "1/2");
        assert_eq!(ratio(4, 2).to_string(), "2");
    }

    #[test]
    fn serde_round_trip() {
        for v in [ratio(1, 3), ExtReal::Float(0.25), ExtReal::Inf, ratio(7, 1)] {
            let s = serde_json::to_string(&v).unwrap();
            let back: ExtReal = serde_json::from_str(&s).unwrap();
            assert_eq!(back, v);
            assert_eq!(back.mode(), v.mode());
        }
    }

    #[test]
    fn pow_bracket_encloses_square_root() {
        let x = BigRational::new(BigInt::from(1), BigInt::from(25));
        // (1/25)^(-1/2) = 5
        let (lo, hi) = rational_pow_bracket(&x, -1, 2, 64).unwrap();
        let five = BigRational::from_integer(BigInt::from(5));
        assert!(lo <= five && five <= hi);
        let width = (&hi - &lo).to_f64().unwrap();
        assert!(width < 1e-15, "width {width}");
    }

    #[test]
    fn pow_bracket_irrational() {
        let x = BigRational::new(BigInt::from(1), BigInt::from(10));
        // 10^(1/2) lies in the bracket of (1/10)^(-1/2)
        let (lo, hi) = rational_pow_bracket(&x, -1, 2, 80).unwrap();
        let lo_f = lo.to_f64().unwrap();
        let hi_f = hi.to_f64().unwrap();
        assert!(lo_f <= 10f64.sqrt() && 10f64.sqrt() <= hi_f);
    }
}
