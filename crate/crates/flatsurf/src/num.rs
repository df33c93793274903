//! Dual-mode arithmetic: exact arbitrary-precision rationals or binary
//! floats with a global relative validation tolerance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Relative tolerance used by float-mode validation.
pub const FLOAT_TOL: f64 = 1e-12;

/// Exact rational scalar.
pub type Rat = BigRational;

/// Field operations shared by the exact and float modes.
///
/// Exact-mode comparisons are literal; float mode compares against
/// `FLOAT_TOL` times a caller-supplied scale.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact conversion from a binary float (every finite f64 is rational).
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact conversion into a rational (lossless in both modes).
    fn to_rat(&self) -> Rat;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    /// Exact square root when one exists in the field; floats always succeed.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Zero test relative to a nonnegative scale: exact in rational mode,
    /// `|x| <= FLOAT_TOL * max(scale, 1)` in float mode.
    fn near_zero(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_f64().abs() <= FLOAT_TOL * scale.max(1.0)
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
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rat(&self) -> Rat {
        <Rat as FromPrimitive>::from_f64(*self).expect("finite float")
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as num_traits::One>::one()
    }
    fn from_int(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(x: f64) -> Self {
        <Rat as FromPrimitive>::from_f64(x).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_rat(&self) -> Rat {
        self.clone()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn sqrt_exact(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let num = self.numer().sqrt();
        let den = self.denom().sqrt();
        (&num * &num == *self.numer() && &den * &den == *self.denom())
            .then(|| Rat::new(num, den))
    }
}

/// Exact rational from a finite float (concrete-type helper that avoids
/// trait-method ambiguity with num_traits).
pub fn rat_from_f64(x: f64) -> Rat {
    <Rat as FromPrimitive>::from_f64(x).expect("finite float")
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Ratio of integers as a rational.
pub fn rat_ratio(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Best rational approximation p/q of `x` with q bounded, via continued
/// fractions. Used to test floats for (near-)rationality.
pub fn rational_approx(x: f64, max_den: u64) -> (i64, u64) {
    let neg = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0u64, x.floor() as i64, 1u64);
    x -= x.floor();
    for _ in 0..64 {
        if x.abs() < 1e-18 {
            break;
        }
        x = 1.0 / x;
        let a = x.floor();
        if a as u64 > max_den {
            break;
        }
        x -= a;
        let p2 = a as i64 * p1 + p0;
        let q2 = (a as u64).saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    if neg {
        (-p1, q1)
    } else {
        (p1, q1)
    }
}

/// Whether `x` is indistinguishable from a rational with denominator at
/// most `max_den`: some continued-fraction convergent matches far beyond
/// the generic 1/q^2 approximation quality.
pub fn looks_rational(x: f64, max_den: u64, eps: f64) -> bool {
    let (p, q) = rational_approx(x, max_den);
    (x - p as f64 / q as f64).abs() <= eps * x.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sqrt() {
        assert_eq!(
            crate::num::rat_ratio(9, 4).sqrt_exact(),
            Some(crate::num::rat_ratio(3, 2))
        );
        assert_eq!(crate::num::rat_int(2).sqrt_exact(), None);
        assert_eq!(crate::num::rat_int(-1).sqrt_exact(), None);
    }

    #[test]
    fn float_exactly_rational() {
        let r = crate::num::rat_from_f64(0.5);
        assert_eq!(r, crate::num::rat_ratio(1, 2));
    }

    #[test]
    fn continued_fraction_convergents() {
        let (p, q) = rational_approx(std::f64::consts::PI, 1000);
        assert_eq!((p, q), (355, 113));
        assert!(looks_rational(1.5, 1_000_000, 5e-14));
        assert!(looks_rational(3.0 / 7.0, 1_000_000, 5e-14));
        assert!(!looks_rational(std::f64::consts::SQRT_2, 1_000_000, 5e-14));
    }
}
