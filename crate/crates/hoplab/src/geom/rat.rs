//! Exact rational scalar used by all geometric predicates.
//!
//! `Rat` wraps an arbitrary-precision `BigRational` kept in canonical form
//! (positive denominator, fully reduced), so equality and ordering are
//! exact. No floating point ever enters a predicate.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use super::GeomError;

/// Exact rational number: arbitrary-precision numerator over a positive
/// denominator, always reduced.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Result<Self, GeomError> {
        if denom == 0 {
            return Err(GeomError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom))))
    }

    pub fn from_int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self, GeomError> {
        if denom.is_zero() {
            return Err(GeomError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(numer, denom)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    /// Numerator and denominator as `i64`, when both fit. Fast paths key
    /// off this; callers fall back to big arithmetic on `None`.
    pub fn as_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.0.numer().to_i64()?, self.0.denom().to_i64()?))
    }

    /// Numerator and denominator as `i128`, when both fit.
    pub fn as_i128_pair(&self) -> Option<(i128, i128)> {
        Some((self.0.numer().to_i128()?, self.0.denom().to_i128()?))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    /// Compare `self` with the integer-coefficient affine value `a·x + b`.
    pub fn cmp_affine(&self, a: i64, b: i64, x: &Rat) -> Ordering {
        // self ? a·x + b  ⇔  self.n · x.d  ?  (a·x.n + b·x.d) · self.d
        if let (Some((sn, sd)), Some((xn, xd))) = (self.as_i128_pair(), x.as_i128_pair()) {
            let lhs = sn.checked_mul(xd);
            let rhs = (a as i128)
                .checked_mul(xn)
                .and_then(|ax| ax.checked_add((b as i128).checked_mul(xd)?))
                .and_then(|v| v.checked_mul(sd));
            if let (Some(l), Some(r)) = (lhs, rhs) {
                return l.cmp(&r);
            }
        }
        let rhs = BigRational::new(BigInt::from(a), BigInt::one()) * x.inner()
            + BigRational::from_integer(BigInt::from(b));
        self.0.cmp(&rhs)
    }

    /// Serialized decimal form of the numerator.
    pub fn numer_string(&self) -> String {
        self.0.numer().to_string()
    }

    /// Serialized decimal form of the denominator.
    pub fn denom_string(&self) -> String {
        self.0.denom().to_string()
    }

    pub fn parse_pair(numer: &str, denom: &str) -> Result<Self, GeomError> {
        let n = BigInt::from_str(numer).map_err(|_| GeomError::BadNumber(numer.to_string()))?;
        let d = BigInt::from_str(denom).map_err(|_| GeomError::BadNumber(denom.to_string()))?;
        if d.sign() != Sign::Plus {
            return Err(GeomError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(n, d)))
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.0.is_zero(), "division by zero Rat");
        Rat(self.0 / rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let r = Rat::new(6, -4).unwrap();
        assert_eq!(r, Rat::new(-3, 2).unwrap());
        assert_eq!(r.denom_string(), "2");
        assert_eq!(r.numer_string(), "-3");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(Rat::new(1, 0).is_err());
    }

    #[test]
    fn exact_arithmetic() {
        let a = Rat::new(1, 3).unwrap();
        let b = Rat::new(1, 6).unwrap();
        assert_eq!(&a + &b, Rat::new(1, 2).unwrap());
        assert_eq!(&a - &b, Rat::new(1, 6).unwrap());
        assert_eq!(&a * &b, Rat::new(1, 18).unwrap());
        assert_eq!(a / b, Rat::from_int(2));
    }

    #[test]
    fn cmp_affine_matches_big_path() {
        // y ? 3x + 2 at x = 5/7 for assorted y
        let x = Rat::new(5, 7).unwrap();
        let val = Rat::new(3 * 5 + 2 * 7, 7).unwrap();
        assert_eq!(val.cmp_affine(3, 2, &x), Ordering::Equal);
        // 3·(5/7) + 2 = 29/7
        let lo = Rat::from_int(4); // 28/7
        assert_eq!(lo.cmp_affine(3, 2, &x), Ordering::Less);
        let hi = Rat::new(30, 7).unwrap();
        assert_eq!(hi.cmp_affine(3, 2, &x), Ordering::Greater);
    }

    #[test]
    fn parse_round_trip() {
        let r = Rat::parse_pair("-12345678901234567890", "7").unwrap();
        assert_eq!(r.numer_string(), "-12345678901234567890");
        assert_eq!(r.denom_string(), "7");
        assert!(r.as_i64_pair().is_none());
    }
}
