//! Exact rational arithmetic.
//!
//! All probabilities, distances, discounts and tolerances in this crate are
//! [`Rat`] values. No floating point enters any semantic computation; two
//! equal values always compare equal bitwise because the representation is
//! kept canonical (reduced, positive denominator).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational number with canonical representation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// Builds `numer/denom`. Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True iff the value lies in the closed unit interval.
    pub fn is_unit(&self) -> bool {
        !self.is_negative() && self.0 <= BigRational::one()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// `max(self - other, 0)`, the asymmetric difference used throughout the
    /// hemimetric definitions.
    pub fn monus(&self, other: &Self) -> Self {
        if self > other {
            self - other
        } else {
            Rat::zero()
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Rat::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    /// Decimal rendering for display purposes only; the exact value is the
    /// `a/b` form.
    pub fn to_decimal(&self, digits: usize) -> String {
        let numer = self.0.numer();
        let denom = self.0.denom();
        let neg = numer.is_negative();
        let n = numer.abs();
        let int = &n / denom;
        let mut rem = &n % denom;
        let mut frac = String::new();
        for _ in 0..digits {
            if rem.is_zero() {
                break;
            }
            rem *= BigInt::from(10);
            let d = &rem / denom;
            frac.push_str(&d.to_string());
            rem %= denom;
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&int.to_string());
        if !frac.is_empty() {
            out.push('.');
            out.push_str(&frac);
        }
        if !rem.is_zero() {
            out.push('…');
        }
        out
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
        write!(f, "{}", self)
    }
}

/// Error produced when a string does not denote an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `a/b`, integers, and terminating decimals. Decimals are read
    /// exactly: `0.5` is one half, never a binary float.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || ParseRatError(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let numer: BigInt = n.trim().parse().map_err(|_| err())?;
            let denom: BigInt = d.trim().parse().map_err(|_| err())?;
            if denom.is_zero() {
                return Err(err());
            }
            return Ok(Rat(BigRational::new(numer, denom)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int = if int.is_empty() { "0" } else { int };
            let (neg, int) = match int.strip_prefix('-') {
                Some(rest) => (true, if rest.is_empty() { "0" } else { rest }),
                None => (false, int),
            };
            let int_part: BigInt = int.parse().map_err(|_| err())?;
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let frac_part: BigInt = frac.parse().map_err(|_| err())?;
            let scale = BigInt::from(10).pow(frac.len() as u32);
            let mut numer = int_part * &scale + frac_part;
            if neg {
                numer = -numer;
            }
            return Ok(Rat(BigRational::new(numer, scale)));
        }
        let numer: BigInt = s.parse().map_err(|_| err())?;
        Ok(Rat(BigRational::from_integer(numer)))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}
