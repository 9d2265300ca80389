//! Exact probabilities.
//!
//! Exhaustive enumeration yields integer counts over a finite sample space;
//! `Rational` keeps them reduced so that equality is exact.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Reduced fraction. Signed so that Fourier coefficients can share the type;
/// probabilities are always non-negative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numerator.into(), denominator.into()))
    }

    /// `count / total` for enumeration counts.
    pub fn ratio(count: u64, total: u64) -> Self {
        Self::new(count, total)
    }

    /// `numerator / 2^log2_denominator`.
    pub fn dyadic(numerator: impl Into<BigInt>, log2_denominator: u32) -> Self {
        Self::new(numerator, BigInt::one() << log2_denominator)
    }

    pub fn from_integer(v: i64) -> Self {
        Self::new(v, 1)
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Returns `k` when the reduced denominator is `2^k`.
    pub fn log2_denominator(&self) -> Option<u32> {
        let d = self.0.denom();
        let (sign, mag) = (d.sign(), d.magnitude());
        if sign != Sign::Plus {
            return None;
        }
        let bits = mag.bits();
        if *mag == BigUint::one() << (bits - 1) {
            Some((bits - 1) as u32)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn pow(&self, e: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, e))
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }

    /// Nearest `f64`; exact for dyadic values with small denominators.
    pub fn to_f64(&self) -> f64 {
        let (n, d) = (self.0.numer(), self.0.denom());
        match (n.to_f64(), d.to_f64()) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
            _ => {
                // shrink both sides until they fit
                let shift = n.bits().max(d.bits()).saturating_sub(1000);
                let a = (n >> shift).to_f64().unwrap_or(0.0);
                let b = (d >> shift).to_f64().unwrap_or(1.0);
                a / b
            }
        }
    }

    /// True when `self` is an integer multiple of `1/2^k`.
    pub fn has_granularity(&self, log2: u32) -> bool {
        let scaled = &self.0 * BigRational::from_integer(BigInt::one() << log2);
        scaled.is_integer()
    }

    /// Integer part of `self * den` when that product is integral.
    pub fn numerator_over(&self, den: &BigInt) -> Option<BigInt> {
        let (q, r) = (self.0.numer() * den).div_rem(self.0.denom());
        r.is_zero().then_some(q)
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The exact value of a finite float.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Rational)
    }

    /// `(numerator, denominator)` when both fit machine words.
    pub fn to_i64_pair(&self) -> Option<(i64, u64)> {
        Some((self.0.numer().to_i64()?, self.0.denom().to_u64()?))
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Rational {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || crate::Error::Parse(format!("bad rational {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rational::new(n, d))
            }
            None => Ok(Rational::new(s.parse::<BigInt>().map_err(|_| bad())?, 1)),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |a, b| a * b)
    }
}
