//! Exact arithmetic support: dyadic rationals for Fourier coefficients and a
//! general rational alias for thresholds and payoff values.

use std::fmt;
use std::ops::{Add, AddAssign, Neg};

use num_rational::Ratio;
use num_traits::Zero;

/// General exact rational used for averages, thresholds and ordering payoffs.
pub type Rational = Ratio<i64>;

/// Formats a rational as `num/den` in lowest terms, always with an explicit
/// denominator (`3/2`, `1/1`).
pub fn rational_string(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A rational whose denominator is a power of two, kept in normalized form:
/// the numerator is odd or zero, and zero carries `log2_denominator = 0`.
///
/// These arise as Fourier coefficients of predicates of arity `s`, which are
/// always integer multiples of `1/2^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: i64,
    log2_denominator: u32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational {
        numerator: 0,
        log2_denominator: 0,
    };

    /// `numerator / 2^log2_denominator`, normalized.
    pub fn new(numerator: i64, log2_denominator: u32) -> Self {
        let mut d = DyadicRational {
            numerator,
            log2_denominator,
        };
        d.normalize();
        d
    }

    pub fn from_integer(n: i64) -> Self {
        DyadicRational {
            numerator: n,
            log2_denominator: 0,
        }
    }

    fn normalize(&mut self) {
        if self.numerator == 0 {
            self.log2_denominator = 0;
            return;
        }
        while self.numerator % 2 == 0 && self.log2_denominator > 0 {
            self.numerator /= 2;
            self.log2_denominator -= 1;
        }
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_denominator
    }

    pub fn is_negative(&self) -> bool {
        self.numerator < 0
    }

    /// Multiplies by the integer `k`.
    pub fn scale(&self, k: i64) -> Self {
        DyadicRational::new(self.numerator * k, self.log2_denominator)
    }

    /// Exact value of `self * 2^exp`; `None` if the result is not an integer.
    pub fn times_pow2(&self, exp: u32) -> Option<i64> {
        if exp >= self.log2_denominator {
            Some(self.numerator << (exp - self.log2_denominator))
        } else if self.numerator == 0 {
            Some(0)
        } else {
            // numerator is odd here, so the quotient cannot be integral
            None
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.numerator, 1i64 << self.log2_denominator)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;

    fn add(self, rhs: DyadicRational) -> DyadicRational {
        let l = self.log2_denominator.max(rhs.log2_denominator);
        let a = self.numerator << (l - self.log2_denominator);
        let b = rhs.numerator << (l - rhs.log2_denominator);
        DyadicRational::new(a + b, l)
    }
}

impl AddAssign for DyadicRational {
    fn add_assign(&mut self, rhs: DyadicRational) {
        *self = *self + rhs;
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;

    fn neg(self) -> DyadicRational {
        DyadicRational {
            numerator: -self.numerator,
            log2_denominator: self.log2_denominator,
        }
    }
}

impl Zero for DyadicRational {
    fn zero() -> Self {
        DyadicRational::ZERO
    }

    fn is_zero(&self) -> bool {
        self.numerator == 0
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.to_rational();
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}
