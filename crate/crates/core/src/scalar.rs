//! Number types the evaluation paths are generic over.
//!
//! Series construction is always exact; a [`Scalar`] is what the series get
//! evaluated *into*. `BigRational` keeps everything exact, `f64` is the float
//! evaluation mode.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub trait Scalar: Clone + Debug + Num + Signed + PartialOrd + Send + Sync {
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    /// Integer power; negative exponents invert.
    fn powi(&self, e: i32) -> Self {
        let mut base = if e < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Converts without overflowing when numerator and denominator are both huge.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
    // top ~64 bits of |q| * 2^(64 - shift) as an integer
    let k = 64 - shift;
    let top = if k >= 0 {
        (q.numer() << (k as usize)) / q.denom()
    } else {
        q.numer() / (q.denom() << ((-k) as usize))
    };
    let mut v = top.to_f64().unwrap_or(f64::NAN);
    let mut e = -k;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    v
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
