//! Exact complex rationals.
//!
//! The real and imaginary parts are `BigRational`s, which keep themselves in
//! lowest terms with a positive denominator, so derived equality is exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Exact complex number `re + im*i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::real(Rational::from_integer(BigInt::from(n)))
    }

    /// `num/den` as a real value. Panics on a zero denominator.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `(re_num/re_den) + (im_num/im_den) i`.
    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(
            Rational::new(re.0.into(), re.1.into()),
            Rational::new(im.0.into(), im.1.into()),
        )
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Exact `|z|^2`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// `ln |z|`, accurate even when `|z|` under- or overflows `f64`.
    /// Returns `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let n = self.norm_sqr();
        0.5 * (ln_bigint(n.numer()) - ln_bigint(n.denom()))
    }
}

/// Natural log of a positive big integer, using the leading 64 bits.
pub(crate) fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to logarithms for values outside f64 range
        if r.is_zero() {
            return 0.0;
        }
        let ln = ln_bigint(&r.numer().abs()) - ln_bigint(r.denom());
        let v = ln.exp();
        if r.is_negative() {
            -v
        } else {
            v
        }
    })
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Formats in the coefficient grammar: `R`, `Si`, `R+Si` or `R-Si`.
impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return fmt_rational(&self.re, f);
        }
        if !self.re.is_zero() {
            fmt_rational(&self.re, f)?;
            if self.im.is_positive() {
                write!(f, "+")?;
            }
        }
        fmt_rational(&self.im, f)?;
        write!(f, "i")
    }
}

impl<'a> Add<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: &'a ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: &'a ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a ComplexRational> for &'a ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: &'a ComplexRational) -> ComplexRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return ComplexRational::real(&self.re * &rhs.re);
        }
        ComplexRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ComplexRational {
            type Output = ComplexRational;
            fn $m(self, rhs: ComplexRational) -> ComplexRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        -&self
    }
}
