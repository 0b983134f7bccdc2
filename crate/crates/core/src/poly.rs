//! Exact univariate polynomials over the complex rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::number::{ComplexRational, Rational};

/// `a0 + a1 x + ... + ad x^d`, stored without trailing zero coefficients.
///
/// The zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<ComplexRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ComplexRational>) -> Self {
        while coeffs.last().is_some_and(ComplexRational::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ComplexRational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(ComplexRational::one())
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![ComplexRational::zero(), ComplexRational::one()])
    }

    /// Convenience constructor from real rational coefficients `(num, den)`.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&(n, d)| ComplexRational::from_ratio(n, d))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[ComplexRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last non-zero coefficient; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> ComplexRational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> ComplexRational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(ComplexRational::is_real)
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Coefficient-wise complex conjugate, so that `conj(p)(x) = conj(p(x))` for real `x`.
    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(ComplexRational::conj).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * &ComplexRational::from_integer(k as i64))
                .collect(),
        )
    }

    /// Exact `∫₀¹ p(x) dx = Σ a_k / (k+1)`.
    pub fn integrate_unit(&self) -> ComplexRational {
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for (k, a) in self.coeffs.iter().enumerate() {
            let w = BigInt::from(k + 1);
            re += &a.re / &w;
            im += &a.im / &w;
        }
        ComplexRational::new(re, im)
    }

    /// Exact evaluation at a complex rational point.
    pub fn eval_exact(&self, z: &ComplexRational) -> ComplexRational {
        self.coeffs
            .iter()
            .rev()
            .fold(ComplexRational::zero(), |acc, a| &(&acc * z) + a)
    }

    pub fn to_complex64(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(ComplexRational::to_complex64)
            .collect()
    }

    /// Horner evaluation after rounding the coefficients to `f64`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.to_complex64(), z)
    }
}

/// Horner evaluation of a floating coefficient vector (lowest degree first).
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Horner evaluation returning `(p(z), p'(z))`.
pub fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Running-error bound for Horner evaluation: `2 d eps Σ |a_k| |z|^k`.
pub fn horner_error_bound(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let mag = coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a.norm());
    2.0 * (coeffs.len().max(1) as f64) * f64::EPSILON * mag
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![ComplexRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| -a).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Formats as the comma-separated coefficient grammar accepted by [`parse_poly`].
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

/// Parses `a0,a1,...,ad` where each coefficient is `R`, `Si`, `R+Si` or `R-Si`
/// and `R`, `S` are integers or fractions `p/q`. Whitespace is ignored;
/// error offsets are byte offsets into the original text.
pub fn parse_poly(text: &str) -> Result<Polynomial> {
    let mut p = Parser {
        chars: text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect(),
        pos: 0,
        end: text.len(),
    };
    let mut coeffs = vec![p.coefficient()?];
    while let Some(c) = p.peek() {
        if c != ',' {
            return Err(p.error("expected `,`"));
        }
        p.pos += 1;
        coeffs.push(p.coefficient()?);
    }
    Ok(Polynomial::new(coeffs))
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end, |&(o, _)| o)
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(false)
            }
            Some('-') => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos]
            .iter()
            .map(|&(_, c)| c)
            .collect();
        s.parse().ok()
    }

    /// Unsigned rational magnitude; `None` if no digits are present.
    fn magnitude(&mut self) -> Result<Option<Rational>> {
        let Some(num) = self.digits() else {
            return Ok(None);
        };
        if self.peek() == Some('/') {
            self.pos += 1;
            let at = self.offset();
            let den = self
                .digits()
                .ok_or_else(|| self.error("expected denominator"))?;
            if den.is_zero() {
                return Err(Error::Syntax {
                    offset: at,
                    message: "zero denominator".into(),
                });
            }
            return Ok(Some(Rational::new(num, den)));
        }
        Ok(Some(Rational::from_integer(num)))
    }

    /// One signed term, either real (`R`) or imaginary (`Si` or bare `i`).
    fn term(&mut self, require_sign: bool) -> Result<Option<(Rational, bool)>> {
        let negative = match self.sign() {
            Some(neg) => neg,
            None if require_sign => return Ok(None),
            None => false,
        };
        let mag = self.magnitude()?;
        let imaginary = if self.peek() == Some('i') {
            self.pos += 1;
            true
        } else {
            false
        };
        let value = match (mag, imaginary) {
            (Some(m), _) => m,
            (None, true) => num_traits::One::one(),
            (None, false) => return Err(self.error("expected a rational number")),
        };
        Ok(Some((if negative { -value } else { value }, imaginary)))
    }

    fn coefficient(&mut self) -> Result<ComplexRational> {
        let (first, first_im) = self
            .term(false)?
            .expect("unsigned term always parses or errors");
        if first_im {
            return Ok(ComplexRational::new(Rational::zero(), first));
        }
        let at = self.offset();
        match self.term(true)? {
            None => Ok(ComplexRational::real(first)),
            Some((im, true)) => Ok(ComplexRational::new(first, im)),
            Some((_, false)) => Err(Error::Syntax {
                offset: at,
                message: "second term of a coefficient must be imaginary".into(),
            }),
        }
    }
}
