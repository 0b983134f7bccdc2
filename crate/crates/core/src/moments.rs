//! Exact moments `M_n(f) = ∫₀¹ f(x)^n dx`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::number::{ComplexRational, Rational};
use crate::poly::Polynomial;

/// Default cap on the size of any coefficient of `f^n`.
pub const DEFAULT_BIT_CAP: u64 = 1_000_000;
pub const DEFAULT_N_MAX: usize = 200;

/// Exact value of a single moment. `f^n` is formed by repeated squaring over the
/// Gaussian integers.
pub fn moment(f: &Polynomial, n: u32) -> ComplexRational {
    if f.is_zero() {
        return if n == 0 {
            ComplexRational::one()
        } else {
            ComplexRational::zero()
        };
    }
    let (g, denom) = split_denominator(f);
    let mut power = vec![Gaussian::one()];
    let mut base = g;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            power = gaussian_mul(&power, &base);
        }
        e >>= 1;
        if e > 0 {
            base = gaussian_mul(&base, &base);
        }
    }
    let lcm_all = lcm_upto(power.len());
    let weights = unit_weights(&lcm_all, power.len());
    integrate_scaled(
        &power,
        &weights,
        &(&lcm_all * num_traits::pow(denom, n as usize)),
    )
}

/// Checks `M_n(c f) = c^n M_n(f)` by computing both sides exactly.
pub fn scale_law_check(f: &Polynomial, c: &ComplexRational, n: u32) -> bool {
    moment(&f.scale(c), n) == &c.pow(n) * &moment(f, n)
}

/// `M_0, ..., M_{n_max}` for one polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    poly: Polynomial,
    values: Vec<ComplexRational>,
}

impl MomentSequence {
    /// Wraps externally computed values, e.g. a rescaled sequence.
    pub fn from_values(poly: Polynomial, values: Vec<ComplexRational>) -> Self {
        Self { poly, values }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn values(&self) -> &[ComplexRational] {
        &self.values
    }

    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, n: usize) -> Option<&ComplexRational> {
        self.values.get(n)
    }

    /// Least `n >= from` with `M_n != 0`, decided exactly.
    pub fn first_nonzero_index(&self, from: usize) -> Option<usize> {
        (from..self.values.len()).find(|&n| !self.values[n].is_zero())
    }

    /// Indices in `lo..=hi` (clamped to the sequence) whose moment is non-zero.
    pub fn nonzero_in(&self, lo: usize, hi: usize) -> Vec<usize> {
        let hi = hi.min(self.n_max());
        (lo..=hi).filter(|&n| !self.values[n].is_zero()).collect()
    }

    /// Exact dump, one `n<TAB>re_num/re_den<TAB>im_num/im_den` record per line.
    pub fn to_exact_dump(&self) -> String {
        let mut out = String::new();
        for (n, m) in self.values.iter().enumerate() {
            let _ = writeln!(
                out,
                "{n}\t{}/{}\t{}/{}",
                m.re.numer(),
                m.re.denom(),
                m.im.numer(),
                m.im.denom()
            );
        }
        out
    }

    /// Floating companion dump `n,re,im,abs,abs_nth_root` with a header row.
    /// `abs_nth_root` is left empty for `n = 0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re,im,abs,abs_nth_root\n");
        for (n, m) in self.values.iter().enumerate() {
            let z = m.to_complex64();
            let ln = m.ln_abs();
            let root = if n == 0 {
                String::new()
            } else {
                format!("{:e}", (ln / n as f64).exp())
            };
            let _ = writeln!(out, "{n},{:e},{:e},{:e},{root}", z.re, z.im, ln.exp());
        }
        out
    }
}

/// Moment computation settings.
#[derive(Clone, Copy, Debug)]
pub struct MomentConfig {
    pub bit_cap: u64,
}

impl Default for MomentConfig {
    fn default() -> Self {
        Self {
            bit_cap: DEFAULT_BIT_CAP,
        }
    }
}

/// Gaussian integer `re + im i`.
#[derive(Clone, Debug, Default)]
struct Gaussian {
    re: BigInt,
    im: BigInt,
}

impl Gaussian {
    fn one() -> Self {
        Self {
            re: BigInt::one(),
            im: BigInt::zero(),
        }
    }
}

/// `M_0..=M_{n_max}` with the default configuration.
pub fn moment_sequence(f: &Polynomial, n_max: usize) -> Result<MomentSequence> {
    moment_sequence_with(f, n_max, MomentConfig::default())
}

/// Incremental exact moments.
///
/// Writes `f = g / D` with Gaussian-integer `g` and a common denominator `D`,
/// then advances `g^{n+1} = g^n g` in integer arithmetic. Each moment is
/// `Σ_k g^n_k (L/(k+1)) / (L D^n)` with `L = lcm(1..=deg(f^n)+1)`, so the only
/// gcd reduction per `n` is the final one.
pub fn moment_sequence_with(
    f: &Polynomial,
    n_max: usize,
    cfg: MomentConfig,
) -> Result<MomentSequence> {
    if n_max < 1 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(ComplexRational::one());
    for m in MomentIter::new(f, n_max, cfg) {
        values.push(m?.1);
    }
    Ok(MomentSequence::from_values(f.clone(), values))
}

/// Least `n` in `from..=n_max` with `M_n != 0`, computing moments only as far as needed.
pub fn first_nonzero_moment(
    f: &Polynomial,
    from: usize,
    n_max: usize,
    cfg: MomentConfig,
) -> Result<Option<usize>> {
    if from == 0 {
        return Ok(Some(0));
    }
    for m in MomentIter::new(f, n_max, cfg) {
        let (n, value) = m?;
        if n >= from && !value.is_zero() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Lazily yields `(n, M_n)` for `n = 1..=n_max`, stopping after the first error.
pub struct MomentIter {
    g: Vec<Gaussian>,
    denom: BigInt,
    power: Vec<Gaussian>,
    denom_pow: BigInt,
    lcm_all: BigInt,
    weights: Vec<BigInt>,
    n: usize,
    n_max: usize,
    bit_cap: u64,
}

impl MomentIter {
    pub fn new(f: &Polynomial, n_max: usize, cfg: MomentConfig) -> Self {
        let (g, denom) = split_denominator(f);
        let max_len = f.degree() * n_max + 1;
        let lcm_all = lcm_upto(max_len);
        Self {
            weights: unit_weights(&lcm_all, max_len),
            lcm_all,
            g,
            denom,
            power: vec![Gaussian::one()],
            denom_pow: BigInt::one(),
            n: 0,
            n_max,
            bit_cap: cfg.bit_cap,
        }
    }
}

impl Iterator for MomentIter {
    type Item = Result<(usize, ComplexRational)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.n >= self.n_max {
            return None;
        }
        self.n += 1;
        let n = self.n;
        if self.g.is_empty() {
            return Some(Ok((n, ComplexRational::zero())));
        }
        self.power = gaussian_mul(&self.power, &self.g);
        self.denom_pow *= &self.denom;

        let bits = self
            .power
            .iter()
            .map(|c| c.re.bits().max(c.im.bits()))
            .max()
            .unwrap_or(0)
            .max(self.denom_pow.bits());
        if bits > self.bit_cap {
            self.n = self.n_max;
            return Some(Err(Error::ResourceLimit {
                bits,
                cap: self.bit_cap,
                n,
            }));
        }
        let scale = &self.lcm_all * &self.denom_pow;
        Some(Ok((
            n,
            integrate_scaled(&self.power, &self.weights, &scale),
        )))
    }
}

/// `f = g / D` with Gaussian-integer coefficients `g` and `D = lcm` of all denominators.
fn split_denominator(f: &Polynomial) -> (Vec<Gaussian>, BigInt) {
    let denom = f
        .coeffs()
        .iter()
        .flat_map(|c| [c.re.denom(), c.im.denom()])
        .fold(BigInt::one(), |acc, d| acc.lcm(d));
    let g = f
        .coeffs()
        .iter()
        .map(|c| Gaussian {
            re: c.re.numer() * (&denom / c.re.denom()),
            im: c.im.numer() * (&denom / c.im.denom()),
        })
        .collect();
    (g, denom)
}

fn lcm_upto(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)))
}

/// `L / k` for `k = 1..=len`.
fn unit_weights(lcm_all: &BigInt, len: usize) -> Vec<BigInt> {
    (1..=len).map(|k| lcm_all / BigInt::from(k)).collect()
}

/// `Σ_k p_k / (k+1)` divided by `scale / L`, i.e. `Σ_k p_k w_k / scale` reduced.
fn integrate_scaled(power: &[Gaussian], weights: &[BigInt], scale: &BigInt) -> ComplexRational {
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    for (c, w) in power.iter().zip(weights) {
        if !c.re.is_zero() {
            re += &c.re * w;
        }
        if !c.im.is_zero() {
            im += &c.im * w;
        }
    }
    ComplexRational::new(
        Rational::new(re, scale.clone()),
        Rational::new(im, scale.clone()),
    )
}

fn gaussian_mul(a: &[Gaussian], b: &[Gaussian]) -> Vec<Gaussian> {
    let mut out = vec![Gaussian::default(); a.len() + b.len() - 1];
    for (j, bj) in b.iter().enumerate() {
        let re_zero = bj.re.is_zero();
        let im_zero = bj.im.is_zero();
        if re_zero && im_zero {
            continue;
        }
        for (i, ai) in a.iter().enumerate() {
            let o = &mut out[i + j];
            if !re_zero {
                o.re += &ai.re * &bj.re;
                o.im += &ai.im * &bj.re;
            }
            if !im_zero {
                o.re -= &ai.im * &bj.im;
                o.im += &ai.re * &bj.im;
            }
        }
    }
    out
}
