//! Simultaneous root finding for complex polynomials.
//!
//! Two interchangeable finders are registered: Aberth–Ehrlich iteration and
//! companion-matrix eigenvalues. The default `auto` finder runs Aberth first and
//! falls back to the companion matrix when the iteration stalls.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{horner, horner_error_bound, horner_with_derivative, Polynomial};
use crate::registry::Registry;

/// A computed root together with an a-posteriori inclusion radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub radius: f64,
}

pub trait RootFinder: Send + Sync {
    fn name(&self) -> &'static str;

    /// All `len - 1` roots of the polynomial with coefficients `coeffs`
    /// (lowest degree first, leading coefficient non-zero).
    fn find(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>>;
}

#[derive(Clone, Copy, Debug)]
pub struct Aberth {
    pub max_iterations: usize,
}

impl Default for Aberth {
    fn default() -> Self {
        Self {
            max_iterations: 500,
        }
    }
}

impl RootFinder for Aberth {
    fn name(&self) -> &'static str {
        "aberth"
    }

    fn find(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let coeffs = check_coeffs(coeffs)?;
        let d = coeffs.len() - 1;
        if d == 1 {
            return Ok(vec![-coeffs[0] / coeffs[1]]);
        }
        let lead = coeffs[d];
        let monic: Vec<Complex64> = coeffs.iter().map(|&a| a / lead).collect();
        let dp: Vec<Complex64> = monic
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &a)| a * k as f64)
            .collect();

        let mut z = initial_guesses(&monic);
        let mut done = vec![false; d];
        for _ in 0..self.max_iterations {
            for k in 0..d {
                if done[k] {
                    continue;
                }
                let p = horner(&monic, z[k]);
                if p.norm() <= horner_error_bound(&monic, z[k]) {
                    done[k] = true;
                    continue;
                }
                let ratio = p / horner(&dp, z[k]);
                let repulsion: Complex64 = (0..d)
                    .filter(|&j| j != k)
                    .map(|j| (z[k] - z[j]).inv())
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if !step.is_finite() {
                    return Err(Error::NoConvergence {
                        iterations: self.max_iterations,
                    });
                }
                z[k] -= step;
                if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                    done[k] = true;
                }
            }
            if done.iter().all(|&b| b) {
                return Ok(z);
            }
        }
        Err(Error::NoConvergence {
            iterations: self.max_iterations,
        })
    }
}

/// Points on a circle whose radius bounds the root moduli, rotated off the axes.
fn initial_guesses(monic: &[Complex64]) -> Vec<Complex64> {
    let d = monic.len() - 1;
    let center = -monic[d - 1] / d as f64;
    let radius = (1..=d)
        .map(|k| monic[d - k].norm().powf(1.0 / k as f64))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE.sqrt())
        + center.norm();
    (0..d)
        .map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / d as f64 + 0.4))
        .collect()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Companion;

impl RootFinder for Companion {
    fn name(&self) -> &'static str {
        "companion"
    }

    fn find(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let coeffs = check_coeffs(coeffs)?;
        let d = coeffs.len() - 1;
        let lead = coeffs[d];
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..d {
            m[(i, d - 1)] = -coeffs[i] / lead;
        }
        let eig = m
            .eigenvalues()
            .ok_or(Error::NoConvergence { iterations: 0 })?;
        Ok(eig.iter().map(|&z| newton_polish(coeffs, z, 3)).collect())
    }
}

/// Tries each finder in turn, returning the first success.
pub struct Fallback(pub Vec<Arc<dyn RootFinder>>);

impl RootFinder for Fallback {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn find(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut last = Error::NoConvergence { iterations: 0 };
        for finder in &self.0 {
            match finder.find(coeffs) {
                Ok(r) => return Ok(r),
                Err(e) => last = e,
            }
        }
        Err(last)
    }
}

pub fn default_finder() -> Arc<dyn RootFinder> {
    Arc::new(Fallback(vec![
        Arc::new(Aberth::default()),
        Arc::new(Companion),
    ]))
}

pub fn root_finders() -> Registry<dyn RootFinder> {
    let mut r: Registry<dyn RootFinder> = Registry::new("root finder");
    r.register("aberth", Arc::new(Aberth::default()));
    r.register("companion", Arc::new(Companion));
    r.register("auto", default_finder());
    r
}

fn check_coeffs(coeffs: &[Complex64]) -> Result<&[Complex64]> {
    let end = coeffs
        .iter()
        .rposition(|a| *a != Complex64::new(0.0, 0.0))
        .ok_or(Error::DegreeZero)?;
    if end == 0 {
        return Err(Error::DegreeZero);
    }
    if coeffs[..=end].iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    Ok(&coeffs[..=end])
}

fn newton_polish(coeffs: &[Complex64], mut z: Complex64, iters: usize) -> Complex64 {
    for _ in 0..iters {
        let (p, dp) = horner_with_derivative(coeffs, z);
        if p.norm() <= horner_error_bound(coeffs, z) || dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        if !next.is_finite() {
            break;
        }
        z = next;
    }
    z
}

/// Inclusion radii for approximate roots `z`.
///
/// Each radius is the smaller of the Neumaier-type disc
/// `d |p(z_k)| / |a_d Π_{j≠k}(z_k − z_j)|` and `(|p(z_k)|/|a_d|)^{1/d}`
/// (some root lies that close since `|p(z)| = |a_d| Π |z − r_j|`),
/// with `|p(z_k)|` inflated by its rounding bound.
pub fn inclusion_radii(coeffs: &[Complex64], z: &[Complex64]) -> Vec<f64> {
    let d = z.len();
    let lead = coeffs[d].norm();
    z.iter()
        .enumerate()
        .map(|(k, &zk)| {
            let p = horner(coeffs, zk).norm() + horner_error_bound(coeffs, zk);
            let prod: f64 = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &zj)| (zk - zj).norm())
                .product();
            let disc = if prod > 0.0 {
                d as f64 * p / (lead * prod)
            } else {
                f64::INFINITY
            };
            let root_bound = (p / lead).powf(1.0 / d as f64);
            disc.min(root_bound)
                .max(4.0 * f64::EPSILON * (1.0 + zk.norm()))
        })
        .collect()
}

/// Roots of a floating coefficient vector with inclusion radii.
pub fn roots_with(finder: &dyn RootFinder, coeffs: &[Complex64]) -> Result<Vec<Root>> {
    let coeffs = check_coeffs(coeffs)?;
    let z = finder.find(coeffs)?;
    let radii = inclusion_radii(coeffs, &z);
    Ok(z.into_iter()
        .zip(radii)
        .map(|(value, radius)| Root { value, radius })
        .collect())
}

/// All roots of `p` (with multiplicity) using the default finder.
pub fn roots(p: &Polynomial) -> Result<Vec<Root>> {
    if p.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    roots_with(default_finder().as_ref(), &p.to_complex64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn sorted_re(mut r: Vec<Root>) -> Vec<Root> {
        r.sort_by(|a, b| a.value.re.partial_cmp(&b.value.re).unwrap());
        r
    }

    #[test]
    fn known_roots() {
        let r = sorted_re(roots(&parse_poly("-1,0,1").unwrap()).unwrap());
        assert!((r[0].value - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1].value - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let r = roots(&parse_poly("0,0,1").unwrap()).unwrap();
        assert_eq!(r.len(), 2);
        for root in &r {
            assert!(root.value.norm() <= root.radius.max(1e-7));
        }

        let r = roots(&parse_poly("1,-2").unwrap()).unwrap();
        assert!((r[0].value - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degree_zero_rejected() {
        assert_eq!(roots(&parse_poly("3").unwrap()), Err(Error::DegreeZero));
        assert_eq!(roots(&Polynomial::zero()), Err(Error::DegreeZero));
    }

    #[test]
    fn finders_agree() {
        let f = parse_poly("2-1i,0,-3/2,1i,1/3,1").unwrap();
        let c = f.to_complex64();
        let reg = root_finders();
        let a = reg.get("aberth").unwrap().find(&c).unwrap();
        let b = reg.get("companion").unwrap().find(&c).unwrap();
        for za in &a {
            let nearest = b
                .iter()
                .map(|zb| (za - zb).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-10, "{za} unmatched ({nearest:e})");
        }
    }

    #[test]
    fn radii_contain_true_roots() {
        // (x - 1/3)(x + 2i)(x - 3/2 + i/2)
        let exact = [
            Complex64::new(1.0 / 3.0, 0.0),
            Complex64::new(0.0, -2.0),
            Complex64::new(1.5, -0.5),
        ];
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for r in exact {
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (k, a) in poly.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            poly = next;
        }
        let found = roots_with(default_finder().as_ref(), &poly).unwrap();
        for r in exact {
            assert!(found
                .iter()
                .any(|f| (f.value - r).norm() <= f.radius.max(1e-14)));
        }
    }

    #[test]
    fn triple_root_converges() {
        let r = roots(&parse_poly("-1,3,-3,1").unwrap()).unwrap();
        for root in r {
            assert!((root.value - Complex64::new(1.0, 0.0)).norm() < 1e-4);
            assert!((root.value - Complex64::new(1.0, 0.0)).norm() <= root.radius * 1.01);
        }
    }
}
