//! The singular set `S = {f(z) : f'(z) = 0} ∪ {f(0), f(1)}` and the sup norm on `[0,1]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::number::ComplexRational;
use crate::poly::{horner, horner_error_bound, Polynomial};
use crate::roots::{roots, Root};

/// Relative floor for merging nearly equal elements of `S`.
pub const MERGE_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularKind {
    #[serde(rename = "endpoint-0")]
    Endpoint0,
    #[serde(rename = "endpoint-1")]
    Endpoint1,
    #[serde(rename = "critical-value")]
    CriticalValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularValue {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
    pub kinds: Vec<SingularKind>,
}

impl SingularValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn has_kind(&self, kind: SingularKind) -> bool {
        self.kinds.contains(&kind)
    }
}

/// Floating approximation of `S` with per-element error radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub elements: Vec<SingularValue>,
    pub max_modulus: f64,
}

impl CriticalSet {
    pub fn values(&self) -> Vec<Complex64> {
        self.elements.iter().map(SingularValue::value).collect()
    }

    /// Distance from `tau` to the nearest element.
    pub fn distance_to(&self, tau: Complex64) -> f64 {
        self.elements
            .iter()
            .map(|s| (s.value() - tau).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest pairwise distance between elements, if there are at least two.
    pub fn min_gap(&self) -> Option<f64> {
        let v = self.values();
        let mut gap: Option<f64> = None;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let d = (v[i] - v[j]).norm();
                gap = Some(gap.map_or(d, |g| g.min(d)));
            }
        }
        gap
    }

    /// Path clearance: a tenth of the smallest gap, at least `1e-3`
    /// (a tenth of unity when `S` is a single point).
    pub fn default_clearance(&self) -> f64 {
        (0.1 * self.min_gap().unwrap_or(1.0)).max(1e-3)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("critical set is always serializable")
    }

    /// Smallest non-zero modulus in `S`, treating elements whose disc contains 0 as zero.
    pub fn min_nonzero_modulus(&self) -> Option<f64> {
        self.elements
            .iter()
            .filter(|s| s.value().norm() > s.radius.max(MERGE_FLOOR))
            .map(|s| s.value().norm())
            .reduce(f64::min)
    }
}

/// Coefficients of `w ↦ p(z + w)` (Taylor coefficients of `p` at `z`).
pub fn taylor_shift(coeffs: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    let n = c.len();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            let upper = c[k + 1];
            c[k] += z * upper;
        }
    }
    c
}

/// Bound on `sup_{|w| ≤ r} |p(z + w) − p(z)|` from the Taylor coefficients at `z`.
fn variation_bound(coeffs: &[Complex64], z: Complex64, r: f64) -> f64 {
    let t = taylor_shift(coeffs, z);
    t.iter()
        .skip(1)
        .rev()
        .fold(0.0, |acc, a| (acc + a.norm()) * r)
}

/// Computes `S` and merges elements whose discs overlap.
pub fn critical_set(f: &Polynomial) -> Result<CriticalSet> {
    let coeffs = f.to_complex64();
    let endpoint = |x: i64| {
        let v = f
            .eval_exact(&ComplexRational::from_integer(x))
            .to_complex64();
        (v, 2.0 * f64::EPSILON * v.norm())
    };
    let mut raw: Vec<(Complex64, f64, SingularKind)> = Vec::new();
    let (v0, r0) = endpoint(0);
    raw.push((v0, r0, SingularKind::Endpoint0));
    let (v1, r1) = endpoint(1);
    raw.push((v1, r1, SingularKind::Endpoint1));

    if f.degree() >= 2 {
        for Root { value: z, radius } in roots(&f.derivative())? {
            let v = horner(&coeffs, z);
            let r = variation_bound(&coeffs, z, radius) + horner_error_bound(&coeffs, z);
            raw.push((v, r, SingularKind::CriticalValue));
        }
    }

    let scale = raw.iter().map(|e| e.0.norm()).fold(0.0, f64::max);
    let floor = MERGE_FLOOR * (1.0 + scale);
    let mut elements: Vec<SingularValue> = raw
        .into_iter()
        .map(|(v, r, k)| SingularValue {
            re: v.re,
            im: v.im,
            radius: r,
            kinds: vec![k],
        })
        .collect();
    merge_overlapping(&mut elements, floor);

    let max_modulus = elements
        .iter()
        .map(|s| s.value().norm())
        .fold(0.0, f64::max);
    Ok(CriticalSet {
        elements,
        max_modulus,
    })
}

/// Merges elements until every pair is separated by more than the sum of radii
/// (and by more than `floor`). The earlier element keeps its value; its radius
/// grows to cover the absorbed disc.
fn merge_overlapping(elements: &mut Vec<SingularValue>, floor: f64) {
    loop {
        let mut merged = false;
        'outer: for i in 0..elements.len() {
            for j in i + 1..elements.len() {
                let d = (elements[i].value() - elements[j].value()).norm();
                if d <= (elements[i].radius + elements[j].radius).max(floor) {
                    let absorbed = elements.remove(j);
                    let keep = &mut elements[i];
                    keep.radius = keep.radius.max(d + absorbed.radius);
                    for k in absorbed.kinds {
                        if !keep.kinds.contains(&k) {
                            keep.kinds.push(k);
                        }
                    }
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return;
        }
    }
}

/// `M(f) = sup_{[0,1]} |f|` with its location and an error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    pub argmax: f64,
    pub error: f64,
}

/// Maximizes `|f(x)|^2 = (f · conj f)(x)` over `[0,1]` by enumerating the real roots
/// of its derivative together with the endpoints.
pub fn sup_norm(f: &Polynomial) -> Result<SupNorm> {
    let coeffs = f.to_complex64();
    let deriv_bound: f64 = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| k as f64 * a.norm())
        .sum();

    let mut candidates: Vec<(f64, f64)> = vec![(0.0, 0.0), (1.0, 0.0)];
    let q = f * &f.conj();
    let dq = q.derivative();
    if dq.degree() >= 1 {
        for Root { value, radius } in roots(&dq)? {
            // extra near-real candidates can only move the maximum towards the true sup
            if value.im.abs() <= (10.0 * radius).max(1e-6)
                && (-1e-9..=1.0 + 1e-9).contains(&value.re)
            {
                candidates.push((value.re.clamp(0.0, 1.0), radius));
            }
        }
    }

    let mut best = SupNorm {
        value: -1.0,
        argmax: 0.0,
        error: 0.0,
    };
    for (x, r) in candidates {
        let z = Complex64::new(x, 0.0);
        let v = horner(&coeffs, z).norm();
        if v > best.value {
            best = SupNorm {
                value: v,
                argmax: x,
                error: horner_error_bound(&coeffs, z) + deriv_bound * r,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str) -> Polynomial {
        parse_poly(s).unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn critical_set_of_x() {
        let s = critical_set(&Polynomial::x()).unwrap();
        assert_eq!(s.elements.len(), 2);
        assert!(close(s.elements[0].value(), Complex64::new(0.0, 0.0)));
        assert!(close(s.elements[1].value(), Complex64::new(1.0, 0.0)));
        assert_eq!(s.max_modulus, 1.0);
    }

    #[test]
    fn critical_set_of_x_one_minus_x() {
        let s = critical_set(&p("0,1,-1")).unwrap();
        assert_eq!(s.elements.len(), 2);
        let zero = &s.elements[0];
        assert!(zero.has_kind(SingularKind::Endpoint0) && zero.has_kind(SingularKind::Endpoint1));
        assert!(close(s.elements[1].value(), Complex64::new(0.25, 0.0)));
        assert_eq!(s.elements[1].kinds, vec![SingularKind::CriticalValue]);
        assert!((s.max_modulus - 0.25).abs() < 1e-12);
    }

    #[test]
    fn critical_set_of_x_squared() {
        let s = critical_set(&p("0,0,1")).unwrap();
        assert_eq!(s.elements.len(), 2);
        assert!(s.elements[0].has_kind(SingularKind::CriticalValue));
        assert!(close(s.elements[1].value(), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn constant_has_single_element() {
        let s = critical_set(&p("3")).unwrap();
        assert_eq!(s.elements.len(), 1);
        assert_eq!(s.max_modulus, 3.0);
    }

    #[test]
    fn merged_elements_are_separated() {
        // f = x^2 (x - 1): critical values 0 (double with both endpoints) and -4/27
        let s = critical_set(&p("0,0,-1,1")).unwrap();
        assert_eq!(s.elements.len(), 2);
        assert!((s.max_modulus - 4.0 / 27.0).abs() < 1e-12);
        let e = &s.elements;
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                assert!((e[i].value() - e[j].value()).norm() > e[i].radius + e[j].radius);
            }
        }
    }

    #[test]
    fn json_shape() {
        let s = critical_set(&Polynomial::x()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["elements"][0]["kinds"][0], "endpoint-0");
        assert!(v["elements"][1]["re"].is_number());
        assert!(v["elements"][1]["radius"].is_number());
        assert_eq!(v["max_modulus"], 1.0);
    }

    #[test]
    fn sup_norm_examples() {
        let m = sup_norm(&Polynomial::x()).unwrap();
        assert_eq!((m.value, m.argmax), (1.0, 1.0));
        let m = sup_norm(&p("-1/2,1")).unwrap();
        assert_eq!(m.value, 0.5);
        assert!(m.argmax == 0.0 || m.argmax == 1.0);
        let m = sup_norm(&p("0,1,-1")).unwrap();
        assert!((m.value - 0.25).abs() < 1e-14);
        assert!((m.argmax - 0.5).abs() < 1e-12);
        assert_eq!(sup_norm(&p("-2")).unwrap().value, 2.0);
        assert_eq!(sup_norm(&Polynomial::zero()).unwrap().value, 0.0);
    }

    #[test]
    fn sup_norm_complex_interior() {
        let f = p("1/2+1i,-3,3-2i,-1");
        let m = sup_norm(&f).unwrap();
        let grid = (0..=10_000)
            .map(|k| f.eval(Complex64::new(k as f64 / 1e4, 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(m.value >= grid - 1e-8);
        assert!(m.value <= grid + 1e-6);
    }

    #[test]
    fn taylor_shift_matches_expansion() {
        // (1 + w)^2 = 1 + 2w + w^2
        let c = taylor_shift(
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
            Complex64::new(1.0, 0.0),
        );
        assert_eq!(
            c,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0)
            ]
        );
    }
}
