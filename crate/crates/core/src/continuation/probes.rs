//! Asymptotic checks on the continued `F`: decay as `t → ∞` and the
//! `τ^{1/n}` rate at which roots approach an `n`-fold zero of `f`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::continuation::evaluators::{f_partial_fraction, FValue};
use crate::continuation::path::{plan_path_avoiding, TauPath};
use crate::continuation::tracking::{track_from, track_roots, TrackerConfig};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::spectrum::{critical_set, sup_norm, CriticalSet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub t_abs: f64,
    pub f_abs: f64,
    /// `|F| |t|^{1/d} / max(1, log|t|)`.
    pub scaled: f64,
    pub value: FValue,
}

/// Evaluates `F(t)` along `t = r · direction` for each `r` in `t_magnitudes`
/// (increasing) by continuing roots leg by leg from large `τ` towards `τ = 0`.
///
/// Each leg gets its own clearance, at most half the distance from its endpoints
/// to `S`, so that legs close to `τ = 0` may shrink without slowing the far ones.
pub fn decay_probe(
    f: &Polynomial,
    direction: Complex64,
    t_magnitudes: &[f64],
) -> Result<Vec<DecayRow>> {
    let d = f.degree();
    if d == 0 {
        return Err(Error::DegreeZero);
    }
    if t_magnitudes.is_empty()
        || t_magnitudes
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        || t_magnitudes[0] <= 0.0
    {
        return Err(Error::InvalidInput(
            "t magnitudes must be positive and increasing".into(),
        ));
    }
    let dir = direction / direction.norm();
    let s = critical_set(f)?;
    let sup = sup_norm(f)?.value;
    let obstacles = s.values();
    let base = s.default_clearance();

    let ray = dir.inv();
    let taus: Vec<Complex64> = t_magnitudes.iter().map(|&r| ray / r).collect();
    let start = ray * (2.0 * s.max_modulus.max(sup) + 1.0).max(2.0 * taus[0].norm());

    let mut bundle = crate::continuation::tracking::initial_bundle(f, start)?;
    let mut from = start;
    let mut rows = Vec::with_capacity(taus.len());
    for (&tau, &r) in taus.iter().zip(t_magnitudes) {
        let clearance = base
            .min(0.5 * s.distance_to(tau))
            .min(0.5 * s.distance_to(from));
        let leg = plan_path_avoiding(&obstacles, from, tau, clearance)?;
        let trace = track_from(f, &bundle, &leg, TrackerConfig::default())?;
        bundle = trace.last().clone();
        let value = f_partial_fraction(f, &bundle)?;
        let f_abs = value.value.norm();
        rows.push(DecayRow {
            t_abs: r,
            f_abs,
            scaled: f_abs * r.powf(1.0 / d as f64) / r.ln().max(1.0),
            value,
        });
        from = tau;
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub samples: usize,
    pub residual: f64,
}

/// Radial path from outside `max|S|` to `tau_min e^{iθ}`, avoiding every element of `S`
/// except the one at 0. `θ` is picked from 64 candidates to maximize the distance
/// between the ray and those elements.
pub fn approach_path(s: &CriticalSet, tau_min: f64, clearance: f64) -> Result<TauPath> {
    let obstacles = nonzero_elements(s);
    let far = 2.0 * s.max_modulus + 1.0;
    let theta = (0..64)
        .map(|k| 0.05 + TAU * k as f64 / 64.0)
        .max_by(|&a, &b| {
            ray_gap(&obstacles, a, tau_min, far).total_cmp(&ray_gap(&obstacles, b, tau_min, far))
        })
        .unwrap();
    let dir = Complex64::from_polar(1.0, theta);
    plan_path_avoiding(&obstacles, dir * far, dir * tau_min, clearance)
}

fn nonzero_elements(s: &CriticalSet) -> Vec<Complex64> {
    s.elements
        .iter()
        .filter(|e| e.value().norm() > e.radius.max(crate::spectrum::MERGE_FLOOR))
        .map(|e| e.value())
        .collect()
}

fn ray_gap(obstacles: &[Complex64], theta: f64, near: f64, far: f64) -> f64 {
    let dir = Complex64::from_polar(1.0, theta);
    obstacles
        .iter()
        .map(|&p| crate::continuation::path::segment_distance(dir * near, dir * far, p))
        .fold(f64::INFINITY, f64::min)
}

/// Least-squares slope of `log|z_k − z0|` against `log|τ|` over the tail of a path
/// ending near `τ = f(z0) = 0`, pooled over the `n_mult` roots closest to `z0` at the end.
/// For an `n`-fold zero the slope tends to `1/n`.
///
/// The tail is every bundle with `|τ| <= |τ_end| · 10^tail_decades`.
pub fn multiplicity_slope(
    f: &Polynomial,
    z0: Complex64,
    n_mult: usize,
    path: &TauPath,
    tail_decades: f64,
) -> Result<SlopeFit> {
    if n_mult == 0 || n_mult > f.degree() {
        return Err(Error::InvalidInput(format!(
            "multiplicity {n_mult} out of range"
        )));
    }
    let trace = track_roots(f, path)?;
    let end = trace.last();
    let mut order: Vec<usize> = (0..end.roots.len()).collect();
    order.sort_by(|&a, &b| {
        (end.roots[a] - z0)
            .norm()
            .total_cmp(&(end.roots[b] - z0).norm())
    });
    let chosen = &order[..n_mult];

    let cutoff = end.tau.norm() * 10f64.powf(tail_decades);
    let tail: Vec<_> = trace
        .bundles
        .iter()
        .filter(|b| b.tau.norm() <= cutoff)
        .collect();
    if tail.len() < 5 {
        return Err(Error::FitDegenerate(format!(
            "{} tail samples, need 5",
            tail.len()
        )));
    }
    let points: Vec<(f64, f64)> = tail
        .iter()
        .flat_map(|b| {
            chosen
                .iter()
                .map(move |&k| (b.tau.norm().ln(), (b.roots[k] - z0).norm().ln()))
        })
        .collect();
    let (slope, intercept, residual) = least_squares(&points)
        .ok_or_else(|| Error::FitDegenerate("tail has no spread in log|tau|".into()))?;
    Ok(SlopeFit {
        slope,
        intercept,
        samples: tail.len(),
        residual,
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, rms residual)`.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum();
    Some((a, b, (rss / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::evaluators::f_quadrature;
    use crate::poly::parse_poly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn decay_of_x_is_bounded() {
        let rows = decay_probe(&Polynomial::x(), c(1.0, 0.0), &[10.0, 100.0, 1000.0]).unwrap();
        for row in &rows {
            let t = c(row.t_abs, 0.0);
            // branch reached by passing above τ = 1: log(1 − t) = ln(t − 1) + iπ
            let oracle = -Complex64::new((row.t_abs - 1.0).ln(), std::f64::consts::PI) / t;
            assert!(
                (row.value.value - oracle).norm() < 1e-9,
                "{} vs {oracle}",
                row.value.value
            );
            assert!(row.scaled < 1.7, "{}", row.scaled);
        }
    }

    #[test]
    fn decay_of_x_squared_matches_quadrature() {
        let f = parse_poly("0,0,1").unwrap();
        let rows = decay_probe(&f, c(0.0, 1.0), &[10.0, 100.0]).unwrap();
        let s = critical_set(&f).unwrap();
        for row in &rows {
            // τ = −i/|t| stays off the image of [0,1], so the direct integral applies
            let q = f_quadrature(&f, row.value.t, &s).unwrap();
            assert!((row.value.value - q.value).norm() < 1e-7);
            assert!(row.scaled < 2.0);
        }
    }

    #[test]
    fn slope_for_simple_and_double_zeros() {
        for (text, n, expected, tol) in [
            ("0,1", 1, 1.0, 0.05),
            ("0,0,1", 2, 0.5, 0.05),
            ("0,0,-1,1", 2, 0.5, 0.1),
        ] {
            let f = parse_poly(text).unwrap();
            let s = critical_set(&f).unwrap();
            let path = approach_path(&s, 1e-8, s.default_clearance()).unwrap();
            let fit = multiplicity_slope(&f, c(0.0, 0.0), n, &path, 3.0).unwrap();
            assert!((fit.slope - expected).abs() < tol, "{text}: {fit:?}");
        }
    }

    #[test]
    fn least_squares_line() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        let (a, b, r) = least_squares(&pts).unwrap();
        assert!((a - 3.0).abs() < 1e-12 && (b + 1.0).abs() < 1e-12 && r < 1e-12);
        assert!(least_squares(&[(1.0, 2.0), (1.0, 3.0)]).is_none());
    }

    #[test]
    fn decay_rejects_bad_input() {
        assert!(decay_probe(&Polynomial::one(), c(1.0, 0.0), &[10.0]).is_err());
        assert!(decay_probe(&Polynomial::x(), c(1.0, 0.0), &[100.0, 10.0]).is_err());
    }
}
