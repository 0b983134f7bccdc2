//! Three independent evaluators of the generating function
//! `F(t) = Σ t^n M_n = ∫₀¹ dx / (1 − t f(x))`, behind one trait.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::continuation::path::plan_path;
use crate::continuation::tracking::{track_roots, RootBundle, Trace};
use crate::error::{Error, Result};
use crate::moments::{moment_sequence, MomentSequence, DEFAULT_N_MAX};
use crate::poly::{horner, Polynomial};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::registry::Registry;
use crate::roots::{default_finder, inclusion_radii, roots_with};
use crate::spectrum::{critical_set, sup_norm, CriticalSet, SupNorm};

pub const DEFAULT_SERIES_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FMethod {
    Series,
    Quadrature,
    PartialFraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FValue {
    pub t: Complex64,
    pub value: Complex64,
    pub method: FMethod,
    pub error_estimate: f64,
}

/// Truncated power series `Σ_{n ≤ n_max} t^n M_n`, valid for `|t| M(f) < 1 − margin`.
pub fn f_series(seq: &MomentSequence, sup: f64, t: Complex64, margin: f64) -> Result<FValue> {
    let ratio = t.norm() * sup;
    let limit = 1.0 - margin;
    if ratio >= limit {
        return Err(Error::Domain { t, ratio, limit });
    }
    let value = seq
        .values()
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, m| {
            acc * t + m.to_complex64()
        });
    let n_max = seq.n_max() as i32;
    Ok(FValue {
        t,
        value,
        method: FMethod::Series,
        error_estimate: ratio.powi(n_max + 1) / (1.0 - ratio),
    })
}

/// Adaptive quadrature of `∫₀¹ dx / (1 − t f(x))`.
///
/// Fails with [`Error::PoleOnContour`] when `f(x) = 1/t` has a root on `[0,1]`.
/// That only blocks direct evaluation; the continued `F` may be regular there.
pub fn f_quadrature(f: &Polynomial, t: Complex64, s: &CriticalSet) -> Result<FValue> {
    f_quadrature_with(f, t, s, QuadratureConfig::default())
}

pub fn f_quadrature_with(
    f: &Polynomial,
    t: Complex64,
    s: &CriticalSet,
    cfg: QuadratureConfig,
) -> Result<FValue> {
    let one = Complex64::new(1.0, 0.0);
    if t == Complex64::new(0.0, 0.0) {
        return Ok(FValue {
            t,
            value: one,
            method: FMethod::Quadrature,
            error_estimate: 0.0,
        });
    }
    let tau = t.inv();
    if let Some(e) = s
        .elements
        .iter()
        .find(|e| (e.value() - tau).norm() <= e.radius.max(1e-12 * (1.0 + tau.norm())))
    {
        return Err(Error::SingularParameter {
            tau,
            distance: (e.value() - tau).norm(),
        });
    }
    let coeffs = f.to_complex64();
    check_no_pole(&coeffs, tau)?;
    let r = integrate(
        |x| (one - t * horner(&coeffs, Complex64::new(x, 0.0))).inv(),
        0.0,
        1.0,
        cfg,
    );
    Ok(FValue {
        t,
        value: r.value,
        method: FMethod::Quadrature,
        error_estimate: r.error,
    })
}

fn check_no_pole(coeffs: &[Complex64], tau: Complex64) -> Result<()> {
    let mut shifted = coeffs.to_vec();
    shifted[0] -= tau;
    if shifted.len() == 1 {
        // constant f: the integrand is singular everywhere or nowhere
        return if shifted[0].norm() <= 1e-14 * (1.0 + tau.norm()) {
            Err(Error::PoleOnContour { x: 0.0 })
        } else {
            Ok(())
        };
    }
    for root in roots_with(default_finder().as_ref(), &shifted)? {
        let tol = root.radius.max(1e-9 * (1.0 + root.value.norm()));
        let z = root.value;
        if z.im.abs() <= tol && z.re >= -tol && z.re <= 1.0 + tol {
            return Err(Error::PoleOnContour {
                x: z.re.clamp(0.0, 1.0),
            });
        }
    }
    Ok(())
}

/// Partial-fraction form of `F` from a bundle of roots of `f − τ`, `t = 1/τ`.
///
/// With `f = a_d g`, `g` monic, the roots of `f − τ` are those of `g − τ/a_d` and
/// `1/(f(x) − τ) = (1/a_d) Σ_k c_k / (x − z_k)` with `c_k = Π_{ℓ≠k} 1/(z_k − z_ℓ)`.
/// Since `1 − t f = −t (f − τ)` and `∫₀¹ dx/(x − z_k) = L_k`,
/// `F(t) = −(τ / a_d) Σ_k c_k L_k`.
pub fn f_partial_fraction(f: &Polynomial, bundle: &RootBundle) -> Result<FValue> {
    let d = f.degree();
    if d == 0 {
        return Err(Error::DegreeZero);
    }
    let z = &bundle.roots;
    if z.len() != d || bundle.logs.len() != d {
        return Err(Error::InvalidInput(format!(
            "bundle holds {} roots for a degree {d} polynomial",
            z.len()
        )));
    }
    let tau = bundle.tau;
    let scale = z.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let separation = bundle.min_separation();
    if d > 1 && separation < 1e-12 * scale {
        return Err(Error::CoincidentRoots { separation });
    }

    let coeffs = f.to_complex64();
    let lead = coeffs[d];
    let mut shifted = coeffs.clone();
    shifted[0] -= tau;
    let radii = inclusion_radii(&shifted, z);

    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut propagated = 0.0;
    for k in 0..d {
        let mut c = Complex64::new(1.0, 0.0);
        let mut rel = 0.0;
        for l in (0..d).filter(|&l| l != k) {
            let diff = z[k] - z[l];
            c /= diff;
            rel += (radii[k] + radii[l]) / diff.norm();
        }
        let term = c * bundle.logs[k];
        sum += term;
        magnitude += term.norm();
        // dL/dz = 1/(z − 1) − 1/z
        let dlog = ((z[k] - 1.0).inv() - z[k].inv()).norm();
        propagated += c.norm() * (bundle.logs[k].norm() * rel + dlog * radii[k]);
    }
    let factor = -tau / lead;
    Ok(FValue {
        t: tau.inv(),
        value: factor * sum,
        method: FMethod::PartialFraction,
        error_estimate: factor.norm() * (propagated + 4.0 * d as f64 * f64::EPSILON * magnitude),
    })
}

/// Everything the evaluators need about one polynomial, computed once.
pub struct FContext {
    pub poly: Polynomial,
    pub critical_set: CriticalSet,
    pub sup_norm: SupNorm,
    pub clearance: f64,
    pub n_max: usize,
    pub series_margin: f64,
    moments: OnceLock<Result<MomentSequence>>,
}

impl FContext {
    pub fn new(poly: Polynomial) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::InvalidInput(
                "F is constant 1 for the zero polynomial".into(),
            ));
        }
        let critical_set = critical_set(&poly)?;
        let sup_norm = sup_norm(&poly)?;
        Ok(Self {
            clearance: critical_set.default_clearance(),
            poly,
            critical_set,
            sup_norm,
            n_max: DEFAULT_N_MAX,
            series_margin: DEFAULT_SERIES_MARGIN,
            moments: OnceLock::new(),
        })
    }

    pub fn with_clearance(mut self, clearance: f64) -> Self {
        self.clearance = clearance;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self.moments = OnceLock::new();
        self
    }

    pub fn moments(&self) -> Result<&MomentSequence> {
        self.moments
            .get_or_init(|| moment_sequence(&self.poly, self.n_max))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Start of a continuation towards `tau`: on the same ray, beyond both `max|S|` and `M(f)`.
    pub fn start_for(&self, tau: Complex64) -> Complex64 {
        let radius = (2.0 * tau.norm())
            .max(2.0 * self.critical_set.max_modulus.max(self.sup_norm.value) + 1.0);
        let dir = if tau.norm() > 0.0 {
            tau / tau.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        dir * radius
    }

    /// Tracks the roots of `f − τ` from [`start_for`](Self::start_for) to `tau`.
    /// The clearance is reduced to half the distance from `tau` to `S` when needed.
    pub fn continue_to(&self, tau: Complex64) -> Result<Trace> {
        let distance = self.critical_set.distance_to(tau);
        if distance <= 1e-12 * (1.0 + tau.norm()) {
            return Err(Error::SingularParameter { tau, distance });
        }
        let clearance = self.clearance.min(0.5 * distance);
        let path = plan_path(&self.critical_set, self.start_for(tau), tau, clearance)?;
        track_roots(&self.poly, &path)
    }
}

pub trait FEvaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn method(&self) -> FMethod;
    fn evaluate(&self, ctx: &FContext, t: Complex64) -> Result<FValue>;
}

pub struct SeriesEvaluator;

impl FEvaluator for SeriesEvaluator {
    fn name(&self) -> &'static str {
        "series"
    }
    fn method(&self) -> FMethod {
        FMethod::Series
    }
    fn evaluate(&self, ctx: &FContext, t: Complex64) -> Result<FValue> {
        f_series(ctx.moments()?, ctx.sup_norm.value, t, ctx.series_margin)
    }
}

pub struct QuadratureEvaluator;

impl FEvaluator for QuadratureEvaluator {
    fn name(&self) -> &'static str {
        "quadrature"
    }
    fn method(&self) -> FMethod {
        FMethod::Quadrature
    }
    fn evaluate(&self, ctx: &FContext, t: Complex64) -> Result<FValue> {
        f_quadrature(&ctx.poly, t, &ctx.critical_set)
    }
}

/// Continues from large τ along a radial path to `τ = 1/t`, then applies the partial-fraction form.
pub struct PartialFractionEvaluator;

impl FEvaluator for PartialFractionEvaluator {
    fn name(&self) -> &'static str {
        "pf"
    }
    fn method(&self) -> FMethod {
        FMethod::PartialFraction
    }
    fn evaluate(&self, ctx: &FContext, t: Complex64) -> Result<FValue> {
        if t == Complex64::new(0.0, 0.0) {
            return Ok(FValue {
                t,
                value: Complex64::new(1.0, 0.0),
                method: FMethod::PartialFraction,
                error_estimate: 0.0,
            });
        }
        let trace = ctx.continue_to(t.inv())?;
        let mut value = f_partial_fraction(&ctx.poly, trace.last())?;
        value.t = t;
        Ok(value)
    }
}

pub fn evaluators() -> Registry<dyn FEvaluator> {
    let mut r: Registry<dyn FEvaluator> = Registry::new("F evaluator");
    r.register("series", Arc::new(SeriesEvaluator));
    r.register("quadrature", Arc::new(QuadratureEvaluator));
    r.register("pf", Arc::new(PartialFractionEvaluator));
    r
}
