//! Estimates of `limsup |M_n|^{1/n}` from a finite moment sequence, and the
//! checks comparing them against `sup|f|` and `max|S|`.
//!
//! Exact-zero moments are skipped by every estimator. Logarithms are taken from the
//! exact values, so sequences whose terms overflow `f64` are handled.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::continuation::probes::least_squares;
use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::poly::Polynomial;
use crate::registry::Registry;
use crate::spectrum::{sup_norm, CriticalSet};

pub const DEFAULT_BOUND_TOL: f64 = 0.05;
pub const DEFAULT_CONJECTURE_TOL: f64 = 0.05;
pub const SLOPE_FIT_MIN_NONZERO: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthMethod {
    SlopeFit,
    WindowedRootMax,
    RatioSubsequence,
}

impl GrowthMethod {
    pub fn tag(self) -> &'static str {
        match self {
            Self::SlopeFit => "slope-fit",
            Self::WindowedRootMax => "windowed-root-max",
            Self::RatioSubsequence => "ratio-subsequence",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// RMS residual of the log-linear fit (slope-fit), spread of the ratios
    /// (ratio-subsequence, interquartile), or 0.
    pub residual: f64,
    /// Index attaining the maximum (windowed-root-max only).
    pub argmax_n: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub estimate: f64,
    pub method: GrowthMethod,
    pub window: (usize, usize),
    pub nonzero_count: usize,
    pub diagnostics: Diagnostics,
}

/// `(n, ln|M_n|)` for the non-zero moments with `n >= 1` in the window.
pub type LogSamples = [(usize, f64)];

pub trait GrowthEstimator: Send + Sync {
    fn method(&self) -> GrowthMethod;
    fn min_nonzero(&self) -> usize;
    /// Returns `(estimate, diagnostics)`; `samples` has at least `min_nonzero` entries.
    fn estimate(&self, samples: &LogSamples) -> Result<(f64, Diagnostics)>;
}

pub struct SlopeFit;
pub struct WindowedRootMax;
pub struct RatioSubsequence;

impl GrowthEstimator for SlopeFit {
    fn method(&self) -> GrowthMethod {
        GrowthMethod::SlopeFit
    }

    fn min_nonzero(&self) -> usize {
        SLOPE_FIT_MIN_NONZERO
    }

    fn estimate(&self, samples: &LogSamples) -> Result<(f64, Diagnostics)> {
        let pts: Vec<(f64, f64)> = samples.iter().map(|&(n, l)| (n as f64, l)).collect();
        let (slope, _, residual) =
            least_squares(&pts).ok_or_else(|| Error::FitDegenerate("no spread in n".into()))?;
        Ok((
            slope.exp(),
            Diagnostics {
                residual,
                argmax_n: None,
            },
        ))
    }
}

impl GrowthEstimator for WindowedRootMax {
    fn method(&self) -> GrowthMethod {
        GrowthMethod::WindowedRootMax
    }

    fn min_nonzero(&self) -> usize {
        1
    }

    fn estimate(&self, samples: &LogSamples) -> Result<(f64, Diagnostics)> {
        let (n, best) = samples
            .iter()
            .map(|&(n, l)| (n, l / n as f64))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty samples");
        Ok((
            best.exp(),
            Diagnostics {
                residual: 0.0,
                argmax_n: Some(n),
            },
        ))
    }
}

impl GrowthEstimator for RatioSubsequence {
    fn method(&self) -> GrowthMethod {
        GrowthMethod::RatioSubsequence
    }

    fn min_nonzero(&self) -> usize {
        2
    }

    fn estimate(&self, samples: &LogSamples) -> Result<(f64, Diagnostics)> {
        let mut rates: Vec<f64> = samples
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64)
            .collect();
        rates.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let x = p * (rates.len() - 1) as f64;
            let (lo, hi) = (x.floor() as usize, x.ceil() as usize);
            rates[lo] + (rates[hi] - rates[lo]) * (x - lo as f64)
        };
        Ok((
            q(0.5).exp(),
            Diagnostics {
                residual: q(0.75) - q(0.25),
                argmax_n: None,
            },
        ))
    }
}

pub fn growth_estimators() -> Registry<dyn GrowthEstimator> {
    let mut r: Registry<dyn GrowthEstimator> = Registry::new("growth estimator");
    r.register("slope", Arc::new(SlopeFit));
    r.register("rootmax", Arc::new(WindowedRootMax));
    r.register("ratio", Arc::new(RatioSubsequence));
    r
}

/// `[n_max/4, n_max]`.
pub fn default_window(n_max: usize) -> (usize, usize) {
    (n_max / 4, n_max)
}

pub fn estimate_growth(
    seq: &MomentSequence,
    estimator: &dyn GrowthEstimator,
    window: (usize, usize),
) -> Result<GrowthEstimate> {
    let (lo, hi) = window;
    if lo > hi || hi > seq.n_max() {
        return Err(Error::InvalidInput(format!(
            "window [{lo}, {hi}] outside moment range [0, {}]",
            seq.n_max()
        )));
    }
    let samples: Vec<(usize, f64)> = seq
        .nonzero_in(lo.max(1), hi)
        .into_iter()
        .map(|n| (n, seq.values()[n].ln_abs()))
        .collect();
    let method = estimator.method();
    if samples.len() < estimator.min_nonzero() {
        return Err(Error::InsufficientData {
            method: method.tag().to_string(),
            needed: estimator.min_nonzero(),
            found: samples.len(),
        });
    }
    let (estimate, diagnostics) = estimator.estimate(&samples)?;
    Ok(GrowthEstimate {
        estimate,
        method,
        window,
        nonzero_count: samples.len(),
        diagnostics,
    })
}

/// Looks the estimator up by registry name (`slope`, `rootmax`, `ratio`).
pub fn estimate_growth_by_name(
    seq: &MomentSequence,
    name: &str,
    window: (usize, usize),
) -> Result<GrowthEstimate> {
    let est = growth_estimators().get(name)?;
    estimate_growth(seq, est.as_ref(), window)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealCaseCheck {
    pub estimate: GrowthEstimate,
    pub sup_norm: f64,
    pub gap: f64,
}

/// Slope-fit estimate next to `sup_{[0,1]} |f|` for real `f`.
pub fn real_case_check(
    f: &Polynomial,
    seq: &MomentSequence,
    window: (usize, usize),
) -> Result<RealCaseCheck> {
    if !f.is_real() {
        return Err(Error::InvalidInput(
            "polynomial has non-real coefficients".into(),
        ));
    }
    let estimate = estimate_growth(seq, &SlopeFit, window)?;
    let sup = sup_norm(f)?.value;
    Ok(RealCaseCheck {
        estimate,
        sup_norm: sup,
        gap: (estimate.estimate - sup).abs(),
    })
}

/// `(estimate <= max|S| (1 + tol), max|S| − estimate)`.
pub fn bound_check(estimate: &GrowthEstimate, s: &CriticalSet, tol: f64) -> (bool, f64) {
    let m = s.max_modulus;
    (estimate.estimate <= m * (1.0 + tol), m - estimate.estimate)
}

/// `(|estimate − max|S|| <= tol · max(max|S|, 1e-6), estimate − max|S|)`.
pub fn conjecture_check(estimate: &GrowthEstimate, s: &CriticalSet, tol: f64) -> (bool, f64) {
    let m = s.max_modulus;
    let gap = estimate.estimate - m;
    (gap.abs() <= tol * m.max(1e-6), gap)
}
