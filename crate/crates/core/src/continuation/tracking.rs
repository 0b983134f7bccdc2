//! Predictor–corrector tracking of the roots of `f(z) = τ` along a [`TauPath`],
//! with each `log((1 − z)/(−z))` lifted continuously to the Riemann surface of the logarithm.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::continuation::path::{TauPath, DETOUR_CONVENTION};
use crate::error::{Error, Result};
use crate::poly::{horner_error_bound, horner_with_derivative, Polynomial};
use crate::roots::{default_finder, roots_with};

/// Snapshot of the tracked roots at one value of τ.
#[derive(Clone, Debug, PartialEq)]
pub struct RootBundle {
    pub tau: Complex64,
    pub roots: Vec<Complex64>,
    /// Continuous values of `log((1 − z_k)/(−z_k))`.
    pub logs: Vec<Complex64>,
    /// Multiples of `2πi` separating `logs[k]` from the principal logarithm.
    pub branch_offsets: Vec<i64>,
}

#[derive(Serialize)]
struct BundleRecord<'a> {
    tau: [f64; 2],
    roots: Vec<[f64; 2]>,
    logs: Vec<[f64; 2]>,
    branch_offsets: &'a [i64],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl RootBundle {
    /// One JSON object `{"tau":[re,im],"roots":[[re,im],…],"logs":[[re,im],…],"branch_offsets":[…]}`.
    pub fn to_json_line(&self) -> String {
        let rec = BundleRecord {
            tau: pair(self.tau),
            roots: self.roots.iter().copied().map(pair).collect(),
            logs: self.logs.iter().copied().map(pair).collect(),
            branch_offsets: &self.branch_offsets,
        };
        serde_json::to_string(&rec).expect("bundle is always serializable")
    }

    pub fn max_residual(&self, coeffs: &[Complex64]) -> f64 {
        self.roots
            .iter()
            .map(|&z| (horner_with_derivative(coeffs, z).0 - self.tau).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|exp(L_k)(−z_k) − (1 − z_k)| / (1 + |z_k|)`.
    pub fn max_log_defect(&self) -> f64 {
        self.roots
            .iter()
            .zip(&self.logs)
            .map(|(&z, &l)| (l.exp() * (-z) - (1.0 - z)).norm() / (1.0 + z.norm()))
            .fold(0.0, f64::max)
    }

    pub fn min_separation(&self) -> f64 {
        min_separation(&self.roots)
    }
}

fn min_separation(z: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            m = m.min((z[i] - z[j]).norm());
        }
    }
    m
}

fn principal_log(z: Complex64) -> Complex64 {
    ((1.0 - z) / (-z)).ln()
}

/// Lifts `log((1 − z)/(−z))` to the branch nearest `previous`.
fn lift_log(z: Complex64, previous: Complex64) -> (Complex64, i64) {
    let p = principal_log(z);
    let m = ((previous.im - p.im) / TAU).round();
    (p + Complex64::new(0.0, TAU * m), m as i64)
}

#[derive(Clone, Copy, Debug)]
pub struct TrackerConfig {
    /// Largest accepted jump of a lifted logarithm in one step.
    pub max_log_jump: f64,
    /// Largest root displacement per step, as a fraction of the distance to the nearest other root.
    pub max_root_move: f64,
    pub newton_iterations: usize,
    /// Residual bound `|f(z) − τ| <= residual_tol (1 + |τ|)` for an accepted root.
    pub residual_tol: f64,
    /// Smallest step, relative to `1 + |τ|`.
    pub min_step: f64,
    /// Consecutive acceptances before the step is doubled.
    pub grow_after: usize,
    pub max_steps: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            max_log_jump: FRAC_PI_2,
            max_root_move: 0.25,
            newton_iterations: 12,
            residual_tol: 1e-9,
            min_step: 1e-13,
            grow_after: 4,
            max_steps: 5_000_000,
        }
    }
}

/// Accepted bundles along one path, the first being the starting bundle.
#[derive(Clone, Debug)]
pub struct Trace {
    pub bundles: Vec<RootBundle>,
    pub rejected_steps: usize,
    pub clearance: f64,
}

impl Trace {
    pub fn first(&self) -> &RootBundle {
        &self.bundles[0]
    }

    pub fn last(&self) -> &RootBundle {
        self.bundles
            .last()
            .expect("a trace holds at least its start")
    }

    /// `perm[k]` is the index of the starting root that root `k` ends closest to.
    /// The identity means trivial monodromy.
    pub fn permutation(&self) -> Vec<usize> {
        let start = &self.first().roots;
        self.last()
            .roots
            .iter()
            .map(|&z| {
                (0..start.len())
                    .min_by(|&a, &b| (start[a] - z).norm().total_cmp(&(start[b] - z).norm()))
                    .unwrap()
            })
            .collect()
    }

    /// JSON-lines dump: a header object naming the detour convention, then one bundle per line.
    pub fn to_json_lines(&self, poly: &Polynomial) -> String {
        let header = serde_json::json!({
            "trace": {
                "poly": poly.to_string(),
                "convention": DETOUR_CONVENTION,
                "clearance": self.clearance,
                "bundles": self.bundles.len(),
            }
        });
        let mut out = header.to_string();
        out.push('\n');
        for b in &self.bundles {
            out.push_str(&b.to_json_line());
            out.push('\n');
        }
        out
    }
}

/// Roots of `f − τ` found from scratch, with principal logarithms.
pub fn initial_bundle(f: &Polynomial, tau: Complex64) -> Result<RootBundle> {
    if f.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let mut c = f.to_complex64();
    c[0] -= tau;
    let roots: Vec<Complex64> = roots_with(default_finder().as_ref(), &c)?
        .into_iter()
        .map(|r| newton(&c, r.value, 4).0)
        .collect();
    let logs = roots.iter().map(|&z| principal_log(z)).collect();
    Ok(RootBundle {
        tau,
        branch_offsets: vec![0; roots.len()],
        roots,
        logs,
    })
}

/// Newton on `c(z) = 0`; returns the iterate and its residual.
fn newton(c: &[Complex64], mut z: Complex64, iterations: usize) -> (Complex64, f64) {
    for _ in 0..iterations {
        let (p, dp) = horner_with_derivative(c, z);
        let residual = p.norm();
        if residual <= horner_error_bound(c, z) || dp.norm() == 0.0 {
            return (z, residual);
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 2.0 * f64::EPSILON * (1.0 + z.norm()) {
            return (z, horner_with_derivative(c, z).0.norm());
        }
    }
    (z, horner_with_derivative(c, z).0.norm())
}

/// Tracks the roots of `f − τ` along `path`, starting from a fresh root solve at its start.
pub fn track_roots(f: &Polynomial, path: &TauPath) -> Result<Trace> {
    let start = initial_bundle(f, path.start())?;
    track_from(f, &start, path, TrackerConfig::default())
}

/// Continues an existing bundle along `path` (which must start at `start.tau`).
pub fn track_from(
    f: &Polynomial,
    start: &RootBundle,
    path: &TauPath,
    cfg: TrackerConfig,
) -> Result<Trace> {
    if f.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    if (path.start() - start.tau).norm() > 1e-12 * (1.0 + start.tau.norm()) {
        return Err(Error::InvalidPath(
            "path does not start at the bundle's tau".into(),
        ));
    }
    let coeffs = f.to_complex64();
    let deriv: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect();

    let clearance = path.clearance();
    let mut current = start.clone();
    let mut bundles = vec![current.clone()];
    let mut step = clearance / 4.0;
    let mut streak = 0;
    let mut rejected = 0;
    let mut steps = 0;

    for seg in path.waypoints().windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let seg_len = (b - a).norm();
        if seg_len == 0.0 {
            continue;
        }
        let dir = (b - a) / seg_len;
        let mut s = 0.0;
        while s < seg_len {
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::StepUnderflow {
                    tau: current.tau,
                    step,
                });
            }
            let h = step.min(seg_len - s);
            let last = h >= seg_len - s;
            let tau = if last { b } else { a + dir * (s + h) };
            match try_step(&coeffs, &deriv, &current, tau, &cfg) {
                Ok(next) => {
                    s = if last { seg_len } else { s + h };
                    current = next;
                    bundles.push(current.clone());
                    streak += 1;
                    if streak >= cfg.grow_after {
                        step = (2.0 * step).min(clearance);
                        streak = 0;
                    }
                }
                Err(reason) => {
                    rejected += 1;
                    streak = 0;
                    step = h / 2.0;
                    if step < cfg.min_step * (1.0 + current.tau.norm()) {
                        return Err(match reason {
                            StepFailure::Residual(residual) => {
                                Error::RootResidual { tau, residual }
                            }
                            StepFailure::Jump => Error::StepUnderflow {
                                tau: current.tau,
                                step,
                            },
                        });
                    }
                }
            }
        }
    }
    Ok(Trace {
        bundles,
        rejected_steps: rejected,
        clearance,
    })
}

enum StepFailure {
    Residual(f64),
    Jump,
}

fn try_step(
    coeffs: &[Complex64],
    deriv: &[Complex64],
    from: &RootBundle,
    tau: Complex64,
    cfg: &TrackerConfig,
) -> std::result::Result<RootBundle, StepFailure> {
    let d = from.roots.len();
    let dtau = tau - from.tau;
    let mut shifted = coeffs.to_vec();
    shifted[0] -= tau;
    let tol = cfg.residual_tol * (1.0 + tau.norm());

    let mut roots = Vec::with_capacity(d);
    for &z in &from.roots {
        // tangent predictor: dz/dτ = 1/f'(z)
        let slope = crate::poly::horner(deriv, z);
        let guess = if slope.norm() > 0.0 {
            z + dtau / slope
        } else {
            z
        };
        let (z_new, residual) = newton(&shifted, guess, cfg.newton_iterations);
        if !z_new.is_finite() || residual > tol {
            return Err(StepFailure::Residual(residual));
        }
        roots.push(z_new);
    }

    // each root must stay in its own neighbourhood: this keeps the pairing bijective
    for (k, (new, old)) in roots.iter().zip(&from.roots).enumerate() {
        let nearest_other = (0..d)
            .filter(|&j| j != k)
            .map(|j| (old - from.roots[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if (new - old).norm() > cfg.max_root_move * nearest_other {
            return Err(StepFailure::Jump);
        }
    }
    if d > 1 && min_separation(&roots) < cfg.max_root_move * min_separation(&from.roots) {
        return Err(StepFailure::Jump);
    }

    let mut logs = Vec::with_capacity(d);
    let mut offsets = Vec::with_capacity(d);
    for (&z, &prev) in roots.iter().zip(&from.logs) {
        let (l, m) = lift_log(z, prev);
        if !l.is_finite() || (l - prev).norm() > cfg.max_log_jump {
            return Err(StepFailure::Jump);
        }
        logs.push(l);
        offsets.push(m);
    }
    Ok(RootBundle {
        tau,
        roots,
        logs,
        branch_offsets: offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::path::plan_path_avoiding;
    use crate::poly::parse_poly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_root_is_tau() {
        let f = Polynomial::x();
        let path = TauPath::new(vec![c(10.0, 0.0), c(5.0, 0.0)], 0.5).unwrap();
        let trace = track_roots(&f, &path).unwrap();
        for b in &trace.bundles {
            assert!((b.roots[0] - b.tau).norm() < 1e-12);
            assert!((b.logs[0] - ((1.0 - b.tau) / (-b.tau)).ln()).norm() < 1e-12);
        }
        assert_eq!(trace.last().tau, c(5.0, 0.0));
    }

    #[test]
    fn square_roots_along_reals() {
        let f = parse_poly("0,0,1").unwrap();
        let path = TauPath::new(vec![c(4.0, 0.0), c(2.25, 0.0)], 0.1).unwrap();
        let trace = track_roots(&f, &path).unwrap();
        let start = trace.first();
        let end = trace.last();
        for k in 0..2 {
            // explicit branch ±√τ, sign fixed by the starting root
            let sign = start.roots[k].re.signum();
            assert!((start.roots[k] - c(2.0 * sign, 0.0)).norm() < 1e-12);
            assert!((end.roots[k] - c(1.5 * sign, 0.0)).norm() < 1e-12);
            for b in &trace.bundles {
                assert!((b.roots[k] - b.tau.sqrt() * sign).norm() < 1e-10);
            }
        }
        assert_eq!(trace.permutation(), vec![0, 1]);
    }

    #[test]
    fn square_root_monodromy_swaps() {
        let f = parse_poly("0,0,1").unwrap();
        let path = TauPath::circle(c(0.0, 0.0), 4.0, 0.0, 1.0, 128, 0.5).unwrap();
        let trace = track_roots(&f, &path).unwrap();
        assert_eq!(trace.permutation(), vec![1, 0]);
        for k in 0..2 {
            assert!((trace.last().roots[k] + trace.first().roots[k]).norm() < 1e-9);
        }
    }

    #[test]
    fn log_branch_lifts_around_endpoint() {
        // z = τ for f = x; a loop of radius 1/2 about 0 sends 1 − 1/z once around 0
        let f = Polynomial::x();
        let path = TauPath::circle(c(0.0, 0.0), 0.5, 0.3, 1.0, 256, 0.1).unwrap();
        let trace = track_roots(&f, &path).unwrap();
        let jump = trace.last().logs[0] - trace.first().logs[0];
        assert!((jump.im.abs() - TAU).abs() < 1e-9, "{jump}");
        assert_eq!(trace.last().branch_offsets[0].abs(), 1);
        for b in &trace.bundles {
            assert!(b.max_log_defect() < 1e-12);
        }
    }

    #[test]
    fn reverse_returns_to_start() {
        let f = parse_poly("1/2,-1,0,1i").unwrap();
        let s = crate::spectrum::critical_set(&f).unwrap();
        let start = c(0.3, 6.0);
        let end = c(-0.2, -0.4);
        let path = plan_path_avoiding(&s.values(), start, end, s.default_clearance()).unwrap();
        let fwd = track_roots(&f, &path).unwrap();
        let back = track_from(&f, fwd.last(), &path.reversed(), TrackerConfig::default()).unwrap();
        for k in 0..3 {
            assert!((back.last().roots[k] - fwd.first().roots[k]).norm() < 1e-6);
            assert!((back.last().logs[k] - fwd.first().logs[k]).norm() < 1e-6);
        }
    }

    #[test]
    fn json_line_shape() {
        let b = initial_bundle(&Polynomial::x(), c(2.0, 0.0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&b.to_json_line()).unwrap();
        assert_eq!(v["tau"][0], 2.0);
        assert_eq!(v["roots"][0][0], 2.0);
        assert_eq!(v["branch_offsets"][0], 0);
        assert!(v["logs"][0][1].is_number());
        assert_eq!(v.as_object().unwrap().len(), 4);
    }
}
