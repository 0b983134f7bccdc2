//! Piecewise-linear paths in the τ-plane that keep a fixed clearance from the singular set.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::CriticalSet;

/// Detours circle each obstacle counterclockwise (obstacle on the left of travel).
pub const DETOUR_CONVENTION: &str = "ccw-arc";

#[derive(Clone, Debug, PartialEq)]
pub struct TauPath {
    waypoints: Vec<Complex64>,
    clearance: f64,
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a) * ab.conj()).re / len2;
    (a + ab * s.clamp(0.0, 1.0) - p).norm()
}

impl TauPath {
    pub fn new(waypoints: Vec<Complex64>, clearance: f64) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidPath(
                "a path needs at least two waypoints".into(),
            ));
        }
        if clearance.is_nan() || clearance <= 0.0 {
            return Err(Error::InvalidPath("clearance must be positive".into()));
        }
        Ok(Self {
            waypoints,
            clearance,
        })
    }

    /// Closed polygon approximating `center + radius e^{iθ}`, θ from `start_angle`
    /// through `turns` full counterclockwise turns, with `segments_per_turn` chords.
    pub fn circle(
        center: Complex64,
        radius: f64,
        start_angle: f64,
        turns: f64,
        segments_per_turn: usize,
        clearance: f64,
    ) -> Result<Self> {
        let n = ((segments_per_turn as f64) * turns.abs()).ceil().max(3.0) as usize;
        let sweep = TAU * turns;
        let mut pts: Vec<Complex64> = (0..=n)
            .map(|k| {
                center + Complex64::from_polar(radius, start_angle + sweep * k as f64 / n as f64)
            })
            .collect();
        // land exactly on the start point after whole turns
        if turns.fract() == 0.0 {
            pts[n] = pts[0];
        }
        Self::new(pts, clearance)
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn start(&self) -> Complex64 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.waypoints.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .sum()
    }

    pub fn reversed(&self) -> Self {
        let mut w = self.waypoints.clone();
        w.reverse();
        Self {
            waypoints: w,
            clearance: self.clearance,
        }
    }

    /// Concatenates `other` onto this path; `other` must start where this one ends.
    pub fn then(&self, other: &TauPath) -> Result<Self> {
        if (other.start() - self.end()).norm() > 1e-12 * (1.0 + self.end().norm()) {
            return Err(Error::InvalidPath("paths are not contiguous".into()));
        }
        let mut w = self.waypoints.clone();
        w.extend_from_slice(&other.waypoints[1..]);
        Ok(Self {
            waypoints: w,
            clearance: self.clearance.min(other.clearance),
        })
    }

    /// Smallest distance from the polyline to any obstacle.
    pub fn min_distance(&self, obstacles: &[Complex64]) -> f64 {
        self.waypoints
            .windows(2)
            .flat_map(|w| {
                obstacles
                    .iter()
                    .map(move |&p| segment_distance(w[0], w[1], p))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks that every point of every segment is at least `clearance` from every obstacle.
    pub fn validate(&self, obstacles: &[Complex64]) -> Result<()> {
        let d = self.min_distance(obstacles);
        if d < self.clearance {
            return Err(Error::InvalidPath(format!(
                "polyline passes within {d:e} of an obstacle (clearance {:e})",
                self.clearance
            )));
        }
        Ok(())
    }

    /// Full check against a singular set, including that the path starts outside
    /// the disc containing all of `S`.
    pub fn validate_against(&self, s: &CriticalSet) -> Result<()> {
        if self.start().norm() <= s.max_modulus {
            return Err(Error::InvalidPath(format!(
                "path starts at |tau| = {} inside max|S| = {}",
                self.start().norm(),
                s.max_modulus
            )));
        }
        self.validate(&s.values())
    }
}

/// Plans a path from `start` to `end` avoiding every element of `s`.
pub fn plan_path(
    s: &CriticalSet,
    start: Complex64,
    end: Complex64,
    clearance: f64,
) -> Result<TauPath> {
    let path = plan_path_avoiding(&s.values(), start, end, clearance)?;
    path.validate_against(s)?;
    Ok(path)
}

/// Straight segment from `start` to `end`, with a counterclockwise circular detour of
/// radius `2 * clearance` around each obstacle closer than `clearance` to the segment.
pub fn plan_path_avoiding(
    obstacles: &[Complex64],
    start: Complex64,
    end: Complex64,
    clearance: f64,
) -> Result<TauPath> {
    for (tau, _) in [(end, ()), (start, ())] {
        if let Some(&p) = obstacles.iter().find(|&&p| (p - tau).norm() <= clearance) {
            return Err(Error::Blocked {
                tau,
                obstacle: p,
                clearance,
            });
        }
    }
    let ab = end - start;
    let len = ab.norm();
    let unit = if len > 0.0 {
        ab / len
    } else {
        Complex64::new(1.0, 0.0)
    };

    // (entry parameter, exit parameter, obstacle, radius)
    let mut detours: Vec<(f64, f64, Complex64, f64)> = Vec::new();
    for &p in obstacles {
        if segment_distance(start, end, p) >= clearance {
            continue;
        }
        let rel = (p - start) * unit.conj();
        let along = rel.re;
        let off = rel.im.abs();
        let rho = (2.0 * clearance)
            .min((p - start).norm())
            .min((p - end).norm());
        let half = (rho * rho - off * off).max(0.0).sqrt();
        detours.push((along - half, along + half, p, rho));
    }
    detours.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut waypoints = vec![start];
    for (s_in, s_out, p, rho) in detours {
        let entry = start + unit * s_in.clamp(0.0, len);
        let exit = start + unit * s_out.clamp(0.0, len);
        waypoints.push(entry);
        let a0 = (entry - p).arg();
        let sweep = ((exit - p).arg() - a0).rem_euclid(TAU);
        // chords stay at least (rho + clearance)/2 from the obstacle
        let max_step = (2.0 * ((rho + clearance) / (2.0 * rho)).min(1.0).acos()).clamp(1e-3, 0.2);
        let n = (sweep / max_step).ceil().max(1.0) as usize;
        for k in 1..n {
            waypoints.push(p + Complex64::from_polar(rho, a0 + sweep * k as f64 / n as f64));
        }
        waypoints.push(exit);
    }
    waypoints.push(end);
    waypoints.dedup_by(|a, b| (*a - *b).norm() == 0.0);
    if waypoints.len() < 2 {
        waypoints.push(end);
    }

    let path = TauPath::new(waypoints, clearance)?;
    path.validate(obstacles)?;
    Ok(path)
}
