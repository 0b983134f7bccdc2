//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

// Kronrod abscissae (positive half, descending) and weights; QUADPACK qk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.000_000_000_000_000_0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        kron += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    Piece {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).norm(),
    }
}

/// `∫_a^b f(x) dx`, bisecting the interval with the largest error estimate until
/// the summed estimate meets `max(abs_tol, rel_tol |I|)` or the interval budget runs out.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    cfg: QuadratureConfig,
) -> QuadratureResult {
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > cfg.abs_tol.max(cfg.rel_tol * value.norm()) && heap.len() < cfg.max_intervals {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    QuadratureResult {
        value,
        error,
        intervals: heap.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(
            |x| Complex64::new(x.powi(5), -x),
            0.0,
            1.0,
            QuadratureConfig::default(),
        );
        assert!((r.value - Complex64::new(1.0 / 6.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn log_integrand() {
        // ∫₀¹ dx/(1 - x/2) = 2 ln 2
        let r = integrate(
            |x| Complex64::new(1.0 / (1.0 - 0.5 * x), 0.0),
            0.0,
            1.0,
            QuadratureConfig::default(),
        );
        assert!((r.value.re - 2.0 * std::f64::consts::LN_2).abs() < 1e-13);
    }

    #[test]
    fn near_singular_integrand_adapts() {
        // ∫₀¹ dx/(x - z) = log((1-z)/(-z)) for z just off the interval
        let z = Complex64::new(0.3, 1e-3);
        let r = integrate(
            |x| (Complex64::new(x, 0.0) - z).inv(),
            0.0,
            1.0,
            QuadratureConfig::default(),
        );
        let exact = ((Complex64::new(1.0, 0.0) - z) / (-z)).ln();
        assert!((r.value - exact).norm() < 1e-8, "{} vs {}", r.value, exact);
        assert!(r.intervals > 1);
    }
}
