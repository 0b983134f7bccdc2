use num_complex::Complex64;
use proptest::prelude::*;

use polymoment::continuation::{
    evaluators, initial_bundle, plan_path_avoiding, track_from, FContext, TrackerConfig,
};
use polymoment::growth::{estimate_growth, SlopeFit, WindowedRootMax};
use polymoment::lab::{generate_corpus, GeneratorConfig};
use polymoment::moments::{moment, moment_sequence, MomentSequence};
use polymoment::poly::horner;
use polymoment::roots::roots;
use polymoment::{critical_set, parse_poly, sup_norm, ComplexRational, Polynomial};

fn coefficient() -> impl Strategy<Value = ComplexRational> {
    (-9i64..=9, 1i64..=6, -9i64..=9, 1i64..=6)
        .prop_map(|(a, b, c, d)| ComplexRational::from_parts((a, b), (c, d)))
}

fn poly(max_len: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(coefficient(), 0..=max_len).prop_map(Polynomial::new)
}

fn nonconstant(max_degree: usize) -> impl Strategy<Value = Polynomial> {
    poly(max_degree + 1).prop_filter("degree >= 1", |p| p.degree() >= 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in poly(5), q in poly(5), r in poly(4)) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &Polynomial::one(), p.clone());
    }

    #[test]
    fn degree_of_product(p in poly(5), q in poly(5)) {
        let prod = &p * &q;
        if p.is_zero() || q.is_zero() {
            prop_assert!(prod.is_zero());
        } else {
            prop_assert_eq!(prod.degree(), p.degree() + q.degree());
        }
    }

    #[test]
    fn display_parse_round_trip(p in poly(6)) {
        prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn pow_is_additive(p in poly(3), a in 0u32..5, b in 0u32..5) {
        prop_assert_eq!(p.pow(a + b), &p.pow(a) * &p.pow(b));
    }

    #[test]
    fn leibniz_rule(p in poly(4), q in poly(4)) {
        let lhs = (&p * &q).derivative();
        let rhs = &(&p.derivative() * &q) + &(&p * &q.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn integration_is_linear(p in poly(5), q in poly(5), c in coefficient()) {
        let lhs = (&p.scale(&c) + &q).integrate_unit();
        let rhs = &(&c * &p.integrate_unit()) + &q.integrate_unit();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_matches_exact(p in poly(5), x in coefficient()) {
        let exact = p.eval_exact(&x).to_complex64();
        let float = p.eval(x.to_complex64());
        prop_assert!((exact - float).norm() <= 1e-9 * (1.0 + exact.norm()));
    }

    #[test]
    fn moment_scale_law(f in poly(4), c in coefficient(), n in 0u32..12) {
        prop_assert_eq!(moment(&f.scale(&c), n), &c.pow(n) * &moment(&f, n));
    }

    #[test]
    fn sequence_matches_single_moments(f in poly(4)) {
        let seq = moment_sequence(&f, 8).unwrap();
        for n in 0..=8u32 {
            prop_assert_eq!(seq.get(n as usize).unwrap(), &f.pow(n).integrate_unit());
        }
    }

    #[test]
    fn conjugation_conjugates_moments(f in poly(4), n in 0u32..10) {
        prop_assert_eq!(moment(&f.conj(), n), moment(&f, n).conj());
    }

    #[test]
    fn moduli_bounded_by_sup_norm(f in nonconstant(4)) {
        let seq = moment_sequence(&f, 30).unwrap();
        let m = sup_norm(&f).unwrap().value;
        for (n, v) in seq.values().iter().enumerate().skip(1) {
            prop_assert!(v.ln_abs() <= n as f64 * m.ln() + 1e-9 * n as f64);
        }
    }

    #[test]
    fn growth_scale_covariance(f in nonconstant(3), c in coefficient()) {
        prop_assume!(!c.is_zero());
        let seq = moment_sequence(&f, 80).unwrap();
        let scaled = MomentSequence::from_values(
            f.scale(&c),
            seq.values().iter().enumerate().map(|(n, m)| m * &c.pow(n as u32)).collect(),
        );
        let c_abs = c.to_complex64().norm();
        let a = estimate_growth(&seq, &WindowedRootMax, (20, 80)).unwrap().estimate;
        let b = estimate_growth(&scaled, &WindowedRootMax, (20, 80)).unwrap().estimate;
        prop_assert!((b / (a * c_abs) - 1.0).abs() < 1e-9);
        if let (Ok(a), Ok(b)) = (
            estimate_growth(&seq, &SlopeFit, (20, 80)),
            estimate_growth(&scaled, &SlopeFit, (20, 80)),
        ) {
            prop_assert!((b.estimate / (a.estimate * c_abs) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn roots_satisfy_polynomial(f in nonconstant(6)) {
        let coeffs = f.to_complex64();
        let scale: f64 = coeffs.iter().map(|c| c.norm()).sum();
        let rs = roots(&f).unwrap();
        prop_assert_eq!(rs.len(), f.degree());
        for r in rs {
            let mag = r.value.norm().max(1.0).powi(f.degree() as i32);
            prop_assert!(horner(&coeffs, r.value).norm() <= 1e-9 * scale * mag);
        }
    }

    #[test]
    fn singular_set_contains_endpoint_values(f in nonconstant(5)) {
        let s = critical_set(&f).unwrap();
        for x in [0.0, 1.0] {
            let v = f.eval(Complex64::new(x, 0.0));
            prop_assert!(s.distance_to(v) <= 1e-8 * (1.0 + v.norm()));
        }
        let max = s.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert_eq!(max, s.max_modulus);
    }

    #[test]
    fn sup_norm_dominates_samples(f in nonconstant(5)) {
        let sup = sup_norm(&f).unwrap();
        let coeffs = f.to_complex64();
        let sampled = (0..=2000)
            .map(|i| horner(&coeffs, Complex64::new(i as f64 / 2000.0, 0.0)).norm())
            .fold(0.0, f64::max);
        prop_assert!(sup.value + 1e-9 * (1.0 + sup.value) >= sampled);
        let lipschitz: f64 = coeffs.iter().enumerate().map(|(k, c)| k as f64 * c.norm()).sum();
        prop_assert!(sup.value <= sampled + lipschitz / 4000.0 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn series_and_quadrature_agree(f in nonconstant(4), r in 0.0f64..0.4, theta in 0.0f64..std::f64::consts::TAU) {
        let ctx = FContext::new(f).unwrap().with_n_max(120);
        let t = Complex64::from_polar(r / ctx.sup_norm.value, theta);
        let reg = evaluators();
        let a = reg.get("series").unwrap().evaluate(&ctx, t).unwrap().value;
        let b = reg.get("quadrature").unwrap().evaluate(&ctx, t).unwrap().value;
        prop_assert!((a - b).norm() < 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn tracking_is_reversible(f in nonconstant(4), a in (-4.0f64..4.0, -4.0f64..4.0), b in (-4.0f64..4.0, -4.0f64..4.0)) {
        let s = critical_set(&f).unwrap();
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let path = plan_path_avoiding(&s.values(), a, b, s.default_clearance());
        prop_assume!(path.is_ok());
        let path = path.unwrap();
        let start = initial_bundle(&f, a).unwrap();
        let fwd = track_from(&f, &start, &path, TrackerConfig::default()).unwrap();
        let back = track_from(&f, fwd.last(), &path.reversed(), TrackerConfig::default()).unwrap();
        for (p, q) in start.roots.iter().zip(&back.last().roots) {
            prop_assert!((p - q).norm() < 1e-6);
        }
        for (p, q) in start.logs.iter().zip(&back.last().logs) {
            prop_assert!((p - q).norm() < 1e-6);
        }
    }

    #[test]
    fn corpus_is_deterministic(seed in any::<u64>(), lo in 0usize..4, span in 0usize..3, complex in any::<bool>()) {
        let cfg = GeneratorConfig { seed, degree_range: (lo, lo + span), allow_complex: complex, count: 12, ..Default::default() };
        let a = generate_corpus(&cfg).unwrap();
        prop_assert_eq!(&a, &generate_corpus(&cfg).unwrap());
        for p in &a {
            prop_assert!(!p.is_zero());
            prop_assert!((lo..=lo + span).contains(&p.degree()));
        }
    }
}
