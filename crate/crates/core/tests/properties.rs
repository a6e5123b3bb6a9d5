use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use szegolab::bergman::{kernel, BallPoint};
use szegolab::charts;
use szegolab::geometry::{classify, lambda_spectrum, pullback_forms, ChartedSubmanifold, MetricPair};
use szegolab::hessdet::{
    det_direct, det_via_polynomial, eigenvalue_product, max_pairwise_rel_diff, random_skew_adjoint, BlockHessianSpec,
};
use szegolab::quadrature::integrate;
use szegolab::special::{beta_fn, binomial, binomial_exact, log_gamma, WeightedModel};
use szegolab::szego::{
    count_prediction, eigen_count, eigenvalue_density, q_transform, szego_rhs, Phi, QTransformSpec,
};
use szegolab::toeplitz::{
    explicit_eigenvalues, label_product, matrix_spectrum, phase_value, CircleSymbolModel, Symbol,
};

fn ball_point(n: usize) -> impl Strategy<Value = BallPoint> {
    (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n),
        0.0f64..0.999,
    )
        .prop_map(|(raw, radius)| {
            let coords: Vec<Complex64> = raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let norm = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
            BallPoint::new(coords.iter().map(|c| c * (radius / norm)).collect()).unwrap()
        })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn lgamma_recurrence(log_x in (0.1f64).ln()..(1e6f64).ln()) {
        let x = log_x.exp();
        let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        let scale = log_gamma(x + 1.0).unwrap().abs().max(1.0);
        prop_assert!((lhs - x.ln()).abs() < 1e-12 * scale);
    }

    #[test]
    fn beta_is_symmetric(x in 0.01f64..50.0, y in 0.01f64..50.0) {
        prop_assert_eq!(beta_fn(x, y).unwrap().to_bits(), beta_fn(y, x).unwrap().to_bits());
    }

    #[test]
    fn binomial_exact_below_63(m in 0u64..=62, k_frac in 0.0f64..=1.0) {
        let k = (k_frac * m as f64).round() as u64;
        let exact = binomial_exact(m, k).unwrap();
        prop_assert_eq!(binomial(m, k), exact as f64);
    }

    #[test]
    fn binomial_symmetric_above_62(m in 63u64..2000, k_frac in 0.0f64..=1.0) {
        let k = (k_frac * m as f64).round() as u64;
        // large rows overflow f64
        prop_assume!(binomial(m, k).is_finite());
        prop_assert!(rel(binomial(m, k), binomial(m, m - k)) < 1e-10);
        if k >= 1 {
            // Pascal's rule
            let pascal = binomial(m - 1, k - 1) + binomial(m - 1, k);
            prop_assert!(rel(binomial(m, k), pascal) < 1e-10);
        }
    }

    #[test]
    fn kernel_is_hermitian(
        (z, w) in (1usize..=3).prop_flat_map(|n| (ball_point(n), ball_point(n))),
        alpha in 0.0f64..200.0,
    ) {
        let n = z.dim();
        let model = WeightedModel::new(n, alpha).unwrap();
        let kzw = kernel(&model, &z, &w);
        let kwz = kernel(&model, &w, &z);
        prop_assert!((kzw - kwz.conj()).norm() <= 1e-14 * kzw.norm().max(1.0));
        let kzz = kernel(&model, &z, &z);
        prop_assert!(kzz.im == 0.0 && kzz.re >= 1.0);
        let expected = (1.0 - z.norm_sq()).powf(-(n as f64 + 1.0 + alpha));
        prop_assert!(rel(kzz.re, expected) < 1e-12);
    }

    #[test]
    fn phase_imaginary_part_nonnegative(
        points in prop::collection::vec(ball_point(2), 2..6),
        jitter in 0.0f64..1e-3,
    ) {
        let phi = phase_value(&points).unwrap();
        prop_assert!(phi.im >= -1e-12);
        // near-diagonal tuples
        let base = points[0].coords().to_vec();
        let near: Vec<BallPoint> = (0..points.len())
            .map(|j| {
                let shift = Complex64::new(jitter * j as f64, -jitter);
                BallPoint::new(base.iter().map(|c| c * (1.0 - 2e-3) + shift * 1e-1).collect()).unwrap()
            })
            .collect();
        prop_assert!(phase_value(&near).unwrap().im >= -1e-12);
    }

    #[test]
    fn label_product_at_least_one(d in prop::collection::vec(1e-9f64..1.0 - 1e-9, 2..8)) {
        prop_assert!(label_product(&d).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn determinant_identities(seed in any::<u64>(), d in 1usize..=4, m in 2usize..=6) {
        let pair = random_skew_adjoint(d, seed).unwrap();
        let spec = BlockHessianSpec::new(m, pair.w.clone()).unwrap();
        let direct = det_direct(&spec);
        let poly = det_via_polynomial(&spec);
        let product = eigenvalue_product(m, d, &lambda_spectrum(&pair).unwrap()).unwrap().powi(2);
        prop_assert!(max_pairwise_rel_diff(&[direct.re, poly.re, product]) < 1e-9);
        prop_assert!(direct.re > 0.0 && direct.im.abs() < 1e-9 * direct.re);
    }

    #[test]
    fn eigenvalue_product_for_prescribed_spectra(
        lambdas in prop::collection::vec(1e-3f64..2.0, 0..=2),
        extra_zeros in 0usize..=1,
        m in 2usize..=6,
    ) {
        let d = 2 * lambdas.len() + extra_zeros;
        prop_assume!(d > 0);
        let mut w = DMatrix::zeros(d, d);
        for (k, &l) in lambdas.iter().enumerate() {
            w[(2 * k, 2 * k + 1)] = l;
            w[(2 * k + 1, 2 * k)] = -l;
        }
        let spec = BlockHessianSpec::new(m, w).unwrap();
        let direct = det_direct(&spec).re;
        let product = eigenvalue_product(m, d, &lambdas).unwrap().powi(2);
        prop_assert!(rel(product, direct) < 1e-9);
    }

    #[test]
    fn q_transform_is_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        eps in prop::sample::select(vec![0.5, 1.0, 1.5]),
        t in 0.05f64..10.0,
    ) {
        prop_assume!(a.abs() > 1e-3 || b.abs() > 1e-3);
        let q = |phi: Phi| q_transform(&QTransformSpec::new(eps, phi).unwrap(), t).unwrap();
        let combined = q(Phi::Poly(vec![a, b]));
        let parts = a * q(Phi::Power(1.0)) + b * q(Phi::Power(2.0));
        prop_assert!((combined - parts).abs() <= 1e-10 * (a.abs() * t + b.abs() * t * t));
    }

    #[test]
    fn density_integrates_to_count_limit(r in 0.1f64..0.9, u1 in 0.05f64..0.95, u2 in 0.05f64..0.95) {
        let top = 1.0 / (1.0 - r * r).powi(2);
        let (t1, t2) = (top * u1.min(u2), top * u1.max(u2));
        prop_assume!(t2 - t1 > 1e-6 * top);
        let q = integrate(|s| eigenvalue_density(r, s).unwrap(), t1, t2, 1e-12, 0.0).unwrap();
        let limit = count_prediction(r, t1, t2).unwrap().limit;
        prop_assert!(rel(q.value / 2f64.sqrt(), limit) < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reparametrization_preserves_lambda_spectrum(
        scale in 0.3f64..1.0,
        shift in 0.0f64..0.3,
        t in prop::collection::vec(0.1f64..0.9, 2),
    ) {
        let generic = charts::generic2d().unwrap();
        let inner = generic.clone();
        let reparam = ChartedSubmanifold::new(
            "generic2d-affine",
            2,
            2,
            Arc::new(move |s: &[f64]| {
                let u: Vec<f64> = s.iter().map(|x| shift + scale * x).collect();
                inner.point(&u).unwrap().coords().to_vec()
            }),
        )
        .unwrap();
        let s: Vec<f64> = t.iter().map(|x| (x - shift) / scale).collect();
        prop_assume!(s.iter().all(|x| *x > 0.0 && *x < 1.0));
        let a = lambda_spectrum(&pullback_forms(&generic, &t).unwrap()).unwrap();
        let b = lambda_spectrum(&pullback_forms(&reparam, &s).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn coisotropic_sphere_dimensions(r in 0.1f64..0.9, t in prop::collection::vec(0.05f64..0.95, 3)) {
        let sphere = charts::sphere3(r).unwrap();
        let pair = pullback_forms(&sphere, &t).unwrap();
        let class = classify(&pair, 2, 3, 1e-4).unwrap();
        prop_assert!(class.is_coisotropic());
        prop_assert_eq!(class.r, 3 - 2);
        prop_assert_eq!(class.zero_multiplicity, 2 * 2 - 3);
    }

    #[test]
    fn fourier_symbol_spectrum_positive_and_bounded(
        r in 0.3f64..0.75,
        alpha in 1.0f64..60.0,
        c1 in (0.0f64..0.2, -0.2f64..0.2),
        c2 in (0.0f64..0.1, -0.1f64..0.1),
    ) {
        let symbol = Symbol::Fourier(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(c1.0, c1.1),
            Complex64::new(c2.0, c2.1),
        ]);
        let model = CircleSymbolModel::new(r, alpha, symbol).unwrap();
        let s = matrix_spectrum(&model, None).unwrap();
        let max = s.max();
        prop_assert!(s.eigenvalues.iter().all(|&l| l >= -1e-12 * max));
        prop_assert!(max <= model.norm_bound() * ((alpha + 1.0) / alpha).sqrt() + 1e-9);
    }

    #[test]
    fn constant_symbol_matrix_matches_explicit(
        r in prop::sample::select(vec![0.3, 0.5, std::f64::consts::FRAC_1_SQRT_2]),
        alpha in prop::sample::select(vec![1.0, 10.0, 100.0]),
    ) {
        let model = CircleSymbolModel::constant_one(r, alpha).unwrap();
        let explicit = explicit_eigenvalues(&model, None).unwrap();
        let matrix = matrix_spectrum(&model, None).unwrap();
        let floor = explicit.max() * 1e-9;
        for (a, b) in explicit.eigenvalues.iter().zip(&matrix.eigenvalues).take_while(|(a, _)| **a > floor) {
            prop_assert!(rel(*b, *a) < 1e-9);
        }
    }

    #[test]
    fn polynomial_rhs_is_monomial_combination(
        r in 0.1f64..0.9,
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..4),
    ) {
        prop_assume!(coeffs.iter().any(|c| c.abs() > 1e-3));
        let model = CircleSymbolModel::constant_one(r, 1.0).unwrap();
        let poly = szego_rhs(&model, &Phi::Poly(coeffs.clone())).unwrap();
        let sigma = 2.0 * PI * r / (1.0 - r * r);
        let top = 1.0 / (1.0 - r * r).powi(2);
        let scale: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * top.powi(k as i32 + 1) * sigma)
            .sum();
        let monomials: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let m = (k + 1) as f64;
                c * top.powf(m) / (2.0 * m).sqrt() * sigma
            })
            .sum();
        prop_assert!((poly - monomials).abs() <= 1e-10 * scale);
    }
}

#[test]
fn g_is_positive_definite_on_bundled_charts() {
    for name in charts::BUILTIN_CHARTS {
        let chart = charts::builtin_chart(name, 0.5).unwrap();
        for t in charts::sample_points(chart.d(), 20) {
            let pair = pullback_forms(&chart, &t).unwrap();
            assert!(MetricPair::from_forms(pair.g.clone(), pair.h.clone()).is_ok(), "{name} at {t:?}");
        }
    }
}

fn inversions(errors: &[f64]) -> usize {
    errors.windows(2).filter(|w| w[1] > w[0]).count()
}

/// |√(π/α)N − limit| over the grid: its rises must be exactly those of the
/// published scaled columns, and the second interval allows at most one.
#[test]
fn count_error_trend() {
    let grid = [100.0, 500.0, 1e3, 5e3, 1e4, 5e4, 1e5];
    let cases = [
        (0.5, 16.0 / 15.0, 16.0 / 9.0, [2.4814, 2.378, 2.3541, 2.3813, 2.3750, 2.3859, 2.3877]),
        (
            std::f64::consts::FRAC_1_SQRT_2,
            0.4,
            0.6,
            [0.8862, 0.9511, 1.0088, 0.9775, 0.9925, 0.9908, 0.9920],
        ),
    ];
    let mut counted = Vec::new();
    for (r, t1, t2, published) in cases {
        let limit = count_prediction(r, t1, t2).unwrap().limit;
        let errors: Vec<f64> = grid
            .iter()
            .map(|&alpha| {
                let s = explicit_eigenvalues(&CircleSymbolModel::constant_one(r, alpha).unwrap(), None).unwrap();
                ((PI / alpha).sqrt() * eigen_count(&s, t1, t2).unwrap() as f64 - limit).abs()
            })
            .collect();
        let published_errors: Vec<f64> = published.iter().map(|v| (v - limit).abs()).collect();
        assert_eq!(inversions(&errors), inversions(&published_errors), "r = {r}: {errors:?}");
        assert!(errors[6] < errors[0] / 10.0, "r = {r}: {errors:?}");
        counted.push(inversions(&errors));
    }
    assert!(counted[1] <= 1);
}
