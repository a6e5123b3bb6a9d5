//! Built-in charts, addressable by name.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::geometry::ChartedSubmanifold;

pub const BUILTIN_CHARTS: [&str; 4] = ["circle", "sphere3", "open-ball", "generic2d"];

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("radius must lie in (0, 1), got {r}"));
    }
    Ok(())
}

/// θ ↦ r·e^{2πiθ} in the disc (n = 1, d = 1).
pub fn circle(r: f64) -> Result<ChartedSubmanifold> {
    check_radius(r)?;
    Ok(ChartedSubmanifold::new(
        "circle",
        1,
        1,
        Arc::new(move |t: &[f64]| vec![Complex64::from_polar(r, 2.0 * PI * t[0])]),
    )?
    .with_jacobian(Arc::new(move |t: &[f64]| {
        vec![vec![Complex64::new(0.0, 2.0 * PI) * Complex64::from_polar(r, 2.0 * PI * t[0])]]
    })))
}

/// The sphere |z| = r in B_2 (n = 2, d = 3), via
/// r(cos ψ e^{iφ₁}, sin ψ e^{iφ₂}) with ψ ∈ [0.05π, 0.45π] to stay off the
/// coordinate singularities.
pub fn sphere3(r: f64) -> Result<ChartedSubmanifold> {
    check_radius(r)?;
    ChartedSubmanifold::new(
        "sphere3",
        2,
        3,
        Arc::new(move |t: &[f64]| {
            let psi = FRAC_PI_2 * (0.1 + 0.8 * t[0]);
            vec![
                Complex64::from_polar(r * psi.cos(), 2.0 * PI * t[1]),
                Complex64::from_polar(r * psi.sin(), 2.0 * PI * t[2]),
            ]
        }),
    )
}

/// An open subset of B_2 (n = 2, d = 4): the square (0,1)⁴ mapped onto a
/// polydisc-like box of radius r.
pub fn open_ball(r: f64) -> Result<ChartedSubmanifold> {
    check_radius(r)?;
    let s = r / 2.0;
    ChartedSubmanifold::new(
        "open-ball",
        2,
        4,
        Arc::new(move |t: &[f64]| {
            vec![
                Complex64::new(s * (2.0 * t[0] - 1.0), s * (2.0 * t[1] - 1.0)),
                Complex64::new(s * (2.0 * t[2] - 1.0), s * (2.0 * t[3] - 1.0)),
            ]
        }),
    )
}

/// (t₁, t₂) ↦ (t₁/2, t₂/2 + i t₁t₂/4) in B_2, neither isotropic nor
/// co-isotropic.
pub fn generic2d() -> Result<ChartedSubmanifold> {
    ChartedSubmanifold::new(
        "generic2d",
        2,
        2,
        Arc::new(|t: &[f64]| {
            vec![
                Complex64::new(t[0] / 2.0, 0.0),
                Complex64::new(t[1] / 2.0, t[0] * t[1] / 4.0),
            ]
        }),
    )
}

/// Look up a built-in chart. `r` is the radius parameter for the charts that
/// take one; generic2d ignores it.
pub fn builtin_chart(name: &str, r: f64) -> Result<ChartedSubmanifold> {
    match name {
        "circle" => circle(r),
        "sphere3" => sphere3(r),
        "open-ball" => open_ball(r),
        "generic2d" => generic2d(),
        other => domain(format!(
            "unknown chart '{other}' (available: {})",
            BUILTIN_CHARTS.join(", ")
        )),
    }
}

/// Deterministic interior sample points of (0,1)^d (a shifted Kronecker
/// sequence), used to check that a classification is stable over a chart.
pub fn sample_points(d: usize, count: usize) -> Vec<Vec<f64>> {
    const STEPS: [f64; 6] = [
        0.618_033_988_749_895,
        0.414_213_562_373_095,
        0.732_050_807_568_877,
        0.236_067_977_499_790,
        0.645_751_311_064_591,
        0.316_624_790_355_400,
    ];
    (1..=count)
        .map(|k| {
            (0..d)
                .map(|j| {
                    let x = (0.5 + k as f64 * STEPS[j % STEPS.len()]).fract();
                    0.05 + 0.9 * x
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{classify, lambda_spectrum, pullback_forms, ClassTag, DEFAULT_CLASSIFY_TOL};

    #[test]
    fn registry_names_resolve() {
        for name in BUILTIN_CHARTS {
            let chart = builtin_chart(name, 0.5).unwrap();
            assert_eq!(chart.name(), name);
        }
        assert!(builtin_chart("torus", 0.5).is_err());
        assert!(builtin_chart("circle", 1.0).is_err());
    }

    #[test]
    fn circle_analytic_and_fd_jacobians_agree() {
        let analytic = circle(0.7).unwrap();
        let fd = analytic.clone().without_jacobian();
        for t in sample_points(1, 5) {
            let a = analytic.jacobian(&t).unwrap();
            let f = fd.jacobian(&t).unwrap();
            assert!((a[0][0] - f[0][0]).norm() < 1e-6 * a[0][0].norm());
        }
    }

    #[test]
    fn sphere_is_coisotropic() {
        let chart = sphere3(0.6).unwrap();
        for t in sample_points(3, 8) {
            let pair = pullback_forms(&chart, &t).unwrap();
            let class = classify(&pair, 2, 3, DEFAULT_CLASSIFY_TOL).unwrap();
            assert_eq!(class.tag, ClassTag::CoIsotropic, "t = {t:?}");
            assert_eq!(class.r, 1);
            assert_eq!(class.zero_multiplicity, 1);
            assert!((class.lambda_spectrum[0] - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn generic_chart_is_neither() {
        let chart = generic2d().unwrap();
        for t in sample_points(2, 8) {
            let pair = pullback_forms(&chart, &t).unwrap();
            let class = classify(&pair, 2, 2, 1e-6).unwrap();
            assert_eq!(class.tag, ClassTag::Neither, "t = {t:?}, λ = {:?}", class.lambda_spectrum);
        }
    }

    #[test]
    fn open_ball_is_coisotropic_with_full_rank() {
        let chart = open_ball(0.8).unwrap();
        for t in sample_points(4, 4) {
            let pair = pullback_forms(&chart, &t).unwrap();
            let class = classify(&pair, 2, 4, DEFAULT_CLASSIFY_TOL).unwrap();
            assert_eq!(class.tag, ClassTag::CoIsotropic);
            assert_eq!((class.r, class.zero_multiplicity), (2, 0));
        }
    }

    #[test]
    fn lambda_spectrum_is_reparametrization_invariant() {
        // t ↦ 0.3 + 0.5 t composed with the generic chart
        let base = generic2d().unwrap();
        let reparam = ChartedSubmanifold::new(
            "generic2d-affine",
            2,
            2,
            Arc::new(|s: &[f64]| {
                let t0 = 0.3 + 0.5 * s[0];
                let t1 = 0.3 + 0.5 * s[1];
                vec![Complex64::new(t0 / 2.0, 0.0), Complex64::new(t1 / 2.0, t0 * t1 / 4.0)]
            }),
        )
        .unwrap();
        for s in sample_points(2, 5) {
            let t: Vec<f64> = s.iter().map(|x| 0.3 + 0.5 * x).collect();
            let a = lambda_spectrum(&pullback_forms(&base, &t).unwrap()).unwrap();
            let b = lambda_spectrum(&pullback_forms(&reparam, &s).unwrap()).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-8, "{a:?} vs {b:?}");
        }
    }
}
