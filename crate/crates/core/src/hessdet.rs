//! The block-tridiagonal Hessian 𝒪_{m−1} and three evaluations of its
//! determinant: direct LU, the polynomial P_{m−1}(W), and the eigenvalue
//! product / closed forms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::geometry::{ClassTag, MetricPair, SymplecticClass};
use crate::linalg;
use crate::special::binomial;

/// 𝒪_{m−1} is (m−1)·d square, built from d×d blocks of W.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHessianSpec {
    m: usize,
    w: DMatrix<f64>,
}

impl BlockHessianSpec {
    pub fn new(m: usize, w: DMatrix<f64>) -> Result<Self> {
        if m < 2 {
            return domain(format!("m must be at least 2, got {m}"));
        }
        if !w.is_square() || w.nrows() == 0 {
            return domain("W must be a non-empty square matrix");
        }
        Ok(Self { m, w })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.w.nrows()
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }
}

/// Diagonal blocks 2I, super-diagonal −I−iW, sub-diagonal −I+iW.
pub fn build_block_matrix(spec: &BlockHessianSpec) -> DMatrix<Complex64> {
    let d = spec.d();
    let size = (spec.m - 1) * d;
    let mut o = DMatrix::<Complex64>::zeros(size, size);
    for b in 0..spec.m - 1 {
        for i in 0..d {
            o[(b * d + i, b * d + i)] = Complex64::new(2.0, 0.0);
        }
        if b + 1 < spec.m - 1 {
            for i in 0..d {
                for j in 0..d {
                    let id = if i == j { -1.0 } else { 0.0 };
                    let w = spec.w[(i, j)];
                    o[(b * d + i, (b + 1) * d + j)] = Complex64::new(id, -w);
                    o[((b + 1) * d + i, b * d + j)] = Complex64::new(id, w);
                }
            }
        }
    }
    o
}

/// det 𝒪_{m−1} by LU on the full matrix.
pub fn det_direct(spec: &BlockHessianSpec) -> Complex64 {
    linalg::det_direct(&build_block_matrix(spec))
}

/// P_{m−1}(W) = Σ_ℓ C(m, 2ℓ+1)(−1)^ℓ W^{2ℓ}.
pub fn polynomial_matrix(spec: &BlockHessianSpec) -> DMatrix<f64> {
    let d = spec.d();
    let w2 = &spec.w * &spec.w;
    let mut power = DMatrix::<f64>::identity(d, d);
    let mut p = DMatrix::<f64>::zeros(d, d);
    let mut l = 0;
    while 2 * l < spec.m {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        p += &power * (sign * binomial(spec.m as u64, (2 * l + 1) as u64));
        power = &power * &w2;
        l += 1;
    }
    p
}

/// det P_{m−1}(W), which equals det 𝒪_{m−1}.
pub fn det_via_polynomial(spec: &BlockHessianSpec) -> Complex64 {
    let p = polynomial_matrix(spec).map(|x| Complex64::new(x, 0.0));
    linalg::det_direct(&p)
}

/// ((1+λ)^m − (1−λ)^m)/(2λ), evaluated as its even polynomial so λ → 0 is
/// exact.
pub fn pair_factor(m: usize, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    let mut acc = 0.0;
    let mut power = 1.0;
    let mut l = 0;
    while 2 * l < m {
        acc += binomial(m as u64, (2 * l + 1) as u64) * power;
        power *= l2;
        l += 1;
    }
    acc
}

/// √det 𝒪_{m−1} = m^{d/2−p}·∏_k ((1+λ_k)^m − (1−λ_k)^m)/(2λ_k), where the λ_k
/// (p of them) are the pair values of W's spectrum ±iλ_k.
pub fn eigenvalue_product(m: usize, d: usize, lambdas: &[f64]) -> Result<f64> {
    if m < 2 {
        return domain(format!("m must be at least 2, got {m}"));
    }
    if 2 * lambdas.len() > d {
        return domain(format!("{} eigenvalue pairs do not fit in dimension {d}", lambdas.len()));
    }
    let free = d as f64 / 2.0 - lambdas.len() as f64;
    let prod: f64 = lambdas.iter().map(|&l| pair_factor(m, l)).product();
    Ok((m as f64).powf(free) * prod)
}

/// d′ = d for isotropic Γ, 2n − d for co-isotropic Γ.
pub fn d_prime(n: usize, d: usize, tag: ClassTag) -> Result<usize> {
    match tag {
        ClassTag::Isotropic | ClassTag::Lagrangian => Ok(d),
        ClassTag::CoIsotropic if d <= 2 * n => Ok(2 * n - d),
        ClassTag::CoIsotropic => domain(format!("d = {d} exceeds 2n = {}", 2 * n)),
        ClassTag::Neither => Err(Error::Unsupported(
            "d′ is only defined for isotropic or co-isotropic submanifolds".into(),
        )),
    }
}

/// Closed-form √det 𝒪_{m−1} together with the unified quantity
/// 2^{d(m−1)/2}·det^{−1/2} = 2^{d′(m−1)/2}·m^{−d′/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub sqrt_det: f64,
    pub unified: f64,
    pub d_prime: usize,
}

pub fn det_closed_form(m: usize, n: usize, d: usize, class: &SymplecticClass) -> Result<ClosedForm> {
    if m < 2 {
        return domain(format!("m must be at least 2, got {m}"));
    }
    if d == 0 || d > 2 * n {
        return domain(format!("inconsistent dimensions d = {d}, n = {n}"));
    }
    let mf = m as f64;
    let sqrt_det = match class.tag {
        ClassTag::Isotropic | ClassTag::Lagrangian => mf.powf(d as f64 / 2.0),
        ClassTag::CoIsotropic => {
            2f64.powf(((d - n) * (m - 1)) as f64) * mf.powf(n as f64 - d as f64 / 2.0)
        }
        ClassTag::Neither => {
            return Err(Error::Unsupported(
                "no closed form for a submanifold that is neither isotropic nor co-isotropic".into(),
            ))
        }
    };
    let dp = d_prime(n, d, class.tag)?;
    let unified = 2f64.powf(dp as f64 * (m - 1) as f64 / 2.0) * mf.powf(-(dp as f64) / 2.0);
    Ok(ClosedForm {
        sqrt_det,
        unified,
        d_prime: dp,
    })
}

/// A seeded random pair with W = G⁻¹H skew-adjoint for G: G = AᵀA + εI and
/// H = B − Bᵀ, entries uniform on [−1, 1].
pub fn random_skew_adjoint(d: usize, seed: u64) -> Result<MetricPair> {
    if d == 0 {
        return domain("dimension must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |_: usize, _: usize| rng.random_range(-1.0..=1.0);
    let a = DMatrix::from_fn(d, d, &mut uniform);
    let b = DMatrix::from_fn(d, d, &mut uniform);
    let g = a.transpose() * &a + DMatrix::identity(d, d) * 0.5;
    let h = &b - b.transpose();
    MetricPair::from_forms(g, h)
}

/// Largest pairwise relative difference among a set of values.
pub fn max_pairwise_rel_diff(values: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let scale = a.abs().max(b.abs());
            if scale > 0.0 {
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{classify, lambda_spectrum};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn class(tag: ClassTag) -> SymplecticClass {
        SymplecticClass {
            tag,
            lambda_spectrum: vec![],
            r: 0,
            zero_multiplicity: 0,
        }
    }

    #[test]
    fn block_pattern() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 0.7, -0.7, 0.0]);
        let o = build_block_matrix(&BlockHessianSpec::new(2, w.clone()).unwrap());
        assert_eq!(o, DMatrix::identity(2, 2) * c(2.0, 0.0));

        let o = build_block_matrix(&BlockHessianSpec::new(3, DMatrix::from_element(1, 1, 0.4)).unwrap());
        let expected = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(-1.0, -0.4), c(-1.0, 0.4), c(2.0, 0.0)]);
        assert_eq!(o, expected);

        // with W skew-symmetric the blocks satisfy (−I+iW)ᵀ = −I−iW, so the
        // matrix is complex symmetric; it is not Hermitian unless W = 0
        let o = build_block_matrix(&BlockHessianSpec::new(4, w).unwrap());
        assert_eq!(o.shape(), (6, 6));
        assert_eq!(o.transpose(), o);
        assert_ne!(o.adjoint(), o);
    }

    #[test]
    fn polynomial_small_m() {
        let pair = random_skew_adjoint(3, 9).unwrap();
        let spec = BlockHessianSpec::new(2, pair.w.clone()).unwrap();
        assert!((det_via_polynomial(&spec) - c(8.0, 0.0)).norm() < 1e-12);
        // m = 3: P = 3I − W², eigenvalue 3 + λ² at ±iλ
        let lambda = 0.8;
        let w = DMatrix::from_row_slice(2, 2, &[0.0, lambda, -lambda, 0.0]);
        let p = polynomial_matrix(&BlockHessianSpec::new(3, w).unwrap());
        assert!((p - DMatrix::identity(2, 2) * (3.0 + lambda * lambda)).norm() < 1e-14);
        assert_eq!(pair_factor(3, lambda), 3.0 + lambda * lambda);
        let direct = ((1.0 + lambda).powi(3) - (1.0 - lambda).powi(3)) / (2.0 * lambda);
        assert!((pair_factor(3, lambda) - direct).abs() < 1e-14);
    }

    #[test]
    fn polynomial_matches_direct() {
        for d in 1..=4 {
            for m in 2..=6 {
                for seed in 0..3 {
                    let pair = random_skew_adjoint(d, 100 * d as u64 + seed).unwrap();
                    let spec = BlockHessianSpec::new(m, pair.w).unwrap();
                    let direct = det_direct(&spec);
                    let poly = det_via_polynomial(&spec);
                    assert!((direct - poly).norm() < 1e-9 * direct.norm(), "d={d} m={m}");
                    assert!(direct.im.abs() < 1e-9 * direct.norm() && direct.re > 0.0);
                }
            }
        }
    }

    #[test]
    fn eigenvalue_product_matches_direct() {
        for d in 1..=4 {
            for m in 2..=6 {
                let pair = random_skew_adjoint(d, 7 + d as u64).unwrap();
                let lambdas = lambda_spectrum(&pair).unwrap();
                let spec = BlockHessianSpec::new(m, pair.w).unwrap();
                let direct = det_direct(&spec).re.sqrt();
                let product = eigenvalue_product(m, d, &lambdas).unwrap();
                assert!((direct - product).abs() < 1e-9 * direct, "d={d} m={m}");
            }
        }
    }

    #[test]
    fn closed_forms() {
        let iso = class(ClassTag::Isotropic);
        for d in 1..=3 {
            let cf = det_closed_form(2, 3, d, &iso).unwrap();
            assert!((cf.sqrt_det - 2f64.powf(d as f64 / 2.0)).abs() < 1e-14);
        }
        let cf = det_closed_form(5, 1, 1, &class(ClassTag::Lagrangian)).unwrap();
        assert!((cf.sqrt_det - 5f64.sqrt()).abs() < 1e-14);
        assert!((cf.unified - 4.0 / 5f64.sqrt()).abs() < 1e-14);

        // co-isotropic d = 2n with W² = −I
        let n = 2;
        let w = DMatrix::from_row_slice(4, 4, &[
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, -1.0, 0.0,
        ]);
        let pair = MetricPair::from_forms(DMatrix::identity(4, 4), w.clone()).unwrap();
        let cls = classify(&pair, n, 4, 1e-8).unwrap();
        for m in 2..=5 {
            let cf = det_closed_form(m, n, 4, &cls).unwrap();
            let direct = det_direct(&BlockHessianSpec::new(m, w.clone()).unwrap()).re.sqrt();
            assert!((cf.sqrt_det - direct).abs() < 1e-9 * direct, "m={m}");
            let unified = 2f64.powf(4.0 * (m - 1) as f64 / 2.0) / direct;
            assert!((cf.unified - unified).abs() < 1e-9 * unified);
        }
        assert_eq!(det_closed_form(2, n, 4, &cls).unwrap().sqrt_det, 4.0);
        assert!(matches!(
            det_closed_form(3, 2, 2, &class(ClassTag::Neither)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn random_pairs_are_skew_adjoint_and_seeded() {
        let a = random_skew_adjoint(4, 11).unwrap();
        let b = random_skew_adjoint(4, 11).unwrap();
        assert_eq!(a, b);
        let skew = &a.g * &a.w + a.w.transpose() * &a.g;
        assert!(skew.norm() < 1e-9);
        assert_ne!(a, random_skew_adjoint(4, 12).unwrap());
    }
}
