//! Bergman metric on the ball, the pulled-back pair (G, H) on a charted
//! submanifold, and the isotropic / co-isotropic classification of W = G⁻¹H.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bergman::BallPoint;
use crate::error::{domain, Error, Result};
use crate::linalg;

/// Default central-difference step for charts without an analytic Jacobian.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Default tolerance on λ values when classifying.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-4;

pub type ChartFn = Arc<dyn Fn(&[f64]) -> Vec<Complex64> + Send + Sync>;
/// Returns the d columns ∂_jγ, each an n-vector.
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<Complex64>> + Send + Sync>;

/// The Bergman Hermitian metric b_jk(p) = δ_jk/(1−|p|²) + conj(p_j)p_k/(1−|p|²)².
pub fn ambient_metric(p: &BallPoint) -> DMatrix<Complex64> {
    let n = p.dim();
    let s = 1.0 - p.norm_sq();
    let z = p.coords();
    DMatrix::from_fn(n, n, |j, k| {
        let diag = if j == k { 1.0 / s } else { 0.0 };
        Complex64::new(diag, 0.0) + z[j].conj() * z[k] / (s * s)
    })
}

/// A d-dimensional real submanifold of B_n given by a chart on (0,1)^d.
#[derive(Clone)]
pub struct ChartedSubmanifold {
    name: String,
    n: usize,
    d: usize,
    chart: ChartFn,
    jacobian: Option<JacobianFn>,
    fd_step: f64,
}

impl fmt::Debug for ChartedSubmanifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartedSubmanifold")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("d", &self.d)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl ChartedSubmanifold {
    /// A chart without analytic Jacobian; derivatives use central differences.
    pub fn new(name: impl Into<String>, n: usize, d: usize, chart: ChartFn) -> Result<Self> {
        if n == 0 || d == 0 {
            return domain("chart dimensions must be positive");
        }
        if d > 2 * n {
            return domain(format!("a submanifold of B_{n} has dimension at most {}, got {d}", 2 * n));
        }
        Ok(Self {
            name: name.into(),
            n,
            d,
            chart,
            jacobian: None,
            fd_step: DEFAULT_FD_STEP,
        })
    }

    pub fn with_jacobian(mut self, jacobian: JacobianFn) -> Self {
        self.jacobian = Some(jacobian);
        self
    }

    /// Drop any analytic Jacobian so that finite differences are used.
    pub fn without_jacobian(mut self) -> Self {
        self.jacobian = None;
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return domain("finite-difference step must be positive");
        }
        self.fd_step = h;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    fn check_t(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.d {
            return domain(format!("chart point has {} coordinates, expected {}", t.len(), self.d));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return domain("chart point must be finite");
        }
        Ok(())
    }

    /// γ(t) as a point of the ball.
    pub fn point(&self, t: &[f64]) -> Result<BallPoint> {
        self.check_t(t)?;
        let z = (self.chart)(t);
        if z.len() != self.n {
            return Err(Error::Contract(format!(
                "chart '{}' returned {} coordinates, expected {}",
                self.name,
                z.len(),
                self.n
            )));
        }
        BallPoint::new(z)
    }

    /// The d columns ∂_jγ(t).
    pub fn jacobian(&self, t: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.check_t(t)?;
        if let Some(jac) = &self.jacobian {
            return Ok(jac(t));
        }
        let h = self.fd_step;
        let mut cols = Vec::with_capacity(self.d);
        let mut tp = t.to_vec();
        for j in 0..self.d {
            tp[j] = t[j] + h;
            let plus = (self.chart)(&tp);
            tp[j] = t[j] - h;
            let minus = (self.chart)(&tp);
            tp[j] = t[j];
            cols.push(
                plus.iter()
                    .zip(&minus)
                    .map(|(p, m)| (p - m) / (2.0 * h))
                    .collect(),
            );
        }
        Ok(cols)
    }

    /// Riemannian volume density √det G at t, so that dσ = density · dt.
    pub fn volume_density(&self, t: &[f64]) -> Result<f64> {
        let pair = pullback_forms(self, t)?;
        let l = linalg::cholesky(&pair.g)?;
        Ok(l.diagonal().iter().product())
    }
}

/// The pulled-back metric G, skew form H and W = G⁻¹H at one chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPair {
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub w: DMatrix<f64>,
}

impl MetricPair {
    /// Assemble from G and H, solving for W. Fails with a rank error when G is
    /// not positive-definite.
    pub fn from_forms(g: DMatrix<f64>, h: DMatrix<f64>) -> Result<Self> {
        if !g.is_square() || g.shape() != h.shape() {
            return domain("G and H must be square of equal size");
        }
        let min_eig = *linalg::symmetric_eigenvalues(&g)?
            .last()
            .expect("non-empty spectrum");
        if !(min_eig > 1e-10) {
            return Err(Error::Rank(format!(
                "pulled-back metric is degenerate (min eigenvalue {min_eig:.3e})"
            )));
        }
        let w = linalg::spd_solve(&g, &h)?;
        Ok(Self { g, h, w })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }
}

/// g_jk + i h_jk = Σ b_ℓr(γ(t)) ∂_jγ_ℓ conj(∂_kγ_r).
pub fn pullback_forms(manifold: &ChartedSubmanifold, t: &[f64]) -> Result<MetricPair> {
    let p = manifold.point(t)?;
    let cols = manifold.jacobian(t)?;
    let b = ambient_metric(&p);
    let d = manifold.d();
    let n = manifold.n();
    let mut g = DMatrix::zeros(d, d);
    let mut h = DMatrix::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                for r in 0..n {
                    acc += b[(l, r)] * cols[j][l] * cols[k][r].conj();
                }
            }
            g[(j, k)] = acc.re;
            h[(j, k)] = acc.im;
        }
    }
    // remove rounding asymmetry so the structural invariants hold exactly
    let g = (&g + g.transpose()) * 0.5;
    let h = (&h - h.transpose()) * 0.5;
    MetricPair::from_forms(g, h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassTag {
    Isotropic,
    CoIsotropic,
    Lagrangian,
    Neither,
}

impl ClassTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::Isotropic => "isotropic",
            ClassTag::CoIsotropic => "co-isotropic",
            ClassTag::Lagrangian => "lagrangian",
            ClassTag::Neither => "neither",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification of a tangent space by the spectrum ±iλ_k of W.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticClass {
    pub tag: ClassTag,
    /// One λ_k ≥ 0 per ±iλ_k pair, descending (⌊d/2⌋ entries).
    pub lambda_spectrum: Vec<f64>,
    /// Number of λ_k at or above the tolerance.
    pub r: usize,
    /// d − 2r: multiplicity of the zero eigenvalue of W.
    pub zero_multiplicity: usize,
}

impl SymplecticClass {
    pub fn is_isotropic(&self) -> bool {
        matches!(self.tag, ClassTag::Isotropic | ClassTag::Lagrangian)
    }

    pub fn is_coisotropic(&self) -> bool {
        matches!(self.tag, ClassTag::CoIsotropic | ClassTag::Lagrangian)
    }
}

/// The λ_k of W = G⁻¹H, from the congruent skew matrix S = L⁻¹HL⁻ᵀ (G = LLᵀ).
///
/// iS is Hermitian with spectrum ±λ_k (plus zeros), so the Hermitian solver
/// gives λ directly and the pairing is read off by matching ends.
pub fn lambda_spectrum(pair: &MetricPair) -> Result<Vec<f64>> {
    let l = linalg::cholesky(&pair.g)?;
    let y = linalg::forward_substitute(&l, &pair.h);
    let s = linalg::forward_substitute(&l, &y.transpose()).transpose();
    let s = (&s - s.transpose()) * 0.5;
    let is = s.map(|x| Complex64::new(0.0, x));
    let nu = linalg::hermitian_eigenvalues(&is)?;
    let d = nu.len();
    Ok((0..d / 2)
        .map(|k| (0.5 * (nu[k] - nu[d - 1 - k])).max(0.0))
        .collect())
}

/// Tag the pair as isotropic, co-isotropic, lagrangian or neither.
pub fn classify(pair: &MetricPair, n: usize, d: usize, tol: f64) -> Result<SymplecticClass> {
    if d == 0 || n == 0 || d > 2 * n {
        return domain(format!("inconsistent dimensions d = {d}, n = {n}"));
    }
    if pair.dim() != d {
        return domain(format!("metric pair has size {}, expected d = {d}", pair.dim()));
    }
    if !(tol > 0.0) {
        return domain("classification tolerance must be positive");
    }
    let lambdas = lambda_spectrum(pair)?;
    let r = lambdas.iter().filter(|&&l| l >= tol).count();
    let isotropic = r == 0;
    let ones = lambdas.iter().filter(|&&l| (l - 1.0).abs() < tol).count();
    let zeros = lambdas.iter().filter(|&&l| l < tol).count();
    let coisotropic = d >= n && ones == d - n && ones + zeros == lambdas.len();
    let tag = match (isotropic, coisotropic) {
        (true, _) if d == n => ClassTag::Lagrangian,
        (true, _) => ClassTag::Isotropic,
        (false, true) => ClassTag::CoIsotropic,
        (false, false) => ClassTag::Neither,
    };
    Ok(SymplecticClass {
        tag,
        lambda_spectrum: lambdas,
        r,
        zero_multiplicity: d - 2 * r,
    })
}
