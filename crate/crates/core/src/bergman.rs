//! Weighted Bergman kernel on the unit ball B_n and the orthonormal monomial
//! basis of A²_α(D).
//!
//! Complex powers use the principal logarithm. For z, w in the ball,
//! |⟨z,w⟩| < 1, so 1 - ⟨z,w⟩ has positive real part and never meets the
//! branch cut (-∞, 0].

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::special::{ln_gamma_unchecked, WeightedModel};

/// A point of the open unit ball in Cⁿ, with |z|² cached.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<Complex64>,
    norm_sq: f64,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return domain("ball point needs at least one coordinate");
        }
        let norm_sq: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if !norm_sq.is_finite() || norm_sq >= 1.0 {
            return domain(format!("point is not inside the unit ball (|z|² = {norm_sq})"));
        }
        Ok(Self { coords, norm_sq })
    }

    /// A point of the disc (n = 1).
    pub fn disc(z: Complex64) -> Result<Self> {
        Self::new(vec![z])
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![Complex64::new(0.0, 0.0); n],
            norm_sq: 0.0,
        }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// ⟨z, w⟩ = Σ z_j · conj(w_j).
    pub fn inner(&self, w: &BallPoint) -> Complex64 {
        self.coords
            .iter()
            .zip(&w.coords)
            .map(|(a, b)| a * b.conj())
            .sum()
    }
}

fn check_dims(model: &WeightedModel, z: &BallPoint, w: &BallPoint) {
    assert!(
        z.dim() == model.n() && w.dim() == model.n(),
        "ball points must live in C^{}",
        model.n()
    );
}

/// Principal Log(1 - ⟨z, w⟩).
pub(crate) fn log_one_minus_inner(z: &BallPoint, w: &BallPoint) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z.inner(w)).ln()
}

/// K^α(z, w) = (1 - ⟨z,w⟩)^{-(n+1+α)}.
pub fn kernel(model: &WeightedModel, z: &BallPoint, w: &BallPoint) -> Complex64 {
    check_dims(model, z, w);
    (-model.kernel_exponent() * log_one_minus_inner(z, w)).exp()
}

/// k_w(z) = K^α(z, w) / √K^α(w, w) = (√(1-|w|²) / (1 - ⟨z,w⟩))^{n+1+α}.
pub fn normalized_kernel(model: &WeightedModel, z: &BallPoint, w: &BallPoint) -> Complex64 {
    check_dims(model, z, w);
    let log_ratio = Complex64::new(0.5 * (-w.norm_sq()).ln_1p(), 0.0) - log_one_minus_inner(z, w);
    (model.kernel_exponent() * log_ratio).exp()
}

/// Normalization δ_m of the orthonormal basis e_m(z) = δ_m z^m of A²_α(D),
/// stored as ln δ_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisConstant {
    pub m: u64,
    pub log_delta: f64,
}

impl BasisConstant {
    pub fn delta(&self) -> f64 {
        self.log_delta.exp()
    }
}

/// δ_m = √(Γ(m+α+2) / (m! Γ(α+2))) for the disc.
pub fn basis_constant(model: &WeightedModel, m: u64) -> Result<BasisConstant> {
    if model.n() != 1 {
        return Err(Error::Unsupported(format!(
            "monomial basis constants are only provided for the disc (n = 1), got n = {}",
            model.n()
        )));
    }
    Ok(BasisConstant {
        m,
        log_delta: log_delta_disc(model.alpha(), m),
    })
}

pub(crate) fn log_delta_disc(alpha: f64, m: u64) -> f64 {
    let mf = m as f64;
    0.5 * (ln_gamma_unchecked(mf + alpha + 2.0)
        - ln_gamma_unchecked(mf + 1.0)
        - ln_gamma_unchecked(alpha + 2.0))
}
