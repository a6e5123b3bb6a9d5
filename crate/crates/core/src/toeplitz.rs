//! Truncated Toeplitz operators for a circle |z| = r in the disc: the explicit
//! diagonal spectrum for a ≡ 1, the Fourier matrix model for general
//! symbols, the phase Φ, and the composition-trace integral.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bergman::{log_delta_disc, BallPoint};
use crate::error::{domain, Error, Result};
use crate::special::{ln_gamma_unchecked, WeightedModel};

pub use crate::linalg::hermitian_eigenvalues;

const SYMBOL_GRID: usize = 4096;
/// Relative level below which trailing eigenvalues are dropped.
const TAIL_LEVEL: f64 = 1e-14;

/// The symbol a(θ) on the circle.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    ConstantOne,
    /// â_0, â_1, …, â_B with a(θ) = â_0 + 2 Re Σ_{m≥1} â_m e^{2πimθ}; the
    /// negative coefficients are â_{−m} = conj(â_m).
    Fourier(Vec<Complex64>),
}

/// The worked example: Γ = r·S¹ in the disc with weight α and symbol a.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSymbolModel {
    r: f64,
    alpha: f64,
    symbol: Symbol,
    symbol_sup: f64,
}

impl CircleSymbolModel {
    pub fn new(r: f64, alpha: f64, symbol: Symbol) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return domain(format!("radius must lie in (0, 1), got {r}"));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return domain(format!("alpha must be finite and > -1, got {alpha}"));
        }
        let symbol_sup = match &symbol {
            Symbol::ConstantOne => 1.0,
            Symbol::Fourier(coeffs) => {
                if coeffs.is_empty() {
                    return domain("a Fourier symbol needs at least the mean coefficient");
                }
                if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return domain("Fourier coefficients must be finite");
                }
                if coeffs[0].im.abs() > 1e-14 * coeffs[0].norm().max(1.0) {
                    return domain("the mean coefficient of a real symbol must be real");
                }
                let values: Vec<f64> = (0..SYMBOL_GRID)
                    .map(|k| fourier_value(coeffs, k as f64 / SYMBOL_GRID as f64))
                    .collect();
                let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                let scale = coeffs.iter().map(|c| c.norm()).sum::<f64>();
                if min < -1e-12 * scale {
                    return domain(format!("symbol is negative somewhere (min {min:.3e})"));
                }
                values.into_iter().fold(0.0, f64::max)
            }
        };
        Ok(Self {
            r,
            alpha,
            symbol,
            symbol_sup,
        })
    }

    pub fn constant_one(r: f64, alpha: f64) -> Result<Self> {
        Self::new(r, alpha, Symbol::ConstantOne)
    }

    /// The same circle and symbol with another weight.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return domain(format!("alpha must be finite and > -1, got {alpha}"));
        }
        Ok(Self {
            alpha,
            ..self.clone()
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn is_constant_one(&self) -> bool {
        self.symbol == Symbol::ConstantOne
    }

    /// a(θ) for θ ∈ [0, 1).
    pub fn symbol_value(&self, theta: f64) -> f64 {
        match &self.symbol {
            Symbol::ConstantOne => 1.0,
            Symbol::Fourier(c) => fourier_value(c, theta),
        }
    }

    /// â_m = ∫₀¹ a(θ) e^{−2πimθ} dθ.
    pub fn fourier_coefficient(&self, m: i64) -> Complex64 {
        match &self.symbol {
            Symbol::ConstantOne => Complex64::new(if m == 0 { 1.0 } else { 0.0 }, 0.0),
            Symbol::Fourier(c) => {
                let k = m.unsigned_abs() as usize;
                match c.get(k) {
                    None => Complex64::new(0.0, 0.0),
                    Some(&v) if m == 0 => Complex64::new(v.re, 0.0),
                    Some(&v) if m > 0 => v,
                    Some(&v) => v.conj(),
                }
            }
        }
    }

    /// sup a over the 4096-point grid (exactly 1 for a ≡ 1).
    pub fn symbol_sup(&self) -> f64 {
        self.symbol_sup
    }

    /// 1/(1−r²)², the boundary factor (1−|ξ|²)^{−(n+1)} on the circle.
    pub fn boundary_factor(&self) -> f64 {
        1.0 / (1.0 - self.r * self.r).powi(2)
    }

    /// sup a(θ)/(1−r²)²: the top of the limiting spectrum.
    pub fn norm_bound(&self) -> f64 {
        self.symbol_sup * self.boundary_factor()
    }

    /// dσ/dθ = 2πr/(1−r²).
    pub fn arc_density(&self) -> f64 {
        2.0 * PI * self.r / (1.0 - self.r * self.r)
    }

    /// Index of the largest diagonal entry, ⌊(α+1)r²/(1−r²)⌋.
    pub fn m_star(&self) -> usize {
        m_star(self.r, self.alpha)
    }

    fn weighted_model(&self) -> WeightedModel {
        WeightedModel::new(1, self.alpha).expect("alpha validated at construction")
    }
}

fn fourier_value(coeffs: &[Complex64], theta: f64) -> f64 {
    let mut v = coeffs[0].re;
    for (m, c) in coeffs.iter().enumerate().skip(1) {
        v += 2.0 * (c * Complex64::from_polar(1.0, 2.0 * PI * m as f64 * theta)).re;
    }
    v
}

/// ⌊(α+1)r²/(1−r²)⌋, snapping to the nearest integer when the quotient is
/// within rounding of one (so r = 1/√2 gives α+1 as in exact arithmetic).
pub fn m_star(r: f64, alpha: f64) -> usize {
    let r2 = r * r;
    let q = (alpha + 1.0) * r2 / (1.0 - r2);
    let nearest = q.round();
    let m = if (q - nearest).abs() <= 1e-12 * q.max(1.0) {
        nearest
    } else {
        q.floor()
    };
    m.max(0.0) as usize
}

/// 1/√(2πα) in the circle case; in general n!/(2^{d′/2}π^{d/2})·α^{−n+d/2}.
pub fn normalization_factor(n: usize, d: usize, d_prime: usize, alpha: f64) -> f64 {
    let ln = ln_gamma_unchecked(n as f64 + 1.0)
        - 0.5 * d_prime as f64 * 2f64.ln()
        - 0.5 * d as f64 * PI.ln()
        + (-(n as f64) + 0.5 * d as f64) * alpha.ln();
    ln.exp()
}

/// Spectrum of a truncated operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTruncation {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// λ_0, …, λ_M in basis order (explicit diagonal case only).
    pub by_index: Option<Vec<f64>>,
    /// Largest basis index kept.
    pub cutoff: usize,
    /// Upper bound on the sum of the omitted eigenvalues.
    pub tail_estimate: f64,
    pub alpha: f64,
    /// Whether the T̂ normalization is applied.
    pub normalized: bool,
    /// sup a/(1−r²)² of the model (same scaling as the symbol, not α-scaled).
    pub norm_bound: f64,
}

impl SpectrumTruncation {
    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Basis index of the largest eigenvalue; among values tied to within
    /// 1e-12 relative the largest index wins. Explicit spectra only.
    pub fn argmax_index(&self) -> Option<usize> {
        let values = self.by_index.as_ref()?;
        let max = values.iter().copied().fold(0.0, f64::max);
        values.iter().rposition(|&v| v >= max * (1.0 - 1e-12))
    }

    /// Σ φ(λ) over the kept eigenvalues, summed in ascending order.
    pub fn trace_of<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        self.eigenvalues.iter().rev().map(|&l| phi(l)).sum()
    }
}

/// Default explicit-path cutoff m* + ⌈12(√(α+1)·r/(1−r²) + 50)⌉.
pub fn default_cutoff(model: &CircleSymbolModel) -> usize {
    let r = model.r();
    let spread = (model.alpha() + 1.0).sqrt() * r / (1.0 - r * r);
    model.m_star() + (12.0 * (spread + 50.0)).ceil() as usize
}

/// ln of the normalized eigenvalue λ_m for a ≡ 1.
fn log_explicit_eigenvalue(r: f64, alpha: f64, m: usize) -> f64 {
    let mf = m as f64;
    0.5 * (2.0 * PI / alpha).ln() + (alpha - 1.0) * (-r * r).ln_1p() + ln_gamma_unchecked(alpha + mf + 2.0)
        - ln_gamma_unchecked(alpha + 1.0)
        - ln_gamma_unchecked(mf + 1.0)
        + (2.0 * mf + 1.0) * r.ln()
}

/// λ_m/λ_{m−1} = (α+1)r²/m + r².
fn explicit_ratio(r: f64, alpha: f64, m: usize) -> f64 {
    let r2 = r * r;
    (alpha + 1.0) * r2 / m as f64 + r2
}

/// Eigenvalues of T̂ = T/√(2πα) for a ≡ 1:
/// λ_m = √(2π/α)(1−r²)^{α−1} Γ(α+m+2)/(Γ(α+1) m!) r^{2m+1}.
///
/// λ_{m*} is evaluated in log space and its neighbours by the exact quotient
/// recurrence, so adjacent values are consistent to a few ulps. With
/// `cutoff = None` the default cutoff is used and then extended until
/// λ_M < 1e-14·λ_max.
pub fn explicit_eigenvalues(model: &CircleSymbolModel, cutoff: Option<usize>) -> Result<SpectrumTruncation> {
    if !model.is_constant_one() {
        return Err(Error::Unsupported("the explicit spectrum requires a ≡ 1".into()));
    }
    let (r, alpha) = (model.r(), model.alpha());
    if !(alpha > 0.0) {
        return domain(format!("the normalized spectrum needs alpha > 0, got {alpha}"));
    }
    let m_star = model.m_star();
    let peak = log_explicit_eigenvalue(r, alpha, m_star).exp();
    if !peak.is_finite() {
        return Err(Error::Accuracy {
            what: "largest eigenvalue overflowed".into(),
            estimate: peak,
            target: f64::MAX,
        });
    }

    let mut below = vec![0.0; m_star + 1];
    below[m_star] = peak;
    for m in (0..m_star).rev() {
        below[m] = below[m + 1] / explicit_ratio(r, alpha, m + 1);
    }
    let mut values = below;
    let next_value = |values: &Vec<f64>| {
        let m = values.len();
        values[m - 1] * explicit_ratio(r, alpha, m)
    };
    match cutoff {
        Some(limit) => {
            while values.len() <= limit {
                let v = next_value(&values);
                values.push(v);
            }
            values.truncate(limit + 1);
        }
        None => {
            let target = default_cutoff(model);
            while values.len() <= target || values[values.len() - 1] >= TAIL_LEVEL * peak {
                let v = next_value(&values);
                values.push(v);
            }
        }
    }
    let cut = values.len() - 1;

    let rho = explicit_ratio(r, alpha, cut + 1);
    let tail_estimate = if rho < 1.0 {
        values[cut] * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    let mut eigenvalues = values.clone();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(SpectrumTruncation {
        eigenvalues,
        by_index: Some(values),
        cutoff: cut,
        tail_estimate,
        alpha,
        normalized: true,
        norm_bound: model.norm_bound(),
    })
}

/// ln of the unnormalized diagonal envelope c_α(1−r²)^α·(2πr/(1−r²))·δ_m² r^{2m}.
fn log_envelope(model: &CircleSymbolModel, m: usize) -> f64 {
    let (r, alpha) = (model.r(), model.alpha());
    model.weighted_model().log_c_alpha()
        + alpha * (-r * r).ln_1p()
        + model.arc_density().ln()
        + 2.0 * log_delta_disc(alpha, m as u64)
        + 2.0 * m as f64 * r.ln()
}

/// Matrix-path cutoff: the first index past m* where the diagonal envelope
/// drops below 1e-14 of its peak.
pub fn matrix_cutoff(model: &CircleSymbolModel) -> usize {
    let m_star = model.m_star();
    let peak = log_envelope(model, m_star);
    let mut m = m_star;
    while log_envelope(model, m) - peak >= TAIL_LEVEL.ln() {
        m += 1;
    }
    m
}

/// The (M+1)×(M+1) matrix ⟨T e_k, e_j⟩ of the unnormalized operator in the
/// orthonormal monomial basis:
/// c_α(1−r²)^α·(2πr/(1−r²))·δ_jδ_k r^{j+k}·â_{j−k}.
pub fn matrix_elements(model: &CircleSymbolModel, cutoff: usize) -> DMatrix<Complex64> {
    let size = cutoff + 1;
    let half: Vec<f64> = (0..size).map(|m| 0.5 * log_envelope(model, m)).collect();
    let bandwidth = match model.symbol() {
        Symbol::ConstantOne => 0,
        Symbol::Fourier(c) => c.len() - 1,
    };
    let mut a = DMatrix::<Complex64>::zeros(size, size);
    for j in 0..size {
        let lo = j.saturating_sub(bandwidth);
        let hi = (j + bandwidth).min(size - 1);
        for k in lo..=hi {
            let coeff = model.fourier_coefficient(j as i64 - k as i64);
            if coeff.norm() == 0.0 {
                continue;
            }
            a[(j, k)] = coeff * (half[j] + half[k]).exp();
        }
    }
    a
}

/// Spectrum of T̂ from the matrix model, via the Hermitian eigensolver.
pub fn matrix_spectrum(model: &CircleSymbolModel, cutoff: Option<usize>) -> Result<SpectrumTruncation> {
    let alpha = model.alpha();
    if !(alpha > 0.0) {
        return domain(format!("the normalized spectrum needs alpha > 0, got {alpha}"));
    }
    let cut = cutoff.unwrap_or_else(|| matrix_cutoff(model));
    let a = matrix_elements(model, cut);
    let scale = normalization_factor(1, 1, 1, alpha);
    let eigenvalues: Vec<f64> = hermitian_eigenvalues(&a)?.into_iter().map(|l| l * scale).collect();
    // trace of the omitted block of the compression
    let mean = model.fourier_coefficient(0).re;
    let mut tail = 0.0;
    let mut m = cut + 1;
    loop {
        let term = log_envelope(model, m).exp() * scale * mean;
        tail += term;
        if term <= 1e-17 * tail || term == 0.0 {
            break;
        }
        m += 1;
    }
    Ok(SpectrumTruncation {
        eigenvalues,
        by_index: None,
        cutoff: cut,
        tail_estimate: tail,
        alpha,
        normalized: true,
        norm_bound: model.norm_bound(),
    })
}

/// The normalized spectrum by the cheapest available route.
pub fn spectrum(model: &CircleSymbolModel) -> Result<SpectrumTruncation> {
    if model.is_constant_one() {
        explicit_eigenvalues(model, None)
    } else {
        matrix_spectrum(model, None)
    }
}

/// Φ = i Σ_j Log((1−⟨ξ_j,ξ_{j+1}⟩)/(1−|ξ_j|²)), indices cyclic.
pub fn phase_value(points: &[BallPoint]) -> Result<Complex64> {
    if points.len() < 2 {
        return domain("the phase needs at least two points");
    }
    let n = points[0].dim();
    if points.iter().any(|p| p.dim() != n) {
        return domain("all points must live in the same ball");
    }
    let sum: Complex64 = (0..points.len())
        .map(|j| {
            let (a, b) = (&points[j], &points[(j + 1) % points.len()]);
            ((Complex64::new(1.0, 0.0) - a.inner(b)) / (1.0 - a.norm_sq())).ln()
        })
        .sum();
    Ok(Complex64::new(0.0, 1.0) * sum)
}

/// ∏_j (1 − d_j d_{j+1})/(1 − d_j²), indices cyclic; at least 1.
pub fn label_product(d: &[f64]) -> Result<f64> {
    if d.len() < 2 {
        return domain("the product needs at least two values");
    }
    if d.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return domain("values must lie in (0, 1)");
    }
    Ok((0..d.len())
        .map(|j| (1.0 - d[j] * d[(j + 1) % d.len()]) / (1.0 - d[j] * d[j]))
        .product())
}

/// The integrand of the composition trace at θ ∈ [0,1)^m, without the
/// c_α^m and dσ/dθ factors:
/// ∏_j ((1−|ξ_j|²)/(1−⟨ξ_j,ξ_{j+1}⟩))^α · a(ξ_j)/(1−⟨ξ_j,ξ_{j+1}⟩)².
pub fn composition_integrand(model: &CircleSymbolModel, thetas: &[f64]) -> Complex64 {
    let m = thetas.len();
    (0..m)
        .map(|j| pair_factor(model, thetas[j], thetas[(j + 1) % m]))
        .product()
}

fn pair_factor(model: &CircleSymbolModel, t1: f64, t2: f64) -> Complex64 {
    kernel_factor(model, t1 - t2) * model.symbol_value(t1)
}

/// ((1−r²)/(1−r²e^{2πiΔ}))^α / (1−r²e^{2πiΔ})², with the principal Log.
fn kernel_factor(model: &CircleSymbolModel, delta: f64) -> Complex64 {
    let r2 = model.r() * model.r();
    let alpha = model.alpha();
    let inner = Complex64::from_polar(r2, 2.0 * PI * delta);
    let log_gap = (Complex64::new(1.0, 0.0) - inner).ln();
    (Complex64::new(alpha * (-r2).ln_1p(), 0.0) - (alpha + 2.0) * log_gap).exp()
}

/// Result of the composition-trace quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceQuadrature {
    /// Unnormalized Tr(T^m).
    pub value: f64,
    /// Imaginary part left by the quadrature (should vanish).
    pub imag: f64,
    /// Nodes per axis in the final rule.
    pub nodes: usize,
    /// Relative change between the last two node counts.
    pub rel_change: f64,
    /// False when the change exceeded 1e-6 (the value is then a warning-grade
    /// estimate).
    pub resolved: bool,
}

const TRACE_START_NODES: usize = 32;
const TRACE_MAX_NODES: usize = 1024;
const TRACE_DOUBLING_TOL: f64 = 1e-7;
const TRACE_WARN_TOL: f64 = 1e-6;

/// Tr(T^m) = c_α^m ∫_{Γ^m} ∏_j [K^α(ξ_j,ξ_{j+1}) a(ξ_j)(1−|ξ_j|²)^α] dσ^m by the
/// tensor periodic trapezoid rule, with node doubling.
///
/// On N nodes the m-fold sum is Tr(F^m)/N^m for the N×N kernel matrix F, so
/// the cost is one or two dense products.
pub fn composition_trace_quadrature(model: &CircleSymbolModel, m: usize) -> Result<TraceQuadrature> {
    if !(2..=3).contains(&m) {
        return Err(Error::Unsupported(format!(
            "composition-trace quadrature is provided for m = 2 or 3, got {m}"
        )));
    }
    let log_scale = m as f64 * (model.weighted_model().log_c_alpha() + model.arc_density().ln());
    let mut nodes = TRACE_START_NODES;
    let mut prev = trace_on_grid(model, m, nodes);
    let mut rel_change = f64::INFINITY;
    while nodes < TRACE_MAX_NODES {
        nodes *= 2;
        let next = trace_on_grid(model, m, nodes);
        rel_change = (next - prev).norm() / next.norm();
        prev = next;
        if rel_change < TRACE_DOUBLING_TOL {
            break;
        }
    }
    let value = prev * log_scale.exp();
    Ok(TraceQuadrature {
        value: value.re,
        imag: value.im,
        nodes,
        rel_change,
        resolved: rel_change <= TRACE_WARN_TOL,
    })
}

/// (1/N^m)·Tr(F^m) with F_ik = pair_factor(θ_i, θ_k).
fn trace_on_grid(model: &CircleSymbolModel, m: usize, n: usize) -> Complex64 {
    let h = 1.0 / n as f64;
    // F depends on θ_i − θ_k only through the kernel, so one row of kernel
    // values serves every row
    let kernel_row: Vec<Complex64> = (0..n).map(|d| kernel_factor(model, d as f64 * h)).collect();
    let symbol: Vec<f64> = (0..n).map(|i| model.symbol_value(i as f64 * h)).collect();
    let f = |i: usize, k: usize| kernel_row[(i + n - k) % n] * symbol[i];
    let per_row: Vec<Complex64> = match m {
        2 => (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|k| f(i, k) * f(k, i)).sum())
            .collect(),
        _ => (0..n)
            .into_par_iter()
            .map(|i| {
                let row: Vec<Complex64> = (0..n).map(|k| f(i, k)).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    let mut f2 = Complex64::new(0.0, 0.0);
                    for (k, &rk) in row.iter().enumerate() {
                        f2 += rk * f(k, l);
                    }
                    acc += f2 * f(l, i);
                }
                acc
            })
            .collect(),
    };
    per_row.into_iter().sum::<Complex64>() * h.powi(m as i32)
}

/// Σ over the kept spectrum of λ^m, unnormalized (for comparison with the
/// composition trace).
pub fn unnormalized_power_sum(spectrum: &SpectrumTruncation, m: usize) -> f64 {
    let scale = if spectrum.normalized {
        1.0 / normalization_factor(1, 1, 1, spectrum.alpha)
    } else {
        1.0
    };
    spectrum.trace_of(|l| (l * scale).powi(m as i32))
}
