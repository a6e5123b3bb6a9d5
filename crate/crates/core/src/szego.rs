//! The Q_ε transform, Szegő-limit right-hand sides, eigenvalue counts and
//! density, Schatten limits, and α-scans for the circle example.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::geometry::ChartedSubmanifold;
use crate::quadrature::{integrate, integrate_breakpoints, periodic_trapezoid_converged};
use crate::special::ln_gamma_unchecked;
use crate::toeplitz::{self, m_star, CircleSymbolModel, SpectrumTruncation};

/// A test function φ with φ(s)/s^p continuous on [0, ∞) for its exponent p.
#[derive(Clone)]
pub enum Phi {
    /// s^p, p > 0.
    Power(f64),
    /// Σ_k c_k s^k for k = 1, 2, … (no constant term).
    Poly(Vec<f64>),
    /// A caller-supplied function with its declared exponent p ∈ (0, 1].
    Custom {
        label: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        exponent: f64,
    },
}

impl fmt::Debug for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phi({})", self.label())
    }
}

impl Phi {
    /// Parse `pow:<p>` or `poly:<c1,c2,...>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("phi spec '{spec}' must look like pow:<p> or poly:<c1,...>")))?;
        let number = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("'{s}' is not a number in phi spec '{spec}'")))
        };
        let phi = match kind.trim() {
            "pow" => Phi::Power(number(rest)?),
            "poly" => Phi::Poly(rest.split(',').map(number).collect::<Result<_>>()?),
            other => return domain(format!("unknown phi kind '{other}' (expected pow or poly)")),
        };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Phi::Power(p) if !(*p > 0.0 && p.is_finite()) => domain(format!("power must be positive, got {p}")),
            Phi::Poly(c) if c.is_empty() || c.iter().all(|&x| x == 0.0) => {
                domain("polynomial needs a nonzero coefficient")
            }
            Phi::Poly(c) if c.iter().any(|x| !x.is_finite()) => domain("polynomial coefficients must be finite"),
            Phi::Custom { exponent, .. } if !(*exponent > 0.0 && *exponent <= 1.0) => {
                domain(format!("declared exponent must lie in (0, 1], got {exponent}"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Phi::Power(p) => s.powf(*p),
            Phi::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| (acc + ck) * s),
            Phi::Custom { f, .. } => f(s),
        }
    }

    /// The exponent p with φ(s) = O(s^p) at 0.
    pub fn exponent(&self) -> f64 {
        match self {
            Phi::Power(p) => *p,
            Phi::Poly(c) => c.iter().position(|&x| x != 0.0).map_or(1.0, |k| (k + 1) as f64),
            Phi::Custom { exponent, .. } => *exponent,
        }
    }

    /// Q_ε(φ)(t) from the monomial rule Q_ε(s^p) = t^p/p^ε, when φ is a
    /// power or polynomial.
    pub fn q_closed_form(&self, epsilon: f64, t: f64) -> Option<f64> {
        match self {
            Phi::Power(p) => Some(t.powf(*p) / p.powf(epsilon)),
            Phi::Poly(c) => Some(
                c.iter()
                    .enumerate()
                    .map(|(k, &ck)| {
                        let deg = (k + 1) as f64;
                        ck * t.powf(deg) / deg.powf(epsilon)
                    })
                    .sum(),
            ),
            Phi::Custom { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Phi::Power(p) => format!("pow:{p}"),
            Phi::Poly(c) => format!(
                "poly:{}",
                c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            Phi::Custom { label, .. } => label.clone(),
        }
    }
}

/// Q_ε applied to φ.
#[derive(Debug, Clone)]
pub struct QTransformSpec {
    pub epsilon: f64,
    /// Cap on adaptive Gauss–Kronrod panels.
    pub max_panels: usize,
    pub phi: Phi,
}

impl QTransformSpec {
    pub fn new(epsilon: f64, phi: Phi) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return domain(format!("epsilon must be finite and >= 0, got {epsilon}"));
        }
        phi.validate()?;
        Ok(Self {
            epsilon,
            max_panels: 4000,
            phi,
        })
    }
}

/// Q_ε(φ)(t) = (1/Γ(ε))∫₀ᵗ φ(s)(ln(t/s))^{ε−1} ds/s.
///
/// With u = ln(t/s) and v = u^ε this is (1/Γ(ε+1))∫₀^∞ φ(t e^{−v^{1/ε}}) dv,
/// whose integrand is bounded; the v-range is cut where e^{−p·u} is
/// negligible for the exponent p of φ.
pub fn q_transform(spec: &QTransformSpec, t: f64) -> Result<f64> {
    let eps = spec.epsilon;
    if !(eps >= 0.0) {
        return domain(format!("epsilon must be >= 0, got {eps}"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("Q transform needs t > 0, got {t}"));
    }
    if eps == 0.0 {
        return Ok(spec.phi.eval(t));
    }
    let p = spec.phi.exponent();
    let mut u_max = (45.0 + 10.0 * eps) / p;
    // keep t·e^{−u} representable
    u_max = u_max.min(t.ln() + 690.0).max(1.0);
    let mut breaks = vec![0.0];
    let mut u = u_max / 1024.0;
    while u < u_max {
        breaks.push(u.powf(eps));
        u *= 2.0;
    }
    breaks.push(u_max.powf(eps));
    let phi = &spec.phi;
    let q = integrate_breakpoints(
        |v: f64| phi.eval(t * (-v.powf(1.0 / eps)).exp()),
        &breaks,
        1e-13,
        0.0,
        spec.max_panels,
    )
    .map_err(|e| match e {
        Error::Accuracy { estimate, target, .. } => Error::Accuracy {
            what: format!("Q transform (ε = {eps}, t = {t}, φ = {}) did not converge", phi.label()),
            estimate,
            target,
        },
        other => other,
    })?;
    Ok(q.value / ln_gamma_unchecked(eps + 1.0).exp())
}

/// Right-hand side of the Szegő limit for the circle:
/// (1/√2)·∫₀¹ Q_{1/2}(φ)(a(θ)/(1−r²)²) dθ·2πr/(1−r²).
pub fn szego_rhs(model: &CircleSymbolModel, phi: &Phi) -> Result<f64> {
    let spec = QTransformSpec::new(0.5, phi.clone())?;
    let b = model.boundary_factor();
    let mean = if model.is_constant_one() {
        q_transform(&spec, b)?
    } else {
        let values = |theta: f64| {
            let x = model.symbol_value(theta) * b;
            if x > 0.0 {
                q_transform(&spec, x)
            } else {
                Ok(0.0)
            }
        };
        // evaluate once to surface errors, then integrate
        values(0.0)?;
        let (v, _) = periodic_trapezoid_converged(|t| values(t).unwrap_or(f64::NAN), 64, 4096, 1e-10)?;
        if !v.is_finite() {
            return Err(Error::Accuracy {
                what: "Q transform failed inside the Szegő integral".into(),
                estimate: f64::NAN,
                target: 1e-10,
            });
        }
        v
    };
    Ok(mean * model.arc_density() / SQRT_2)
}

/// Szegő right-hand side for a curve γ: (0,1) → B_n (d = 1, so d′ = 1):
/// (1/√2)∫₀¹ Q_{1/2}(φ)(a(t)(1−|γ(t)|²)^{−(n+1)})·|γ′(t)|_b dt.
pub fn szego_rhs_curve(
    chart: &ChartedSubmanifold,
    symbol: &(dyn Fn(f64) -> f64 + Sync),
    phi: &Phi,
) -> Result<f64> {
    if chart.d() != 1 {
        return Err(Error::Unsupported(format!(
            "the chart Szegő integral is provided for curves (d = 1), got d = {}",
            chart.d()
        )));
    }
    let spec = QTransformSpec::new(0.5, phi.clone())?;
    let n = chart.n() as i32;
    let integrand = |t: f64| -> Result<f64> {
        let p = chart.point(&[t])?;
        let a = symbol(t);
        if a < 0.0 {
            return domain(format!("symbol is negative at t = {t}"));
        }
        let x = a / (1.0 - p.norm_sq()).powi(n + 1);
        let q = if x > 0.0 { q_transform(&spec, x)? } else { 0.0 };
        Ok(q * chart.volume_density(&[t])?)
    };
    integrand(0.5)?;
    let q = integrate(|t| integrand(t).unwrap_or(f64::NAN), 0.0, 1.0, 1e-9, 0.0)?;
    if !q.value.is_finite() {
        return domain("Szegő integrand could not be evaluated on the whole chart");
    }
    if q.error > 1e-6 * q.value.abs() {
        return Err(Error::Accuracy {
            what: "Szegő chart integral".into(),
            estimate: q.error / q.value.abs(),
            target: 1e-6,
        });
    }
    Ok(q.value / SQRT_2)
}

/// Limit of √(π/α)·N_{[t₁,t₂]}(T̂_r) for a ≡ 1:
/// √(8π)·r/(1−r²)·[√ln(1/((1−r²)²t₁)) − √ln(1/((1−r²)²t₂))].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountPrediction {
    pub r: f64,
    pub t1: f64,
    pub t2: f64,
    pub limit: f64,
}

impl CountPrediction {
    /// The asymptotic count √(8α)·r/(1−r²)·[…] = limit·√(α/π).
    pub fn estimate(&self, alpha: f64) -> f64 {
        self.limit * (alpha / PI).sqrt()
    }
}

fn top_of_spectrum(r: f64) -> f64 {
    1.0 / (1.0 - r * r).powi(2)
}

pub fn count_prediction(r: f64, t1: f64, t2: f64) -> Result<CountPrediction> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("radius must lie in (0, 1), got {r}"));
    }
    let top = top_of_spectrum(r);
    if !(t1 > 0.0 && t1 <= t2) {
        return domain(format!("need 0 < t1 <= t2, got [{t1}, {t2}]"));
    }
    if t2 > top * (1.0 + 1e-12) {
        return domain(format!("t2 = {t2} exceeds the top of the limiting spectrum 1/(1−r²)² = {top}"));
    }
    let root = |t: f64| (top / t).ln().max(0.0).sqrt();
    let limit = (8.0 * PI).sqrt() * r / (1.0 - r * r) * (root(t1) - root(t2));
    Ok(CountPrediction { r, t1, t2, limit })
}

/// #{λ : t₁ ≤ λ ≤ t₂}. When t₂ reaches the top of the limiting spectrum
/// (sup a/(1−r²)²) the interval is taken as [t₁, ∞): at finite α the largest
/// eigenvalues sit slightly above that top.
pub fn eigen_count(spectrum: &SpectrumTruncation, t1: f64, t2: f64) -> Result<usize> {
    if !spectrum.normalized {
        return Err(Error::Contract("eigenvalue counts need the normalized spectrum".into()));
    }
    if !(t1 <= t2) {
        return domain(format!("empty interval [{t1}, {t2}]"));
    }
    let open_top = t2 >= spectrum.norm_bound * (1.0 - 1e-12);
    Ok(spectrum
        .eigenvalues
        .iter()
        .filter(|&&l| l >= t1 && (open_top || l <= t2))
        .count())
}

/// D_a(s) = (2πr/(1−r²))·(1/(√π s))·(ln(1/((1−r²)²s)))^{−1/2} for a ≡ 1;
/// (1/√2)∫_I D_a gives the count limit.
pub fn eigenvalue_density(r: f64, s: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("radius must lie in (0, 1), got {r}"));
    }
    let top = top_of_spectrum(r);
    if !(s > 0.0 && s < top) {
        return domain(format!("density is supported on (0, {top}), got s = {s}"));
    }
    Ok(2.0 * PI * r / (1.0 - r * r) / (PI.sqrt() * s) / (top / s).ln().sqrt())
}

/// ((1/√(2p))∫₀¹ (a(θ)/(1−r²)²)^p dθ·2πr/(1−r²))^{1/p}.
pub fn schatten_limit(model: &CircleSymbolModel, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return domain(format!("Schatten exponent must be positive, got {p}"));
    }
    let b = model.boundary_factor();
    let mean = if model.is_constant_one() {
        b.powf(p)
    } else {
        periodic_trapezoid_converged(|t| (model.symbol_value(t).max(0.0) * b).powf(p), 64, 1 << 16, 1e-12)?.0
    };
    Ok((mean * model.arc_density() / (2.0 * p).sqrt()).powf(1.0 / p))
}

/// (π/α)^{1/(2p)}·‖T̂‖_{S_p} over the kept spectrum.
pub fn scaled_schatten(spectrum: &SpectrumTruncation, p: f64) -> f64 {
    (PI / spectrum.alpha).powf(0.5 / p) * spectrum.trace_of(|l| l.max(0.0).powf(p)).powf(1.0 / p)
}

/// (π/α)^{1/2}·Σ φ(λ).
pub fn scaled_trace(spectrum: &SpectrumTruncation, phi: &Phi) -> f64 {
    (PI / spectrum.alpha).sqrt() * spectrum.trace_of(|l| phi.eval(l.max(0.0)))
}

/// (π/α)^{1/2}·Σ λ^p for each α of the grid, 0 < p < 1.
pub fn boundedness_scan_small_p(model: &CircleSymbolModel, p: f64, alphas: &[f64]) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("the small-p scan needs 0 < p < 1, got {p}"));
    }
    alphas
        .par_iter()
        .map(|&alpha| {
            let s = toeplitz::spectrum(&model.with_alpha(alpha)?)?;
            Ok(scaled_trace(&s, &Phi::Power(p)))
        })
        .collect()
}

/// What a convergence scan compares.
#[derive(Debug, Clone)]
pub enum ScanTarget {
    /// (π/α)^{1/2} Tr φ(T̂) against the Szegő right-hand side.
    Trace(Phi),
    /// √(π/α)·N_{[t₁,t₂]} against the count limit (a ≡ 1 only).
    Interval { t1: f64, t2: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub alpha: f64,
    pub lhs_scaled: f64,
    pub rhs_limit: f64,
    pub count_n: Option<usize>,
    pub rhs_asymptotic_count: Option<f64>,
}

/// One row per α (in grid order); rows are computed in parallel.
pub fn convergence_scan(model: &CircleSymbolModel, target: &ScanTarget, alphas: &[f64]) -> Result<Vec<ScanRow>> {
    if alphas.is_empty() {
        return domain("the α grid is empty");
    }
    if let Some(bad) = alphas.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
        return domain(format!("α values must be positive, got {bad}"));
    }
    match target {
        ScanTarget::Trace(phi) => {
            let rhs = szego_rhs(model, phi)?;
            alphas
                .par_iter()
                .map(|&alpha| {
                    let s = toeplitz::spectrum(&model.with_alpha(alpha)?)?;
                    Ok(ScanRow {
                        alpha,
                        lhs_scaled: scaled_trace(&s, phi),
                        rhs_limit: rhs,
                        count_n: None,
                        rhs_asymptotic_count: None,
                    })
                })
                .collect()
        }
        ScanTarget::Interval { t1, t2 } => {
            if !model.is_constant_one() {
                return Err(Error::Unsupported(
                    "interval scans use the closed-form count limit, available for a ≡ 1".into(),
                ));
            }
            let prediction = count_prediction(model.r(), *t1, *t2)?;
            alphas
                .par_iter()
                .map(|&alpha| {
                    let s = toeplitz::explicit_eigenvalues(&model.with_alpha(alpha)?, None)?;
                    let n = eigen_count(&s, *t1, *t2)?;
                    Ok(ScanRow {
                        alpha,
                        lhs_scaled: (PI / alpha).sqrt() * n as f64,
                        rhs_limit: prediction.limit,
                        count_n: Some(n),
                        rhs_asymptotic_count: Some(prediction.estimate(alpha)),
                    })
                })
                .collect()
        }
    }
}

/// λ_{m*} → 1/(1−r²)² with m*(α) = ⌊(α+1)r²/(1−r²)⌋.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormAsymptote {
    pub r: f64,
    pub limit: f64,
}

impl NormAsymptote {
    pub fn m_star(&self, alpha: f64) -> usize {
        m_star(self.r, alpha)
    }
}

pub fn norm_asymptote(r: f64) -> Result<NormAsymptote> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("radius must lie in (0, 1), got {r}"));
    }
    Ok(NormAsymptote {
        r,
        limit: top_of_spectrum(r),
    })
}
