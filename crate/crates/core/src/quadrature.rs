//! One-dimensional quadrature: globally adaptive Gauss–Kronrod (7/15) and the
//! periodic trapezoid rule.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights. Values from QUADPACK qk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel |K15 - G7| estimates.
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over consecutive
/// intervals given by `breakpoints` (at least two, increasing).
///
/// Panels are bisected in order of decreasing error estimate until the total
/// estimate drops below `max(abs_tol, rel_tol·|I|)` or `max_panels` is hit,
/// in which case an accuracy error is returned.
pub fn integrate_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    assert!(breakpoints.len() >= 2, "need at least one interval");
    let mut heap: BinaryHeap<Panel> = breakpoints
        .windows(2)
        .map(|w| kronrod15(&f, w[0], w[1]))
        .collect();
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            // re-sum in interval order so the result does not depend on heap layout
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(Quadrature {
                value,
                error,
                panels: panels.len(),
            });
        }
        if heap.len() >= max_panels {
            return Err(Error::Accuracy {
                what: format!("adaptive quadrature exhausted {max_panels} panels"),
                estimate: error,
                target,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Accuracy {
                what: "adaptive quadrature panel collapsed to machine resolution".into(),
                estimate: error,
                target,
            });
        }
        heap.push(kronrod15(&f, worst.a, mid));
        heap.push(kronrod15(&f, mid, worst.b));
    }
}

/// Adaptive Gauss–Kronrod over a single interval [a, b].
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    integrate_breakpoints(f, &[a, b], rel_tol, abs_tol, 20_000)
}

/// Trapezoid rule with `nodes` equispaced points on one period [0, 1).
/// Spectrally accurate for smooth 1-periodic integrands.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, nodes: usize) -> f64 {
    let h = 1.0 / nodes as f64;
    (0..nodes).map(|k| f(k as f64 * h)).sum::<f64>() * h
}

/// Periodic trapezoid with node doubling from `start` until two successive
/// values agree to `rel_tol`; returns (value, nodes used).
pub fn periodic_trapezoid_converged<F: Fn(f64) -> f64>(
    f: F,
    start: usize,
    max_nodes: usize,
    rel_tol: f64,
) -> Result<(f64, usize)> {
    let mut nodes = start.max(4);
    let mut prev = periodic_trapezoid(&f, nodes);
    while nodes < max_nodes {
        nodes *= 2;
        let next = periodic_trapezoid(&f, nodes);
        let change = (next - prev).abs();
        if change <= rel_tol * next.abs() || change == 0.0 {
            return Ok((next, nodes));
        }
        prev = next;
    }
    Err(Error::Accuracy {
        what: format!("periodic trapezoid not converged at {max_nodes} nodes"),
        estimate: f64::NAN,
        target: rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        // K15 integrates degree ≤ 22 exactly
        let q = integrate(|x| x.powi(9) - 3.0 * x * x, -1.0, 2.0, 1e-14, 0.0).unwrap();
        let exact = (2f64.powi(10) - 1.0) / 10.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-12);
        assert_eq!(q.panels, 1);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn breakpoints_and_failure() {
        let q = integrate_breakpoints(|x: f64| x.exp(), &[0.0, 1.0, 3.0], 1e-13, 0.0, 100).unwrap();
        assert!((q.value - (3f64.exp() - 1.0)).abs() < 1e-11);
        let err = integrate_breakpoints(|x: f64| (1.0 / x).sin() / x, &[1e-9, 1.0], 1e-14, 0.0, 8);
        assert!(matches!(err, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn trapezoid_spectral_accuracy() {
        // ∫₀¹ e^{cos 2πθ} dθ = I₀(1)
        let i0 = 1.266_065_877_752_008_4;
        let (v, _) =
            periodic_trapezoid_converged(|t| (2.0 * PI * t).cos().exp(), 4, 1024, 1e-14).unwrap();
        assert!((v - i0).abs() < 1e-14);
    }
}
