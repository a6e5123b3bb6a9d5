use std::fmt::Write as _;

use szegolab::charts::{builtin_chart, sample_points};
use szegolab::geometry::{classify, lambda_spectrum, pullback_forms, ClassTag, SymplecticClass, DEFAULT_CLASSIFY_TOL};
use szegolab::hessdet::{
    det_direct, det_via_polynomial, eigenvalue_product, max_pairwise_rel_diff, random_skew_adjoint, BlockHessianSpec,
};
use szegolab::szego::{
    convergence_scan, q_transform, schatten_limit, scaled_schatten, Phi, QTransformSpec, ScanTarget,
};
use szegolab::toeplitz::{self, composition_trace_quadrature, unnormalized_power_sum, CircleSymbolModel};

use crate::golden::{cell_matches, GoldenTable, TABLE_ALPHAS};
use crate::params::{Format, Params};
use crate::report::{Cell, Report};

/// Why a run did not exit cleanly.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// A numerical target was missed: exit 3.
    Accuracy(String),
    /// A reference-table cell did not match: exit 4.
    Golden(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Accuracy(_) => 3,
            Failure::Golden(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Accuracy(m) | Failure::Golden(m) => m,
        }
    }
}

impl From<szegolab::Error> for Failure {
    fn from(e: szegolab::Error) -> Self {
        match e {
            szegolab::Error::Accuracy { .. } => Failure::Accuracy(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

/// Rendered output plus any non-fatal failures found while producing it.
pub struct Outcome {
    pub text: String,
    pub failures: Vec<Failure>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            failures: Vec::new(),
        }
    }
}

type Run = Result<Outcome, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn format_of(p: &Params) -> Format {
    p.format.unwrap_or_default()
}

fn radius(p: &Params, default: f64) -> Result<f64, Failure> {
    let r = p.r.unwrap_or(default);
    if !(r > 0.0 && r < 1.0) {
        return usage(format!("--r must lie in (0, 1), got {r}"));
    }
    Ok(r)
}

fn alphas(p: &Params, default: &[f64]) -> Result<Vec<f64>, Failure> {
    let list = p.alpha.clone().unwrap_or_else(|| default.to_vec());
    if list.is_empty() {
        return usage("--alpha needs at least one value");
    }
    if let Some(bad) = list.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
        return usage(format!("α values must be positive, got {bad}"));
    }
    Ok(list)
}

fn warn_unused(command: &str, p: &Params, allowed: &[&str]) {
    let given = [
        ("r", p.r.is_some()),
        ("alpha", p.alpha.is_some()),
        ("t1", p.t1.is_some()),
        ("t2", p.t2.is_some()),
        ("p", p.p.is_some()),
        ("phi", p.phi.is_some()),
        ("chart", p.chart.is_some()),
        ("m", p.m.is_some()),
        ("d", p.d.is_some()),
        ("seed", p.seed.is_some()),
    ];
    for (name, set) in given {
        if set && !allowed.contains(&name) {
            eprintln!("warning: {command} ignores --{name}");
        }
    }
}

/// Reproduce one of the reference tables and check it cell by cell.
pub fn table(golden: &GoldenTable, p: &Params) -> Run {
    warn_unused(golden.name, p, &["alpha"]);
    let grid = alphas(p, &TABLE_ALPHAS)?;
    let model = CircleSymbolModel::constant_one(golden.r, grid[0])?;
    let rows = convergence_scan(&model, &ScanTarget::Interval { t1: golden.t1, t2: golden.t2 }, &grid)?;

    let mut report = Report::new(
        format!(
            "Eigenvalue counts in [{:.6}, {:.6}] for r = {:.6}",
            golden.t1, golden.t2, golden.r
        ),
        &["alpha", "N", "asymptotic_count", "scaled_count"],
    );
    let mut failures = Vec::new();
    for row in &rows {
        let n = row.count_n.expect("interval scans report counts");
        let estimate = row.rhs_asymptotic_count.expect("interval scans report estimates");
        report.push(vec![
            Cell::Real(row.alpha),
            Cell::Int(n as u64),
            Cell::Real(estimate),
            Cell::Real(row.lhs_scaled),
        ]);
        let Some(i) = TABLE_ALPHAS.iter().position(|&a| a == row.alpha) else {
            continue;
        };
        let alpha = row.alpha;
        if n != golden.counts[i] {
            failures.push(Failure::Golden(format!("alpha = {alpha}: N = {n}, reference {}", golden.counts[i])));
        }
        if !cell_matches(estimate, golden.estimates[i]) {
            failures.push(Failure::Golden(format!(
                "alpha = {alpha}: asymptotic count {estimate:.4}, reference {}",
                golden.estimates[i]
            )));
        }
        if !cell_matches(row.lhs_scaled, golden.scaled[i]) {
            failures.push(Failure::Golden(format!(
                "alpha = {alpha}: scaled count {:.5}, reference {}",
                row.lhs_scaled, golden.scaled[i]
            )));
        }
    }
    let limit = rows[0].rhs_limit;
    if !cell_matches(limit, golden.limit) {
        failures.push(Failure::Golden(format!("limit {limit:.5}, reference {}", golden.limit)));
    }
    report.note(format!("limit of scaled_count as alpha → ∞: {limit:.5} (reference {})", golden.limit));
    report.note(if failures.is_empty() {
        "reference check: all cells match".to_string()
    } else {
        format!("reference check: {} mismatched cell(s)", failures.len())
    });
    Ok(Outcome {
        text: report.render(format_of(p)),
        failures,
    })
}

pub fn scan(p: &Params) -> Run {
    let r = radius(p, 0.5)?;
    let grid = alphas(p, &TABLE_ALPHAS)?;
    let model = CircleSymbolModel::constant_one(r, grid[0])?;
    let format = format_of(p);

    if p.t1.is_some() || p.t2.is_some() {
        let (Some(t1), Some(t2)) = (p.t1, p.t2) else {
            return usage("an interval scan needs both --t1 and --t2");
        };
        let rows = convergence_scan(&model, &ScanTarget::Interval { t1, t2 }, &grid)?;
        let mut report = Report::new(
            format!("Eigenvalue counts in [{t1}, {t2}], r = {r}"),
            &["alpha", "N", "asymptotic_count", "scaled_count", "limit"],
        );
        for row in rows {
            report.push(vec![
                Cell::Real(row.alpha),
                Cell::Int(row.count_n.unwrap_or(0) as u64),
                Cell::Real(row.rhs_asymptotic_count.unwrap_or(f64::NAN)),
                Cell::Real(row.lhs_scaled),
                Cell::Real(row.rhs_limit),
            ]);
        }
        return Ok(Outcome::ok(report.render(format)));
    }

    if let Some(exp) = p.p {
        if !(exp > 0.0 && exp.is_finite()) {
            return usage(format!("--p must be positive, got {exp}"));
        }
        let limit = schatten_limit(&model, exp)?;
        let mut report = Report::new(
            format!("Scaled Schatten-{exp} norms, r = {r}"),
            &["alpha", "scaled_norm", "limit", "rel_err"],
        );
        for &alpha in &grid {
            let s = toeplitz::spectrum(&model.with_alpha(alpha)?)?;
            let v = scaled_schatten(&s, exp);
            report.push(vec![
                Cell::Real(alpha),
                Cell::Real(v),
                Cell::Real(limit),
                Cell::Real((v - limit).abs() / limit),
            ]);
        }
        return Ok(Outcome::ok(report.render(format)));
    }

    let phi = Phi::parse(p.phi.as_deref().unwrap_or("pow:1"))?;
    let rows = convergence_scan(&model, &ScanTarget::Trace(phi.clone()), &grid)?;
    let mut report = Report::new(
        format!("Scaled traces of phi = {}, r = {r}", phi.label()),
        &["alpha", "scaled_trace", "limit", "rel_err"],
    );
    for row in rows {
        report.push(vec![
            Cell::Real(row.alpha),
            Cell::Real(row.lhs_scaled),
            Cell::Real(row.rhs_limit),
            Cell::Real((row.lhs_scaled - row.rhs_limit).abs() / row.rhs_limit.abs()),
        ]);
    }
    Ok(Outcome::ok(report.render(format)))
}

fn describe(class: &SymplecticClass) -> String {
    let tag = match class.tag {
        ClassTag::Lagrangian => "isotropic (lagrangian)".to_string(),
        other => other.to_string(),
    };
    let lambdas: Vec<String> = class.lambda_spectrum.iter().map(|l| format!("{l:.6}")).collect();
    format!("{tag}, λ-spectrum: [{}]", lambdas.join(", "))
}

const CLASSIFY_SAMPLES: usize = 5;

pub fn classify_chart(p: &Params) -> Run {
    warn_unused("classify", p, &["chart", "r"]);
    let Some(name) = p.chart.as_deref() else {
        return usage("classify needs --chart");
    };
    let r = radius(p, 0.5)?;
    let chart = builtin_chart(name, r)?;
    let mut classes = Vec::with_capacity(CLASSIFY_SAMPLES);
    for t in sample_points(chart.d(), CLASSIFY_SAMPLES) {
        let pair = pullback_forms(&chart, &t)?;
        classes.push((t, classify(&pair, chart.n(), chart.d(), DEFAULT_CLASSIFY_TOL)?));
    }
    let text = match format_of(p) {
        Format::Csv => {
            let mut report = Report::new("", &["chart", "point", "tag", "lambda_spectrum"]);
            for (t, c) in &classes {
                let point: Vec<String> = t.iter().map(|x| format!("{x:.16e}")).collect();
                let lambdas: Vec<String> = c.lambda_spectrum.iter().map(|x| format!("{x:.16e}")).collect();
                report.push(vec![
                    Cell::Text(name.to_string()),
                    Cell::Text(point.join(";")),
                    Cell::Text(c.tag.to_string()),
                    Cell::Text(lambdas.join(";")),
                ]);
            }
            report.render(Format::Csv)
        }
        Format::Markdown => {
            let first = &classes[0].1;
            if classes.iter().all(|(_, c)| c.tag == first.tag) {
                format!("{name}: {}\n", describe(first))
            } else {
                let mut out = format!("{name}: classification varies over the chart\n");
                for (t, c) in &classes {
                    let _ = writeln!(out, "  at {t:?}: {}", describe(c));
                }
                out
            }
        }
    };
    Ok(Outcome::ok(text))
}

const HESSDET_TOL: f64 = 1e-9;

pub fn hessdet(p: &Params) -> Run {
    warn_unused("hessdet", p, &["d", "m", "seed"]);
    let d = p.d.unwrap_or(2);
    let m = p.m.unwrap_or(4);
    let seed = p.seed.unwrap_or(0);
    if d == 0 {
        return usage("--d must be positive");
    }
    if m < 2 {
        return usage(format!("--m must be at least 2, got {m}"));
    }
    let pair = random_skew_adjoint(d, seed)?;
    let spec = BlockHessianSpec::new(m, pair.w.clone())?;
    let direct = det_direct(&spec);
    let poly = det_via_polynomial(&spec);
    let lambdas = lambda_spectrum(&pair)?;
    let product = eigenvalue_product(m, d, &lambdas)?.powi(2);
    let spread = max_pairwise_rel_diff(&[direct.re, poly.re, product]);

    let mut report = Report::new(
        format!("Block Hessian determinant, d = {d}, m = {m}, seed = {seed}"),
        &["method", "det_re", "det_im"],
    );
    report.push(vec![Cell::Text("direct".into()), Cell::Real(direct.re), Cell::Real(direct.im)]);
    report.push(vec![Cell::Text("polynomial".into()), Cell::Real(poly.re), Cell::Real(poly.im)]);
    report.push(vec![Cell::Text("eigenvalue_product".into()), Cell::Real(product), Cell::Real(0.0)]);
    report.note(format!("max pairwise relative difference: {spread:.3e}"));

    let mut failures = Vec::new();
    let imag = direct.im.abs().max(poly.im.abs()) / direct.re.abs();
    if spread >= HESSDET_TOL || imag >= HESSDET_TOL || direct.re <= 0.0 || direct.re.is_nan() {
        failures.push(Failure::Accuracy(format!(
            "determinants disagree: relative spread {spread:.3e}, relative imaginary part {imag:.3e}"
        )));
    }
    Ok(Outcome {
        text: report.render(format_of(p)),
        failures,
    })
}

const QCHECK_TOL: f64 = 1e-8;

pub fn qcheck(p: &Params) -> Run {
    warn_unused("qcheck", p, &["p", "phi"]);
    let phi = match (&p.phi, p.p) {
        (Some(_), Some(_)) => return usage("give either --phi or --p, not both"),
        (Some(spec), None) => Phi::parse(spec)?,
        (None, Some(exp)) => {
            let phi = Phi::Power(exp);
            phi.validate()?;
            phi
        }
        (None, None) => Phi::Power(1.0),
    };
    let mut report = Report::new(
        format!("Q transform of phi = {} against the monomial rule", phi.label()),
        &["epsilon", "t", "numeric", "closed_form", "rel_err"],
    );
    let mut worst = 0.0_f64;
    for &eps in &[0.0, 0.5, 1.0, 1.5] {
        let spec = QTransformSpec::new(eps, phi.clone())?;
        for &t in &[0.1, 1.0, 7.0] {
            let numeric = q_transform(&spec, t)?;
            let exact = phi.q_closed_form(eps, t).expect("parsed test functions have closed forms");
            let err = (numeric - exact).abs() / exact.abs();
            worst = worst.max(err);
            report.push(vec![
                Cell::Real(eps),
                Cell::Real(t),
                Cell::Real(numeric),
                Cell::Real(exact),
                Cell::Real(err),
            ]);
        }
    }
    report.note(format!("largest relative error: {worst:.3e}"));
    let mut failures = Vec::new();
    if worst >= QCHECK_TOL || worst.is_nan() {
        failures.push(Failure::Accuracy(format!(
            "Q transform relative error {worst:.3e} exceeds {QCHECK_TOL:e}"
        )));
    }
    Ok(Outcome {
        text: report.render(format_of(p)),
        failures,
    })
}

pub fn trace_compare(p: &Params) -> Run {
    warn_unused("trace-compare", p, &["r", "alpha", "m"]);
    let r = radius(p, 0.5)?;
    let alpha = match alphas(p, &[50.0])?.as_slice() {
        [a] => *a,
        _ => return usage("trace-compare takes a single --alpha"),
    };
    let m = p.m.unwrap_or(2);
    if !(2..=3).contains(&m) {
        return usage(format!("trace-compare supports --m 2 or 3, got {m}"));
    }
    let model = CircleSymbolModel::constant_one(r, alpha)?;
    let quad = composition_trace_quadrature(&model, m)?;
    let eig = unnormalized_power_sum(&toeplitz::spectrum(&model)?, m);
    let rel = (quad.value - eig).abs() / eig.abs();

    let mut report = Report::new(
        format!("Tr(T^{m}) for r = {r}, alpha = {alpha}"),
        &["quantity", "value"],
    );
    report.push(vec![Cell::Text("quadrature".into()), Cell::Real(quad.value)]);
    report.push(vec![Cell::Text("eigenvalue_sum".into()), Cell::Real(eig)]);
    report.push(vec![Cell::Text("rel_err".into()), Cell::Real(rel)]);
    report.push(vec![Cell::Text("nodes_per_axis".into()), Cell::Int(quad.nodes as u64)]);
    report.push(vec![Cell::Text("last_doubling_change".into()), Cell::Real(quad.rel_change)]);

    let mut failures = Vec::new();
    if !quad.resolved {
        failures.push(Failure::Accuracy(format!(
            "quadrature not resolved at {} nodes per axis (last change {:.3e})",
            quad.nodes, quad.rel_change
        )));
    }
    Ok(Outcome {
        text: report.render(format_of(p)),
        failures,
    })
}
