//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported but do not fail the run; every
//! other failure exits non-zero.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use indexlab::complexfn::{bessel_i, bessel_k, gamma, log_gamma};
use indexlab::kernels::{
    forward_kernel, forward_kernel_closed, inverse_kernel, inverse_kernel_series, rho, rho_quadrature,
    TransformFamily,
};
use indexlab::mellin::{bessel_k0_entry, catalog, exp_entry, weighted_norm, MellinImage};
use indexlab::quad::QuadratureControl;
use indexlab::transforms::{
    forward_barnes, forward_direct, forward_line, index_identity, line_norm, mkl_expand, mkl_forward,
    mkl_parseval, operator_norm_bound, round_trip, ForwardPath,
};
use indexlab::Result;

/// The round-trip criterion fails for the (1+t^2) family: its inversion
/// integrand decays too slowly on every admissible line.
const KNOWN_RED: [usize; 1] = [3];

const C0: f64 = 0.5;
const ROUND_TRIP_GRID: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Worst relative error and where it occurred; an error fails the check outright.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
    failure: Option<String>,
}

impl Worst {
    fn record(&mut self, case: impl Into<String>, r: Result<f64>) {
        match r {
            Ok(e) if e.is_nan() => self.fail(case, "NaN".into()),
            Ok(e) if e > self.value || self.at.is_empty() => {
                self.value = e;
                self.at = case.into();
            }
            Ok(_) => {}
            Err(err) => self.fail(case, err.to_string()),
        }
    }

    fn fail(&mut self, case: impl Into<String>, why: String) {
        if self.failure.is_none() {
            self.failure = Some(format!("{}: {why}", case.into()));
        }
    }

    fn verdict(&self, tolerance: f64) -> (bool, String) {
        match &self.failure {
            Some(f) => (false, f.clone()),
            None => (
                self.value <= tolerance,
                format!("max rel error {:.2e} (tol {tolerance:.0e}) at {}", self.value, self.at),
            ),
        }
    }
}

fn families() -> Vec<TransformFamily> {
    vec![
        TransformFamily::TruncatedMellin { a: 1.0 },
        TransformFamily::ExpKl,
        TransformFamily::PowerExp { m: 2 },
        TransformFamily::OnePlusT { n: 2 },
        TransformFamily::IncGamma,
        TransformFamily::OnePlusT2 { n: 1 },
    ]
}

/// Three points of the forward region interior, off the real axis where possible.
fn region_points(family: &TransformFamily) -> Vec<Complex64> {
    let (lo, hi) = family.forward_region(C0).expect("region");
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let w = hi - lo;
            vec![c(lo + 0.3 * w, 0.0), c(lo + 0.5 * w, 1.3), c(lo + 0.7 * w, -0.6)]
        }
        (true, false) => vec![c(lo + 0.25, 0.0), c(lo + 0.75, 1.3), c(lo + 1.5, -0.6)],
        (false, true) => vec![c(hi - 0.25, 0.0), c(hi - 0.75, 1.3), c(hi - 1.5, -0.6)],
        (false, false) => unreachable!("every family has a bounded side"),
    }
}

fn kernel_dual_representation(q: &QuadratureControl) -> (bool, String) {
    let mut w = Worst::default();
    let fams = [
        TransformFamily::ExpKl,
        TransformFamily::IncGamma,
        TransformFamily::OnePlusT2 { n: 1 },
    ];
    for family in &fams {
        for z in [c(0.25, 0.0), c(0.5, 2.0), c(1.5, -1.0)] {
            for x in [0.1, 1.0, 5.0] {
                let r = forward_kernel(family, z, x, q).and_then(|a| {
                    let b = forward_kernel_closed(family, z, x, q)?;
                    if !b.closed_form {
                        return Err(indexlab::Error::InvalidParameter("no closed form".into()));
                    }
                    Ok(rel(a, b.value))
                });
                w.record(format!("{family} z={z} x={x}"), r);
            }
        }
    }
    w.verdict(1e-8)
}

fn forward_dual_path(q: &QuadratureControl) -> (bool, String) {
    let mut w = Worst::default();
    let fs = [
        exp_entry(1.0, C0).expect("exp").image,
        bessel_k0_entry(C0).expect("k0").image,
    ];
    for family in families() {
        for f in &fs {
            for z in region_points(&family) {
                let r = forward_direct(&family, f, z, q)
                    .and_then(|d| Ok(rel(d, forward_barnes(&family, f, z, q)?)));
                w.record(format!("{family} f='{}' z={z}", f.label()), r);
            }
        }
    }
    w.verdict(1e-8)
}

fn round_trips(q: &QuadratureControl) -> (bool, String) {
    let exp = exp_entry(1.0, C0).expect("exp").image;
    let k0 = bessel_k0_entry(C0).expect("k0").image;
    let cases: [(TransformFamily, &MellinImage); 5] = [
        (TransformFamily::TruncatedMellin { a: 1.0 }, &exp),
        (TransformFamily::ExpKl, &k0),
        (TransformFamily::OnePlusT { n: 2 }, &k0),
        (TransformFamily::IncGamma, &k0),
        (TransformFamily::OnePlusT2 { n: 1 }, &k0),
    ];
    let mut w = Worst::default();
    let mut failures = Vec::new();
    for (family, f) in &cases {
        let g = if matches!(family, TransformFamily::TruncatedMellin { .. }) {
            0.25
        } else {
            family.default_gamma(C0).expect("gamma")
        };
        let case = format!("{family} gamma={g}");
        match round_trip(family, f, g, &ROUND_TRIP_GRID, q) {
            Ok(report) => w.record(case, Ok(report.max_rel_error)),
            Err(e) => failures.push(format!("{case}: {e}")),
        }
    }
    let (pass, mut detail) = w.verdict(1e-6);
    if !failures.is_empty() {
        detail = format!("{detail}; failed: {}", failures.join("; "));
    }
    (pass && failures.is_empty(), detail)
}

fn inversion_kernel_identities() -> (bool, String) {
    let mut w = Worst::default();
    let zs = [c(-0.5, 0.0), c(0.3, 1.2), c(-1.25, -0.7), c(1.5, 0.5)];
    let xs = [0.3, 1.0, 4.0];
    let series_vs_closed = [
        TransformFamily::ExpKl,
        TransformFamily::PowerExp { m: 2 },
        TransformFamily::PowerExp { m: 3 },
        TransformFamily::OnePlusT { n: 1 },
        TransformFamily::OnePlusT { n: 2 },
        TransformFamily::OnePlusT { n: 3 },
        TransformFamily::OnePlusT2 { n: 1 },
        TransformFamily::OnePlusT2 { n: 2 },
    ];
    for family in &series_vs_closed {
        for z in zs {
            for x in xs {
                let r = inverse_kernel_series(family, z, x)
                    .and_then(|s| Ok(rel(s, inverse_kernel(family, z, x)?.value)));
                w.record(format!("{family} z={z} x={x}"), r);
            }
        }
    }
    for z in zs {
        for x in xs {
            let r = inverse_kernel(&TransformFamily::IncGamma, z, x).and_then(|a| {
                Ok(rel(a.value, inverse_kernel(&TransformFamily::OnePlusT { n: 1 }, z, x)?.value))
            });
            w.record(format!("inc-gamma=one-plus-t:1 z={z} x={x}"), r);
        }
    }
    w.verdict(1e-9)
}

fn rho_closed_forms(q: &QuadratureControl) -> (bool, String) {
    let fams = [
        TransformFamily::ExpKl,
        TransformFamily::PowerExp { m: 2 },
        TransformFamily::PowerExp { m: 3 },
        TransformFamily::OnePlusT { n: 1 },
        TransformFamily::OnePlusT { n: 3 },
        TransformFamily::IncGamma,
        TransformFamily::OnePlusT2 { n: 1 },
        TransformFamily::OnePlusT2 { n: 2 },
    ];
    let mut w = Worst::default();
    for family in &fams {
        let (lo, hi) = family.rho_strip().expect("strip");
        let re = |t: f64| if hi.is_finite() { lo + t * (hi - lo) } else { lo + 4.0 * t };
        let points = [c(re(0.25), 0.0), c(re(0.5), 0.0), c(re(0.5), 1.5), c(re(0.75), -0.8), c(re(0.4), 4.0)];
        for s in points {
            let r = rho(family, s).and_then(|a| Ok(rel(a, rho_quadrature(family, s, q)?)));
            w.record(format!("{family} s={s}"), r);
        }
    }
    w.verdict(1e-9)
}

fn index_integral(q: &QuadratureControl) -> (bool, String) {
    let mut w = Worst::default();
    for x in [1.0, 2.0] {
        for y in [0.5, 1.0, 2.0] {
            let r = index_identity(x, y, q).map(|(lhs, rhs)| (lhs - rhs).abs() / rhs);
            w.record(format!("x={x} y={y}"), r);
        }
    }
    w.verdict(1e-6)
}

fn mkl_expansion(q: &QuadratureControl) -> (bool, String) {
    let f = bessel_k0_entry(C0).expect("k0").image;
    let mut expand = Worst::default();
    for x in [0.5f64, 1.0, 3.0] {
        let want = 2.0 * bessel_k(c(0.0, 0.0), 2.0 * x.sqrt()).expect("K0");
        expand.record(format!("x={x}"), mkl_expand(&f, x, q).map(|v| rel(v, want)));
    }
    let mut internal = Worst::default();
    for tau in [0.0, 1.0, 2.0] {
        let r = mkl_forward(&f, tau, q).and_then(|g| {
            let h_form = mkl_parseval(&f, tau, q)?;
            Ok(g.rel_agreement.max(rel(h_form, g.value)))
        });
        internal.record(format!("tau={tau}"), r);
    }
    let (p1, d1) = expand.verdict(1e-4);
    let (p2, d2) = internal.verdict(1e-7);
    (p1 && p2, format!("expansion {d1}; internal checks {d2}"))
}

fn norm_bounds(q: &QuadratureControl) -> (bool, String) {
    let entries = catalog(C0).expect("catalog");
    let mut worst_ratio: f64 = 0.0;
    let mut at = String::new();
    let mut failure = None;
    for family in families() {
        let g = family.default_gamma(C0).expect("gamma");
        let bound = match operator_norm_bound(&family, C0, g, q) {
            Ok(b) => b,
            Err(e) => {
                failure.get_or_insert(format!("{family} bound: {e}"));
                continue;
            }
        };
        for entry in entries.iter().filter(|e| e.name != "zero") {
            let r = forward_line(&family, &entry.image, g, ForwardPath::Barnes, q).and_then(|ff| {
                let lhs = line_norm(&ff, q)?;
                let norm_f = weighted_norm(&entry.image, 0.0, 0.0, 60.0, q)?;
                Ok((lhs, bound * norm_f))
            });
            match r {
                Ok((lhs, rhs)) => {
                    if lhs > rhs + 1e-8 {
                        failure.get_or_insert(format!("{family} f={}: {lhs} > {rhs}", entry.name));
                    }
                    if lhs / rhs > worst_ratio {
                        worst_ratio = lhs / rhs;
                        at = format!("{family} f={}", entry.name);
                    }
                }
                Err(e) => {
                    failure.get_or_insert(format!("{family} f={}: {e}", entry.name));
                }
            }
        }
    }
    match failure {
        Some(f) => (false, f),
        None => (true, format!("tightest ||Ff|| / (bound ||f||) = {worst_ratio:.3} at {at}")),
    }
}

/// Deterministic low-discrepancy points in the unit square.
fn halton(k: usize) -> (f64, f64) {
    let radical = |mut i: usize, base: usize| {
        let (mut v, mut f) = (0.0, 1.0 / base as f64);
        while i > 0 {
            v += f * (i % base) as f64;
            i /= base;
            f /= base as f64;
        }
        v
    };
    (radical(k + 1, 2), radical(k + 1, 3))
}

fn special_functions() -> (bool, String) {
    let mut checks: Vec<(&str, Worst, f64)> = Vec::new();

    let mut w = Worst::default();
    for k in 0..200 {
        let (u, v) = halton(k);
        let s = c(0.005 + 0.99 * u, 20.0 * v - 10.0);
        let r = log_gamma(s).and_then(|a| Ok((a + log_gamma(1.0 - s)?).exp())).map(|lhs| rel(lhs, PI / (PI * s).sin()));
        w.record(format!("s={s}"), r);
    }
    checks.push(("reflection", w, 1e-11));

    let mut w = Worst::default();
    for m in 2..=4u32 {
        let mf = m as f64;
        for k in 0..50 {
            let (u, v) = halton(k + 300);
            let s = c(0.1 + 3.0 * u, 8.0 * v - 4.0);
            let r = gamma(s * mf).and_then(|lhs| {
                let mut rhs = ((s * mf - 0.5) * mf.ln()).exp() * (2.0 * PI).powf((1.0 - mf) / 2.0);
                for j in 0..m {
                    rhs *= gamma(s + j as f64 / mf)?;
                }
                Ok(rel(lhs, rhs))
            });
            w.record(format!("m={m} s={s}"), r);
        }
    }
    checks.push(("multiplication", w, 1e-10));

    let mut w = Worst::default();
    for order in [c(0.3, 1.7), c(0.0, 4.0), c(-1.2, -0.5), c(2.5, 9.0)] {
        for x in [0.1, 1.0, 7.5] {
            let r = bessel_k(order.conj(), x).and_then(|a| Ok(rel(a, bessel_k(order, x)?.conj())));
            w.record(format!("conj order={order} x={x}"), r);
        }
    }
    for tau in [0.5, 3.0, 12.0] {
        for x in [0.2, 2.0] {
            let r = bessel_k(c(0.0, tau), x).and_then(|a| {
                let b = bessel_k(c(0.0, -tau), x)?;
                Ok(rel(a, b).max(a.im.abs() / a.norm()))
            });
            w.record(format!("real even tau={tau} x={x}"), r);
        }
    }
    checks.push(("conjugate symmetry", w, 1e-12));

    let mut w = Worst::default();
    for delta in [0.0, PI / 6.0, PI / 3.0, 1.4] {
        for x in [0.5, 1.0, 2.0] {
            let k0 = bessel_k(c(0.0, 0.0), x * delta.cos()).expect("K0").re;
            for j in 0..=40 {
                let tau = -10.0 + 0.5 * j as f64;
                let r = bessel_k(c(0.0, tau), x).map(|k| {
                    let rhs = (-delta * tau.abs()).exp() * k0;
                    // 0 when the bound holds, the excess otherwise
                    (k.norm() - rhs - 1e-12).max(0.0)
                });
                w.record(format!("delta={delta:.3} x={x} tau={tau}"), r);
            }
        }
    }
    checks.push(("uniform K bound", w, 0.0));

    let mut w = Worst::default();
    for j in 0..20 {
        let x = 0.05 * 1.4f64.powi(j);
        let k_want = (PI / (2.0 * x)).sqrt() * (-x).exp();
        let i_want = (2.0 / (PI * x)).sqrt() * x.sinh();
        w.record(format!("K x={x}"), bessel_k(c(0.5, 0.0), x).map(|k| rel(k, c(k_want, 0.0))));
        w.record(format!("I x={x}"), bessel_i(c(0.5, 0.0), c(x, 0.0)).map(|i| rel(i, c(i_want, 0.0))));
    }
    checks.push(("half-order forms", w, 1e-11));

    let mut pass = true;
    let mut parts = Vec::new();
    for (name, w, tol) in &checks {
        let (ok, d) = w.verdict(*tol);
        pass &= ok;
        parts.push(format!("{name} {}: {d}", if ok { "ok" } else { "FAILED" }));
    }
    (pass, parts.join("; "))
}

fn main() -> ExitCode {
    let q = QuadratureControl::default();
    type Criterion<'a> = (&'a str, Duration, Box<dyn Fn() -> (bool, String) + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("kernel dual representation", Duration::from_secs(30), Box::new(|| kernel_dual_representation(&q))),
        ("forward dual path", Duration::from_secs(120), Box::new(|| forward_dual_path(&q))),
        ("round trips", Duration::from_secs(300), Box::new(|| round_trips(&q))),
        ("inversion kernel identities", Duration::from_secs(10), Box::new(inversion_kernel_identities)),
        ("rho closed forms", Duration::from_secs(10), Box::new(|| rho_closed_forms(&q))),
        ("index integral", Duration::from_secs(60), Box::new(|| index_integral(&q))),
        ("index expansion", Duration::from_secs(600), Box::new(|| mkl_expansion(&q))),
        ("norm bounds", Duration::from_secs(120), Box::new(|| norm_bounds(&q))),
        ("special functions", Duration::from_secs(30), Box::new(special_functions)),
    ];
    let mut unexpected = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        let start = Instant::now();
        let (ok, detail) = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = ok && in_time;
        let note = if !in_time { " [over time budget]" } else { "" };
        println!(
            "criterion {n}: {} {name} ({:.1}s of {}s){note} - {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            if KNOWN_RED.contains(&n) {
                println!("criterion {n}: known failure, see README");
            } else {
                unexpected += 1;
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
