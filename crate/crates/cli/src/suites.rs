//! Identity suites: each case compares two independent evaluations.

use clap::ValueEnum;
use num_complex::Complex64;
use std::f64::consts::PI;

use indexlab::complexfn::{bessel_k, gamma};
use indexlab::kernels::{rho, rho_quadrature, TransformFamily};
use indexlab::mellin::bessel_k0_entry;
use indexlab::quad::QuadratureControl;
use indexlab::transforms::{index_identity, mkl_forward_barnes, mkl_forward_direct, mkl_parseval};
use indexlab::Result;

use crate::output::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Gamma,
    BesselBound,
    IndexIntegral,
    Rho,
    #[value(name = "parseval-431")]
    Parseval431,
}

/// One identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCase {
    pub case: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityCase {
    fn relative(case: String, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        let rel_error = (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
        IdentityCase {
            case,
            lhs,
            rhs,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const MULTIPLICATION_POINTS: [(f64, f64); 4] = [(0.3, 1.7), (1.2, -0.4), (2.5, 3.0), (-0.7, 0.9)];

/// Gauss–Legendre multiplication for m = 2, 3, 4 and reflection.
pub fn gamma_suite() -> Result<Vec<IdentityCase>> {
    let mut cases = Vec::new();
    for m in 2..=4u32 {
        let mf = m as f64;
        for (re, im) in MULTIPLICATION_POINTS {
            let s = c(re, im);
            let mut rhs = ((s * mf - 0.5) * mf.ln()).exp() * (2.0 * PI).powf((1.0 - mf) / 2.0);
            for k in 0..m {
                rhs *= gamma(s + k as f64 / mf)?;
            }
            let lhs = gamma(s * mf)?;
            cases.push(IdentityCase::relative(format!("multiplication m={m} s={s}"), lhs, rhs, 1e-10));
        }
    }
    for (re, im) in MULTIPLICATION_POINTS {
        let z = c(re, im);
        let lhs = gamma(z)? * gamma(1.0 - z)?;
        let rhs = PI / (z * PI).sin();
        cases.push(IdentityCase::relative(format!("reflection z={z}"), lhs, rhs, 1e-10));
    }
    Ok(cases)
}

/// |K_{i tau}(x)| <= e^{-delta |tau|} K_0(x cos delta).
pub fn bessel_bound_suite() -> Result<Vec<IdentityCase>> {
    let mut cases = Vec::new();
    for delta in [0.0, PI / 6.0, PI / 3.0, 1.4] {
        for x in [0.5, 1.0, 2.0] {
            let k0 = bessel_k(c(0.0, 0.0), x * f64::cos(delta))?.re;
            for tau in [-10.0, -5.0, -1.0, 0.0, 2.5, 7.0, 10.0] {
                let lhs = bessel_k(c(0.0, tau), x)?.norm();
                let rhs = (-delta * f64::abs(tau)).exp() * k0;
                let excess = (lhs - rhs).max(0.0) / rhs;
                cases.push(IdentityCase {
                    case: format!("delta={delta:.4} x={x} tau={tau}"),
                    lhs: c(lhs, 0.0),
                    rhs: c(rhs, 0.0),
                    rel_error: excess,
                    tolerance: 1e-12 / rhs,
                    pass: lhs <= rhs + 1e-12,
                });
            }
        }
    }
    Ok(cases)
}

/// The index integral against its closed form on {1,2} x {0.5,1,2}.
pub fn index_integral_suite(control: &QuadratureControl) -> Result<Vec<IdentityCase>> {
    let mut cases = Vec::new();
    for x in [1.0, 2.0] {
        for y in [0.5, 1.0, 2.0] {
            let (lhs, rhs) = index_identity(x, y, control)?;
            cases.push(IdentityCase::relative(format!("x={x} y={y}"), c(lhs, 0.0), c(rhs, 0.0), 1e-6));
        }
    }
    Ok(cases)
}

/// Sample points inside a Mellin strip (lo, hi).
pub fn strip_points((lo, hi): (f64, f64)) -> [Complex64; 5] {
    let re = |t: f64| if hi.is_finite() { lo + t * (hi - lo) } else { lo + 4.0 * t };
    [
        c(re(0.25), 0.0),
        c(re(0.5), 0.0),
        c(re(0.5), 1.5),
        c(re(0.75), -0.8),
        c(re(0.4), 4.0),
    ]
}

/// Families whose rho has a closed form.
pub fn rho_families() -> Vec<TransformFamily> {
    vec![
        TransformFamily::ExpKl,
        TransformFamily::PowerExp { m: 2 },
        TransformFamily::PowerExp { m: 3 },
        TransformFamily::OnePlusT { n: 1 },
        TransformFamily::OnePlusT { n: 3 },
        TransformFamily::IncGamma,
        TransformFamily::OnePlusT2 { n: 1 },
        TransformFamily::OnePlusT2 { n: 2 },
    ]
}

/// Closed-form rho against the defining integral, five strip points per family.
pub fn rho_suite(control: &QuadratureControl) -> Result<Vec<IdentityCase>> {
    let mut cases = Vec::new();
    for family in rho_families() {
        let strip = family.rho_strip()?;
        let mut points = strip_points(strip).to_vec();
        if family == TransformFamily::ExpKl {
            points[0] = c(1.0, 0.0);
        }
        for s in points {
            let lhs = rho(&family, s)?;
            let rhs = rho_quadrature(&family, s, control)?;
            cases.push(IdentityCase::relative(format!("{family} s={s}"), lhs, rhs, 1e-9));
        }
    }
    Ok(cases)
}

/// For f = 2 K_0(2 sqrt x): the Barnes form of g against the Bessel-kernel
/// integral, and against the h-function form, at tau = 0, 1, 2.
pub fn parseval_suite(control: &QuadratureControl) -> Result<Vec<IdentityCase>> {
    let f = bessel_k0_entry(0.5)?.image;
    let mut cases = Vec::new();
    for tau in [0.0, 1.0, 2.0] {
        let barnes = mkl_forward_barnes(&f, tau, control)?;
        let direct = mkl_forward_direct(&f, tau, control)?;
        cases.push(IdentityCase::relative(format!("barnes=kernel tau={tau}"), barnes, direct, 1e-7));
        let h_form = mkl_parseval(&f, tau, control)?;
        cases.push(IdentityCase::relative(format!("barnes=h-form tau={tau}"), barnes, h_form, 1e-7));
    }
    Ok(cases)
}

pub fn run_suite(suite: Suite, control: &QuadratureControl) -> Result<Vec<IdentityCase>> {
    match suite {
        Suite::Gamma => gamma_suite(),
        Suite::BesselBound => bessel_bound_suite(),
        Suite::IndexIntegral => index_integral_suite(control),
        Suite::Rho => rho_suite(control),
        Suite::Parseval431 => parseval_suite(control),
    }
}

pub fn identity_table(cases: &[IdentityCase]) -> Table {
    let mut t = Table::new(&["case", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_error", "tolerance", "pass"]);
    for k in cases {
        t.push(vec![
            k.case.clone().into(),
            k.lhs.re.into(),
            k.lhs.im.into(),
            k.rhs.re.into(),
            k.rhs.im.into(),
            k.rel_error.into(),
            k.tolerance.into(),
            k.pass.into(),
        ]);
    }
    t
}
