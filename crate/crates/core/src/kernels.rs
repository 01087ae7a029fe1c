//! Transform families: forward kernels by their defining integrals and in
//! closed form, inversion kernels as coefficient series and in closed form,
//! and the Mellin multiplier rho.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::complexfn::{
    bessel_k, binomial, factorial, gamma, generalized_hyp, log_gamma, non_positive_integer,
    reciprocal_gamma, upper_incomplete_gamma_scaled, bessel_i, PrecisionBudget,
};
use crate::error::{Error, Result};
use crate::quad::{integrate_log_axis, QuadratureControl};

/// Clearance from a gamma pole below which a closed form is treated as
/// sitting on a (removable) singularity.
pub const CLOSED_FORM_POLE_MARGIN: f64 = 1e-6;
/// Beyond this x the 1F2 terms of the (1 + t^2)^{-n} kernel grow like e^x
/// and cancel; the kernel is then taken by quadrature.
pub const ONE_PLUS_T2_CLOSED_MAX_X: f64 = 12.0;

// Closed forms with cancelling gamma poles lose about -log10(d) digits at
// distance d; inside this radius they are evaluated as a circle mean.
const CANCELLATION_RADIUS: f64 = 0.05;
const CIRCLE_RADIUS: f64 = 0.25;
const CIRCLE_POINTS: usize = 32;

// r(t) must not vanish on (0, inf); checked on this log grid.
const R_GRID_LO: f64 = 1e-4;
const R_GRID_HI: f64 = 1e4;
const R_GRID_POINTS: usize = 801;

/// An index-transform family.
///
/// `GeneralLaplaceMellin`, `ExpKl` and `PowerExp` use the kernel
/// int e^{-x/t} t^{z-1} / r(t) dt with r(t) = sum a_k t^k (for `ExpKl`,
/// r(t) = e^t; for `PowerExp`, r(t) = e^{t^m}). `OnePlusT`, `IncGamma` and
/// `OnePlusT2` use int e^{-xt} t^{z-1} / P(t) dt with P(t) = (1+t)^n or
/// (1+t^2)^n; `IncGamma` is the n = 1 member of `OnePlusT` carrying its own
/// representation and strips. `TruncatedMellin` has the pointwise kernel
/// x^{-z} e^{-ax}.
#[derive(Clone, Debug, PartialEq)]
pub enum TransformFamily {
    TruncatedMellin { a: f64 },
    GeneralLaplaceMellin { coeffs: Vec<Complex64> },
    ExpKl,
    PowerExp { m: u32 },
    OnePlusT { n: u32 },
    IncGamma,
    OnePlusT2 { n: u32 },
}

/// A kernel value together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    /// False when no closed form exists and the value is the defining integral.
    pub closed_form: bool,
}

impl TransformFamily {
    pub fn truncated_mellin(a: f64) -> Result<Self> {
        let f = TransformFamily::TruncatedMellin { a };
        f.validate()?;
        Ok(f)
    }

    /// r(t) = sum coeffs[k] t^k.
    pub fn general(coeffs: Vec<Complex64>) -> Result<Self> {
        let f = TransformFamily::GeneralLaplaceMellin { coeffs };
        f.validate()?;
        Ok(f)
    }

    pub fn power_exp(m: u32) -> Result<Self> {
        let f = TransformFamily::PowerExp { m };
        f.validate()?;
        Ok(f)
    }

    pub fn one_plus_t(n: u32) -> Result<Self> {
        let f = TransformFamily::OnePlusT { n };
        f.validate()?;
        Ok(f)
    }

    pub fn one_plus_t2(n: u32) -> Result<Self> {
        let f = TransformFamily::OnePlusT2 { n };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TransformFamily::TruncatedMellin { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::InvalidParameter(format!("a = {a} must be positive")));
                }
            }
            TransformFamily::GeneralLaplaceMellin { coeffs } => validate_coeffs(coeffs)?,
            TransformFamily::PowerExp { m } => {
                if *m == 0 || *m > 16 {
                    return Err(Error::InvalidParameter(format!("m = {m} must lie in 1..=16")));
                }
            }
            TransformFamily::OnePlusT { n } | TransformFamily::OnePlusT2 { n } => {
                if *n == 0 || *n > 20 {
                    return Err(Error::InvalidParameter(format!("n = {n} must lie in 1..=20")));
                }
            }
            TransformFamily::ExpKl | TransformFamily::IncGamma => {}
        }
        Ok(())
    }

    /// True for the families with kernel int e^{-xt} t^{z-1} / P(t) dt.
    pub fn is_polynomial(&self) -> bool {
        matches!(
            self,
            TransformFamily::OnePlusT { .. } | TransformFamily::IncGamma | TransformFamily::OnePlusT2 { .. }
        )
    }

    /// Coefficients of P(t) for the polynomial families.
    pub fn polynomial(&self) -> Option<Vec<f64>> {
        match self {
            TransformFamily::OnePlusT { n } => Some((0..=*n).map(|k| binomial(*n, k)).collect()),
            TransformFamily::IncGamma => Some(vec![1.0, 1.0]),
            TransformFamily::OnePlusT2 { n } => {
                let mut c = vec![0.0; 2 * *n as usize + 1];
                for k in 0..=*n {
                    c[2 * k as usize] = binomial(*n, k);
                }
                Some(c)
            }
            _ => None,
        }
    }

    /// Region (lo, hi) of Re z where the kernel's defining integral converges.
    pub fn kernel_region(&self) -> (f64, f64) {
        match self {
            TransformFamily::TruncatedMellin { .. } | TransformFamily::ExpKl | TransformFamily::PowerExp { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            TransformFamily::GeneralLaplaceMellin { coeffs } => (f64::NEG_INFINITY, degree(coeffs) as f64),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Region (lo, hi) of Re z where the transform of a function represented
    /// on Re s = c0 is defined by both its direct integral and its
    /// Mellin–Barnes representation.
    pub fn forward_region(&self, c0: f64) -> Result<(f64, f64)> {
        check_c0(c0)?;
        Ok(match self {
            TransformFamily::TruncatedMellin { .. } => (f64::NEG_INFINITY, 1.0 - c0),
            TransformFamily::ExpKl | TransformFamily::PowerExp { .. } => (c0 - 1.0, f64::INFINITY),
            TransformFamily::GeneralLaplaceMellin { coeffs } => (c0 - 1.0, degree(coeffs) as f64 + c0 - 1.0),
            TransformFamily::OnePlusT { n } | TransformFamily::OnePlusT2 { n } => (0.0, *n as f64 - c0),
            TransformFamily::IncGamma => (0.0, 1.0 - c0),
        })
    }

    /// Strip (lo, hi) of the abscissa gamma of the inversion integral.
    pub fn inversion_strip(&self, c0: f64) -> Result<(f64, f64)> {
        check_c0(c0)?;
        Ok(match self {
            TransformFamily::TruncatedMellin { .. } => (f64::NEG_INFINITY, 1.0 - c0),
            TransformFamily::ExpKl | TransformFamily::PowerExp { .. } | TransformFamily::GeneralLaplaceMellin { .. } => {
                (c0 - 1.0, 0.0)
            }
            TransformFamily::OnePlusT { n } | TransformFamily::OnePlusT2 { n } => (*n as f64 - 1.0, *n as f64 - c0),
            TransformFamily::IncGamma => (0.0, 1.0 - c0),
        })
    }

    /// Mid-strip inversion abscissa; a quarter inside the edge of a half-line.
    pub fn default_gamma(&self, c0: f64) -> Result<f64> {
        let (lo, hi) = self.inversion_strip(c0)?;
        Ok(if lo.is_finite() { 0.5 * (lo + hi) } else { hi - 0.25 })
    }

    /// Strip (lo, hi) of Re s where rho(s) converges.
    pub fn rho_strip(&self) -> Result<(f64, f64)> {
        Ok(match self {
            TransformFamily::TruncatedMellin { .. } => {
                return Err(Error::InvalidParameter(
                    "the truncated Mellin family has no multiplier rho".into(),
                ))
            }
            TransformFamily::ExpKl | TransformFamily::PowerExp { .. } => (0.0, f64::INFINITY),
            TransformFamily::GeneralLaplaceMellin { coeffs } => (0.0, degree(coeffs) as f64),
            TransformFamily::OnePlusT { n } => (0.0, *n as f64),
            TransformFamily::IncGamma => (0.0, 1.0),
            TransformFamily::OnePlusT2 { n } => (0.0, 2.0 * *n as f64),
        })
    }

    /// ln r(t) at t = e^v (or ln P(t) for the polynomial families).
    fn ln_denominator(&self, v: f64) -> Complex64 {
        let re = |x: f64| Complex64::new(x, 0.0);
        match self {
            TransformFamily::TruncatedMellin { .. } => re(0.0),
            TransformFamily::ExpKl => re(v.exp()),
            TransformFamily::PowerExp { m } => re((*m as f64 * v).exp()),
            TransformFamily::GeneralLaplaceMellin { coeffs } => ln_poly(coeffs, v),
            TransformFamily::OnePlusT { n } => re(*n as f64 * ln_1p_exp(v)),
            TransformFamily::IncGamma => re(ln_1p_exp(v)),
            TransformFamily::OnePlusT2 { n } => re(*n as f64 * ln_1p_exp(2.0 * v)),
        }
    }
}

fn check_c0(c0: f64) -> Result<()> {
    if c0 > 0.0 && c0 < 1.0 {
        Ok(())
    } else {
        Err(Error::Strip {
            what: "abscissa c0",
            value: c0,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

fn degree(coeffs: &[Complex64]) -> usize {
    coeffs.iter().rposition(|a| *a != Complex64::new(0.0, 0.0)).unwrap_or(0)
}

// ln(1 + e^v) without overflow
fn ln_1p_exp(v: f64) -> f64 {
    if v > 0.0 {
        v + (-v).exp().ln_1p()
    } else {
        v.exp().ln_1p()
    }
}

// ln(sum a_k e^{kv}), factoring out the dominant end of the polynomial.
fn ln_poly(coeffs: &[Complex64], v: f64) -> Complex64 {
    let d = degree(coeffs);
    if v <= 0.0 {
        let t = v.exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in coeffs[..=d].iter().rev() {
            acc = acc * t + a;
        }
        acc.ln()
    } else {
        // r(t) = t^d sum a_k t^{k-d}
        let u = (-v).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in coeffs[..=d].iter() {
            acc = acc * u + a;
        }
        acc.ln() + d as f64 * v
    }
}

fn validate_coeffs(coeffs: &[Complex64]) -> Result<()> {
    if coeffs.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::InvalidParameter("coefficients of r must be finite".into()));
    }
    if coeffs.len() > 64 {
        return Err(Error::InvalidParameter(format!(
            "{} coefficients exceed the supported 64",
            coeffs.len()
        )));
    }
    let d = degree(coeffs);
    if d == 0 {
        return Err(Error::InvalidParameter("r must have degree at least 1".into()));
    }
    if coeffs[0] == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("r(0) must be nonzero".into()));
    }
    // r must not vanish on (0, inf): no zero and, for real coefficients, no
    // sign change between neighbouring grid points
    let real = coeffs.iter().all(|a| a.im == 0.0);
    let (lv, hv) = (R_GRID_LO.ln(), R_GRID_HI.ln());
    let mut previous: Option<f64> = None;
    for j in 0..R_GRID_POINTS {
        let v = lv + (hv - lv) * j as f64 / (R_GRID_POINTS - 1) as f64;
        let t = v.exp();
        let scale: f64 = coeffs.iter().enumerate().map(|(k, a)| a.norm() * t.powi(k as i32)).sum();
        let r: Complex64 = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * t + a);
        if r.norm() <= 1e-12 * scale {
            return Err(Error::InvalidParameter(format!("r vanishes near t = {t:.4e}")));
        }
        if real {
            if let Some(p) = previous {
                if p * r.re < 0.0 {
                    return Err(Error::InvalidParameter(format!("r changes sign near t = {t:.4e}")));
                }
            }
            previous = Some(r.re);
        }
    }
    Ok(())
}

fn region_check(what: &'static str, z: Complex64, (lo, hi): (f64, f64)) -> Result<()> {
    if z.re > lo && z.re < hi {
        Ok(())
    } else {
        Err(Error::Region {
            what,
            re: z.re,
            lo,
            hi,
        })
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("x = {x} must be positive and finite")))
    }
}

/// x^w for x > 0, principal real logarithm.
fn xpow(x: f64, w: Complex64) -> Complex64 {
    (w * x.ln()).exp()
}

/// The forward kernel at (z, x) from its defining integral.
///
/// Integrands are formed in the variable v = ln t as one exponential, so
/// t^z, e^{-x/t} and 1/r(t) never overflow separately.
pub fn forward_kernel(family: &TransformFamily, z: Complex64, x: f64, control: &QuadratureControl) -> Result<Complex64> {
    family.validate()?;
    check_x(x)?;
    region_check("forward kernel", z, family.kernel_region())?;
    match family {
        TransformFamily::TruncatedMellin { a } => Ok((-z * x.ln() - a * x).exp()),
        TransformFamily::ExpKl | TransformFamily::PowerExp { .. } | TransformFamily::GeneralLaplaceMellin { .. } => {
            integrate_log_axis(|v| (z * v - x * (-v).exp() - family.ln_denominator(v)).exp(), control)
        }
        _ => integrate_log_axis(|v| (z * v - x * v.exp() - family.ln_denominator(v)).exp(), control),
    }
}

/// The forward kernel from the family's closed special-function form.
///
/// Closed forms exist for `ExpKl` (2 x^{z/2} K_z(2 sqrt x)), `IncGamma` and
/// `OnePlusT{1}` (Gamma(z) e^x Gamma(1-z, x)), `OnePlusT2` (three 1F2 terms, for
/// x up to [`ONE_PLUS_T2_CLOSED_MAX_X`])
/// and the pointwise `TruncatedMellin` kernel. Other families return the
/// defining integral with `closed_form = false`.
pub fn forward_kernel_closed(
    family: &TransformFamily,
    z: Complex64,
    x: f64,
    control: &QuadratureControl,
) -> Result<KernelValue> {
    family.validate()?;
    check_x(x)?;
    region_check("forward kernel", z, family.kernel_region())?;
    let closed = |value| Ok(KernelValue { value, closed_form: true });
    match family {
        TransformFamily::TruncatedMellin { a } => closed((-z * x.ln() - a * x).exp()),
        TransformFamily::ExpKl => {
            let k = bessel_k(z, 2.0 * x.sqrt())?;
            closed(xpow(x, z / 2.0) * k * 2.0)
        }
        TransformFamily::IncGamma | TransformFamily::OnePlusT { n: 1 } => closed(incomplete_gamma_kernel(z, x)?),
        TransformFamily::OnePlusT2 { n } if x <= ONE_PLUS_T2_CLOSED_MAX_X => closed(one_plus_t2_closed(*n, z, x)?),
        _ => Ok(KernelValue {
            value: forward_kernel(family, z, x, control)?,
            closed_form: false,
        }),
    }
}

// Gamma(z) e^x Gamma(1 - z, x)
fn incomplete_gamma_kernel(z: Complex64, x: f64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    Ok(gamma(z)? * upper_incomplete_gamma_scaled(one - z, x)?)
}

fn nearest_integer_distance(w: Complex64) -> f64 {
    (w - Complex64::new(w.re.round(), 0.0)).norm()
}

/// int_0^inf e^{-xt} t^{z-1} (1+t^2)^{-n} dt as the three-term 1F2
/// combination. The individual terms have poles at integer z that cancel in
/// the sum; near them the sum is taken as its mean over a circle of radius
/// 1/4, which is exact for the analytic kernel.
fn one_plus_t2_closed(n: u32, z: Complex64, x: f64) -> Result<Complex64> {
    if nearest_integer_distance(z) < CANCELLATION_RADIUS {
        let radius = CIRCLE_RADIUS.min(0.5 * z.re);
        if radius < 2.0 * CANCELLATION_RADIUS {
            return Err(Error::Pole {
                at: z,
                margin: nearest_integer_distance(z),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..CIRCLE_POINTS {
            let w = z + Complex64::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / CIRCLE_POINTS as f64);
            acc += one_plus_t2_terms(n, w, x)?;
        }
        return Ok(acc / CIRCLE_POINTS as f64);
    }
    one_plus_t2_terms(n, z, x)
}

fn one_plus_t2_terms(n: u32, z: Complex64, x: f64) -> Result<Complex64> {
    let c = |v: f64| Complex64::new(v, 0.0);
    let nf = n as f64;
    for p in [z - 2.0 * nf, nf - z / 2.0, nf - (z + 1.0) / 2.0] {
        if non_positive_integer(Complex64::new(p.re.round(), 0.0)).is_some()
            && nearest_integer_distance(p) <= CLOSED_FORM_POLE_MARGIN
        {
            return Err(Error::Pole {
                at: z,
                margin: nearest_integer_distance(p),
            });
        }
    }
    let budget = PrecisionBudget::default();
    let w = c(-x * x / 4.0);
    let norm = 1.0 / (2.0 * factorial(n - 1));
    let t1 = xpow(x, 2.0 * nf - z)
        * gamma(z - 2.0 * nf)?
        * generalized_hyp(&[c(nf)], &[1.0 + nf - z / 2.0, nf + (1.0 - z) / 2.0], w, &budget)?;
    let t2 = gamma(nf - z / 2.0)? * gamma(z / 2.0)? * norm * generalized_hyp(&[z / 2.0], &[c(0.5), 1.0 - nf + z / 2.0], w, &budget)?;
    let t3 = gamma(nf - (z + 1.0) / 2.0)?
        * gamma((z + 1.0) / 2.0)?
        * norm
        * x
        * generalized_hyp(&[(z + 1.0) / 2.0], &[c(1.5), (3.0 + z) / 2.0 - nf], w, &budget)?;
    Ok(t1 + t2 - t3)
}

/// Coefficients a_k of r(t) or P(t) as (power, coefficient) pairs, with the
/// exponential series truncated once 1/k! is negligible.
fn series_terms(family: &TransformFamily) -> Vec<(u32, Complex64)> {
    let c = |v: f64| Complex64::new(v, 0.0);
    match family {
        TransformFamily::TruncatedMellin { .. } => vec![],
        TransformFamily::GeneralLaplaceMellin { coeffs } => coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != c(0.0))
            .map(|(k, a)| (k as u32, *a))
            .collect(),
        TransformFamily::ExpKl => (0..171).map(|k| (k, c(1.0 / factorial(k)))).collect(),
        TransformFamily::PowerExp { m } => (0..171).map(|k| (m * k, c(1.0 / factorial(k)))).collect(),
        _ => family
            .polynomial()
            .unwrap_or_default()
            .into_iter()
            .enumerate()
            .filter(|(_, a)| *a != 0.0)
            .map(|(k, a)| (k as u32, c(a)))
            .collect(),
    }
}

/// The inversion kernel as the coefficient series: sum a_k x^{k-z-1} / Gamma(k-z)
/// for the r(t) families, sum a_k x^{z-k} / Gamma(1+z-k) for the polynomial
/// families, and e^{ax} x^{z-1} for the truncated Mellin family.
pub fn inverse_kernel_series(family: &TransformFamily, z: Complex64, x: f64) -> Result<Complex64> {
    family.validate()?;
    check_x(x)?;
    let lx = x.ln();
    if let TransformFamily::TruncatedMellin { a } = family {
        return Ok(((z - 1.0) * lx + a * x).exp());
    }
    let poly = family.is_polynomial();
    let budget = PrecisionBudget::default();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    // terms of the infinite series grow until k passes |z| and x
    let settle = z.norm() + x + 2.0;
    for (k, a) in series_terms(family) {
        let kf = k as f64;
        let term = if poly {
            a * ((z - kf) * lx).exp() * reciprocal_gamma(1.0 + z - kf)
        } else {
            a * ((kf - z - 1.0) * lx).exp() * reciprocal_gamma(kf - z)
        };
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(Error::NonFinite(format!("inverse kernel term k = {k}")));
        }
        sum += term;
        if kf > settle && budget.negligible(term.norm(), sum.norm()) {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    match family {
        TransformFamily::ExpKl | TransformFamily::PowerExp { .. } => Err(Error::SeriesDivergence { terms: 171 }),
        _ => Ok(sum),
    }
}

/// The inversion kernel in the family's closed form: the I-Bessel form for
/// `ExpKl`, the hyper-Bessel 0F_m form for `PowerExp`, the Laguerre form for
/// `OnePlusT`, x^z/Gamma(z) (1/z + 1/x) for `IncGamma` and the 3F0 form for
/// `OnePlusT2`. A coefficient family has no closed form and returns its series.
pub fn inverse_kernel(family: &TransformFamily, z: Complex64, x: f64) -> Result<KernelValue> {
    family.validate()?;
    check_x(x)?;
    let closed = |value| Ok(KernelValue { value, closed_form: true });
    let one = Complex64::new(1.0, 0.0);
    match family {
        TransformFamily::TruncatedMellin { .. } => closed(inverse_kernel_series(family, z, x)?),
        TransformFamily::GeneralLaplaceMellin { .. } => Ok(KernelValue {
            value: inverse_kernel_series(family, z, x)?,
            closed_form: false,
        }),
        TransformFamily::ExpKl => {
            let nu = -(one + z);
            closed(bessel_i(nu, Complex64::new(2.0 * x.sqrt(), 0.0))? * xpow(x, nu / 2.0))
        }
        TransformFamily::PowerExp { m } => closed(hyper_bessel_kernel(*m, z, x)?),
        TransformFamily::OnePlusT { n } => closed(laguerre_kernel(*n, z, x)),
        TransformFamily::IncGamma => {
            if z.norm() <= CLOSED_FORM_POLE_MARGIN {
                return Err(Error::Pole {
                    at: z,
                    margin: z.norm(),
                });
            }
            closed(xpow(x, z) * reciprocal_gamma(z) * (one / z + 1.0 / x))
        }
        TransformFamily::OnePlusT2 { n } => {
            let nf = *n as f64;
            let f = generalized_hyp(
                &[Complex64::new(-nf, 0.0), -z / 2.0, (one - z) / 2.0],
                &[],
                Complex64::new(-4.0 / (x * x), 0.0),
                &PrecisionBudget::default(),
            )?;
            closed(xpow(x, z) * reciprocal_gamma(one + z) * f)
        }
    }
}

/// (2 pi)^{(m-1)/2} m^{1/2} x^{-1} (x/m)^{-z} sum_j (x/m)^{mj}/j! prod_k 1/Gamma(j + (k-z)/m),
/// the 0F_m hyper-Bessel form of the power-exponential inversion kernel.
fn hyper_bessel_kernel(m: u32, z: Complex64, x: f64) -> Result<Complex64> {
    let mf = m as f64;
    let b: Vec<Complex64> = (0..m).map(|k| (k as f64 - z) / mf).collect();
    let w = Complex64::new((x / mf).powi(m as i32), 0.0);
    let prefactor = (2.0 * PI).powf((mf - 1.0) / 2.0) * mf.sqrt() / x * xpow(x / mf, -z);
    let regular = b.iter().all(|bk| bk.re > 0.0 || nearest_integer_distance(*bk) > CLOSED_FORM_POLE_MARGIN);
    if regular {
        let lead: Complex64 = b.iter().map(|bk| reciprocal_gamma(*bk)).product();
        let f = generalized_hyp(&[], &b, w, &PrecisionBudget::default())?;
        return Ok(prefactor * lead * f);
    }
    // a parameter at a gamma pole: sum the regularized series term by term
    let budget = PrecisionBudget::default();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    let settle = z.norm() / mf + w.norm().powf(1.0 / (mf + 1.0)) + 2.0;
    for j in 0..budget.max_terms {
        let jf = j as f64;
        let lw = jf * w.re.ln() - log_gamma(Complex64::new(jf + 1.0, 0.0))?.re;
        let term: Complex64 = b.iter().map(|bk| reciprocal_gamma(jf + bk)).product::<Complex64>() * lw.exp();
        sum += term;
        if jf > settle && budget.negligible(term.norm(), sum.norm()) {
            small += 1;
            if small >= 3 {
                return Ok(prefactor * sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::SeriesDivergence {
        terms: budget.max_terms,
    })
}

/// x^{z-n} n! L_n^{(z-n)}(-x) / Gamma(1+z), with the Laguerre polynomial
/// from its three-term recurrence (polynomial in the order, so pole-free).
fn laguerre_kernel(n: u32, z: Complex64, x: f64) -> Complex64 {
    let alpha = z - n as f64;
    let y = -x;
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = 1.0 + alpha - y;
    if n == 0 {
        cur = prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - y) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    xpow(x, alpha) * factorial(n) * cur * reciprocal_gamma(1.0 + z)
}

fn rho_strip_check(family: &TransformFamily, s: Complex64) -> Result<()> {
    let (lo, hi) = family.rho_strip()?;
    if s.re > lo && s.re < hi {
        Ok(())
    } else {
        Err(Error::Strip {
            what: "rho argument",
            value: s.re,
            lo,
            hi,
        })
    }
}

/// rho(s) = int_0^inf t^{s-1} / r(t) dt (or 1/P(t)) in closed form; a
/// coefficient family has none and is integrated.
pub fn rho(family: &TransformFamily, s: Complex64) -> Result<Complex64> {
    family.validate()?;
    rho_strip_check(family, s)?;
    match family {
        TransformFamily::ExpKl => gamma(s),
        TransformFamily::PowerExp { m } => Ok(gamma(s / *m as f64)? / *m as f64),
        TransformFamily::OnePlusT { n } => {
            let nf = *n as f64;
            Ok(gamma(s)? * gamma(nf - s)? / factorial(n - 1))
        }
        TransformFamily::IncGamma => Ok(PI / crate::complexfn::sin_pi(s)),
        TransformFamily::OnePlusT2 { n } => {
            let nf = *n as f64;
            Ok(gamma(s / 2.0)? * gamma(nf - s / 2.0)? / (2.0 * factorial(n - 1)))
        }
        TransformFamily::GeneralLaplaceMellin { .. } => rho_quadrature(family, s, &QuadratureControl::default()),
        TransformFamily::TruncatedMellin { .. } => unreachable!("rejected by rho_strip"),
    }
}

/// rho(s) from its defining integral.
pub fn rho_quadrature(family: &TransformFamily, s: Complex64, control: &QuadratureControl) -> Result<Complex64> {
    family.validate()?;
    rho_strip_check(family, s)?;
    integrate_log_axis(|v| (s * v - family.ln_denominator(v)).exp(), control)
}

impl fmt::Display for TransformFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformFamily::TruncatedMellin { a } => write!(f, "truncated-mellin:a={a}"),
            TransformFamily::GeneralLaplaceMellin { coeffs } => {
                write!(f, "general:")?;
                for (k, a) in coeffs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    if a.im == 0.0 {
                        write!(f, "{}", a.re)?;
                    } else {
                        write!(f, "{}{:+}i", a.re, a.im)?;
                    }
                }
                Ok(())
            }
            TransformFamily::ExpKl => write!(f, "exp-kl"),
            TransformFamily::PowerExp { m } => write!(f, "power-exp:{m}"),
            TransformFamily::OnePlusT { n } => write!(f, "one-plus-t:{n}"),
            TransformFamily::IncGamma => write!(f, "inc-gamma"),
            TransformFamily::OnePlusT2 { n } => write!(f, "one-plus-t2:{n}"),
        }
    }
}

/// Family names accepted by [`TransformFamily::from_str`].
pub const FAMILY_NAMES: [&str; 7] = [
    "truncated-mellin[:a=<a>]",
    "exp-kl",
    "power-exp:<m>",
    "one-plus-t:<n>",
    "inc-gamma",
    "one-plus-t2:<n>",
    "general:<a0>,<a1>,...",
];

impl FromStr for TransformFamily {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        let name = name.trim();
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (name, None),
        };
        let bad = || Error::InvalidParameter(format!("unknown family '{name}'; expected one of {FAMILY_NAMES:?}"));
        let count = |a: Option<&str>| -> Result<u32> {
            a.ok_or_else(bad)?
                .parse::<u32>()
                .map_err(|e| Error::InvalidParameter(format!("family '{name}': {e}")))
        };
        let family = match head {
            "truncated-mellin" => {
                let a = match arg {
                    None => 1.0,
                    Some(a) => a
                        .strip_prefix("a=")
                        .unwrap_or(a)
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidParameter(format!("family '{name}': {e}")))?,
                };
                TransformFamily::TruncatedMellin { a }
            }
            "exp-kl" if arg.is_none() => TransformFamily::ExpKl,
            "inc-gamma" if arg.is_none() => TransformFamily::IncGamma,
            "power-exp" => TransformFamily::PowerExp { m: count(arg)? },
            "one-plus-t" => TransformFamily::OnePlusT { n: count(arg)? },
            "one-plus-t2" => TransformFamily::OnePlusT2 { n: count(arg)? },
            "general" => {
                let coeffs = arg
                    .ok_or_else(bad)?
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map(|v| Complex64::new(v, 0.0))
                            .map_err(|e| Error::InvalidParameter(format!("family '{name}': {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                TransformFamily::GeneralLaplaceMellin { coeffs }
            }
            _ => return Err(bad()),
        };
        family.validate()?;
        Ok(family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn exp_kl_half_order() {
        let q = QuadratureControl::default();
        let want = PI.sqrt() * (-2f64).exp();
        let v = forward_kernel(&TransformFamily::ExpKl, c(0.5, 0.0), 1.0, &q).unwrap();
        assert!(rel(v, c(want, 0.0)) < 1e-10, "{v}");
        let k = forward_kernel_closed(&TransformFamily::ExpKl, c(0.5, 0.0), 1.0, &q).unwrap();
        assert!(k.closed_form && rel(k.value, c(want, 0.0)) < 1e-12);
    }

    #[test]
    fn incomplete_gamma_kernel_at_one() {
        // e E1(1)
        let q = QuadratureControl::default();
        let want = 0.596_347_362_323_194_1;
        for f in [TransformFamily::IncGamma, TransformFamily::OnePlusT { n: 1 }] {
            let v = forward_kernel(&f, c(1.0, 0.0), 1.0, &q).unwrap();
            assert!((v.re - want).abs() < 1e-10, "{v}");
            let k = forward_kernel_closed(&f, c(1.0, 0.0), 1.0, &q).unwrap();
            assert!((k.value.re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn one_plus_t2_at_removable_pole() {
        let q = QuadratureControl::default();
        let f = TransformFamily::OnePlusT2 { n: 1 };
        for z in [c(1.0, 0.0), c(2.0, 0.0), c(1.02, 0.3), c(0.7, 0.0)] {
            let a = forward_kernel(&f, z, 2.0, &q).unwrap();
            let b = forward_kernel_closed(&f, z, 2.0, &q).unwrap().value;
            assert!(rel(b, a) < 1e-9, "z = {z}: {a} vs {b}");
        }
    }

    #[test]
    fn polynomial_region_is_enforced() {
        let q = QuadratureControl::default();
        let r = forward_kernel(&TransformFamily::OnePlusT { n: 2 }, c(-0.5, 0.0), 1.0, &q);
        assert!(matches!(r, Err(Error::Region { .. })));
    }

    #[test]
    fn inverse_kernel_examples() {
        let v = inverse_kernel(&TransformFamily::ExpKl, c(-0.5, 0.0), 1.0).unwrap().value;
        let want = (1.0 / PI).sqrt() * 2f64.cosh();
        assert!(rel(v, c(want, 0.0)) < 1e-12);
        let s = inverse_kernel_series(&TransformFamily::ExpKl, c(-0.5, 0.0), 1.0).unwrap();
        assert!(rel(s, c(want, 0.0)) < 1e-13);
        let three = 3.0 / PI.sqrt();
        let l = inverse_kernel(&TransformFamily::OnePlusT { n: 1 }, c(0.5, 0.0), 1.0).unwrap().value;
        let i = inverse_kernel(&TransformFamily::IncGamma, c(0.5, 0.0), 1.0).unwrap().value;
        assert!(rel(l, c(three, 0.0)) < 1e-13 && rel(i, c(three, 0.0)) < 1e-13);
        assert!(matches!(
            inverse_kernel(&TransformFamily::IncGamma, c(0.0, 0.0), 1.0),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn rho_examples() {
        assert!(rel(rho(&TransformFamily::ExpKl, c(1.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-14);
        assert!(rel(rho(&TransformFamily::OnePlusT { n: 1 }, c(0.5, 0.0)).unwrap(), c(PI, 0.0)) < 1e-14);
        assert!(rel(rho(&TransformFamily::OnePlusT2 { n: 1 }, c(1.0, 0.0)).unwrap(), c(PI / 2.0, 0.0)) < 1e-14);
        assert!(matches!(
            rho(&TransformFamily::OnePlusT { n: 2 }, c(2.5, 0.0)),
            Err(Error::Strip { .. })
        ));
    }

    #[test]
    fn names_round_trip() {
        for name in ["truncated-mellin:a=2", "exp-kl", "power-exp:3", "one-plus-t:2", "inc-gamma", "one-plus-t2:1", "general:1,2,1"] {
            let f: TransformFamily = name.parse().unwrap();
            assert_eq!(f.to_string(), name);
        }
        assert_eq!("truncated-mellin".parse::<TransformFamily>().unwrap(), TransformFamily::TruncatedMellin { a: 1.0 });
        assert!("power-exp".parse::<TransformFamily>().is_err());
        assert!("power-exp:0".parse::<TransformFamily>().is_err());
        assert!("exp-kl:2".parse::<TransformFamily>().is_err());
        // r(t) = 1 - t vanishes at t = 1
        assert!("general:1,-1".parse::<TransformFamily>().is_err());
        // r(t) = 1 - 2t + 2t^2 has no positive root
        assert!("general:1,-2,2".parse::<TransformFamily>().is_ok());
    }

    #[test]
    fn strips() {
        let f = TransformFamily::OnePlusT { n: 2 };
        assert_eq!(f.inversion_strip(0.5).unwrap(), (1.0, 1.5));
        assert_eq!(f.default_gamma(0.5).unwrap(), 1.25);
        assert_eq!(TransformFamily::ExpKl.default_gamma(0.5).unwrap(), -0.25);
        assert_eq!(TransformFamily::TruncatedMellin { a: 1.0 }.default_gamma(0.5).unwrap(), 0.25);
        assert!(f.inversion_strip(1.0).is_err());
    }
}
