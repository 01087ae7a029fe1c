//! The modified Kontorovich–Lebedev pair
//! g(tau) = int_0^inf e^{-x/2} K_{i tau}(x/2) f(x) dx and its inversion.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{check_member, Guard};
use crate::complexfn::{bessel_k, log_gamma, reciprocal_gamma};
use crate::error::{Error, Result};
use crate::mellin::MellinImage;
use crate::quad::{
    integrate_log_axis, try_integrate_symmetric_real_line, try_integrate_vertical_line, QuadratureControl,
    VerticalLine,
};

// beyond this e^{-x/2} underflows
const EXP_UNDERFLOW: f64 = 1500.0;

/// Both evaluations of g(tau) and their agreement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MklValue {
    /// Mellin–Barnes value.
    pub value: Complex64,
    /// Direct Bessel-kernel integral.
    pub direct: Complex64,
    /// |value - direct| / |value|.
    pub rel_agreement: f64,
}

fn check_class(f: &MellinImage, control: &QuadratureControl) -> Result<()> {
    let nu = (f.abscissa() - 1.0) / 2.0;
    check_member(f, 0.5, nu, control)
}

fn check_abscissa(f: &MellinImage) -> Result<()> {
    let c0 = f.abscissa();
    if c0 > 0.0 && c0 < 1.0 {
        Ok(())
    } else {
        Err(Error::Strip {
            what: "image abscissa",
            value: c0,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// g(tau) by the Bessel-kernel integral over (0, inf).
pub fn mkl_forward_direct(f: &MellinImage, tau: f64, control: &QuadratureControl) -> Result<Complex64> {
    check_abscissa(f)?;
    let order = Complex64::new(0.0, tau);
    let guard = Guard::new();
    let r = integrate_log_axis(
        |v| {
            let x = v.exp();
            if x == 0.0 || !x.is_finite() {
                return Complex64::new(f64::NAN, 0.0);
            }
            if x > EXP_UNDERFLOW {
                return Complex64::new(0.0, 0.0);
            }
            let k = guard.take(bessel_k(order, x / 2.0)) * (-x / 2.0).exp();
            if k == Complex64::new(0.0, 0.0) {
                return k;
            }
            k * guard.take(f.value_at(x, control)) * x
        },
        control,
    );
    guard.finish(r)
}

/// g(tau) = (sqrt(pi)/2 pi i) int Gamma(1-s-i tau) Gamma(1-s+i tau) / Gamma(3/2-s) f*(s) ds
/// on the image's line.
pub fn mkl_forward_barnes(f: &MellinImage, tau: f64, control: &QuadratureControl) -> Result<Complex64> {
    check_abscissa(f)?;
    let c0 = f.abscissa();
    let one = Complex64::new(1.0, 0.0);
    let it = Complex64::new(0.0, tau);
    let strip = f.strip();
    let clearance = (1.0 - c0).min(c0 - strip.0).min(strip.1 - c0).min(1.0);
    let guard = Guard::new();
    let r = try_integrate_vertical_line(
        |s| {
            let fs = f.at(s);
            if fs == Complex64::new(0.0, 0.0) {
                return fs;
            }
            let g = guard.take((|| Ok((log_gamma(one - s - it)? + log_gamma(one - s + it)?).exp()))());
            g * reciprocal_gamma(1.5 - s) * fs
        },
        VerticalLine::new(c0, clearance),
        control,
    );
    Ok(PI.sqrt() * guard.finish(r)?.value)
}

/// g(tau) by both paths, after checking that f* lies in the class
/// (1/2, (c0 - 1)/2) required by the inversion.
pub fn mkl_forward(f: &MellinImage, tau: f64, control: &QuadratureControl) -> Result<MklValue> {
    check_abscissa(f)?;
    check_class(f, control)?;
    let value = mkl_forward_barnes(f, tau, control)?;
    let direct = mkl_forward_direct(f, tau, control)?;
    let scale = value.norm().max(f64::MIN_POSITIVE);
    Ok(MklValue {
        value,
        direct,
        rel_agreement: (value - direct).norm() / scale,
    })
}

/// h(y) = (1/2 pi i) int f*(s) / Gamma(3/2 - s) y^{-s} ds on the image's line.
pub fn mkl_h(f: &MellinImage, y: f64, control: &QuadratureControl) -> Result<Complex64> {
    check_abscissa(f)?;
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidParameter(format!("y = {y} must be positive")));
    }
    let c0 = f.abscissa();
    let strip = f.strip();
    let ln_y = y.ln();
    let line = VerticalLine::new(c0, (c0 - strip.0).min(strip.1 - c0).min(1.0));
    try_integrate_vertical_line(|s| f.at(s) * reciprocal_gamma(1.5 - s) * (-s * ln_y).exp(), line, control)
        .map(|i| i.value)
}

/// 2 sqrt(pi) int_0^inf K_{2 i tau}(2 sqrt y) h(y) dy, which equals g(tau).
pub fn mkl_parseval(f: &MellinImage, tau: f64, control: &QuadratureControl) -> Result<Complex64> {
    check_abscissa(f)?;
    let order = Complex64::new(0.0, 2.0 * tau);
    let guard = Guard::new();
    let r = integrate_log_axis(
        |v| {
            let y = v.exp();
            if y == 0.0 || !y.is_finite() {
                return Complex64::new(f64::NAN, 0.0);
            }
            let weight = guard.take(bessel_k(order, 2.0 * y.sqrt())) * y;
            if weight == Complex64::new(0.0, 0.0) {
                return weight;
            }
            // h is needed only to abs_tol / |weight|; near y = 0 and y = inf it
            // is a strongly cancelling oscillatory integral
            let abs_tol = (control.abs_tol / weight.norm()).max(control.abs_tol);
            weight * guard.take(mkl_h(f, y, &control.with_tolerances(abs_tol, control.rel_tol)))
        },
        control,
    );
    Ok(2.0 * PI.sqrt() * guard.finish(r)?)
}

/// f(x) = e^{x/2} / (pi^2 x) int_{-inf}^{inf} tau sinh(pi tau) K_{i tau}(x/2) g(tau) d tau,
/// with g from the Mellin–Barnes path.
pub fn mkl_expand(f: &MellinImage, x: f64, control: &QuadratureControl) -> Result<Complex64> {
    check_abscissa(f)?;
    check_class(f, control)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("x = {x} must be positive")));
    }
    let guard = Guard::new();
    let r = try_integrate_symmetric_real_line(
        |tau| {
            if tau == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let weight = tau * (PI * tau).sinh() * guard.take(bessel_k(Complex64::new(0.0, tau), x / 2.0));
            // the weight grows like e^{pi |tau| / 2}; g is needed to abs_tol / |weight|
            let abs_tol = (control.abs_tol / weight.norm().max(1.0)).max(f64::MIN_POSITIVE);
            let inner = control.with_tolerances(abs_tol, control.rel_tol);
            weight * guard.take(mkl_forward_barnes(f, tau, &inner))
        },
        control,
    );
    let integral = guard.finish(r)?;
    Ok((x / 2.0).exp() / (PI * PI * x) * integral.value)
}

/// Closed form 1/2 sqrt(pi^3 y / x) e^{-x/2 - y/x} of the index integral.
pub fn index_identity_rhs(x: f64, y: f64) -> f64 {
    0.5 * (PI.powi(3) * y / x).sqrt() * (-x / 2.0 - y / x).exp()
}

/// int tau sinh(pi tau) K_{i tau}(x/2) K_{2 i tau}(2 sqrt y) d tau by
/// quadrature, paired with its closed form.
pub fn index_identity(x: f64, y: f64, control: &QuadratureControl) -> Result<(f64, f64)> {
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidParameter(format!("x = {x}, y = {y} must be positive")));
    }
    let guard = Guard::new();
    let r = try_integrate_symmetric_real_line(
        |tau| {
            if tau == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let a = guard.take(bessel_k(Complex64::new(0.0, tau), x / 2.0));
            let b = guard.take(bessel_k(Complex64::new(0.0, 2.0 * tau), 2.0 * y.sqrt()));
            tau * (PI * tau).sinh() * a * b
        },
        control,
    );
    let lhs = guard.finish(r)?.value.re;
    Ok((lhs, index_identity_rhs(x, y)))
}
