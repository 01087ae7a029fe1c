use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use super::gamma::reciprocal_gamma;
use super::PrecisionBudget;
use crate::error::{Error, Result};

/// Largest |Im order| accepted by [`bessel_k`].
pub const BESSEL_K_MAX_IMAG_ORDER: f64 = 50.0;

/// Largest |w| accepted by [`bessel_i`].
const UNDERFLOW_ARG: f64 = 760.0;
pub const BESSEL_I_MAX_ARG: f64 = 100.0;

// The ascending series is abandoned once rounding in the sum of |terms|
// could exceed this fraction of the result.
const CANCELLATION_LIMIT: f64 = 1e-9;

// Terms below exp(-42) of the peak are dropped (about 1e-18 relative).
const LOG_CUTOFF: f64 = -42.0;
const MAX_HALVINGS: usize = 22;
const TRAPEZOID_TOL: f64 = 1e-14;

/// K_order(x) together with an underflow flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselK {
    pub value: Complex64,
    /// Set when the true magnitude lies below the smallest normal double; `value` is then 0.
    pub underflow: bool,
}

/// Modified Bessel function of the second kind, K_order(x), x > 0.
pub fn bessel_k(order: Complex64, x: f64) -> Result<Complex64> {
    bessel_k_checked(order, x).map(|k| k.value)
}

/// As [`bessel_k`], reporting underflow explicitly.
///
/// Evaluates K_nu(x) = (1/2) int_{-inf}^{inf} exp(-x cosh w + nu w) du along
/// the horizontal line w = u + i theta, where theta is the imaginary part of
/// the saddle point asinh(nu/x) kept strictly inside (-pi/2, pi/2). On that
/// line the integrand's modulus is comparable to |K_nu(x)| instead of being
/// larger by exp(pi |Im nu| / 2), so imaginary orders do not lose digits to
/// cancellation. The integrand is entire and the line sits at distance
/// pi/2 - |theta| from the edge of the decay strip, so the trapezoid rule
/// converges geometrically; the step is halved until successive sums agree.
pub fn bessel_k_checked(order: Complex64, x: f64) -> Result<BesselK> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Envelope(format!("bessel_k needs finite x > 0, got {x}")));
    }
    if !order.re.is_finite() || !order.im.is_finite() {
        return Err(Error::NonFinite(format!("bessel_k order {order}")));
    }
    if order.im.abs() > BESSEL_K_MAX_IMAG_ORDER {
        return Err(Error::Envelope(format!(
            "|Im order| = {} exceeds {BESSEL_K_MAX_IMAG_ORDER}",
            order.im.abs()
        )));
    }
    // K_{-nu} = K_nu and K_{conj nu} = conj K_nu
    // |K_nu(x)| ~ sqrt(pi / 2x) e^{-x} once x >> |nu|^2, below the smallest double
    if x > UNDERFLOW_ARG && x > 10.0 * order.norm_sqr() {
        return Ok(BesselK {
            value: Complex64::new(0.0, 0.0),
            underflow: true,
        });
    }
    let mut nu = if order.re < 0.0 { -order } else { order };
    let conjugate = nu.im < 0.0;
    if conjugate {
        nu = nu.conj();
    }
    let mut k = k_upper_right(nu, x)?;
    if conjugate {
        k.value = k.value.conj();
    }
    // real for real and for purely imaginary orders
    if order.im == 0.0 || order.re == 0.0 {
        k.value.im = 0.0;
    }
    Ok(k)
}

fn k_upper_right(nu: Complex64, x: f64) -> Result<BesselK> {
    let (sigma, tau) = (nu.re, nu.im);
    let theta_max = FRAC_PI_2 * nu.norm() / (nu.norm() + 1.0);
    let theta = (nu / x).asinh().im.clamp(-theta_max, theta_max);
    let cos_t = theta.cos();
    let strip = FRAC_PI_2 - theta.abs();

    // real part of the exponent along the line, concave in u
    let exponent = |u: f64| -x * u.cosh() * cos_t + sigma * u - tau * theta;
    let u_peak = (sigma / (x * cos_t)).asinh();
    let e0 = exponent(u_peak);
    if e0 > 700.0 {
        return Err(Error::NonFinite(format!("K_{nu}({x}) overflows")));
    }

    let mut lo = u_peak;
    while exponent(lo) - e0 > LOG_CUTOFF {
        lo -= 0.25;
    }
    let mut hi = u_peak;
    while exponent(hi) - e0 > LOG_CUTOFF {
        hi += 0.25;
    }

    let integrand = |u: f64| {
        let w = Complex64::new(u, theta);
        (-x * w.cosh() + nu * w - e0).exp()
    };

    let mut h = 0.5;
    let n0 = ((hi - lo) / h).ceil() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for j in 0..=n0 {
        let v = integrand(lo + j as f64 * h);
        sum += v;
        l1 += v.norm();
    }
    let mut estimate = sum * h;
    let mut intervals = n0;
    for _ in 0..MAX_HALVINGS {
        let h_new = h / 2.0;
        for j in 0..intervals {
            let v = integrand(lo + (2 * j + 1) as f64 * h_new);
            sum += v;
            l1 += v.norm();
        }
        intervals *= 2;
        h = h_new;
        let refined = sum * h;
        let converged =
            (refined - estimate).norm() <= TRAPEZOID_TOL * l1 * h && h <= 2.0 * strip;
        estimate = refined;
        if converged {
            let half = estimate * 0.5;
            let log_mag = e0 + half.norm().ln();
            if log_mag < f64::MIN_POSITIVE.ln() || half.norm() == 0.0 {
                return Ok(BesselK {
                    value: Complex64::new(0.0, 0.0),
                    underflow: true,
                });
            }
            return Ok(BesselK {
                value: half * e0.exp(),
                underflow: false,
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "trapezoid rule for K_{nu}({x}) did not settle"
    )))
}

/// Modified Bessel function of the first kind, I_order(w), by its ascending series.
pub fn bessel_i(order: Complex64, w: Complex64) -> Result<Complex64> {
    bessel_i_with(order, w, &PrecisionBudget::default())
}

/// As [`bessel_i`] with an explicit budget.
///
/// For arguments far from the positive real axis the series terms are much
/// larger than their sum; when the rounding this implies would exceed 1e-9
/// relative, the evaluation is refused rather than returned inaccurate.
pub fn bessel_i_with(order: Complex64, w: Complex64, budget: &PrecisionBudget) -> Result<Complex64> {
    if w.norm() > BESSEL_I_MAX_ARG {
        return Err(Error::Envelope(format!(
            "bessel_i argument |w| = {} exceeds {BESSEL_I_MAX_ARG}",
            w.norm()
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    if w == zero {
        if order == zero {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if order.re > 0.0 || super::non_positive_integer(order).is_some() {
            return Ok(zero);
        }
        return Err(Error::Pole { at: order, margin: 0.0 });
    }
    let half = w * 0.5;
    let lead = (order * half.ln()).exp();
    let q = half * half;
    let mut power = Complex64::new(1.0, 0.0); // q^k / k!
    let mut sum = zero;
    let mut l1 = 0.0;
    let mut small_run = 0;
    let settle = (0.5 * w.norm()).max(-order.re);
    for k in 0..budget.max_terms {
        let kf = k as f64;
        if k > 0 {
            power = power * q / kf;
        }
        let term = power * reciprocal_gamma(order + kf + 1.0);
        sum += term;
        l1 += term.norm();
        if kf + 1.0 > settle && budget.negligible(term.norm(), sum.norm()) {
            small_run += 1;
            if small_run >= 3 {
                if l1 * f64::EPSILON > CANCELLATION_LIMIT * sum.norm() {
                    return Err(Error::NonConvergence(format!(
                        "I_{order}({w}) series cancels by a factor {:.1e}",
                        l1 / sum.norm()
                    )));
                }
                return Ok(lead * sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::SeriesDivergence {
        terms: budget.max_terms,
    })
}
