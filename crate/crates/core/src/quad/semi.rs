use num_complex::Complex64;

use super::{Integral, QuadratureControl};
use crate::error::{Error, Result};

// Trapezoid terms below this fraction of the largest are dropped.
const NEGLIGIBLE: f64 = 1e-18;
// A decaying side that leaves the double range (t underflows) is cut there
// once its terms are below this fraction of the largest.
const CUT_AT_RANGE: f64 = 1e-15;
const NEGLIGIBLE_RUN: usize = 3;
const FIRST_STEP: f64 = 0.5;
// |u| beyond which a non-decaying side is reported; sinh(8.5) ~ 2457 in log t,
// enough for power behaviour t^{0.02} at either end.
const MAX_U: f64 = 8.5;
const SCAN_HALF_WIDTH: i32 = 40;
const MIN_LEVELS: usize = 2;

/// int_0^inf f(t) dt for integrands with integrable power behaviour at 0 and
/// at least stretched-exponential or integrable power decay at infinity.
pub fn integrate_semi_axis<F: Fn(f64) -> Complex64>(f: F, control: &QuadratureControl) -> Result<Complex64> {
    try_integrate_semi_axis(f, control).map(|i| i.value)
}

/// As [`integrate_semi_axis`], returning the error accounting.
pub fn try_integrate_semi_axis<F: Fn(f64) -> Complex64>(f: F, control: &QuadratureControl) -> Result<Integral> {
    try_integrate_log_axis(
        |v| {
            let t = v.exp();
            if t == 0.0 || !t.is_finite() {
                Complex64::new(f64::NAN, 0.0)
            } else {
                f(t) * t
            }
        },
        control,
    )
}

/// int_{-inf}^{inf} h(v) dv, where h(v) = f(e^v) e^v is a semi-axis integrand
/// written in the variable v = ln t. Supplying h directly lets kernel
/// integrands be formed as a single exponential, avoiding overflow of t^z
/// against underflow of e^{-t}.
pub fn integrate_log_axis<H: Fn(f64) -> Complex64>(h: H, control: &QuadratureControl) -> Result<Complex64> {
    try_integrate_log_axis(h, control).map(|i| i.value)
}

/// As [`integrate_log_axis`], returning the error accounting.
///
/// The substitution v = v0 + sinh u, centred on the peak v0 of |h|, turns
/// exponential decay in v (power behaviour in t) into double-exponential
/// decay in u; the trapezoid rule in u is then halved until two successive
/// levels agree within max(abs_tol, rel_tol |value|), from the second
/// halving on.
pub fn try_integrate_log_axis<H: Fn(f64) -> Complex64>(h: H, control: &QuadratureControl) -> Result<Integral> {
    control.validate()?;
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();

    let mut evaluations = 0usize;
    let mut v0 = 0.0;
    let mut peak = 0.0;
    for k in -SCAN_HALF_WIDTH..=SCAN_HALF_WIDTH {
        let v = k as f64;
        let m = h(v);
        evaluations += 1;
        if finite(m) && m.norm() > peak {
            peak = m.norm();
            v0 = v;
        }
    }
    if peak == 0.0 {
        // nothing visible on the scan: either identically zero or all non-finite
        let m = h(0.0);
        if finite(m) {
            return Ok(Integral {
                value: Complex64::new(0.0, 0.0),
                abs_error: 0.0,
                truncation: 0.0,
                evaluations,
            });
        }
        return Err(Error::NonFinite("semi-axis integrand".into()));
    }

    let term = |u: f64| h(v0 + u.sinh()) * u.cosh();

    // level 0: walk outward from the centre until the terms are negligible
    let centre = term(0.0);
    evaluations += 1;
    if !finite(centre) {
        return Err(Error::NonFinite("semi-axis integrand at its peak".into()));
    }
    let mut sum = centre;
    let mut largest = centre.norm();
    let mut reach = [0i64; 2];
    for (side, dir) in [(0usize, 1.0f64), (1, -1.0)] {
        let mut run = 0;
        let mut k = 0i64;
        let mut previous = largest;
        loop {
            k += 1;
            let u = dir * k as f64 * FIRST_STEP;
            if u.abs() > MAX_U {
                let what = if dir < 0.0 {
                    "integrand does not vanish toward t = 0".to_string()
                } else {
                    "integrand does not decay toward t = inf".to_string()
                };
                return Err(if dir < 0.0 {
                    Error::EndpointSingularity(what)
                } else {
                    Error::NonConvergence(what)
                });
            }
            let v = term(u);
            evaluations += 1;
            if !finite(v) {
                if run >= NEGLIGIBLE_RUN - 1 || (previous <= CUT_AT_RANGE * largest && k > 1) {
                    reach[side] = k - 1;
                    break;
                }
                let what = format!("non-finite integrand at ln t = {:.3} before decay", v0 + u.sinh());
                return Err(if dir < 0.0 {
                    Error::EndpointSingularity(what)
                } else {
                    Error::NonConvergence(what)
                });
            }
            sum += v;
            largest = largest.max(v.norm());
            previous = v.norm();
            if v.norm() <= NEGLIGIBLE * largest {
                run += 1;
                if run >= NEGLIGIBLE_RUN {
                    reach[side] = k;
                    break;
                }
            } else {
                run = 0;
            }
        }
    }
    let (k_hi, k_lo) = (reach[0], -reach[1]);

    let mut step = FIRST_STEP;
    let mut estimate = sum * step;
    for level in 1..=control.max_refinements {
        let half = step / 2.0;
        let intervals = ((k_hi - k_lo) as usize) << (level - 1);
        let start = k_lo as f64 * FIRST_STEP;
        for j in 0..intervals {
            let u = start + (2 * j + 1) as f64 * half;
            let v = term(u);
            evaluations += 1;
            if !finite(v) {
                return Err(Error::NonFinite(format!(
                    "semi-axis integrand at ln t = {:.3}",
                    v0 + u.sinh()
                )));
            }
            sum += v;
        }
        step = half;
        let refined = sum * step;
        let change = (refined - estimate).norm();
        estimate = refined;
        if level >= MIN_LEVELS && change <= control.target(refined.norm()) {
            return Ok(Integral {
                value: refined,
                abs_error: change,
                truncation: (v0 + (k_hi as f64 * FIRST_STEP).sinh()).exp(),
                evaluations,
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "semi-axis trapezoid did not settle after {} halvings",
        control.max_refinements
    )))
}
