use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::gamma;
use crate::error::{Error, Result};

/// Largest |w| accepted by [`upper_incomplete_gamma`].
pub const INCGAMMA_MAX_ORDER: f64 = 50.0;

const CF_MAX_ITER: usize = 20_000;
const SERIES_MAX_TERMS: usize = 5_000;

// Inside this distance of a non-positive integer the value is taken as the
// mean over a small circle; Gamma(w, a) is entire in w.
const POLE_NEIGHBOURHOOD: f64 = 0.1;
const CIRCLE_RADIUS: f64 = 0.3;
const CIRCLE_POINTS: usize = 32;

/// Upper incomplete gamma function Gamma(w, a) = int_a^inf e^{-t} t^{w-1} dt.
pub fn upper_incomplete_gamma(w: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Envelope(format!("incomplete gamma needs a > 0, got {a}")));
    }
    if !(w.norm() <= INCGAMMA_MAX_ORDER) {
        return Err(Error::Envelope(format!(
            "incomplete gamma order |w| = {} exceeds {INCGAMMA_MAX_ORDER}",
            w.norm()
        )));
    }
    let near = w.re.round().min(0.0);
    if w.re < 0.5 && (w - near).norm() < POLE_NEIGHBOURHOOD && !use_continued_fraction(w, a) {
        return circle_mean(w, a);
    }
    direct(w, a)
}

fn use_continued_fraction(w: Complex64, a: f64) -> bool {
    a >= 1.5 && a > w.re + 1.0 && a >= 0.25 * w.im.abs()
}

/// e^a Gamma(w, a), finite for large a where Gamma(w, a) itself underflows.
pub fn upper_incomplete_gamma_scaled(w: Complex64, a: f64) -> Result<Complex64> {
    if a >= 1.5 && use_continued_fraction(w, a) && w.norm() <= INCGAMMA_MAX_ORDER {
        return Ok((w * a.ln()).exp() * continued_fraction_sum(w, a)?);
    }
    Ok(upper_incomplete_gamma(w, a)? * a.exp())
}

fn direct(w: Complex64, a: f64) -> Result<Complex64> {
    if use_continued_fraction(w, a) {
        Ok((w * a.ln() - a).exp() * continued_fraction_sum(w, a)?)
    } else {
        Ok(gamma(w)? - lower_series(w, a)?)
    }
}

fn circle_mean(w: Complex64, a: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..CIRCLE_POINTS {
        let phi = 2.0 * PI * j as f64 / CIRCLE_POINTS as f64;
        let p = w + Complex64::from_polar(CIRCLE_RADIUS, phi);
        acc += direct(p, a)?;
    }
    Ok(acc / CIRCLE_POINTS as f64)
}

/// gamma(w, a) = a^w e^{-a} sum_k a^k / (w (w+1) ... (w+k)).
fn lower_series(w: Complex64, a: f64) -> Result<Complex64> {
    let prefactor = (w * a.ln() - a).exp();
    let mut term = w.inv();
    let mut sum = term;
    let mut small_run = 0;
    for k in 1..SERIES_MAX_TERMS {
        term = term * a / (w + k as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            small_run += 1;
            if small_run >= 3 {
                return Ok(prefactor * sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::SeriesDivergence {
        terms: SERIES_MAX_TERMS,
    })
}

/// Legendre continued fraction by the modified Lentz method, without the
/// prefactor a^w e^{-a}.
fn continued_fraction_sum(w: Complex64, a: f64) -> Result<Complex64> {
    const TINY: f64 = 1e-300;
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(a + 1.0, 0.0) - w;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let fi = i as f64;
        let an = -fi * (Complex64::new(fi, 0.0) - w);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = d.inv();
        let del = d * c;
        h *= del;
        if (del - one).norm() < 4.0 * f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::SeriesDivergence { terms: CF_MAX_ITER })
}

/// Exponential integral E1(a) = Gamma(0, a), a > 0.
pub fn exp_integral_e1(a: f64) -> Result<f64> {
    Ok(upper_incomplete_gamma(Complex64::new(0.0, 0.0), a)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn order_one_is_exponential() {
        for a in [0.1, 1.0, 2.0, 7.5] {
            let v = upper_incomplete_gamma(c(1.0, 0.0), a).unwrap();
            assert!((v.re - (-a).exp()).abs() < 1e-13 * (-a).exp(), "a = {a}");
            assert!(v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn e1_of_one() {
        // E1(1) = 0.21938393439552027368 (A&S table 5.1)
        let v = exp_integral_e1(1.0).unwrap();
        assert!((v - 0.219_383_934_395_520_27).abs() < 1e-14);
    }

    #[test]
    fn envelope_is_enforced() {
        assert!(matches!(
            upper_incomplete_gamma(c(60.0, 0.0), 1.0),
            Err(Error::Envelope(_))
        ));
        assert!(matches!(
            upper_incomplete_gamma(c(1.0, 0.0), 0.0),
            Err(Error::Envelope(_))
        ));
    }
}
