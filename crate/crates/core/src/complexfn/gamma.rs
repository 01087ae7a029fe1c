use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Minimum distance from a non-positive integer before `log_gamma` refuses.
pub const POLE_MARGIN: f64 = 1e-12;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

// Stirling is applied once Re z reaches this value.
const STIRLING_RE: f64 = 12.0;

// B_{2k} / (2k (2k-1)) for k = 1..=8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING_COEFFS {
        series += power * c;
        power *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series
}

/// Distance from `z` to the nearest non-positive integer, or `None` when
/// Re z is positive enough that no pole is nearby.
fn pole_distance(z: Complex64) -> Option<(f64, f64)> {
    if z.re > 0.5 {
        return None;
    }
    let n = z.re.round().min(0.0);
    Some(((z - n).norm(), n))
}

/// sin(pi x) for real x, exact at integers and half-integers.
pub fn sin_pi_real(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// cos(pi x) for real x, exact at integers and half-integers.
pub fn cos_pi_real(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    if r.abs() == 0.5 {
        return 0.0;
    }
    let c = (PI * r).cos();
    if (n as i64).rem_euclid(2) == 0 {
        c
    } else {
        -c
    }
}

/// sin(pi z) with exact zeros at the integers.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    Complex64::new(sin_pi_real(z.re) * y.cosh(), cos_pi_real(z.re) * y.sinh())
}

/// Principal branch of log Gamma(z).
///
/// For Re z below the Stirling threshold the argument is shifted upward and
/// the recurrence is unwound one factor at a time, so the imaginary part is
/// the continuous sum of arguments and the result is the analytic
/// continuation from the positive real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite(format!("log_gamma({z})")));
    }
    if let Some((d, _)) = pole_distance(z) {
        if d <= POLE_MARGIN {
            return Err(Error::Pole {
                at: z,
                margin: POLE_MARGIN,
            });
        }
    }
    if z.re >= STIRLING_RE || (z.re >= 0.5 && z.norm() >= 2.0 * STIRLING_RE) {
        return Ok(stirling(z));
    }
    if z.re < -40.0 {
        return Ok(reflected_log_gamma(z));
    }
    let shift = (STIRLING_RE - z.re).ceil() as usize;
    let mut re_sum = 0.0;
    let mut im_sum = 0.0;
    // Accumulate log|prod| in blocks to limit rounding in the real part.
    let mut block = Complex64::new(1.0, 0.0);
    for k in 0..shift {
        let w = z + k as f64;
        im_sum += w.arg();
        block *= w;
        if k % 8 == 7 {
            re_sum += block.norm().ln();
            block = Complex64::new(1.0, 0.0);
        }
    }
    re_sum += block.norm().ln();
    Ok(stirling(z + shift as f64) - Complex64::new(re_sum, im_sum))
}

// Used far to the left of the envelope; the branch is correct modulo 2 pi i.
fn reflected_log_gamma(z: Complex64) -> Complex64 {
    let one_minus = Complex64::new(1.0, 0.0) - z;
    LN_PI - ln_sin_pi(z) - stirling(one_minus)
}

/// log sin(pi z) without overflow for large |Im z| (branch modulo 2 pi i).
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return sin_pi(z).ln();
    }
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}) for Im z > 0.
    let (w, flip) = if z.im > 0.0 { (z, false) } else { (z.conj(), true) };
    let i = Complex64::new(0.0, 1.0);
    let e = (2.0 * PI * i * w).exp();
    let v = -i * PI * w + (i * 0.5).ln() + (Complex64::new(1.0, 0.0) - e).ln();
    if flip {
        v.conj()
    } else {
        v
    }
}

/// Gamma(z), refusing within `POLE_MARGIN` of a pole.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// 1/Gamma(z); an entire function, exactly zero at the non-positive integers.
pub fn reciprocal_gamma(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        // no poles to the right of 1/2
        return match log_gamma(z) {
            Ok(lg) => (-lg).exp(),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        };
    }
    if z.im == 0.0 && z.re == z.re.round() {
        return Complex64::new(0.0, 0.0);
    }
    // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    let one_minus = Complex64::new(1.0, 0.0) - z;
    let lg = match log_gamma(one_minus) {
        Ok(v) => v,
        Err(_) => return Complex64::new(f64::NAN, f64::NAN),
    };
    if z.im.abs() < 20.0 {
        sin_pi(z) * lg.exp() / PI
    } else {
        (ln_sin_pi(z) + lg - LN_PI).exp()
    }
}

/// Real Gamma for the positive reals and non-integer negatives.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// n! as f64 (exact through 22!).
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient C(n, k) as f64.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c.round()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_one_is_zero() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn log_gamma_half_is_log_sqrt_pi() {
        let v = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((v.re - 0.572_364_942_924_700_1).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn poles_are_refused() {
        for n in 0..5 {
            let z = c(-(n as f64), 0.0);
            assert!(matches!(log_gamma(z), Err(Error::Pole { .. })));
        }
        assert!(matches!(log_gamma(c(-3.0 + 1e-13, 0.0)), Err(Error::Pole { .. })));
        assert!(log_gamma(c(-3.0 + 1e-9, 0.0)).is_ok());
    }

    #[test]
    fn reciprocal_gamma_vanishes_at_poles() {
        assert_eq!(reciprocal_gamma(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(reciprocal_gamma(c(-3.0, 0.0)), c(0.0, 0.0));
        assert!((reciprocal_gamma(c(1.0, 0.0)) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn reciprocal_gamma_near_pole_is_linear() {
        // 1/Gamma(-n + e) = (-1)^n n! e (1 - e psi(n + 1)) + O(e^3)
        let z = -3.0 + 1e-7;
        let e = z + 3.0; // exact offset of the rounded argument
        let psi4 = 1.0 + 0.5 + 1.0 / 3.0 - 0.577_215_664_901_532_9;
        let v = reciprocal_gamma(c(z, 0.0));
        let expected = -6.0 * e * (1.0 - e * psi4);
        assert!((v.re - expected).abs() < 1e-12 * expected.abs() + 1e-19);
    }

    #[test]
    fn imaginary_part_is_continuous_in_the_upper_half_plane() {
        // walk leftward along Im z = 0.5; the principal branch has no jumps
        let mut prev = log_gamma(c(5.0, 0.5)).unwrap().im;
        let mut x = 5.0;
        while x > -20.0 {
            x -= 0.05;
            let cur = log_gamma(c(x, 0.5)).unwrap().im;
            assert!((cur - prev).abs() < 1.0, "jump at x = {x}");
            prev = cur;
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(factorial(5), 120.0);
    }
}
