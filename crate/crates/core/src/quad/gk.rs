use num_complex::Complex64;

use super::{check_finite, Integral, QuadratureControl};
use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One application of the G7-K15 pair on [a, b].
#[derive(Clone, Copy, Debug)]
pub(crate) struct Segment {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
    /// Kronrod estimate of the integral of |f|.
    pub l1: f64,
    pub depth: usize,
}

pub(crate) fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, depth: usize) -> Result<Segment> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = check_finite(f(centre), "integrand at panel centre")?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = check_finite(f(centre - dx), "integrand")?;
        let f2 = check_finite(f(centre + dx), "integrand")?;
        let pair = f1 + f2;
        kronrod += pair * WGK[j];
        l1 += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
        l1: l1 * half.abs(),
        depth,
    })
}

/// Result of global adaptive bisection over one interval.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Adaptive {
    pub value: Complex64,
    pub error: f64,
    pub l1: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Bisects the subinterval with the largest error estimate until the total
/// error meets `tol(total_l1, |value|)`, no subinterval may be split further
/// (depth `max_depth`), or `max_intervals` is reached.
pub(crate) fn adaptive<F, T>(f: &F, a: f64, b: f64, tol: T, max_depth: usize, max_intervals: usize) -> Result<Adaptive>
where
    F: Fn(f64) -> Complex64,
    T: Fn(f64, f64) -> f64,
{
    let mut segments = vec![gk15(f, a, b, 0)?];
    let mut evaluations = 15;
    loop {
        let value: Complex64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let l1: f64 = segments.iter().map(|s| s.l1).sum();
        let done = error <= tol(l1, value.norm());
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < max_depth)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        if done || worst.is_none() || segments.len() >= max_intervals {
            return Ok(Adaptive {
                value,
                error,
                l1,
                evaluations,
                converged: done,
            });
        }
        let s = segments.swap_remove(worst.unwrap());
        let mid = 0.5 * (s.a + s.b);
        segments.push(gk15(f, s.a, mid, s.depth + 1)?);
        segments.push(gk15(f, mid, s.b, s.depth + 1)?);
        evaluations += 30;
    }
}

// Depth and count limits for whole-interval integration; deep enough to
// resolve integrable endpoint singularities such as u^{-1/2}.
const INTERVAL_MAX_DEPTH: usize = 60;
const INTERVAL_MAX_SEGMENTS: usize = 4000;

/// Adaptive Gauss–Kronrod integral of `f` over the finite interval [a, b].
pub fn integrate_interval<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, control: &QuadratureControl) -> Result<Complex64> {
    try_integrate_interval(f, a, b, control).map(|i| i.value)
}

/// As [`integrate_interval`], returning the error accounting.
pub fn try_integrate_interval<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    control: &QuadratureControl,
) -> Result<Integral> {
    control.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("interval [{a}, {b}] is not finite")));
    }
    if a == b {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            truncation: 0.0,
            evaluations: 0,
        });
    }
    let r = adaptive(
        &f,
        a,
        b,
        |_, v| control.target(v),
        INTERVAL_MAX_DEPTH,
        INTERVAL_MAX_SEGMENTS,
    )?;
    if !r.converged {
        return Err(Error::NonConvergence(format!(
            "interval [{a}, {b}]: error estimate {:.3e} after {} evaluations",
            r.error, r.evaluations
        )));
    }
    Ok(Integral {
        value: r.value,
        abs_error: r.error,
        truncation: 0.0,
        evaluations: r.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let c = QuadratureControl::default();
        let v = integrate_interval(|x| Complex64::new(x.powi(6) - 3.0 * x, 0.0), 0.0, 2.0, &c).unwrap();
        assert!((v.re - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let c = QuadratureControl::default();
        let v = integrate_interval(|x| Complex64::new(x.powf(-0.5), 0.0), 0.0, 1.0, &c).unwrap();
        assert!((v.re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let c = QuadratureControl::default();
        let f = |x: f64| Complex64::new(x.cos(), x.sin());
        let a = integrate_interval(f, 0.0, 1.0, &c).unwrap();
        let b = integrate_interval(f, 1.0, 0.0, &c).unwrap();
        assert!((a + b).norm() < 1e-15);
    }
}
