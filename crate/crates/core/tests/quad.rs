//! Integration engines on integrals with known values.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use indexlab::complexfn::gamma;
use indexlab::quad::{
    integrate_contour, integrate_interval, integrate_semi_axis, integrate_symmetric_real_line,
    integrate_vertical_line, try_integrate_real_line, try_integrate_semi_axis, BentLine, QuadratureControl,
    VerticalLine,
};
use indexlab::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn q() -> QuadratureControl {
    QuadratureControl::default()
}

#[test]
fn semi_axis_examples() {
    let one = integrate_semi_axis(|t| c((-t).exp(), 0.0), &q()).unwrap();
    assert!((one - 1.0).norm() < 1e-12);
    let sqrt_pi = integrate_semi_axis(|t| c((-t).exp() / t.sqrt(), 0.0), &q()).unwrap();
    assert!((sqrt_pi.re - PI.sqrt()).abs() < 1e-11);
    let kernel = integrate_semi_axis(|t| c((-1.0 / t - t).exp() / t.sqrt(), 0.0), &q()).unwrap();
    assert!((kernel.re - PI.sqrt() * (-2.0f64).exp()).abs() < 1e-12);
}

#[test]
fn semi_axis_reports_its_error() {
    let r = try_integrate_semi_axis(|t| c((-t).exp() * t.powf(-0.9), 0.0), &q()).unwrap();
    let exact = gamma(c(0.1, 0.0)).unwrap().re;
    assert!((r.value.re - exact).abs() <= 1e-10 * exact);
    assert!(r.abs_error < 1e-9 * exact);
    assert!(r.evaluations > 0);
}

#[test]
fn vertical_line_inverse_mellin() {
    // (1/2 pi i) int Gamma(s) x^{-s} ds = e^{-x}
    let line = VerticalLine::new(0.5, 0.5);
    for x in [0.3f64, 1.0, 4.0] {
        let v = integrate_vertical_line(|s| gamma(s).unwrap() * (-s * x.ln()).exp(), line, &q()).unwrap();
        assert!((v.re - (-x).exp()).abs() < 1e-11, "x = {x}: {v}");
        assert!(v.im.abs() < 1e-12);
    }
}

#[test]
fn vertical_line_contour_shift_invariance() {
    let f = |s: Complex64| gamma(s).unwrap() * (-s * 1.7f64.ln()).exp();
    let a = integrate_vertical_line(f, VerticalLine::new(0.3, 0.3), &q()).unwrap();
    let b = integrate_vertical_line(f, VerticalLine::new(0.7, 0.7), &q()).unwrap();
    assert!((a - b).norm() < 1e-9);
}

#[test]
fn vertical_line_refuses_pole_on_contour() {
    let r = integrate_vertical_line(|s| gamma(s).unwrap_or_default(), VerticalLine::clear_of(0.0, &[0.0]), &q());
    assert!(matches!(r, Err(Error::Pole { .. })));
}

#[test]
fn slow_decay_is_diagnosed() {
    // 1/(1+|t|)^{1.01}: integrable, but the tail cannot be bounded
    let r = try_integrate_real_line(|t| c((1.0 + t.abs()).powf(-1.01), 0.0), true, &q());
    match r {
        Err(Error::SlowDecay(d)) => assert!(d.truncation > 0.0),
        other => panic!("expected slow decay, got {other:?}"),
    }
}

#[test]
fn power_tail_is_integrated() {
    // int 1/(1+t^2) dt = pi over the whole line
    let r = try_integrate_real_line(|t| c(1.0 / (1.0 + t * t), 0.0), true, &q()).unwrap();
    assert!((r.value.re - PI).abs() < 1e-9);
}

#[test]
fn symmetric_real_line() {
    // int 1/cosh(pi t) dt = 1
    let v = integrate_symmetric_real_line(|t| c(1.0 / (PI * t).cosh(), 0.0), &q()).unwrap();
    assert!((v.re - 1.0).abs() < 1e-12);
    let odd = integrate_symmetric_real_line(|t| c(t / (1.0 + t * t * t * t), 0.0), &q());
    assert!(matches!(odd, Err(Error::Asymmetry { .. })));
}

#[test]
fn bent_contour_matches_vertical_line() {
    // e^{s^2} is entire and decays on rays with arg s in (pi/4, 3pi/4);
    // (1/2 pi i) int e^{s^2} ds over any vertical line is 1/(2 sqrt pi)
    let f = |s: Complex64| (s * s).exp();
    let path = BentLine {
        abscissa: 0.5,
        bend_height: 2.0,
        angle: 0.4 * PI,
    };
    let want = 0.5 / PI.sqrt();
    let bent = integrate_contour(f, &path, &q()).unwrap();
    let line = integrate_vertical_line(f, VerticalLine::new(0.5, 1.0), &q()).unwrap();
    assert!((bent - want).norm() < 1e-11, "{bent}");
    assert!((line - want).norm() < 1e-11, "{line}");
}

#[test]
fn interval_engine() {
    let v = integrate_interval(|t| c(t.sin(), 0.0), 0.0, PI, &q()).unwrap();
    assert!((v.re - 2.0).abs() < 1e-13);
}

#[test]
fn control_validation() {
    assert!(QuadratureControl::new(0.0, 1e-10).is_err());
    assert!(QuadratureControl::new(1e-10, f64::NAN).is_err());
    let mut bad = q();
    bad.truncation_growth = 4.5;
    assert!(bad.validate().is_err());
    bad.truncation_growth = 1.0;
    assert!(bad.validate().is_err());
    let r = integrate_semi_axis(|t| c((-t).exp(), 0.0), &bad);
    assert!(matches!(r, Err(Error::InvalidParameter(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn semi_axis_linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, p in 0.2f64..3.0, r in 0.5f64..4.0) {
        let f = |t: f64| c((-t).exp() * t.powf(p - 1.0), 0.0);
        let g = |t: f64| c((-r * t).exp(), t.sin() * (-t).exp());
        let both = integrate_semi_axis(|t| f(t) * a + g(t) * b, &q()).unwrap();
        let sep = integrate_semi_axis(f, &q()).unwrap() * a + integrate_semi_axis(g, &q()).unwrap() * b;
        prop_assert!((both - sep).norm() < 1e-11 * (1.0 + both.norm()));
    }

    #[test]
    fn vertical_line_linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, x in 0.1f64..5.0) {
        let line = VerticalLine::new(0.4, 0.4);
        let f = |s: Complex64| gamma(s).unwrap() * (-s * x.ln()).exp();
        let g = |s: Complex64| gamma(s).unwrap() * gamma(s).unwrap();
        let both = integrate_vertical_line(|s| f(s) * a + g(s) * b, line, &q()).unwrap();
        let sep = integrate_vertical_line(f, line, &q()).unwrap() * a
            + integrate_vertical_line(g, line, &q()).unwrap() * b;
        prop_assert!((both - sep).norm() < 1e-11 * (1.0 + both.norm()));
    }

    #[test]
    fn tolerance_is_honoured(p in 0.15f64..4.0, k in 0usize..3) {
        let control = q().with_tolerances([1e-6, 1e-9, 1e-12][k], [1e-6, 1e-9, 1e-12][k]);
        let r = try_integrate_semi_axis(|t| c((-t).exp() * t.powf(p - 1.0), 0.0), &control).unwrap();
        let exact = gamma(c(p, 0.0)).unwrap().re;
        let target = control.abs_tol.max(control.rel_tol * exact);
        prop_assert!((r.value.re - exact).abs() <= target.max(4.0 * f64::EPSILON * exact));
    }
}
