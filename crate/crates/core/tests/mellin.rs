//! Mellin images: point evaluation, norms, membership and the catalog.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use indexlab::complexfn::gamma;
use indexlab::mellin::{
    admissible_class, bessel_k0_entry, catalog, catalog_entry, eval_function, exp_entry, membership_estimate,
    weighted_norm, MellinImage, CATALOG_NAMES,
};
use indexlab::quad::{integrate_interval, integrate_log_axis, QuadratureControl};
use indexlab::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn q() -> QuadratureControl {
    QuadratureControl::default()
}

fn gamma_image() -> MellinImage {
    MellinImage::new(|s| gamma(s).unwrap(), 0.5, (0.0, f64::INFINITY), (0.0, 0.0), "Gamma(s)").unwrap()
}

fn gamma_squared() -> MellinImage {
    MellinImage::new(|s| gamma(s).unwrap().powi(2), 0.5, (0.0, f64::INFINITY), (0.5, 0.0), "Gamma(s)^2").unwrap()
}

const TWO_K0_OF_2: f64 = 0.227_787_745_499_066_87;

#[test]
fn eval_function_examples() {
    let e1 = eval_function(&gamma_image(), 1.0, &q()).unwrap();
    assert!((e1.re - (-1.0f64).exp()).abs() < 1e-11);
    let scaled = MellinImage::new(
        |s| gamma(s).unwrap() * (-s * 2f64.ln()).exp(),
        0.5,
        (0.0, f64::INFINITY),
        (0.0, 0.0),
        "Gamma(s) 2^-s",
    )
    .unwrap();
    let e2 = eval_function(&scaled, 1.0, &q()).unwrap();
    assert!((e2.re - (-2.0f64).exp()).abs() < 1e-11);
    let k = eval_function(&gamma_squared(), 1.0, &q()).unwrap();
    assert!((k.re - TWO_K0_OF_2).abs() < 1e-11);
}

#[test]
fn eval_function_rejects_non_positive_x() {
    assert!(eval_function(&gamma_image(), 0.0, &q()).is_err());
    assert!(eval_function(&gamma_image(), -1.0, &q()).is_err());
}

#[test]
fn weighted_norm_examples() {
    assert_eq!(weighted_norm(&MellinImage::zero(0.5), 0.0, 0.0, 30.0, &q()).unwrap(), 0.0);
    // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
    let n = weighted_norm(&gamma_image(), 0.0, 0.0, 40.0, &q()).unwrap();
    let oracle = integrate_interval(|t| c((PI / (PI * t).cosh()).sqrt(), 0.0), -40.0, 40.0, &q()).unwrap().re / (2.0 * PI);
    assert!((n - oracle).abs() < 1e-11);
    assert!((n - 0.470_887_770_221_874_47).abs() < 1e-11);
    let m = weighted_norm(&gamma_squared(), 0.5, 0.0, 40.0, &q()).unwrap();
    assert!(m.is_finite() && m > 0.0);
}

#[test]
fn weighted_norm_diverges_when_weight_wins() {
    let r = weighted_norm(&gamma_image(), 0.6, 0.0, 40.0, &q());
    assert!(matches!(r, Err(Error::Divergence { .. })));
}

#[test]
fn weighted_norm_is_monotone_in_truncation() {
    let f = gamma_image();
    let mut last = 0.0;
    for t in [1.0, 2.0, 5.0, 10.0, 20.0] {
        let n = weighted_norm(&f, 0.0, 0.0, t, &q()).unwrap();
        assert!(n >= last);
        last = n;
    }
}

#[test]
fn membership_examples() {
    assert!(!membership_estimate(&gamma_image(), 0.5, -0.25, &q()).member);
    let m = membership_estimate(&gamma_squared(), 0.5, 0.0, &q());
    assert!(m.member && m.decay_ratio < 0.9, "{m:?}");
    assert!(membership_estimate(&gamma_image(), 0.0, 0.0, &q()).member);
}

#[test]
fn admissibility() {
    assert!(admissible_class(0.0, 0.0));
    assert!(admissible_class(0.5, -1.0));
    assert!(!admissible_class(-0.5, 1.0));
    assert!(!admissible_class(0.0, -0.1));
    let r = MellinImage::new(|s| gamma(s).unwrap(), 0.5, (0.0, 1.0), (0.0, -1.0), "bad");
    assert!(r.is_err());
}

#[test]
fn abscissa_must_lie_in_strip() {
    let r = MellinImage::new(|s| gamma(s).unwrap(), -0.5, (0.0, 1.0), (0.0, 0.0), "off strip");
    assert!(matches!(r, Err(Error::Strip { .. })));
}

#[test]
fn catalog_examples() {
    let exp = exp_entry(1.0, 0.5).unwrap();
    assert!(((exp.point_function)(1e-300) - 1.0).norm() < 1e-15);
    let k0 = bessel_k0_entry(0.5).unwrap();
    assert!(((k0.point_function)(1.0).re - TWO_K0_OF_2).abs() < 1e-14);
    let rational = catalog_entry("rational", 0.5).unwrap();
    assert!(((rational.point_function)(1.0) - 0.5).norm() < 1e-15);
    assert!(catalog_entry("nonsense", 0.5).is_err());
}

#[test]
fn catalog_self_verifies() {
    let entries = catalog(0.5).unwrap();
    for name in CATALOG_NAMES {
        assert!(entries.iter().any(|e| e.name == name), "{name} missing");
    }
    for e in &entries {
        assert!(e.verify(&q()).unwrap() < 1e-8, "{}", e.name);
    }
}

#[test]
fn catalog_images_are_mellin_transforms_of_their_closed_forms() {
    for e in catalog(0.5).unwrap().iter().filter(|e| e.name != "zero") {
        for s in [c(0.5, 0.0), c(0.5, 1.0), c(0.5, -2.0), c(0.5, 4.0), c(0.5, -0.3)] {
            // int_0^inf f(t) t^{s-1} dt in v = ln t
            let direct = integrate_log_axis(|v| (e.point_function)(v.exp()) * (s * v).exp(), &q()).unwrap();
            let image = e.image.at(s);
            assert!((direct - image).norm() <= 1e-8 * image.norm(), "{} at {s}", e.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_homogeneity(re in -4.0f64..4.0, im in -4.0f64..4.0) {
        let a = c(re, im);
        let f = gamma_squared();
        let n = weighted_norm(&f, 0.25, 0.0, 30.0, &q()).unwrap();
        let na = weighted_norm(&f.scaled(a), 0.25, 0.0, 30.0, &q()).unwrap();
        prop_assert!((na - a.norm() * n).abs() <= 1e-11 * (1.0 + na));
        prop_assert!(n >= 0.0);
    }

    #[test]
    fn membership_inclusion(d1 in 0.0f64..0.6, d2 in -1.0f64..1.0, c1 in 0.0f64..0.6, c2 in -1.0f64..1.0) {
        let f = gamma_squared();
        let smaller_weight = 2 * sign(d1 - c1) + sign(d2 - c2) >= 0;
        prop_assume!(admissible_class(c1, c2) && admissible_class(d1, d2) && smaller_weight);
        if membership_estimate(&f, d1, d2, &q()).member {
            prop_assert!(membership_estimate(&f, c1, c2, &q()).member);
        }
    }
}

fn sign(v: f64) -> i32 {
    (v > 0.0) as i32 - (v < 0.0) as i32
}
