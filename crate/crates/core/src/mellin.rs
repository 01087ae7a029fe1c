//! Functions on (0, inf) represented by their Mellin images on a vertical line.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::complexfn::{bessel_k, gamma, sin_pi};
use crate::error::{Error, Result};
use crate::quad::{integrate_interval, integrate_vertical_line, QuadratureControl, VerticalLine};

/// Shared, thread-safe complex function.
pub type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
/// Shared, thread-safe function of a positive real variable.
pub type PointFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

const LINE_SAMPLES: [f64; 5] = [0.0, 1.0, -1.0, 5.0, -5.0];

/// A function f given by its Mellin image f*(s) on the line Re s = abscissa.
#[derive(Clone)]
pub struct MellinImage {
    image: ComplexFn,
    abscissa: f64,
    decay_class: (f64, f64),
    strip: (f64, f64),
    label: String,
    // closed form of f, when known; used for point values in direct integrals
    point: Option<PointFn>,
}

impl fmt::Debug for MellinImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MellinImage")
            .field("label", &self.label)
            .field("abscissa", &self.abscissa)
            .field("decay_class", &self.decay_class)
            .field("strip", &self.strip)
            .field("closed_form", &self.point.is_some())
            .finish()
    }
}

fn sign(v: f64) -> i32 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Whether a decay class (c1, c2) is admissible: 2 sign(c1) + sign(c2) >= 0.
pub fn admissible_class(c1: f64, c2: f64) -> bool {
    2 * sign(c1) + sign(c2) >= 0
}

impl MellinImage {
    /// An image analytic in the strip `lo < Re s < hi` containing the abscissa.
    pub fn new<F>(
        image: F,
        abscissa: f64,
        strip: (f64, f64),
        decay_class: (f64, f64),
        label: impl Into<String>,
    ) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self::from_arc(Arc::new(image), abscissa, strip, decay_class, label.into())
    }

    fn from_arc(
        image: ComplexFn,
        abscissa: f64,
        strip: (f64, f64),
        decay_class: (f64, f64),
        label: String,
    ) -> Result<Self> {
        if !(strip.0 < abscissa && abscissa < strip.1) {
            return Err(Error::Strip {
                what: "Mellin abscissa",
                value: abscissa,
                lo: strip.0,
                hi: strip.1,
            });
        }
        if !admissible_class(decay_class.0, decay_class.1) {
            return Err(Error::InvalidParameter(format!(
                "decay class ({}, {}) violates 2 sign(c1) + sign(c2) >= 0",
                decay_class.0, decay_class.1
            )));
        }
        for t in LINE_SAMPLES {
            let v = image(Complex64::new(abscissa, t));
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite(format!(
                    "image '{label}' at {abscissa} + {t}i"
                )));
            }
        }
        Ok(MellinImage {
            image,
            abscissa,
            decay_class,
            strip,
            label,
            point: None,
        })
    }

    /// The image of f = 0.
    pub fn zero(abscissa: f64) -> Self {
        MellinImage {
            image: Arc::new(|_| Complex64::new(0.0, 0.0)),
            abscissa,
            decay_class: (0.0, 0.0),
            strip: (f64::NEG_INFINITY, f64::INFINITY),
            label: "zero".into(),
            point: Some(Arc::new(|_| Complex64::new(0.0, 0.0))),
        }
    }

    pub fn at(&self, s: Complex64) -> Complex64 {
        (self.image)(s)
    }

    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }

    pub fn decay_class(&self) -> (f64, f64) {
        self.decay_class
    }

    /// Strip of analyticity (lo, hi) of the image.
    pub fn strip(&self) -> (f64, f64) {
        self.strip
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn image_fn(&self) -> ComplexFn {
        self.image.clone()
    }

    /// The same function represented on another line inside the strip.
    pub fn on_line(&self, abscissa: f64) -> Result<Self> {
        let mut g = Self::from_arc(
            self.image.clone(),
            abscissa,
            self.strip,
            self.decay_class,
            self.label.clone(),
        )?;
        g.point = self.point.clone();
        Ok(g)
    }

    /// The same image with a different claimed decay class.
    pub fn with_decay_class(&self, c1: f64, c2: f64) -> Result<Self> {
        let mut g = Self::from_arc(self.image.clone(), self.abscissa, self.strip, (c1, c2), self.label.clone())?;
        g.point = self.point.clone();
        Ok(g)
    }

    /// Attaches the closed form of f.
    pub fn with_point_function<P>(mut self, point: P) -> Self
    where
        P: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.point = Some(Arc::new(point));
        self
    }

    /// The attached closed form of f, if any.
    pub fn point_function(&self) -> Option<PointFn> {
        self.point.clone()
    }

    /// f(x) from the closed form when attached, otherwise by [`eval_function`].
    pub fn value_at(&self, x: f64, control: &QuadratureControl) -> Result<Complex64> {
        match &self.point {
            Some(p) => Ok(p(x)),
            None => eval_function(self, x, control),
        }
    }

    /// Distance from the line to the nearest edge of the strip.
    pub fn pole_clearance(&self) -> f64 {
        (self.abscissa - self.strip.0).min(self.strip.1 - self.abscissa)
    }

    /// The image of a f + b g; both must share the abscissa.
    pub fn linear_combination(a: Complex64, f: &MellinImage, b: Complex64, g: &MellinImage) -> Result<Self> {
        if f.abscissa != g.abscissa {
            return Err(Error::InvalidParameter(format!(
                "abscissas differ: {} and {}",
                f.abscissa, g.abscissa
            )));
        }
        let (fi, gi) = (f.image.clone(), g.image.clone());
        let strip = (f.strip.0.max(g.strip.0), f.strip.1.min(g.strip.1));
        let class = (
            f.decay_class.0.min(g.decay_class.0),
            f.decay_class.1.min(g.decay_class.1),
        );
        let label = format!("({a})*{} + ({b})*{}", f.label, g.label);
        let mut h = Self::from_arc(Arc::new(move |s| a * fi(s) + b * gi(s)), f.abscissa, strip, class, label)?;
        if let (Some(fp), Some(gp)) = (f.point.clone(), g.point.clone()) {
            h.point = Some(Arc::new(move |x| a * fp(x) + b * gp(x)));
        }
        Ok(h)
    }

    /// The image of a f.
    pub fn scaled(&self, a: Complex64) -> Self {
        let fi = self.image.clone();
        let point = self.point.clone().map(|p| -> PointFn { Arc::new(move |x| a * p(x)) });
        MellinImage {
            image: Arc::new(move |s| a * fi(s)),
            label: format!("({a})*{}", self.label),
            point,
            ..self.clone()
        }
    }

    fn line(&self) -> VerticalLine {
        VerticalLine::new(self.abscissa, self.pole_clearance().min(1.0))
    }
}

/// f(x) = (1/2 pi i) int f*(s) x^{-s} ds over the image's line.
pub fn eval_function(f: &MellinImage, x: f64, control: &QuadratureControl) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x = {x} must be positive")));
    }
    let ln_x = x.ln();
    integrate_vertical_line(|s| f.at(s) * (-s * ln_x).exp(), f.line(), control)
}

fn log_weight(f: &MellinImage, c1: f64, c2: f64, t: f64) -> f64 {
    let s = Complex64::new(f.abscissa, t);
    let m = s.norm();
    PI * c1 * m + c2 * m.ln() + f.at(s).norm().ln()
}

/// (1/2 pi) int_{-T}^{T} e^{pi c1 |s|} |s|^{c2} |f*(s)| dt on s = c0 + it.
///
/// Fails with a divergence error when the weighted integrand is larger at the
/// truncation point than halfway to it.
pub fn weighted_norm(f: &MellinImage, c1: f64, c2: f64, truncation: f64, control: &QuadratureControl) -> Result<f64> {
    if !(truncation > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation {truncation} must be positive"
        )));
    }
    let w = |t: f64| {
        let lw = log_weight(f, c1, c2, t);
        Complex64::new(if lw == f64::NEG_INFINITY { 0.0 } else { lw.exp() }, 0.0)
    };
    let upper = integrate_interval(w, 0.0, truncation, control)?.re;
    let lower = integrate_interval(w, -truncation, 0.0, control)?.re;
    let norm = (upper + lower) / (2.0 * PI);
    if !norm.is_finite() {
        return Err(Error::NonFinite(format!("weighted norm of '{}'", f.label)));
    }
    let edge = |t: f64| w(t).re.max(w(-t).re);
    let (outer, inner) = (edge(truncation), edge(0.5 * truncation));
    if outer > inner && outer > 0.0 {
        return Err(Error::Divergence {
            truncated: norm,
            growth: outer / inner,
        });
    }
    Ok(norm)
}

/// Outcome of a numerical membership probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Ratio of t w(t) across the decisive decade (below 0.9 means decaying).
    pub decay_ratio: f64,
    /// Set when the probe could not be evaluated (e.g. the image underflowed).
    pub inconclusive: bool,
    /// Decade [T, 10 T] on which the decision was made.
    pub window: (f64, f64),
    /// Truncated norm at 10 T when computed.
    pub norm: Option<f64>,
}

/// Threshold on the per-decade ratio of t w(t).
pub const MEMBERSHIP_RATIO: f64 = 0.9;
const PROBE_WINDOWS: [f64; 3] = [10.0, 100.0, 1000.0];

/// Whether e^{pi c1 |s|} |s|^{c2} f*(s) appears integrable on the line.
///
/// On decades [T, 10T] moving outward, the weighted integrand w must satisfy
/// (10T w(10T)) / (T w(T)) < 0.9 and the truncated norm must settle: its
/// growth over the decade is smaller than over the previous one.
pub fn membership_estimate(f: &MellinImage, c1: f64, c2: f64, control: &QuadratureControl) -> Membership {
    let mut last = Membership {
        member: false,
        decay_ratio: f64::NAN,
        inconclusive: true,
        window: (0.0, 0.0),
        norm: None,
    };
    let log_tw = |t: f64| t.ln() + log_weight(f, c1, c2, t).max(log_weight(f, c1, c2, -t));
    for t in PROBE_WINDOWS {
        let (inner, outer) = (log_tw(t), log_tw(10.0 * t));
        let window = (t, 10.0 * t);
        if inner.is_nan() || outer.is_nan() || inner == f64::INFINITY || outer == f64::INFINITY {
            last = Membership {
                inconclusive: true,
                window,
                ..last
            };
            break;
        }
        let ratio = match (inner == f64::NEG_INFINITY, outer == f64::NEG_INFINITY) {
            // identically zero on the probe
            (true, true) if t == PROBE_WINDOWS[0] => 0.0,
            // an analytic image does not vanish on a whole decade: it has
            // underflowed, and the previous window's verdict stands
            (true, _) | (_, true) => {
                if t == PROBE_WINDOWS[0] {
                    last.window = window;
                }
                break;
            }
            _ => (outer - inner).exp(),
        };
        last = Membership {
            member: false,
            decay_ratio: ratio,
            inconclusive: false,
            window,
            norm: None,
        };
        if ratio >= MEMBERSHIP_RATIO {
            continue;
        }
        let norms: Result<Vec<f64>> = [0.1 * t, t, 10.0 * t]
            .iter()
            .map(|&tt| weighted_norm(f, c1, c2, tt, control))
            .collect();
        match norms {
            Ok(n) => {
                let (prev, cur) = (n[1] - n[0], n[2] - n[1]);
                last.norm = Some(n[2]);
                if cur <= 1e-12 * n[2] || cur < MEMBERSHIP_RATIO * prev {
                    last.member = true;
                    return last;
                }
            }
            Err(_) => {
                last.inconclusive = true;
            }
        }
    }
    last
}

/// A catalogued function with its Mellin image and closed form.
#[derive(Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub image: MellinImage,
    pub point_function: PointFn,
    /// Abscissas c0 for which the image is valid.
    pub valid_abscissa_range: (f64, f64),
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("image", &self.image)
            .field("valid_abscissa_range", &self.valid_abscissa_range)
            .finish()
    }
}

/// Grid on which catalog entries verify themselves.
pub const CATALOG_GRID: [f64; 10] = [0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0];

impl CatalogEntry {
    /// Largest relative discrepancy between the inverse Mellin integral and
    /// the closed form over [`CATALOG_GRID`].
    pub fn verify(&self, control: &QuadratureControl) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x in CATALOG_GRID {
            let a = eval_function(&self.image, x, control)?;
            let b = (self.point_function)(x);
            let err = if b.norm() > 0.0 { (a - b).norm() / b.norm() } else { a.norm() };
            worst = worst.max(err);
        }
        Ok(worst)
    }
}

// the image carries the closed form for use in direct integrals
fn attach(mut entry: CatalogEntry) -> CatalogEntry {
    entry.image.point = Some(entry.point_function.clone());
    entry
}

fn gamma_or_nan(s: Complex64) -> Complex64 {
    gamma(s).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

/// f(x) = e^{-a x}, f*(s) = Gamma(s) a^{-s}.
pub fn exp_entry(a: f64, abscissa: f64) -> Result<CatalogEntry> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("rate a = {a} must be positive")));
    }
    let ln_a = a.ln();
    let image = MellinImage::new(
        move |s| gamma_or_nan(s) * (-s * ln_a).exp(),
        abscissa,
        (0.0, f64::INFINITY),
        (0.0, 0.0),
        format!("exp(-{a}x)"),
    )?;
    Ok(attach(CatalogEntry {
        name: if a == 1.0 { "exp".into() } else { format!("exp:a={a}") },
        image,
        point_function: Arc::new(move |x| Complex64::new((-a * x).exp(), 0.0)),
        valid_abscissa_range: (0.0, 1.0),
    }))
}

/// f(x) = 2 K_0(2 sqrt x), f*(s) = Gamma(s)^2.
pub fn bessel_k0_entry(abscissa: f64) -> Result<CatalogEntry> {
    let image = MellinImage::new(
        |s| {
            let g = gamma_or_nan(s);
            g * g
        },
        abscissa,
        (0.0, f64::INFINITY),
        (0.5, 0.0),
        "2K0(2sqrt(x))",
    )?;
    Ok(attach(CatalogEntry {
        name: "k0".into(),
        image,
        point_function: Arc::new(|x| {
            bessel_k(Complex64::new(0.0, 0.0), 2.0 * x.sqrt())
                .map(|k| 2.0 * k)
                .unwrap_or(Complex64::new(f64::NAN, 0.0))
        }),
        valid_abscissa_range: (0.0, 1.0),
    }))
}

/// f(x) = 1/(1 + x), f*(s) = pi / sin(pi s).
pub fn rational_entry(abscissa: f64) -> Result<CatalogEntry> {
    let image = MellinImage::new(
        |s| PI / sin_pi(s),
        abscissa,
        (0.0, 1.0),
        (0.5, 0.0),
        "1/(1+x)",
    )?;
    Ok(attach(CatalogEntry {
        name: "rational".into(),
        image,
        point_function: Arc::new(|x| Complex64::new(1.0 / (1.0 + x), 0.0)),
        valid_abscissa_range: (0.0, 1.0),
    }))
}

/// f(x) = e^{-x^2}, f*(s) = Gamma(s/2)/2.
pub fn gauss_entry(abscissa: f64) -> Result<CatalogEntry> {
    let image = MellinImage::new(
        |s| gamma_or_nan(s * 0.5) * 0.5,
        abscissa,
        (0.0, f64::INFINITY),
        (0.0, 0.0),
        "exp(-x^2)",
    )?;
    Ok(attach(CatalogEntry {
        name: "gauss".into(),
        image,
        point_function: Arc::new(|x| Complex64::new((-x * x).exp(), 0.0)),
        valid_abscissa_range: (0.0, 1.0),
    }))
}

/// f = 0.
pub fn zero_entry(abscissa: f64) -> CatalogEntry {
    attach(CatalogEntry {
        name: "zero".into(),
        image: MellinImage::zero(abscissa),
        point_function: Arc::new(|_| Complex64::new(0.0, 0.0)),
        valid_abscissa_range: (f64::NEG_INFINITY, f64::INFINITY),
    })
}

/// Catalog names accepted by [`catalog_entry`].
pub const CATALOG_NAMES: [&str; 5] = ["exp", "k0", "rational", "gauss", "zero"];

/// All catalogued pairs on the line Re s = abscissa.
pub fn catalog(abscissa: f64) -> Result<Vec<CatalogEntry>> {
    Ok(vec![
        exp_entry(1.0, abscissa)?,
        bessel_k0_entry(abscissa)?,
        rational_entry(abscissa)?,
        gauss_entry(abscissa)?,
        zero_entry(abscissa),
    ])
}

/// Looks up an entry by name; `exp:a=<rate>` selects the rate of the exponential.
pub fn catalog_entry(name: &str, abscissa: f64) -> Result<CatalogEntry> {
    let name = name.trim();
    if let Some(rest) = name.strip_prefix("exp:") {
        let rate = rest
            .strip_prefix("a=")
            .unwrap_or(rest)
            .parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("bad exponential rate in '{name}'")))?;
        return exp_entry(rate, abscissa);
    }
    match name {
        "exp" => exp_entry(1.0, abscissa),
        "k0" => bessel_k0_entry(abscissa),
        "rational" => rational_entry(abscissa),
        "gauss" => gauss_entry(abscissa),
        "zero" => Ok(zero_entry(abscissa)),
        _ => Err(Error::InvalidParameter(format!(
            "unknown function '{name}' (expected one of {})",
            CATALOG_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(admissible_class(0.0, 0.0));
        assert!(admissible_class(0.5, -1.0));
        assert!(!admissible_class(0.0, -1.0));
        assert!(!admissible_class(-0.5, 1.0));
    }

    #[test]
    fn abscissa_must_lie_in_strip() {
        assert!(rational_entry(1.2).is_err());
        assert!(exp_entry(1.0, -0.1).is_err());
    }

    #[test]
    fn names_resolve() {
        for n in CATALOG_NAMES {
            assert_eq!(catalog_entry(n, 0.5).unwrap().name, n);
        }
        assert_eq!(catalog_entry("exp:a=2", 0.5).unwrap().name, "exp:a=2");
        assert!(catalog_entry("nope", 0.5).is_err());
        assert!(catalog_entry("exp:a=-1", 0.5).is_err());
    }

    #[test]
    fn zero_image_has_zero_norm() {
        let c = QuadratureControl::default();
        let z = MellinImage::zero(0.5);
        assert_eq!(weighted_norm(&z, 0.5, 0.0, 20.0, &c).unwrap(), 0.0);
        assert_eq!(eval_function(&z, 1.0, &c).unwrap(), Complex64::new(0.0, 0.0));
    }
}
