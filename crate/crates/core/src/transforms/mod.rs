//! Forward transforms by direct integration and by Mellin–Barnes
//! representation, inversion integrals, operator-norm bounds and round trips.

mod mkl;

pub use mkl::{
    index_identity, index_identity_rhs, mkl_expand, mkl_forward, mkl_forward_barnes, mkl_forward_direct,
    mkl_h, mkl_parseval, MklValue,
};

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::complexfn::{factorial, gamma, ln_sin_pi, log_gamma};
use crate::error::{Error, Result};
use crate::kernels::{forward_kernel_closed, inverse_kernel, rho, TransformFamily};
use crate::mellin::{membership_estimate, MellinImage};
use crate::quad::{
    integrate_log_axis, try_integrate_contour, try_integrate_real_line, try_integrate_vertical_line, BentLine,
    Integral, QuadratureControl, VerticalLine,
};

/// Collects the first error raised inside a quadrature integrand, which can
/// only return a number; the engine then sees NaN.
pub(crate) struct Guard(Mutex<Option<Error>>);

impl Guard {
    pub(crate) fn new() -> Self {
        Guard(Mutex::new(None))
    }

    pub(crate) fn take(&self, r: Result<Complex64>) -> Complex64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.0.lock().unwrap_or_else(|p| p.into_inner());
                if slot.is_none() {
                    *slot = Some(e);
                }
                Complex64::new(f64::NAN, f64::NAN)
            }
        }
    }

    /// The engine's own result unless it failed after an integrand error,
    /// in which case that error is the better diagnostic.
    pub(crate) fn finish<T>(self, r: Result<T>) -> Result<T> {
        match r {
            Ok(v) => Ok(v),
            Err(e) => Err(self.0.into_inner().unwrap_or_else(|p| p.into_inner()).unwrap_or(e)),
        }
    }
}

pub(crate) type LineValues = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// A transform image (Ff)(z) on the line Re z = gamma.
///
/// Images produced by the Mellin–Barnes path of the exponential families
/// are analytic continuations and may be evaluated off the line, which the
/// inversion uses to bend its contour.
#[derive(Clone)]
pub struct LineFunction {
    values: LineValues,
    gamma: f64,
    /// Abscissa c0 of the function that was transformed.
    source_abscissa: f64,
    provenance: String,
    continuable: bool,
}

impl fmt::Debug for LineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineFunction")
            .field("gamma", &self.gamma)
            .field("source_abscissa", &self.source_abscissa)
            .field("provenance", &self.provenance)
            .field("continuable", &self.continuable)
            .finish()
    }
}

impl LineFunction {
    pub fn new<F>(values: F, gamma: f64, source_abscissa: f64, provenance: impl Into<String>) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        LineFunction {
            values: Arc::new(values),
            gamma,
            source_abscissa,
            provenance: provenance.into(),
            continuable: false,
        }
    }

    /// Marks the values as analytic off the line, so the inversion may deform its contour.
    pub fn continuable(mut self) -> Self {
        self.continuable = true;
        self
    }

    /// (Ff)(z) = 0.
    pub fn zero(gamma: f64, source_abscissa: f64) -> Self {
        LineFunction::new(|_| Ok(Complex64::new(0.0, 0.0)), gamma, source_abscissa, "zero").continuable()
    }

    pub fn at(&self, z: Complex64) -> Result<Complex64> {
        (self.values)(z)
    }

    /// Value at gamma + i tau.
    pub fn on_line(&self, tau: f64) -> Result<Complex64> {
        self.at(Complex64::new(self.gamma, tau))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn source_abscissa(&self) -> f64 {
        self.source_abscissa
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn is_continuable(&self) -> bool {
        self.continuable
    }

    /// Largest |F(conj z) - conj F(z)| / |F(z)| over a few points of the line;
    /// zero for the image of a real-valued function.
    pub fn conjugate_asymmetry(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for tau in [0.5, 1.7, 4.3] {
            let z = Complex64::new(self.gamma, tau);
            let (a, b) = (self.at(z)?, self.at(z.conj())?);
            let scale = a.norm().max(f64::MIN_POSITIVE);
            worst = worst.max((b - a.conj()).norm() / scale);
        }
        Ok(worst)
    }
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

fn check_member(f: &MellinImage, c1: f64, c2: f64, control: &QuadratureControl) -> Result<()> {
    let m = membership_estimate(f, c1, c2, control);
    if m.member {
        Ok(())
    } else {
        Err(Error::Membership(format!(
            "'{}' on Re s = {} is not in class ({c1}, {c2}): decay ratio {:.3}{}",
            f.label(),
            f.abscissa(),
            m.decay_ratio,
            if m.inconclusive { ", probe inconclusive" } else { "" }
        )))
    }
}

/// Index at which the kernel enters the transform. For the polynomial
/// families the Mellin–Barnes representation, regions and inversion formulas
/// all belong to int e^{-xt} t^z / P(t) dt, i.e. the kernel at z + 1.
pub fn transform_kernel_index(family: &TransformFamily, z: Complex64) -> Complex64 {
    if family.is_polynomial() {
        z + 1.0
    } else {
        z
    }
}

/// (Ff)(z) = int_0^inf k(z, x) f(x) dx, with the kernel in closed form where
/// one exists and f from its attached closed form or its inverse Mellin
/// integral.
pub fn forward_direct(family: &TransformFamily, f: &MellinImage, z: Complex64, control: &QuadratureControl) -> Result<Complex64> {
    check_member(f, 0.0, 0.0, control)?;
    forward_direct_unchecked(family, f, z, control)
}

fn forward_direct_unchecked(
    family: &TransformFamily,
    f: &MellinImage,
    z: Complex64,
    control: &QuadratureControl,
) -> Result<Complex64> {
    family.validate()?;
    region_check("forward transform", z, family.forward_region(f.abscissa())?)?;
    let kernel_index = transform_kernel_index(family, z);
    let guard = Guard::new();
    let r = integrate_log_axis(
        |v| {
            let x = v.exp();
            if x == 0.0 || !x.is_finite() {
                return Complex64::new(f64::NAN, 0.0);
            }
            let fx = guard.take(f.value_at(x, control));
            if fx == Complex64::new(0.0, 0.0) {
                return fx;
            }
            guard.take(forward_kernel_closed(family, kernel_index, x, control).map(|k| k.value)) * fx * x
        },
        control,
    );
    guard.finish(r)
}

/// Log of the gamma-type factor multiplying f*(s) in the Mellin–Barnes
/// representation of (Ff)(z), without the 1/(2 pi i).
fn ln_representand(family: &TransformFamily, s: Complex64, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match family {
        TransformFamily::TruncatedMellin { a } => log_gamma(one - s - z)? + (z + s - one) * a.ln(),
        TransformFamily::ExpKl => log_gamma(one - s + z)? + log_gamma(one - s)?,
        TransformFamily::PowerExp { m } => {
            let mf = *m as f64;
            log_gamma((one - s + z) / mf)? + log_gamma(one - s)? - mf.ln()
        }
        TransformFamily::GeneralLaplaceMellin { .. } => log_gamma(one - s)? + rho(family, one + z - s)?.ln(),
        TransformFamily::OnePlusT { n } => {
            let nf = *n as f64;
            log_gamma(s + z)? + log_gamma(nf - s - z)? + log_gamma(one - s)? - factorial(n - 1).ln()
        }
        TransformFamily::IncGamma => log_gamma(one - s)? + PI.ln() - ln_sin_pi(s + z),
        TransformFamily::OnePlusT2 { n } => {
            let nf = *n as f64;
            let w = (s + z) / 2.0;
            log_gamma(w)? + log_gamma(nf - w)? + log_gamma(one - s)? - (2.0 * factorial(n - 1)).ln()
        }
    })
}

/// The Mellin–Barnes integrand of (Ff)(z) at s, without the 1/(2 pi i):
/// the family's gamma factors times f*(s).
pub fn barnes_integrand(family: &TransformFamily, f: &MellinImage, s: Complex64, z: Complex64) -> Result<Complex64> {
    let fs = f.at(s);
    if fs == Complex64::new(0.0, 0.0) {
        return Ok(fs);
    }
    Ok(ln_representand(family, s, z)?.exp() * fs)
}

/// Distance from Re s = c to the nearest pole of the representand for
/// Re z = re_z (excluding those of f*).
fn representand_clearance(family: &TransformFamily, c: f64, re_z: f64) -> Result<f64> {
    let gamma_one_minus_s = 1.0 - c;
    let own = match family {
        TransformFamily::TruncatedMellin { .. } => 1.0 - c - re_z,
        TransformFamily::ExpKl | TransformFamily::PowerExp { .. } => 1.0 + re_z - c,
        TransformFamily::GeneralLaplaceMellin { .. } => {
            let (lo, hi) = family.rho_strip()?;
            let w = 1.0 + re_z - c;
            (w - lo).min(hi - w)
        }
        _ => {
            let (lo, hi) = family.rho_strip()?;
            let w = c + re_z;
            (w - lo).min(hi - w)
        }
    };
    Ok(gamma_one_minus_s.min(own))
}

/// (Ff)(z) from its Mellin–Barnes representation on the image's line.
pub fn forward_barnes(family: &TransformFamily, f: &MellinImage, z: Complex64, control: &QuadratureControl) -> Result<Complex64> {
    check_member(f, 0.0, 0.0, control)?;
    forward_barnes_unchecked(family, f, z, control)
}

fn forward_barnes_unchecked(
    family: &TransformFamily,
    f: &MellinImage,
    z: Complex64,
    control: &QuadratureControl,
) -> Result<Complex64> {
    family.validate()?;
    let c0 = f.abscissa();
    region_check("forward transform", z, family.forward_region(c0)?)?;
    barnes_on_line(family, f, c0, z, representand_clearance(family, c0, z.re)?, control)
}

fn barnes_on_line(
    family: &TransformFamily,
    f: &MellinImage,
    c: f64,
    z: Complex64,
    own_clearance: f64,
    control: &QuadratureControl,
) -> Result<Complex64> {
    let strip = f.strip();
    let clearance = own_clearance.min(c - strip.0).min(strip.1 - c).min(1.0);
    let guard = Guard::new();
    let r = try_integrate_vertical_line(
        |s| guard.take(barnes_integrand(family, f, s, z)),
        VerticalLine::new(c, clearance),
        control,
    );
    guard.finish(r).map(|i| i.value)
}

// Step between candidate lines when the Barnes line is moved off c0.
const LINE_STEP: f64 = 0.1;
const LINE_EDGE_MARGIN: f64 = 0.05;

/// (Ff)(z) for the exponential families at any z, by analytic continuation.
///
/// For Re z > c0 - 1 this is [`forward_barnes`]. Further left, the poles
/// s_k = 1 + z + mk of Gamma((1 - s + z)/m) have crossed the line; their
/// residues (-1)^k/k! Gamma(-z - mk) f*(s_k) are added back. The line is
/// moved within the image's strip to keep clear of the moving poles, and the
/// image is assumed to be given by a formula valid as its continuation.
pub fn forward_continued(family: &TransformFamily, f: &MellinImage, z: Complex64, control: &QuadratureControl) -> Result<Complex64> {
    let m = match family {
        TransformFamily::ExpKl => 1.0,
        TransformFamily::PowerExp { m } => *m as f64,
        _ => return Err(Error::InvalidParameter(format!("no continuation for family {family}"))),
    };
    family.validate()?;
    let c0 = f.abscissa();
    let strip = f.strip();
    let (lo, hi) = (strip.0 + LINE_EDGE_MARGIN, strip.1.min(1.0) - LINE_EDGE_MARGIN);
    // choose the line farthest from the lattice Re s_k = 1 + Re z + m k
    let lattice = |c: f64| {
        let d = (c - 1.0 - z.re).rem_euclid(m);
        d.min(m - d)
    };
    let mut best = (c0, lattice(c0).min(c0 - lo + LINE_EDGE_MARGIN).min(hi + LINE_EDGE_MARGIN - c0));
    for j in -9i32..=9 {
        let c = c0 + j as f64 * LINE_STEP;
        if c <= lo || c >= hi {
            continue;
        }
        let score = lattice(c).min(c - lo + LINE_EDGE_MARGIN).min(hi + LINE_EDGE_MARGIN - c);
        if score > best.1 + 1e-12 {
            best = (c, score);
        }
    }
    let c = best.0;
    let mut value = barnes_on_line(family, f, c, z, lattice(c).min(1.0 - c), control)?;
    let mut k = 0u32;
    loop {
        let sk = 1.0 + z + m * k as f64;
        if sk.re >= c {
            break;
        }
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let residue = sign * (log_gamma(-z - m * kf)? - log_gamma(Complex64::new(kf + 1.0, 0.0))?).exp() * f.at(sk);
        if !residue.re.is_finite() || !residue.im.is_finite() {
            return Err(Error::NonFinite(format!("residue at s = {sk}")));
        }
        value += residue;
        k += 1;
    }
    Ok(value)
}

/// How the forward image is computed on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForwardPath {
    Direct,
    Barnes,
}

/// (Ff)(z) on Re z = gamma as a [`LineFunction`]. Membership of f is checked
/// once. Barnes images of the exponential families are continuable.
pub fn forward_line(
    family: &TransformFamily,
    f: &MellinImage,
    gamma: f64,
    path: ForwardPath,
    control: &QuadratureControl,
) -> Result<LineFunction> {
    family.validate()?;
    check_member(f, 0.0, 0.0, control)?;
    region_check(
        "forward transform",
        Complex64::new(gamma, 0.0),
        family.forward_region(f.abscissa())?,
    )?;
    let (fam, img, ctl) = (family.clone(), f.clone(), *control);
    let c0 = f.abscissa();
    let label = format!("{path:?} transform of '{}' by {family}", f.label());
    Ok(match path {
        ForwardPath::Direct => LineFunction::new(
            move |z| forward_direct_unchecked(&fam, &img, z, &ctl),
            gamma,
            c0,
            label,
        ),
        ForwardPath::Barnes => match family {
            TransformFamily::ExpKl | TransformFamily::PowerExp { .. } => {
                LineFunction::new(move |z| forward_continued(&fam, &img, z, &ctl), gamma, c0, label).continuable()
            }
            _ => LineFunction::new(move |z| forward_barnes_unchecked(&fam, &img, z, &ctl), gamma, c0, label),
        },
    })
}

/// Contour of an inversion integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Contour {
    /// The line Re z = gamma.
    Vertical,
    /// The line Re z = gamma turned, at |Im z| = bend_height, onto rays at
    /// `angle` from the positive real axis.
    Bent { bend_height: f64, angle: f64 },
}

/// Bend used for the exponential families, whose inversion integrands decay
/// only like |Im z|^{-1/2} on vertical lines but factorially toward Re z -> -inf.
pub const EXPONENTIAL_BEND: Contour = Contour::Bent {
    bend_height: 6.0,
    angle: 0.75 * PI,
};

/// Value of an inversion integral with its accounting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inversion {
    pub value: Complex64,
    pub contour: Contour,
    pub integral: Integral,
}

/// f(x) = (1/2 pi i) int k^(z, x) (Ff)(z) dz on Re z = gamma.
pub fn invert(family: &TransformFamily, ff: &LineFunction, x: f64, control: &QuadratureControl) -> Result<Complex64> {
    try_invert(family, ff, x, control).map(|i| i.value)
}

/// As [`invert`], reporting the contour used. Continuable images of the
/// exponential families are inverted along [`EXPONENTIAL_BEND`]: on vertical
/// lines their integrands decay only like |Im z|^{-1/2} and the tail probe
/// fails after an expensive walk, while the bent path has the same value by
/// Cauchy's theorem. Everything else uses the vertical line.
pub fn try_invert(family: &TransformFamily, ff: &LineFunction, x: f64, control: &QuadratureControl) -> Result<Inversion> {
    let contour = if ff.is_continuable() && matches!(family, TransformFamily::ExpKl | TransformFamily::PowerExp { .. }) {
        EXPONENTIAL_BEND
    } else {
        Contour::Vertical
    };
    invert_along(family, ff, x, contour, control)
}

/// The inversion integral along the given contour.
pub fn invert_along(
    family: &TransformFamily,
    ff: &LineFunction,
    x: f64,
    contour: Contour,
    control: &QuadratureControl,
) -> Result<Inversion> {
    family.validate()?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("x = {x} must be positive")));
    }
    let gamma = ff.gamma();
    let (lo, hi) = family.inversion_strip(ff.source_abscissa())?;
    if !(gamma > lo && gamma < hi) {
        return Err(Error::Strip {
            what: "inversion abscissa",
            value: gamma,
            lo,
            hi,
        });
    }
    let guard = Guard::new();
    let term = |z: Complex64| -> Result<Complex64> {
        let v = ff.at(z)?;
        if v == Complex64::new(0.0, 0.0) {
            return Ok(v);
        }
        Ok(inverse_kernel(family, z, x)?.value * v)
    };
    let r = match contour {
        Contour::Vertical => {
            let clearance = (gamma - lo).min(hi - gamma).min(1.0);
            try_integrate_vertical_line(|z| guard.take(term(z)), VerticalLine::new(gamma, clearance), control)
        }
        Contour::Bent { bend_height, angle } => {
            if !ff.is_continuable() {
                return Err(Error::InvalidParameter(format!(
                    "image '{}' is only known on its line",
                    ff.provenance()
                )));
            }
            let path = BentLine {
                abscissa: gamma,
                bend_height,
                angle,
            };
            try_integrate_contour(|z| guard.take(term(z)), &path, control)
        }
    };
    let integral = guard.finish(r)?;
    Ok(Inversion {
        value: integral.value,
        contour,
        integral,
    })
}

/// Per-point outcome of f -> Ff -> f.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundTripReport {
    pub grid: Vec<f64>,
    pub reconstructed: Vec<Complex64>,
    pub reference: Vec<Complex64>,
    pub max_rel_error: f64,
    /// (x, relative error); absolute error where the reference vanishes.
    pub per_point: Vec<(f64, f64)>,
    pub tail_diagnostics: String,
}

/// Transforms f by the Barnes path on Re z = gamma and inverts at each grid
/// point, comparing with f's closed form (or its inverse Mellin integral).
pub fn round_trip(
    family: &TransformFamily,
    f: &MellinImage,
    gamma: f64,
    grid: &[f64],
    control: &QuadratureControl,
) -> Result<RoundTripReport> {
    let ff = forward_line(family, f, gamma, ForwardPath::Barnes, control)?;
    let results: Vec<Result<(Complex64, Complex64, Inversion)>> = grid
        .par_iter()
        .map(|&x| {
            let inv = try_invert(family, &ff, x, control)?;
            Ok((inv.value, f.value_at(x, control)?, inv))
        })
        .collect();
    let mut report = RoundTripReport {
        grid: grid.to_vec(),
        reconstructed: Vec::with_capacity(grid.len()),
        reference: Vec::with_capacity(grid.len()),
        max_rel_error: 0.0,
        per_point: Vec::with_capacity(grid.len()),
        tail_diagnostics: String::new(),
    };
    let mut notes = Vec::new();
    for (&x, r) in grid.iter().zip(results) {
        let (got, want, inv) = r?;
        let err = if want.norm() > 0.0 {
            (got - want).norm() / want.norm()
        } else {
            got.norm()
        };
        report.reconstructed.push(got);
        report.reference.push(want);
        report.per_point.push((x, err));
        report.max_rel_error = report.max_rel_error.max(err);
        let contour = match inv.contour {
            Contour::Vertical => "vertical".to_string(),
            Contour::Bent { bend_height, angle } => format!("bent(h={bend_height},angle={angle:.4})"),
        };
        notes.push(format!(
            "x={x}: {contour}, abs_error={:.2e}, truncation={:.1}, evaluations={}",
            inv.integral.abs_error, inv.integral.truncation, inv.integral.evaluations
        ));
    }
    report.tail_diagnostics = notes.join("; ");
    Ok(report)
}

/// Bound on ||F|| from M^{-1}(L_c) into L_1 on Re z = gamma.
///
/// Truncated Mellin: a^{gamma+c0-1} int |Gamma(1-c0-gamma-i tau)| d tau.
/// Families with r(t): Gamma(1-c0) int |rho(1-c0+gamma-i tau)| d tau.
/// Polynomial families: Gamma(1-c0) int |rho(c0+gamma+i tau)| d tau.
pub fn operator_norm_bound(family: &TransformFamily, c0: f64, gamma: f64, control: &QuadratureControl) -> Result<f64> {
    family.validate()?;
    let (lo, hi) = family.forward_region(c0)?;
    if !(gamma > lo && gamma < hi) {
        return Err(Error::Strip {
            what: "norm-bound abscissa",
            value: gamma,
            lo,
            hi,
        });
    }
    let guard = Guard::new();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let (prefactor, r) = match family {
        TransformFamily::TruncatedMellin { a } => (
            a.powf(gamma + c0 - 1.0),
            try_integrate_real_line(
                |t| c(guard.take(log_gamma(c(1.0 - c0 - gamma, -t))).re.exp(), 0.0),
                true,
                control,
            ),
        ),
        _ => {
            let g = gamma_real_positive(1.0 - c0)?;
            let base = if family.is_polynomial() { c0 + gamma } else { 1.0 - c0 + gamma };
            (
                g,
                try_integrate_real_line(|t| c(guard.take(rho(family, c(base, t))).norm(), 0.0), true, control),
            )
        }
    };
    let integral = guard.finish(r)?;
    Ok(prefactor * integral.value.re)
}

fn gamma_real_positive(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// int |(Ff)(gamma + i tau)| d tau over the whole line.
pub fn line_norm(ff: &LineFunction, control: &QuadratureControl) -> Result<f64> {
    let guard = Guard::new();
    let r = try_integrate_real_line(|t| Complex64::new(guard.take(ff.on_line(t)).norm(), 0.0), true, control);
    Ok(guard.finish(r)?.value.re)
}
