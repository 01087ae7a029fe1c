use num_complex::Complex64;
use std::f64::consts::PI;

use super::gk::{adaptive, Adaptive};
use super::{Integral, QuadratureControl, VerticalLine};
use crate::error::{Error, Result, TailDiagnostic};

const PANEL_WIDTH: f64 = 2.0;
const PANEL_MAX_SEGMENTS: usize = 512;
// Per-panel decay ratio below which the tail is treated as geometric.
const GEOMETRIC_RATIO: f64 = 0.9;
// Power-law tails at or below this exponent are not integrable in practice.
const MIN_POWER: f64 = 1.05;
const TAIL_MAX_DEPTH: usize = 60;
const TAIL_MAX_SEGMENTS: usize = 4000;
const TIGHTEN_PASSES: usize = 3;
const EVENNESS_POINTS: [f64; 3] = [0.5, 1.7, 4.3];
const EVENNESS_TOL: f64 = 1e-9;

struct Panel {
    fit: Adaptive,
    centre: f64,
}

struct Side {
    sign: f64,
    panels: Vec<Panel>,
    // tail integrated exactly by the reciprocal map, once decided
    mapped_tail: Option<Adaptive>,
}

enum Tail {
    Geometric { estimate: f64, ratio: f64 },
    Power { exponent: f64, ratio: f64, estimate: f64 },
}

impl Side {
    fn new(sign: f64) -> Self {
        Side {
            sign,
            panels: Vec::new(),
            mapped_tail: None,
        }
    }

    fn value(&self) -> Complex64 {
        let body: Complex64 = self.panels.iter().map(|p| p.fit.value).sum();
        body + self.mapped_tail.map_or(Complex64::new(0.0, 0.0), |t| t.value)
    }

    fn error(&self) -> f64 {
        let body: f64 = self.panels.iter().map(|p| p.fit.error).sum();
        body + self.mapped_tail.map_or(0.0, |t| t.error)
    }

    fn evaluations(&self) -> usize {
        let body: usize = self.panels.iter().map(|p| p.fit.evaluations).sum();
        body + self.mapped_tail.map_or(0, |t| t.evaluations)
    }

    fn tail(&self) -> Tail {
        let n = self.panels.len();
        let last = &self.panels[n - 1];
        let prior = &self.panels[n - 3];
        let (m1, m0) = (last.fit.l1, prior.fit.l1);
        if m1 == 0.0 {
            return Tail::Geometric {
                estimate: 0.0,
                ratio: 0.0,
            };
        }
        let ratio = if m0 > 0.0 { (m1 / m0).sqrt() } else { f64::INFINITY };
        if ratio < GEOMETRIC_RATIO {
            Tail::Geometric {
                estimate: m1 * ratio / (1.0 - ratio),
                ratio,
            }
        } else {
            let exponent = -(m1 / m0).ln() / (last.centre / prior.centre).ln();
            // density m1 / width at T, decaying like t^-p
            let t_end = last.centre + 0.5 * PANEL_WIDTH;
            let estimate = if exponent > 1.0 {
                m1 / PANEL_WIDTH * t_end / (exponent - 1.0)
            } else {
                f64::INFINITY
            };
            Tail::Power {
                exponent,
                ratio,
                estimate,
            }
        }
    }
}

fn fit_panel<G: Fn(f64) -> Complex64>(
    g: &G,
    sign: f64,
    k: usize,
    control: &QuadratureControl,
    tighten: f64,
) -> Result<Panel> {
    let (a, b) = (k as f64 * PANEL_WIDTH, (k + 1) as f64 * PANEL_WIDTH);
    let h = |t: f64| g(sign * t);
    let fit = adaptive(
        &h,
        a,
        b,
        |l1, _| (control.abs_tol / 16.0).max(control.rel_tol * l1 / 4.0) * tighten,
        control.max_refinements,
        PANEL_MAX_SEGMENTS,
    )?;
    Ok(Panel {
        fit,
        centre: 0.5 * (a + b),
    })
}

/// Integral over the real line (`both_sides`) or over [0, inf) of `g`.
///
/// Panels of width 2 are added outward from the origin up to the truncation
/// point T, each refined by adaptive Gauss–Kronrod bisection. The omitted
/// tail is estimated from the integrals of |g| over the outermost panels:
/// a geometric decay is summed as a geometric series; a power-law decay
/// t^-p with p > 1.05 is integrated exactly through the map t = T/u; slower
/// decay fails with a tail diagnostic. T grows by the control's growth
/// factor until the tail estimate falls below half the target.
pub fn try_integrate_real_line<G: Fn(f64) -> Complex64>(
    g: G,
    both_sides: bool,
    control: &QuadratureControl,
) -> Result<Integral> {
    control.validate()?;
    let mut sides = vec![Side::new(1.0)];
    if both_sides {
        sides.push(Side::new(-1.0));
    }
    let mut truncation = control.initial_truncation;
    let mut tighten = 1.0;
    let mut passes = 0;
    let mut step = 0;
    loop {
        let panels = ((truncation / PANEL_WIDTH).ceil() as usize).max(3);
        for side in sides.iter_mut().filter(|s| s.mapped_tail.is_none()) {
            while side.panels.len() < panels {
                let k = side.panels.len();
                side.panels.push(fit_panel(&g, side.sign, k, control, tighten)?);
            }
        }
        let t_now = panels as f64 * PANEL_WIDTH;
        let value: Complex64 = sides.iter().map(|s| s.value()).sum();
        let target = control.target(value.norm());

        let mut tail_total = 0.0;
        let mut slow: Option<TailDiagnostic> = None;
        for side in sides.iter_mut().filter(|s| s.mapped_tail.is_none()) {
            match side.tail() {
                Tail::Geometric { estimate, ratio } => {
                    tail_total += estimate;
                    if estimate > 0.5 * target {
                        slow.get_or_insert(TailDiagnostic {
                            truncation: t_now,
                            tail_estimate: estimate,
                            decay_ratio: ratio,
                            power_exponent: None,
                        });
                    }
                }
                Tail::Power {
                    exponent,
                    ratio,
                    estimate,
                } => {
                    let diag = TailDiagnostic {
                        truncation: t_now,
                        tail_estimate: estimate,
                        decay_ratio: ratio,
                        power_exponent: Some(exponent),
                    };
                    if exponent <= MIN_POWER {
                        if step >= 2 {
                            return Err(Error::SlowDecay(diag));
                        }
                        tail_total += estimate;
                        slow.get_or_insert(diag);
                    } else if estimate > 0.25 * target {
                        side.mapped_tail = Some(map_tail(&g, side.sign, t_now, target)?);
                    } else {
                        tail_total += estimate;
                    }
                }
            }
        }
        let value: Complex64 = sides.iter().map(|s| s.value()).sum();
        let target = control.target(value.norm());
        let error: f64 = sides.iter().map(|s| s.error()).sum();

        if slow.is_none() && tail_total <= 0.5 * target {
            if error <= target {
                return Ok(Integral {
                    value,
                    abs_error: error + tail_total,
                    truncation: t_now,
                    evaluations: sides.iter().map(|s| s.evaluations()).sum(),
                });
            }
            // discretization too coarse for the cancellation actually present
            passes += 1;
            if passes > TIGHTEN_PASSES {
                return Err(Error::NonConvergence(format!(
                    "panel error {error:.3e} exceeds target {target:.3e} at T = {t_now}"
                )));
            }
            tighten *= 0.5 * target / error;
            for side in sides.iter_mut() {
                for k in 0..side.panels.len() {
                    side.panels[k] = fit_panel(&g, side.sign, k, control, tighten)?;
                }
                if side.mapped_tail.is_some() {
                    let t_end = side.panels.len() as f64 * PANEL_WIDTH;
                    side.mapped_tail = Some(map_tail(&g, side.sign, t_end, target * tighten)?);
                }
            }
            continue;
        }
        step += 1;
        if step > control.max_truncation_steps {
            return Err(Error::SlowDecay(slow.unwrap_or(TailDiagnostic {
                truncation: t_now,
                tail_estimate: tail_total,
                decay_ratio: f64::NAN,
                power_exponent: None,
            })));
        }
        truncation = t_now * control.truncation_growth;
    }
}

/// int_T^inf g(sign t) dt = int_0^1 g(sign T / u) T / u^2 du.
fn map_tail<G: Fn(f64) -> Complex64>(
    g: &G,
    sign: f64,
    t_end: f64,
    target: f64,
) -> Result<Adaptive> {
    let h = |u: f64| {
        let t = t_end / u;
        let v = g(sign * t);
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            v * (t / u)
        }
    };
    let r = adaptive(
        &h,
        0.0,
        1.0,
        |_, _| 0.25 * target,
        TAIL_MAX_DEPTH,
        TAIL_MAX_SEGMENTS,
    )?;
    if !r.converged {
        return Err(Error::NonConvergence(format!(
            "power-law tail beyond T = {t_end}: error estimate {:.3e}",
            r.error
        )));
    }
    Ok(r)
}

/// (1/2 pi i) int over Re s = line.abscissa of `f(s) ds`.
pub fn integrate_vertical_line<F: Fn(Complex64) -> Complex64>(
    f: F,
    line: VerticalLine,
    control: &QuadratureControl,
) -> Result<Complex64> {
    try_integrate_vertical_line(f, line, control).map(|i| i.value)
}

/// As [`integrate_vertical_line`], returning the error accounting.
pub fn try_integrate_vertical_line<F: Fn(Complex64) -> Complex64>(
    f: F,
    line: VerticalLine,
    control: &QuadratureControl,
) -> Result<Integral> {
    line.validate()?;
    let c = line.abscissa;
    // ds = i dt, so (1/2 pi i) ds = dt / 2 pi
    try_integrate_real_line(|t| f(Complex64::new(c, t)) / (2.0 * PI), true, control)
}

/// int over the whole real line of an even integrand, as 2 int_0^inf.
pub fn integrate_symmetric_real_line<G: Fn(f64) -> Complex64>(g: G, control: &QuadratureControl) -> Result<Complex64> {
    try_integrate_symmetric_real_line(g, control).map(|i| i.value)
}

/// As [`integrate_symmetric_real_line`], returning the error accounting.
pub fn try_integrate_symmetric_real_line<G: Fn(f64) -> Complex64>(
    g: G,
    control: &QuadratureControl,
) -> Result<Integral> {
    for tau in EVENNESS_POINTS {
        let (plus, minus) = (g(tau), g(-tau));
        if (plus - minus).norm() > EVENNESS_TOL * plus.norm().max(minus.norm()) {
            return Err(Error::Asymmetry { tau, plus, minus });
        }
    }
    let half = try_integrate_real_line(g, false, control)?;
    Ok(Integral {
        value: half.value * 2.0,
        abs_error: half.abs_error * 2.0,
        ..half
    })
}

/// A vertical line Re z = abscissa whose two ends turn, at |Im z| = bend_height,
/// onto rays leaving at `angle` (measured from the positive real axis, upper
/// ray; the lower ray is its mirror image).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BentLine {
    pub abscissa: f64,
    pub bend_height: f64,
    pub angle: f64,
}

impl BentLine {
    /// Point and derivative of the path at parameter t (arclength from Im z = 0).
    pub fn point(&self, t: f64) -> (Complex64, Complex64) {
        let y = self.bend_height;
        if t.abs() <= y {
            (Complex64::new(self.abscissa, t), Complex64::new(0.0, 1.0))
        } else if t > 0.0 {
            let dir = Complex64::from_polar(1.0, self.angle);
            (Complex64::new(self.abscissa, y) + dir * (t - y), dir)
        } else {
            let dir = Complex64::from_polar(1.0, -self.angle);
            (Complex64::new(self.abscissa, -y) + dir * (-t - y), -dir)
        }
    }
}

/// (1/2 pi i) int over the bent path of `f(z) dz`.
pub fn integrate_contour<F: Fn(Complex64) -> Complex64>(
    f: F,
    path: &BentLine,
    control: &QuadratureControl,
) -> Result<Complex64> {
    try_integrate_contour(f, path, control).map(|i| i.value)
}

/// As [`integrate_contour`], returning the error accounting.
pub fn try_integrate_contour<F: Fn(Complex64) -> Complex64>(
    f: F,
    path: &BentLine,
    control: &QuadratureControl,
) -> Result<Integral> {
    let i2pi = Complex64::new(0.0, 2.0 * PI);
    try_integrate_real_line(
        |t| {
            let (z, dz) = path.point(t);
            f(z) * dz / i2pi
        },
        true,
        control,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexfn::gamma;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn gaussian_and_lorentzian() {
        let c = QuadratureControl::default();
        let g = integrate_symmetric_real_line(|t| re((-t * t).exp()), &c).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-10);
        let l = integrate_symmetric_real_line(|t| re(1.0 / (1.0 + t * t)), &c).unwrap();
        assert!((l.re - PI).abs() < 1e-9, "{}", l.re);
    }

    #[test]
    fn asymmetry_is_detected() {
        let c = QuadratureControl::default();
        let r = integrate_symmetric_real_line(|t| re((-(t - 0.1).powi(2)).exp()), &c);
        assert!(matches!(r, Err(Error::Asymmetry { .. })));
    }

    #[test]
    fn slow_decay_is_reported() {
        let c = QuadratureControl::default();
        let r = try_integrate_real_line(|t| re(1.0 / (1.0 + t.abs()).sqrt()), true, &c);
        match r {
            Err(Error::SlowDecay(d)) => assert!(d.power_exponent.unwrap() < 1.0),
            other => panic!("expected slow decay, got {other:?}"),
        }
    }

    #[test]
    fn euler_pair_on_the_line() {
        let c = QuadratureControl::default();
        let line = VerticalLine::clear_of(0.5, &[0.0]);
        let v = integrate_vertical_line(|s| gamma(s).unwrap(), line, &c).unwrap();
        assert!((v.re - (-1f64).exp()).abs() < 1e-10);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn bent_path_matches_line_for_entire_decay() {
        // (1/2 pi i) int e^{s^2} ds = 1 / (2 sqrt(pi)) on any vertical line;
        // e^{s^2} decays along rays with angle in (pi/4, 3 pi/4)
        let c = QuadratureControl::default();
        let f = |s: Complex64| (s * s).exp();
        let exact = 0.5 / PI.sqrt();
        let straight = integrate_vertical_line(f, VerticalLine::new(0.3, 1.0), &c).unwrap();
        assert!((straight.re - exact).abs() < 1e-11);
        let bent = BentLine {
            abscissa: 0.3,
            bend_height: 1.5,
            angle: 0.5 * PI + 0.3,
        };
        let v = integrate_contour(f, &bent, &c).unwrap();
        assert!((v.re - exact).abs() < 1e-11 && v.im.abs() < 1e-11, "{v}");
    }
}
