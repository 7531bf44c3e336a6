//! Limiting zero distribution of `Q_n` as `n -> infinity`.
//!
//! In the closed first quadrant the limit measure splits into `mu1`, carried
//! by an arc of the Stokes curve `Re chi(-z) = (pi/4) Im z` running from
//! `xi(alpha)` to `1 + 2i alpha`, and `mu2`, carried by a segment of the real
//! axis (below the threshold) or of the imaginary axis (above it). The full
//! measure is the fourfold symmetric extension, so `4 m1 + 2 m2 = 1`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{c, chi, h, sqrt_checked, zeta, zeta_prime, Alpha};

/// Half-width of the critical band on `zeta(2 alpha)`.
pub const CRITICAL_BAND: f64 = 1e-10;
/// Largest `|F|` accepted for a point of a traced arc.
pub const ARC_TOL: f64 = 1e-10;
/// Distance from `1 + 2i alpha` at which tracing stops.
pub const END_GAP: f64 = 5e-9;
/// Points closer than this to the support are rejected by [`limiting_cauchy`].
pub const SUPPORT_TOL: f64 = 1e-8;

const MAX_STEP: f64 = 0.02;
const MIN_STEP: f64 = 1e-13;
const SWITCH_SLOPE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

fn zeta_real(x: f64) -> f64 {
    zeta(c(x, 0.0)).map(|z| z.re).unwrap_or(f64::NAN)
}

/// The threshold `alpha0`, the positive root of `zeta(2 alpha) = 0`.
pub fn solve_alpha0() -> f64 {
    static ALPHA0: OnceLock<f64> = OnceLock::new();
    *ALPHA0.get_or_init(|| {
        let f = |a: f64| zeta_real(2.0 * a);
        let (mut lo, mut hi) = (0.1, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut a = 0.5 * (lo + hi);
        for _ in 0..4 {
            let d = 2.0
                * zeta_prime(c(2.0 * a, 0.0))
                    .map(|z| z.re)
                    .unwrap_or(f64::NAN);
            let step = f(a) / d;
            if !step.is_finite() {
                break;
            }
            a -= step;
        }
        a
    })
}

pub fn classify(alpha: Alpha) -> Regime {
    let z = zeta_real(2.0 * alpha.get());
    if z.abs() < CRITICAL_BAND {
        Regime::Critical
    } else if z < 0.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

/// `F(z) = Re chi(-z) - (pi/4) Im z`; the arc is a component of `F = 0`.
pub fn stokes_residual(alpha: Alpha, z: Complex64) -> Result<f64> {
    Ok(chi(alpha, -z)?.re - FRAC_PI_4 * z.im)
}

/// `Y(z) = (1 - z + sqrt((1-z)^2 + 4 alpha^2)) / (2 alpha)`.
pub fn upsilon(alpha: Alpha, z: Complex64) -> Result<Complex64> {
    let a = alpha.get();
    let u = 1.0 - z;
    let s = sqrt_checked("upsilon", u * u + 4.0 * a * a)?;
    Ok((u + s) / (2.0 * a))
}

/// `g'` for `g(z) = chi(-z) + i pi z / 4`, so that `F = Re g` and
/// `grad F = (Re g', -Im g')`.
fn stokes_gradient(alpha: Alpha, z: Complex64) -> Result<Complex64> {
    Ok(0.5 * upsilon(alpha, z)?.ln() + c(0.0, FRAC_PI_4))
}

/// Unnormalized tangent `(pi/2 + arg Y, log |Y|)` as a complex number.
fn tangent_vector(alpha: Alpha, z: Complex64) -> Result<Complex64> {
    let g = stokes_gradient(alpha, z)?;
    Ok(c(g.im, g.re))
}

pub fn endpoint(alpha: Alpha) -> Complex64 {
    c(1.0, 2.0 * alpha.get())
}

fn check_not_endpoint(op: &'static str, alpha: Alpha, z: Complex64) -> Result<()> {
    let e = endpoint(alpha);
    if (z - e).norm() < 1e-12 {
        return Err(Error::Endpoint { op, endpoint: e });
    }
    Ok(())
}

fn check_on_curve(op: &'static str, alpha: Alpha, z: Complex64) -> Result<()> {
    let f = stokes_residual(alpha, z)?;
    if !(f.abs() < 1e-8) {
        return Err(Error::Domain {
            op,
            detail: format!("{z} is not on the Stokes curve (residual {f:.3e})"),
        });
    }
    Ok(())
}

/// Left end of the arc: real for `alpha <= alpha0`, imaginary above.
pub fn xi(alpha: Alpha) -> Result<Complex64> {
    const OP: &str = "xi";
    let a = alpha.get();
    match classify(alpha) {
        Regime::Critical => Ok(c(0.0, 0.0)),
        Regime::Subcritical => {
            let x = 1.0 - a / solve_alpha0();
            let check = chi(alpha, c(-x, 0.0))?.norm();
            if !(check < 1e-10) {
                return Err(Error::Consistency {
                    op: OP,
                    detail: format!("chi(-xi) = {check:.3e} at xi = {x}"),
                });
            }
            Ok(c(x, 0.0))
        }
        Regime::Supercritical => {
            let f = |y: f64| stokes_residual(alpha, c(0.0, y));
            let (mut lo, mut hi) = (0.0, 2.0 * a);
            let (flo, fhi) = (f(lo)?, f(hi * (1.0 - 1e-12))?);
            if !(flo > 0.0 && fhi < 0.0) {
                return Err(Error::Consistency {
                    op: OP,
                    detail: format!("no sign change of F on i(0, {hi}): {flo:.3e}, {fhi:.3e}"),
                });
            }
            while hi - lo > 4.0 * f64::EPSILON * hi {
                let mid = 0.5 * (lo + hi);
                if f(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(c(0.0, 0.5 * (lo + hi)))
        }
    }
}

/// Slope `y'(x) = log|Y| / (pi/2 + arg Y)` of the arc through `z`.
pub fn curve_tangent(alpha: Alpha, z: Complex64) -> Result<f64> {
    const OP: &str = "curve_tangent";
    check_not_endpoint(OP, alpha, z)?;
    check_on_curve(OP, alpha, z)?;
    let t = tangent_vector(alpha, z)?;
    Ok(t.im / t.re)
}

/// `1/4 + log Y / (2 pi i)`: minus the jump of the limiting Cauchy
/// transform across the arc, divided by `2 pi i`.
fn jump_factor(alpha: Alpha, z: Complex64) -> Result<Complex64> {
    let l = upsilon(alpha, z)?.ln();
    Ok(0.25 + l / c(0.0, 2.0 * PI))
}

/// Density of `mu1` per unit `x` along the arc:
/// `((log|Y|)^2 + (pi/2 + arg Y)^2) / (pi (pi + 2 arg Y))`.
pub fn density_mu1(alpha: Alpha, z: Complex64) -> Result<f64> {
    const OP: &str = "density_mu1";
    check_not_endpoint(OP, alpha, z)?;
    check_on_curve(OP, alpha, z)?;
    let y = upsilon(alpha, z)?;
    let (l, th) = (y.norm().ln(), y.arg());
    Ok((l * l + (FRAC_PI_2 + th).powi(2)) / (PI * (PI + 2.0 * th)))
}

/// Density of `mu2` at distance `t` from the origin along its segment.
pub fn density_mu2(alpha: Alpha, t: f64) -> Result<f64> {
    const OP: &str = "density_mu2";
    let a = alpha.get();
    let end = match classify(alpha) {
        Regime::Critical => return Err(Error::EmptyMeasure { op: OP }),
        Regime::Subcritical => xi(alpha)?.re,
        Regime::Supercritical => xi(alpha)?.im,
    };
    if !(0.0..=end).contains(&t) {
        return Err(Error::Domain {
            op: OP,
            detail: format!("t = {t} outside the support [0, {end}]"),
        });
    }
    match classify(alpha) {
        Regime::Subcritical => Ok(0.5),
        _ => {
            let w = c(1.0, t);
            let s = sqrt_checked(OP, w * w + 4.0 * a * a)?;
            Ok(((w + s).norm() / (2.0 * a)).ln() / PI)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcSample {
    pub x: f64,
    pub z: Complex64,
    /// `dy/dx`; infinite where the arc is vertical.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveArc {
    pub alpha: Alpha,
    pub start: Complex64,
    pub end: Complex64,
    pub samples: Vec<ArcSample>,
}

impl CurveArc {
    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().map(|s| s.z)
    }

    /// Largest `|F|` over the samples.
    pub fn max_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                stokes_residual(self.alpha, s.z)
                    .map(f64::abs)
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }
}

/// Newton on `F` along the unit direction `dir`, starting at `z`.
fn correct(alpha: Alpha, z: Complex64, dir: Complex64, max_shift: f64) -> Option<Complex64> {
    let mut p = z;
    for _ in 0..12 {
        let f = stokes_residual(alpha, p).ok()?;
        if f.abs() < 1e-14 {
            return Some(p);
        }
        let g = stokes_gradient(alpha, p).ok()?;
        let df = g.re * dir.re - g.im * dir.im;
        if df == 0.0 || !df.is_finite() {
            return None;
        }
        p -= dir * (f / df);
        if (p - z).norm() > max_shift {
            return None;
        }
    }
    let f = stokes_residual(alpha, p).ok()?;
    (f.abs() < ARC_TOL).then_some(p)
}

fn unit(v: Complex64) -> Complex64 {
    v / v.norm()
}

/// Adaptive continuation from `start` to within [`END_GAP`] of the endpoint.
fn continuation(alpha: Alpha, start: Complex64) -> Result<Vec<Complex64>> {
    const OP: &str = "trace_curve";
    let e = endpoint(alpha);
    let mut t = unit(tangent_vector(alpha, start)?);
    if t.re < 0.0 || (t.re == 0.0 && t.im < 0.0) {
        t = -t;
    }
    let mut pts = vec![start];
    let mut z = start;
    let mut step: f64 = 1e-4;
    let fail = |detail: String, last: Complex64| Error::Continuation {
        op: OP,
        detail,
        last,
    };
    while (z - e).norm() > END_GAP {
        if pts.len() > 1_000_000 {
            return Err(fail("too many steps".into(), z));
        }
        let r = (z - e).norm();
        let h = step.min(MAX_STEP).min(if r < 4.0 * step {
            0.5 * r
        } else {
            f64::INFINITY
        });
        let pred = z + h * t;
        let next = correct(alpha, pred, c(0.0, 1.0) * t, 0.2 * h).and_then(|p| {
            let nt = unit(tangent_vector(alpha, p).ok()?);
            let nt = if (nt * t.conj()).re < 0.0 { -nt } else { nt };
            let turn = (nt * t.conj()).arg().abs();
            (turn < 0.2 && nt.is_finite()).then_some((p, nt))
        });
        match next {
            Some((p, nt)) => {
                z = p;
                t = nt;
                pts.push(z);
                step = (1.5 * h).min(MAX_STEP);
            }
            None => {
                step = 0.5 * h;
                if step < MIN_STEP {
                    return Err(fail(format!("step size fell below {MIN_STEP:e}"), z));
                }
            }
        }
    }
    Ok(pts)
}

/// Traces the arc of `mu1` from `xi(alpha)` to `1 + 2i alpha` and returns
/// `steps` samples roughly equidistant in arc length.
pub fn trace_curve(alpha: Alpha, steps: usize) -> Result<CurveArc> {
    const OP: &str = "trace_curve";
    if steps < 16 {
        return Err(Error::InvalidParameter {
            op: OP,
            detail: format!("need at least 16 samples, got {steps}"),
        });
    }
    let start = xi(alpha)?;
    let dense = continuation(alpha, start)?;
    let mut cum = vec![0.0];
    for w in dense.windows(2) {
        cum.push(cum.last().unwrap() + (w[1] - w[0]).norm());
    }
    let total = *cum.last().unwrap();
    let mut pts = Vec::with_capacity(steps);
    let mut j = 0;
    for k in 0..steps {
        let p = if k == 0 {
            dense[0]
        } else if k == steps - 1 {
            *dense.last().unwrap()
        } else {
            let s = total * k as f64 / (steps - 1) as f64;
            while cum[j + 1] < s {
                j += 1;
            }
            let f = (s - cum[j]) / (cum[j + 1] - cum[j]);
            let guess = dense[j] + f * (dense[j + 1] - dense[j]);
            let chord = unit(dense[j + 1] - dense[j]);
            correct(alpha, guess, c(0.0, 1.0) * chord, 1e-3).ok_or_else(|| Error::Continuation {
                op: OP,
                detail: "resampled point did not return to the curve".into(),
                last: guess,
            })?
        };
        pts.push(p);
    }
    let samples = pts
        .into_iter()
        .map(|z| {
            let t = tangent_vector(alpha, z)?;
            Ok(ArcSample {
                x: z.re,
                z,
                slope: t.im / t.re,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveArc {
        alpha,
        start,
        end: endpoint(alpha),
        samples,
    })
}

/// Solves `F = 0` on the line `Re z = x` (or `Im z = y` when `vertical`).
fn solve_on_line(alpha: Alpha, guess: Complex64, vertical: bool) -> Option<Complex64> {
    let dir = if vertical { c(1.0, 0.0) } else { c(0.0, 1.0) };
    let mut p = guess;
    for _ in 0..40 {
        let f = stokes_residual(alpha, p).ok()?;
        if f.abs() < 1e-15 {
            break;
        }
        let g = stokes_gradient(alpha, p).ok()?;
        let df = g.re * dir.re - g.im * dir.im;
        let d = f / df;
        if !d.is_finite() {
            return None;
        }
        p -= dir * d;
        if d.abs() < 1e-15 * (1.0 + p.norm()) {
            break;
        }
    }
    (stokes_residual(alpha, p).ok()?.abs() < ARC_TOL).then_some(p)
}

fn integrate(op: &'static str, f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let out = quadrature::double_exponential::integrate(f, a, b, tol);
    if !out.integral.is_finite() || out.error_estimate > 10.0 * tol {
        return Err(Error::Precision {
            op,
            detail: format!(
                "quadrature error estimate {:.2e} exceeds {tol:.1e}",
                out.error_estimate
            ),
        });
    }
    Ok(out.integral)
}

/// Mass of `mu1` along the dense polyline `pts`, integrating in `x` where
/// the arc is flat and in `y` where `|y'| > 4`.
fn arc_mass(alpha: Alpha, pts: &[Complex64], tol: f64) -> Result<f64> {
    const OP: &str = "measure_masses";
    let e = endpoint(alpha);
    let steep: Vec<bool> = pts
        .iter()
        .map(|&z| {
            let t = tangent_vector(alpha, z)?;
            Ok(t.im.abs() > SWITCH_SLOPE * t.re.abs())
        })
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    let mut i = 0;
    while i + 1 < pts.len() {
        let mut j = i + 1;
        while j + 1 < pts.len() && steep[j] == steep[i] {
            j += 1;
        }
        let vertical = steep[i];
        let coord = |z: Complex64| if vertical { z.im } else { z.re };
        let run = &pts[i..=j];
        // linear interpolation in the run parameter for the Newton guess
        let guess = |s: f64| {
            let k = run
                .windows(2)
                .position(|w| (coord(w[0]) - s) * (coord(w[1]) - s) <= 0.0)
                .unwrap_or(run.len() - 2);
            let (p, q) = (run[k], run[k + 1]);
            let f = (s - coord(p)) / (coord(q) - coord(p));
            p + f.clamp(0.0, 1.0) * (q - p)
        };
        let density = |s: f64| -> f64 {
            let g = guess(s);
            let z = match solve_on_line(alpha, g, vertical) {
                Some(z) => z,
                // within a whisker of the endpoint the density is ~1e-4 or less
                None if (g - e).norm() < 1e-6 => return 0.0,
                None => return f64::NAN,
            };
            let (Ok(f), Ok(t)) = (jump_factor(alpha, z), tangent_vector(alpha, z)) else {
                return f64::NAN;
            };
            let dz = if vertical {
                c(t.re / t.im, 1.0)
            } else {
                c(1.0, t.im / t.re)
            };
            (f * dz).re.abs()
        };
        let (a, b) = (coord(run[0]), coord(run[run.len() - 1]));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        total += integrate(OP, density, lo, hi, tol)?;
        i = j;
    }
    Ok(total)
}

/// Dense polyline of the arc, closed at the endpoint itself.
fn dense_arc(alpha: Alpha) -> Result<Vec<Complex64>> {
    let mut pts = continuation(alpha, xi(alpha)?)?;
    pts.push(endpoint(alpha));
    Ok(pts)
}

/// `(m1, m2)`: masses of `mu1` and `mu2` in the closed first quadrant.
pub fn measure_masses(alpha: Alpha, tol: f64) -> Result<(f64, f64)> {
    const OP: &str = "measure_masses";
    let start = xi(alpha)?;
    let m1 = arc_mass(alpha, &dense_arc(alpha)?, tol)?;
    let m2 = match classify(alpha) {
        Regime::Critical => 0.0,
        Regime::Subcritical => integrate(
            OP,
            |t| density_mu2(alpha, t).unwrap_or(f64::NAN),
            0.0,
            start.re,
            tol,
        )?,
        Regime::Supercritical => integrate(
            OP,
            |t| density_mu2(alpha, t).unwrap_or(f64::NAN),
            0.0,
            start.im,
            tol,
        )?,
    };
    Ok((m1, m2))
}

/// Mass of `mu1` on the part of the arc with `x0 <= Re z <= x1`.
pub fn mu1_mass_between(alpha: Alpha, x0: f64, x1: f64, tol: f64) -> Result<f64> {
    const OP: &str = "mu1_mass_between";
    let pts = dense_arc(alpha)?;
    if pts.windows(2).any(|w| w[1].re <= w[0].re) {
        return Err(Error::Capability {
            op: OP,
            detail: "the arc is not a graph over x".into(),
        });
    }
    let (lo, hi) = (x0.max(pts[0].re), x1.min(1.0));
    if lo >= hi {
        return Ok(0.0);
    }
    let at = |x: f64| {
        let k = pts.partition_point(|z| z.re < x).clamp(1, pts.len() - 1);
        let (p, q) = (pts[k - 1], pts[k]);
        p + (x - p.re) / (q.re - p.re) * (q - p)
    };
    let mut sub = vec![at(lo)];
    sub.extend(pts.iter().filter(|z| z.re > lo && z.re < hi));
    sub.push(if hi >= 1.0 { endpoint(alpha) } else { at(hi) });
    arc_mass(alpha, &sub, tol)
}

/// Mass of `mu2` on `t0 <= t <= t1` along its half segment.
pub fn mu2_mass_between(alpha: Alpha, t0: f64, t1: f64, tol: f64) -> Result<f64> {
    let len = match classify(alpha) {
        Regime::Critical => return Ok(0.0),
        Regime::Subcritical => xi(alpha)?.re,
        Regime::Supercritical => xi(alpha)?.im,
    };
    let (lo, hi) = (t0.max(0.0), t1.min(len));
    if lo >= hi {
        return Ok(0.0);
    }
    integrate(
        "mu2_mass_between",
        |t| density_mu2(alpha, t).unwrap_or(f64::NAN),
        lo,
        hi,
        tol,
    )
}

/// Euclidean distance from `z` to the support of the full limit measure,
/// measured against the dense arc polyline and the axis segment.
pub fn support_distance(alpha: Alpha, z: Complex64) -> Result<f64> {
    let w = c(z.re.abs(), z.im.abs());
    let pts = dense_arc(alpha)?;
    let seg = |p: Complex64, q: Complex64| {
        let d = q - p;
        let t = if d.norm_sqr() == 0.0 {
            0.0
        } else {
            (((w - p) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0)
        };
        (w - p - t * d).norm()
    };
    let arc = pts
        .windows(2)
        .map(|s| seg(s[0], s[1]))
        .fold(f64::INFINITY, f64::min);
    let s = xi(alpha)?;
    let axis = match classify(alpha) {
        Regime::Critical => w.norm(),
        Regime::Subcritical => seg(c(0.0, 0.0), s),
        Regime::Supercritical => seg(c(0.0, 0.0), s),
    };
    Ok(arc.min(axis))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub alpha: Alpha,
    pub regime: Regime,
    pub alpha0: f64,
    pub xi: Complex64,
    pub arc: CurveArc,
    pub mu1_mass: f64,
    pub mu2_mass: f64,
}

impl LimitLaw {
    /// `4 m1 + 2 m2`, which should be 1.
    pub fn total_mass(&self) -> f64 {
        4.0 * self.mu1_mass + 2.0 * self.mu2_mass
    }
}

pub fn limit_law(alpha: Alpha, steps: usize, tol: f64) -> Result<LimitLaw> {
    let arc = trace_curve(alpha, steps)?;
    let (mu1_mass, mu2_mass) = measure_masses(alpha, tol)?;
    Ok(LimitLaw {
        alpha,
        regime: classify(alpha),
        alpha0: solve_alpha0(),
        xi: arc.start,
        arc,
        mu1_mass,
        mu2_mass,
    })
}

fn on_support(alpha: Alpha, w: Complex64) -> Result<bool> {
    let s = xi(alpha)?;
    let tol = SUPPORT_TOL;
    let axis = match classify(alpha) {
        Regime::Subcritical => w.im <= tol && w.re <= s.re + tol,
        Regime::Supercritical => w.re <= tol && w.im <= s.im + tol,
        Regime::Critical => w.norm() <= tol,
    };
    if axis || (w - endpoint(alpha)).norm() <= tol {
        return Ok(true);
    }
    let a = alpha.get();
    if w.re > 1.0 + tol || w.im > 2.0 * a + tol {
        return Ok(false);
    }
    let f = stokes_residual(alpha, w)?;
    let g = stokes_gradient(alpha, w)?.norm();
    Ok(f.abs() <= tol * g)
}

/// Which branch formula applies at `w` in the closed first quadrant.
fn in_omega_minus(alpha: Alpha, w: Complex64) -> Result<bool> {
    if w.re > 1.0 {
        return Ok(true);
    }
    if w.im > 2.0 * alpha.get() {
        return Ok(false);
    }
    Ok(stokes_residual(alpha, w)? > 0.0)
}

fn cauchy_quadrant(alpha: Alpha, w: Complex64) -> Result<Complex64> {
    const OP: &str = "limiting_cauchy";
    if on_support(alpha, w)? {
        return Err(Error::BranchCut {
            op: OP,
            branch: "support of the limit measure",
            arg: w,
        });
    }
    let a = alpha.get();
    // h(-w) has its cut on Re w = 1 above the endpoint; the two branch
    // formulas glue continuously there, so average across it
    if (w.re - 1.0).abs() <= 1e-9 && w.im > 2.0 * a {
        let d = 1e-6;
        let l = cauchy_quadrant(alpha, w - d)?;
        let r = cauchy_quadrant(alpha, w + d)?;
        return Ok(0.5 * (l + r));
    }
    if in_omega_minus(alpha, w)? {
        Ok(-(2.0 * a).ln() + h(alpha, w)? + h(alpha, -w)?)
    } else {
        Ok(c(0.0, -FRAC_PI_2) + h(alpha, w)? - h(alpha, -w)?)
    }
}

/// Cauchy transform `int dmu(t) / (z - t)` of the full limit measure.
pub fn limiting_cauchy(alpha: Alpha, z: Complex64) -> Result<Complex64> {
    let w = c(z.re.abs(), z.im.abs());
    let mut v = cauchy_quadrant(alpha, w)?;
    if z.im < 0.0 {
        v = v.conj();
    }
    if z.re < 0.0 {
        v = -v.conj();
    }
    Ok(v)
}

/// Points at equal-mass quantiles of the limit measure, `n` in total and
/// symmetric under `z -> -z` and `z -> conj z`. Used as starting points for
/// the finite-`n` root solver.
pub(crate) fn quantile_points(alpha: Alpha, n: usize) -> Result<Vec<Complex64>> {
    let start = xi(alpha)?;
    let mut arc = continuation(alpha, start)?;
    arc.push(endpoint(alpha));
    let mut cum = vec![0.0];
    for w in arc.windows(2) {
        let f = jump_factor(alpha, 0.5 * (w[0] + w[1]))?;
        cum.push(cum.last().unwrap() + (f * (w[1] - w[0])).re.abs());
    }
    let m1 = *cum.last().unwrap();
    let per_arc = ((n as f64 * m1).round() as usize).min(n / 4);
    let on_axis = n - 4 * per_arc;
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..per_arc {
        let target = m1 * (k as f64 + 0.5) / per_arc as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let f = (target - cum[j]) / (cum[j + 1] - cum[j]);
        let z = arc[j] + f * (arc[j + 1] - arc[j]);
        out.extend([z, -z, z.conj(), -z.conj()]);
    }
    // axis quantiles on [-L, L]; only the sign pattern differs between regimes
    let (len, dir) = match classify(alpha) {
        Regime::Subcritical => (start.re, c(1.0, 0.0)),
        Regime::Supercritical => (start.im, c(0.0, 1.0)),
        Regime::Critical => (0.0, c(1.0, 0.0)),
    };
    let grid = 2048;
    let mut acc = vec![0.0];
    for k in 0..grid {
        let t = len * (k as f64 + 0.5) / grid as f64;
        acc.push(acc.last().unwrap() + density_mu2(alpha, t).unwrap_or(0.0));
    }
    let total = *acc.last().unwrap();
    // position at mass fraction q in [0, 1] of the half segment
    let locate = |q: f64| {
        if total <= 0.0 {
            return 0.0;
        }
        let target = q * total;
        let k = acc.partition_point(|&v| v < target).clamp(1, grid);
        let f = (target - acc[k - 1]) / (acc[k] - acc[k - 1]).max(f64::MIN_POSITIVE);
        len * ((k - 1) as f64 + f) / grid as f64
    };
    for k in 0..on_axis {
        // symmetric quantiles of [-L, L]: u in (-1, 1)
        let u = (2.0 * k as f64 + 1.0) / on_axis as f64 - 1.0;
        out.push(dir * locate(u.abs()).copysign(u));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn al(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    fn family() -> Vec<Alpha> {
        [0.05, 0.15, 0.25, solve_alpha0(), 0.45, 0.8, 2.0]
            .iter()
            .map(|&a| al(a))
            .collect()
    }

    #[test]
    fn threshold() {
        let a0 = solve_alpha0();
        assert!((a0 - 0.33137).abs() < 5e-5, "{a0}");
        assert!(zeta(c(2.0 * a0, 0.0)).unwrap().norm() < 1e-13);
        assert!(chi(al(a0), c(0.0, 0.0)).unwrap().norm() < 1e-13);
        let handles: Vec<_> = (0..4).map(|_| std::thread::spawn(solve_alpha0)).collect();
        for hd in handles {
            assert_eq!(hd.join().unwrap(), a0);
        }
    }

    #[test]
    fn regimes() {
        assert_eq!(classify(al(0.25)), Regime::Subcritical);
        assert_eq!(classify(al(1.0)), Regime::Supercritical);
        assert_eq!(classify(al(solve_alpha0())), Regime::Critical);
    }

    #[test]
    fn left_endpoint() {
        assert!((xi(al(0.25)).unwrap() - c(0.246, 0.0)).norm() < 1e-3);
        let x = xi(al(0.5)).unwrap();
        assert!(x.re == 0.0 && (x.im - 0.369).abs() < 1e-3);
        assert_eq!(xi(al(solve_alpha0())).unwrap(), c(0.0, 0.0));
        for a in family() {
            let x = xi(a).unwrap();
            assert!(stokes_residual(a, x).unwrap().abs() < 1e-13);
            match classify(a) {
                Regime::Subcritical => assert!(x.im == 0.0 && 0.0 < x.re && x.re < 1.0),
                Regime::Supercritical => assert!(x.re == 0.0 && 0.0 < x.im && x.im < 2.0 * a.get()),
                Regime::Critical => assert_eq!(x, c(0.0, 0.0)),
            }
        }
    }

    #[test]
    fn residual_at_known_points() {
        let a = al(0.5);
        assert!(stokes_residual(a, c(1.0, 1.0)).unwrap().abs() < 1e-14);
        assert!((stokes_residual(a, c(1.0, 0.0)).unwrap() - 0.5).abs() < 1e-14);
        let q = al(0.25);
        assert!(stokes_residual(q, xi(q).unwrap()).unwrap().abs() < 1e-14);
    }

    #[test]
    fn tangent_at_real_endpoint() {
        let a = al(0.25);
        let x = xi(a).unwrap().re;
        let u = 1.0 - x;
        // chi(-xi) = 0 forces log Y(xi) = sqrt(u^2 + 4 alpha^2) / u
        let log_y = (u * u + 0.25).sqrt() / u;
        let s = curve_tangent(a, c(x, 0.0)).unwrap();
        assert!((s - 2.0 / PI * log_y).abs() < 1e-12);
        assert!(s > 0.0);
        let d = density_mu1(a, c(x, 0.0)).unwrap();
        assert!((d - (log_y * log_y + PI * PI / 4.0) / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn tangent_matches_finite_differences() {
        let a = al(0.5);
        let arc = trace_curve(a, 64).unwrap();
        let hstep = 1e-4;
        for s in &arc.samples[5..60] {
            let z2 = solve_on_line(a, s.z + hstep + c(0.0, hstep * s.slope), false).unwrap();
            let z1 = solve_on_line(a, s.z - hstep - c(0.0, hstep * s.slope), false).unwrap();
            let fd = (z2.im - z1.im) / (2.0 * hstep);
            assert!((fd - s.slope).abs() < 1e-7, "{} vs {}", fd, s.slope);
            assert!((z2.re - s.z.re - hstep).abs() < 1e-15);
        }
    }

    #[test]
    fn endpoint_is_indeterminate() {
        let a = al(0.5);
        let e = endpoint(a);
        assert!(matches!(curve_tangent(a, e), Err(Error::Endpoint { .. })));
        assert!(matches!(density_mu1(a, e), Err(Error::Endpoint { .. })));
        assert!((upsilon(a, e).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        assert!(matches!(
            curve_tangent(a, c(0.5, 0.1)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn arcs_of_the_family() {
        for a in family() {
            let arc = trace_curve(a, 200).unwrap();
            assert!(arc.max_residual() < ARC_TOL);
            assert!((arc.samples[0].z - xi(a).unwrap()).norm() < 1e-8);
            let last = arc.samples.last().unwrap().z;
            assert!((last - endpoint(a)).norm() < 1e-8 && last != endpoint(a));
            assert!(arc.samples.windows(2).all(|w| w[1].x > w[0].x));
            for s in &arc.samples[..arc.samples.len() - 1] {
                assert!(density_mu1(a, s.z).unwrap() > 0.0);
            }
            let tail = density_mu1(a, last).unwrap();
            assert!(tail < 1e-3, "{tail}");
        }
        assert!(trace_curve(al(0.5), 8).is_err());
    }

    #[test]
    fn density_forms_agree() {
        let a = al(0.5);
        let arc = trace_curve(a, 33).unwrap();
        let s = arc.samples[16];
        let f = (0.25 + upsilon(a, s.z).unwrap().ln() / c(0.0, 2.0 * PI)) * c(1.0, s.slope);
        assert!(f.im.abs() < 1e-12);
        assert!((f.re - density_mu1(a, s.z).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn axis_densities() {
        let q = al(0.25);
        for t in [0.0, 0.1, 0.2, 0.245] {
            assert_eq!(density_mu2(q, t).unwrap(), 0.5);
        }
        assert!(matches!(density_mu2(q, 0.3), Err(Error::Domain { .. })));
        let expected = (1.0 + 2f64.sqrt()).ln() / PI;
        assert!((density_mu2(al(0.5), 0.0).unwrap() - expected).abs() < 1e-15);
        assert!(matches!(
            density_mu2(al(solve_alpha0()), 0.0),
            Err(Error::EmptyMeasure { .. })
        ));
        let a = al(1.0);
        let top = xi(a).unwrap().im;
        for k in 0..=10 {
            assert!(density_mu2(a, top * k as f64 / 10.0).unwrap() >= 0.0);
        }
    }

    // m1 = Re[Phi(E) - Phi(xi)] for the antiderivative Phi(z) = z/4 + chi(-z)/(pi i)
    // of the jump factor; m2 from integrating the axis density exactly.
    fn closed_form_masses(a: Alpha) -> (f64, f64) {
        let x = xi(a).unwrap();
        let phi = |z: Complex64| z / 4.0 + chi(a, -z).unwrap() / c(0.0, PI);
        let m1 = (phi(endpoint(a)) - phi(x)).re;
        let m2 = match classify(a) {
            Regime::Critical => 0.0,
            Regime::Subcritical => x.re / 2.0,
            Regime::Supercritical => -2.0 / PI * chi(a, x).unwrap().im,
        };
        (m1, m2)
    }

    #[test]
    fn masses_match_closed_forms() {
        for a in family() {
            let (m1, m2) = measure_masses(a, 1e-10).unwrap();
            let (o1, o2) = closed_form_masses(a);
            assert!((m1 - o1).abs() < 1e-9, "{}: {m1} vs {o1}", a.get());
            assert!((m2 - o2).abs() < 1e-9, "{}: {m2} vs {o2}", a.get());
            assert!((4.0 * m1 + 2.0 * m2 - 1.0).abs() < 1e-6);
        }
        let (m1, m2) = measure_masses(al(solve_alpha0()), 1e-10).unwrap();
        assert_eq!(m2, 0.0);
        assert!((4.0 * m1 - 1.0).abs() < 1e-6);
        let (_, m2) = measure_masses(al(0.25), 1e-10).unwrap();
        assert!((m2 - xi(al(0.25)).unwrap().re / 2.0).abs() < 1e-12);
        assert!((m2 - 0.123).abs() < 1e-3);
    }

    #[test]
    fn partial_masses_add_up() {
        for a in [al(0.25), al(1.0)] {
            let (m1, m2) = measure_masses(a, 1e-10).unwrap();
            let x0 = xi(a).unwrap().re;
            let cuts: Vec<f64> = (0..=7).map(|k| x0 + (1.0 - x0) * k as f64 / 7.0).collect();
            let parts: f64 = cuts
                .windows(2)
                .map(|w| mu1_mass_between(a, w[0], w[1], 1e-11).unwrap())
                .sum();
            assert!((parts - m1).abs() < 1e-9, "{parts} vs {m1}");
            let len = xi(a).unwrap().norm();
            let halves = mu2_mass_between(a, 0.0, 0.4 * len, 1e-11).unwrap()
                + mu2_mass_between(a, 0.4 * len, len, 1e-11).unwrap();
            assert!((halves - m2).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_to_support() {
        let a = al(0.25);
        assert!(support_distance(a, c(0.1, 0.0)).unwrap() < 1e-15);
        assert!((support_distance(a, c(0.1, -0.03)).unwrap() - 0.03).abs() < 1e-12);
        let arc = trace_curve(a, 50).unwrap();
        let z = -arc.samples[20].z;
        assert!(support_distance(a, z).unwrap() < 1e-4);
        assert!(support_distance(a, c(3.0, 3.0)).unwrap() > 2.0);
    }

    #[test]
    fn inequality_on_the_rectangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in [0.25, 0.5, 1.0] {
            let a = al(a);
            for _ in 0..200 {
                let z = c(rng.gen_range(1e-6..1.0), rng.gen_range(1e-6..2.0 * a.get()));
                assert!(chi(a, z).unwrap().re < chi(a, -z).unwrap().re, "{z}");
            }
        }
    }

    #[test]
    fn cauchy_at_infinity_and_symmetries() {
        let a = al(0.5);
        let mut prev = f64::INFINITY;
        for t in [10.0, 50.0, 100.0] {
            let z = c(t, t);
            let d = (z * limiting_cauchy(a, z).unwrap() - 1.0).norm();
            assert!(d < prev && d < 1e-3);
            prev = d;
        }
        let a = al(1.0);
        let z = c(0.7, 0.9);
        let v = limiting_cauchy(a, z).unwrap();
        assert!((limiting_cauchy(a, -z).unwrap() + v).norm() < 1e-14);
        assert!((limiting_cauchy(a, z.conj()).unwrap() - v.conj()).norm() < 1e-14);
    }

    #[test]
    fn cauchy_rejects_the_support() {
        let a = al(0.25);
        let arc = trace_curve(a, 20).unwrap();
        for z in [
            c(0.1, 0.0),
            c(-0.2, 0.0),
            arc.samples[7].z,
            -arc.samples[7].z.conj(),
        ] {
            assert!(limiting_cauchy(a, z).is_err(), "{z}");
        }
        let b = al(1.0);
        assert!(limiting_cauchy(b, c(0.0, 1.0)).is_err());
        assert!(limiting_cauchy(b, c(0.0, -1.0)).is_err());
        assert!(limiting_cauchy(b, c(0.0, 1.5)).is_ok());
    }

    #[test]
    fn cauchy_is_continuous_off_the_support() {
        let eps = 1e-10;
        let q = al(0.25);
        for x in [0.4, 0.9, 1.0, 1.5, 3.0] {
            let up = limiting_cauchy(q, c(x, eps)).unwrap();
            let down = limiting_cauchy(q, c(x, -eps)).unwrap();
            assert!((up - down).norm() < 1e-8, "{x}: {up} {down}");
            assert!(limiting_cauchy(q, c(x, 0.0)).unwrap().im.abs() < 1e-14);
        }
        let b = al(1.0);
        for y in [1.5, 1.9, 2.0, 2.5, 5.0] {
            let r = limiting_cauchy(b, c(eps, y)).unwrap();
            let l = limiting_cauchy(b, c(-eps, y)).unwrap();
            assert!((r - l).norm() < 1e-8, "{y}: {r} {l}");
        }
        // across the line Re z = 1 above the endpoint, where h(-z) has its cut
        for y in [1.2, 2.5] {
            let l = limiting_cauchy(q, c(1.0 - eps, y)).unwrap();
            let r = limiting_cauchy(q, c(1.0 + eps, y)).unwrap();
            let m = limiting_cauchy(q, c(1.0, y)).unwrap();
            assert!((l - r).norm() < 1e-8 && (m - l).norm() < 1e-8);
        }
    }

    #[test]
    fn jump_across_the_arc() {
        for a in [al(0.25), al(0.5)] {
            let arc = trace_curve(a, 41).unwrap();
            for s in &arc.samples[10..30] {
                let t = unit(c(1.0, s.slope));
                let nrm = c(0.0, 1.0) * t;
                // one-sided limits by Richardson extrapolation from offsets d, 2d;
                // F < 0 on the side of increasing Im z
                let across = |d: f64| {
                    limiting_cauchy(a, s.z + d * nrm).unwrap()
                        - limiting_cauchy(a, s.z - d * nrm).unwrap()
                };
                let diff = 2.0 * across(1e-6) - across(2e-6);
                let y = upsilon(a, s.z).unwrap();
                let jump = c(0.0, -FRAC_PI_2) - y.ln();
                assert!((diff - jump).norm() < 1e-8, "{}", (diff - jump).norm());
                // Plemelj: density per unit x from the jump
                let rho = (-diff / c(0.0, 2.0 * PI) * c(1.0, s.slope)).re;
                assert!((rho - density_mu1(a, s.z).unwrap()).abs() < 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn cauchy_symmetric(re in 1.1f64..3.0, im in 0.01f64..3.0, a in 0.05f64..2.0) {
            let a = al(a);
            let z = c(re, im);
            let v = limiting_cauchy(a, z).unwrap();
            prop_assert!((limiting_cauchy(a, -z).unwrap() + v).norm() < 1e-13);
            prop_assert!((limiting_cauchy(a, z.conj()).unwrap() - v.conj()).norm() < 1e-13);
        }
    }
}
