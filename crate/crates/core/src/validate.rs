//! Numerical cross-checks between independent routes: Bessel products
//! against the recurrence, uniform expansions against series, large-`n`
//! expansions of `q_n` and `Q_n` against exact evaluation, and finite-`n`
//! roots against the limit law.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limitlaw::{
    classify, mu1_mass_between, mu2_mass_between, stokes_residual, support_distance, trace_curve,
    xi, Regime,
};
use crate::lommel::{lommel_recur, lommel_via_bessel, q_big, q_small};
use crate::scaled::ScaledValue;
use crate::specfun::{
    amplitude_f, amplitude_g, bessel_i, bessel_k, c, chi, olver_i, olver_k, Alpha, Sign,
};
use crate::spectra::{empirical_cauchy, roots_q, RootSet};

/// Largest accepted relative deviation in [`check_bessel_identity`].
pub const BESSEL_IDENTITY_TOL: f64 = 1e-8;
/// Accepted range of `e(2 nu) / e(nu)` in [`check_olver_decay`].
pub const OLVER_RATIO_RANGE: (f64, f64) = (0.3, 0.7);
/// Final relative error accepted in [`check_q_asymptotics`].
pub const Q_ASYMPTOTIC_TOL: f64 = 0.1;
/// Minimum `|F|` for a point to count as clearly on one side of the Stokes line.
pub const SIDE_MARGIN: f64 = 0.01;
/// Largest bin discrepancy accepted by [`compare_empirical_limit`].
pub const BIN_TOL: f64 = 0.05;
/// Final error accepted by [`check_cauchy_convergence`].
pub const CAUCHY_TOL: f64 = 0.02;
/// Test points must be at least this far from the support.
pub const CAUCHY_MARGIN: f64 = 0.05;
/// Default bin count of [`compare_empirical_limit`].
pub const DEFAULT_BINS: usize = 25;

fn rel_dev(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Roots of `Q_n` memoized per process; the comparisons below reuse the
/// same large solves many times.
pub fn roots_cached(n: usize, alpha: Alpha) -> Result<Arc<RootSet>> {
    type Cache = Mutex<HashMap<(usize, u64), Arc<RootSet>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (n, alpha.get().to_bits());
    if let Some(rs) = cache.lock().unwrap().get(&key) {
        return Ok(rs.clone());
    }
    let rs = Arc::new(roots_q(n, alpha)?);
    cache.lock().unwrap().insert(key, rs.clone());
    Ok(rs)
}

// ---------------------------------------------------------------------------
// Bessel-product identity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselPoint {
    pub n: usize,
    pub nu: Complex64,
    pub z: f64,
    pub recurrence: Option<Complex64>,
    pub bessel: Option<Complex64>,
    pub deviation: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselReport {
    pub points: Vec<BesselPoint>,
    pub max_deviation: f64,
    pub pass: bool,
}

/// The default grid: `n <= 20`, generic `|nu| <= 5`, `0.5 <= z <= 5`.
pub fn bessel_grid() -> Vec<(usize, Complex64, f64)> {
    let mut grid = Vec::new();
    for n in [0, 1, 2, 3, 6, 9, 13, 20] {
        for nu in [
            c(0.3, 0.0),
            c(0.45, 0.1),
            c(-1.7, 0.0),
            c(2.25, -0.6),
            c(-3.1, 1.3),
            c(4.6, 0.0),
        ] {
            for z in [0.5, 1.5, 2.0, 3.7, 5.0] {
                grid.push((n, nu, z));
            }
        }
    }
    grid
}

/// Compares `R_{n,nu}(iz)` from the recurrence with its Bessel-product form.
pub fn check_bessel_identity(grid: &[(usize, Complex64, f64)]) -> BesselReport {
    let points: Vec<BesselPoint> = grid
        .iter()
        .map(|&(n, nu, z)| {
            let rec = lommel_recur(n, nu, c(0.0, z)).and_then(|v| v.to_complex("lommel_recur"));
            let bes = lommel_via_bessel(n, nu, c(z, 0.0));
            match (rec, bes) {
                (Ok(r), Ok(b)) => BesselPoint {
                    n,
                    nu,
                    z,
                    recurrence: Some(r),
                    bessel: Some(b),
                    deviation: rel_dev(r, b),
                    error: None,
                },
                (r, b) => BesselPoint {
                    n,
                    nu,
                    z,
                    recurrence: r.as_ref().ok().copied(),
                    bessel: b.as_ref().ok().copied(),
                    deviation: f64::INFINITY,
                    error: r.err().or(b.err()).map(|e| e.to_string()),
                },
            }
        })
        .collect();
    let max_deviation = points.iter().map(|p| p.deviation).fold(0.0, f64::max);
    BesselReport {
        pass: max_deviation < BESSEL_IDENTITY_TOL,
        max_deviation,
        points,
    }
}

// ---------------------------------------------------------------------------
// Uniform large-order expansions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    I,
    K,
    /// `I_{nu+1}(nu z)`
    IShifted,
    /// `K_{nu+1}(nu z)`
    KShifted,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [Kernel::I, Kernel::K, Kernel::IShifted, Kernel::KShifted];

    fn shifted(self) -> bool {
        matches!(self, Kernel::IShifted | Kernel::KShifted)
    }

    fn expansion(self, nu: f64, z: f64) -> Result<Complex64> {
        match self {
            Kernel::I | Kernel::IShifted => olver_i(c(nu, 0.0), c(z, 0.0), self.shifted()),
            Kernel::K | Kernel::KShifted => olver_k(c(nu, 0.0), c(z, 0.0), self.shifted()),
        }
    }

    fn series(self, nu: f64, z: f64) -> Result<Complex64> {
        let order = c(nu + if self.shifted() { 1.0 } else { 0.0 }, 0.0);
        match self {
            Kernel::I | Kernel::IShifted => bessel_i(order, nu * z),
            Kernel::K | Kernel::KShifted => bessel_k(order, nu * z),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlverRow {
    pub kernel: Kernel,
    pub z: f64,
    pub nus: Vec<f64>,
    /// `|expansion / series - 1|` per order.
    pub errors: Vec<f64>,
    /// `errors[k+1] / errors[k]`.
    pub ratios: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlverReport {
    pub rows: Vec<OlverRow>,
    pub pass: bool,
}

/// Doubling ladder of orders. Non-integer, since the K series goes through
/// the reflection formula.
pub const OLVER_LADDER: [f64; 3] = [10.3, 20.6, 41.2];

/// Checks that the leading uniform expansion has relative error `O(1/nu)`:
/// successive errors along a doubling ladder `nus` must shrink by a factor
/// in [`OLVER_RATIO_RANGE`].
pub fn check_olver_decay(nus: &[f64], zs: &[f64]) -> Result<OlverReport> {
    let mut rows = Vec::new();
    for kernel in Kernel::ALL {
        for &z in zs {
            let errors = nus
                .iter()
                .map(|&nu| Ok((kernel.expansion(nu, z)? / kernel.series(nu, z)? - 1.0).norm()))
                .collect::<Result<Vec<f64>>>()?;
            let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
            let pass = ratios
                .iter()
                .all(|r| (OLVER_RATIO_RANGE.0..=OLVER_RATIO_RANGE.1).contains(r));
            rows.push(OlverRow {
                kernel,
                z,
                nus: nus.to_vec(),
                errors,
                ratios,
                pass,
            });
        }
    }
    Ok(OlverReport {
        pass: rows.iter().all(|r| r.pass),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Large-n expansions of q_n and Q_n
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `F < 0`: the `C_n` term and `f_+` dominate.
    Plus,
    /// `F > 0`: the `B_n` term and `f_-` dominate.
    Minus,
}

pub fn side(alpha: Alpha, z: Complex64) -> Result<Side> {
    let f = stokes_residual(alpha, z)?;
    if f.abs() <= SIDE_MARGIN {
        return Err(Error::Domain {
            op: "side",
            detail: format!("{z} is within {SIDE_MARGIN} of the Stokes line (F = {f:.3e})"),
        });
    }
    Ok(if f < 0.0 { Side::Plus } else { Side::Minus })
}

fn phase(n: usize, k: usize) -> Complex64 {
    c(0.0, 1.0).powu(((n + k) % 4) as u32)
}

fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Leading term of `B_n(z)`.
pub fn b_term(n: usize, alpha: Alpha, z: Complex64) -> Result<ScaledValue> {
    let nf = n as f64;
    let e = -nf * (chi(alpha, z)? - chi(alpha, -z)?);
    Ok(ScaledValue::from_log(e) * (amplitude_g(alpha, z, Sign::Minus)? * parity(n) / nf))
}

/// Leading term of `C_n(z)`.
pub fn c_term(n: usize, alpha: Alpha, z: Complex64) -> Result<ScaledValue> {
    let nf = n as f64;
    let e = -nf * (chi(alpha, z)? + chi(alpha, -z)? + c(0.0, PI / 2.0) * z);
    let amp = amplitude_g(alpha, z, Sign::Plus)? * parity(n) * phase(n, 1) / nf;
    Ok(ScaledValue::from_log(e) * amp)
}

/// Leading term of `Q_n(z)` on the given side of the Stokes line.
pub fn q_big_expansion(n: usize, alpha: Alpha, z: Complex64, side: Side) -> Result<ScaledValue> {
    let nf = n as f64;
    Ok(match side {
        Side::Plus => {
            let e = -nf * (chi(alpha, z)? + chi(alpha, -z)? + c(0.0, PI / 2.0) * z);
            ScaledValue::from_log(e) * (amplitude_f(alpha, z, Sign::Plus)? * parity(n))
        }
        Side::Minus => {
            let e = -nf * (chi(alpha, z)? - chi(alpha, -z)?);
            ScaledValue::from_log(e) * (amplitude_f(alpha, z, Sign::Minus)? * phase(n, 0))
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub n: usize,
    /// `q_n / (B_n + C_n)` with leading terms.
    pub q_small_ratio: Complex64,
    /// `Q_n / (side-appropriate expansion)`.
    pub q_big_ratio: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub alpha: Alpha,
    pub z: Complex64,
    pub side: Side,
    pub rows: Vec<AsymptoticRow>,
    pub pass: bool,
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Ratios of exact `q_n`, `Q_n` to their leading large-`n` terms; they must
/// approach 1 monotonically and end within [`Q_ASYMPTOTIC_TOL`].
pub fn check_q_asymptotics(ns: &[usize], alpha: Alpha, z: Complex64) -> Result<AsymptoticReport> {
    let side = side(alpha, z)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let lead = b_term(n, alpha, z)? + c_term(n, alpha, z)?;
            let exact_small = q_small(n, alpha, z)?;
            let exact_big = q_big(n, alpha, z);
            Ok(AsymptoticRow {
                n,
                q_small_ratio: exact_small.ratio(&lead),
                q_big_ratio: exact_big.ratio(&q_big_expansion(n, alpha, z, side)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let small: Vec<f64> = rows
        .iter()
        .map(|r| (r.q_small_ratio - 1.0).norm())
        .collect();
    let big: Vec<f64> = rows.iter().map(|r| (r.q_big_ratio - 1.0).norm()).collect();
    let pass = decreasing(&small)
        && decreasing(&big)
        && small.last().is_some_and(|&e| e < Q_ASYMPTOTIC_TOL)
        && big.last().is_some_and(|&e| e < Q_ASYMPTOTIC_TOL);
    Ok(AsymptoticReport {
        alpha,
        z,
        side,
        rows,
        pass,
    })
}

/// The three Bessel-product terms of `q_n(z)`, evaluated from the kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselSplit {
    pub n: usize,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    /// `|A + B + C - q_n| / |q_n|`.
    pub defect: f64,
    pub a_over_b: f64,
}

/// `q_n = A_n + B_n + C_n` with `A_n = I_{n(1+z)/2} K_{1+n(1-z)/2}`,
/// `B_n = (-1)^n K_{n(1+z)/2} I_{1+n(1-z)/2}`,
/// `C_n = (2/pi) sin(pi n (1+z)/2) K_{n(1+z)/2} K_{1+n(1-z)/2}`, all at `alpha n`.
pub fn bessel_split(n: usize, alpha: Alpha, z: Complex64) -> Result<BesselSplit> {
    let nf = n as f64;
    let x = alpha.get() * nf;
    let nu1 = nf * (1.0 + z) / 2.0;
    let nu2 = 1.0 + nf * (1.0 - z) / 2.0;
    let k1 = bessel_k(nu1, x)?;
    let k2 = bessel_k(nu2, x)?;
    let a = bessel_i(nu1, x)? * k2;
    let b = parity(n) * k1 * bessel_i(nu2, x)?;
    let cc = 2.0 / PI * (PI * nu1).sin() * k1 * k2;
    let q = q_small(n, alpha, z)?.to_complex("bessel_split")?;
    Ok(BesselSplit {
        n,
        a,
        b,
        c: cc,
        defect: rel_dev(a + b + cc, q),
        a_over_b: (a / b).norm(),
    })
}

// ---------------------------------------------------------------------------
// Finite-n roots against the limit law
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Axis,
    Arc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub region: Region,
    /// Range of `t` (axis) or `x` (arc).
    pub lo: f64,
    pub hi: f64,
    pub empirical: f64,
    pub theoretical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub alpha: Alpha,
    pub bins: usize,
    /// Roots within this distance of the relevant axis count as axis roots.
    pub axis_tolerance: f64,
    pub sup_discrepancy: f64,
    pub axis_fraction: f64,
    pub arc_fraction: f64,
    pub per_bin: Vec<Bin>,
    pub pass: bool,
}

fn project_to_arc(pts: &[Complex64], z: Complex64) -> f64 {
    let mut best = (f64::INFINITY, pts[0].re);
    for w in pts.windows(2) {
        let d = w[1] - w[0];
        let t = (((z - w[0]) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
        let p = w[0] + t * d;
        let dist = (z - p).norm();
        if dist < best.0 {
            best = (dist, p.re);
        }
    }
    best.1
}

fn bin_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins)
        .map(|k| lo + (hi - lo) * k as f64 / bins as f64)
        .collect()
}

fn bin_index(edges: &[f64], v: f64) -> usize {
    let bins = edges.len() - 1;
    edges
        .partition_point(|&e| e <= v)
        .saturating_sub(1)
        .min(bins - 1)
}

/// Bins the first-quadrant roots of `Q_n` against the masses of `mu2`
/// (axis roots, within `2/n` of the axis) and `mu1` (the rest, projected on
/// the arc and binned by `x`).
pub fn compare_empirical_limit(n: usize, alpha: Alpha, bins: usize) -> Result<ComparisonReport> {
    let rs = roots_cached(n, alpha)?;
    compare_roots(&rs, alpha, bins)
}

/// [`compare_empirical_limit`] on an existing root set.
pub fn compare_roots(rs: &RootSet, alpha: Alpha, bins: usize) -> Result<ComparisonReport> {
    const OP: &str = "compare_empirical_limit";
    let n = rs.n;
    if bins == 0 {
        return Err(Error::InvalidParameter {
            op: OP,
            detail: "need at least one bin".into(),
        });
    }
    let tol = 2.0 / n as f64;
    let regime = classify(alpha);
    let start = xi(alpha)?;
    let arc = trace_curve(alpha, 2000)?;
    let pts: Vec<Complex64> = arc.points().collect();
    let (axis_len, axis_coord, off_axis): (f64, fn(Complex64) -> f64, fn(Complex64) -> f64) =
        match regime {
            Regime::Supercritical => (start.im, |z| z.im, |z| z.re),
            _ => (start.re, |z| z.re, |z| z.im),
        };
    let quadrant: Vec<Complex64> = rs
        .roots
        .iter()
        .copied()
        .filter(|z| z.re >= -1e-12 && z.im >= -1e-12)
        .collect();
    let axis_edges = bin_edges(0.0, axis_len, bins);
    let arc_edges = bin_edges(start.re, 1.0, bins);
    let mut axis_counts = vec![0usize; bins];
    let mut arc_counts = vec![0usize; bins];
    let mut n_axis = 0;
    for &z in &quadrant {
        if off_axis(z).abs() <= tol && regime != Regime::Critical {
            axis_counts[bin_index(&axis_edges, axis_coord(z))] += 1;
            n_axis += 1;
        } else {
            arc_counts[bin_index(&arc_edges, project_to_arc(&pts, z))] += 1;
        }
    }
    let nf = n as f64;
    let mut per_bin = Vec::with_capacity(2 * bins);
    if regime != Regime::Critical {
        for k in 0..bins {
            per_bin.push(Bin {
                region: Region::Axis,
                lo: axis_edges[k],
                hi: axis_edges[k + 1],
                empirical: axis_counts[k] as f64 / nf,
                theoretical: mu2_mass_between(alpha, axis_edges[k], axis_edges[k + 1], 1e-10)?,
            });
        }
    }
    for k in 0..bins {
        per_bin.push(Bin {
            region: Region::Arc,
            lo: arc_edges[k],
            hi: arc_edges[k + 1],
            empirical: arc_counts[k] as f64 / nf,
            theoretical: mu1_mass_between(alpha, arc_edges[k], arc_edges[k + 1], 1e-10)?,
        });
    }
    let sup_discrepancy = per_bin
        .iter()
        .map(|b| (b.empirical - b.theoretical).abs())
        .fold(0.0, f64::max);
    Ok(ComparisonReport {
        n,
        alpha,
        bins,
        axis_tolerance: tol,
        sup_discrepancy,
        axis_fraction: n_axis as f64 / nf,
        arc_fraction: (quadrant.len() - n_axis) as f64 / nf,
        per_bin,
        pass: sup_discrepancy < BIN_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyRow {
    pub z: Complex64,
    pub limit: Complex64,
    pub ns: Vec<usize>,
    pub errors: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    pub alpha: Alpha,
    pub rows: Vec<CauchyRow>,
    pub pass: bool,
}

/// `|empirical_cauchy - limiting_cauchy|` along `ns`: must strictly decrease
/// and end below [`CAUCHY_TOL`].
pub fn check_cauchy_convergence(
    alpha: Alpha,
    zs: &[Complex64],
    ns: &[usize],
) -> Result<CauchyReport> {
    const OP: &str = "check_cauchy_convergence";
    for &z in zs {
        let d = support_distance(alpha, z)?;
        if d <= CAUCHY_MARGIN {
            return Err(Error::Domain {
                op: OP,
                detail: format!("{z} is within {d:.3} of the support; need > {CAUCHY_MARGIN}"),
            });
        }
    }
    let sets = ns
        .iter()
        .map(|&n| roots_cached(n, alpha))
        .collect::<Result<Vec<_>>>()?;
    let rows = zs
        .iter()
        .map(|&z| {
            let limit = crate::limitlaw::limiting_cauchy(alpha, z)?;
            let errors = sets
                .iter()
                .map(|rs| Ok((empirical_cauchy(rs, z)? - limit).norm()))
                .collect::<Result<Vec<f64>>>()?;
            let pass = decreasing(&errors) && errors.last().is_some_and(|&e| e < CAUCHY_TOL);
            Ok(CauchyRow {
                z,
                limit,
                ns: ns.to_vec(),
                errors,
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CauchyReport {
        alpha,
        pass: rows.iter().all(|r| r.pass),
        rows,
    })
}

/// `xi(alpha)` along a family: real parts must decrease through the
/// subcritical members and imaginary parts increase through the
/// supercritical ones.
pub fn xi_family_is_monotone(alphas: &[Alpha]) -> Result<bool> {
    let mut sub = Vec::new();
    let mut sup = Vec::new();
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| a.get().total_cmp(&b.get()));
    for a in sorted {
        let x = xi(a)?;
        match classify(a) {
            Regime::Subcritical => sub.push(x.re),
            Regime::Supercritical => sup.push(x.im),
            Regime::Critical => {}
        }
    }
    Ok(sub.windows(2).all(|w| w[1] < w[0]) && sup.windows(2).all(|w| w[1] > w[0]))
}
