//! Jacobi matrices, their spectra, and root-counting measures.
//!
//! Eigenvalues come from a dense complex Hessenberg QR iteration and are
//! then refined against the characteristic polynomial in multiprecision.
//! The refinement is not optional: the Lommel matrices are complex
//! symmetric and strongly non-normal, with eigenvalue condition numbers
//! growing roughly like `10^(0.28 n)` near the threshold parameter, so the
//! double-precision QR output alone is meaningless beyond `n ~ 60`.

mod qr;
mod refine;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::MpCharPoly;
use crate::specfun::{c, Alpha};

/// Distance below which two roots are reported as a cluster.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Largest accepted `|p/p'|` at a reported root.
pub const CERTIFICATE_TOL: f64 = 1e-12;
/// Largest accepted pairing defect before symmetrization.
pub const PAIRING_TOL: f64 = 1e-6;
/// Slack allowed beyond the localization bounds.
pub const LOCALIZATION_TOL: f64 = 1e-10;
/// Minimum distance from an atom for [`empirical_cauchy`].
pub const ATOM_TOL: f64 = 1e-8;

const QR_SEED: u64 = 0x1cb7_5a1d;

/// Complex symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    diagonal: Vec<Complex64>,
    offdiagonal: Vec<Complex64>,
}

impl TridiagonalMatrix {
    pub fn new(diagonal: Vec<Complex64>, offdiagonal: Vec<Complex64>) -> Result<Self> {
        if diagonal.is_empty() || offdiagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidParameter {
                op: "TridiagonalMatrix::new",
                detail: format!(
                    "need n >= 1 diagonal and n - 1 off-diagonal entries, got {} and {}",
                    diagonal.len(),
                    offdiagonal.len()
                ),
            });
        }
        if diagonal.iter().chain(&offdiagonal).any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter {
                op: "TridiagonalMatrix::new",
                detail: "entries must be finite".into(),
            });
        }
        Ok(TridiagonalMatrix {
            diagonal,
            offdiagonal,
        })
    }

    pub fn order(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn offdiagonal(&self) -> &[Complex64] {
        &self.offdiagonal
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal.iter().sum()
    }

    /// `(T + T^*)/2`, entrywise real part since `T` is symmetric.
    pub fn real_part(&self) -> TridiagonalMatrix {
        self.map(|z| c(z.re, 0.0))
    }

    /// `(T - T^*)/(2i)`, entrywise imaginary part since `T` is symmetric.
    pub fn imaginary_part(&self) -> TridiagonalMatrix {
        self.map(|z| c(z.im, 0.0))
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> TridiagonalMatrix {
        TridiagonalMatrix {
            diagonal: self.diagonal.iter().map(|&z| f(z)).collect(),
            offdiagonal: self.offdiagonal.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.order();
        let mut m = vec![c(0.0, 0.0); n * n];
        for (k, &d) in self.diagonal.iter().enumerate() {
            m[k * n + k] = d;
        }
        for (k, &e) in self.offdiagonal.iter().enumerate() {
            m[k * n + k + 1] = e;
            m[(k + 1) * n + k] = e;
        }
        m
    }
}

fn check_order(op: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            op,
            detail: "order must be at least 1".into(),
        });
    }
    Ok(())
}

/// `J_n`: diagonal `-1 + (2k-1)/n`, off-diagonal `i alpha`, so that
/// `det(J_n - z) = (i alpha)^n Q_n(z)`.
pub fn build_lommel_jacobi(n: usize, alpha: Alpha) -> Result<TridiagonalMatrix> {
    check_order("build_lommel_jacobi", n)?;
    let nf = n as f64;
    let diagonal = (1..=n)
        .map(|k| c((2 * k) as f64 - 1.0 - nf, 0.0) / nf)
        .collect();
    TridiagonalMatrix::new(diagonal, vec![c(0.0, alpha.get()); n - 1])
}

/// `J_n(a, b)`: diagonal `b(k/n)`, `k = 1..n`, off-diagonal `a(k/n)`, `k = 1..n-1`.
pub fn build_sampled_jacobi<A, B>(n: usize, a: A, b: B) -> Result<TridiagonalMatrix>
where
    A: Fn(f64) -> Complex64,
    B: Fn(f64) -> Complex64,
{
    check_order("build_sampled_jacobi", n)?;
    let nf = n as f64;
    let diagonal = (1..=n).map(|k| b(k as f64 / nf)).collect();
    let offdiagonal = (1..n).map(|k| a(k as f64 / nf)).collect();
    TridiagonalMatrix::new(diagonal, offdiagonal)
}

/// Roots closer than [`CLUSTER_TOL`] to each other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub indices: Vec<usize>,
    pub center: Complex64,
    /// Summed weight `len / n`.
    pub weight: f64,
}

/// Where the starting points of the refinement came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedSource {
    /// Double-precision Hessenberg QR, with its sweep count.
    Qr { sweeps: usize },
    /// Quantiles of the limiting zero distribution.
    LimitLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub seeds: SeedSource,
    pub refine_sweeps: usize,
    pub precision_bits: u32,
    /// `log10` of the largest eigenvalue condition number.
    pub max_log10_condition: f64,
    pub max_residual: f64,
    /// Largest distance between a root and the image of its symmetry
    /// partner, measured before symmetrization (Lommel case only).
    pub pairing_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub n: usize,
    pub alpha: Option<Alpha>,
    pub roots: Vec<Complex64>,
    /// `|p(z)/p'(z)|` at each root, evaluated with the working precision.
    pub residuals: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub diagnostics: SolveDiagnostics,
}

impl RootSet {
    pub fn certified(&self, tol: f64) -> bool {
        self.residuals.iter().all(|&r| r <= tol)
    }
}

/// Initial working precision for an order-`n` problem.
fn initial_bits(n: usize) -> u32 {
    64 + (0.95 * n as f64).ceil() as u32
}

fn solve(t: &TridiagonalMatrix, poly: impl Fn(u32) -> MpCharPoly) -> Result<RootSet> {
    let n = t.order();
    let (seeds, qr_sweeps) = qr::hessenberg_eigenvalues(t.to_dense(), n, QR_SEED)?;
    solve_from(t, &seeds, SeedSource::Qr { sweeps: qr_sweeps }, poly)
}

fn solve_from(
    t: &TridiagonalMatrix,
    seeds: &[Complex64],
    source: SeedSource,
    poly: impl Fn(u32) -> MpCharPoly,
) -> Result<RootSet> {
    let n = t.order();
    let refined = refine::refine(seeds, initial_bits(n), poly)?;
    let max_residual = refined.residuals.iter().cloned().fold(0.0, f64::max);
    if !(max_residual <= CERTIFICATE_TOL) {
        return Err(Error::Solver {
            op: "eigenvalues",
            detail: format!("residual certificate {max_residual:.3e} exceeds {CERTIFICATE_TOL:e}"),
            converged: refined.roots,
        });
    }
    power_sum_check(t, &refined.roots)?;
    let max_log2 = refined.log2_condition.iter().cloned().fold(0.0, f64::max);
    let clusters = find_clusters(&refined.roots);
    Ok(RootSet {
        n,
        alpha: None,
        roots: refined.roots,
        residuals: refined.residuals,
        clusters,
        diagnostics: SolveDiagnostics {
            seeds: source,
            refine_sweeps: refined.iterations,
            precision_bits: refined.precision_bits,
            max_log10_condition: max_log2 * std::f64::consts::LOG10_2,
            max_residual,
            pairing_defect: None,
        },
    })
}

/// Guards against two seeds converging to the same eigenvalue: the first
/// two power sums of the spectrum must match `tr T` and `tr T^2`.
fn power_sum_check(t: &TridiagonalMatrix, roots: &[Complex64]) -> Result<()> {
    let s1: Complex64 = roots.iter().sum();
    let s2: Complex64 = roots.iter().map(|z| z * z).sum();
    let tr2: Complex64 = t.diagonal.iter().map(|d| d * d).sum::<Complex64>()
        + 2.0 * t.offdiagonal.iter().map(|e| e * e).sum::<Complex64>();
    let scale = roots.iter().map(|z| 1.0 + z.norm_sqr()).sum::<f64>();
    let defect = (s1 - t.trace()).norm().max((s2 - tr2).norm());
    if defect > 1e-9 * scale {
        return Err(Error::Solver {
            op: "eigenvalues",
            detail: format!("power sums of the computed spectrum are off by {defect:.3e}"),
            converged: roots.to_vec(),
        });
    }
    Ok(())
}

/// All eigenvalues of `t` with residual certificates.
pub fn eigenvalues(t: &TridiagonalMatrix) -> Result<RootSet> {
    solve(t, |bits| {
        MpCharPoly::from_entries(t.diagonal(), t.offdiagonal(), bits)
    })
}

/// The `n` roots of `Q_n`, symmetrized under `z -> -z` and `z -> conj z`.
pub fn roots_q(n: usize, alpha: Alpha) -> Result<RootSet> {
    let t = build_lommel_jacobi(n, alpha)?;
    let poly = |bits| MpCharPoly::lommel(n, alpha, bits);
    // Limit-law quantiles are far better starting points than QR output
    // for large n; the certificates make the result independent of them.
    let from_limit = crate::limitlaw::quantile_points(alpha, n)
        .and_then(|seeds| solve_from(&t, &seeds, SeedSource::LimitLaw, poly));
    let mut rs = match from_limit {
        Ok(rs) => rs,
        Err(_) => solve(&t, poly)?,
    };
    rs.alpha = Some(alpha);
    let defect = symmetrize(&mut rs.roots)?;
    let bits = rs.diagnostics.precision_bits;
    let poly = MpCharPoly::lommel(n, alpha, bits);
    rs.residuals = rs
        .roots
        .iter()
        .map(|z| poly.newton_step(*z).norm())
        .collect();
    rs.diagnostics.max_residual = rs.residuals.iter().cloned().fold(0.0, f64::max);
    rs.diagnostics.pairing_defect = Some(defect);
    rs.clusters = find_clusters(&rs.roots);
    Ok(rs)
}

/// Solves several `(n, alpha)` instances in parallel.
pub fn roots_q_batch(jobs: &[(usize, Alpha)]) -> Vec<Result<RootSet>> {
    jobs.par_iter().map(|&(n, a)| roots_q(n, a)).collect()
}

const SYMMETRIES: [fn(Complex64) -> Complex64; 4] = [|z| z, |z| -z, |z| z.conj(), |z| -z.conj()];

/// Groups the roots into orbits of the four-element symmetry group and
/// replaces each orbit by the exact orbit of its average. Returns the
/// largest pairing defect seen before averaging.
fn symmetrize(roots: &mut [Complex64]) -> Result<f64> {
    const OP: &str = "roots_Q";
    let n = roots.len();
    let mut assigned = vec![false; n];
    let mut defect: f64 = 0.0;
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let z = roots[i];
        let mut members = [i; 4];
        for (g, sym) in SYMMETRIES.iter().enumerate().skip(1) {
            let image = sym(z);
            let mut best = None;
            let mut best_d = f64::INFINITY;
            for j in 0..n {
                if assigned[j] && j != i {
                    continue;
                }
                let d = (roots[j] - image).norm();
                if d < best_d {
                    best_d = d;
                    best = Some(j);
                }
            }
            members[g] = best.expect("at least the root itself is available");
            defect = defect.max(best_d);
        }
        let mut distinct = members.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let consistent = match distinct.len() {
            1 => true,
            // the stabilizer must be a subgroup: {id, g} with the other pair matching
            2 => {
                members[0] != members[1] && members[2] != members[3]
                    || members[0] != members[2] && members[1] != members[3]
                    || members[0] != members[3] && members[1] != members[2]
            }
            4 => true,
            _ => false,
        };
        if !consistent || defect > PAIRING_TOL {
            return Err(Error::Consistency {
                op: OP,
                detail: format!(
                    "root {z} has no consistent symmetry partners (defect {defect:.3e}); \
                     the eigenvalue solver has likely broken down"
                ),
            });
        }
        // average of the pulled-back images: g^{-1} = g for this group
        let w = members
            .iter()
            .zip(SYMMETRIES.iter())
            .map(|(&j, sym)| sym(roots[j]))
            .sum::<Complex64>()
            / 4.0;
        for (&j, sym) in members.iter().zip(SYMMETRIES.iter()) {
            roots[j] = sym(w);
            assigned[j] = true;
        }
    }
    Ok(defect)
}

fn find_clusters(roots: &[Complex64]) -> Vec<Cluster> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut i = i;
        while p[i] != r {
            let next = p[i];
            p[i] = r;
            i = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < CLUSTER_TOL {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups
        .into_values()
        .filter(|g| g.len() > 1)
        .map(|indices| {
            let center =
                indices.iter().map(|&i| roots[i]).sum::<Complex64>() / indices.len() as f64;
            let weight = indices.len() as f64 / n as f64;
            Cluster {
                indices,
                center,
                weight,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub n: usize,
    pub alpha: Alpha,
    /// `1 - 1/n`
    pub re_bound: f64,
    /// `2 alpha cos(pi/(n+1))`
    pub im_bound: f64,
    /// Per root: `(re_bound - |Re z|, im_bound - |Im z|)`.
    pub margins: Vec<(f64, f64)>,
    pub min_margin: f64,
    pub pass: bool,
}

/// Checks every root against the rectangle `|Re z| <= 1 - 1/n`,
/// `|Im z| <= 2 alpha cos(pi/(n+1))`.
pub fn localization_check(rs: &RootSet) -> Result<LocalizationReport> {
    let alpha = rs.alpha.ok_or_else(|| Error::InvalidParameter {
        op: "localization_check",
        detail: "root set does not come from the Lommel family".into(),
    })?;
    let n = rs.n;
    let re_bound = 1.0 - 1.0 / n as f64;
    let im_bound = 2.0 * alpha.get() * (std::f64::consts::PI / (n + 1) as f64).cos();
    let margins: Vec<(f64, f64)> = rs
        .roots
        .iter()
        .map(|z| (re_bound - z.re.abs(), im_bound - z.im.abs()))
        .collect();
    let min_margin = margins
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .fold(f64::INFINITY, f64::min);
    Ok(LocalizationReport {
        n,
        alpha,
        re_bound,
        im_bound,
        margins,
        min_margin,
        pass: min_margin >= -LOCALIZATION_TOL,
    })
}

/// Uniform probability measure on a set of roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<Complex64>,
}

impl EmpiricalMeasure {
    pub fn weight(&self) -> f64 {
        1.0 / self.atoms.len() as f64
    }

    /// Mass of the atoms selected by `pred`, as `count / n`.
    pub fn mass_where(&self, pred: impl Fn(Complex64) -> bool) -> f64 {
        let count = self.atoms.iter().filter(|&&z| pred(z)).count();
        count as f64 / self.atoms.len() as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_where(|_| true)
    }
}

pub fn empirical_measure(rs: &RootSet) -> EmpiricalMeasure {
    EmpiricalMeasure {
        atoms: rs.roots.clone(),
    }
}

/// `(1/n) sum_k 1/(z - z_k)`.
pub fn empirical_cauchy(rs: &RootSet, z: Complex64) -> Result<Complex64> {
    let mut nearest = rs.roots[0];
    let mut sum = c(0.0, 0.0);
    for &r in &rs.roots {
        if (z - r).norm() < (z - nearest).norm() {
            nearest = r;
        }
        sum += 1.0 / (z - r);
    }
    if (z - nearest).norm() <= ATOM_TOL {
        return Err(Error::Pole {
            op: "empirical_cauchy",
            z,
            nearest,
        });
    }
    Ok(sum / rs.roots.len() as f64)
}
