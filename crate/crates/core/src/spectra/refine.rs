//! Simultaneous refinement of all eigenvalues (Aberth-Ehrlich iteration)
//! with Newton corrections evaluated in multiprecision.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mp::MpCharPoly;

const MAX_ITERATIONS: usize = 200;
const MAX_RAISES: usize = 6;
/// Bits carried beyond `log2` of the worst eigenvalue condition number.
pub(crate) const GUARD_BITS: u32 = 64;

pub(crate) struct Refined {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub log2_condition: Vec<f64>,
    pub iterations: usize,
    pub precision_bits: u32,
}

/// Relative to `|z|`, with an absolute floor at the evaluation noise of
/// the working precision so that a root at the origin can converge.
fn converged(w: Complex64, z: Complex64, floor: f64) -> bool {
    w.norm() <= (4.0 * f64::EPSILON * z.norm()).max(floor)
}

/// Aberth iteration at a fixed precision. Returns the number of sweeps, or
/// an error listing the roots that did converge.
fn aberth(roots: &mut [Complex64], poly: &MpCharPoly) -> Result<usize> {
    let n = roots.len();
    let mut active: Vec<bool> = vec![true; n];
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let floor = scale
        * 2f64
            .powi(8 - poly.prec() as i32)
            .max(4.0 * f64::EPSILON * 1e-8);
    for sweep in 1..=MAX_ITERATIONS {
        // Gauss-Seidel order: each correction sees the latest positions
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let newton = poly.newton_step(roots[i]);
            let w = if newton.norm() == 0.0 {
                newton
            } else if !newton.is_finite() {
                // stationary point of p: nudge off it
                Complex64::new(1e-8, 1e-8) * (1.0 + roots[i].norm())
            } else {
                let zi = roots[i];
                let repulsion: Complex64 = roots
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &zj)| 1.0 / (zi - zj))
                    .sum();
                newton / (1.0 - newton * repulsion)
            };
            roots[i] -= w;
            if converged(w, roots[i], floor) {
                active[i] = false;
            }
        }
        if !active.iter().any(|&a| a) {
            return Ok(sweep);
        }
    }
    Err(Error::Solver {
        op: "eigenvalues",
        detail: format!(
            "eigenvalue refinement did not converge in {MAX_ITERATIONS} sweeps at {} bits",
            poly.prec()
        ),
        converged: roots
            .iter()
            .zip(&active)
            .filter(|(_, a)| !**a)
            .map(|(z, _)| *z)
            .collect(),
    })
}

/// Refines `seeds` to the eigenvalues of the matrix behind `build`, raising
/// the working precision until it exceeds the worst condition number by
/// [`GUARD_BITS`].
pub(crate) fn refine<F>(seeds: &[Complex64], initial_bits: u32, build: F) -> Result<Refined>
where
    F: Fn(u32) -> MpCharPoly,
{
    let mut roots = separate(seeds);
    let mut bits = initial_bits.max(64);
    let mut iterations = 0;
    for _ in 0..MAX_RAISES {
        let poly = build(bits);
        iterations += aberth(&mut roots, &poly)?;
        let log2_condition: Vec<f64> = roots.iter().map(|z| poly.log2_condition(*z)).collect();
        let worst = log2_condition.iter().cloned().fold(0.0, f64::max);
        let needed = worst.ceil() + GUARD_BITS as f64;
        if needed.is_finite() && needed <= bits as f64 {
            let residuals = roots.iter().map(|z| poly.newton_step(*z).norm()).collect();
            return Ok(Refined {
                roots,
                residuals,
                log2_condition,
                iterations,
                precision_bits: bits,
            });
        }
        bits = if needed.is_finite() {
            (needed as u32 + 32).max(bits + 64)
        } else {
            bits * 2
        };
    }
    Err(Error::Precision {
        op: "eigenvalues",
        detail: format!("condition numbers kept exceeding the working precision ({bits} bits)"),
    })
}

/// Exactly coincident seeds stall the Aberth correction; spread them.
fn separate(seeds: &[Complex64]) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = seeds.to_vec();
    for i in 0..out.len() {
        while out[..i].contains(&out[i]) {
            let r = 1e-10 * (1.0 + out[i].norm());
            out[i] += Complex64::from_polar(r, std::f64::consts::TAU * rng.gen::<f64>());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::Alpha;

    #[test]
    fn recovers_roots_from_poor_seeds() {
        let alpha = Alpha::new(0.5).unwrap();
        let n = 12;
        let seeds: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(0.8, 0.3 + k as f64 * std::f64::consts::TAU / n as f64))
            .collect();
        let r = refine(&seeds, 128, |b| MpCharPoly::lommel(n, alpha, b)).unwrap();
        for z in &r.roots {
            let q = crate::lommel::q_big_with_derivative(n, alpha, *z);
            assert!(q.0.ratio(&q.1).norm() < 1e-14);
        }
        assert!(r.residuals.iter().all(|&x| x < 1e-14));
    }

    #[test]
    fn coincident_seeds_are_separated() {
        let s = separate(&[Complex64::new(1.0, 0.0); 3]);
        assert!(s[0] != s[1] && s[1] != s[2] && s[0] != s[2]);
    }
}
