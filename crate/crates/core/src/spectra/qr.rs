//! Complex single-shift QR iteration on an upper Hessenberg matrix.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

/// Stagnant iterations on one eigenvalue before an exceptional shift.
pub(crate) const EXCEPTIONAL_AFTER: usize = 30;

/// Eigenvalues of the `n x n` row-major upper Hessenberg matrix `h`.
///
/// Returns the eigenvalues (in deflation order from the bottom) and the
/// number of QR sweeps performed. Only the active diagonal block is updated,
/// since Schur vectors are not needed.
pub(crate) fn hessenberg_eigenvalues(
    mut h: Vec<Complex64>,
    n: usize,
    seed: u64,
) -> Result<(Vec<Complex64>, usize)> {
    assert_eq!(h.len(), n * n);
    let max_sweeps = 30 * n.max(10);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let at = |i: usize, j: usize| i * n + j;
    let mut sweeps = 0;
    let mut stagnant = 0;
    let mut hi = match n {
        0 => return Ok((eig, 0)),
        _ => n - 1,
    };
    loop {
        if hi == 0 {
            eig[0] = h[at(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[at(l, l - 1)].norm();
            let mut s = h[at(l, l)].norm() + h[at(l - 1, l - 1)].norm();
            if s == 0.0 {
                s = block_norm(&h, n, l - 1, hi);
            }
            if sub <= EPS * s {
                h[at(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[at(hi, hi)];
            hi -= 1;
            stagnant = 0;
            continue;
        }
        if l + 1 == hi {
            let (close, other) = eig2(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            );
            eig[hi] = close;
            eig[hi - 1] = other;
            if hi < 2 {
                break;
            }
            hi -= 2;
            stagnant = 0;
            continue;
        }
        sweeps += 1;
        stagnant += 1;
        if sweeps > max_sweeps {
            return Err(Error::Solver {
                op: "eigenvalues",
                detail: format!("QR iteration exceeded {max_sweeps} sweeps"),
                converged: eig[hi + 1..].to_vec(),
            });
        }
        let shift = if stagnant % EXCEPTIONAL_AFTER == 0 {
            let r = h[at(hi, hi - 1)].norm() * (0.75 + 0.5 * rng.gen::<f64>());
            let phase = std::f64::consts::TAU * rng.gen::<f64>();
            h[at(hi, hi)] + Complex64::from_polar(r, phase)
        } else {
            eig2(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            )
            .0
        };
        sweep(&mut h, n, l, hi, shift);
    }
    Ok((eig, sweeps))
}

fn block_norm(h: &[Complex64], n: usize, lo: usize, hi: usize) -> f64 {
    let mut s: f64 = 0.0;
    for i in lo..=hi {
        for j in i.saturating_sub(1).max(lo)..=hi {
            s = s.max(h[i * n + j].norm());
        }
    }
    s
}

/// Eigenvalues of `[[a, b], [c, d]]`: the one closest to `d` first.
pub(crate) fn eig2(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> (Complex64, Complex64) {
    let p = 0.5 * (a - d);
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let denom = if (p + disc).norm() >= (p - disc).norm() {
        p + disc
    } else {
        p - disc
    };
    let close = if denom.norm() == 0.0 {
        d
    } else {
        d - bc / denom
    };
    (close, a + d - close)
}

/// Rotation `[c s; -conj(s) c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

/// One explicitly shifted QR step `H - sI = QR`, `H <- RQ + sI` on rows and
/// columns `l..=hi`.
fn sweep(h: &mut [Complex64], n: usize, l: usize, hi: usize, shift: Complex64) {
    let at = |i: usize, j: usize| i * n + j;
    for k in l..=hi {
        h[at(k, k)] -= shift;
    }
    let mut rot = Vec::with_capacity(hi - l);
    for k in l..hi {
        let (c, s) = givens(h[at(k, k)], h[at(k + 1, k)]);
        for j in k..=hi {
            let x = h[at(k, j)];
            let y = h[at(k + 1, j)];
            h[at(k, j)] = c * x + s * y;
            h[at(k + 1, j)] = -s.conj() * x + c * y;
        }
        h[at(k + 1, k)] = Complex64::new(0.0, 0.0);
        rot.push((c, s));
    }
    for (k, &(c, s)) in (l..hi).zip(rot.iter()) {
        for i in l..=(k + 1).min(hi) {
            let x = h[at(i, k)];
            let y = h[at(i, k + 1)];
            h[at(i, k)] = c * x + s.conj() * y;
            h[at(i, k + 1)] = -s * x + c * y;
        }
    }
    for k in l..=hi {
        h[at(k, k)] += shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn companion_matrix_roots() {
        // roots 1, 2, 3, 4 (+i): companion of prod (z - r_k), as upper Hessenberg
        let roots = [c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0), c(-4.0, 0.5)];
        let mut coef = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); coef.len() + 1];
            for (i, a) in coef.iter().enumerate() {
                next[i] += *a;
                next[i + 1] -= *a * r;
            }
            coef = next;
        }
        let n = roots.len();
        let mut h = vec![c(0.0, 0.0); n * n];
        for j in 0..n {
            h[j] = -coef[j + 1];
        }
        for i in 1..n {
            h[i * n + i - 1] = c(1.0, 0.0);
        }
        let (eig, _) = hessenberg_eigenvalues(h, n, 1).unwrap();
        for (a, b) in sorted(eig).iter().zip(sorted(roots.to_vec())) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn toeplitz_tridiagonal() {
        let n = 30;
        let mut h = vec![c(0.0, 0.0); n * n];
        for i in 0..n - 1 {
            h[i * n + i + 1] = c(1.0, 0.0);
            h[(i + 1) * n + i] = c(1.0, 0.0);
        }
        let (eig, _) = hessenberg_eigenvalues(h, n, 1).unwrap();
        let expect: Vec<_> = (1..=n)
            .map(|k| {
                c(
                    2.0 * (std::f64::consts::PI * k as f64 / (n + 1) as f64).cos(),
                    0.0,
                )
            })
            .collect();
        for (a, b) in sorted(eig).iter().zip(sorted(expect)) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b) = eig2(c(-0.5, 0.0), c(0.0, 0.25), c(0.0, 0.25), c(0.5, 0.0));
        let r = 0.1875f64.sqrt();
        assert!((a - c(r, 0.0)).norm() < 1e-15);
        assert!((b + c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn triangular_and_trivial() {
        let (eig, sweeps) = hessenberg_eigenvalues(vec![c(3.0, -1.0)], 1, 0).unwrap();
        assert_eq!(eig, vec![c(3.0, -1.0)]);
        assert_eq!(sweeps, 0);
        let h = vec![c(1.0, 0.0), c(5.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let (eig, _) = hessenberg_eigenvalues(h, 2, 0).unwrap();
        assert_eq!(sorted(eig), vec![c(1.0, 0.0), c(2.0, 0.0)]);
    }
}
