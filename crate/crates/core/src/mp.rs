//! Arbitrary-precision evaluation of the three-term recurrences (MPFR).
//!
//! Forward recurrences for `Q_n` lose accuracy in parts of the plane where
//! the wanted solution is subdominant, and the eigenproblem of `J_n` is
//! exponentially ill-conditioned in `n`. Both are handled by repeating the
//! same recurrences with enough working bits.

use num_complex::Complex64;
use rug::float::Round;
use rug::{Assign, Complex, Float};

use crate::scaled::ScaledValue;
use crate::specfun::Alpha;

pub(crate) fn to_scaled(z: &Complex) -> ScaledValue {
    let er = z.real().get_exp();
    let ei = z.imag().get_exp();
    let e = match (er, ei) {
        (None, None) => return ScaledValue::ZERO,
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => a.max(b),
    };
    let mut re = z.real().clone();
    let mut im = z.imag().clone();
    re >>= e;
    im >>= e;
    ScaledValue::new(
        Complex64::new(
            re.to_f64_round(Round::Nearest),
            im.to_f64_round(Round::Nearest),
        ),
        i64::from(e),
    )
}

fn diag_real_parts(diag: &[Complex]) -> Vec<Float> {
    diag.iter().map(|d| d.real().clone()).collect()
}

pub(crate) fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

/// `det(z - T)` for a complex symmetric tridiagonal `T`, evaluated with
/// its derivative by `p_k = (z - d_k) p_{k-1} - e_{k-1}^2 p_{k-2}`.
pub(crate) struct MpCharPoly {
    prec: u32,
    diag: Vec<Complex>,
    off_sq: Vec<Complex>,
    /// Real diagonal and one real `e^2`, as for the Lommel matrix: cheaper
    /// real-by-complex products.
    real_form: Option<(Vec<Float>, Float)>,
}

impl MpCharPoly {
    /// The Lommel matrix, built from exact rationals rather than rounded
    /// doubles: `d_k = -1 + (2k-1)/n`, `e_k^2 = -alpha^2`.
    pub(crate) fn lommel(n: usize, alpha: Alpha, prec: u32) -> Self {
        let nf = Float::with_val(prec, n);
        let diag: Vec<Complex> = (1..=n)
            .map(|k| {
                let mut d = Float::with_val(prec, 2 * k as i64 - 1 - n as i64);
                d /= &nf;
                Complex::with_val(prec, (d, 0))
            })
            .collect();
        let a = Float::with_val(prec, alpha.get());
        let a2 = -Float::with_val(prec, &a * &a);
        let off_sq = vec![Complex::with_val(prec, (&a2, 0)); n.saturating_sub(1)];
        let real_diag = diag_real_parts(&diag);
        MpCharPoly {
            prec,
            diag,
            off_sq,
            real_form: Some((real_diag, a2)),
        }
    }

    pub(crate) fn from_entries(diag: &[Complex64], off: &[Complex64], prec: u32) -> Self {
        let diag = diag
            .iter()
            .map(|d| Complex::with_val(prec, (d.re, d.im)))
            .collect();
        let off_sq = off
            .iter()
            .map(|e| {
                let e = Complex::with_val(prec, (e.re, e.im));
                Complex::with_val(prec, e.square_ref())
            })
            .collect();
        MpCharPoly {
            prec,
            diag,
            off_sq,
            real_form: None,
        }
    }

    pub(crate) fn prec(&self) -> u32 {
        self.prec
    }

    /// `(p(z), p'(z))` at full working precision.
    pub(crate) fn eval(&self, z: &Complex) -> (Complex, Complex) {
        if let Some((d, e2)) = &self.real_form {
            return self.eval_real_form(z, d, e2);
        }
        let prec = self.prec;
        let mut pm = Complex::with_val(prec, 0);
        let mut p = Complex::with_val(prec, 1);
        let mut dpm = Complex::with_val(prec, 0);
        let mut dp = Complex::with_val(prec, 0);
        let mut t = Complex::new(prec);
        let mut next = Complex::new(prec);
        let mut dnext = Complex::new(prec);
        for (k, d) in self.diag.iter().enumerate() {
            t.assign(z - d);
            // dnext = p + t dp - e^2 dpm ; next = t p - e^2 pm
            dnext.assign(&t * &dp);
            dnext += &p;
            next.assign(&t * &p);
            if k >= 1 {
                let e2 = &self.off_sq[k - 1];
                t.assign(e2 * &dpm);
                dnext -= &t;
                t.assign(e2 * &pm);
                next -= &t;
            }
            std::mem::swap(&mut pm, &mut p);
            std::mem::swap(&mut p, &mut next);
            std::mem::swap(&mut dpm, &mut dp);
            std::mem::swap(&mut dp, &mut dnext);
        }
        (p, dp)
    }

    fn eval_real_form(&self, z: &Complex, diag: &[Float], e2: &Float) -> (Complex, Complex) {
        let prec = self.prec;
        let mut pm = Complex::with_val(prec, 0);
        let mut p = Complex::with_val(prec, 1);
        let mut dpm = Complex::with_val(prec, 0);
        let mut dp = Complex::with_val(prec, 0);
        let mut t = Complex::with_val(prec, z);
        let mut u = Complex::new(prec);
        let mut next = Complex::new(prec);
        let mut dnext = Complex::new(prec);
        for (k, d) in diag.iter().enumerate() {
            t.mut_real().assign(z.real() - d);
            dnext.assign(&t * &dp);
            dnext += &p;
            next.assign(&t * &p);
            if k >= 1 {
                u.assign(&dpm * e2);
                dnext -= &u;
                u.assign(&pm * e2);
                next -= &u;
            }
            std::mem::swap(&mut pm, &mut p);
            std::mem::swap(&mut p, &mut next);
            std::mem::swap(&mut dpm, &mut dp);
            std::mem::swap(&mut dp, &mut dnext);
        }
        (p, dp)
    }

    /// `log2` of the eigenvalue condition number `|x|^2 / |x^T x|` at an
    /// eigenvalue `z`, with the eigenvector `x_k = p_{k-1}(z) / (e_1 ... e_{k-1})`.
    /// Returns 0 when the matrix is reducible (some `e_k = 0`).
    pub(crate) fn log2_condition(&self, z: Complex64) -> f64 {
        let prec = self.prec;
        if self.off_sq.iter().any(|e| e.is_zero()) {
            return 0.0;
        }
        let zz = Complex::with_val(prec, (z.re, z.im));
        let mut pm = Complex::with_val(prec, 0);
        let mut p = Complex::with_val(prec, 1);
        let mut h = Complex::with_val(prec, 1);
        let mut norm2 = Float::with_val(prec, 1);
        let mut dot = Complex::with_val(prec, 1);
        let mut t = Complex::new(prec);
        let mut next = Complex::new(prec);
        let n = self.diag.len();
        for k in 0..n - 1 {
            t.assign(&zz - &self.diag[k]);
            next.assign(&t * &p);
            if k >= 1 {
                t.assign(&self.off_sq[k - 1] * &pm);
                next -= &t;
            }
            std::mem::swap(&mut pm, &mut p);
            std::mem::swap(&mut p, &mut next);
            h *= &self.off_sq[k];
            // |p_k|^2 / |h_k| and p_k^2 / h_k
            let abs_h = Float::with_val(prec, h.abs_ref());
            let mut a = Float::with_val(prec, p.norm_ref());
            a /= &abs_h;
            norm2 += &a;
            t.assign(p.square_ref());
            t /= &h;
            dot += &t;
        }
        let d = Float::with_val(prec, dot.abs_ref());
        if d.is_zero() {
            return f64::INFINITY;
        }
        norm2 /= &d;
        norm2.log2().to_f64()
    }

    /// Newton correction `p(z)/p'(z)` rounded to double precision.
    pub(crate) fn newton_step(&self, z: Complex64) -> Complex64 {
        let zz = Complex::with_val(self.prec, (z.re, z.im));
        let (p, dp) = self.eval(&zz);
        if dp.is_zero() {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        let q = Complex::with_val(self.prec, &p / &dp);
        to_c64(&q)
    }
}

/// `(Q_n(z), Q_n'(z))` with `Q_n(z) = R_{n,(1-n-nz)/2}(i alpha n)`, by the
/// Lommel recurrence and its derivative with `prec` working bits.
pub(crate) fn q_big_at(
    n: usize,
    alpha: Alpha,
    z: Complex64,
    prec: u32,
) -> (ScaledValue, ScaledValue) {
    // c_k = 2(nu + k)/(i alpha n) = w (nu + k), w = -2i / (alpha n), dc_k/dz = -w n / 2
    let nf = Float::with_val(prec, n);
    let an = Float::with_val(prec, alpha.get() * &nf);
    let zz = Complex::with_val(prec, (z.re, z.im));
    let mut nu = Complex::with_val(prec, &zz * &nf);
    nu = -nu;
    nu += 1 - n as i64;
    nu /= 2;
    let mut w = Complex::with_val(prec, (0, -2));
    w /= &an;
    let mut dc = Complex::with_val(prec, &w * &nf);
    dc /= -2;
    let mut pm = Complex::with_val(prec, 0);
    let mut p = Complex::with_val(prec, 1);
    let mut dpm = Complex::with_val(prec, 0);
    let mut dp = Complex::with_val(prec, 0);
    let mut ck = Complex::new(prec);
    let mut t = Complex::new(prec);
    let mut next = Complex::new(prec);
    let mut dnext = Complex::new(prec);
    for k in 0..n {
        ck.assign(&nu + k as i64);
        ck *= &w;
        dnext.assign(&ck * &dp);
        t.assign(&dc * &p);
        dnext += &t;
        dnext -= &dpm;
        next.assign(&ck * &p);
        next -= &pm;
        std::mem::swap(&mut pm, &mut p);
        std::mem::swap(&mut p, &mut next);
        std::mem::swap(&mut dpm, &mut dp);
        std::mem::swap(&mut dp, &mut dnext);
    }
    (to_scaled(&p), to_scaled(&dp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lommel::q_big;

    #[test]
    fn agrees_with_double_recurrence_where_stable() {
        let alpha = Alpha::new(1.0).unwrap();
        let z = Complex64::new(2.0, 2.0);
        let (a, _) = q_big_at(40, alpha, z, 200);
        let b = q_big(40, alpha, z);
        assert!((a.ratio(&b) - 1.0).norm() < 1e-13);
    }

    #[test]
    fn char_poly_matches_lommel_identity() {
        // det(z - J) = (-i alpha)^n Q_n(z)
        let n = 12;
        let alpha = Alpha::new(0.5).unwrap();
        let z = Complex64::new(0.3, 0.2);
        let cp = MpCharPoly::lommel(n, alpha, 128);
        let (p, _) = cp.eval(&Complex::with_val(128, (z.re, z.im)));
        let q = q_big_at(n, alpha, z, 128).0 * Complex64::new(0.0, -0.5).powu(n as u32);
        assert!((to_scaled(&p).ratio(&q) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn newton_step_on_two_by_two() {
        let cp = MpCharPoly::from_entries(
            &[Complex64::new(-0.5, 0.0), Complex64::new(0.5, 0.0)],
            &[Complex64::new(0.0, 0.25)],
            100,
        );
        let root = 0.1875f64.sqrt();
        let s = cp.newton_step(Complex64::new(root, 0.0));
        assert!(s.norm() < 1e-16);
        let x = Complex::with_val(100, (1.5, 0.0));
        let (p, dp) = cp.eval(&x);
        assert!((to_c64(&p) - Complex64::new(1.5 * 1.5 - 0.1875, 0.0)).norm() < 1e-15);
        assert!((to_c64(&dp) - Complex64::new(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn condition_of_normal_and_nonnormal_matrices() {
        // real symmetric: condition 1
        let cp = MpCharPoly::from_entries(
            &[Complex64::new(0.0, 0.0); 3],
            &[Complex64::new(1.0, 0.0); 2],
            100,
        );
        let l = cp.log2_condition(Complex64::new(2f64.sqrt(), 0.0));
        assert!(l.abs() < 1e-12, "{l}");
        // 2x2 [[-1/2, ia], [ia, 1/2]]: x = (1, (lambda + 1/2)/(ia))
        let a = 0.25;
        let cp = MpCharPoly::from_entries(
            &[Complex64::new(-0.5, 0.0), Complex64::new(0.5, 0.0)],
            &[Complex64::new(0.0, a)],
            100,
        );
        let lam = (0.25f64 - a * a).sqrt();
        let x2 = Complex64::new(lam + 0.5, 0.0) / Complex64::new(0.0, a);
        let expect = (1.0 + x2.norm_sqr()) / (1.0 + x2 * x2).norm();
        let got = cp.log2_condition(Complex64::new(lam, 0.0));
        assert!((got - expect.log2()).abs() < 1e-12);
    }
}
