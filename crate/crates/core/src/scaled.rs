//! Overflow-safe complex numbers.
//!
//! A [`ScaledValue`] stores `mantissa * 2^exponent` with `0.5 <= |mantissa| <= 2`
//! (or an exact zero). Scaling by powers of two is exact, so renormalizing
//! never perturbs the represented value.

use std::f64::consts::LN_2;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
pub struct ScaledValue {
    mantissa: Complex64,
    exponent: i64,
}

/// Multiply by `2^k` exactly (barring underflow to subnormals).
fn ldexp(z: Complex64, k: i64) -> Complex64 {
    let mut z = z;
    let mut k = k;
    while k > 1000 {
        z *= 2f64.powi(1000);
        k -= 1000;
    }
    while k < -1000 {
        z *= 2f64.powi(-1000);
        k += 1000;
    }
    z * 2f64.powi(k as i32)
}

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue {
        mantissa: Complex64::new(0.0, 0.0),
        exponent: 0,
    };
    pub const ONE: ScaledValue = ScaledValue {
        mantissa: Complex64::new(1.0, 0.0),
        exponent: 0,
    };

    /// Builds `mantissa * 2^exponent` and renormalizes.
    pub fn new(mantissa: Complex64, exponent: i64) -> Self {
        ScaledValue { mantissa, exponent }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    /// `exp(l)` without forming it in double precision.
    pub fn from_log(l: Complex64) -> Self {
        let k = (l.re / LN_2).round();
        let rest = Complex64::new(l.re - k * LN_2, l.im);
        Self::new(rest.exp(), k as i64)
    }

    fn normalized(self) -> Self {
        let m = self.mantissa;
        if m.re == 0.0 && m.im == 0.0 {
            return Self::ZERO;
        }
        let mag = m.re.abs().max(m.im.abs());
        if !mag.is_finite() {
            return self;
        }
        let norm = m.norm();
        if (0.5..=2.0).contains(&norm) {
            return self;
        }
        // norm may overflow even though both parts are finite
        let log2 = if norm.is_finite() && norm > 0.0 {
            norm.log2()
        } else {
            mag.log2() + 0.5
        };
        let k = log2.round() as i64;
        ScaledValue {
            mantissa: ldexp(m, -k),
            exponent: self.exponent + k,
        }
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Natural-log scale: the value is `mantissa * exp(log_scale)`.
    pub fn log_scale(&self) -> f64 {
        self.exponent as f64 * LN_2
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.is_finite()
    }

    /// `log |value|`, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().ln() + self.log_scale()
        }
    }

    /// Principal-argument complex logarithm of the value.
    pub fn ln(&self) -> Complex64 {
        self.mantissa.ln() + self.log_scale()
    }

    pub fn conj(&self) -> Self {
        ScaledValue {
            mantissa: self.mantissa.conj(),
            exponent: self.exponent,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ScaledValue::new(self.mantissa * factor, self.exponent)
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::ONE;
        let mut base = *self;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Converts to a plain complex number, or `None` if it is not representable.
    pub fn try_to_complex(&self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(self.mantissa);
        }
        if self.exponent > 1023 {
            return None;
        }
        let v = ldexp(self.mantissa, self.exponent);
        v.is_finite().then_some(v)
    }

    pub fn to_complex(&self, op: &'static str) -> Result<Complex64> {
        self.try_to_complex().ok_or_else(|| Error::Precision {
            op,
            detail: format!("value e^{:.1} overflows double precision", self.ln_abs()),
        })
    }

    /// Plain complex value, flushing to zero or infinity outside double range.
    pub fn to_complex_lossy(&self) -> Complex64 {
        ldexp(self.mantissa, self.exponent)
    }

    /// `self / other` as a plain complex number; exponents cancel exactly.
    pub fn ratio(&self, other: &ScaledValue) -> Complex64 {
        (*self / *other).to_complex_lossy()
    }
}

impl fmt::Debug for ScaledValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl From<Complex64> for ScaledValue {
    fn from(z: Complex64) -> Self {
        ScaledValue::from_complex(z)
    }
}

impl From<f64> for ScaledValue {
    fn from(x: f64) -> Self {
        ScaledValue::from_complex(Complex64::new(x, 0.0))
    }
}

impl Mul for ScaledValue {
    type Output = ScaledValue;

    fn mul(self, rhs: ScaledValue) -> ScaledValue {
        ScaledValue::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Mul<Complex64> for ScaledValue {
    type Output = ScaledValue;

    fn mul(self, rhs: Complex64) -> ScaledValue {
        self.scale(rhs)
    }
}

impl Div for ScaledValue {
    type Output = ScaledValue;

    fn div(self, rhs: ScaledValue) -> ScaledValue {
        ScaledValue::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Neg for ScaledValue {
    type Output = ScaledValue;

    fn neg(self) -> ScaledValue {
        ScaledValue {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Add for ScaledValue {
    type Output = ScaledValue;

    fn add(self, rhs: ScaledValue) -> ScaledValue {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = big.exponent - small.exponent;
        if gap > 1100 {
            return big;
        }
        ScaledValue::new(big.mantissa + ldexp(small.mantissa, -gap), big.exponent)
    }
}

impl Sub for ScaledValue {
    type Output = ScaledValue;

    fn sub(self, rhs: ScaledValue) -> ScaledValue {
        self + (-rhs)
    }
}
