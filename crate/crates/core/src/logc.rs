//! Overflow-safe complex values stored as `(ln|w|, arg w)`.

use std::f64::consts::{LN_2, PI, TAU};
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::expr::ExprError;

/// Largest natural-log modulus that still converts to a finite `f64`.
pub const LOG_OVERFLOW: f64 = 709.782_712_893_384;

/// A complex number in polar log form.
///
/// `logmag = -inf` encodes zero, in which case `arg` is always `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    logmag: f64,
    arg: f64,
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    if t <= -PI {
        t += TAU;
    }
    t
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        logmag: f64::NEG_INFINITY,
        arg: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        logmag: 0.0,
        arg: 0.0,
    };

    pub fn new(logmag: f64, arg: f64) -> Self {
        if logmag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogComplex {
                logmag,
                arg: wrap_angle(arg),
            }
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        // hypot keeps subnormal and huge inputs finite
        LogComplex {
            logmag: z.re.hypot(z.im).ln(),
            arg: z.im.atan2(z.re),
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// Builds `m * 2^e` without forming the (possibly overflowing) power.
    pub fn from_scaled(m: Complex64, e: i64) -> Self {
        let base = Self::from_complex(m);
        if base.is_zero() {
            return base;
        }
        LogComplex {
            logmag: base.logmag + e as f64 * LN_2,
            arg: base.arg,
        }
    }

    pub fn logmag(&self) -> f64 {
        self.logmag
    }

    pub fn arg(&self) -> f64 {
        self.arg
    }

    pub fn is_zero(&self) -> bool {
        self.logmag == f64::NEG_INFINITY
    }

    pub fn is_finite(&self) -> bool {
        self.logmag.is_finite() || self.is_zero()
    }

    /// `|w|` as an `f64`; saturates to `inf` above the overflow threshold.
    pub fn abs(&self) -> f64 {
        self.logmag.exp()
    }

    /// `ln+ |w|`.
    pub fn log_plus(&self) -> f64 {
        self.logmag.max(0.0)
    }

    pub fn recip(&self) -> Self {
        if self.is_zero() {
            return LogComplex {
                logmag: f64::INFINITY,
                arg: 0.0,
            };
        }
        LogComplex::new(-self.logmag, -self.arg)
    }

    pub fn powi(&self, k: i32) -> Self {
        if self.is_zero() {
            return if k == 0 { Self::ONE } else { *self };
        }
        LogComplex::new(self.logmag * k as f64, self.arg * k as f64)
    }

    pub fn scale_real(&self, x: f64) -> Self {
        *self * LogComplex::from_real(x)
    }

    /// Converts to a linear complex number.
    ///
    /// Fails with [`ExprError::Overflow`] when the modulus exceeds `f64::MAX`;
    /// the error carries the direction so callers can recover a signed infinity.
    pub fn to_complex(&self) -> Result<Complex64, ExprError> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.logmag > LOG_OVERFLOW || self.logmag.is_nan() {
            return Err(ExprError::Overflow {
                logmag: self.logmag,
                arg: self.arg,
            });
        }
        Ok(Complex64::from_polar(self.logmag.exp(), self.arg))
    }

    /// Linear value after dividing by `e^shift`; used by summation kernels.
    pub fn to_complex_scaled(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.logmag - shift).exp(), self.arg)
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.logmag + rhs.logmag, self.arg + rhs.arg)
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        self * rhs.recip()
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex::new(self.logmag, self.arg + PI)
    }
}

impl fmt::Display for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({}) * cis({})", self.logmag, self.arg)
    }
}

/// Neumaier-compensated sum of complex values.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn conversion_examples() {
        assert_eq!(
            LogComplex::new(0.0, 0.0).to_complex().unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            LogComplex::ZERO.to_complex().unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let w = LogComplex::new(2f64.ln(), PI).to_complex().unwrap();
        assert_relative_eq!(w.re, -2.0, epsilon = 1e-15);
        assert!(w.im.abs() < 1e-15);
    }

    #[test]
    fn overflow_is_an_error_not_a_wrap() {
        let big = LogComplex::new(800.0, 0.5);
        match big.to_complex() {
            Err(ExprError::Overflow { logmag, arg }) => {
                assert_eq!(logmag, 800.0);
                assert_eq!(arg, 0.5);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn products_add_logs_and_wrap_args() {
        let a = LogComplex::new(500.0, 3.0);
        let b = LogComplex::new(400.0, 3.0);
        let p = a * b;
        assert_eq!(p.logmag(), 900.0);
        assert_relative_eq!(p.arg(), 6.0 - TAU, epsilon = 1e-15);
        assert!(p.arg() > -PI && p.arg() <= PI);
    }

    #[test]
    fn zero_has_zero_arg() {
        let z = LogComplex::from_complex(Complex64::new(0.0, 0.0));
        assert!(z.is_zero());
        assert_eq!(z.arg(), 0.0);
        assert!((z * LogComplex::new(3.0, 1.0)).is_zero());
        assert!((-z).is_zero());
    }

    #[test]
    fn wrap_keeps_pi_and_moves_minus_pi() {
        assert_eq!(wrap_angle(PI), PI);
        assert_relative_eq!(wrap_angle(-PI), PI, epsilon = 1e-15);
        assert_relative_eq!(wrap_angle(7.0 * PI), PI, epsilon = 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_addend() {
        let mut s = CompensatedSum::default();
        s.add(Complex64::new(1e16, 0.0));
        s.add(Complex64::new(1.0, 0.0));
        s.add(Complex64::new(-1e16, 0.0));
        assert_eq!(s.value().re, 1.0);
    }
}
