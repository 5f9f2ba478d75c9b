//! Extended-precision complex arithmetic on top of `astro-float`.

use std::f64::consts::LN_2;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_complex::Complex64;

use crate::logc::LogComplex;

/// Default mantissa length for the extended path.
pub const DEFAULT_BITS: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

/// A complex number with `bits` of mantissa in each component.
#[derive(Clone, Debug)]
pub struct BigComplex {
    re: BigFloat,
    im: BigFloat,
    bits: usize,
}

/// `(mantissa in [0.5, 1), binary exponent)` of a finite nonzero float.
fn split(x: &BigFloat) -> Option<(f64, i64)> {
    let (words, _, sign, exp, _) = x.as_raw_parts()?;
    let top = *words.last()?;
    if top == 0 {
        return None;
    }
    let mut m = top as f64 / 18_446_744_073_709_551_616.0;
    if words.len() > 1 {
        m += words[words.len() - 2] as f64 / 18_446_744_073_709_551_616.0 / 18_446_744_073_709_551_616.0;
    }
    if sign == Sign::Neg {
        m = -m;
    }
    Some((m, exp as i64))
}

/// Nearest `f64`, saturating to infinities outside the `f64` range.
fn to_f64(x: &BigFloat) -> f64 {
    match split(x) {
        None => 0.0,
        Some((m, e)) => {
            if e > 1100 {
                m.signum() * f64::INFINITY
            } else if e < -1100 {
                0.0
            } else {
                m * 2f64.powi(e as i32)
            }
        }
    }
}

impl BigComplex {
    pub fn zero(bits: usize) -> Self {
        Self::from_c64(Complex64::new(0.0, 0.0), bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_c64(Complex64::new(1.0, 0.0), bits)
    }

    /// Exact conversion: every `f64` is representable at `bits >= 53`.
    pub fn from_c64(z: Complex64, bits: usize) -> Self {
        BigComplex {
            re: BigFloat::from_f64(z.re, bits),
            im: BigFloat::from_f64(z.im, bits),
            bits,
        }
    }

    pub fn from_real(x: f64, bits: usize) -> Self {
        Self::from_c64(Complex64::new(x, 0.0), bits)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.bits;
        BigComplex {
            re: self.re.add(&o.re, p, RM),
            im: self.im.add(&o.im, p, RM),
            bits: p,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.bits;
        BigComplex {
            re: self.re.sub(&o.re, p, RM),
            im: self.im.sub(&o.im, p, RM),
            bits: p,
        }
    }

    pub fn neg(&self) -> Self {
        BigComplex {
            re: self.re.neg(),
            im: self.im.neg(),
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.bits;
        let ac = self.re.mul(&o.re, p, RM);
        let bd = self.im.mul(&o.im, p, RM);
        let ad = self.re.mul(&o.im, p, RM);
        let bc = self.im.mul(&o.re, p, RM);
        BigComplex {
            re: ac.sub(&bd, p, RM),
            im: ad.add(&bc, p, RM),
            bits: p,
        }
    }

    pub fn scale(&self, x: f64) -> Self {
        let p = self.bits;
        let s = BigFloat::from_f64(x, p);
        BigComplex {
            re: self.re.mul(&s, p, RM),
            im: self.im.mul(&s, p, RM),
            bits: p,
        }
    }

    /// `self / o`, or `None` when `o` is exactly zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        let p = self.bits;
        let den = o.re.mul(&o.re, p, RM).add(&o.im.mul(&o.im, p, RM), p, RM);
        let re = self
            .re
            .mul(&o.re, p, RM)
            .add(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self
            .im
            .mul(&o.re, p, RM)
            .sub(&self.re.mul(&o.im, p, RM), p, RM);
        Some(BigComplex {
            re: re.div(&den, p, RM),
            im: im.div(&den, p, RM),
            bits: p,
        })
    }

    pub fn recip(&self) -> Option<Self> {
        Self::one(self.bits).div(self)
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one(self.bits);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Nearest double-precision value; components outside the `f64` range
    /// saturate to infinity.
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    /// Log-form value. Never overflows: the binary exponents are carried
    /// separately until the final logarithm.
    pub fn to_log(&self) -> LogComplex {
        let a = split(&self.re);
        let b = split(&self.im);
        let (m, e) = match (a, b) {
            (None, None) => return LogComplex::ZERO,
            (Some((x, ex)), None) => (Complex64::new(x, 0.0), ex),
            (None, Some((y, ey))) => (Complex64::new(0.0, y), ey),
            (Some((x, ex)), Some((y, ey))) => {
                let e = ex.max(ey);
                let xs = if e - ex > 1060 { 0.0 } else { x * 2f64.powi((ex - e) as i32) };
                let ys = if e - ey > 1060 { 0.0 } else { y * 2f64.powi((ey - e) as i32) };
                (Complex64::new(xs, ys), e)
            }
        };
        let base = LogComplex::from_complex(m);
        LogComplex::new(base.logmag() + e as f64 * LN_2, base.arg())
    }

    /// Natural log of the modulus (`-inf` for zero).
    pub fn ln_abs(&self) -> f64 {
        self.to_log().logmag()
    }

    /// Decimal rendering `"<re> <im>"` at full working precision.
    pub fn to_decimal(&self) -> (String, String) {
        let mut cc = Consts::new().expect("astro-float constant cache");
        let fmt = |x: &BigFloat, cc: &mut Consts| {
            if x.is_zero() {
                "0".to_string()
            } else {
                x.format(Radix::Dec, RM, cc)
                    .unwrap_or_else(|_| format!("{:e}", to_f64(x)))
            }
        };
        (fmt(&self.re, &mut cc), fmt(&self.im, &mut cc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_f64_for_exact_inputs() {
        let a = BigComplex::from_c64(Complex64::new(1.5, -2.0), 128);
        let b = BigComplex::from_c64(Complex64::new(0.25, 4.0), 128);
        assert_eq!(a.mul(&b).to_c64(), Complex64::new(1.5, -2.0) * Complex64::new(0.25, 4.0));
        assert_eq!(a.add(&b).to_c64(), Complex64::new(1.75, 2.0));
        let q = a.div(&b).unwrap().mul(&b).sub(&a);
        assert!(q.to_c64().norm() < 1e-35);
        assert!(a.div(&BigComplex::zero(128)).is_none());
    }

    #[test]
    fn cancellation_survives_in_extended_precision() {
        let big = BigComplex::from_real(1e20, 256);
        let one = BigComplex::from_real(1.0, 256);
        let r = big.add(&one).sub(&big);
        assert_eq!(r.to_c64(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn log_form_does_not_overflow() {
        let x = BigComplex::from_real(1e300, 256);
        let y = x.mul(&x).mul(&x);
        let l = y.to_log();
        assert!((l.logmag() - 900.0 * 10f64.ln()).abs() < 1e-9);
        assert_eq!(l.arg(), 0.0);
        assert!(y.to_c64().re.is_infinite());
        let neg = BigComplex::from_c64(Complex64::new(0.0, -3.0), 256).to_log();
        assert!((neg.logmag() - 3f64.ln()).abs() < 1e-15);
        assert!((neg.arg() + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn powi_and_decimal() {
        let b = BigComplex::from_c64(Complex64::new(-1.0, 1.0), 256);
        assert_eq!(b.powi(4).to_c64(), Complex64::new(-4.0, 0.0));
        let (re, im) = BigComplex::from_c64(Complex64::new(0.5, 0.0), 64).to_decimal();
        assert!(re.starts_with("5") || re.starts_with("0.5"), "{re}");
        assert_eq!(im, "0");
    }
}
