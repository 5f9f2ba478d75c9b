use std::f64::consts::{LN_10, LN_2};

use num_complex::Complex64;

use super::{Expr, ExprError, Node, PfTerm};
use crate::ext::{BigComplex, DEFAULT_BITS};
use crate::logc::{CompensatedSum, LogComplex};

/// Knobs of the evaluator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    /// A sum whose value falls more than this many natural-log units below
    /// its largest addend is recomputed on the extended-precision path.
    pub cancel_budget: f64,
    /// Mantissa bits of the extended path.
    pub ext_bits: usize,
    /// Relative distance to a pole, in units of `1 + |pole|`, treated as a hit.
    pub pole_tol: f64,
    /// Target relative accuracy of every sum node.
    pub accuracy: f64,
}

impl EvalConfig {
    /// Looser accuracy for bulk sampling (quadrature, winding numbers),
    /// where the extended path would dominate the cost.
    pub fn survey() -> Self {
        EvalConfig {
            accuracy: 1e-7,
            ..Self::default()
        }
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            cancel_budget: 45.0,
            ext_bits: DEFAULT_BITS,
            pole_tol: f64::EPSILON,
            accuracy: 1e-12,
        }
    }
}

/// Value of `expr` at `z` in log form with the default configuration.
pub fn evaluate(expr: &Expr, z: Complex64) -> Result<LogComplex, ExprError> {
    evaluate_with(expr, z, &EvalConfig::default())
}

/// Double-precision evaluation carrying a relative error estimate; when
/// any sum node cannot meet `cfg.accuracy` the whole expression is
/// recomputed on the extended path.
pub fn evaluate_with(expr: &Expr, z: Complex64, cfg: &EvalConfig) -> Result<LogComplex, ExprError> {
    match evaluate_est(expr, z, 0.0, cfg)? {
        Some((v, _)) => Ok(v),
        None => Ok(eval_ext(expr, &BigComplex::from_c64(z, cfg.ext_bits))?.to_log()),
    }
}

/// Value of `expr` at `z` computed entirely in `bits`-bit arithmetic.
pub fn evaluate_ext(expr: &Expr, z: Complex64, bits: usize) -> Result<BigComplex, ExprError> {
    eval_ext(expr, &BigComplex::from_c64(z, bits))
}

// Factor u_k = 1 + z/a_k with |u_k| below this is treated separately in
// derivative evaluation, where the logarithmic-derivative form is singular.
const SPLIT_TOL: f64 = 1e-8;

pub(crate) trait Field: Clone {
    fn lift(&self, z: Complex64) -> Self;
    fn f_add(&self, o: &Self) -> Self;
    fn f_mul(&self, o: &Self) -> Self;
    fn f_div(&self, o: &Self) -> Option<Self>;
    fn f_scale(&self, x: f64) -> Self;
}

impl Field for Complex64 {
    fn lift(&self, z: Complex64) -> Self {
        z
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_div(&self, o: &Self) -> Option<Self> {
        if o.re == 0.0 && o.im == 0.0 {
            None
        } else {
            Some(self / o)
        }
    }
    fn f_scale(&self, x: f64) -> Self {
        self * x
    }
}

impl Field for BigComplex {
    fn lift(&self, z: Complex64) -> Self {
        BigComplex::from_c64(z, self.bits())
    }
    fn f_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn f_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn f_div(&self, o: &Self) -> Option<Self> {
        self.div(o)
    }
    fn f_scale(&self, x: f64) -> Self {
        self.scale(x)
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `P^(m) / Q` where `P = prod_k u_k`, `u_k = 1 + z/a_k`, and `Q` is the
/// product of the factors not flagged in `split`.
///
/// The regular factors enter through the logarithmic derivatives
/// `(log Q)^(i) = (-1)^(i-1) (i-1)! sum_k (z + a_k)^-i`; the split factors
/// (those vanishing at or very near `z`) are expanded exactly.
pub(crate) fn factor_product_ratio<F: Field>(
    a: &[Complex64],
    split: &[bool],
    z: &F,
    u_split: &[(F, Complex64)],
    m: u32,
) -> Option<F> {
    let zero = z.lift(Complex64::new(0.0, 0.0));
    let one = z.lift(Complex64::new(1.0, 0.0));
    let m_us = m as usize;

    // power sums s_i, i = 1..=m
    let mut s = vec![zero.clone(); m_us + 1];
    if m > 0 {
        for (ak, &sp) in a.iter().zip(split) {
            if sp {
                continue;
            }
            let inv = one.f_div(&z.f_add(&z.lift(*ak)))?;
            let mut p = inv.clone();
            for si in s.iter_mut().skip(1) {
                *si = si.f_add(&p);
                p = p.f_mul(&inv);
            }
        }
    }
    // log-derivatives L_i and ratios R_j = Q^(j) / Q
    let mut logd = vec![zero.clone(); m_us + 1];
    let mut fact = 1.0;
    for i in 1..=m_us {
        if i > 1 {
            fact *= (i - 1) as f64;
        }
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        logd[i] = s[i].f_scale(sign * fact);
    }
    let mut ratio = vec![one.clone()];
    for j in 0..m_us {
        let mut acc = zero.clone();
        for i in 0..=j {
            let t = logd[i + 1].f_mul(&ratio[j - i]).f_scale(binom(j as u32, i as u32));
            acc = acc.f_add(&t);
        }
        ratio.push(acc);
    }
    // derivatives of the split part U = prod (u_k): U^(j) = j! c_j where
    // prod (u_k + t / a_k) = sum_j c_j t^j
    let mut c = vec![zero.clone(); m_us + 1];
    c[0] = one.clone();
    for (u, ak) in u_split {
        let inv_a = one.f_div(&z.lift(*ak))?;
        for j in (0..=m_us).rev() {
            let mut v = c[j].f_mul(u);
            if j > 0 {
                v = v.f_add(&c[j - 1].f_mul(&inv_a));
            }
            c[j] = v;
        }
    }
    let mut out = zero;
    let mut jfact = 1.0;
    for j in 0..=m_us {
        if j > 0 {
            jfact *= j as f64;
        }
        let t = c[j].f_mul(&ratio[m_us - j]).f_scale(binom(m, j as u32) * jfact);
        out = out.f_add(&t);
    }
    Some(out)
}

/// Renormalizing product of complex factors: returns `(mantissa, e)` with
/// value `mantissa * 2^e`.
fn scaled_product(it: impl Iterator<Item = Complex64>) -> (Complex64, i64) {
    const HI: f64 = 1.0e150;
    const LO: f64 = 1.0e-150;
    // 2^498 and its inverse are exact powers of two
    let up = 2f64.powi(498);
    let down = 2f64.powi(-498);
    let mut acc = Complex64::new(1.0, 0.0);
    let mut e: i64 = 0;
    for u in it {
        acc *= u;
        let mag = acc.re.abs().max(acc.im.abs());
        if mag > HI {
            acc *= down;
            e += 498;
        } else if mag < LO {
            if mag == 0.0 {
                return (acc, 0);
            }
            acc *= up;
            e -= 498;
        }
    }
    (acc, e)
}

/// Magnitude bound for [`factor_product_ratio`]: the same recursion on
/// absolute values of every term.
fn factor_product_ratio_mag(a: &[Complex64], split: &[bool], z: Complex64, u_split: &[(f64, f64)], m: u32) -> f64 {
    let m_us = m as usize;
    let mut s = vec![0.0; m_us + 1];
    for (ak, &sp) in a.iter().zip(split) {
        if sp {
            continue;
        }
        let inv = 1.0 / (z + ak).norm();
        let mut p = inv;
        for si in s.iter_mut().skip(1) {
            *si += p;
            p *= inv;
        }
    }
    let mut logd = vec![0.0; m_us + 1];
    let mut fact = 1.0;
    for i in 1..=m_us {
        if i > 1 {
            fact *= (i - 1) as f64;
        }
        logd[i] = s[i] * fact;
    }
    let mut ratio = vec![1.0];
    for j in 0..m_us {
        let acc = (0..=j).map(|i| logd[i + 1] * ratio[j - i] * binom(j as u32, i as u32)).sum();
        ratio.push(acc);
    }
    let mut c = vec![0.0; m_us + 1];
    c[0] = 1.0;
    for &(u, inv_a) in u_split {
        for j in (0..=m_us).rev() {
            c[j] = c[j] * u + if j > 0 { c[j - 1] * inv_a } else { 0.0 };
        }
    }
    let mut out = 0.0;
    let mut jfact = 1.0;
    for j in 0..=m_us {
        if j > 0 {
            jfact *= j as f64;
        }
        out += c[j] * ratio[m_us - j] * binom(m, j as u32) * jfact;
    }
    out
}

fn factor_product_est(a: &[Complex64], deriv: u32, z: Complex64, alpha: f64) -> Result<(LogComplex, f64), ExprError> {
    // u_k = (a_k + z)/a_k carries relative error (alpha + eps|z|)/|a_k + z| + eps
    let sens: f64 = a.iter().map(|ak| point_err(alpha, z, (z + ak).norm())).sum();
    let base_err = sens + 2.0 * EPS * a.len() as f64;
    if deriv == 0 {
        let (m, e) = scaled_product(a.iter().map(|ak| Complex64::new(1.0, 0.0) + z / ak));
        return Ok((LogComplex::from_scaled(m, e), base_err));
    }
    let u: Vec<Complex64> = a.iter().map(|ak| Complex64::new(1.0, 0.0) + z / ak).collect();
    let split: Vec<bool> = u.iter().map(|uk| uk.norm() < SPLIT_TOL).collect();
    let u_split: Vec<(Complex64, Complex64)> = u
        .iter()
        .zip(a)
        .zip(&split)
        .filter(|(_, &s)| s)
        .map(|((uk, ak), _)| (*uk, *ak))
        .collect();
    let (m, e) = scaled_product(u.iter().zip(&split).filter(|(_, &s)| !s).map(|(uk, _)| *uk));
    let q = LogComplex::from_scaled(m, e);
    let ratio = factor_product_ratio(a, &split, &z, &u_split, deriv).ok_or(ExprError::PoleHit { z })?;
    let mags: Vec<(f64, f64)> = u_split.iter().map(|(uk, ak)| (uk.norm(), 1.0 / ak.norm())).collect();
    let bound = factor_product_ratio_mag(a, &split, z, &mags, deriv);
    let rn = ratio.norm();
    let ratio_err = if rn == 0.0 {
        f64::INFINITY
    } else {
        (deriv as f64 + 1.0) * (4.0 * EPS + base_err) * bound / rn
    };
    Ok((q * LogComplex::from_complex(ratio), base_err + ratio_err))
}

fn factor_product_ext(a: &[Complex64], deriv: u32, z: &BigComplex) -> Result<BigComplex, ExprError> {
    let bits = z.bits();
    let u: Vec<BigComplex> = a
        .iter()
        .map(|ak| {
            let big_a = BigComplex::from_c64(*ak, bits);
            z.add(&big_a).div(&big_a).expect("nonzero factor-product constant")
        })
        .collect();
    if deriv == 0 {
        return Ok(u.iter().fold(BigComplex::one(bits), |acc, x| acc.mul(x)));
    }
    let split: Vec<bool> = u.iter().map(|x| x.is_zero() || x.ln_abs() < -80.0).collect();
    let u_split: Vec<(BigComplex, Complex64)> = u
        .iter()
        .zip(a)
        .zip(&split)
        .filter(|(_, &s)| s)
        .map(|((uk, ak), _)| (uk.clone(), *ak))
        .collect();
    let q = u
        .iter()
        .zip(&split)
        .filter(|(_, &s)| !s)
        .fold(BigComplex::one(bits), |acc, (x, _)| acc.mul(x));
    let ratio = factor_product_ratio(a, &split, z, &u_split, deriv).ok_or(ExprError::PoleHit { z: z.to_c64() })?;
    Ok(q.mul(&ratio))
}

fn partial_fraction_terms(
    terms: &[PfTerm],
    z: Complex64,
    alpha: f64,
    cfg: &EvalConfig,
) -> Result<Vec<(LogComplex, f64)>, ExprError> {
    terms
        .iter()
        .map(|t| {
            let d = z - t.pole;
            let dn = d.norm();
            if dn <= cfg.pole_tol * (1.0 + t.pole.norm()) {
                return Err(ExprError::PoleHit { z });
            }
            let e = t.order as f64 * (point_err(alpha, z, dn) + EPS * t.pole.norm() / dn) + (t.order as f64 + 1.0) * EPS;
            Ok((LogComplex::from_complex(t.coeff) / LogComplex::from_complex(d).powi(t.order as i32), e))
        })
        .collect()
}

/// A sum node that cannot meet the accuracy target in double precision.
#[derive(Debug)]
pub(crate) struct Escalate;

enum Fail {
    Expr(ExprError),
    Escalate,
}

impl From<ExprError> for Fail {
    fn from(e: ExprError) -> Self {
        Fail::Expr(e)
    }
}

impl From<Escalate> for Fail {
    fn from(_: Escalate) -> Self {
        Fail::Escalate
    }
}

const EPS: f64 = f64::EPSILON;

/// Value and relative error estimate of `expr` at a point `z` known to
/// absolute accuracy `alpha`; `None` when the extended path is needed.
pub(crate) fn evaluate_est(
    expr: &Expr,
    z: Complex64,
    alpha: f64,
    cfg: &EvalConfig,
) -> Result<Option<(LogComplex, f64)>, ExprError> {
    match eval_est(expr, z, alpha, cfg) {
        Ok(v) => Ok(Some(v)),
        Err(Fail::Escalate) => Ok(None),
        Err(Fail::Expr(e)) => Err(e),
    }
}

/// Rescaled compensated sum of log-form addends with relative errors.
///
/// The result error combines the addend errors, weighted by magnitude, and
/// the rounding of the log form (about `eps * (|logmag| + |arg|)` per
/// addend). Fails with [`Escalate`] when that error exceeds `cfg.accuracy`
/// or the result sits more than `cancel_budget` nats below the largest
/// addend.
pub(crate) fn combine_est(vals: &[(LogComplex, f64)], cfg: &EvalConfig) -> Result<(LogComplex, f64), Escalate> {
    let max = vals
        .iter()
        .filter(|v| !v.0.is_zero())
        .map(|v| v.0.logmag())
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok((LogComplex::ZERO, 0.0));
    }
    let mut acc = CompensatedSum::default();
    let mut spread: f64 = 1.0;
    let mut carried = 0.0;
    for (v, e) in vals {
        if v.is_zero() {
            continue;
        }
        acc.add(v.to_complex_scaled(max));
        spread = spread.max(v.logmag().abs() + v.arg().abs());
        carried += (v.logmag() - max).exp() * e;
    }
    let rel = LogComplex::from_complex(acc.value());
    if rel.is_zero() || rel.logmag() < -cfg.cancel_budget {
        return Err(Escalate);
    }
    let noise = 4.0 * vals.len() as f64 * EPS * spread;
    let err = (noise + carried) / rel.logmag().exp();
    if !(err <= cfg.accuracy) {
        return Err(Escalate);
    }
    Ok((LogComplex::new(rel.logmag() + max, rel.arg()), err + EPS))
}

/// `ln |b|` against the largest addend: more than the precision budget of
/// `bits` lost means the extended result is noise.
fn ext_loss_check(sum: &BigComplex, max_ln: f64) -> Result<(), ExprError> {
    if sum.is_zero() || max_ln == f64::NEG_INFINITY {
        return Ok(());
    }
    let budget = sum.bits() as f64 * LN_2 - 16.0 * LN_10;
    let l = sum.ln_abs();
    if l - max_ln < -budget {
        return Err(ExprError::PrecisionLoss {
            lost_digits: (max_ln - l) / LN_10,
        });
    }
    Ok(())
}

/// Relative error of `1/(z − p)^m`-type factors from the point error.
fn point_err(alpha: f64, z: Complex64, dist: f64) -> f64 {
    if dist == 0.0 {
        f64::INFINITY
    } else {
        (alpha + EPS * z.norm()) / dist
    }
}

fn eval_est(expr: &Expr, z: Complex64, alpha: f64, cfg: &EvalConfig) -> Result<(LogComplex, f64), Fail> {
    match expr.node() {
        Node::Const(c) => Ok((LogComplex::from_complex(*c), EPS)),
        Node::Var => {
            let e = if alpha == 0.0 { EPS } else { point_err(alpha, Complex64::new(0.0, 0.0), z.norm()) + EPS };
            Ok((LogComplex::from_complex(z), e))
        }
        Node::Monomial(k) => {
            let e = if alpha == 0.0 { 0.0 } else { alpha / z.norm() };
            Ok((LogComplex::from_complex(z).powi(*k as i32), *k as f64 * (e + EPS)))
        }
        Node::Sum(children) => {
            let vals = children
                .iter()
                .map(|c| eval_est(c, z, alpha, cfg))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(combine_est(&vals, cfg)?)
        }
        Node::Product(children) => {
            let mut acc = LogComplex::ONE;
            let mut err = 0.0;
            for c in children {
                let (v, e) = eval_est(c, z, alpha, cfg)?;
                acc = acc * v;
                err += e + EPS;
            }
            Ok((acc, err))
        }
        Node::Quotient(n, d) => {
            let (den, ed) = eval_est(d, z, alpha, cfg)?;
            if den.is_zero() {
                return Err(ExprError::PoleHit { z }.into());
            }
            let (num, en) = eval_est(n, z, alpha, cfg)?;
            Ok((num / den, en + ed + EPS))
        }
        Node::Shift(e, c) => {
            let w = z + c;
            eval_est(e, w, alpha + EPS * w.norm(), cfg)
        }
        Node::Compose(outer, inner) => {
            let (w, ew) = eval_est(inner, z, alpha, cfg)?;
            let w = w.to_complex()?;
            eval_est(outer, w, ew * w.norm(), cfg)
        }
        Node::FactorProduct { a, deriv } => Ok(factor_product_est(a, *deriv, z, alpha)?),
        Node::PartialFractions(terms) => {
            let vals = partial_fraction_terms(terms, z, alpha, cfg)?;
            Ok(combine_est(&vals, cfg)?)
        }
    }
}

pub(crate) fn eval_ext(expr: &Expr, z: &BigComplex) -> Result<BigComplex, ExprError> {
    let bits = z.bits();
    let lift = |c: Complex64| BigComplex::from_c64(c, bits);
    match expr.node() {
        Node::Const(c) => Ok(lift(*c)),
        Node::Var => Ok(z.clone()),
        Node::Monomial(k) => Ok(z.powi(*k)),
        Node::Sum(children) => {
            let mut acc = BigComplex::zero(bits);
            let mut max_ln = f64::NEG_INFINITY;
            for c in children {
                let v = eval_ext(c, z)?;
                max_ln = max_ln.max(v.ln_abs());
                acc = acc.add(&v);
            }
            ext_loss_check(&acc, max_ln)?;
            Ok(acc)
        }
        Node::Product(children) => {
            let mut acc = BigComplex::one(bits);
            for c in children {
                acc = acc.mul(&eval_ext(c, z)?);
            }
            Ok(acc)
        }
        Node::Quotient(n, d) => {
            let den = eval_ext(d, z)?;
            eval_ext(n, z)?.div(&den).ok_or(ExprError::PoleHit { z: z.to_c64() })
        }
        Node::Shift(e, c) => eval_ext(e, &z.add(&lift(*c))),
        Node::Compose(outer, inner) => eval_ext(outer, &eval_ext(inner, z)?),
        Node::FactorProduct { a, deriv } => factor_product_ext(a, *deriv, z),
        Node::PartialFractions(terms) => {
            let mut acc = BigComplex::zero(bits);
            let mut max_ln = f64::NEG_INFINITY;
            for t in terms.iter() {
                let d = z.sub(&lift(t.pole));
                let term = lift(t.coeff)
                    .div(&d.powi(t.order))
                    .ok_or(ExprError::PoleHit { z: z.to_c64() })?;
                max_ln = max_ln.max(term.ln_abs());
                acc = acc.add(&term);
            }
            ext_loss_check(&acc, max_ln)?;
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_at_two() {
        let v = evaluate(&Expr::monomial(2), c(2.0, 0.0)).unwrap();
        assert_relative_eq!(v.logmag(), 4f64.ln(), epsilon = 1e-15);
        assert_eq!(v.arg(), 0.0);
    }

    #[test]
    fn factor_product_value_and_zero() {
        // A_1 = 4 * 1^4 = 4
        let h = Expr::factor_product(vec![c(4.0, 0.0)]).unwrap();
        let v = evaluate(&h, c(4.0, 0.0)).unwrap().to_complex().unwrap();
        assert_eq!(v, c(2.0, 0.0));
        assert!(evaluate(&h, c(-4.0, 0.0)).unwrap().is_zero());
    }

    #[test]
    fn huge_products_stay_finite_in_log_form() {
        let a: Vec<Complex64> = (1..=400).map(|k| c((k as f64).powi(3), 0.0)).collect();
        let f = Expr::factor_product(a.clone()).unwrap();
        let z = c(1e9, 0.0);
        let v = evaluate(&f, z).unwrap();
        let direct: f64 = a.iter().map(|ak| (1.0 + z.re / ak.re).ln()).sum();
        assert_relative_eq!(v.logmag(), direct, max_relative = 1e-12);
        assert!(v.logmag() > 709.0);
    }

    #[test]
    fn pole_hit_is_reported() {
        let g = Expr::partial_fractions(vec![PfTerm::simple(c(1.0, 0.0), c(0.5, 0.5))]).unwrap();
        assert!(matches!(evaluate(&g, c(0.5, 0.5)), Err(ExprError::PoleHit { .. })));
        let q = Expr::quotient(Expr::one(), Expr::var());
        assert!(matches!(evaluate(&q, c(0.0, 0.0)), Err(ExprError::PoleHit { .. })));
    }

    #[test]
    fn cancellation_escalates_to_extended_path() {
        // (z + 1)^2 - z^2 = 2z + 1 at z = 1e25: f64 alone returns garbage
        let f = Expr::monomial(2);
        let d = f.shift(c(1.0, 0.0)) - f;
        let z = c(1e25, 0.0);
        let v = evaluate(&d, z).unwrap().to_complex().unwrap();
        assert_relative_eq!(v.re, 2e25 + 1.0, max_relative = 1e-13);
    }

    #[test]
    fn exact_cancellation_is_zero() {
        let k = Expr::constant(c(3.0, -1.0));
        let d = k.shift(c(1.0, 0.0)) - k;
        assert!(evaluate(&d, c(0.3, 0.2)).unwrap().is_zero());
    }

    #[test]
    fn derivative_at_a_zero_of_the_product_is_regular() {
        // P = (1 + z/2)(1 + z/5): P'(-2) = (1/2)(1 - 2/5)
        let p = Expr::factor_product_deriv(vec![c(2.0, 0.0), c(5.0, 0.0)], 1).unwrap();
        let v = evaluate(&p, c(-2.0, 0.0)).unwrap().to_complex().unwrap();
        assert_relative_eq!(v.re, 0.3, max_relative = 1e-15);
        let e = evaluate_ext(&p, c(-2.0, 0.0), 256).unwrap().to_c64();
        assert_relative_eq!(e.re, 0.3, max_relative = 1e-15);
        // P'' = 2 / 10 everywhere
        let p2 = Expr::factor_product_deriv(vec![c(2.0, 0.0), c(5.0, 0.0)], 2).unwrap();
        for z in [c(-2.0, 0.0), c(-5.0, 0.0), c(3.0, 7.0)] {
            let v = evaluate(&p2, z).unwrap().to_complex().unwrap();
            assert_relative_eq!(v.re, 0.2, max_relative = 1e-14);
            assert!(v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn extended_and_log_paths_agree() {
        let f = Expr::quotient(
            Expr::factor_product(vec![c(3.0, 1.0), c(-7.0, 0.5)]).unwrap(),
            Expr::from_roots(2.0, &[c(1.0, 1.0), c(-2.0, 0.0)]),
        )
        .shift(c(0.25, -0.5));
        for z in [c(0.1, 0.7), c(-3.0, 2.0), c(10.0, -4.0)] {
            let a = evaluate(&f, z).unwrap().to_complex().unwrap();
            let b = evaluate_ext(&f, z, 256).unwrap().to_c64();
            assert_relative_eq!((a - b).norm() / b.norm(), 0.0, epsilon = 1e-14);
        }
    }
}
