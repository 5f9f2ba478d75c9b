//! Taylor coefficients by Cauchy-FFT, maximum term, central index and the
//! Wiman-Valiron ratio at maximum-modulus points.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{evaluate_with, nth_derivative, EvalConfig, Expr, ExprError};
use crate::logc::LogComplex;

#[derive(Debug, Error)]
pub enum WimanError {
    #[error("pole inside |z| <= {r}")]
    PoleInDisk { r: f64 },
    #[error("pole set unknown; cannot certify analyticity in the disc")]
    IncompleteRegistry,
    #[error("maximizing index {index} is at the edge of a window of length {len}")]
    WindowTooShort { index: usize, len: usize },
    #[error("grid spans {decades:.2} decades; at least 3 are needed")]
    InsufficientGrid { decades: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coefficients `a_0..a_m` extracted on `|z| = extraction_radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorWindow {
    pub coeffs: Vec<LogComplex>,
    /// Coefficients below the rounding floor, reported as zero.
    pub lost: Vec<bool>,
    pub extraction_radius: f64,
    /// `ln` of the absolute error bound on `a_k r^k`.
    pub log_error_bound: f64,
    pub points: usize,
}

impl TaylorWindow {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluates the truncated series at `z`.
    pub fn eval(&self, z: Complex64) -> LogComplex {
        let lz = LogComplex::from_complex(z);
        let terms: Vec<LogComplex> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| *a * lz.powi(k as i32))
            .collect();
        let max = terms.iter().map(|t| t.logmag()).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        let s: Complex64 = terms.iter().map(|t| t.to_complex_scaled(max)).sum();
        let l = LogComplex::from_complex(s);
        LogComplex::new(l.logmag() + max, l.arg())
    }
}

fn check_analytic(f: &Expr, r: f64) -> Result<(), WimanError> {
    let reg = f.registry();
    if !reg.poles_complete() {
        return Err(WimanError::IncompleteRegistry);
    }
    if reg.poles().any(|p| p.location.norm() <= r) {
        return Err(WimanError::PoleInDisk { r });
    }
    Ok(())
}

/// Cauchy-integral extraction of `a_0..a_m` with `>= 8(m+1)` equal-angle
/// points (rounded up to a power of two).
pub fn taylor_coeffs(f: &Expr, m: usize, r: f64) -> Result<TaylorWindow, WimanError> {
    check_analytic(f, r)?;
    let n = (8 * (m + 1)).max(64).next_power_of_two();
    let cfg = EvalConfig::survey();
    let vals: Vec<LogComplex> = (0..n)
        .into_par_iter()
        .map(|j| evaluate_with(f, Complex64::from_polar(r, TAU * j as f64 / n as f64), &cfg))
        .collect::<Result<_, _>>()?;
    let shift = vals.iter().map(|v| v.logmag()).fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Ok(TaylorWindow {
            coeffs: vec![LogComplex::ZERO; m + 1],
            lost: vec![false; m + 1],
            extraction_radius: r,
            log_error_bound: f64::NEG_INFINITY,
            points: n,
        });
    }
    let mut buf: Vec<Complex64> = vals.iter().map(|v| v.to_complex_scaled(shift)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // rounding in the samples and in the transform, relative to max |f|
    let floor = 16.0 * f64::EPSILON * (n as f64).log2().max(1.0) * (1.0 + shift.abs());
    let ln_r = r.ln();
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut lost = Vec::with_capacity(m + 1);
    for (k, c) in buf.iter().take(m + 1).enumerate() {
        let c = c / n as f64;
        if c.norm() < floor {
            coeffs.push(LogComplex::ZERO);
            lost.push(true);
        } else {
            let l = LogComplex::from_complex(c);
            coeffs.push(LogComplex::new(l.logmag() + shift - k as f64 * ln_r, l.arg()));
            lost.push(false);
        }
    }
    Ok(TaylorWindow {
        coeffs,
        lost,
        extraction_radius: r,
        log_error_bound: shift + floor.ln(),
        points: n,
    })
}

/// `(ln μ(r), N(r))`: the maximum term and the largest index attaining it.
///
/// Terms within `1e-9` (relative, in log scale) of the maximum count as ties.
pub fn max_term_central_index(t: &TaylorWindow, r: f64) -> Result<(f64, usize), WimanError> {
    let ln_r = r.ln();
    let logs: Vec<f64> = t
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| a.logmag() + k as f64 * ln_r)
        .collect();
    let mu = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * mu.abs().max(1.0);
    let idx = logs.iter().rposition(|&l| l >= mu - tol).unwrap_or(0);
    let len = t.coeffs.len();
    if len < 3 || idx + 3 > len {
        return Err(WimanError::WindowTooShort { index: idx, len });
    }
    Ok((mu, idx))
}

/// Maximum term and central index at `r`, doubling the window until the
/// maximizer is interior (up to `max_window` coefficients).
pub fn central_index(f: &Expr, r: f64, max_window: usize) -> Result<(f64, usize), WimanError> {
    let mut m = 32;
    loop {
        let t = taylor_coeffs(f, m, r)?;
        match max_term_central_index(&t, r) {
            Err(WimanError::WindowTooShort { .. }) if 2 * m <= max_window => m *= 2,
            other => return other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralIndexProfile {
    pub r_grid: Vec<f64>,
    pub log_mu: Vec<f64>,
    pub n_vals: Vec<usize>,
}

pub fn central_index_profile(f: &Expr, radii: &[f64], max_window: usize) -> Result<CentralIndexProfile, WimanError> {
    let rows: Vec<(f64, usize)> = radii
        .iter()
        .map(|&r| central_index(f, r, max_window))
        .collect::<Result<_, _>>()?;
    Ok(CentralIndexProfile {
        r_grid: radii.to_vec(),
        log_mu: rows.iter().map(|x| x.0).collect(),
        n_vals: rows.iter().map(|x| x.1).collect(),
    })
}

impl CentralIndexProfile {
    pub fn write_csv(&self, w: impl Write) -> Result<(), WimanError> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| WimanError::Io(e.into());
        out.write_record(["r", "log_mu", "N"]).map_err(io)?;
        for i in 0..self.r_grid.len() {
            out.write_record([
                format!("{:e}", self.r_grid[i]),
                format!("{:e}", self.log_mu[i]),
                self.n_vals[i].to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn is_monotone(&self) -> bool {
        self.n_vals.windows(2).all(|w| w[0] <= w[1])
    }

    /// Largest violation of midpoint convexity of `ln μ` in `ln r` over
    /// consecutive triples (0 when convex).
    pub fn convexity_defect(&self) -> f64 {
        let x: Vec<f64> = self.r_grid.iter().map(|r| r.ln()).collect();
        (1..x.len().saturating_sub(1))
            .map(|i| {
                let t = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
                let chord = (1.0 - t) * self.log_mu[i - 1] + t * self.log_mu[i + 1];
                (self.log_mu[i] - chord).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// `N(r)^n / r` along the grid; a surrogate for `N(r)^n = o(r)`.
    pub fn power_ratio(&self, n: u32) -> Vec<f64> {
        self.r_grid
            .iter()
            .zip(&self.n_vals)
            .map(|(r, &k)| (k as f64).powi(n as i32) / r)
            .collect()
    }
}

/// Max of `ln N / ln r` over the top half of the grid.
pub fn central_index_order(p: &CentralIndexProfile) -> Result<f64, WimanError> {
    let lo = p.r_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = p.r_grid.iter().cloned().fold(0.0, f64::max);
    let decades = if lo > 0.0 { (hi / lo).log10() } else { 0.0 };
    if decades < 3.0 - 1e-9 {
        return Err(WimanError::InsufficientGrid { decades });
    }
    let start = p.r_grid.len() / 2;
    Ok(p.r_grid[start..]
        .iter()
        .zip(&p.n_vals[start..])
        .map(|(r, &k)| if k == 0 { 0.0 } else { (k as f64).ln() / r.ln() })
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WvRecord {
    pub r: f64,
    pub n: u32,
    pub theta: f64,
    pub central_index: usize,
    pub deviation: f64,
    /// `|f|` is constant to rounding on the circle; `theta` is then arbitrary.
    pub flat_modulus: bool,
}

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d);
        }
    }
    0.5 * (a + b)
}

/// `|f⁽ⁿ⁾(z*)/f(z*) · z*ⁿ/N(r)ⁿ − 1|` at a point `z*` of maximum modulus.
pub fn wv_ratio_check(f: &Expr, n: u32, r: f64) -> Result<WvRecord, WimanError> {
    let (_, big_n) = central_index(f, r, 1 << 16)?;
    wv_ratio_with_index(f, n, r, big_n)
}

/// As [`wv_ratio_check`] with the central index supplied.
pub fn wv_ratio_with_index(f: &Expr, n: u32, r: f64, big_n: usize) -> Result<WvRecord, WimanError> {
    check_analytic(f, r)?;
    let cfg = EvalConfig::survey();
    let samples = 1 << 12;
    let logm = |t: f64| {
        evaluate_with(f, Complex64::from_polar(r, t), &cfg)
            .map(|v| v.logmag())
            .unwrap_or(f64::NEG_INFINITY)
    };
    let vals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|j| logm(TAU * j as f64 / samples as f64))
        .collect();
    let (jmax, vmax) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
    let vmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let flat = vmax - vmin <= 1e-12 * vmax.abs().max(1.0);
    let step = TAU / samples as f64;
    let t0 = jmax as f64 * step;
    let theta = if flat { t0 } else { golden_max(logm, t0 - step, t0 + step, 1e-10) };
    let z = Complex64::from_polar(r, theta);
    let fz = evaluate_with(f, z, &cfg)?;
    let dn = evaluate_with(&nth_derivative(f, n), z, &cfg)?;
    let ratio = dn / fz * LogComplex::from_complex(z).powi(n as i32) / LogComplex::from_real(big_n as f64).powi(n as i32);
    let deviation = if big_n == 0 {
        f64::INFINITY
    } else {
        (ratio.to_complex()? - 1.0).norm()
    };
    Ok(WvRecord {
        r,
        n,
        theta,
        central_index: big_n,
        deviation,
        flat_modulus: flat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::PfTerm;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_series(d: u32) -> Expr {
        let mut coeffs = vec![c(1.0, 0.0)];
        for k in 1..=d {
            let prev = coeffs[k as usize - 1];
            coeffs.push(prev / k as f64);
        }
        Expr::polynomial(&coeffs)
    }

    #[test]
    fn polynomial_coefficients() {
        let f = Expr::polynomial(&[c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let t = taylor_coeffs(&f, 6, 1.0).unwrap();
        let v: Vec<Complex64> = t.coeffs.iter().map(|a| a.to_complex().unwrap()).collect();
        assert_relative_eq!((v[0] - 1.0).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((v[2] - 3.0).norm(), 0.0, epsilon = 1e-12);
        assert!(v[1].norm() < 1e-12 && v[3].norm() < 1e-12);
    }

    #[test]
    fn vieta_coefficient() {
        let f = Expr::factor_product(vec![c(4.0, 0.0), c(64.0, 0.0)]).unwrap();
        let t = taylor_coeffs(&f, 4, 2.0).unwrap();
        let a1 = t.coeffs[1].to_complex().unwrap();
        assert_relative_eq!(a1.re, 0.25 + 1.0 / 64.0, max_relative = 1e-12);
    }

    #[test]
    fn geometric_series() {
        let f = Expr::partial_fractions(vec![PfTerm::simple(c(-1.0, 0.0), c(1.0, 0.0))]).unwrap();
        let t = taylor_coeffs(&f, 20, 0.5).unwrap();
        for a in &t.coeffs {
            assert_relative_eq!((a.to_complex().unwrap() - 1.0).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn exp_central_index_tie() {
        let t = taylor_coeffs(&exp_series(40), 40, 5.0).unwrap();
        assert_eq!(max_term_central_index(&t, 5.0).unwrap().1, 5);
    }

    #[test]
    fn polynomial_central_index_is_degree() {
        let f = Expr::from_roots(1.0, &[c(1.0, 0.0), c(2.0, 1.0), c(-3.0, 0.0)]);
        assert_eq!(central_index(&f, 1e4, 256).unwrap().1, 3);
    }

    #[test]
    fn monomial_ratio_exact() {
        let rec = wv_ratio_check(&Expr::monomial(4), 1, 3.0).unwrap();
        assert!(rec.flat_modulus);
        assert!(rec.deviation < 1e-12);
    }

    #[test]
    fn exp_series_ratio() {
        let rec = wv_ratio_check(&exp_series(60), 1, 10.0).unwrap();
        assert!(rec.deviation < 0.1, "{rec:?}");
    }

    #[test]
    fn reconstruction_on_half_circle() {
        let f = Expr::factor_product(vec![c(3.0, 1.0), c(8.0, 0.0), c(20.0, -5.0)]).unwrap();
        let t = taylor_coeffs(&f, 8, 4.0).unwrap();
        for j in 0..16 {
            let z = Complex64::from_polar(2.0, j as f64);
            let want = f.eval(z).unwrap();
            assert!(crate::sampling::rel_distance(t.eval(z), want) < 1e-8);
        }
    }
}
