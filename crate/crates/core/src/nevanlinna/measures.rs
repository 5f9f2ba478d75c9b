use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{characteristic, NevanlinnaError};
use crate::expr::{evaluate_with, EvalConfig, Expr, ExprError, PointKind};

fn circle_values(e: &Expr, r: f64, n: usize) -> Result<Vec<crate::LogComplex>, ExprError> {
    let cfg = EvalConfig::survey();
    (0..n)
        .into_par_iter()
        .map(|j| evaluate_with(e, Complex64::from_polar(r, TAU * j as f64 / n as f64), &cfg))
        .collect()
}

/// Smallest `d_β` with
/// `|g′/g| <= d_β T(βr, g)/r + Σ_{|a|<βr} 2/|z − a|` at 2¹² points of `|z| = r`.
pub fn logderiv_bound(g: &Expr, r: f64, beta: f64) -> Result<f64, NevanlinnaError> {
    let reg = g.registry();
    if !reg.complete() {
        let kind = if reg.zeros_complete() { PointKind::Pole } else { PointKind::Zero };
        return Err(NevanlinnaError::IncompleteRegistry(kind));
    }
    let margin = 1e-4 * r;
    if let Some(e) = reg.entries().iter().find(|e| (e.location.norm() - r).abs() < margin) {
        return Err(match e.kind {
            PointKind::Pole => NevanlinnaError::PoleOnCircle { r },
            PointKind::Zero => NevanlinnaError::ZeroOnCircle { r },
        });
    }
    let t = characteristic(g, beta * r)?;
    let near: Vec<(Complex64, f64)> = reg
        .entries()
        .iter()
        .filter(|e| e.location.norm() < beta * r)
        .map(|e| (e.location, e.multiplicity as f64))
        .collect();
    let dg = g.derivative();
    let n = 1 << 12;
    let cfg = EvalConfig::survey();
    let worst = (0..n)
        .into_par_iter()
        .map(|j| -> Result<f64, NevanlinnaError> {
            let z = Complex64::from_polar(r, TAU * j as f64 / n as f64);
            let q = evaluate_with(&dg, z, &cfg)? / evaluate_with(g, z, &cfg)?;
            let s: f64 = near.iter().map(|(a, m)| 2.0 * m / (z - a).norm()).sum();
            Ok(q.abs() - s)
        })
        .collect::<Result<Vec<f64>, _>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if worst <= 0.0 {
        return Ok(0.0);
    }
    Ok(worst * r / t.max(f64::MIN_POSITIVE))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogDerivReport {
    pub beta: f64,
    pub radii: Vec<f64>,
    pub d_beta: Vec<f64>,
    pub first_half_max: f64,
    pub second_half_max: f64,
    /// The larger half-maximum over the smaller, each floored at 1e-12.
    pub ratio: f64,
    pub bounded: bool,
}

/// Fits `d_β` on every radius and compares the two halves of the grid.
pub fn logderiv_bound_check(g: &Expr, radii: &[f64], beta: f64) -> Result<LogDerivReport, NevanlinnaError> {
    let d: Vec<f64> = radii
        .iter()
        .map(|&r| logderiv_bound(g, r, beta))
        .collect::<Result<_, _>>()?;
    let half = d.len() / 2;
    let a = d[..half].iter().cloned().fold(0.0, f64::max);
    let b = d[half..].iter().cloned().fold(0.0, f64::max);
    let floor = 1e-12;
    let ratio = a.max(b).max(floor) / a.min(b).max(floor);
    Ok(LogDerivReport {
        beta,
        radii: radii.to_vec(),
        d_beta: d,
        first_half_max: a,
        second_half_max: b,
        ratio,
        bounded: ratio < 10.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilesRossi {
    pub r: f64,
    pub gamma: f64,
    /// Angular measure of `{θ : |z f′/f| > γ n(r, 1/f)}`.
    pub measure: f64,
    /// Sampling resolution `2π / 2¹⁴`.
    pub resolution: f64,
    pub zero_count: u32,
}

/// `((1 − γ) / (7M(ρ + 1)))²`.
pub fn miles_rossi_bound(gamma: f64, big_m: f64, rho: f64) -> f64 {
    ((1.0 - gamma) / (7.0 * big_m * (rho + 1.0))).powi(2)
}

/// Measure of the angles on `|z| = r` where `|z f′(z)/f(z)| > γ n(r, 1/f)`.
pub fn miles_rossi_measure(f: &Expr, r: f64, gamma: f64) -> Result<MilesRossi, NevanlinnaError> {
    let reg = f.registry();
    if reg.poles().next().is_some() || !reg.poles_complete() {
        return Err(NevanlinnaError::NotEntire);
    }
    if !reg.zeros_complete() {
        return Err(NevanlinnaError::IncompleteRegistry(PointKind::Zero));
    }
    let n = reg.count_in_disk(PointKind::Zero, r);
    if n == 0 {
        return Err(NevanlinnaError::NoZeros { r });
    }
    let samples = 1 << 14;
    let dvals = circle_values(&f.derivative(), r, samples)?;
    let fvals = circle_values(f, r, samples)?;
    let level = (gamma * n as f64).ln();
    let hits = dvals
        .iter()
        .zip(&fvals)
        .filter(|(d, v)| {
            if v.is_zero() {
                return true;
            }
            d.logmag() - v.logmag() + r.ln() > level
        })
        .count();
    let resolution = TAU / samples as f64;
    Ok(MilesRossi {
        r,
        gamma,
        measure: hits as f64 * resolution,
        resolution,
        zero_count: n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcTheta {
    pub r: f64,
    /// Length of the longest arc of `{θ : |H(re^{iθ})| > 1}`.
    pub theta: f64,
    /// Set when the minimum modulus on the circle exceeds 1.
    pub min_modulus_flag: bool,
    pub log_min_modulus: f64,
}

/// Longest arc of `|z| = r` on which `|H| > 1`.
pub fn arc_theta(h: &Expr, r: f64) -> Result<ArcTheta, NevanlinnaError> {
    let reg = h.registry();
    if reg.zeros().any(|e| (e.location.norm() - r).abs() < 1e-9 * r.max(1.0)) {
        return Err(NevanlinnaError::ZeroOnCircle { r });
    }
    let n = 1 << 14;
    let vals = circle_values(h, r, n)?;
    if vals.iter().any(|v| v.is_zero()) {
        return Err(NevanlinnaError::ZeroOnCircle { r });
    }
    let logs: Vec<f64> = vals.iter().map(|v| v.logmag()).collect();
    let log_min = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    if log_min > 0.0 {
        return Ok(ArcTheta {
            r,
            theta: TAU,
            min_modulus_flag: true,
            log_min_modulus: log_min,
        });
    }
    let step = TAU / n as f64;
    let cfg = EvalConfig::survey();
    let above = |t: f64| -> Result<bool, NevanlinnaError> {
        Ok(evaluate_with(h, Complex64::from_polar(r, t), &cfg)?.logmag() > 0.0)
    };
    // boundary crossing between an inside sample `a` and outside sample `b`
    let refine = |a: f64, b: f64| -> Result<f64, NevanlinnaError> {
        let (mut inside, mut outside) = (a, b);
        while (outside - inside).abs() > TAU / (1u64 << 20) as f64 {
            let mid = 0.5 * (inside + outside);
            if above(mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(0.5 * (inside + outside))
    };
    let ins: Vec<bool> = logs.iter().map(|&l| l > 0.0).collect();
    let first_out = ins.iter().position(|&b| !b).expect("minimum is at most 1");
    let mut best: f64 = 0.0;
    let mut j = 0;
    // walk the circle starting at an outside sample so arcs never wrap
    while j < n {
        let idx = (first_out + j) % n;
        if !ins[idx] {
            j += 1;
            continue;
        }
        let start = j;
        while j < n && ins[(first_out + j) % n] {
            j += 1;
        }
        let t0 = (first_out + start) as f64 * step;
        let t1 = (first_out + j - 1) as f64 * step;
        let a = refine(t0, t0 - step)?;
        let b = refine(t1, t1 + step)?;
        best = best.max(b - a);
    }
    Ok(ArcTheta {
        r,
        theta: best.min(TAU),
        min_modulus_flag: false,
        log_min_modulus: log_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_logderiv_is_dominated() {
        assert_eq!(logderiv_bound(&Expr::var(), 5.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_logderiv_bounded() {
        let g = Expr::from_roots(1.0, &[c(1.0, 0.0), c(2.0, 0.0)]);
        let radii = crate::sampling::GridSpec::geometric(10.0, 1e4, 8).radii();
        let rep = logderiv_bound_check(&g, &radii, 2.0).unwrap();
        assert!(rep.bounded, "{rep:?}");
    }

    #[test]
    fn zero_near_circle_is_rejected() {
        let g = Expr::linear_factor(1.0 + 1e-6);
        assert!(matches!(logderiv_bound(&g, 1.0, 2.0), Err(NevanlinnaError::ZeroOnCircle { .. })));
    }

    #[test]
    fn monomial_full_circle() {
        let mr = miles_rossi_measure(&Expr::monomial(3), 2.0, 0.5).unwrap();
        assert_relative_eq!(mr.measure, TAU, epsilon = 1e-12);
        assert_eq!(mr.zero_count, 3);
        let f = Expr::linear_factor(5.0);
        assert!(matches!(miles_rossi_measure(&f, 2.0, 0.5), Err(NevanlinnaError::NoZeros { .. })));
    }

    #[test]
    fn arc_examples() {
        let a = arc_theta(&Expr::var(), 2.0).unwrap();
        assert!(a.min_modulus_flag);
        assert_eq!(a.theta, TAU);
        let b = arc_theta(&Expr::linear_factor(2.0), 1.0).unwrap();
        assert!(!b.min_modulus_flag);
        assert!((b.theta - TAU).abs() < 1e-5, "{}", b.theta);
        // |z| < 1 arc of z on the unit circle... use r = 1.5 with H = z - 1: |H| > 1 off an arc near θ = 0
        let h = arc_theta(&Expr::linear_factor(1.0), 1.5).unwrap();
        // |1.5 e^{iθ} - 1| = 1  ⇔  cos θ = 0.75
        let want = TAU - 2.0 * 0.75f64.acos();
        assert!((h.theta - want).abs() < 1e-5, "{} vs {want}", h.theta);
        assert!(h.theta < TAU);
    }
}
