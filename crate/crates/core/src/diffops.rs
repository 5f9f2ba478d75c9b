//! Forward differences, divided differences and their asymptotics.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{self, evaluate_with, nth_derivative, EvalConfig, Expr, ExprError};
use crate::ext::BigComplex;
use crate::logc::LogComplex;
use crate::nevanlinna::{self, EpsilonSet};
use crate::sampling::{self, rel_distance, GridSpec};

#[derive(Debug, Error)]
pub enum DiffError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("no admissible sample point found after {attempts} attempts")]
    ResampleBudget { attempts: usize },
    #[error("estimated order {estimate:.3} exceeds the admissible limit {limit}")]
    OrderTooHigh { estimate: f64, limit: f64 },
    #[error("order estimate unavailable: {0}")]
    OrderUnknown(String),
    #[error("difference order must be at least 1")]
    ZeroOrder,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `Δⁿ base` as an expression tree.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceResult {
    pub expr: Expr,
    pub order_n: u32,
    pub base: Expr,
}

/// Builds `Δⁿf` by the recurrence `Δᵏ⁺¹f(z) = Δᵏf(z+1) − Δᵏf(z)`.
///
/// The tree has `2ⁿ` leaves referring to shared copies of `f`.
pub fn forward_difference(f: &Expr, n: u32) -> Result<DifferenceResult, DiffError> {
    if n == 0 {
        return Err(DiffError::ZeroOrder);
    }
    let mut d = f.clone();
    for _ in 0..n {
        d = d.shift(1.0) - d;
    }
    Ok(DifferenceResult {
        expr: d,
        order_n: n,
        base: f.clone(),
    })
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σₖ (−1)ⁿ⁻ᵏ C(n,k) f(z+k)` evaluated directly.
pub fn binomial_difference_eval(f: &Expr, n: u32, z: Complex64) -> Result<LogComplex, ExprError> {
    binomial_difference_eval_with(f, n, z, &EvalConfig::default())
}

pub fn binomial_difference_eval_with(
    f: &Expr,
    n: u32,
    z: Complex64,
    cfg: &EvalConfig,
) -> Result<LogComplex, ExprError> {
    let coeff = |k: u32| {
        let s = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        s * binom(n, k)
    };
    let ext = || -> Result<LogComplex, ExprError> {
        let bits = cfg.ext_bits;
        let zb = BigComplex::from_c64(z, bits);
        let mut acc = BigComplex::zero(bits);
        let mut max_ln = f64::NEG_INFINITY;
        for k in 0..=n {
            // shift in extended precision; z + k rounded to f64 is a different point
            let v = expr::eval_ext(f, &zb.add(&BigComplex::from_real(k as f64, bits)))?.scale(coeff(k));
            max_ln = max_ln.max(v.ln_abs());
            acc = acc.add(&v);
        }
        let budget = bits as f64 * std::f64::consts::LN_2 - 16.0 * std::f64::consts::LN_10;
        if !acc.is_zero() && acc.ln_abs() - max_ln < -budget {
            return Err(ExprError::PrecisionLoss {
                lost_digits: (max_ln - acc.ln_abs()) / std::f64::consts::LN_10,
            });
        }
        Ok(acc.to_log())
    };
    let mut vals = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let w = z + k as f64;
        match expr::evaluate_est(f, w, f64::EPSILON * w.norm(), cfg)? {
            Some((v, e)) => vals.push((v.scale_real(coeff(k)), e)),
            None => return ext(),
        }
    }
    match expr::combine_est(&vals, cfg) {
        Ok((v, _)) => Ok(v),
        Err(_) => ext(),
    }
}

/// `Δⁿf / f`.
pub fn divided_difference(f: &Expr, n: u32) -> Result<Expr, DiffError> {
    Ok(Expr::quotient(forward_difference(f, n)?.expr, f.clone()))
}

/// `|f(z+c) − f(z) − c f′(z)| / (|c|² |f″(z)| / 2)`.
///
/// Taylor's theorem makes this tend to 1 wherever `f″` dominates the
/// higher terms; it is reported as a ratio, not asserted against ½ sharply.
pub fn second_order_ratio(f: &Expr, z: Complex64, c: Complex64) -> Result<f64, ExprError> {
    let cfg = EvalConfig::default();
    let lhs = Expr::sum(vec![f.shift(c), f.scale(-1.0), f.derivative().scale(-c)]);
    let num = evaluate_with(&lhs, z, &cfg)?;
    let f2 = evaluate_with(&nth_derivative(f, 2), z, &cfg)?;
    Ok((num.logmag() - f2.logmag() - 2.0 * c.norm().ln() + 2f64.ln()).exp())
}

/// Where random comparison points are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRegion {
    /// Points are uniform in `|z| <= radius`.
    pub radius: f64,
    /// Minimum distance to any registered pole of the compared functions.
    pub pole_margin: f64,
    /// Attempts per accepted point before giving up.
    pub retries: usize,
}

impl Default for SampleRegion {
    fn default() -> Self {
        SampleRegion {
            radius: 10.0,
            pole_margin: 1e-3,
            retries: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub n: u32,
    pub samples: usize,
    pub max_rel_dev: f64,
    pub resampled: usize,
}

fn pole_locations(e: &Expr) -> Vec<Complex64> {
    e.registry().poles().map(|p| p.location).collect()
}

/// Compares `(Δⁿf)′` with `Δⁿ(f′)` at `samples` seeded random points.
pub fn check_commutation(
    f: &Expr,
    n: u32,
    samples: usize,
    region: &SampleRegion,
    seed: u64,
) -> Result<CommutationReport, DiffError> {
    // derivative of the difference tree against the binomial sum of f′
    let lhs = forward_difference(f, n)?.expr.derivative();
    let fd = f.derivative();
    let poles = pole_locations(&lhs);
    let mut rng = sampling::rng(seed);
    let cfg = EvalConfig::default();
    let mut worst: f64 = 0.0;
    let mut resampled = 0;
    for _ in 0..samples {
        let mut attempts = 0;
        loop {
            attempts += 1;
            if attempts > region.retries {
                return Err(DiffError::ResampleBudget { attempts });
            }
            let z = sampling::point_in_disc(&mut rng, region.radius);
            if poles.iter().any(|p| (z - p).norm() < region.pole_margin) {
                resampled += 1;
                continue;
            }
            let (a, b) = match (evaluate_with(&lhs, z, &cfg), binomial_difference_eval_with(&fd, n, z, &cfg)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(ExprError::PoleHit { .. }), _) | (_, Err(ExprError::PoleHit { .. })) => {
                    resampled += 1;
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            };
            worst = worst.max(rel_distance(a, b));
            break;
        }
    }
    Ok(CommutationReport {
        n,
        samples,
        max_rel_dev: worst,
        resampled,
    })
}

/// Sampling controls for [`asymptotic_difference_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticOptions {
    /// Known order of `f`; estimated from a growth profile when absent.
    pub order_estimate: Option<f64>,
    pub order_limit: f64,
    pub min_angles: usize,
    pub angles_per_unit_radius: f64,
    pub max_angles: usize,
    /// Directions `c = c_max e^{iπj/d}` sampled for the first difference.
    pub c_directions: usize,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        AsymptoticOptions {
            order_estimate: None,
            order_limit: 0.95,
            min_angles: 256,
            angles_per_unit_radius: 32.0,
            max_angles: 1 << 17,
            c_directions: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusRecord {
    pub r: f64,
    /// `None` when every sampled angle was excluded.
    pub max_dev: Option<f64>,
    pub excluded_fraction: f64,
    pub admitted: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub n: u32,
    pub c_max: f64,
    pub order_estimate: f64,
    pub records: Vec<RadiusRecord>,
}

impl AsymptoticReport {
    /// Per-radius maxima over the radii with admitted samples.
    pub fn deviations(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.max_dev).collect()
    }

    /// `(bottom-decile median, top-decile median)` of the per-radius maxima.
    pub fn decile_medians(&self) -> Option<(f64, f64)> {
        sampling::decile_medians(&self.deviations())
    }

    pub fn all_excluded(&self) -> Vec<f64> {
        self.records.iter().filter(|r| r.max_dev.is_none()).map(|r| r.r).collect()
    }

    pub fn write_csv(&self, w: impl Write) -> Result<(), DiffError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "max_dev", "excluded_fraction"]).map_err(csv_io)?;
        for rec in &self.records {
            let dev = rec.max_dev.map(|d| format!("{d:e}")).unwrap_or_default();
            out.write_record([format!("{:e}", rec.r), dev, format!("{}", rec.excluded_fraction)])
                .map_err(csv_io)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> DiffError {
    DiffError::Io(e.into())
}

fn admissible_order(f: &Expr, r_grid: &[f64], opts: &AsymptoticOptions) -> Result<f64, DiffError> {
    let est = match opts.order_estimate {
        Some(o) => o,
        None => {
            let hi = r_grid.iter().cloned().fold(0.0, f64::max);
            let lo = r_grid.iter().cloned().fold(f64::INFINITY, f64::min).min(hi / 1e3);
            let grid = GridSpec::geometric(lo, hi, 16).radii();
            let profile = nevanlinna::growth_profile(f, &grid)
                .map_err(|e| DiffError::OrderUnknown(e.to_string()))?;
            profile.order_est
        }
    };
    if est > opts.order_limit {
        return Err(DiffError::OrderTooHigh {
            estimate: est,
            limit: opts.order_limit,
        });
    }
    Ok(est)
}

/// Deviation from `Δⁿf ∼ f⁽ⁿ⁾` on circles, outside `eps`.
///
/// For `n = 1` the recorded quantity is `|(f(z+c) − f(z))/(c f′(z)) − 1|`
/// over `c = c_max e^{iπj/4}`; for `n ≥ 2` it is `|Δⁿf(z)/f⁽ⁿ⁾(z) − 1|`.
pub fn asymptotic_difference_check(
    f: &Expr,
    n: u32,
    c_max: f64,
    r_grid: &[f64],
    eps: &EpsilonSet,
    opts: &AsymptoticOptions,
) -> Result<AsymptoticReport, DiffError> {
    if n == 0 {
        return Err(DiffError::ZeroOrder);
    }
    let order = admissible_order(f, r_grid, opts)?;
    let dn = nth_derivative(f, n);
    let cfg = EvalConfig::survey();
    let cs: Vec<Complex64> = (0..opts.c_directions)
        .map(|j| Complex64::from_polar(c_max, std::f64::consts::PI * j as f64 / (opts.c_directions as f64 / 2.0)))
        .collect();
    let deviation = |z: Complex64| -> Result<f64, ExprError> {
        let deriv = evaluate_with(&dn, z, &cfg)?;
        if n == 1 {
            let fz = evaluate_with(f, z, &cfg)?;
            let mut worst: f64 = 0.0;
            for &c in &cs {
                let fc = evaluate_with(f, z + c, &cfg)?;
                let m = fz.logmag().max(fc.logmag());
                let diff = LogComplex::from_complex(fc.to_complex_scaled(m) - fz.to_complex_scaled(m));
                let q = LogComplex::new(diff.logmag() + m, diff.arg()) / (deriv * LogComplex::from_complex(c));
                worst = worst.max((q.to_complex()? - 1.0).norm());
            }
            Ok(worst)
        } else {
            let d = binomial_difference_eval_with(f, n, z, &cfg)?;
            Ok(((d / deriv).to_complex()? - 1.0).norm())
        }
    };
    let records = r_grid
        .par_iter()
        .map(|&r| {
            let m = ((opts.angles_per_unit_radius * r).ceil() as usize)
                .max(opts.min_angles)
                .min(opts.max_angles);
            let mut worst: Option<f64> = None;
            let mut excluded = 0;
            for j in 0..m {
                let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / m as f64);
                if eps.contains(z) {
                    excluded += 1;
                    continue;
                }
                match deviation(z) {
                    Ok(d) if d.is_finite() => worst = Some(worst.map_or(d, |w: f64| w.max(d))),
                    _ => excluded += 1,
                }
            }
            RadiusRecord {
                r,
                max_dev: worst,
                excluded_fraction: excluded as f64 / m as f64,
                admitted: m - excluded,
            }
        })
        .collect();
    Ok(AsymptoticReport {
        n,
        c_max,
        order_estimate: order,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, PfTerm};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn second_order_ratio_of_square_is_one() {
        let r = second_order_ratio(&Expr::monomial(2), c(3.0, -1.0), c(0.5, 0.5)).unwrap();
        assert_relative_eq!(r, 1.0, epsilon = 1e-12);
        // z³: remainder c³ + 3zc², f″ = 6z
        let (z, h) = (c(100.0, 20.0), c(1.0, 0.0));
        let want = (h * h * h + 3.0 * z * h * h).norm() / (3.0 * z.norm());
        assert_relative_eq!(second_order_ratio(&Expr::monomial(3), z, h).unwrap(), want, epsilon = 1e-10);
    }

    fn val(e: &Expr, z: Complex64) -> Complex64 {
        evaluate(e, z).unwrap().to_complex().unwrap()
    }

    #[test]
    fn first_difference_of_square() {
        let d = forward_difference(&Expr::monomial(2), 1).unwrap();
        for z in [c(0.3, -1.0), c(12.0, 5.0), c(-7.5, 0.25)] {
            let want = 2.0 * z + 1.0;
            assert_relative_eq!((val(&d.expr, z) - want).norm(), 0.0, epsilon = 1e-12 * want.norm());
        }
    }

    #[test]
    fn constant_differences_vanish() {
        let d = forward_difference(&Expr::constant(c(2.0, 3.0)), 3).unwrap();
        assert!(evaluate(&d.expr, c(0.4, 0.1)).unwrap().is_zero());
    }

    #[test]
    fn binomial_examples() {
        let v = binomial_difference_eval(&Expr::monomial(2), 2, c(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.to_complex().unwrap().re, 2.0, epsilon = 1e-14);
        for z in [c(1e3, 0.0), c(-4.0, 2.5)] {
            let v = binomial_difference_eval(&Expr::monomial(3), 3, z).unwrap();
            assert_relative_eq!(v.to_complex().unwrap().re, 6.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn divided_difference_of_square() {
        let g = divided_difference(&Expr::monomial(2), 1).unwrap();
        let z = c(1.5, -0.5);
        let want = (2.0 * z + 1.0) / (z * z);
        assert_relative_eq!((val(&g, z) - want).norm(), 0.0, epsilon = 1e-14);
        let reg = g.registry();
        assert_eq!(reg.poles().next().unwrap().multiplicity, 2);
        let one = divided_difference(&Expr::one(), 2).unwrap();
        assert!(evaluate(&one, z).unwrap().is_zero());
    }

    #[test]
    fn commutation_for_cubic_and_simple_pole() {
        let rep = check_commutation(&Expr::monomial(3), 2, 50, &SampleRegion::default(), 1).unwrap();
        assert!(rep.max_rel_dev < 1e-12, "{rep:?}");
        let g = Expr::partial_fractions(vec![PfTerm::simple(c(1.0, 0.0), c(0.5, 0.5))]).unwrap();
        let rep = check_commutation(&g, 1, 100, &SampleRegion::default(), 2).unwrap();
        assert!(rep.max_rel_dev < 1e-12, "{rep:?}");
    }

    #[test]
    fn zero_order_rejected() {
        assert!(matches!(forward_difference(&Expr::var(), 0), Err(DiffError::ZeroOrder)));
    }

    #[test]
    fn polynomial_deviation_decays() {
        let eps = EpsilonSet::default();
        let opts = AsymptoticOptions {
            order_estimate: Some(0.0),
            ..Default::default()
        };
        let rep = asymptotic_difference_check(&Expr::monomial(2), 1, 1.0, &[10.0, 100.0, 1000.0], &eps, &opts).unwrap();
        let d = rep.deviations();
        // (z+c)^2 - z^2 = c(2z + c): deviation |c|/(2r)
        for (dev, r) in d.iter().zip([10.0, 100.0, 1000.0]) {
            assert_relative_eq!(*dev, 1.0 / (2.0 * r), max_relative = 1e-6);
        }
    }

    #[test]
    fn order_guard() {
        let opts = AsymptoticOptions {
            order_estimate: Some(1.0),
            ..Default::default()
        };
        let r = asymptotic_difference_check(&Expr::var(), 1, 1.0, &[10.0], &EpsilonSet::default(), &opts);
        assert!(matches!(r, Err(DiffError::OrderTooHigh { .. })));
    }
}
