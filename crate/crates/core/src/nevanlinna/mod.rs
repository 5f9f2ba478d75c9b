//! Nevanlinna functionals, growth profiles, exceptional radius sets and
//! the angular statistics used with them.

mod epsilon;
mod measures;

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{evaluate_with, EvalConfig, Expr, ExprError, PointKind, PoleZeroRegistry};
use crate::sampling;

pub use epsilon::{
    build_epsilon_set, circle_avoidance, log_density, pole_coincidence_set, shadow_set, Disc, EpsilonSet, RadialSet,
    RadiusRule,
};
pub use measures::{
    arc_theta, logderiv_bound, logderiv_bound_check, miles_rossi_bound, miles_rossi_measure, ArcTheta, LogDerivReport,
    MilesRossi,
};

#[derive(Debug, Error)]
pub enum NevanlinnaError {
    #[error("circle |z| = {r} passes within the margin of a pole")]
    PoleOnCircle { r: f64 },
    #[error("circle |z| = {r} passes within the margin of a zero")]
    ZeroOnCircle { r: f64 },
    #[error("quadrature did not settle: last estimates {last} and {previous}")]
    NonConvergent { last: f64, previous: f64 },
    #[error("registry is incomplete for the requested {0:?} count")]
    IncompleteRegistry(PointKind),
    #[error("grid of {points} points over {decades:.2} decades is too coarse")]
    InsufficientGrid { points: usize, decades: f64 },
    #[error("no pole-free radius within 2% of {r}")]
    NoAdmissibleRadius { r: f64 },
    #[error("no zeros in |z| <= {r}")]
    NoZeros { r: f64 },
    #[error("function has poles; an entire function is required")]
    NotEntire,
    #[error("exclusion sum diverges for this registry")]
    DivergentEpsilonSum { set: Box<EpsilonSet> },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn csv_err(e: csv::Error) -> NevanlinnaError {
    NevanlinnaError::Io(e.into())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProximityOptions {
    pub min_points: usize,
    pub max_points: usize,
    /// Doubling stops once successive estimates differ by less than
    /// `tol * max(1, m)`.
    pub tol: f64,
    /// At `max_points`, a last step larger than `accept * max(1, m)` is an error.
    pub accept: f64,
    /// Poles closer than `margin * r` to the circle are rejected.
    pub margin: f64,
}

impl Default for ProximityOptions {
    fn default() -> Self {
        ProximityOptions {
            min_points: 64,
            max_points: 1 << 16,
            tol: 1e-9,
            accept: 1e-4,
            margin: 1e-9,
        }
    }
}

/// `m(r, f)` with the default options.
pub fn proximity(f: &Expr, r: f64) -> Result<f64, NevanlinnaError> {
    proximity_with(f, r, &ProximityOptions::default())
}

/// Circle mean of `log⁺|f|` by the periodic trapezoid rule with point doubling.
pub fn proximity_with(f: &Expr, r: f64, opts: &ProximityOptions) -> Result<f64, NevanlinnaError> {
    let reg = f.registry();
    if reg.poles().any(|p| (p.location.norm() - r).abs() < opts.margin * r) {
        return Err(NevanlinnaError::PoleOnCircle { r });
    }
    let cfg = EvalConfig::survey();
    let at = |theta: f64| -> Result<f64, NevanlinnaError> {
        match evaluate_with(f, Complex64::from_polar(r, theta), &cfg) {
            Ok(v) => Ok(v.log_plus()),
            Err(ExprError::PoleHit { .. }) => Err(NevanlinnaError::PoleOnCircle { r }),
            Err(e) => Err(e.into()),
        }
    };
    let mut n = opts.min_points.max(4);
    let mut sum: f64 = (0..n)
        .into_par_iter()
        .map(|j| at(std::f64::consts::TAU * j as f64 / n as f64))
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .sum();
    let mut est = sum / n as f64;
    loop {
        // new points are the midpoints of the previous grid
        let add: f64 = (0..n)
            .into_par_iter()
            .map(|j| at(std::f64::consts::TAU * (j as f64 + 0.5) / n as f64))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .sum();
        sum += add;
        n *= 2;
        let next = sum / n as f64;
        let delta = (next - est).abs();
        let scale = next.abs().max(1.0);
        if delta < opts.tol * scale {
            return Ok(next);
        }
        if n >= opts.max_points {
            if delta < opts.accept * scale {
                return Ok(next);
            }
            return Err(NevanlinnaError::NonConvergent { last: next, previous: est });
        }
        est = next;
    }
}

/// Integrated counting function `N(r)` of the zeros or poles in `reg`.
pub fn counting_integrated(reg: &PoleZeroRegistry, r: f64, kind: PointKind) -> Result<f64, NevanlinnaError> {
    let complete = match kind {
        PointKind::Zero => reg.zeros_complete(),
        PointKind::Pole => reg.poles_complete(),
    };
    if !complete {
        return Err(NevanlinnaError::IncompleteRegistry(kind));
    }
    Ok(reg
        .of_kind(kind)
        .filter(|e| e.location.norm() <= r)
        .map(|e| {
            let a = e.location.norm();
            let m = e.multiplicity as f64;
            if a == 0.0 {
                m * r.ln()
            } else {
                m * (r / a).ln()
            }
        })
        .sum())
}

/// `T(r, f) = m(r, f) + N(r, f)`.
pub fn characteristic(f: &Expr, r: f64) -> Result<f64, NevanlinnaError> {
    let reg = f.registry();
    Ok(proximity(f, r)? + counting_integrated(&reg, r, PointKind::Pole)?)
}

/// Picks a radius within ±2% of `r` whose circle keeps clear of `moduli`.
///
/// `r` itself is kept when every modulus is at least `min(0.25, r/200)`
/// away; otherwise the candidate on a 401-point scan of the window that is
/// farthest from every modulus is used.
pub fn admissible_radius(r: f64, moduli: &[f64]) -> Result<f64, NevanlinnaError> {
    let need = (0.25f64).min(r / 200.0);
    let clearance = |x: f64| moduli.iter().map(|&s| (s - x).abs()).fold(f64::INFINITY, f64::min);
    if clearance(r) >= need {
        return Ok(r);
    }
    let (best, clear) = (0..=400)
        .map(|i| {
            let x = r * (0.98 + 0.04 * i as f64 / 400.0);
            (x, clearance(x))
        })
        .fold((r, clearance(r)), |acc, c| if c.1 > acc.1 { c } else { acc });
    if clear < 1e-6 * r {
        return Err(NevanlinnaError::NoAdmissibleRadius { r });
    }
    Ok(best)
}

fn pole_moduli(reg: &PoleZeroRegistry) -> Vec<f64> {
    reg.poles().map(|p| p.location.norm()).collect()
}

/// `m`, `N`, `T` on a radius grid with order and lower-order estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub r_grid: Vec<f64>,
    pub m_vals: Vec<f64>,
    pub n_vals: Vec<f64>,
    pub t_vals: Vec<f64>,
    pub order_est: f64,
    pub lower_order_est: f64,
    /// Mean `ln(r_{i+1}/r_i)` of the grid.
    pub log_spacing: f64,
    /// `(requested, used)` for radii moved off pole circles.
    pub perturbed: Vec<(f64, f64)>,
}

fn grid_check(radii: &[f64]) -> Result<(), NevanlinnaError> {
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    let decades = if lo > 0.0 { (hi / lo).log10() } else { 0.0 };
    if radii.len() < 16 || decades < 3.0 - 1e-9 {
        return Err(NevanlinnaError::InsufficientGrid {
            points: radii.len(),
            decades,
        });
    }
    Ok(())
}

/// Growth profile of `f`; needs a complete pole registry and a grid of at
/// least 16 radii spanning three decades.
pub fn growth_profile(f: &Expr, radii: &[f64]) -> Result<GrowthProfile, NevanlinnaError> {
    grid_check(radii)?;
    let reg = f.registry();
    if !reg.poles_complete() {
        return Err(NevanlinnaError::IncompleteRegistry(PointKind::Pole));
    }
    let moduli = pole_moduli(&reg);
    let used: Vec<f64> = radii
        .iter()
        .map(|&r| admissible_radius(r, &moduli))
        .collect::<Result<_, _>>()?;
    let rows: Vec<(f64, f64)> = used
        .iter()
        .map(|&r| Ok((proximity(f, r)?, counting_integrated(&reg, r, PointKind::Pole)?)))
        .collect::<Result<_, NevanlinnaError>>()?;
    let m_vals: Vec<f64> = rows.iter().map(|x| x.0).collect();
    let n_vals: Vec<f64> = rows.iter().map(|x| x.1).collect();
    let t_vals: Vec<f64> = rows.iter().map(|x| x.0 + x.1).collect();
    let perturbed = radii
        .iter()
        .zip(&used)
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (*a, *b))
        .collect();
    let log_spacing = if used.len() > 1 {
        (used[used.len() - 1] / used[0]).ln() / (used.len() - 1) as f64
    } else {
        0.0
    };
    let mut p = GrowthProfile {
        r_grid: used,
        m_vals,
        n_vals,
        t_vals,
        order_est: 0.0,
        lower_order_est: 0.0,
        log_spacing,
        perturbed,
    };
    let (o, l) = order_estimate(&p)?;
    p.order_est = o;
    p.lower_order_est = l;
    Ok(p)
}

/// `(max, min)` of `ln T / ln r` over the top half of the grid; `T` is
/// floored at 1 so bounded characteristics give 0.
pub fn order_estimate(p: &GrowthProfile) -> Result<(f64, f64), NevanlinnaError> {
    grid_check(&p.r_grid)?;
    let start = p.r_grid.len() / 2;
    let ratios: Vec<f64> = p.r_grid[start..]
        .iter()
        .zip(&p.t_vals[start..])
        .map(|(r, t)| t.max(1.0).ln() / r.ln())
        .collect();
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((hi, lo))
}

impl GrowthProfile {
    pub fn write_csv(&self, w: impl Write) -> Result<(), NevanlinnaError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "m", "N", "T"]).map_err(csv_err)?;
        for i in 0..self.r_grid.len() {
            out.write_record([
                format!("{:e}", self.r_grid[i]),
                format!("{:e}", self.m_vals[i]),
                format!("{:e}", self.n_vals[i]),
                format!("{:e}", self.t_vals[i]),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Largest relative drop of `T` between consecutive radii (0 if monotone).
    pub fn monotonicity_defect(&self) -> f64 {
        self.t_vals
            .windows(2)
            .map(|w| ((w[0] - w[1]) / w[0].abs().max(1.0)).max(0.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeldyshReport {
    pub radii: Vec<f64>,
    pub sums: Vec<f64>,
    pub bottom_median: f64,
    pub top_median: f64,
    pub decreasing: bool,
    pub final_value: f64,
}

/// `m(r, f) + m(r, g)` along `radii`, each radius moved off the pole
/// circles of both functions.
pub fn keldysh_check(f: &Expr, g: &Expr, radii: &[f64]) -> Result<KeldyshReport, NevanlinnaError> {
    let mut moduli = pole_moduli(&f.registry());
    moduli.extend(pole_moduli(&g.registry()));
    let used: Vec<f64> = radii
        .iter()
        .map(|&r| admissible_radius(r, &moduli))
        .collect::<Result<_, _>>()?;
    let sums: Vec<f64> = used
        .iter()
        .map(|&r| Ok(proximity(f, r)? + proximity(g, r)?))
        .collect::<Result<_, NevanlinnaError>>()?;
    let (bottom, top) = sampling::decile_medians(&sums).unwrap_or((f64::NAN, f64::NAN));
    Ok(KeldyshReport {
        final_value: *sums.last().unwrap_or(&f64::NAN),
        decreasing: top < bottom,
        bottom_median: bottom,
        top_median: top,
        radii: used,
        sums,
    })
}
