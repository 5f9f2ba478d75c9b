use std::f64::consts::E;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NevanlinnaError;
use crate::expr::{PointKind, PoleZeroRegistry};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

/// A finite union of discs used as an exclusion region.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSet {
    discs: Vec<Disc>,
    relative_sum: f64,
}

impl EpsilonSet {
    pub fn from_discs(mut discs: Vec<Disc>) -> Self {
        discs.sort_by(|a, b| a.center.norm().total_cmp(&b.center.norm()));
        let relative_sum = discs
            .iter()
            .filter(|d| d.center.norm() > 0.0)
            .map(|d| d.radius / d.center.norm())
            .sum();
        EpsilonSet { discs, relative_sum }
    }

    pub fn discs(&self) -> &[Disc] {
        &self.discs
    }

    /// `Σ r_j / |b_j|` over discs with nonzero centre.
    pub fn relative_sum(&self) -> f64 {
        self.relative_sum
    }

    pub fn contains(&self, z: Complex64) -> bool {
        // discs are sorted by centre modulus; only those whose shadow can
        // reach |z| need checking
        let r = z.norm();
        self.discs
            .iter()
            .filter(|d| (d.center.norm() - r).abs() <= d.radius)
            .any(|d| (z - d.center).norm() < d.radius)
    }

    pub fn union(&self, other: &EpsilonSet) -> EpsilonSet {
        let mut d = self.discs.clone();
        d.extend_from_slice(&other.discs);
        EpsilonSet::from_discs(d)
    }

    pub fn len(&self) -> usize {
        self.discs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discs.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum RadiusRule {
    /// `B(a, 2h)` around every point.
    Exclusion,
    /// `B(a, |a| / (log|a|)^(alpha+1))` for `|a| > e`.
    Gundersen { alpha: f64 },
}

/// Slope of `log n(t)` against `log t` over the outer half of the moduli.
fn counting_exponent(moduli: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = moduli
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(i, &m)| (m.ln(), ((i + 1) as f64).ln()))
        .collect();
    if pts.len() < 8 {
        return None;
    }
    let tail = &pts[pts.len() / 2..];
    let (x0, y0) = tail[0];
    let (x1, y1) = tail[tail.len() - 1];
    if x1 - x0 <= 1e-12 {
        return None;
    }
    Some((y1 - y0) / (x1 - x0))
}

/// Discs around every registered point of `reg`.
///
/// With the exclusion rule, a registry whose counting function grows at
/// least linearly (so that `Σ 1/|a_k|` would diverge for its continuation)
/// is reported as [`NevanlinnaError::DivergentEpsilonSum`] carrying the set.
pub fn build_epsilon_set(reg: &PoleZeroRegistry, rule: RadiusRule, h: f64) -> Result<EpsilonSet, NevanlinnaError> {
    let mut discs = Vec::new();
    let mut moduli = Vec::new();
    for e in reg.entries() {
        let a = e.location.norm();
        for _ in 0..e.multiplicity {
            moduli.push(a);
        }
        let radius = match rule {
            RadiusRule::Exclusion => 2.0 * h,
            RadiusRule::Gundersen { alpha } => {
                if a <= E {
                    continue;
                }
                a / a.ln().powf(alpha + 1.0)
            }
        };
        discs.push(Disc {
            center: e.location,
            radius,
        });
    }
    let set = EpsilonSet::from_discs(discs);
    if rule == RadiusRule::Exclusion && counting_exponent(&moduli).is_some_and(|s| s >= 1.0) {
        return Err(NevanlinnaError::DivergentEpsilonSum { set: Box::new(set) });
    }
    Ok(set)
}

/// A set of radii in `[lo, hi]`, kept as an exact sorted interval list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSet {
    pub lo: f64,
    pub hi: f64,
    pub intervals: Vec<(f64, f64)>,
}

fn merge(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.retain(|(a, b)| b > a);
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

impl RadialSet {
    pub fn new(lo: f64, hi: f64, intervals: Vec<(f64, f64)>) -> Self {
        let clipped = intervals.into_iter().map(|(a, b)| (a.max(lo), b.min(hi))).collect();
        RadialSet {
            lo,
            hi,
            intervals: merge(clipped),
        }
    }

    pub fn full(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, vec![(lo, hi)])
    }

    pub fn complement(&self) -> RadialSet {
        let mut out = Vec::new();
        let mut cur = self.lo;
        for &(a, b) in &self.intervals {
            if a > cur {
                out.push((cur, a));
            }
            cur = cur.max(b);
        }
        if cur < self.hi {
            out.push((cur, self.hi));
        }
        RadialSet::new(self.lo, self.hi, out)
    }

    pub fn contains(&self, r: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| r >= a && r <= b)
    }

    /// Lebesgue measure of the part inside `[a, b]`.
    pub fn measure(&self, a: f64, b: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(x, y)| (y.min(b) - x.max(a)).max(0.0))
            .sum()
    }

    /// `∫ dt/t` over the part inside `[a, b]` (`a > 0`).
    pub fn log_measure(&self, a: f64, b: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(x, y)| {
                let lo = x.max(a);
                let hi = y.min(b);
                if hi > lo && lo > 0.0 {
                    (hi / lo).ln()
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Grid indicator for reporting.
    pub fn indicator(&self, grid: &[f64]) -> Vec<bool> {
        grid.iter().map(|&r| self.contains(r)).collect()
    }
}

/// Radii in `[lo, hi]` whose circle meets some disc of `eps`.
pub fn shadow_set(eps: &EpsilonSet, lo: f64, hi: f64) -> RadialSet {
    let iv = eps
        .discs()
        .iter()
        .map(|d| {
            let m = d.center.norm();
            ((m - d.radius).max(0.0), m + d.radius)
        })
        .collect();
    RadialSet::new(lo, hi, iv)
}

/// Radii in `[min(grid), max(grid)]` whose circle meets no disc of `eps`.
pub fn circle_avoidance(eps: &EpsilonSet, r_grid: &[f64]) -> RadialSet {
    let lo = r_grid.iter().cloned().fold(f64::INFINITY, f64::min).min(1.0);
    let hi = r_grid.iter().cloned().fold(0.0, f64::max);
    shadow_set(eps, lo, hi).complement()
}

/// Lower and upper logarithmic density surrogates at `r`.
///
/// `D(t) = (1/log t) ∫_[1,t] 1_S du/u` is evaluated at `tail` geometric
/// points of `[sqrt(r), r]` (the tail of `[1, r]` in logarithmic scale);
/// the result is the minimum and maximum.
pub fn log_density(s: &RadialSet, r: f64, tail: usize) -> (f64, f64) {
    let lo = r.sqrt().max(E);
    let n = tail.max(1);
    let mut min: f64 = 1.0;
    let mut max: f64 = 0.0;
    for i in 0..n {
        let t = if n == 1 {
            r
        } else {
            (lo.ln() + (r.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
        };
        let d = (s.log_measure(1.0, t) / t.ln()).clamp(0.0, 1.0);
        min = min.min(d);
        max = max.max(d);
    }
    (min, max)
}

/// Radii `r ∈ [R/2, R]` with no pole modulus in `(r − 1, r]`.
pub fn pole_coincidence_set(reg: &PoleZeroRegistry, big_r: f64) -> Result<RadialSet, NevanlinnaError> {
    if !reg.poles_complete() {
        return Err(NevanlinnaError::IncompleteRegistry(PointKind::Pole));
    }
    let lo = big_r / 2.0;
    let bad = reg.poles().map(|p| {
        let s = p.location.norm();
        (s, s + 1.0)
    });
    Ok(RadialSet::new(lo, big_r, bad.collect()).complement())
}
