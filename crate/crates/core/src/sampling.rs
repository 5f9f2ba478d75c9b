//! Radius grids, seeded sampling and comparison helpers shared by the
//! numerical modules.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::logc::LogComplex;

/// Radius grid specification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "yes")]
    pub geometric: bool,
}

fn yes() -> bool {
    true
}

impl GridSpec {
    pub fn geometric(min: f64, max: f64, points: usize) -> Self {
        GridSpec {
            min,
            max,
            points,
            geometric: true,
        }
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        GridSpec {
            min,
            max,
            points,
            geometric: false,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    if self.geometric {
                        (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                    } else {
                        self.min + t * (self.max - self.min)
                    }
                })
                .collect(),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the disc `|z| <= radius`.
pub fn point_in_disc(rng: &mut impl Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, t)
}

/// `|a - b| / max(|a|, |b|)`, computed without leaving log form for the scale.
pub fn rel_distance(a: LogComplex, b: LogComplex) -> f64 {
    if a.is_zero() && b.is_zero() {
        return 0.0;
    }
    let m = a.logmag().max(b.logmag());
    let x = a.to_complex_scaled(m);
    let y = b.to_complex_scaled(m);
    (x - y).norm() / x.norm().max(y.norm())
}

/// Median of a slice (NaN-free); `None` when empty.
pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    Some(if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    })
}

/// Bottom and top decile medians of a grid-ordered series (at least one
/// point each).
pub fn decile_medians(v: &[f64]) -> Option<(f64, f64)> {
    if v.len() < 2 {
        return None;
    }
    let k = (v.len() / 10).max(1);
    Some((median(&v[..k])?, median(&v[v.len() - k..])?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid_endpoints() {
        let g = GridSpec::geometric(10.0, 1000.0, 3).radii();
        assert!((g[0] - 10.0).abs() < 1e-12);
        assert!((g[1] - 100.0).abs() < 1e-9);
        assert!((g[2] - 1000.0).abs() < 1e-9);
        assert_eq!(GridSpec::linear(0.0, 1.0, 5).radii()[2], 0.5);
    }

    #[test]
    fn deciles() {
        let v: Vec<f64> = (0..20).map(|i| i as f64).collect();
        assert_eq!(decile_medians(&v), Some((0.5, 18.5)));
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
    }

    #[test]
    fn rel_distance_scale_free() {
        let a = LogComplex::new(900.0, 0.1);
        let b = LogComplex::new(900.0 + 1e-6, 0.1);
        assert!((rel_distance(a, b) - 1e-6).abs() < 1e-9);
        assert_eq!(rel_distance(LogComplex::ZERO, LogComplex::ZERO), 0.0);
    }
}
