//! Argument-principle counting on circles and rectangles, and quadtree zero
//! localization.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{evaluate_with, EvalConfig, Expr, ExprError, PoleZeroRegistry};
use crate::logc::wrap_angle;

#[derive(Debug, Error)]
pub enum ContourError {
    #[error("zero or pole within the safety margin of the contour near {point}")]
    BoundaryHit { point: Complex64 },
    #[error("phase refinement exhausted {samples} samples")]
    NonConvergent { samples: usize },
    #[error("winding residual {residual:.3} turns is not near an integer")]
    NonInteger { residual: f64 },
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("pole set inside the contour is not known; supply it explicitly")]
    IncompleteRegistry,
    #[error(transparent)]
    Expr(ExprError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Circle { center: Complex64, radius: f64 },
    /// Axis-aligned, `lo` the lower-left and `hi` the upper-right corner.
    Rect { lo: Complex64, hi: Complex64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub shape: Shape,
    pub orientation: Orientation,
}

fn seg_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

impl Contour {
    pub fn circle(center: Complex64, radius: f64) -> Result<Self, ContourError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(ContourError::InvalidContour(format!("radius {radius}")));
        }
        Ok(Contour {
            shape: Shape::Circle { center, radius },
            orientation: Orientation::Positive,
        })
    }

    pub fn rect(lo: Complex64, hi: Complex64) -> Result<Self, ContourError> {
        if !(hi.re > lo.re && hi.im > lo.im) {
            return Err(ContourError::InvalidContour(format!("rectangle {lo} .. {hi}")));
        }
        Ok(Contour {
            shape: Shape::Rect { lo, hi },
            orientation: Orientation::Positive,
        })
    }

    pub fn reversed(&self) -> Self {
        Contour {
            shape: self.shape,
            orientation: match self.orientation {
                Orientation::Positive => Orientation::Negative,
                Orientation::Negative => Orientation::Positive,
            },
        }
    }

    /// Radius of a circle, longest side of a rectangle.
    pub fn scale(&self) -> f64 {
        match self.shape {
            Shape::Circle { radius, .. } => radius,
            Shape::Rect { lo, hi } => (hi.re - lo.re).max(hi.im - lo.im),
        }
    }

    fn corners(lo: Complex64, hi: Complex64) -> [Complex64; 4] {
        [lo, Complex64::new(hi.re, lo.im), hi, Complex64::new(lo.re, hi.im)]
    }

    /// Point at parameter `t ∈ [0, 1)` along the positively oriented curve.
    fn point_positive(&self, t: f64) -> Complex64 {
        match self.shape {
            Shape::Circle { center, radius } => center + Complex64::from_polar(radius, TAU * t),
            Shape::Rect { lo, hi } => {
                let w = hi.re - lo.re;
                let h = hi.im - lo.im;
                let per = 2.0 * (w + h);
                let s = (t.rem_euclid(1.0)) * per;
                let c = Self::corners(lo, hi);
                if s < w {
                    c[0] + s
                } else if s < w + h {
                    c[1] + Complex64::new(0.0, s - w)
                } else if s < 2.0 * w + h {
                    c[2] - (s - w - h)
                } else {
                    c[3] - Complex64::new(0.0, s - 2.0 * w - h)
                }
            }
        }
    }

    pub fn point(&self, t: f64) -> Complex64 {
        match self.orientation {
            Orientation::Positive => self.point_positive(t),
            Orientation::Negative => self.point_positive(1.0 - t),
        }
    }

    pub fn distance(&self, p: Complex64) -> f64 {
        match self.shape {
            Shape::Circle { center, radius } => ((p - center).norm() - radius).abs(),
            Shape::Rect { lo, hi } => {
                let c = Self::corners(lo, hi);
                (0..4).map(|i| seg_distance(p, c[i], c[(i + 1) % 4])).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Strictly inside (points on the curve are excluded).
    pub fn encloses(&self, p: Complex64) -> bool {
        match self.shape {
            Shape::Circle { center, radius } => (p - center).norm() < radius,
            Shape::Rect { lo, hi } => p.re > lo.re && p.re < hi.re && p.im > lo.im && p.im < hi.im,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    /// Zeros minus poles inside, with multiplicity.
    pub net: i64,
    pub phase_steps: usize,
    /// Whether any segment needed subdivision beyond the initial sampling.
    pub refined: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingOptions {
    pub initial_samples: usize,
    pub max_samples: usize,
    /// Registered points closer than `margin * scale` to the curve are rejected.
    pub margin: f64,
    /// Largest accepted change of `arg f` between neighbouring samples.
    pub max_step: f64,
    /// Largest accepted change of `ln|f|` between neighbouring samples.
    pub max_log_step: f64,
    pub eval: EvalConfig,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            initial_samples: 128,
            max_samples: 1 << 20,
            margin: 1e-9,
            max_step: PI / 2.0,
            max_log_step: 2.0,
            eval: EvalConfig::survey(),
        }
    }
}

pub fn winding_count(f: &Expr, c: &Contour) -> Result<CountResult, ContourError> {
    winding_count_with(f, c, &WindingOptions::default())
}

fn boundary_or(e: ExprError, z: Complex64) -> ContourError {
    match e {
        ExprError::PoleHit { .. } => ContourError::BoundaryHit { point: z },
        other => ContourError::Expr(other),
    }
}

/// Net winding of `f` along `c`, by adaptive principal-value phase
/// increments.
pub fn winding_count_with(f: &Expr, c: &Contour, opts: &WindingOptions) -> Result<CountResult, ContourError> {
    let scale = c.scale();
    let reg = f.registry();
    if let Some(e) = reg.entries().iter().find(|e| c.distance(e.location) < opts.margin * scale) {
        return Err(ContourError::BoundaryHit { point: e.location });
    }
    let sample = |t: f64| -> Result<(f64, f64), ContourError> {
        let z = c.point(t);
        let v = evaluate_with(f, z, &opts.eval).map_err(|e| boundary_or(e, z))?;
        if v.is_zero() || !v.logmag().is_finite() {
            return Err(ContourError::BoundaryHit { point: z });
        }
        Ok((v.arg(), v.logmag()))
    };
    let n0 = opts.initial_samples.max(8);
    let start = sample(0.0)?;
    let mut total = 0.0;
    let mut steps = 0usize;
    let mut evals = 1usize;
    let mut refined = false;
    let min_dt = 1e-13;
    let mut prev = (0.0, start);
    for i in 1..=n0 {
        let t1 = i as f64 / n0 as f64;
        let v1 = if i == n0 { start } else { sample(t1)? };
        evals += 1;
        // depth-first refinement of [prev.0, t1]
        let mut stack = vec![(t1, v1)];
        while let Some(&(tb, vb)) = stack.last() {
            let (ta, va) = prev;
            let dphi = wrap_angle(vb.0 - va.0);
            if dphi.abs() < opts.max_step && (vb.1 - va.1).abs() < opts.max_log_step {
                total += dphi;
                steps += 1;
                prev = (tb, vb);
                stack.pop();
                continue;
            }
            refined = true;
            if tb - ta < min_dt {
                return Err(ContourError::BoundaryHit {
                    point: c.point(0.5 * (ta + tb)),
                });
            }
            evals += 1;
            if evals > opts.max_samples {
                return Err(ContourError::NonConvergent { samples: evals });
            }
            let tm = 0.5 * (ta + tb);
            stack.push((tm, sample(tm)?));
        }
    }
    let turns = total / TAU;
    let net = turns.round();
    let residual = (turns - net).abs();
    if residual > 0.1 {
        return Err(ContourError::NonInteger { residual });
    }
    Ok(CountResult {
        net: net as i64,
        phase_steps: steps,
        refined,
    })
}

fn poles_inside(poles: &[(Complex64, u32)], c: &Contour) -> i64 {
    poles.iter().filter(|(p, _)| c.encloses(*p)).map(|(_, m)| *m as i64).sum()
}

fn registry_poles(f: &Expr) -> Result<Vec<(Complex64, u32)>, ContourError> {
    let reg = f.registry();
    if !reg.poles_complete() {
        return Err(ContourError::IncompleteRegistry);
    }
    Ok(reg.poles().map(|p| (p.location, p.multiplicity)).collect())
}

/// Zeros of `f` in `|z| < r`, with multiplicity; needs a complete pole set.
pub fn count_zeros_in_disk(f: &Expr, r: f64) -> Result<i64, ContourError> {
    let poles = registry_poles(f)?;
    count_zeros_in_disk_with_poles(f, r, &poles, &WindingOptions::default())
}

/// As [`count_zeros_in_disk`] with the poles supplied by the caller.
pub fn count_zeros_in_disk_with_poles(
    f: &Expr,
    r: f64,
    poles: &[(Complex64, u32)],
    opts: &WindingOptions,
) -> Result<i64, ContourError> {
    let c = Contour::circle(Complex64::new(0.0, 0.0), r)?;
    if let Some((p, _)) = poles.iter().find(|(p, _)| c.distance(*p) < opts.margin * r) {
        return Err(ContourError::BoundaryHit { point: *p });
    }
    Ok(winding_count_with(f, &c, opts)?.net + poles_inside(poles, &c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocateOptions {
    /// Leaves with diameter below this are reported as resolved.
    pub tol: f64,
    /// Pole list to use instead of the expression registry.
    pub poles: Option<Vec<(Complex64, u32)>>,
    pub winding: WindingOptions,
    /// Jittered re-splits tried after a boundary hit.
    pub jitter_attempts: usize,
}

impl Default for LocateOptions {
    fn default() -> Self {
        LocateOptions {
            tol: 1e-8,
            poles: None,
            winding: WindingOptions::default(),
            jitter_attempts: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroBox {
    pub lo: Complex64,
    pub hi: Complex64,
    pub count: i64,
    /// False for depth-capped boxes still larger than the tolerance.
    pub resolved: bool,
}

impl ZeroBox {
    pub fn center(&self) -> Complex64 {
        0.5 * (self.lo + self.hi)
    }

    /// Half the diagonal.
    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo).norm()
    }
}

fn box_count(f: &Expr, lo: Complex64, hi: Complex64, poles: &[(Complex64, u32)], opts: &LocateOptions) -> Result<i64, ContourError> {
    let c = Contour::rect(lo, hi)?;
    let scale = c.scale();
    if let Some((p, _)) = poles.iter().find(|(p, _)| c.distance(*p) < opts.winding.margin * scale) {
        return Err(ContourError::BoundaryHit { point: *p });
    }
    Ok(winding_count_with(f, &c, &opts.winding)?.net + poles_inside(poles, &c))
}

/// Golden-ratio offsets in `[-0.01, 0.01]`, the first one zero.
fn jitter(k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    ((k as f64 * phi).fract() - 0.5) * 0.02
}

fn subdivide(
    f: &Expr,
    b: ZeroBox,
    depth: usize,
    max_depth: usize,
    poles: &[(Complex64, u32)],
    opts: &LocateOptions,
) -> Result<Vec<ZeroBox>, ContourError> {
    if b.count <= 0 {
        return Ok(Vec::new());
    }
    let diam = (b.hi - b.lo).norm();
    if diam < opts.tol {
        return Ok(vec![ZeroBox { resolved: true, ..b }]);
    }
    if depth >= max_depth {
        return Ok(vec![ZeroBox { resolved: false, ..b }]);
    }
    let w = b.hi.re - b.lo.re;
    let h = b.hi.im - b.lo.im;
    let mut last = None;
    for k in 0..=opts.jitter_attempts {
        let mx = b.lo.re + w * (0.5 + jitter(k));
        let my = b.lo.im + h * (0.5 + jitter(2 * k));
        let quads = [
            (b.lo, Complex64::new(mx, my)),
            (Complex64::new(mx, b.lo.im), Complex64::new(b.hi.re, my)),
            (Complex64::new(b.lo.re, my), Complex64::new(mx, b.hi.im)),
            (Complex64::new(mx, my), b.hi),
        ];
        let counts: Result<Vec<i64>, ContourError> =
            quads.par_iter().map(|&(lo, hi)| box_count(f, lo, hi, poles, opts)).collect();
        match counts {
            Ok(cs) if cs.iter().sum::<i64>() == b.count && cs.iter().all(|&c| c >= 0) => {
                let children: Result<Vec<Vec<ZeroBox>>, ContourError> = quads
                    .par_iter()
                    .zip(cs.par_iter())
                    .map(|(&(lo, hi), &count)| {
                        subdivide(f, ZeroBox { lo, hi, count, resolved: false }, depth + 1, max_depth, poles, opts)
                    })
                    .collect();
                return Ok(children?.into_iter().flatten().collect());
            }
            Ok(cs) => last = Some(ContourError::NonInteger { residual: (cs.iter().sum::<i64>() - b.count) as f64 }),
            Err(e @ ContourError::BoundaryHit { .. }) | Err(e @ ContourError::NonConvergent { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    match last {
        // cannot split cleanly: report the box as it stands
        Some(ContourError::BoundaryHit { .. }) | Some(ContourError::NonConvergent { .. }) | Some(ContourError::NonInteger { .. }) => {
            Ok(vec![ZeroBox { resolved: false, ..b }])
        }
        Some(e) => Err(e),
        None => unreachable!(),
    }
}

/// Quadtree localization of the zeros of `f` inside `lo..hi`.
///
/// Leaf counts always sum to the zero count of the top-level box. Output is
/// sorted by real then imaginary part of the box centres.
pub fn locate_zeros(
    f: &Expr,
    lo: Complex64,
    hi: Complex64,
    max_depth: usize,
    opts: &LocateOptions,
) -> Result<Vec<ZeroBox>, ContourError> {
    let poles = match &opts.poles {
        Some(p) => p.clone(),
        None => registry_poles(f)?,
    };
    let count = box_count(f, lo, hi, &poles, opts)?;
    let mut out = subdivide(f, ZeroBox { lo, hi, count, resolved: false }, 0, max_depth, &poles, opts)?;
    out.sort_by(|a, b| {
        let (ca, cb) = (a.center(), b.center());
        ca.re.total_cmp(&cb.re).then(ca.im.total_cmp(&cb.im))
    });
    Ok(out)
}

pub fn write_zero_csv(boxes: &[ZeroBox], w: impl Write) -> Result<(), ContourError> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| ContourError::Io(e.into());
    out.write_record(["re", "im", "box_radius", "count"]).map_err(io)?;
    for b in boxes {
        let c = b.center();
        out.write_record([format!("{:e}", c.re), format!("{:e}", c.im), format!("{:e}", b.radius()), b.count.to_string()])
            .map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

/// Registry of numerically located zeros (box centres) plus the poles used.
pub fn zero_registry(boxes: &[ZeroBox], poles: &[(Complex64, u32)]) -> PoleZeroRegistry {
    let mut zeros = Vec::new();
    for b in boxes {
        for _ in 0..b.count {
            zeros.push(b.center());
        }
    }
    let mut ps = Vec::new();
    for (p, m) in poles {
        for _ in 0..*m {
            ps.push(*p);
        }
    }
    let complete = boxes.iter().all(|b| b.resolved);
    PoleZeroRegistry::from_points(&zeros, &ps, complete, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> Contour {
        Contour::circle(c(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn identity_winds_once() {
        assert_eq!(winding_count(&Expr::var(), &unit()).unwrap().net, 1);
        assert_eq!(winding_count(&Expr::var(), &unit().reversed()).unwrap().net, -1);
    }

    #[test]
    fn double_zero_inside_pole_outside() {
        let f = Expr::linear_factor(0.5) * Expr::linear_factor(0.5) / Expr::linear_factor(-2.0);
        assert_eq!(winding_count(&f, &unit()).unwrap().net, 2);
    }

    #[test]
    fn disk_counts() {
        let f = Expr::factor_product(vec![c(4.0, 0.0), c(64.0, 0.0)]).unwrap();
        assert_eq!(count_zeros_in_disk(&f, 10.0).unwrap(), 1);
        let g = Expr::one() / Expr::linear_factor(1.0);
        assert_eq!(count_zeros_in_disk(&g, 2.0).unwrap(), 0);
    }

    #[test]
    fn boundary_hit_on_registered_point() {
        let f = Expr::linear_factor(1.0);
        assert!(matches!(winding_count(&f, &unit()), Err(ContourError::BoundaryHit { .. })));
    }

    #[test]
    fn rectangle_parametrisation_closes() {
        let r = Contour::rect(c(-1.0, -2.0), c(3.0, 1.0)).unwrap();
        assert_relative_eq!((r.point(0.0) - c(-1.0, -2.0)).norm(), 0.0);
        assert!(r.distance(r.point(0.37)) < 1e-12);
        assert_eq!(winding_count(&Expr::linear_factor(c(0.5, 0.5)), &r).unwrap().net, 1);
    }

    #[test]
    fn locates_plus_minus_one() {
        let f = Expr::monomial(2) - Expr::one();
        let opts = LocateOptions {
            poles: Some(vec![]),
            ..Default::default()
        };
        let boxes = locate_zeros(&f, c(-2.0, -2.0), c(2.0, 2.0), 40, &opts).unwrap();
        assert_eq!(boxes.len(), 2);
        assert!(boxes.iter().all(|b| b.count == 1 && b.resolved));
        assert!((boxes[0].center() - c(-1.0, 0.0)).norm() < 1e-8);
        assert!((boxes[1].center() - c(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn locate_needs_poles() {
        let f = Expr::partial_fractions(vec![crate::expr::PfTerm::simple(c(1.0, 0.0), c(0.0, 0.0))]).unwrap()
            - Expr::partial_fractions(vec![crate::expr::PfTerm::simple(c(1.0, 0.0), c(0.0, 0.0))]).unwrap();
        let r = locate_zeros(&f, c(-2.0, -2.0), c(2.0, 2.0), 4, &LocateOptions::default());
        assert!(matches!(r, Err(ContourError::IncompleteRegistry)));
    }
}
