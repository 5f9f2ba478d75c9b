//! Named test functions.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::counterexample::{build_bundle, OneZeroSpec};
use crate::expr::{evaluate_with, EvalConfig, Expr, ExprError, PfTerm};
use crate::sampling;

/// `∏_{k≤K} (1 + z/k³)`: zeros at `−k³`, order `1/3`.
pub fn cube_product(k: usize) -> Expr {
    power_product(k, 3.0)
}

/// `∏_{k≤K} (1 + z/k^p)`, of order `1/p` as `K → ∞`.
pub fn power_product(k: usize, p: f64) -> Expr {
    let a = (1..=k).map(|j| Complex64::new((j as f64).powf(p), 0.0)).collect();
    Expr::factor_product(a).expect("k^p is nonzero")
}

/// `∏(1 + z/2ᵏ) / ∏(1 − z/(3·2ᵏ))` over `k ≤ K`: zeros at `−2ᵏ`, poles at
/// `3·2ᵏ`, with `T(r) = O(log r)²` as `K → ∞`.
pub fn geometric_quotient(k: usize) -> Expr {
    let zeros = (1..=k).map(|j| Complex64::new(2f64.powi(j as i32), 0.0)).collect();
    let poles = (1..=k).map(|j| Complex64::new(-3.0 * 2f64.powi(j as i32), 0.0)).collect();
    Expr::quotient(
        Expr::factor_product(zeros).expect("nonzero"),
        Expr::factor_product(poles).expect("nonzero"),
    )
}

/// A rational function with known zeros and poles.
#[derive(Clone, Debug)]
pub struct RationalCase {
    pub expr: Expr,
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
}

/// Random rational function with `1..=max_zeros` zeros and `0..=max_poles`
/// poles in the square `|Re|, |Im| < spread`, kept `min_sep` apart.
pub fn random_rational(rng: &mut impl Rng, max_zeros: usize, max_poles: usize, spread: f64, min_sep: f64) -> RationalCase {
    let nz = rng.gen_range(1..=max_zeros);
    let np = rng.gen_range(0..=max_poles);
    let mut pts: Vec<Complex64> = Vec::with_capacity(nz + np);
    while pts.len() < nz + np {
        let p = Complex64::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread));
        if pts.iter().all(|q| (p - q).norm() >= min_sep) {
            pts.push(p);
        }
    }
    let poles = pts.split_off(nz);
    let zeros = pts;
    let lead = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
    let num = Expr::from_roots(lead, &zeros);
    let expr = if poles.is_empty() {
        num
    } else {
        Expr::quotient(num, Expr::from_roots(1.0, &poles))
    };
    RationalCase { expr, zeros, poles }
}

/// Simple poles at the Gaussian integers `a + ib`, `|a|, |b| ≤ m`, `(a, b) ≠ 0`,
/// with residue `1/(a + ib)²`.
pub fn lattice_fractions(m: i64) -> Expr {
    let mut terms = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            if a == 0 && b == 0 {
                continue;
            }
            let p = Complex64::new(a as f64, b as f64);
            terms.push(PfTerm::simple(1.0 / (p * p), p));
        }
    }
    Expr::partial_fractions(terms).expect("distinct lattice points")
}

/// Zeros of `f⁽ʲ⁾` for `f` real on the real axis with only real, simple
/// zeros (a finite real-rooted product). By Rolle each gap between
/// consecutive zeros of `f⁽ʲ⁻¹⁾` holds exactly one zero of `f⁽ʲ⁾`; each is
/// found by bisection on the sign of `f⁽ʲ⁾` to relative `1e-13`.
pub fn interlaced_derivative_zeros(f: &Expr, j: u32) -> Result<Vec<f64>, ExprError> {
    let reg = f.registry();
    if !reg.complete() || reg.poles().next().is_some() {
        return Err(ExprError::InvalidNode("needs an entire function with known zeros".into()));
    }
    let mut zs: Vec<f64> = Vec::new();
    for e in reg.zeros() {
        if e.location.im != 0.0 || e.multiplicity != 1 {
            return Err(ExprError::InvalidNode(format!("zero {} is not real and simple", e.location)));
        }
        zs.push(e.location.re);
    }
    zs.sort_by(f64::total_cmp);
    let cfg = EvalConfig::survey();
    let mut d = f.clone();
    for _ in 0..j {
        d = d.derivative();
        let sign = |x: f64| -> Result<f64, ExprError> {
            let v = evaluate_with(&d, Complex64::new(x, 0.0), &cfg)?;
            Ok(if v.is_zero() { 0.0 } else { v.arg().cos().signum() })
        };
        let mut next = Vec::with_capacity(zs.len().saturating_sub(1));
        for w in zs.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let sa = sign(a + 1e-12 * (b - a))?;
            while (b - a) > 1e-13 * a.abs().max(b.abs()).max(1.0) {
                let m = 0.5 * (a + b);
                let sm = sign(m)?;
                if sm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if sm == sa {
                    a = m;
                } else {
                    b = m;
                }
            }
            next.push(0.5 * (a + b));
        }
        zs = next;
    }
    Ok(zs)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Builder {
    CubeProduct,
    PowerProduct,
    Lattice,
    GeometricQuotient,
    OneZeroF,
    OneZeroG,
}

/// A corpus member built by name, for configs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NamedBuilder {
    pub builder: Builder,
    #[serde(default)]
    pub terms: Option<usize>,
    #[serde(default)]
    pub power: Option<f64>,
    #[serde(default)]
    pub n_seq: Option<Vec<u64>>,
}

impl NamedBuilder {
    pub fn build(&self) -> Result<Expr, String> {
        let terms = self.terms.unwrap_or(2000);
        match self.builder {
            Builder::CubeProduct => Ok(cube_product(terms)),
            Builder::PowerProduct => Ok(power_product(terms, self.power.unwrap_or(3.0))),
            Builder::Lattice => Ok(lattice_fractions(self.terms.unwrap_or(3) as i64)),
            Builder::GeometricQuotient => Ok(geometric_quotient(self.terms.unwrap_or(40))),
            Builder::OneZeroF | Builder::OneZeroG => {
                let spec = OneZeroSpec::new(self.n_seq.clone().unwrap_or(vec![2, 10, 60]), 4.0)
                    .map_err(|e| e.to_string())?;
                let b = build_bundle(&spec, 256).map_err(|e| e.to_string())?;
                Ok(if self.builder == Builder::OneZeroF { b.f } else { b.g })
            }
        }
    }
}

/// The mixed corpus for operator identities: polynomials, rationals,
/// partial fractions, products, compositions and the one-zero pair.
pub fn standard_corpus() -> Vec<(String, Expr)> {
    let c = Complex64::new;
    let mut rng = sampling::rng(0x5eed);
    let mut out = vec![
        (
            "quintic".to_string(),
            Expr::polynomial(&[c(1.0, 0.0), c(-2.0, 1.0), c(0.0, 0.5), c(0.25, 0.0), c(0.0, 0.0), c(0.1, -0.05)]),
        ),
        ("z^7".to_string(), Expr::monomial(7)),
        (
            "inverse-square".to_string(),
            Expr::quotient(Expr::one(), Expr::monomial(2) + Expr::constant(c(4.0, 0.0))),
        ),
        ("lattice".to_string(), lattice_fractions(2)),
        ("cube-product-50".to_string(), cube_product(50)),
        ("square-product-30".to_string(), power_product(30, 2.0)),
        (
            "h-composite".to_string(),
            Expr::compose(
                Expr::factor_product(vec![c(4.0, 0.0), c(64.0, 0.0)]).expect("nonzero"),
                Expr::monomial(2),
            ),
        ),
        (
            "shifted-quotient".to_string(),
            Expr::quotient(Expr::monomial(3) - Expr::constant(c(1.0, 1.0)), Expr::linear_factor(c(0.5, -2.5))),
        ),
    ];
    let mut i = 0;
    while i < 4 {
        // pole-free draws of low degree would make high differences vanish identically
        let case = random_rational(&mut rng, 4, 3, 4.0, 0.3);
        if !case.poles.is_empty() {
            out.push((format!("random-rational-{i}"), case.expr));
            i += 1;
        }
    }
    let spec = OneZeroSpec::new(vec![1, 4], 4.0).expect("valid");
    let b = build_bundle(&spec, 256).expect("small bundle");
    out.push(("one-zero-f".to_string(), b.f));
    out.push(("one-zero-g".to_string(), b.g));
    out
}
