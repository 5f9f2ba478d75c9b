//! The one-zero pair `(f, g)` with `g = Δf`, built from a finite sequence
//! `n_1 < … < n_K`, and its exact verification.
//!
//! With `A_k = 4n_k⁴`, `H(z) = ∏(1 + z/A_k)` and `h(z) = H(z⁴)/z`, the zeros
//! of `h` are the `4K` points `±n_k ± i n_k`. The residues of `1/h` there are
//! `±c_k` with `c_k = 1/h′(−n_k + i n_k)`, so the partial-fraction sum `g`
//! equals `z/H(z⁴)` exactly and has a single zero at the origin.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::{self, ContourError};
use crate::expr::{evaluate_ext, Expr, ExprError, PfTerm, PoleZeroRegistry};
use crate::ext::BigComplex;
use crate::sampling;

#[derive(Debug, Error)]
pub enum CounterexampleError {
    #[error("invalid sequence: {0}")]
    InvalidSpec(String),
    #[error("h' nearly vanishes at -n_{k} + i n_{k} (ln|h'| = {log_abs})")]
    DegenerateZero { k: usize, log_abs: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Contour(#[from] ContourError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneZeroSpec {
    pub n_seq: Vec<u64>,
    pub ratio_floor: f64,
}

impl OneZeroSpec {
    pub fn new(n_seq: Vec<u64>, ratio_floor: f64) -> Result<Self, CounterexampleError> {
        let s = OneZeroSpec { n_seq, ratio_floor };
        s.validate()?;
        Ok(s)
    }

    /// `n = (2, 10, 60)` with ratio floor 4.
    pub fn standard() -> Self {
        OneZeroSpec {
            n_seq: vec![2, 10, 60],
            ratio_floor: 4.0,
        }
    }

    pub fn validate(&self) -> Result<(), CounterexampleError> {
        if self.n_seq.is_empty() {
            return Err(CounterexampleError::InvalidSpec("empty sequence".into()));
        }
        if self.n_seq[0] == 0 {
            return Err(CounterexampleError::InvalidSpec("n_1 must be positive".into()));
        }
        for w in self.n_seq.windows(2) {
            if (w[1] as f64) < self.ratio_floor * w[0] as f64 || w[1] <= w[0] {
                return Err(CounterexampleError::InvalidSpec(format!(
                    "n_(k+1)/n_k = {}/{} is below the ratio floor {}",
                    w[1], w[0], self.ratio_floor
                )));
            }
        }
        // A_k = 4 n^4 must stay an exact f64 integer
        if self.n_seq.iter().any(|&n| n > 4096) {
            return Err(CounterexampleError::InvalidSpec("n_k above 4096".into()));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.n_seq.len()
    }

    pub fn a_seq(&self) -> Vec<f64> {
        self.n_seq.iter().map(|&n| 4.0 * (n as f64).powi(4)).collect()
    }

    /// The `4K` zeros of `h` (poles of `g`), grouped by `k`.
    pub fn h_zeros(&self) -> Vec<Complex64> {
        self.n_seq
            .iter()
            .flat_map(|&n| {
                let n = n as f64;
                [
                    Complex64::new(-n, n),
                    Complex64::new(n, n),
                    Complex64::new(-n, -n),
                    Complex64::new(n, -n),
                ]
            })
            .collect()
    }
}

/// `H(z) = ∏(1 + z/A_k)`, `A_k = 4n_k⁴`.
pub fn build_big_h(spec: &OneZeroSpec) -> Expr {
    let a = spec.a_seq().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    Expr::factor_product(a).expect("A_k are positive")
}

/// `h(z) = H(z⁴)/z`.
pub fn build_h(spec: &OneZeroSpec) -> Expr {
    Expr::quotient(Expr::compose(build_big_h(spec), Expr::monomial(4)), Expr::var())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residue {
    pub k: usize,
    pub n: u64,
    pub c: Complex64,
    /// `(re, im)` of `c_k` at the working precision.
    pub c_decimal: (String, String),
    /// `ln |h′(−n_k + i n_k)|`.
    pub log_abs_h_prime: f64,
}

/// `h′(β) = 4β² H′(β⁴)` at `β = −n_k + i n_k`, in `bits`-bit arithmetic.
fn h_prime_closed(spec: &OneZeroSpec, k: usize, bits: usize) -> BigComplex {
    let a = spec.a_seq();
    let big = |x: f64| BigComplex::from_real(x, bits);
    // H′(−A_k) = (1/A_k) ∏_{j≠k} (1 − A_k/A_j)
    let mut hp = big(1.0).div(&big(a[k])).expect("nonzero");
    for (j, &aj) in a.iter().enumerate() {
        if j != k {
            let t = big(1.0).sub(&big(a[k]).div(&big(aj)).expect("nonzero"));
            hp = hp.mul(&t);
        }
    }
    let n = spec.n_seq[k] as f64;
    let beta = BigComplex::from_c64(Complex64::new(-n, n), bits);
    beta.mul(&beta).scale(4.0).mul(&hp)
}

/// `c_k = 1/h′(−n_k + i n_k)` in extended precision, cross-checked against
/// the derivative tree of `h`.
pub fn residues(spec: &OneZeroSpec, bits: usize) -> Result<Vec<Residue>, CounterexampleError> {
    spec.validate()?;
    let dh = build_h(spec).derivative();
    (0..spec.k())
        .map(|k| {
            let closed = h_prime_closed(spec, k, bits);
            let n = spec.n_seq[k] as f64;
            let tree = evaluate_ext(&dh, Complex64::new(-n, n), bits)?;
            let log_abs = closed.ln_abs();
            if !log_abs.is_finite() || log_abs < -600.0 {
                return Err(CounterexampleError::DegenerateZero { k: k + 1, log_abs });
            }
            let diff = closed.sub(&tree).ln_abs() - log_abs;
            if diff > -30.0 {
                return Err(ExprError::InvalidNode(format!(
                    "h' closed form and derivative tree disagree at k = {} (relative e^{diff:.1})",
                    k + 1
                ))
                .into());
            }
            let c = closed.recip().expect("checked nonzero");
            Ok(Residue {
                k: k + 1,
                n: spec.n_seq[k],
                c: c.to_c64(),
                c_decimal: c.to_decimal(),
                log_abs_h_prime: log_abs,
            })
        })
        .collect()
}

/// `g(z) = Σ_k c_k[(z+n−in)⁻¹ − (z−n−in)⁻¹] − c_k[(z+n+in)⁻¹ − (z−n+in)⁻¹]`.
pub fn build_g(spec: &OneZeroSpec, c: &[Complex64]) -> Expr {
    let mut terms = Vec::with_capacity(4 * c.len());
    for (&n, &ck) in spec.n_seq.iter().zip(c) {
        let n = n as f64;
        terms.push(PfTerm::simple(ck, Complex64::new(-n, n)));
        terms.push(PfTerm::simple(-ck, Complex64::new(n, n)));
        terms.push(PfTerm::simple(-ck, Complex64::new(-n, -n)));
        terms.push(PfTerm::simple(ck, Complex64::new(n, -n)));
    }
    Expr::partial_fractions(terms).expect("lattice poles are distinct")
}

/// `f(z) = Σ_k Σ_{j=−n_k}^{n_k−1} c_k/(z+j−in_k) − c_k/(z+j+in_k)`.
pub fn build_f(spec: &OneZeroSpec, c: &[Complex64]) -> Expr {
    let mut terms = Vec::new();
    for (&n, &ck) in spec.n_seq.iter().zip(c) {
        let ni = n as i64;
        let nf = n as f64;
        for j in -ni..ni {
            let jf = j as f64;
            terms.push(PfTerm::simple(ck, Complex64::new(-jf, nf)));
            terms.push(PfTerm::simple(-ck, Complex64::new(-jf, -nf)));
        }
    }
    Expr::partial_fractions(terms).expect("lattice poles are distinct")
}

#[derive(Clone, Debug)]
pub struct OneZeroBundle {
    pub spec: OneZeroSpec,
    pub big_h: Expr,
    pub h: Expr,
    pub g: Expr,
    pub f: Expr,
    pub residues: Vec<Residue>,
    pub c_seq: Vec<Complex64>,
    /// Poles of `f`.
    pub pole_lattice: PoleZeroRegistry,
}

pub fn build_bundle(spec: &OneZeroSpec, bits: usize) -> Result<OneZeroBundle, CounterexampleError> {
    let res = residues(spec, bits)?;
    let c: Vec<Complex64> = res.iter().map(|r| r.c).collect();
    let f = build_f(spec, &c);
    Ok(OneZeroBundle {
        spec: spec.clone(),
        big_h: build_big_h(spec),
        h: build_h(spec),
        g: build_g(spec, &c),
        pole_lattice: f.registry(),
        f,
        residues: res,
        c_seq: c,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleExport {
    pub n_seq: Vec<u64>,
    pub a_seq: Vec<f64>,
    pub c: Vec<(String, String)>,
    pub g_poles: Vec<Complex64>,
    pub f_poles: Vec<Complex64>,
}

impl OneZeroBundle {
    pub fn export(&self) -> BundleExport {
        BundleExport {
            n_seq: self.spec.n_seq.clone(),
            a_seq: self.spec.a_seq(),
            c: self.residues.iter().map(|r| r.c_decimal.clone()).collect(),
            g_poles: self.g.registry().poles().map(|p| p.location).collect(),
            f_poles: self.pole_lattice.poles().map(|p| p.location).collect(),
        }
    }

    /// `n_k |c_k|` for each `k`.
    pub fn weighted_residues(&self) -> Vec<f64> {
        self.spec.n_seq.iter().zip(&self.c_seq).map(|(&n, c)| n as f64 * c.norm()).collect()
    }

    /// Consecutive ratios of `n_k |c_k|`.
    pub fn residue_decay(&self) -> Vec<f64> {
        self.weighted_residues().windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Worst case of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Point of the largest error with the two compared values.
    pub worst_point: Option<Complex64>,
    pub worst_values: Option<(Complex64, Complex64)>,
}

impl IdentityCheck {
    fn new(tolerance: f64) -> Self {
        IdentityCheck {
            max_rel_err: 0.0,
            tolerance,
            passed: true,
            worst_point: None,
            worst_values: None,
        }
    }

    fn record(&mut self, z: Complex64, a: &BigComplex, b: &BigComplex) {
        let scale = a.ln_abs().max(b.ln_abs());
        let err = if scale == f64::NEG_INFINITY {
            0.0
        } else {
            (a.sub(b).ln_abs() - scale).exp()
        };
        if err > self.max_rel_err || self.worst_point.is_none() {
            self.max_rel_err = self.max_rel_err.max(err);
            self.worst_point = Some(z);
            self.worst_values = Some((a.to_c64(), b.to_c64()));
        }
        self.passed = self.max_rel_err <= self.tolerance;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleReport {
    /// `f(z+1) − f(z) = g(z)`.
    pub telescoping: IdentityCheck,
    /// `g(z) H(z⁴) = z`.
    pub rational_identity: IdentityCheck,
    /// Winding of `g` on `|z| = 1.5√2 n_K`.
    pub winding_net: i64,
    pub winding_expected: i64,
    /// Zeros of `g` in `|z| < 2√2 n_K`.
    pub zeros_in_disk: i64,
    /// `h′(iβ) = −h′(β)` at all zeros `β` of `h`.
    pub symmetry: IdentityCheck,
    pub passed: bool,
}

/// Verifies the four identities at `samples` seeded points in `bits`-bit
/// arithmetic.
pub fn verify_bundle(b: &OneZeroBundle, samples: usize, seed: u64, bits: usize) -> Result<BundleReport, CounterexampleError> {
    let nk = *b.spec.n_seq.last().expect("validated") as f64;
    let poles: Vec<Complex64> = b.pole_lattice.poles().map(|p| p.location).collect();
    let gpoles = b.spec.h_zeros();
    let region = 1.5 * std::f64::consts::SQRT_2 * nk;
    let mut rng = sampling::rng(seed);
    let mut pts = Vec::with_capacity(samples);
    while pts.len() < samples {
        let z = sampling::point_in_disc(&mut rng, region);
        let near = |p: &Complex64| (z - p).norm() < 0.05 || (z + 1.0 - p).norm() < 0.05;
        if !poles.iter().any(near) && !gpoles.iter().any(near) {
            pts.push(z);
        }
    }
    let big = |z: Complex64| BigComplex::from_c64(z, bits);
    let vals: Vec<(Complex64, BigComplex, BigComplex, BigComplex, BigComplex)> = pts
        .par_iter()
        .map(|&z| -> Result<_, ExprError> {
            let f0 = evaluate_ext(&b.f, z, bits)?;
            let f1 = evaluate_ext(&b.f, z + 1.0, bits)?;
            let g = evaluate_ext(&b.g, z, bits)?;
            let z4 = big(z).powi(4);
            let hz = eval_h_at(&b.big_h, &z4)?;
            Ok((z, f1.sub(&f0), g.clone(), g.mul(&hz), big(z)))
        })
        .collect::<Result<_, _>>()?;
    let mut tele = IdentityCheck::new(1e-12);
    let mut rat = IdentityCheck::new(1e-10);
    for (z, df, g, gh, zz) in &vals {
        tele.record(*z, df, g);
        rat.record(*z, gh, zz);
    }
    let winding_expected = 1 - 4 * b.spec.k() as i64;
    let circle = contour::Contour::circle(Complex64::new(0.0, 0.0), region)?;
    let winding_net = contour::winding_count(&b.g, &circle)?.net;
    let zeros_in_disk = contour::count_zeros_in_disk(&b.g, 2.0 * std::f64::consts::SQRT_2 * nk)?;
    let dh = b.h.derivative();
    let mut sym = IdentityCheck::new(1e-12);
    for beta in gpoles {
        let i_beta = Complex64::new(0.0, 1.0) * beta;
        let lhs = evaluate_ext(&dh, i_beta, bits)?;
        let rhs = evaluate_ext(&dh, beta, bits)?.neg();
        sym.record(beta, &lhs, &rhs);
    }
    let passed = tele.passed && rat.passed && sym.passed && winding_net == winding_expected && zeros_in_disk == 1;
    Ok(BundleReport {
        telescoping: tele,
        rational_identity: rat,
        winding_net,
        winding_expected,
        zeros_in_disk,
        symmetry: sym,
        passed,
    })
}

/// `H(w)` for an extended-precision argument.
fn eval_h_at(big_h: &Expr, w: &BigComplex) -> Result<BigComplex, ExprError> {
    crate::expr::eval_ext(big_h, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::evaluate;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn h_for_single_term() {
        let spec = OneZeroSpec::new(vec![1], 4.0).unwrap();
        let big_h = build_big_h(&spec);
        assert_eq!(big_h, Expr::factor_product(vec![c(4.0, 0.0)]).unwrap());
        assert_eq!(evaluate(&big_h, c(0.0, 0.0)).unwrap().to_complex().unwrap(), c(1.0, 0.0));
        let h = build_h(&spec);
        for z in spec.h_zeros() {
            assert!(evaluate(&h, z).unwrap().abs() < 1e-12);
        }
        let h1 = evaluate(&h, c(1.0, 0.0)).unwrap().to_complex().unwrap();
        assert_relative_eq!(h1.re, 1.25, epsilon = 1e-15);
    }

    #[test]
    fn two_term_product_zeros() {
        let spec = OneZeroSpec::new(vec![1, 4], 4.0).unwrap();
        let big_h = build_big_h(&spec);
        assert!(evaluate(&big_h, c(-4.0, 0.0)).unwrap().is_zero());
        assert!(evaluate(&big_h, c(-1024.0, 0.0)).unwrap().is_zero());
        let d = evaluate(&big_h.derivative(), c(-4.0, 0.0)).unwrap().to_complex().unwrap();
        assert_relative_eq!(d.re, (1.0 - 4.0 / 1024.0) / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn first_residue_is_i_over_two() {
        let spec = OneZeroSpec::new(vec![1], 4.0).unwrap();
        let r = residues(&spec, 256).unwrap();
        assert_relative_eq!((r[0].c - c(0.0, 0.5)).norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn invalid_specs() {
        assert!(OneZeroSpec::new(vec![], 4.0).is_err());
        assert!(OneZeroSpec::new(vec![2, 5], 4.0).is_err());
        assert!(OneZeroSpec::new(vec![3, 2], 1.0).is_err());
    }

    #[test]
    fn pole_counts() {
        let spec = OneZeroSpec::new(vec![2, 10], 4.0).unwrap();
        let b = build_bundle(&spec, 128).unwrap();
        assert_eq!(b.pole_lattice.poles().count(), 48);
        assert!(b.pole_lattice.poles().all(|p| p.location.im != 0.0));
        let g = b.g.registry();
        assert_eq!(g.poles().count(), 8);
        assert_eq!(g.poles().find(|p| p.location == c(-2.0, 2.0)).unwrap().multiplicity, 1);
    }

    #[test]
    fn g_vanishes_at_origin() {
        let b = build_bundle(&OneZeroSpec::standard(), 256).unwrap();
        let g0 = evaluate_ext(&b.g, c(0.0, 0.0), 256).unwrap();
        assert!(g0.to_c64().norm() < 1e-18, "{:?}", g0.to_c64());
        // g(0.3) = 0.3 / H(0.3^4) is real
        let z = c(0.3, 0.0);
        let v = evaluate(&b.g, z).unwrap().to_complex().unwrap();
        let want = 0.3 / evaluate(&b.big_h, c(0.3f64.powi(4), 0.0)).unwrap().to_complex().unwrap();
        assert_relative_eq!((v - want).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn small_bundle_verifies() {
        let spec = OneZeroSpec::new(vec![1, 4], 4.0).unwrap();
        let b = build_bundle(&spec, 256).unwrap();
        let rep = verify_bundle(&b, 20, 7, 256).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}
