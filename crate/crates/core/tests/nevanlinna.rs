use merodiff::corpus;
use merodiff::counterexample::{build_bundle, OneZeroSpec};
use merodiff::expr::PointKind;
use merodiff::nevanlinna::{
    build_epsilon_set, characteristic, counting_integrated, growth_profile, log_density, proximity, shadow_set, RadiusRule,
};
use merodiff::sampling::GridSpec;
use merodiff::Expr;
use num_complex::Complex64;
use std::f64::consts::E;

#[test]
fn characteristic_of_square_at_e_is_two() {
    let t = characteristic(&Expr::monomial(2), E).unwrap();
    assert!((t - 2.0).abs() < 1e-9, "{t}");
}

#[test]
fn counting_function_of_one_zero_f_matches_direct_sum() {
    let b = build_bundle(&OneZeroSpec::new(vec![1, 4], 4.0).unwrap(), 256).unwrap();
    let reg = b.f.registry();
    let poles: Vec<Complex64> = reg.poles().flat_map(|p| std::iter::repeat_n(p.location, p.multiplicity as usize)).collect();
    // 2n_k rows of two poles each: 2·(2·1 + 2·4)
    assert_eq!(poles.len(), 20);
    for r in [1.3, 3.7, 5.9, 9.1] {
        let want: f64 = poles.iter().filter(|p| p.norm() < r).map(|p| (r / p.norm()).ln()).sum();
        let got = counting_integrated(&reg, r, PointKind::Pole).unwrap();
        assert!((got - want).abs() <= 1e-12 * want.max(1.0), "r={r}: {got} vs {want}");
    }
}

#[test]
fn cube_product_order_near_one_third() {
    // exponent of convergence of |a_k| = k³ from the counting function
    let n = |t: f64| (1..=1_000_000u64).take_while(|&k| ((k * k * k) as f64) < t).count() as f64;
    let oracle = (n(1e18) / n(1e9)).ln() / (1e18f64 / 1e9).ln();
    assert!((oracle - 1.0 / 3.0).abs() < 1e-3, "{oracle}");
    // max of ln T/ln r carries a ln C/ln r bias, so the grid sits far out
    let f = corpus::cube_product(2000);
    let p = growth_profile(&f, &GridSpec::geometric(1e6, 1e10, 16).radii()).unwrap();
    assert!((0.28..=0.40).contains(&p.order_est), "{}", p.order_est);
    assert!(p.lower_order_est <= p.order_est + 1e-9);
}

#[test]
fn rational_characteristic_slope_is_degree() {
    // degree 3 rational: T(r) = 3 ln r + O(1)
    let f = Expr::quotient(
        Expr::monomial(3) + Expr::constant(2.0),
        Expr::linear_factor(Complex64::new(0.5, 0.5)),
    );
    let (r0, r1) = (1e5, 1e6);
    let slope = (characteristic(&f, r1).unwrap() - characteristic(&f, r0).unwrap()) / (r1 / r0).ln();
    // T ~ max(deg num, deg den) ln r
    assert!((slope - 3.0).abs() < 0.15, "{slope}");
}

/// `(1/ln t) ∫_[1,t] 1_S du/u` for a union of intervals, merged here.
fn log_density_oracle(mut iv: Vec<(f64, f64)>, t: f64) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let m: f64 = merged
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (a.max(1.0), b.min(t));
            if b > a {
                (b / a).ln()
            } else {
                0.0
            }
        })
        .sum();
    m / t.ln()
}

#[test]
fn gundersen_shadow_is_sparse() {
    let f = corpus::cube_product(300);
    let eps = build_epsilon_set(&f.registry(), RadiusRule::Gundersen { alpha: 3.0 }, 0.0).unwrap();
    let iv: Vec<(f64, f64)> = eps
        .discs()
        .iter()
        .map(|d| (d.center.norm() - d.radius, d.center.norm() + d.radius))
        .collect();
    let r: f64 = 1e4;
    // upper density over the tail [√r, r]
    let upper = (0..=16)
        .map(|i| log_density_oracle(iv.clone(), r.powf(0.5 + i as f64 / 32.0)))
        .fold(0.0, f64::max);
    assert!(upper < 0.05, "{upper}");
    let (_, lib_upper) = log_density(&shadow_set(&eps, 1.0, r), r, 17);
    assert!((lib_upper - upper).abs() < 1e-9, "{lib_upper} vs {upper}");
}

#[test]
fn proximity_of_bounded_function_vanishes() {
    let f = Expr::quotient(Expr::one(), Expr::monomial(2) + Expr::constant(4.0));
    assert!(proximity(&f, 10.0).unwrap() < 1e-12);
}
