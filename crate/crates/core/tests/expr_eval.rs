use merodiff::expr::{evaluate_ext, parse, PointKind};
use merodiff::{Expr, LogComplex};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * z + a)
}

fn close(a: LogComplex, b: Complex64, tol: f64) -> bool {
    let a = a.to_complex().unwrap();
    (a - b).norm() <= tol * b.norm().max(1e-300)
}

#[test]
fn derivative_of_root_product_matches_sum_of_cofactors() {
    let roots = [c(1.0, 0.0), c(-2.0, 0.5), c(0.3, -1.7), c(4.0, 4.0)];
    let f = Expr::from_roots(2.0, &roots);
    let z = c(0.7, 0.9);
    let mut want = c(0.0, 0.0);
    for j in 0..roots.len() {
        let mut p = c(2.0, 0.0);
        for (i, r) in roots.iter().enumerate() {
            if i != j {
                p *= z - r;
            }
        }
        want += p;
    }
    assert!(close(f.derivative().eval(z).unwrap(), want, 1e-13));
}

#[test]
fn registry_of_parsed_rational() {
    let e = parse("(quot (prod (shift (var) -1.0) (shift (var) -1.0)) (prod (shift (var) 2.0) (mono 3)))").unwrap();
    let reg = e.registry();
    assert!(reg.complete());
    assert_eq!(reg.count_in_disk(PointKind::Zero, 1.5), 2);
    assert_eq!(reg.count_in_disk(PointKind::Pole, 0.5), 3);
    assert_eq!(reg.count_in_disk(PointKind::Pole, 3.0), 4);
}

#[test]
fn extended_value_of_near_cancelling_difference() {
    // (z+1)^3 - z^3 = 3z^2 + 3z + 1 exactly
    let e = Expr::monomial(3).shift(1.0) - Expr::monomial(3);
    let z = c(3e9, 0.0);
    let want = 3.0 * 3e9 * 3e9 + 3.0 * 3e9 + 1.0;
    let v = e.eval(z).unwrap().to_complex().unwrap();
    assert!((v.re - want).abs() <= 1e-12 * want, "{v}");
    let b = evaluate_ext(&e, z, 200).unwrap().to_c64();
    assert!((b.re - want).abs() <= 1e-15 * want);
}

proptest! {
    #[test]
    fn polynomial_matches_horner(
        coeffs in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..8),
        zr in -3.0..3.0f64, zi in -3.0..3.0f64,
    ) {
        let coeffs: Vec<Complex64> = coeffs.into_iter().map(|(a, b)| c(a, b)).collect();
        let z = c(zr, zi);
        let want = horner(&coeffs, z);
        prop_assume!(want.norm() > 1e-3);
        let got = Expr::polynomial(&coeffs).eval(z).unwrap().to_complex().unwrap();
        // Horner itself carries a condition-number error; compare against the term-size scale
        let scale: f64 = coeffs.iter().enumerate().map(|(k, a)| a.norm() * z.norm().powi(k as i32)).sum();
        prop_assert!((got - want).norm() <= 1e-13 * scale, "{} vs {}", got, want);
    }

    #[test]
    fn shift_is_translation(a in -5.0..5.0f64, b in -5.0..5.0f64, zr in -4.0..4.0f64, zi in -4.0..4.0f64) {
        let f = Expr::quotient(Expr::monomial(2) + Expr::one(), Expr::linear_factor(c(7.0, 7.0)));
        let s = c(a, b);
        let z = c(zr, zi);
        let lhs = f.shift(s).eval(z).unwrap().to_complex().unwrap();
        let rhs = f.eval(z + s).unwrap().to_complex().unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }
}
