use merodiff::counterexample::{build_bundle, OneZeroSpec};
use merodiff::diffops::{binomial_difference_eval, check_commutation, forward_difference, SampleRegion};
use merodiff::{Expr, PfTerm};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `Δⁿf(z)` by plain complex arithmetic on the values `f(z + k)`.
fn brute(f: impl Fn(Complex64) -> Complex64, n: u32, z: Complex64) -> Complex64 {
    let mut vals: Vec<Complex64> = (0..=n).map(|k| f(z + k as f64)).collect();
    for _ in 0..n {
        vals = vals.windows(2).map(|w| w[1] - w[0]).collect();
    }
    vals[0]
}

#[test]
fn third_difference_of_cube_is_six() {
    let d = forward_difference(&Expr::monomial(3), 3).unwrap().expr;
    for z in [c(0.0, 0.0), c(-17.5, 3.0), c(1e3, -2e3)] {
        assert!((brute(|w| w * w * w, 3, z) - 6.0).norm() < 1e-6 * (1.0 + z.norm().powi(3)) * 1e-9);
        let v = d.eval(z).unwrap().to_complex().unwrap();
        assert!((v - 6.0).norm() < 1e-9, "{v}");
        assert!((binomial_difference_eval(&Expr::monomial(3), 3, z).unwrap().to_complex().unwrap() - 6.0).norm() < 1e-9);
    }
}

#[test]
fn second_difference_of_cube_commutes_with_derivative() {
    // Δ²z³ = 6z + 6, so both sides equal 6
    let rep = check_commutation(&Expr::monomial(3), 2, 100, &SampleRegion::default(), 5).unwrap();
    assert!(rep.max_rel_dev <= 1e-13, "{rep:?}");
}

#[test]
fn simple_pole_commutation_against_closed_form() {
    let p = c(0.5, -1.25);
    let f = Expr::partial_fractions(vec![PfTerm::simple(c(1.0, 0.0), p)]).unwrap();
    let rep = check_commutation(&f, 1, 100, &SampleRegion::default(), 9).unwrap();
    assert!(rep.max_rel_dev <= 1e-12);
    // Δ(1/(z−p))′ = −1/(z+1−p)² + 1/(z−p)²
    let d = forward_difference(&f, 1).unwrap().expr.derivative();
    let z = c(2.0, 1.0);
    let want = -1.0 / ((z + 1.0 - p) * (z + 1.0 - p)) + 1.0 / ((z - p) * (z - p));
    let got = d.eval(z).unwrap().to_complex().unwrap();
    assert!((got - want).norm() <= 1e-14 * want.norm());
}

#[test]
fn one_zero_f_commutation() {
    let b = build_bundle(&OneZeroSpec::new(vec![1, 4], 4.0).unwrap(), 256).unwrap();
    let region = SampleRegion {
        radius: 10.0,
        pole_margin: 0.1,
        retries: 100,
    };
    let rep = check_commutation(&b.f, 1, 50, &region, 2).unwrap();
    assert!(rep.max_rel_dev <= 1e-10, "{rep:?}");
}

#[test]
fn binomial_and_recurrence_match_brute_force_on_rational() {
    let f = Expr::quotient(Expr::one(), Expr::monomial(2) + Expr::constant(4.0));
    let z = c(0.3, 0.4);
    for n in 1..=4 {
        let want = brute(|w| 1.0 / (w * w + 4.0), n, z);
        let rec = forward_difference(&f, n).unwrap().expr.eval(z).unwrap().to_complex().unwrap();
        let bin = binomial_difference_eval(&f, n, z).unwrap().to_complex().unwrap();
        assert!((rec - want).norm() <= 1e-12 * want.norm());
        assert!((bin - want).norm() <= 1e-12 * want.norm());
    }
}

proptest! {
    #[test]
    fn difference_is_linear(
        a in -3.0..3.0f64, b in -3.0..3.0f64, n in 1u32..4,
        zr in -2.0..2.0f64, zi in 0.5..2.0f64,
    ) {
        let f = Expr::monomial(4);
        let g = Expr::quotient(Expr::one(), Expr::linear_factor(c(0.0, -3.0)));
        let z = c(zr, zi);
        let combo = f.scale(a) + g.scale(b);
        let lhs = binomial_difference_eval(&combo, n, z).unwrap().to_complex().unwrap();
        let fa = binomial_difference_eval(&f, n, z).unwrap().to_complex().unwrap();
        let gb = binomial_difference_eval(&g, n, z).unwrap().to_complex().unwrap();
        let rhs = a * fa + b * gb;
        prop_assert!((lhs - rhs).norm() <= 1e-11 * (a.abs() * fa.norm() + b.abs() * gb.norm()).max(1e-300));
    }
}

#[test]
fn second_order_ratio_approaches_one_for_slow_product() {
    use merodiff::corpus;
    use merodiff::diffops::second_order_ratio;
    let f = corpus::cube_product(200);
    // on the positive axis every factor is far from its zero
    let near = second_order_ratio(&f, c(50.0, 0.0), c(1.0, 0.0)).unwrap();
    let far = second_order_ratio(&f, c(5000.0, 0.0), c(1.0, 0.0)).unwrap();
    assert!((far - 1.0).abs() < (near - 1.0).abs(), "{near} {far}");
    assert!(far < 1.05, "{far}");
}
