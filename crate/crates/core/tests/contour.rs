use merodiff::contour::{self, Contour, LocateOptions};
use merodiff::counterexample::{build_bundle, OneZeroSpec};
use merodiff::diffops::divided_difference;
use merodiff::Expr;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn located_boxes_match_closed_form_roots() {
    let roots = [c(1.5, 0.25), c(-0.75, 1.0), c(-0.75, -1.0)];
    let f = Expr::quotient(Expr::from_roots(1.0, &roots), Expr::linear_factor(c(0.0, 2.5)));
    let boxes = contour::locate_zeros(&f, c(-2.1, -1.9), c(2.3, 2.2), 60, &LocateOptions::default()).unwrap();
    assert_eq!(boxes.iter().map(|b| b.count).sum::<i64>(), 3);
    for r in roots {
        let b = boxes.iter().find(|b| (b.center() - r).norm() < 1e-8).unwrap_or_else(|| panic!("{r} not found"));
        assert!(b.resolved);
    }
}

#[test]
fn one_zero_g_has_a_single_zero() {
    let b = build_bundle(&OneZeroSpec::standard(), 256).unwrap();
    let n1 = b.spec.n_seq[0] as f64;
    let nk = *b.spec.n_seq.last().unwrap() as f64;
    let small = contour::winding_count(&b.g, &Contour::circle(c(0.0, 0.0), n1).unwrap()).unwrap();
    assert_eq!(small.net, 1);
    assert_eq!(contour::count_zeros_in_disk(&b.g, 2.0 * nk).unwrap(), 1);
}

#[test]
fn divided_difference_of_cubic_matches_quadratic_formula() {
    // f = (z − 1)(z + 2)(z − 3i): Δf is a quadratic with no root shared with f
    let roots = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)];
    let f = Expr::from_roots(1.0, &roots);
    let g = divided_difference(&f, 1).unwrap();
    let p = |z: Complex64| roots.iter().fold(c(1.0, 0.0), |acc, r| acc * (z - r));
    // coefficients of p(z+1) − p(z) from three samples
    let (d0, d1, dm) = (p(c(1.0, 0.0)) - p(c(0.0, 0.0)), p(c(2.0, 0.0)) - p(c(1.0, 0.0)), p(c(0.0, 0.0)) - p(c(-1.0, 0.0)));
    let qa = (d1 + dm - 2.0 * d0) / 2.0;
    let qb = (d1 - dm) / 2.0;
    let disc = (qb * qb - 4.0 * qa * d0).sqrt();
    let zs = [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)];
    let poles: Vec<(Complex64, u32)> = roots.iter().map(|&r| (r, 1)).collect();
    let opts = LocateOptions {
        poles: Some(poles),
        ..Default::default()
    };
    let boxes = contour::locate_zeros(&g, c(-6.1, -5.9), c(6.2, 6.3), 60, &opts).unwrap();
    assert_eq!(boxes.iter().map(|b| b.count).sum::<i64>(), 2);
    for z in zs {
        assert!(boxes.iter().any(|b| (b.center() - z).norm() < 1e-7), "{z} in {boxes:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn winding_equals_direct_count(
        zeros in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 0..5),
        poles in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 0..4),
        r in 0.5..4.0f64,
    ) {
        let zeros: Vec<Complex64> = zeros.into_iter().map(|(a, b)| c(a, b)).collect();
        let poles: Vec<Complex64> = poles.into_iter().map(|(a, b)| c(a, b)).collect();
        prop_assume!(zeros.iter().chain(&poles).all(|p| (p.norm() - r).abs() > 1e-3));
        prop_assume!(zeros.iter().all(|z| poles.iter().all(|p| (z - p).norm() > 1e-6)));
        let f = Expr::quotient(Expr::from_roots(1.0, &zeros), Expr::from_roots(1.0, &poles));
        let want = zeros.iter().filter(|z| z.norm() < r).count() as i64 - poles.iter().filter(|p| p.norm() < r).count() as i64;
        let got = contour::winding_count(&f, &Contour::circle(c(0.0, 0.0), r).unwrap()).unwrap().net;
        prop_assert_eq!(got, want);
    }
}
