use merodiff::wiman::{central_index, central_index_order, central_index_profile, taylor_coeffs, wv_ratio_check};
use merodiff::Expr;
use num_complex::Complex64;

fn exp_series(deg: usize) -> Expr {
    let mut fact = 1.0;
    let coeffs: Vec<Complex64> = (0..=deg)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            Complex64::new(1.0 / fact, 0.0)
        })
        .collect();
    Expr::polynomial(&coeffs)
}

#[test]
fn vieta_coefficient_of_two_factor_product() {
    // (1 + z/4)(1 + z/64) = 1 + (1/4 + 1/64) z + z²/256
    let f = Expr::factor_product(vec![Complex64::new(4.0, 0.0), Complex64::new(64.0, 0.0)]).unwrap();
    let t = taylor_coeffs(&f, 4, 2.0).unwrap();
    let a1 = t.coeffs[1].to_complex().unwrap();
    assert!((a1.re - (0.25 + 1.0 / 64.0)).abs() < 1e-13, "{a1}");
    let a2 = t.coeffs[2].to_complex().unwrap();
    assert!((a2.re - 1.0 / 256.0).abs() < 1e-14);
}

#[test]
fn exp_series_central_index_is_r() {
    // brute force: argmax_k 5^k/k!
    let mut best = (0, 0.0f64);
    let mut term = 1.0;
    for k in 0..40 {
        if k > 0 {
            term *= 5.0 / k as f64;
        }
        if term >= best.1 * (1.0 - 1e-12) {
            best = (k, term);
        }
    }
    assert_eq!(best.0, 5);
    let (_, n) = central_index(&exp_series(60), 5.0, 256).unwrap();
    assert_eq!(n, 5);
}

#[test]
fn exp_series_wiman_ratio() {
    let rec = wv_ratio_check(&exp_series(60), 1, 10.0).unwrap();
    assert!(rec.deviation < 0.1, "{rec:?}");
}

#[test]
fn exp_series_index_order_near_one() {
    // N(r) = ⌊r⌋ for the exponential, so ln N/ln r ≤ 1 and tends to 1
    let radii: Vec<f64> = (0..16).map(|i| 0.04 * 1000f64.powf(i as f64 / 15.0)).collect();
    let p = central_index_profile(&exp_series(120), &radii, 512).unwrap();
    assert!(p.is_monotone());
    let o = central_index_order(&p).unwrap();
    assert!((o - 1.0).abs() < 0.1, "{o}");
}

#[test]
fn index_powers_are_small_against_r_for_slow_growth() {
    // order 1/3: N(r)ⁿ/r should fall over the top decade for n = 1, 2
    let f = merodiff::corpus::cube_product(1000);
    let radii: Vec<f64> = (0..9).map(|i| 1e5 * 10f64.powf(i as f64 / 8.0)).collect();
    let p = central_index_profile(&f, &radii, 1 << 14).unwrap();
    for n in [1, 2] {
        let q = p.power_ratio(n);
        assert!(q.last().unwrap() < q.first().unwrap(), "n={n}: {q:?}");
        // brute-force value at the top radius
        let top = p.n_vals.last().copied().unwrap() as f64;
        assert!((q.last().unwrap() - top.powi(n as i32) / radii[8]).abs() < 1e-12);
    }
}
