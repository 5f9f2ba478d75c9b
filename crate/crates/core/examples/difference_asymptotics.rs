//! Δⁿf against f⁽ⁿ⁾ on circles, away from discs around the zeros of
//! f, f', ..., f⁽ⁿ⁾.

use merodiff::corpus;
use merodiff::diffops::{asymptotic_difference_check, AsymptoticOptions};
use merodiff::expr::PoleZeroRegistry;
use merodiff::nevanlinna::{build_epsilon_set, RadiusRule};
use merodiff::sampling::GridSpec;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = corpus::cube_product(120);
    let radii = GridSpec::geometric(10.0, 1000.0, 16).radii();
    for n in [1, 2] {
        let mut zeros = Vec::new();
        for j in 0..=n {
            zeros.extend(corpus::interlaced_derivative_zeros(&f, j)?.into_iter().map(|x| Complex64::new(x, 0.0)));
        }
        let reg = PoleZeroRegistry::from_points(&zeros, &[], true, true);
        let eps = build_epsilon_set(&reg, RadiusRule::Exclusion, 10.0)?;
        let rep = asymptotic_difference_check(&f, n, 1.0, &radii, &eps, &AsymptoticOptions::default())?;
        println!("n = {n}, order used {:.3}", rep.order_estimate);
        for rec in &rep.records {
            match rec.max_dev {
                Some(d) => println!("  r = {:9.2}  max deviation {d:.3e}  excluded {:.2}", rec.r, rec.excluded_fraction),
                None => println!("  r = {:9.2}  fully excluded", rec.r),
            }
        }
    }
    Ok(())
}
