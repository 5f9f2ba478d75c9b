use merodiff::corpus;
use merodiff::nevanlinna::{admissible_radius, arc_theta};
use merodiff::sampling::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = corpus::cube_product(500);
    let moduli: Vec<f64> = h.registry().zeros().map(|e| e.location.norm()).collect();
    for r in GridSpec::geometric(5.0, 1e6, 15).radii() {
        let r = admissible_radius(r, &moduli)?;
        let a = arc_theta(&h, r)?;
        println!(
            "r = {r:12.2}  longest arc {:.4}  ln min|H| = {:9.3}  {}",
            a.theta,
            a.log_min_modulus,
            if a.min_modulus_flag { "min|H| > 1" } else { "" }
        );
    }
    Ok(())
}
