use merodiff::corpus;
use merodiff::nevanlinna::{build_epsilon_set, circle_avoidance, log_density, shadow_set, RadiusRule};
use merodiff::sampling::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = corpus::cube_product(60);
    let reg = f.registry();

    let eps = build_epsilon_set(&reg, RadiusRule::Exclusion, 10.0)?;
    println!("{} discs, Σ r/|a| = {:.3}", eps.len(), eps.relative_sum());

    let shadow = shadow_set(&eps, 1.0, 2e5);
    let (lower, upper) = log_density(&shadow, 2e5, 8);
    println!("radial shadow: log density in [{lower:.3}, {upper:.3}]");

    let grid = GridSpec::geometric(10.0, 2e5, 40).radii();
    let avoid = circle_avoidance(&eps, &grid);
    for r in grid {
        println!("{r:12.2} {}", if avoid.contains(r) { "hits the set" } else { "clear" });
    }

    let gund = build_epsilon_set(&reg, RadiusRule::Gundersen { alpha: 0.5 }, 0.0)?;
    println!("Gundersen discs: Σ r/|a| = {:.3}", gund.relative_sum());
    Ok(())
}
