//! Proximity, integrated counting function and characteristic of
//! a meromorphic function on a geometric radius grid.

use merodiff::corpus;
use merodiff::nevanlinna::{growth_profile, order_estimate};
use merodiff::sampling::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // zeros at -2^k, poles at 3·2^k
    let f = corpus::geometric_quotient(30);
    let radii = GridSpec::geometric(1.0, 1e4, 24).radii();
    let p = growth_profile(&f, &radii)?;
    p.write_csv(std::io::stdout())?;
    let (order, lower) = order_estimate(&p)?;
    println!("order ~ {order:.3}, lower order ~ {lower:.3}");
    for (req, used) in &p.perturbed {
        println!("radius {req} moved to {used}");
    }
    Ok(())
}
