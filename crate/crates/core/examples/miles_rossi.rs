use merodiff::corpus;
use merodiff::nevanlinna::{miles_rossi_bound, miles_rossi_measure};
use merodiff::sampling::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = corpus::cube_product(1000);
    let gamma = 0.5;
    let bound = miles_rossi_bound(gamma, 1.0, 1.0 / 3.0);
    println!("bound {bound:.4e}");
    for r in GridSpec::geometric(50.0, 5e5, 10).radii() {
        let m = miles_rossi_measure(&f, r, gamma)?;
        println!("r = {r:10.1}  n(r) = {:4}  measure {:.4}  {}", m.zero_count, m.measure, m.measure > bound);
    }
    Ok(())
}
