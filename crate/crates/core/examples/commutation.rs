use merodiff::corpus;
use merodiff::diffops::{check_commutation, SampleRegion};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let region = SampleRegion::default();
    for (name, f) in corpus::standard_corpus().iter().take(6) {
        for n in [1, 2, 3] {
            let rep = check_commutation(f, n, 50, &region, 7)?;
            println!("{name:<18} n={n}  max |(Δⁿf)' - Δⁿf'| / |.| = {:.3e}", rep.max_rel_dev);
        }
    }
    Ok(())
}
