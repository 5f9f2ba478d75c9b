use merodiff::counterexample::{build_bundle, OneZeroSpec};
use merodiff::nevanlinna::keldysh_check;
use merodiff::sampling::GridSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = build_bundle(&OneZeroSpec::standard(), 256)?;
    let radii = GridSpec::geometric(2.0, 1000.0, 30).radii();
    let rep = keldysh_check(&b.f, &b.g, &radii)?;
    for (r, s) in rep.radii.iter().zip(&rep.sums) {
        println!("{r:10.3}  m(r,f) + m(r,g) = {s:.5}");
    }
    println!("bottom decile {:.4}, top decile {:.4}", rep.bottom_median, rep.top_median);
    Ok(())
}
