use merodiff::corpus;
use merodiff::sampling::GridSpec;
use merodiff::wiman;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = corpus::cube_product(400);
    let radii = GridSpec::geometric(1e2, 1e5, 12).radii();
    let profile = wiman::central_index_profile(&f, &radii, 1 << 14)?;
    profile.write_csv(std::io::stdout())?;
    println!("order from central index: {:.4}", wiman::central_index_order(&profile)?);

    for (&r, &big_n) in profile.r_grid.iter().zip(&profile.n_vals) {
        let rec = wiman::wv_ratio_with_index(&f, 2, r, big_n)?;
        println!("r = {r:10.1}  N = {big_n:4}  |f''z²/(f N²) - 1| = {:.3e}", rec.deviation);
    }
    Ok(())
}
