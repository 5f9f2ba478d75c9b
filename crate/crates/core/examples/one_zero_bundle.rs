//! Builds the entire function g with a single zero and the meromorphic f
//! with Δf = g, then checks the identities tying them together.

use merodiff::counterexample::{build_bundle, verify_bundle, OneZeroSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = OneZeroSpec::standard();
    let bundle = build_bundle(&spec, 256)?;
    for r in &bundle.residues {
        println!("k={} n={} c = {} + {}i  ln|H'| = {:.3}", r.k, r.n, r.c_decimal.0, r.c_decimal.1, r.log_abs_h_prime);
    }
    println!("decay of n_k|c_k|: {:?}", bundle.residue_decay());

    let rep = verify_bundle(&bundle, 200, 3, 256)?;
    println!("telescoping  {:.3e}", rep.telescoping.max_rel_err);
    println!("rational     {:.3e}", rep.rational_identity.max_rel_err);
    println!("winding      {} (expected {})", rep.winding_net, rep.winding_expected);
    println!("zeros of g   {}", rep.zeros_in_disk);
    println!("passed       {}", rep.passed);

    println!("{}", serde_json::to_string_pretty(&bundle.export())?);
    Ok(())
}
