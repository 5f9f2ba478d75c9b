//! Log-form evaluation keeps huge products finite; cancelling sums fall
//! back to extended precision.

use merodiff::corpus;
use merodiff::expr::{evaluate_ext, evaluate_with, EvalConfig};
use merodiff::Expr;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = corpus::cube_product(1000);
    let v = f.eval(Complex64::new(1e7, 1e7))?;
    println!("ln|f(1e7+1e7i)| = {:.6}, arg = {:.6}", v.logmag(), v.arg());

    // (z+1)² − z² = 2z + 1 loses every digit in double precision at z = 1e25
    let z = Complex64::new(1e25, 0.0);
    let e = Expr::monomial(2).shift(1.0) - Expr::monomial(2);
    let v = evaluate_with(&e, z, &EvalConfig::default())?;
    println!("(z+1)² − z² = {:.15e}", v.to_complex()?.re);
    let (re, _) = evaluate_ext(&e, z, 256)?.to_decimal();
    println!("256-bit:      {re}");
    Ok(())
}
