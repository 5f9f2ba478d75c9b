//! Forward differences two ways: the shift recurrence as an expression tree
//! and the direct binomial sum.

use merodiff::diffops::{binomial_difference_eval, forward_difference};
use merodiff::Expr;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // f(z) = (z^3 - 1 - i) / (z - 0.5 + 2.5i)
    let f = Expr::quotient(
        Expr::monomial(3) - Expr::constant(Complex64::new(1.0, 1.0)),
        Expr::linear_factor(Complex64::new(0.5, -2.5)),
    );
    let z = Complex64::new(1.3, -0.7);
    for n in 1..=4 {
        let d = forward_difference(&f, n)?;
        let tree = d.expr.eval(z)?;
        let direct = binomial_difference_eval(&f, n, z)?;
        println!(
            "n = {n}: recurrence {:+.12e}  binomial {:+.12e}",
            tree.to_complex()?,
            direct.to_complex()?
        );
    }

    // third difference of a cubic is constant 6
    let d3 = forward_difference(&Expr::monomial(3), 3)?.expr;
    println!("Δ³z³ at 10+5i = {}", d3.eval(Complex64::new(10.0, 5.0))?.to_complex()?);
    Ok(())
}
