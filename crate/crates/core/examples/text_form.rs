//! The s-expression form round-trips node for node.

use merodiff::expr::parse;
use merodiff::{Expr, PfTerm};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = Complex64::new;
    let h = Expr::factor_product(vec![c(4.0, 0.0), c(64.0, 0.0)])?;
    let f = Expr::compose(h, Expr::monomial(4)) / Expr::var()
        + Expr::partial_fractions(vec![PfTerm::simple(c(0.5, 0.0), c(1.0, 1.0)), PfTerm { coeff: c(1.0, 0.0), pole: c(-2.0, 0.0), order: 2 }])?;
    let text = f.to_text();
    println!("{text}");
    let back = parse(&text)?;
    assert_eq!(back, f);
    println!("derivative: {}", f.derivative().to_text());

    let user = parse("(quot (sum (mono 2) (const 1.0)) (shift (var) -3.0))")?;
    println!("(z²+1)/(z-3) at 2i: {}", user.eval(c(0.0, 2.0))?.to_complex()?);
    Ok(())
}
