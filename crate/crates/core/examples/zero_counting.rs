//! Argument-principle counting on circles and rectangles, then quadtree
//! localization of the zeros.

use merodiff::contour::{self, Contour, LocateOptions};
use merodiff::Expr;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = Complex64::new;
    // zeros at 1, -2, 0.5+1.5i (double); poles at 3i and -1-1i
    let num = Expr::from_roots(1.0, &[c(1.0, 0.0), c(-2.0, 0.0), c(0.5, 1.5), c(0.5, 1.5)]);
    let den = Expr::from_roots(1.0, &[c(0.0, 3.0), c(-1.0, -1.0)]);
    let f = Expr::quotient(num, den);

    for r in [0.7, 1.2, 1.8, 2.5, 3.5] {
        let res = contour::winding_count(&f, &Contour::circle(c(0.0, 0.0), r)?)?;
        println!("|z| = {r}: zeros - poles = {} ({} phase steps)", res.net, res.phase_steps);
    }
    let rect = Contour::rect(c(0.2, 0.2), c(2.0, 2.0))?;
    println!("rect [0.2,2]x[0.2,2]: net {}", contour::winding_count(&f, &rect)?.net);

    let boxes = contour::locate_zeros(&f, c(-2.7, -2.3), c(2.3, 2.9), 40, &LocateOptions::default())?;
    for b in &boxes {
        println!("zero x{} near {:.9} (±{:.1e})", b.count, b.center(), b.radius());
    }
    contour::write_zero_csv(&boxes, std::io::stdout())?;
    Ok(())
}
