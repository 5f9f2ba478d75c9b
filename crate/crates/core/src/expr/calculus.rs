use num_complex::Complex64;

use super::{Expr, Node, PfTerm};

/// Exact derivative tree.
pub fn differentiate(e: &Expr) -> Expr {
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var => Expr::one(),
        Node::Monomial(k) => Expr::product(vec![Expr::constant(*k as f64), Expr::monomial(k - 1)]),
        Node::Sum(children) => Expr::sum(children.iter().map(differentiate).collect()),
        Node::Product(children) => {
            let terms = (0..children.len())
                .map(|i| {
                    let factors = children
                        .iter()
                        .enumerate()
                        .map(|(j, c)| if i == j { differentiate(c) } else { c.clone() })
                        .collect();
                    Expr::product(factors)
                })
                .collect();
            Expr::sum(terms)
        }
        Node::Quotient(n, d) => {
            let num = differentiate(n) * d.clone() - n.clone() * differentiate(d);
            Expr::quotient(num, d.clone() * d.clone())
        }
        Node::Shift(inner, c) => Expr::from_node(Node::Shift(differentiate(inner), *c)),
        Node::Compose(outer, inner) => {
            Expr::compose(differentiate(outer), inner.clone()) * differentiate(inner)
        }
        Node::FactorProduct { a, deriv } => {
            if (*deriv as usize) >= a.len() {
                return Expr::zero();
            }
            Expr::from_node(Node::FactorProduct {
                a: a.clone(),
                deriv: deriv + 1,
            })
        }
        Node::PartialFractions(terms) => {
            let d: Vec<PfTerm> = terms
                .iter()
                .map(|t| PfTerm {
                    coeff: -t.coeff * t.order as f64,
                    pole: t.pole,
                    order: t.order + 1,
                })
                .collect();
            Expr::from_node(Node::PartialFractions(d.into()))
        }
    }
}

pub fn nth_derivative(e: &Expr, n: u32) -> Expr {
    (0..n).fold(e.clone(), |acc, _| differentiate(&acc))
}

/// `z -> e(z + c)`. The shift stays symbolic; nested shifts collapse into one.
pub fn shift(e: &Expr, c: Complex64) -> Expr {
    if c == Complex64::new(0.0, 0.0) {
        return e.clone();
    }
    match e.node() {
        Node::Const(_) => e.clone(),
        Node::Shift(inner, c0) => shift(inner, c0 + c),
        _ => Expr::from_node(Node::Shift(e.clone(), c)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::evaluate;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            differentiate(&Expr::monomial(2)),
            Expr::product(vec![Expr::constant(2.0), Expr::var()])
        );
        assert_eq!(differentiate(&Expr::constant(c(3.0, 4.0))), Expr::zero());
        let g = Expr::partial_fractions(vec![PfTerm::simple(c(2.0, 1.0), c(1.0, -1.0))]).unwrap();
        let expected = Expr::partial_fractions(vec![PfTerm {
            coeff: c(-2.0, -1.0),
            pole: c(1.0, -1.0),
            order: 2,
        }])
        .unwrap();
        assert_eq!(differentiate(&g), expected);
    }

    #[test]
    fn shift_examples() {
        let v = evaluate(&shift(&Expr::var(), c(1.0, 0.0)), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.to_complex().unwrap().re, 1.0);
        let g = Expr::partial_fractions(vec![PfTerm::simple(c(1.0, 0.0), c(0.0, 0.0))]).unwrap();
        let reg = shift(&g, c(1.0, 0.0)).registry();
        assert_eq!(reg.poles().count(), 1);
        assert_eq!(reg.poles().next().unwrap().location, c(-1.0, 0.0));
    }

    #[test]
    fn quotient_rule_matches_closed_form() {
        // d/dz z/(z-3) = -3/(z-3)^2
        let f = Expr::var() / Expr::linear_factor(3.0);
        let d = differentiate(&f);
        let z = c(1.5, 2.0);
        let v = evaluate(&d, z).unwrap().to_complex().unwrap();
        let want = -3.0 / ((z - 3.0) * (z - 3.0));
        assert_relative_eq!((v - want).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn chain_rule_through_compose() {
        // H(z^4) with H = 1 + w/4: derivative z^3
        let h = Expr::factor_product(vec![c(4.0, 0.0)]).unwrap();
        let hz4 = Expr::compose(h, Expr::monomial(4));
        let d = differentiate(&hz4);
        let z = c(0.7, -0.3);
        let v = evaluate(&d, z).unwrap().to_complex().unwrap();
        assert_relative_eq!((v - z * z * z).norm(), 0.0, epsilon = 1e-14);
    }
}
