//! Immutable expression trees for the meromorphic functions used by the
//! experiments, with overflow-safe evaluation, exact symbolic derivatives,
//! argument shifts and zero/pole bookkeeping.

mod calculus;
mod eval;
mod registry;
mod text;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

pub use calculus::{differentiate, nth_derivative, shift};
pub use eval::{evaluate, evaluate_ext, evaluate_with, EvalConfig};
pub(crate) use eval::{combine_est, eval_ext, evaluate_est};
pub use registry::{registry, PointKind, PoleZeroRegistry, RegistryEntry, MERGE_TOL};
pub use text::{parse, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("evaluation point {z} lies on a pole")]
    PoleHit { z: Complex64 },
    #[error("cancellation lost {lost_digits:.1} decimal digits beyond the extended-precision budget")]
    PrecisionLoss { lost_digits: f64 },
    #[error("modulus exp({logmag}) overflows f64 (direction {arg} rad)")]
    Overflow { logmag: f64, arg: f64 },
    #[error("zero set of the expression is not algebraically known")]
    Unknowable,
    #[error("invalid node: {0}")]
    InvalidNode(String),
}

/// One term `coeff / (z - pole)^order` of a partial-fraction node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PfTerm {
    pub coeff: Complex64,
    pub pole: Complex64,
    pub order: u32,
}

impl PfTerm {
    pub fn simple(coeff: Complex64, pole: Complex64) -> Self {
        PfTerm {
            coeff,
            pole,
            order: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var,
    /// `z^k`, `k >= 1`.
    Monomial(u32),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    /// `z -> child(z + c)`.
    Shift(Expr, Complex64),
    /// `z -> outer(inner(z))`.
    Compose(Expr, Expr),
    /// `d^deriv/dz^deriv  prod_k (1 + z / a_k)`.
    FactorProduct { a: Arc<[Complex64]>, deriv: u32 },
    /// `sum_k coeff_k / (z - pole_k)^order_k` with distinct poles.
    PartialFractions(Arc<[PfTerm]>),
}

/// Shared handle to an immutable expression node.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", text::print(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", text::print(self))
    }
}

fn is_const(e: &Expr, c: f64) -> bool {
    matches!(e.node(), Node::Const(v) if *v == Complex64::new(c, 0.0))
}

impl Expr {
    pub fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::from_node(Node::Const(c.into()))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn var() -> Self {
        Self::from_node(Node::Var)
    }

    /// `z^k`; `k = 0` gives the constant 1 and `k = 1` the bare variable.
    pub fn monomial(k: u32) -> Self {
        match k {
            0 => Self::one(),
            1 => Self::var(),
            _ => Self::from_node(Node::Monomial(k)),
        }
    }

    /// Sum with zero constants dropped; a single survivor is returned as is.
    pub fn sum(children: Vec<Expr>) -> Self {
        let mut kept: Vec<Expr> = children.into_iter().filter(|c| !is_const(c, 0.0)).collect();
        match kept.len() {
            0 => Self::zero(),
            1 => kept.pop().unwrap(),
            _ => Self::from_node(Node::Sum(kept)),
        }
    }

    /// Product with unit constants dropped and zero constants absorbing.
    pub fn product(children: Vec<Expr>) -> Self {
        if children.iter().any(|c| is_const(c, 0.0)) {
            return Self::zero();
        }
        let mut kept: Vec<Expr> = children.into_iter().filter(|c| !is_const(c, 1.0)).collect();
        match kept.len() {
            0 => Self::one(),
            1 => kept.pop().unwrap(),
            _ => Self::from_node(Node::Product(kept)),
        }
    }

    pub fn quotient(num: Expr, den: Expr) -> Self {
        if is_const(&den, 1.0) {
            return num;
        }
        if is_const(&num, 0.0) {
            return Self::zero();
        }
        Self::from_node(Node::Quotient(num, den))
    }

    pub fn shift(&self, c: impl Into<Complex64>) -> Self {
        shift(self, c.into())
    }

    pub fn compose(outer: Expr, inner: Expr) -> Self {
        Self::from_node(Node::Compose(outer, inner))
    }

    /// `prod_k (1 + z / a_k)`; every `a_k` must be nonzero and finite.
    pub fn factor_product(a: Vec<Complex64>) -> Result<Self, ExprError> {
        Self::factor_product_deriv(a, 0)
    }

    pub(crate) fn factor_product_deriv(a: Vec<Complex64>, deriv: u32) -> Result<Self, ExprError> {
        if let Some(bad) = a.iter().find(|x| (x.re == 0.0 && x.im == 0.0) || !x.re.is_finite() || !x.im.is_finite()) {
            return Err(ExprError::InvalidNode(format!("factor product with A = {bad}")));
        }
        Ok(Self::from_node(Node::FactorProduct {
            a: a.into(),
            deriv,
        }))
    }

    /// Sum of principal parts; poles must be pairwise distinct.
    pub fn partial_fractions(terms: Vec<PfTerm>) -> Result<Self, ExprError> {
        for (i, t) in terms.iter().enumerate() {
            if t.order == 0 {
                return Err(ExprError::InvalidNode("partial fraction of order 0".into()));
            }
            let tol = MERGE_TOL * (1.0 + t.pole.norm());
            if terms[..i].iter().any(|s| (s.pole - t.pole).norm() <= tol) {
                return Err(ExprError::InvalidNode(format!("repeated pole {}", t.pole)));
            }
        }
        Ok(Self::from_node(Node::PartialFractions(terms.into())))
    }

    /// `z - p` as a shifted variable, so its zero is registered exactly.
    pub fn linear_factor(p: impl Into<Complex64>) -> Self {
        Self::var().shift(-p.into())
    }

    /// `lead * prod (z - r_i)`.
    pub fn from_roots(lead: impl Into<Complex64>, roots: &[Complex64]) -> Self {
        let mut f: Vec<Expr> = vec![Self::constant(lead)];
        f.extend(roots.iter().map(|&r| Self::linear_factor(r)));
        Self::product(f)
    }

    /// `sum_k c_k z^k` built from constants and monomials.
    pub fn polynomial(coeffs: &[Complex64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(k, &c)| Self::product(vec![Self::constant(c), Self::monomial(k as u32)]))
            .collect();
        Self::sum(terms)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        Self::product(vec![Self::constant(c), self.clone()])
    }

    pub fn derivative(&self) -> Self {
        differentiate(self)
    }

    pub fn eval(&self, z: Complex64) -> Result<crate::LogComplex, ExprError> {
        evaluate(self, z)
    }

    pub fn registry(&self) -> PoleZeroRegistry {
        registry(self)
    }

    pub fn to_text(&self) -> String {
        text::print(self)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::quotient(self, rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-*c),
            _ => Expr::product(vec![Expr::constant(-1.0), self]),
        }
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        self.clone() + rhs.clone()
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self.clone() - rhs.clone()
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.clone() * rhs.clone()
    }
}

impl Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.clone() / rhs.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smart_constructors_fold_trivial_constants() {
        let z = Expr::var();
        assert_eq!(Expr::sum(vec![Expr::zero(), z.clone()]), z);
        assert_eq!(Expr::product(vec![Expr::one(), z.clone()]), z);
        assert_eq!(Expr::product(vec![Expr::zero(), z.clone()]), Expr::zero());
        assert_eq!(Expr::monomial(1), z);
        assert_eq!(-Expr::constant(2.0), Expr::constant(-2.0));
    }

    #[test]
    fn invalid_nodes_are_rejected() {
        assert!(Expr::factor_product(vec![Complex64::new(0.0, 0.0)]).is_err());
        let t = PfTerm::simple(Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0));
        assert!(Expr::partial_fractions(vec![t, t]).is_err());
    }
}
