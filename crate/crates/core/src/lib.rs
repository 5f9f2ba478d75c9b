pub mod contour;
pub mod corpus;
pub mod counterexample;
pub mod diffops;
pub mod experiment;
pub mod expr;
pub mod ext;
pub mod logc;
pub mod nevanlinna;
pub mod sampling;
pub mod wiman;

pub use expr::{Expr, ExprError, Node, PfTerm};
pub use logc::LogComplex;
