//! Round-trippable s-expression form.
//!
//! ```text
//! (const re[,im]) (var) (mono k) (sum e...) (prod e...) (quot n d)
//! (shift e c) (comp outer inner) (fprod a...) (dfprod d a...) (pf (c p m)...)
//! ```

use num_complex::Complex64;
use thiserror::Error;

use super::{Expr, Node, PfTerm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected token `{0}` at byte {1}")]
    Unexpected(String, usize),
    #[error("bad number `{0}`")]
    Number(String),
    #[error("unknown head `{0}`")]
    Head(String),
    #[error("{0}")]
    Invalid(String),
}

fn num(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:?}", c.re)
    } else {
        format!("{:?},{:?}", c.re, c.im)
    }
}

pub fn print(e: &Expr) -> String {
    let mut s = String::new();
    write(e, &mut s);
    s
}

fn write(e: &Expr, s: &mut String) {
    let list = |head: &str, items: &[Expr], s: &mut String| {
        s.push('(');
        s.push_str(head);
        for c in items {
            s.push(' ');
            write(c, s);
        }
        s.push(')');
    };
    match e.node() {
        Node::Const(c) => s.push_str(&format!("(const {})", num(*c))),
        Node::Var => s.push_str("(var)"),
        Node::Monomial(k) => s.push_str(&format!("(mono {k})")),
        Node::Sum(c) => list("sum", c, s),
        Node::Product(c) => list("prod", c, s),
        Node::Quotient(n, d) => list("quot", &[n.clone(), d.clone()], s),
        Node::Shift(inner, c) => {
            s.push_str("(shift ");
            write(inner, s);
            s.push(' ');
            s.push_str(&num(*c));
            s.push(')');
        }
        Node::Compose(o, i) => list("comp", &[o.clone(), i.clone()], s),
        Node::FactorProduct { a, deriv } => {
            if *deriv == 0 {
                s.push_str("(fprod");
            } else {
                s.push_str(&format!("(dfprod {deriv}"));
            }
            for x in a.iter() {
                s.push(' ');
                s.push_str(&num(*x));
            }
            s.push(')');
        }
        Node::PartialFractions(terms) => {
            s.push_str("(pf");
            for t in terms.iter() {
                s.push_str(&format!(" ({} {} {})", num(t.coeff), num(t.pole), t.order));
            }
            s.push(')');
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open(usize),
    Close(usize),
    Atom(&'a str, usize),
}

fn lex(src: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let b = src.as_bytes();
    let mut i = 0;
    while i < b.len() {
        match b[i] {
            b'(' => {
                out.push(Tok::Open(i));
                i += 1;
            }
            b')' => {
                out.push(Tok::Close(i));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < b.len() && !b[i].is_ascii_whitespace() && b[i] != b'(' && b[i] != b')' {
                    i += 1;
                }
                out.push(Tok::Atom(&src[start..i], start));
            }
        }
    }
    out
}

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Result<Tok<'a>, ParseError> {
        let t = self.toks.get(self.pos).cloned().ok_or(ParseError::Eof)?;
        self.pos += 1;
        Ok(t)
    }

    fn peek_close(&self) -> bool {
        matches!(self.toks.get(self.pos), Some(Tok::Close(_)))
    }

    fn open(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            Tok::Open(_) => Ok(()),
            t => Err(unexpected(&t)),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            Tok::Close(_) => Ok(()),
            t => Err(unexpected(&t)),
        }
    }

    fn atom(&mut self) -> Result<&'a str, ParseError> {
        match self.next()? {
            Tok::Atom(a, _) => Ok(a),
            t => Err(unexpected(&t)),
        }
    }

    fn complex(&mut self) -> Result<Complex64, ParseError> {
        let a = self.atom()?;
        let f = |s: &str| s.parse::<f64>().map_err(|_| ParseError::Number(a.to_string()));
        match a.split_once(',') {
            Some((re, im)) => Ok(Complex64::new(f(re)?, f(im)?)),
            None => Ok(Complex64::new(f(a)?, 0.0)),
        }
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let a = self.atom()?;
        a.parse().map_err(|_| ParseError::Number(a.to_string()))
    }

    fn children(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut v = Vec::new();
        while !self.peek_close() {
            v.push(self.expr()?);
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.open()?;
        let head = self.atom()?;
        let invalid = |e: super::ExprError| ParseError::Invalid(e.to_string());
        let e = match head {
            "const" => Expr::constant(self.complex()?),
            "var" => Expr::var(),
            "mono" => match self.uint()? {
                0 => return Err(ParseError::Invalid("(mono 0)".into())),
                k => Expr::from_node(Node::Monomial(k)),
            },
            "sum" => Expr::from_node(Node::Sum(self.children()?)),
            "prod" => Expr::from_node(Node::Product(self.children()?)),
            "quot" => {
                let n = self.expr()?;
                let d = self.expr()?;
                Expr::from_node(Node::Quotient(n, d))
            }
            "shift" => {
                let inner = self.expr()?;
                let c = self.complex()?;
                Expr::from_node(Node::Shift(inner, c))
            }
            "comp" => {
                let o = self.expr()?;
                let i = self.expr()?;
                Expr::compose(o, i)
            }
            "fprod" | "dfprod" => {
                let deriv = if head == "dfprod" { self.uint()? } else { 0 };
                let mut a = Vec::new();
                while !self.peek_close() {
                    a.push(self.complex()?);
                }
                Expr::factor_product_deriv(a, deriv).map_err(invalid)?
            }
            "pf" => {
                let mut terms = Vec::new();
                while !self.peek_close() {
                    self.open()?;
                    let coeff = self.complex()?;
                    let pole = self.complex()?;
                    let order = self.uint()?;
                    self.close()?;
                    terms.push(PfTerm { coeff, pole, order });
                }
                Expr::partial_fractions(terms).map_err(invalid)?
            }
            other => return Err(ParseError::Head(other.to_string())),
        };
        self.close()?;
        Ok(e)
    }
}

fn unexpected(t: &Tok<'_>) -> ParseError {
    match t {
        Tok::Open(i) => ParseError::Unexpected("(".into(), *i),
        Tok::Close(i) => ParseError::Unexpected(")".into(), *i),
        Tok::Atom(a, i) => ParseError::Unexpected(a.to_string(), *i),
    }
}

/// Parse the output of [`Expr::to_text`]. Node structure is preserved
/// exactly; no simplification is applied.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src),
        pos: 0,
    };
    let e = p.expr()?;
    match p.toks.get(p.pos) {
        None => Ok(e),
        Some(t) => Err(unexpected(t)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn prints_and_parses_sample() {
        let h = Expr::factor_product(vec![c(4.0, 0.0), c(0.1, -2.5)]).unwrap();
        let e = Expr::compose(h, Expr::monomial(4)) / Expr::var() + Expr::linear_factor(c(1.0, 2.0));
        let s = print(&e);
        assert_eq!(parse(&s).unwrap(), e);
        assert!(s.contains("(comp (fprod 4.0 0.1,-2.5) (mono 4))"), "{s}");
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse("(foo)"), Err(ParseError::Head(_))));
        assert!(matches!(parse("(var"), Err(ParseError::Eof)));
        assert!(parse("(var) (var)").is_err());
        assert!(parse("(const x)").is_err());
        assert!(parse("(fprod 0)").is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6..1e6f64, any::<f64>().prop_filter("finite nonzero", |x| x.is_finite() && *x != 0.0)]
    }

    fn cplx() -> impl Strategy<Value = Complex64> {
        (finite(), prop_oneof![Just(0.0), finite()]).prop_map(|(a, b)| c(a, b))
    }

    fn leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            cplx().prop_map(Expr::constant),
            Just(Expr::var()),
            (2u32..9).prop_map(Expr::monomial),
            (prop::collection::vec(cplx(), 1..5), 0u32..3)
                .prop_map(|(a, d)| Expr::factor_product_deriv(a, d).unwrap()),
            prop::collection::vec((cplx(), 1u32..4), 1..4).prop_map(|v| {
                let terms = v
                    .into_iter()
                    .enumerate()
                    .map(|(i, (coeff, order))| PfTerm {
                        coeff,
                        pole: c(i as f64 * 3.0 + 0.5, -(i as f64)),
                        order,
                    })
                    .collect();
                Expr::partial_fractions(terms).unwrap()
            }),
        ]
    }

    fn tree() -> impl Strategy<Value = Expr> {
        leaf().prop_recursive(4, 32, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Expr::from_node(Node::Sum(v))),
                prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Expr::from_node(Node::Product(v))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::from_node(Node::Quotient(a, b))),
                (inner.clone(), cplx()).prop_map(|(a, s)| Expr::from_node(Node::Shift(a, s))),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::compose(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(e in tree()) {
            let s = print(&e);
            prop_assert_eq!(parse(&s).unwrap(), e);
        }
    }
}
