use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Expr, ExprError, Node};

/// Relative tolerance, in units of `1 + |p|`, for identifying two locations.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Zero,
    Pole,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub location: Complex64,
    pub multiplicity: u32,
    pub kind: PointKind,
}

/// Known zeros and poles of an expression, sorted by modulus.
///
/// Completeness is tracked separately for zeros and poles: a partial-fraction
/// sum has a fully known pole set but an unknown zero set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleZeroRegistry {
    entries: Vec<RegistryEntry>,
    zeros_complete: bool,
    poles_complete: bool,
}

fn same(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= MERGE_TOL * (1.0 + a.norm().max(b.norm()))
}

fn order_by_modulus(a: &Complex64, b: &Complex64) -> Ordering {
    a.norm()
        .partial_cmp(&b.norm())
        .unwrap_or(Ordering::Equal)
        .then(a.arg().partial_cmp(&b.arg()).unwrap_or(Ordering::Equal))
}

/// Signed multiplicities: zeros positive, poles negative.
#[derive(Clone, Debug, Default)]
struct Signed {
    pts: Vec<(Complex64, i64)>,
    zeros_complete: bool,
    poles_complete: bool,
}

impl Signed {
    fn complete() -> Self {
        Signed {
            pts: Vec::new(),
            zeros_complete: true,
            poles_complete: true,
        }
    }

    fn unknown() -> Self {
        Signed::default()
    }

    fn add(&mut self, loc: Complex64, m: i64) {
        if let Some(p) = self.pts.iter_mut().find(|(l, _)| same(*l, loc)) {
            p.1 += m;
        } else {
            self.pts.push((loc, m));
        }
    }

    fn absorb(&mut self, other: &Signed, sign: i64) {
        for &(l, m) in &other.pts {
            self.add(l, sign * m);
        }
    }

    fn poles(&self) -> impl Iterator<Item = (Complex64, i64)> + '_ {
        self.pts.iter().filter(|(_, m)| *m < 0).map(|&(l, m)| (l, -m))
    }
}

fn kth_roots(a: Complex64, k: u32) -> Vec<Complex64> {
    let r = a.norm().powf(1.0 / k as f64);
    let t = a.arg();
    (0..k)
        .map(|j| {
            let root = Complex64::from_polar(r, (t + 2.0 * PI * j as f64) / k as f64);
            // snap rounding noise so lattice points come out exact
            let snap = |x: f64| {
                let n = x.round();
                if (x - n).abs() <= 1e-12 * (1.0 + r) {
                    n
                } else {
                    x
                }
            };
            Complex64::new(snap(root.re), snap(root.im))
        })
        .collect()
}

fn signed(e: &Expr) -> Signed {
    match e.node() {
        Node::Const(c) => {
            if c.re == 0.0 && c.im == 0.0 {
                Signed {
                    pts: Vec::new(),
                    zeros_complete: false,
                    poles_complete: true,
                }
            } else {
                Signed::complete()
            }
        }
        Node::Var => {
            let mut s = Signed::complete();
            s.add(Complex64::new(0.0, 0.0), 1);
            s
        }
        Node::Monomial(k) => {
            let mut s = Signed::complete();
            s.add(Complex64::new(0.0, 0.0), *k as i64);
            s
        }
        Node::Sum(children) => {
            // A pole carried by exactly one addend survives; shared poles may cancel.
            let parts: Vec<Signed> = children.iter().map(signed).collect();
            let mut out = Signed {
                pts: Vec::new(),
                zeros_complete: false,
                poles_complete: parts.iter().all(|p| p.poles_complete),
            };
            let mut owners: Vec<(Complex64, i64, usize)> = Vec::new();
            for p in &parts {
                for (l, m) in p.poles() {
                    if let Some(o) = owners.iter_mut().find(|(x, _, _)| same(*x, l)) {
                        o.1 = o.1.max(m);
                        o.2 += 1;
                    } else {
                        owners.push((l, m, 1));
                    }
                }
            }
            for (l, m, n) in owners {
                if n > 1 {
                    out.poles_complete = false;
                }
                out.add(l, -m);
            }
            out
        }
        Node::Product(children) => {
            let mut out = Signed::complete();
            for c in children {
                let s = signed(c);
                out.absorb(&s, 1);
                out.zeros_complete &= s.zeros_complete;
                out.poles_complete &= s.poles_complete;
            }
            out
        }
        Node::Quotient(n, d) => {
            let sn = signed(n);
            let sd = signed(d);
            let mut out = Signed {
                pts: Vec::new(),
                zeros_complete: sn.zeros_complete && sd.poles_complete,
                poles_complete: sn.poles_complete && sd.zeros_complete,
            };
            out.absorb(&sn, 1);
            out.absorb(&sd, -1);
            out
        }
        Node::Shift(inner, c) => {
            let s = signed(inner);
            Signed {
                pts: s.pts.iter().map(|&(l, m)| (l - c, m)).collect(),
                ..s
            }
        }
        Node::Compose(outer, inner) => {
            let k = match inner.node() {
                Node::Var => 1,
                Node::Monomial(k) => *k,
                _ => return Signed::unknown(),
            };
            let s = signed(outer);
            let mut out = Signed {
                pts: Vec::new(),
                ..s.clone()
            };
            for &(l, m) in &s.pts {
                if l.norm() == 0.0 {
                    out.add(l, m * k as i64);
                } else {
                    for r in kth_roots(l, k) {
                        out.add(r, m);
                    }
                }
            }
            out
        }
        Node::FactorProduct { a, deriv } => {
            let mut s = Signed::complete();
            match (*deriv as usize).cmp(&a.len()) {
                Ordering::Less if *deriv == 0 => {
                    for ak in a.iter() {
                        s.add(-ak, 1);
                    }
                }
                Ordering::Less => s.zeros_complete = false,
                Ordering::Equal => {}
                Ordering::Greater => s.zeros_complete = false,
            }
            s
        }
        Node::PartialFractions(terms) => {
            let mut s = Signed::complete();
            s.zeros_complete = terms.len() <= 1;
            for t in terms.iter() {
                s.add(t.pole, -(t.order as i64));
            }
            s
        }
    }
}

/// Zero/pole bookkeeping for `e`.
///
/// Zeros of sums are never derived; such registries report
/// `zeros_complete() == false` and list only poles. Poles shared by several
/// addends of a sum may cancel, which clears `poles_complete()`.
pub fn registry(e: &Expr) -> PoleZeroRegistry {
    let s = signed(e);
    let mut entries: Vec<RegistryEntry> = s
        .pts
        .iter()
        .filter(|(_, m)| *m != 0)
        .map(|&(l, m)| RegistryEntry {
            location: l,
            multiplicity: m.unsigned_abs() as u32,
            kind: if m > 0 { PointKind::Zero } else { PointKind::Pole },
        })
        .collect();
    entries.sort_by(|a, b| order_by_modulus(&a.location, &b.location));
    PoleZeroRegistry {
        entries,
        zeros_complete: s.zeros_complete,
        poles_complete: s.poles_complete,
    }
}

impl PoleZeroRegistry {
    /// Registry from caller-supplied points; duplicates merge by multiplicity.
    pub fn from_points(
        zeros: &[Complex64],
        poles: &[Complex64],
        zeros_complete: bool,
        poles_complete: bool,
    ) -> Self {
        let mut s = Signed {
            pts: Vec::new(),
            zeros_complete,
            poles_complete,
        };
        for &z in zeros {
            s.add(z, 1);
        }
        for &p in poles {
            s.add(p, -1);
        }
        let mut entries: Vec<RegistryEntry> = s
            .pts
            .iter()
            .filter(|(_, m)| *m != 0)
            .map(|&(l, m)| RegistryEntry {
                location: l,
                multiplicity: m.unsigned_abs() as u32,
                kind: if m > 0 { PointKind::Zero } else { PointKind::Pole },
            })
            .collect();
        entries.sort_by(|a, b| order_by_modulus(&a.location, &b.location));
        PoleZeroRegistry {
            entries,
            zeros_complete,
            poles_complete,
        }
    }

    pub fn empty() -> Self {
        Self::from_points(&[], &[], true, true)
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn complete(&self) -> bool {
        self.zeros_complete && self.poles_complete
    }

    pub fn zeros_complete(&self) -> bool {
        self.zeros_complete
    }

    pub fn poles_complete(&self) -> bool {
        self.poles_complete
    }

    pub fn require_complete(&self) -> Result<&Self, ExprError> {
        if self.complete() {
            Ok(self)
        } else {
            Err(ExprError::Unknowable)
        }
    }

    pub fn zeros(&self) -> impl Iterator<Item = &RegistryEntry> {
        self.entries.iter().filter(|e| e.kind == PointKind::Zero)
    }

    pub fn poles(&self) -> impl Iterator<Item = &RegistryEntry> {
        self.entries.iter().filter(|e| e.kind == PointKind::Pole)
    }

    pub fn of_kind(&self, kind: PointKind) -> impl Iterator<Item = &RegistryEntry> {
        self.entries.iter().filter(move |e| e.kind == kind)
    }

    /// Points of `kind` in the closed disc `|z| <= r`, with multiplicity.
    pub fn count_in_disk(&self, kind: PointKind, r: f64) -> u32 {
        self.of_kind(kind)
            .filter(|e| e.location.norm() <= r)
            .map(|e| e.multiplicity)
            .sum()
    }

    /// Signed count (zeros minus poles) of points satisfying `inside`.
    pub fn net_where(&self, inside: impl Fn(Complex64) -> bool) -> i64 {
        self.entries
            .iter()
            .filter(|e| inside(e.location))
            .map(|e| match e.kind {
                PointKind::Zero => e.multiplicity as i64,
                PointKind::Pole => -(e.multiplicity as i64),
            })
            .sum()
    }

    pub fn min_distance_to(&self, dist: impl Fn(Complex64) -> f64) -> f64 {
        self.entries
            .iter()
            .map(|e| dist(e.location))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::PfTerm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn factor_product_zeros() {
        let f = Expr::factor_product(vec![c(4.0, 0.0), c(64.0, 0.0)]).unwrap();
        let r = registry(&f);
        assert!(r.complete());
        let z: Vec<_> = r.zeros().map(|e| e.location).collect();
        assert_eq!(z, vec![c(-4.0, 0.0), c(-64.0, 0.0)]);
    }

    #[test]
    fn quotient_registers_zero_and_pole() {
        let f = Expr::var() / Expr::factor_product(vec![c(4.0, 0.0)]).unwrap();
        let r = registry(&f);
        assert!(r.complete());
        assert_eq!(r.zeros().next().unwrap().location, c(0.0, 0.0));
        assert_eq!(r.poles().next().unwrap().location, c(-4.0, 0.0));
    }

    #[test]
    fn sum_of_partial_fractions_lists_poles_only() {
        let a = Expr::partial_fractions(vec![PfTerm::simple(c(1.0, 0.0), c(1.0, 0.0))]).unwrap();
        let b = Expr::partial_fractions(vec![PfTerm::simple(c(2.0, 0.0), c(-3.0, 1.0))]).unwrap();
        let r = registry(&(a + b));
        assert!(!r.complete());
        assert!(r.poles_complete());
        assert_eq!(r.poles().count(), 2);
        assert_eq!(r.zeros().count(), 0);
    }

    #[test]
    fn shared_sum_poles_are_only_candidates() {
        let a = Expr::partial_fractions(vec![PfTerm::simple(c(1.0, 0.0), c(1.0, 0.0))]).unwrap();
        let r = registry(&(a.clone() - a));
        assert!(!r.poles_complete());
    }

    #[test]
    fn zero_and_pole_at_same_point_cancel() {
        let f = Expr::linear_factor(2.0) * Expr::linear_factor(2.0) / Expr::linear_factor(2.0);
        let r = registry(&f);
        assert_eq!(r.len(), 1);
        assert_eq!(r.entries()[0].multiplicity, 1);
        assert_eq!(r.entries()[0].kind, PointKind::Zero);
    }

    #[test]
    fn composition_with_monomial_takes_roots() {
        let h = Expr::factor_product(vec![c(4.0, 0.0)]).unwrap();
        let r = registry(&Expr::compose(h, Expr::monomial(4)));
        let mut z: Vec<_> = r.zeros().map(|e| (e.location.re, e.location.im)).collect();
        z.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(z, vec![(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]);
    }

    #[test]
    fn entries_sorted_and_merged() {
        let r = PoleZeroRegistry::from_points(&[c(3.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)], &[c(0.0, 2.0)], true, true);
        let mods: Vec<f64> = r.entries().iter().map(|e| e.location.norm()).collect();
        assert_eq!(mods, vec![1.0, 2.0, 3.0]);
        assert_eq!(r.entries()[2].multiplicity, 2);
        assert_eq!(r.count_in_disk(PointKind::Zero, 3.0), 3);
        assert_eq!(r.net_where(|z| z.norm() < 2.5), 0);
    }
}
