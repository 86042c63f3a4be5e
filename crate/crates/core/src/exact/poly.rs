//! Sparse multivariate polynomials over any [`Coeff`] type.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::scalar::{Coeff, Scalar};

pub type Mono = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    #[default]
    Grevlex,
    Lex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::Grevlex => {
                let da: u32 = a.iter().sum();
                let db: u32 = b.iter().sum();
                da.cmp(&db).then_with(|| {
                    for i in (0..a.len()).rev() {
                        if a[i] != b[i] {
                            return b[i].cmp(&a[i]);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

pub fn mono_divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn mono_lcm(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn mono_mul(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn mono_div(a: &[u32], b: &[u32]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn mono_deg(a: &[u32]) -> u32 {
    a.iter().sum()
}

/// All exponent vectors in `n` variables of total degree `d`, in lex-descending order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Mono> {
    fn rec(n: usize, d: u32, prefix: &mut Mono, out: &mut Vec<Mono>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=d).rev() {
            prefix.push(a);
            rec(n, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Polynomial as a map from exponent vector to nonzero coefficient.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<K: Coeff> {
    nvars: usize,
    terms: BTreeMap<Mono, K>,
}

pub type MultiPoly = Poly<Scalar>;

impl<K: Coeff> Poly<K> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, K::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, K::one())
    }

    pub fn monomial(exp: Mono, c: K) -> Self {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Mono, K)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &K)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Mono, K)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, e: &[u32]) -> K {
        self.terms.get(e).cloned().unwrap_or_else(K::zero)
    }

    pub fn add_term(&mut self, e: Mono, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| mono_deg(e)).max()
    }

    /// Weighted degree of the top term, if nonzero.
    pub fn weighted_degree(&self, w: &[u32]) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().zip(w).map(|(a, b)| a * b).sum()).max()
    }

    pub fn is_homogeneous(&self, w: &[u32]) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().zip(w).map(|(a, b)| a * b).sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn leading(&self, ord: MonomialOrder) -> Option<(&Mono, &K)> {
        self.terms.iter().max_by(|a, b| ord.cmp(a.0, b.0))
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, v)| (e.clone(), v.clone() * c.clone())))
    }

    /// Multiply by c·x^m.
    pub fn mul_term(&self, m: &[u32], c: &K) -> Self {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, v)| (mono_mul(e, m), v.clone() * c.clone())))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Self {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, v)| {
                let mut f = e.clone();
                f[i] -= 1;
                (f, v.clone() * K::from_int(e[i] as i64))
            }),
        )
    }

    pub fn map_coeffs<L: Coeff>(&self, f: impl Fn(&K) -> L) -> Poly<L> {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, v)| (e.clone(), f(v))))
    }

    /// Keep only terms of weighted degree `d`.
    pub fn homogeneous_part(&self, w: &[u32], d: u32) -> Self {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e.iter().zip(w).map(|(a, b)| a * b).sum::<u32>() == d).map(|(e, v)| (e.clone(), v.clone())),
        )
    }

    /// Substitute polynomials for the variables.
    pub fn compose(&self, images: &[Poly<K>]) -> Poly<K> {
        assert_eq!(images.len(), self.nvars);
        let m = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut acc = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &a) in e.iter().enumerate() {
                if a > 0 {
                    t = &t * &images[i].pow(a);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Embed into a ring with more variables, placing old variable i at `pos[i]`.
    pub fn reindex(&self, nvars: usize, pos: &[usize]) -> Self {
        Poly::from_terms(
            nvars,
            self.terms.iter().map(|(e, v)| {
                let mut f = vec![0; nvars];
                for (i, &a) in e.iter().enumerate() {
                    f[pos[i]] += a;
                }
                (f, v.clone())
            }),
        )
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| MonomialOrder::Grevlex.cmp(b.0, a.0));
        for (i, (e, c)) in ts.into_iter().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(r) => (true, r.to_string()),
                None => (false, cs),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mon: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, a)| **a > 0)
                .map(|(j, a)| {
                    let name = names.get(j).cloned().unwrap_or_else(|| format!("x{j}"));
                    if *a == 1 {
                        name
                    } else {
                        format!("{name}^{a}")
                    }
                })
                .collect();
            if mon.is_empty() {
                out.push_str(&mag);
            } else if mag == "1" {
                out.push_str(&mon.join("*"));
            } else {
                out.push_str(&format!("{mag}*{}", mon.join("*")));
            }
        }
        out
    }
}

impl<K: Coeff> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&[]))
    }
}

impl<K: Coeff> Add for &Poly<K> {
    type Output = Poly<K>;
    fn add(self, o: &Poly<K>) -> Poly<K> {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }
}

impl<K: Coeff> Sub for &Poly<K> {
    type Output = Poly<K>;
    fn sub(self, o: &Poly<K>) -> Poly<K> {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), -c.clone());
        }
        r
    }
}

impl<K: Coeff> Mul for &Poly<K> {
    type Output = Poly<K>;
    fn mul(self, o: &Poly<K>) -> Poly<K> {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut r = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term(mono_mul(e1, e2), c1.clone() * c2.clone());
            }
        }
        r
    }
}

impl<K: Coeff> Neg for &Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{rint, Rational};

    type P = Poly<Rational>;

    fn x() -> P {
        P::var(2, 0)
    }
    fn y() -> P {
        P::var(2, 1)
    }

    #[test]
    fn grevlex_orders_degree_first() {
        let o = MonomialOrder::Grevlex;
        assert_eq!(o.cmp(&[0, 2], &[1, 0]), Ordering::Greater);
        assert_eq!(o.cmp(&[2, 0], &[1, 1]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 0, 1], &[0, 2, 0]), Ordering::Less);
        assert_eq!(MonomialOrder::Lex.cmp(&[1, 0], &[0, 5]), Ordering::Greater);
    }

    #[test]
    fn arithmetic_cancels() {
        let p = &(&x() + &y()) * &(&x() - &y());
        let q = &(&x() * &x()) - &(&y() * &y());
        assert_eq!(p, q);
        assert!((&p - &q).is_zero());
        assert_eq!(p.derivative(0), x().scale(&rint(2)));
    }

    #[test]
    fn display_uses_names() {
        let p = &(&x() * &x()).scale(&rint(3)) - &y();
        let names = vec!["s1".to_string(), "s2".to_string()];
        assert_eq!(p.fmt_with(&names), "3*s1^2 - s2");
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials_of_degree(3, 3).len(), 10);
        assert_eq!(monomials_of_degree(4, 4).len(), 35);
        assert_eq!(monomials_of_degree(1, 5), vec![vec![5]]);
    }
}
