//! Truncated divided-power algebras A = R[x]⟨z⟩ / (truncation, relations)
//! with an explicit monomial basis x^a z^[b].

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::scalar::{binomial, factorial, parse_rational, vp_factorial, BaseRing, Coeff, Scalar, Zpn};
use crate::exact::zpn::Span;

/// An element, as coefficients on the ambient monomial basis.
pub type Elem = Vec<Scalar>;

/// JSON descriptor of a divided-power algebra.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PdDescriptor {
    pub base: BaseSpec,
    #[serde(default)]
    pub poly_gens: Vec<String>,
    #[serde(default)]
    pub pd_gens: Vec<String>,
    /// exclusive exponent bound per generator
    #[serde(default)]
    pub trunc: std::collections::BTreeMap<String, u32>,
    #[serde(default)]
    pub relations: Vec<String>,
    /// further elements declared to lie in the PD ideal
    #[serde(default)]
    pub pd_extra: Vec<String>,
}

/// `"QQ"` or `{"p": 3, "n": 1}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum BaseSpec {
    Named(String),
    PrimePower { p: u64, n: u32 },
}

impl BaseSpec {
    pub fn ring(&self) -> Result<BaseRing> {
        match self {
            BaseSpec::Named(s) if s == "QQ" || s == "Q" => Ok(BaseRing::Rationals),
            BaseSpec::Named(s) => Err(Error::Invalid(format!("unknown base ring {s}"))),
            BaseSpec::PrimePower { p, n } => {
                if !crate::exact::scalar::is_prime(*p) || *n == 0 {
                    return Err(Error::Invalid(format!("base Z/{p}^{n} is not a prime power ring")));
                }
                Ok(BaseRing::Zpn { p: *p, n: *n })
            }
        }
    }
}

/// A truncated divided-power algebra with relations.
#[derive(Clone, Debug)]
pub struct PdAlgebra {
    pub base: BaseRing,
    pub poly_gens: Vec<String>,
    pub pd_gens: Vec<String>,
    pub trunc: Vec<u32>,
    monos: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    relations: Span,
    pd_ideal: Span,
    extras: Vec<Elem>,
}

impl PdAlgebra {
    pub fn from_descriptor(d: &PdDescriptor) -> Result<Self> {
        let base = d.base.ring()?;
        let names: Vec<&String> = d.poly_gens.iter().chain(&d.pd_gens).collect();
        let mut trunc = Vec::new();
        for n in &names {
            let t = d.trunc.get(*n).copied().ok_or_else(|| Error::NotArtinian(format!("generator {n} has no truncation bound")))?;
            if t == 0 {
                return Err(Error::Invalid(format!("truncation bound of {n} must be positive")));
            }
            trunc.push(t);
        }
        let mut a = PdAlgebra::free(base, d.poly_gens.clone(), d.pd_gens.clone(), trunc)?;
        let rels: Vec<Elem> = d.relations.iter().map(|r| a.parse(r)).collect::<Result<_>>()?;
        let extras: Vec<Elem> = d.pd_extra.iter().map(|r| a.parse(r)).collect::<Result<_>>()?;
        a = a.with_relations(&rels);
        a.add_extras(extras)?;
        Ok(a)
    }

    /// The truncated free algebra with no relations.
    pub fn free(base: BaseRing, poly_gens: Vec<String>, pd_gens: Vec<String>, trunc: Vec<u32>) -> Result<Self> {
        let nv = poly_gens.len() + pd_gens.len();
        if trunc.len() != nv {
            return Err(Error::NotArtinian("every generator needs a truncation bound".into()));
        }
        let mut monos = vec![Vec::new()];
        for &t in &trunc {
            let mut next = Vec::new();
            for m in &monos {
                for e in 0..t {
                    let mut m2: Vec<u32> = m.clone();
                    m2.push(e);
                    next.push(m2);
                }
            }
            monos = next;
        }
        monos.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let dim = monos.len();
        let mut a = PdAlgebra {
            base,
            poly_gens,
            pd_gens,
            trunc,
            monos,
            index,
            relations: Span::new(base, dim),
            pd_ideal: Span::new(base, dim),
            extras: Vec::new(),
        };
        a.pd_ideal = a.pd_type_span();
        Ok(a)
    }

    /// Quotient by the ideal generated by the given elements.
    pub fn with_relations(mut self, rels: &[Elem]) -> Self {
        let closure = self.ideal_closure(rels, &Span::new(self.base, self.dim()));
        self.relations = closure;
        self.pd_ideal = self.pd_type_span();
        let extras = std::mem::take(&mut self.extras);
        self.add_extras(extras).expect("extras were valid before");
        self
    }

    fn add_extras(&mut self, extras: Vec<Elem>) -> Result<()> {
        for e in extras {
            match self.base {
                BaseRing::Rationals => {
                    self.pd_ideal = self.ideal_closure(std::slice::from_ref(&e), &self.pd_ideal);
                }
                BaseRing::Zpn { .. } => {
                    if !self.pd_ideal.contains(&e) {
                        return Err(Error::Unsupported(
                            "over Z/p^n only elements built from pd generators and p-multiples carry divided powers".into(),
                        ));
                    }
                }
            }
            self.extras.push(e);
        }
        Ok(())
    }

    /// Span of pd monomials, p-multiples and relations.
    fn pd_type_span(&self) -> Span {
        let dim = self.dim();
        let mut s = self.relations.clone();
        let np = self.poly_gens.len();
        for (i, m) in self.monos.iter().enumerate() {
            if m[np..].iter().any(|&b| b > 0) {
                s.insert(self.unit(i));
            } else if let BaseRing::Zpn { p, n } = self.base {
                if n > 1 {
                    let mut v = vec![Scalar::zero(); dim];
                    v[i] = self.base.int(p as i64);
                    s.insert(v);
                }
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.monos.len()
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monos
    }

    pub fn nvars(&self) -> usize {
        self.trunc.len()
    }

    pub fn relations(&self) -> &Span {
        &self.relations
    }

    /// The PD ideal as a span (always containing the relations).
    pub fn pd_ideal(&self) -> &Span {
        &self.pd_ideal
    }

    pub fn zero(&self) -> Elem {
        vec![Scalar::zero(); self.dim()]
    }

    pub fn unit(&self, i: usize) -> Elem {
        let mut v = self.zero();
        v[i] = self.base.int(1);
        v
    }

    pub fn one(&self) -> Elem {
        self.unit(self.index[&vec![0; self.nvars()]])
    }

    pub fn scalar(&self, c: &Scalar) -> Result<Elem> {
        let c = self.coerce(c)?;
        Ok(self.one().into_iter().map(|x| x * c.clone()).collect())
    }

    fn coerce(&self, c: &Scalar) -> Result<Scalar> {
        self.base.coerce(c).ok_or_else(|| Error::Invalid(format!("{c} is not in {}", self.base.label())))
    }

    /// The basis element with the given exponents, or None if truncated.
    pub fn monomial(&self, exps: &[u32]) -> Option<Elem> {
        self.index.get(exps).map(|&i| self.unit(i))
    }

    /// The generator with the given name (z^[1] for pd generators).
    pub fn generator(&self, name: &str) -> Result<Elem> {
        let k = self
            .poly_gens
            .iter()
            .chain(&self.pd_gens)
            .position(|n| n == name)
            .ok_or_else(|| Error::Invalid(format!("unknown generator {name}")))?;
        let mut e = vec![0; self.nvars()];
        e[k] = 1;
        Ok(self.monomial(&e).unwrap_or_else(|| self.zero()))
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
    }

    pub fn scale(&self, c: &Scalar, a: &Elem) -> Elem {
        a.iter().map(|x| x.clone() * c.clone()).collect()
    }

    /// Product of two basis monomials: (index, structure constant).
    pub fn mono_product(&self, i: usize, j: usize) -> Option<(usize, BigInt)> {
        let np = self.poly_gens.len();
        let (a, b) = (&self.monos[i], &self.monos[j]);
        let mut e = Vec::with_capacity(a.len());
        let mut c = BigInt::one();
        for k in 0..a.len() {
            let s = a[k] + b[k];
            if s >= self.trunc[k] {
                return None;
            }
            if k >= np {
                c *= binomial(s as u64, a[k] as u64);
            }
            e.push(s);
        }
        Some((self.index[&e], c))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                if let Some((k, c)) = self.mono_product(i, j) {
                    let t = x.clone() * y.clone() * self.base.bigint(&c);
                    out[k] = out[k].clone() + t;
                }
            }
        }
        self.canon(out)
    }

    pub fn pow(&self, a: &Elem, n: u32) -> Elem {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul(&acc, a);
        }
        acc
    }

    fn canon(&self, v: Elem) -> Elem {
        v.into_iter().map(|x| if x.is_zero() { Scalar::zero() } else { self.base.coerce(&x).expect("scalar in base ring") }).collect()
    }

    /// Canonical representative modulo the relations.
    pub fn reduce(&self, a: &Elem) -> Elem {
        self.canon(self.relations.reduce(a))
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        self.relations.contains(a)
    }

    pub fn equal(&self, a: &Elem, b: &Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    /// Smallest ideal containing `gens` and `start`, closed under multiplication by monomials.
    pub fn ideal_closure(&self, gens: &[Elem], start: &Span) -> Span {
        let mut s = start.clone();
        for g in gens {
            for i in 0..self.dim() {
                let v = self.mul(&self.unit(i), g);
                s.insert(v);
            }
        }
        s
    }

    /// The ideal generated by elements, including the relations.
    pub fn ideal(&self, gens: &[Elem]) -> Span {
        self.ideal_closure(gens, &self.relations)
    }

    /// The maximal ideal: p, and every non-constant monomial.
    pub fn maximal_ideal(&self) -> Span {
        let mut gens: Vec<Elem> = (0..self.dim()).filter(|&i| self.monos[i].iter().any(|&e| e > 0)).map(|i| self.unit(i)).collect();
        if let BaseRing::Zpn { p, .. } = self.base {
            gens.push(self.scale(&self.base.int(p as i64), &self.one()));
        }
        self.ideal(&gens)
    }

    /// Composition length of A (its dimension over a field).
    pub fn length(&self) -> u32 {
        let full = Span::from_vectors(self.base, self.dim(), (0..self.dim()).map(|i| self.unit(i)));
        full.length() - self.relations.length()
    }

    /// Length of an ideal of A given as a span containing the relations.
    pub fn ideal_length(&self, s: &Span) -> u32 {
        s.length() - self.relations.length()
    }

    pub fn in_pd_ideal(&self, f: &Elem) -> bool {
        self.pd_ideal.contains(f)
    }

    /// γ_n(f) for f in the PD ideal.
    pub fn gamma(&self, n: u32, f: &Elem) -> Result<Elem> {
        if n == 0 {
            return Ok(self.one());
        }
        if !self.in_pd_ideal(f) {
            return Err(Error::NotInPDIdeal(self.format(f)));
        }
        if n == 1 {
            return Ok(self.reduce(f));
        }
        if self.base == BaseRing::Rationals {
            let inv = Scalar::Rational(num_rational::BigRational::new(BigInt::one(), factorial(n as u64)));
            return Ok(self.reduce(&self.scale(&inv, &self.pow(f, n))));
        }
        let f = self.pd_representative(f)?;
        // γ_k of the partial sums, k = 0..n
        let mut acc: Vec<Elem> = (0..=n).map(|k| if k == 0 { self.one() } else { self.zero() }).collect();
        for (i, c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let gt: Vec<Elem> = (0..=n).map(|k| self.gamma_term(k, i, c)).collect::<Result<_>>()?;
            let mut next = vec![self.zero(); n as usize + 1];
            for k in 0..=n as usize {
                for j in 0..=k {
                    if acc[j].iter().all(|x| x.is_zero()) || gt[k - j].iter().all(|x| x.is_zero()) {
                        continue;
                    }
                    next[k] = self.add(&next[k], &self.mul(&acc[j], &gt[k - j]));
                }
            }
            acc = next;
        }
        Ok(self.reduce(&acc[n as usize]))
    }

    /// γ_n of the single term c·m_i, which must be of pd type.
    fn gamma_term(&self, n: u32, i: usize, c: &Scalar) -> Result<Elem> {
        if n == 0 {
            return Ok(self.one());
        }
        let np = self.poly_gens.len();
        let m = &self.monos[i];
        if let Some(j) = (np..m.len()).find(|&k| m[k] > 0) {
            let b = m[j];
            let mut rest = m.clone();
            rest[j] = 0;
            let u = self.scale(c, &self.unit(self.index[&rest]));
            let mut w = vec![0; m.len()];
            let nb = n * b;
            if nb >= self.trunc[j] {
                return Ok(self.zero());
            }
            w[j] = nb;
            // γ_n(z^[b]) = (nb)!/(n!(b!)^n) z^[nb]
            let coef = factorial(nb as u64) / (factorial(n as u64) * factorial(b as u64).pow(n));
            let g = self.scale(&self.base.bigint(&coef), &self.unit(self.index[&w]));
            return Ok(self.mul(&self.pow(&u, n), &g));
        }
        let BaseRing::Zpn { p, n: e } = self.base else { unreachable!("rational case handled directly") };
        let s = divided_scalar_power(p, e, c, n).ok_or_else(|| Error::NotInPDIdeal(format!("{c}")))?;
        let xm = self.pow(&self.unit(i), n);
        Ok(self.scale(&s, &xm))
    }

    /// A representative of f with every term of pd type (pd monomial or p-divisible coefficient).
    fn pd_representative(&self, f: &Elem) -> Result<Elem> {
        let np = self.poly_gens.len();
        let is_pd_term = |i: usize, c: &Scalar| c.is_zero() || self.monos[i][np..].iter().any(|&b| b > 0) || self.base.valuation(c) >= 1;
        if f.iter().enumerate().all(|(i, c)| is_pd_term(i, c)) {
            return Ok(f.clone());
        }
        let dim = self.dim();
        let mut s = Span::tracking(self.base, dim);
        let mut gens: Vec<(Elem, bool)> = Vec::new();
        for r in self.relations.basis() {
            s.insert(r.clone());
            gens.push((r, false));
        }
        for (i, m) in self.monos.iter().enumerate() {
            let v = if m[np..].iter().any(|&b| b > 0) {
                self.unit(i)
            } else if let BaseRing::Zpn { p, .. } = self.base {
                self.scale(&self.base.int(p as i64), &self.unit(i))
            } else {
                continue;
            };
            s.insert(v.clone());
            gens.push((v, true));
        }
        let lam = s.express(f).ok_or_else(|| Error::NotInPDIdeal(self.format(f)))?;
        let mut out = self.zero();
        for ((g, pd), l) in gens.iter().zip(lam) {
            if *pd {
                out = self.add(&out, &self.scale(&l, g));
            }
        }
        Ok(self.canon(out))
    }

    /// Parse an expression like `3*x^2*z^[3] - z^[2] + 1/2`.
    pub fn parse(&self, s: &str) -> Result<Elem> {
        let mut p = Parser { s: s.as_bytes(), i: 0, a: self };
        let e = p.expr()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(Error::Invalid(format!("unexpected input at position {} of {s:?}", p.i)));
        }
        Ok(e)
    }

    /// Human-readable form of the reduced element.
    pub fn format(&self, a: &Elem) -> String {
        let a = self.reduce(a);
        let names: Vec<&String> = self.poly_gens.iter().chain(&self.pd_gens).collect();
        let np = self.poly_gens.len();
        let mut out = String::new();
        for (i, c) in a.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let m = &self.monos[i];
            let mut body = String::new();
            for (k, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !body.is_empty() {
                    body.push('*');
                }
                body.push_str(names[k]);
                if k >= np {
                    let _ = write!(body, "^[{e}]");
                } else if e > 1 {
                    let _ = write!(body, "^{e}");
                }
            }
            let cs = c.to_string();
            let term = if body.is_empty() {
                cs
            } else if c.is_one() {
                body
            } else {
                format!("{cs}*{body}")
            };
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

/// c^n / n! in ℤ/p^e for c of positive valuation.
pub fn divided_scalar_power(p: u64, e: u32, c: &Scalar, n: u32) -> Option<Scalar> {
    let z = match (BaseRing::Zpn { p, n: e }).coerce(c)? {
        Scalar::Modular(z) => z,
        Scalar::Rational(_) => return None,
    };
    if z.rep == 0 {
        return Some(Scalar::Modular(Zpn::new(p, e, 0)));
    }
    if z.valuation() == 0 {
        return None;
    }
    let vf = vp_factorial(p, n as u64) as u32;
    let pb = BigInt::from(p);
    let big_mod = pb.pow(e + vf);
    let num = BigInt::from(z.rep).modpow(&BigInt::from(n), &big_mod);
    let q = num / pb.pow(vf);
    let mut nf = factorial(n as u64);
    while nf.is_multiple_of(&pb) {
        nf /= &pb;
    }
    let m = Zpn::modulus(p, e);
    let unit = Zpn::from_bigint(p, e, &nf).inv()?;
    let qv = Zpn::from_bigint(p, e, &q.mod_floor(&BigInt::from(m)));
    Some(Scalar::Modular(qv.mul(unit)))
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    a: &'a PdAlgebra,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Invalid(format!("{msg} at position {}", self.i))
    }

    fn expr(&mut self) -> Result<Elem> {
        let mut acc = self.a.zero();
        let mut sign = 1;
        if self.peek() == Some(b'-') {
            self.i += 1;
            sign = -1;
        } else if self.peek() == Some(b'+') {
            self.i += 1;
        }
        loop {
            let t = self.term()?;
            acc = if sign > 0 { self.a.add(&acc, &t) } else { self.a.sub(&acc, &t) };
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.i += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Elem> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.i += 1;
            let f = self.factor()?;
            acc = self.a.mul(&acc, &f);
        }
        Ok(acc)
    }

    fn number(&mut self) -> Result<u32> {
        self.ws();
        let st = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[st..self.i]).unwrap().parse().map_err(|_| self.err("expected a number"))
    }

    fn factor(&mut self) -> Result<Elem> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end"))?;
        let base = if c == b'(' {
            self.i += 1;
            let e = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.err("expected )"));
            }
            self.i += 1;
            e
        } else if c.is_ascii_digit() {
            let st = self.i;
            while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'/') {
                self.i += 1;
            }
            let txt = std::str::from_utf8(&self.s[st..self.i]).unwrap();
            let q = parse_rational(txt).ok_or_else(|| self.err("bad number"))?;
            let s = self.a.base.embed(&q).ok_or_else(|| self.err("number not in base ring"))?;
            self.a.scalar(&s)?
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let st = self.i;
            while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                self.i += 1;
            }
            let name = std::str::from_utf8(&self.s[st..self.i]).unwrap();
            if name == "p" && !self.a.poly_gens.iter().chain(&self.a.pd_gens).any(|g| g == "p") {
                let p = self.a.base.prime().ok_or_else(|| self.err("p is only defined over Z/p^n"))?;
                self.a.scalar(&self.a.base.int(p as i64))?
            } else if self.peek() == Some(b'^') && self.s.get(self.i + 1) == Some(&b'[') {
                self.i += 2;
                let k = self.number()?;
                if self.peek() != Some(b']') {
                    return Err(self.err("expected ]"));
                }
                self.i += 1;
                return self.divided(name, k);
            } else {
                self.a.generator(name)?
            }
        } else {
            return Err(self.err("unexpected character"));
        };
        if self.peek() == Some(b'^') {
            self.i += 1;
            let k = self.number()?;
            return Ok(self.a.pow(&base, k));
        }
        Ok(base)
    }

    fn divided(&mut self, name: &str, k: u32) -> Result<Elem> {
        let a = self.a;
        if let Some(j) = a.pd_gens.iter().position(|n| n == name) {
            let mut e = vec![0; a.nvars()];
            e[a.poly_gens.len() + j] = k;
            return Ok(a.monomial(&e).unwrap_or_else(|| a.zero()));
        }
        let g = a.generator(name)?;
        a.gamma(k, &g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp_z(p: u64, t: u32) -> PdAlgebra {
        PdAlgebra::free(BaseRing::fp(p), vec![], vec!["z".into()], vec![t]).unwrap()
    }

    #[test]
    fn structure_constants() {
        let a = fp_z(5, 10);
        let z1 = a.parse("z^[1]").unwrap();
        let z2 = a.parse("z^[2]").unwrap();
        // z·z = 2 z^[2]
        assert!(a.equal(&a.mul(&z1, &z1), &a.scale(&a.base.int(2), &z2)));
        assert!(a.equal(&a.gamma(2, &z1).unwrap(), &z2));
        // z^5 = 5! z^[5] = 0 in characteristic 5
        assert!(a.is_zero(&a.pow(&z1, 5)));
        assert!(!a.is_zero(&a.parse("z^[5]").unwrap()));
    }

    #[test]
    fn addition_axiom() {
        let a = PdAlgebra::free(BaseRing::fp(3), vec![], vec!["x".into(), "y".into()], vec![4, 4]).unwrap();
        let x = a.generator("x").unwrap();
        let y = a.generator("y").unwrap();
        let lhs = a.gamma(2, &a.add(&x, &y)).unwrap();
        let rhs = a.add(&a.add(&a.gamma(2, &x).unwrap(), &a.mul(&x, &y)), &a.gamma(2, &y).unwrap());
        assert!(a.equal(&lhs, &rhs));
    }

    #[test]
    fn scalar_divided_powers() {
        // γ_p(p) = p^p/p! has valuation p-1
        let c = Scalar::modular(3, 3, 3);
        let g = divided_scalar_power(3, 3, &c, 3).unwrap();
        // 27/6 = 9/2 = 9·14 = 18 mod 27
        assert_eq!(g, Scalar::modular(3, 3, 18));
        assert!(divided_scalar_power(3, 2, &Scalar::modular(3, 2, 3), 3).unwrap().is_zero());
        assert!(divided_scalar_power(3, 2, &Scalar::modular(3, 2, 1), 2).is_none());
    }

    #[test]
    fn rejects_elements_outside_pd_ideal() {
        let d: PdDescriptor =
            serde_json::from_str(r#"{"base":{"p":3,"n":1},"poly_gens":["x"],"pd_gens":["z"],"trunc":{"x":3,"z":9}}"#).unwrap();
        let a = PdAlgebra::from_descriptor(&d).unwrap();
        let x = a.generator("x").unwrap();
        assert!(matches!(a.gamma(2, &x), Err(Error::NotInPDIdeal(_))));
        assert_eq!(a.length(), 27);
    }

    #[test]
    fn missing_truncation_is_not_artinian() {
        let d: PdDescriptor = serde_json::from_str(r#"{"base":"QQ","poly_gens":["x"],"pd_gens":[],"trunc":{}}"#).unwrap();
        assert!(matches!(PdAlgebra::from_descriptor(&d), Err(Error::NotArtinian(_))));
    }

    #[test]
    fn relations_and_parsing() {
        let d: PdDescriptor = serde_json::from_str(
            r#"{"base":"QQ","poly_gens":["x"],"pd_gens":["z"],"trunc":{"x":4,"z":4},"relations":["x*z"],"pd_extra":["x"]}"#,
        )
        .unwrap();
        let a = PdAlgebra::from_descriptor(&d).unwrap();
        assert!(a.is_zero(&a.parse("x^2*z^[2]").unwrap()));
        let g = a.gamma(2, &a.parse("x + z").unwrap()).unwrap();
        assert!(a.equal(&g, &a.parse("1/2*x^2 + z^[2]").unwrap()));
        assert_eq!(a.format(&a.parse("2*z^[3] + x").unwrap()), "2*z^[3] + x");
    }
}
