//! Exact scalars: reduced rationals and residues modulo prime powers.
//!
//! The [`Coeff`] trait is the arithmetic interface shared by every coefficient
//! type in the crate (ℚ, ℤ/pⁿ, rational functions, truncated power series).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// Build a rational from a small numerator and denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Arithmetic shared by all coefficient types.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_int(n: i64) -> Self;
    /// Image of a rational number, if the denominator is invertible here.
    fn from_rational(q: &Rational) -> Option<Self>;
    /// Multiplicative inverse when the element is a unit.
    fn try_inv(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        (self.clone() - Self::one()).is_zero()
    }
    fn is_unit(&self) -> bool {
        self.try_inv().is_some()
    }
    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_int(n: i64) -> Self {
        rint(n)
    }
    fn from_rational(q: &Rational) -> Option<Self> {
        Some(q.clone())
    }
    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Residue class modulo pⁿ with canonical representative in [0, pⁿ).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Zpn {
    pub p: u64,
    pub n: u32,
    pub rep: u64,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn ipow(p: u64, n: u32) -> u64 {
    p.checked_pow(n).expect("modulus overflow")
}

impl Zpn {
    pub fn modulus(p: u64, n: u32) -> u64 {
        ipow(p, n)
    }

    pub fn new(p: u64, n: u32, value: i64) -> Self {
        let m = ipow(p, n) as i128;
        let rep = (value as i128).rem_euclid(m) as u64;
        Zpn { p, n, rep }
    }

    pub fn from_bigint(p: u64, n: u32, v: &BigInt) -> Self {
        let m = BigInt::from(ipow(p, n));
        let r = v.mod_floor(&m);
        Zpn { p, n, rep: r.to_u64().unwrap() }
    }

    /// Reduce a rational whose denominator is prime to p.
    pub fn from_rational(p: u64, n: u32, q: &Rational) -> Option<Self> {
        let num = Zpn::from_bigint(p, n, q.numer());
        let den = Zpn::from_bigint(p, n, q.denom());
        den.inv().map(|d| num.mul(d))
    }

    pub fn m(&self) -> u64 {
        ipow(self.p, self.n)
    }

    /// p-adic valuation of the representative, capped at n (zero has valuation n).
    pub fn valuation(&self) -> u32 {
        if self.rep == 0 {
            return self.n;
        }
        let mut v = 0;
        let mut r = self.rep;
        while r.is_multiple_of(self.p) {
            r /= self.p;
            v += 1;
        }
        v
    }

    fn same(&self, o: &Zpn) {
        assert!(self.p == o.p && self.n == o.n, "mixed moduli");
    }

    pub fn add(self, o: Zpn) -> Zpn {
        self.same(&o);
        let m = self.m() as u128;
        Zpn { rep: ((self.rep as u128 + o.rep as u128) % m) as u64, ..self }
    }

    pub fn sub(self, o: Zpn) -> Zpn {
        self.same(&o);
        let m = self.m() as u128;
        Zpn { rep: ((self.rep as u128 + m - o.rep as u128) % m) as u64, ..self }
    }

    pub fn mul(self, o: Zpn) -> Zpn {
        self.same(&o);
        let m = self.m() as u128;
        Zpn { rep: ((self.rep as u128 * o.rep as u128) % m) as u64, ..self }
    }

    pub fn neg(self) -> Zpn {
        let m = self.m();
        Zpn { rep: (m - self.rep) % m, ..self }
    }

    pub fn inv(&self) -> Option<Zpn> {
        if self.rep.is_multiple_of(self.p) {
            return None;
        }
        let m = self.m() as i128;
        let (mut a, mut b) = (self.rep as i128, m);
        let (mut x0, mut x1) = (1i128, 0i128);
        while b != 0 {
            let q = a / b;
            (a, b) = (b, a - q * b);
            (x0, x1) = (x1, x0 - q * x1);
        }
        Some(Zpn { rep: x0.rem_euclid(m) as u64, ..*self })
    }

    /// Split a nonzero residue as unit · p^v.
    pub fn unit_part(&self) -> (Zpn, u32) {
        let v = self.valuation();
        let mut r = self.rep;
        for _ in 0..v {
            r /= self.p;
        }
        (Zpn { rep: r, ..*self }, v)
    }
}

/// Exact scalar: a reduced rational or a residue class mod pⁿ.
///
/// Integers produced by [`Coeff::from_int`] are rationals and coerce into a
/// modular ring on first contact with a modular operand.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(Rational),
    Modular(Zpn),
}

/// Descriptor of the coefficient ring of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseRing {
    Rationals,
    Zpn { p: u64, n: u32 },
}

impl BaseRing {
    pub fn fp(p: u64) -> Self {
        BaseRing::Zpn { p, n: 1 }
    }

    pub fn is_field(&self) -> bool {
        match self {
            BaseRing::Rationals => true,
            BaseRing::Zpn { n, .. } => *n == 1,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            BaseRing::Rationals => 0,
            BaseRing::Zpn { p, n } => ipow(*p, *n),
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            BaseRing::Rationals => None,
            BaseRing::Zpn { p, .. } => Some(*p),
        }
    }

    /// Image of a rational in this ring.
    pub fn embed(&self, q: &Rational) -> Option<Scalar> {
        match self {
            BaseRing::Rationals => Some(Scalar::Rational(q.clone())),
            BaseRing::Zpn { p, n } => Zpn::from_rational(*p, *n, q).map(Scalar::Modular),
        }
    }

    pub fn int(&self, v: i64) -> Scalar {
        match self {
            BaseRing::Rationals => Scalar::Rational(rint(v)),
            BaseRing::Zpn { p, n } => Scalar::Modular(Zpn::new(*p, *n, v)),
        }
    }

    pub fn bigint(&self, v: &BigInt) -> Scalar {
        match self {
            BaseRing::Rationals => Scalar::Rational(BigRational::from_integer(v.clone())),
            BaseRing::Zpn { p, n } => Scalar::Modular(Zpn::from_bigint(*p, *n, v)),
        }
    }

    /// Bring a scalar into this ring (rationals are reduced when possible).
    pub fn coerce(&self, s: &Scalar) -> Option<Scalar> {
        match (self, s) {
            (BaseRing::Rationals, Scalar::Rational(_)) => Some(s.clone()),
            (BaseRing::Rationals, Scalar::Modular(_)) => None,
            (BaseRing::Zpn { .. }, Scalar::Rational(q)) => self.embed(q),
            (BaseRing::Zpn { p, n }, Scalar::Modular(z)) => (z.p == *p && z.n == *n).then(|| s.clone()),
        }
    }

    /// Composition length of the cyclic module generated by `s`.
    pub fn length_of(&self, s: &Scalar) -> u32 {
        match (self, s) {
            (_, x) if Coeff::is_zero(x) => 0,
            (BaseRing::Rationals, _) => 1,
            (BaseRing::Zpn { n, .. }, Scalar::Modular(z)) => n - z.valuation(),
            (BaseRing::Zpn { .. }, Scalar::Rational(_)) => self.length_of(&self.coerce(s).expect("non-integral scalar")),
        }
    }

    /// Valuation of a scalar in this ring (0 for nonzero rationals).
    pub fn valuation(&self, s: &Scalar) -> u32 {
        match self {
            BaseRing::Rationals => 0,
            BaseRing::Zpn { n, .. } => {
                let c = self.coerce(s).expect("scalar outside ring");
                match c {
                    Scalar::Modular(z) => z.valuation(),
                    Scalar::Rational(_) => *n,
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            BaseRing::Rationals => "QQ".into(),
            BaseRing::Zpn { p, n: 1 } => format!("GF({p})"),
            BaseRing::Zpn { p, n } => format!("Z/{p}^{n}"),
        }
    }
}

impl Scalar {
    pub fn rational(n: i64, d: i64) -> Self {
        Scalar::Rational(rat(n, d))
    }

    pub fn modular(p: u64, n: u32, v: i64) -> Self {
        Scalar::Modular(Zpn::new(p, n, v))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Modular(_) => None,
        }
    }

    fn lift_pair(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        match (a, b) {
            (Scalar::Rational(q), Scalar::Modular(z)) => {
                (Scalar::Modular(Zpn::from_rational(z.p, z.n, q).expect("denominator divisible by p")), b.clone())
            }
            (Scalar::Modular(z), Scalar::Rational(q)) => {
                (a.clone(), Scalar::Modular(Zpn::from_rational(z.p, z.n, q).expect("denominator divisible by p")))
            }
            _ => (a.clone(), b.clone()),
        }
    }

    fn combine(self, o: Scalar, fq: impl Fn(Rational, Rational) -> Rational, fz: impl Fn(Zpn, Zpn) -> Zpn) -> Scalar {
        match Scalar::lift_pair(&self, &o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(fq(a, b)),
            (Scalar::Modular(a), Scalar::Modular(b)) => Scalar::Modular(fz(a, b)),
            _ => unreachable!(),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        match Scalar::lift_pair(self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Modular(a), Scalar::Modular(b)) => a == b,
            _ => false,
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.combine(o, |a, b| a + b, Zpn::add)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.combine(o, |a, b| a - b, Zpn::sub)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.combine(o, |a, b| a * b, Zpn::mul)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Modular(z) => Scalar::Modular(z.neg()),
        }
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::Rational(Zero::zero())
    }
    fn one() -> Self {
        Scalar::Rational(One::one())
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => Zero::is_zero(q),
            Scalar::Modular(z) => z.rep == 0,
        }
    }
    fn from_int(n: i64) -> Self {
        Scalar::Rational(rint(n))
    }
    fn from_rational(q: &Rational) -> Option<Self> {
        Some(Scalar::Rational(q.clone()))
    }
    fn try_inv(&self) -> Option<Self> {
        match self {
            Scalar::Rational(q) => Coeff::try_inv(q).map(Scalar::Rational),
            Scalar::Modular(z) => z.inv().map(Scalar::Modular),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}", fmt_rational(q)),
            Scalar::Modular(z) => write!(f, "{}", z.rep),
        }
    }
}

/// "num/den" in lowest terms, or just "num" for integers.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(BigRational::new(a, b))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(p: u64, v: &BigInt) -> u32 {
    assert!(!v.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut v = v.abs();
    let mut k = 0;
    while (&v % &pb).is_zero() {
        v /= &pb;
        k += 1;
    }
    k
}

/// Legendre's formula for v_p(n!).
pub fn vp_factorial(p: u64, n: u64) -> u64 {
    let mut s = 0;
    let mut q = n / p;
    while q > 0 {
        s += q;
        q /= p;
    }
    s
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Serialized in display form, e.g. "-3/4".
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_reduced() {
        let q = rat(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(fmt_rational(&q), "-3/2");
    }

    #[test]
    fn modular_canonical_and_inverse() {
        let z = Zpn::new(3, 2, -5);
        assert_eq!(z.rep, 4);
        let i = z.inv().unwrap();
        assert_eq!(z.mul(i).rep, 1);
        assert!(Zpn::new(3, 2, 6).inv().is_none());
        assert_eq!(Zpn::new(3, 2, 6).valuation(), 1);
        assert_eq!(Zpn::new(3, 2, 0).valuation(), 2);
    }

    #[test]
    fn integers_coerce_into_modular() {
        let a = Scalar::modular(5, 1, 3);
        let b = Scalar::from_int(4);
        assert_eq!(a.clone() + b, Scalar::modular(5, 1, 2));
        assert_eq!(Scalar::from_rational(&rat(1, 2)).unwrap() * a, Scalar::modular(5, 1, 4));
    }

    #[test]
    fn legendre_formula() {
        for p in [2u64, 3, 5, 7] {
            assert_eq!(vp_factorial(p, p), 1);
            for n in 0..40 {
                let f = factorial(n);
                assert_eq!(vp_int(p, &f) as u64, vp_factorial(p, n));
            }
        }
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["3/2", "-7", "0", "-1/9"] {
            assert_eq!(fmt_rational(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_none());
    }
}
