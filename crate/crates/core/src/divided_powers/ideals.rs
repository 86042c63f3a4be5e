//! Divided-power ideal powers, γ_p-nilpotence, the I^[2] descent chain and
//! the γ_p normal form of elements of I^[2].

use num_bigint::BigInt;
use serde::Serialize;

use super::algebra::{Elem, PdAlgebra};
use crate::error::{Error, Result};
use crate::exact::scalar::{factorial, vp_factorial, vp_int, Coeff, Scalar};
use crate::exact::zpn::Span;

/// Upper bound on the divided-power exponents explored for one generator.
const EXPONENT_CAP: u32 = 64;

/// Basis-span generators of an ideal (Howell rows, relations removed).
pub fn ideal_generators(a: &PdAlgebra, s: &Span) -> Vec<Elem> {
    s.basis().into_iter().filter(|v| !a.is_zero(v)).collect()
}

/// γ_e(g) for e = 0..=E, stopping at the last nonzero value below the cap.
fn gamma_sequence(a: &PdAlgebra, g: &Elem) -> Result<Vec<Elem>> {
    let mut seq = vec![a.one()];
    let mut zeros = 0;
    for e in 1..=EXPONENT_CAP {
        let v = a.gamma(e, g)?;
        if a.is_zero(&v) {
            zeros += 1;
            // γ_e vanishing for a run of exponents spanning a full p-block ends the sequence
            if zeros > a.base.prime().unwrap_or(1) as usize * 2 {
                break;
            }
        } else {
            zeros = 0;
        }
        seq.push(v);
    }
    while seq.len() > 1 && a.is_zero(seq.last().unwrap()) {
        seq.pop();
    }
    Ok(seq)
}

/// I^[m]: the ideal generated by ∏ γ_{e_j}(g_j) with Σ e_j ≥ m.
pub fn pd_power(a: &PdAlgebra, gens: &[Elem], m: u32) -> Result<Span> {
    if m == 0 {
        return Ok(a.ideal(&[a.one()]));
    }
    for g in gens {
        if !a.in_pd_ideal(g) {
            return Err(Error::NotInPDIdeal(a.format(g)));
        }
    }
    let seqs: Vec<Vec<Elem>> = gens.iter().map(|g| gamma_sequence(a, g)).collect::<Result<_>>()?;
    let mut products = Vec::new();
    fn walk(a: &PdAlgebra, seqs: &[Vec<Elem>], k: usize, acc: Elem, total: u32, m: u32, out: &mut Vec<Elem>) {
        if a.is_zero(&acc) {
            return;
        }
        if k == seqs.len() {
            if total >= m {
                out.push(acc);
            }
            return;
        }
        for (e, g) in seqs[k].iter().enumerate() {
            let next = if e == 0 { acc.clone() } else { a.mul(&acc, g) };
            walk(a, seqs, k + 1, next, total + e as u32, m, out);
        }
    }
    walk(a, &seqs, 0, a.one(), 0, m, &mut products);
    Ok(a.ideal(&products))
}

/// Chain γ_p^0(I) ⊇ γ_p^1(I) ⊇ ⋯ with the nilpotence verdict.
#[derive(Clone, Debug)]
pub struct NilpotenceReport {
    pub is_nilpotent: bool,
    /// number of steps until zero (or until the repeat was detected)
    pub k: usize,
    pub chain: Vec<Span>,
}

/// The ideal generated by all γ_p(x), x ∈ J.
///
/// For a module basis v_j of J, γ_p(Σ λ_j v_j) expands into Π λ_j^{n_j} Π γ_{n_j}(v_j)
/// with Σ n_j = p; the monomials in λ are independent functions on the residue
/// field, so the span of all γ_p(x) equals the span of those products.
pub fn gamma_p_image(a: &PdAlgebra, j: &Span, p: u32) -> Result<Span> {
    let basis = ideal_generators(a, j);
    let mut tables: Vec<Vec<Elem>> = Vec::new();
    for v in &basis {
        let t: Vec<Elem> = (0..=p).map(|n| a.gamma(n, v)).collect::<Result<_>>()?;
        tables.push(t);
    }
    let mut out = Vec::new();
    fn walk(a: &PdAlgebra, t: &[Vec<Elem>], k: usize, left: u32, acc: Elem, out: &mut Vec<Elem>) {
        if a.is_zero(&acc) {
            return;
        }
        if k == t.len() {
            if left == 0 {
                out.push(acc);
            }
            return;
        }
        for n in 0..=left {
            let next = if n == 0 { acc.clone() } else { a.mul(&acc, &t[k][n as usize]) };
            walk(a, t, k + 1, left - n, next, out);
        }
    }
    walk(a, &tables, 0, p, a.one(), &mut out);
    Ok(a.ideal(&out))
}

/// γ_p-nilpotence of the PD ideal of A.
pub fn gamma_p_nilpotence(a: &PdAlgebra, p: u32) -> Result<NilpotenceReport> {
    gamma_p_nilpotence_on(a, a.pd_ideal(), p)
}

/// γ_p-nilpotence of a given ideal inside the PD ideal.
pub fn gamma_p_nilpotence_on(a: &PdAlgebra, ideal: &Span, p: u32) -> Result<NilpotenceReport> {
    if !crate::exact::scalar::is_prime(p as u64) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    let mut chain = vec![ideal.clone()];
    loop {
        let cur = chain.last().unwrap();
        if a.ideal_length(cur) == 0 {
            return Ok(NilpotenceReport { is_nilpotent: true, k: chain.len() - 1, chain });
        }
        let next = gamma_p_image(a, cur, p)?;
        if chain.iter().any(|c| c.same_as(&next)) {
            let k = chain.len();
            chain.push(next);
            return Ok(NilpotenceReport { is_nilpotent: false, k, chain });
        }
        chain.push(next);
    }
}

/// m_A = I_1 ⊋ I_2 = I_1^[2] ⊋ ⋯ ⊋ 0.
pub fn pd_square_chain(a: &PdAlgebra, p: u32) -> Result<Vec<Span>> {
    let m = a.maximal_ideal();
    if !a.pd_ideal().contains_span(&m) {
        return Err(Error::NotInPDIdeal("the maximal ideal does not carry divided powers".into()));
    }
    if !gamma_p_nilpotence_on(a, &m, p)?.is_nilpotent {
        return Err(Error::NotNilpotent);
    }
    let mut chain = vec![m];
    loop {
        let cur = chain.last().unwrap();
        let len = a.ideal_length(cur);
        if len == 0 {
            return Ok(chain);
        }
        let next = pd_power(a, &ideal_generators(a, cur), 2)?;
        if a.ideal_length(&next) >= len {
            return Err(Error::NonTermination);
        }
        chain.push(next);
    }
}

/// (C, v_p(C)) for C = (pk+ℓ)!/((pk)! ℓ!) or C_{p,b} = (pb)!/((p!)^b b!).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitShape {
    Split { k: u64, l: u64 },
    Block { b: u64 },
}

pub fn pd_unit_coefficient(p: u64, shape: UnitShape) -> (BigInt, u32) {
    let v = match shape {
        UnitShape::Split { k, l } => factorial(p * k + l) / (factorial(p * k) * factorial(l)),
        UnitShape::Block { b } => factorial(p * b) / (factorial(p).pow(b as u32) * factorial(b)),
    };
    // valuation through Legendre's formula, cross-checked on the integer
    let legendre = match shape {
        UnitShape::Split { k, l } => vp_factorial(p, p * k + l) - vp_factorial(p, p * k) - vp_factorial(p, l),
        UnitShape::Block { b } => vp_factorial(p, p * b) - b * vp_factorial(p, p) - vp_factorial(p, b),
    } as u32;
    debug_assert_eq!(legendre, vp_int(p, &v));
    (v, legendre)
}

/// x = a + Σ c_i γ_p(b_i) with a ∈ I² and b_i ∈ I ∖ I².
#[derive(Clone, Debug)]
pub struct GammaNormalForm {
    pub a: Elem,
    pub terms: Vec<(Elem, Elem)>,
}

/// Classification of a single generator γ_e(g) of I^[2].
enum Kind {
    Square,
    GammaP(Elem, Scalar),
}

/// Rewrite γ_e(g): either into I², or as c·γ_p(b) following the divisibility rules.
fn classify(a: &PdAlgebra, sq: &Span, e: u32, g: &Elem, p: u32) -> Result<Kind> {
    if e < 2 {
        return Err(Error::Invalid("exponent below 2".into()));
    }
    if !e.is_multiple_of(p) {
        // e < p: γ_e(g) = g^e/e!; e = pk+ℓ: unit·γ_{pk}(g)γ_ℓ(g); both lie in I²
        return Ok(Kind::Square);
    }
    if e == p {
        return Ok(if sq.contains(g) { Kind::Square } else { Kind::GammaP(g.clone(), Scalar::one()) });
    }
    // e = pb: γ_e(g) = C_{p,b}⁻¹ γ_b(γ_p(g))
    let b = e / p;
    let (c, _) = pd_unit_coefficient(p as u64, UnitShape::Block { b: b as u64 });
    let y = a.gamma(p, g)?;
    let inv = a.base.bigint(&c).try_inv().ok_or(Error::NotAField("C_{p,b} is not invertible".into()))?;
    match classify(a, sq, b, &y, p)? {
        Kind::Square => Ok(Kind::Square),
        Kind::GammaP(bb, cc) => Ok(Kind::GammaP(bb, cc * inv)),
    }
}

/// The normal form of an element of I^[2] for I generated by `gens`.
pub fn gamma_p_normal_form(a: &PdAlgebra, gens: &[Elem], x: &Elem, p: u32) -> Result<GammaNormalForm> {
    let i2 = pd_power(a, gens, 2)?;
    if !i2.contains(x) {
        return Err(Error::NotInPDSquare(a.format(x)));
    }
    let i_span = pd_power(a, gens, 1)?;
    let sq_gens: Vec<Elem> = {
        let basis = ideal_generators(a, &i_span);
        let mut v = Vec::new();
        for (k, u) in basis.iter().enumerate() {
            for w in &basis[k..] {
                v.push(a.mul(u, w));
            }
        }
        v
    };
    let sq = a.ideal(&sq_gens);
    if sq.contains(x) {
        return Ok(GammaNormalForm { a: a.reduce(x), terms: Vec::new() });
    }
    let gp: Vec<Elem> = gens.iter().map(|g| a.gamma(p, g)).collect::<Result<_>>()?;
    for (g, y) in gens.iter().zip(&gp) {
        let rest = a.sub(x, y);
        if sq.contains(&rest) && !sq.contains(g) {
            return Ok(GammaNormalForm { a: a.reduce(&rest), terms: vec![(a.one(), g.clone())] });
        }
    }
    // general case: x ≡ Σ λ_k m_k c_k γ_p(b_k) modulo I²
    let mut candidates: Vec<(Elem, Elem)> = Vec::new();
    for g in gens {
        for e in 2..=(p * p * 2).min(EXPONENT_CAP) {
            if e % p != 0 {
                continue;
            }
            if let Kind::GammaP(b, c) = classify(a, &sq, e, g, p)? {
                if !candidates.iter().any(|(bb, _)| a.equal(bb, &b)) {
                    candidates.push((b, a.scalar(&c)?));
                }
            }
        }
    }
    let dim = a.dim();
    let mut span = Span::tracking(a.base, dim);
    let mut origin: Vec<Option<(usize, usize)>> = Vec::new();
    for r in sq.basis() {
        span.insert(r);
        origin.push(None);
    }
    let gps: Vec<Elem> = candidates.iter().map(|(b, _)| a.gamma(p, b)).collect::<Result<_>>()?;
    for (k, y) in gps.iter().enumerate() {
        for i in 0..dim {
            span.insert(a.mul(&a.unit(i), y));
            origin.push(Some((k, i)));
        }
    }
    let lam = span.express(x).ok_or_else(|| Error::NotInPDSquare(a.format(x)))?;
    let mut coeffs: Vec<Elem> = vec![a.zero(); candidates.len()];
    for (o, l) in origin.iter().zip(lam) {
        if let Some((k, i)) = o {
            if !l.is_zero() {
                coeffs[*k] = a.add(&coeffs[*k], &a.scale(&l, &a.unit(*i)));
            }
        }
    }
    let mut terms = Vec::new();
    let mut rest = x.clone();
    for ((b, _), c) in candidates.into_iter().zip(coeffs) {
        if a.is_zero(&c) {
            continue;
        }
        rest = a.sub(&rest, &a.mul(&c, &a.gamma(p, &b)?));
        terms.push((a.reduce(&c), b));
    }
    let nf = GammaNormalForm { a: a.reduce(&rest), terms };
    verify_normal_form(a, &sq, x, &nf, p)?;
    Ok(nf)
}

/// Reconstruction and membership checks for a normal form.
pub fn verify_normal_form(a: &PdAlgebra, sq: &Span, x: &Elem, nf: &GammaNormalForm, p: u32) -> Result<()> {
    let mut sum = nf.a.clone();
    for (c, b) in &nf.terms {
        sum = a.add(&sum, &a.mul(c, &a.gamma(p, b)?));
        if sq.contains(b) {
            return Err(Error::Invalid("normal form term lies in I^2".into()));
        }
    }
    if !a.equal(&sum, x) || !sq.contains(&nf.a) {
        return Err(Error::Invalid("normal form does not reconstruct the element".into()));
    }
    Ok(())
}

/// Summary of a chain for reporting.
#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub lengths: Vec<u32>,
    pub generators: Vec<Vec<String>>,
}

pub fn summarize(a: &PdAlgebra, chain: &[Span]) -> ChainSummary {
    ChainSummary {
        lengths: chain.iter().map(|s| a.ideal_length(s)).collect(),
        generators: chain.iter().map(|s| ideal_generators(a, s).iter().map(|g| a.format(g)).collect()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::BaseRing;

    fn fp_z(p: u64, t: u32) -> PdAlgebra {
        PdAlgebra::free(BaseRing::fp(p), vec![], vec!["z".into()], vec![t]).unwrap()
    }

    #[test]
    fn unit_coefficients() {
        assert_eq!(pd_unit_coefficient(2, UnitShape::Block { b: 2 }), (BigInt::from(3), 0));
        assert_eq!(pd_unit_coefficient(3, UnitShape::Split { k: 1, l: 1 }), (BigInt::from(4), 0));
    }

    #[test]
    fn square_of_free_char_p_ideal_contains_divided_square() {
        let a = fp_z(3, 9);
        let z = a.generator("z").unwrap();
        let i2 = pd_power(&a, std::slice::from_ref(&z), 2).unwrap();
        let z2 = a.parse("z^[2]").unwrap();
        assert!(i2.contains(&z2));
        let ordinary = a.ideal(&[a.mul(&z, &z)]);
        let z3 = a.parse("z^[3]").unwrap();
        assert!(i2.contains(&z3));
        assert!(!ordinary.contains(&z3));
    }

    #[test]
    fn rational_divided_square_is_ordinary_square() {
        let d = serde_json::from_str(r#"{"base":"QQ","poly_gens":["x"],"trunc":{"x":6},"pd_extra":["x"]}"#).unwrap();
        let a = PdAlgebra::from_descriptor(&d).unwrap();
        let x = a.generator("x").unwrap();
        let i2 = pd_power(&a, std::slice::from_ref(&x), 2).unwrap();
        assert!(i2.same_as(&a.ideal(&[a.mul(&x, &x)])));
    }

    #[test]
    fn nilpotence_examples() {
        let a = fp_z(3, 9);
        let r = gamma_p_nilpotence(&a, 3).unwrap();
        assert!(r.is_nilpotent);
        assert_eq!(r.k, 2);
        let z3 = a.parse("z^[3]").unwrap();
        assert!(r.chain[1].contains(&z3));
        let zp2 = PdAlgebra::free(BaseRing::Zpn { p: 3, n: 2 }, vec![], vec![], vec![]).unwrap();
        let r = gamma_p_nilpotence(&zp2, 3).unwrap();
        assert!(r.is_nilpotent);
        assert_eq!(r.k, 1);
        let z4 = PdAlgebra::free(BaseRing::Zpn { p: 2, n: 2 }, vec![], vec![], vec![]).unwrap();
        assert!(!gamma_p_nilpotence(&z4, 2).unwrap().is_nilpotent);
    }

    #[test]
    fn square_chains() {
        let f = PdAlgebra::free(BaseRing::fp(5), vec![], vec![], vec![]).unwrap();
        assert_eq!(pd_square_chain(&f, 5).unwrap().len(), 1);
        let zp2 = PdAlgebra::free(BaseRing::Zpn { p: 3, n: 2 }, vec![], vec![], vec![]).unwrap();
        let c = pd_square_chain(&zp2, 3).unwrap();
        assert_eq!(c.iter().map(|s| zp2.ideal_length(s)).collect::<Vec<_>>(), vec![1, 0]);
        let z4 = PdAlgebra::free(BaseRing::Zpn { p: 2, n: 2 }, vec![], vec![], vec![]).unwrap();
        assert_eq!(pd_square_chain(&z4, 2).unwrap_err(), Error::NotNilpotent);
    }

    #[test]
    fn normal_forms() {
        let a = fp_z(3, 9);
        let z = a.generator("z").unwrap();
        let x = a.parse("z^[3]").unwrap();
        let nf = gamma_p_normal_form(&a, std::slice::from_ref(&z), &x, 3).unwrap();
        assert!(a.is_zero(&nf.a));
        assert_eq!(nf.terms.len(), 1);
        assert!(a.equal(&nf.terms[0].1, &z));
        let sq = a.parse("z^[2]").unwrap();
        let nf = gamma_p_normal_form(&a, std::slice::from_ref(&z), &sq, 3).unwrap();
        assert!(nf.terms.is_empty());
        // γ_6(z) = C_{3,2}⁻¹ γ_2(γ_3(z)) lies in I²
        let g6 = a.gamma(6, &z).unwrap();
        let nf = gamma_p_normal_form(&a, &[z], &g6, 3).unwrap();
        assert!(nf.terms.is_empty());
        assert!(a.equal(&nf.a, &g6));
    }
}
