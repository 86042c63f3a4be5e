//! Buchberger's algorithm with Gebauer–Möller pair elimination.
//!
//! Bases are returned reduced and monic. Cofactor tracking is optional and
//! records every basis element as a combination of the input generators.

use std::collections::BTreeMap;

use super::poly::{mono_deg, mono_div, mono_divides, mono_lcm, mono_mul, Mono, MonomialOrder, Poly};
use super::scalar::Coeff;
use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_CAP: u32 = 24;

fn sort_key(ord: MonomialOrder, e: &[u32]) -> Vec<i64> {
    match ord {
        MonomialOrder::Lex => e.iter().map(|&a| a as i64).collect(),
        MonomialOrder::Grevlex => {
            let mut k = Vec::with_capacity(e.len() + 1);
            k.push(mono_deg(e) as i64);
            k.extend(e.iter().rev().map(|&a| -(a as i64)));
            k
        }
    }
}

/// Working polynomial with terms kept in monomial order.
struct Ordered<K: Coeff> {
    ord: MonomialOrder,
    terms: BTreeMap<Vec<i64>, (Mono, K)>,
}

impl<K: Coeff> Ordered<K> {
    fn from_poly(p: &Poly<K>, ord: MonomialOrder) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in p.terms() {
            terms.insert(sort_key(ord, e), (e.clone(), c.clone()));
        }
        Ordered { ord, terms }
    }

    fn pop_leading(&mut self) -> Option<(Mono, K)> {
        self.terms.pop_last().map(|(_, v)| v)
    }

    /// self -= c·x^m·g
    fn sub_mul(&mut self, g: &Poly<K>, m: &[u32], c: &K) {
        for (e, v) in g.terms() {
            let f = mono_mul(e, m);
            let k = sort_key(self.ord, &f);
            let delta = v.clone() * c.clone();
            match self.terms.get_mut(&k) {
                Some(slot) => {
                    let s = slot.1.clone() - delta;
                    if s.is_zero() {
                        self.terms.remove(&k);
                    } else {
                        slot.1 = s;
                    }
                }
                None => {
                    self.terms.insert(k, (f, -delta));
                }
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Divide `f` by the list `gs` (leading terms taken under `ord`).
///
/// Returns quotients and the fully reduced remainder; fails only if a
/// leading coefficient is not invertible.
pub fn divide<K: Coeff>(f: &Poly<K>, gs: &[Poly<K>], ord: MonomialOrder) -> Result<(Vec<Poly<K>>, Poly<K>)> {
    let n = f.nvars();
    let leads: Vec<(Mono, K)> = gs
        .iter()
        .map(|g| {
            let (m, c) = g.leading(ord).expect("zero divisor");
            let inv = c.try_inv().ok_or_else(|| Error::NotAField(format!("leading coefficient {c}")))?;
            Ok((m.clone(), inv))
        })
        .collect::<Result<_>>()?;
    let mut q = vec![Poly::zero(n); gs.len()];
    let mut rem = Poly::zero(n);
    let mut w = Ordered::from_poly(f, ord);
    while let Some((m, c)) = w.pop_leading() {
        match leads.iter().position(|(lm, _)| mono_divides(lm, &m)) {
            Some(i) => {
                let t = mono_div(&m, &leads[i].0);
                let coef = c * leads[i].1.clone();
                q[i].add_term(t.clone(), coef.clone());
                // the leading term cancels exactly; subtract the tail only
                let mut tail = gs[i].clone();
                tail.add_term(leads[i].0.clone(), -gs[i].coeff(&leads[i].0));
                w.sub_mul(&tail, &t, &coef);
            }
            None => rem.add_term(m, c),
        }
    }
    let _ = w.is_zero();
    Ok((q, rem))
}

pub fn normal_form_by<K: Coeff>(f: &Poly<K>, gs: &[Poly<K>], ord: MonomialOrder) -> Result<Poly<K>> {
    divide(f, gs, ord).map(|r| r.1)
}

struct Entry<K: Coeff> {
    poly: Poly<K>,
    lm: Mono,
    cof: Option<Vec<Poly<K>>>,
}

fn make_monic<K: Coeff>(e: &mut Entry<K>, ord: MonomialOrder) -> Result<()> {
    let (lm, lc) = {
        let (m, c) = e.poly.leading(ord).expect("zero entry");
        (m.clone(), c.clone())
    };
    let inv = lc.try_inv().ok_or_else(|| Error::NotAField(format!("cannot normalize leading coefficient {lc}")))?;
    e.poly = e.poly.scale(&inv);
    if let Some(c) = &mut e.cof {
        for x in c.iter_mut() {
            *x = x.scale(&inv);
        }
    }
    e.lm = lm;
    Ok(())
}

/// Reduce `f` modulo the active entries, tracking cofactors when requested.
fn reduce_entry<K: Coeff>(
    mut f: Poly<K>,
    mut cof: Option<Vec<Poly<K>>>,
    entries: &[Entry<K>],
    active: &[usize],
    ord: MonomialOrder,
) -> (Poly<K>, Option<Vec<Poly<K>>>) {
    let n = f.nvars();
    let mut rem = Poly::zero(n);
    let mut w = Ordered::from_poly(&f, ord);
    while let Some((m, c)) = w.pop_leading() {
        match active.iter().find(|&&i| mono_divides(&entries[i].lm, &m)) {
            Some(&i) => {
                let t = mono_div(&m, &entries[i].lm);
                let mut tail = entries[i].poly.clone();
                tail.add_term(entries[i].lm.clone(), -K::one());
                w.sub_mul(&tail, &t, &c);
                if let (Some(cf), Some(ci)) = (&mut cof, &entries[i].cof) {
                    for (a, b) in cf.iter_mut().zip(ci) {
                        *a = &*a - &b.mul_term(&t, &c);
                    }
                }
            }
            None => rem.add_term(m, c),
        }
    }
    f = rem;
    (f, cof)
}

/// Buchberger with the Gebauer–Möller criteria. Returns a reduced monic basis
/// and, if requested, cofactors with respect to the generators.
pub fn buchberger<K: Coeff>(
    gens: &[Poly<K>],
    ord: MonomialOrder,
    degree_cap: u32,
    track: bool,
) -> Result<(Vec<Poly<K>>, Option<Vec<Vec<Poly<K>>>>)> {
    let ngen = gens.len();
    let nvars = gens.first().map(|g| g.nvars()).unwrap_or(0);
    let mut entries: Vec<Entry<K>> = Vec::new();
    let mut basis: Vec<usize> = Vec::new();
    let mut pairs: Vec<(usize, usize, Mono)> = Vec::new();

    let update = |entries: &Vec<Entry<K>>, basis: &mut Vec<usize>, pairs: &mut Vec<(usize, usize, Mono)>, h: usize| {
        let lh = entries[h].lm.clone();
        let mut c: Vec<(usize, Mono)> = basis.iter().map(|&g| (g, mono_lcm(&entries[g].lm, &lh))).collect();
        let mut d: Vec<(usize, Mono)> = Vec::new();
        while let Some((g, l)) = c.pop() {
            let coprime = entries[g].lm.iter().zip(&lh).all(|(a, b)| *a == 0 || *b == 0);
            let dominated = c.iter().chain(d.iter()).any(|(_, l2)| mono_divides(l2, &l));
            if coprime || !dominated {
                d.push((g, l));
            }
        }
        let e: Vec<(usize, Mono)> =
            d.into_iter().filter(|(g, _)| !entries[*g].lm.iter().zip(&lh).all(|(a, b)| *a == 0 || *b == 0)).collect();
        pairs.retain(|(g1, g2, l)| {
            !(mono_divides(&lh, l) && mono_lcm(&entries[*g1].lm, &lh) != *l && mono_lcm(&entries[*g2].lm, &lh) != *l)
        });
        pairs.extend(e.into_iter().map(|(g, l)| (g, h, l)));
        basis.retain(|&g| !mono_divides(&lh, &entries[g].lm));
        basis.push(h);
    };

    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let cof = track.then(|| {
            let mut v = vec![Poly::zero(nvars); ngen];
            v[i] = Poly::one(nvars);
            v
        });
        let (r, cof) = reduce_entry(g.clone(), cof, &entries, &basis, ord);
        if r.is_zero() {
            continue;
        }
        if r.total_degree().unwrap_or(0) > degree_cap {
            return Err(Error::DegreeBoundExceeded(degree_cap));
        }
        let mut e = Entry { lm: Vec::new(), poly: r, cof };
        make_monic(&mut e, ord)?;
        entries.push(e);
        let h = entries.len() - 1;
        update(&entries, &mut basis, &mut pairs, h);
    }

    while !pairs.is_empty() {
        let best = (0..pairs.len()).min_by(|&a, &b| ord.cmp(&pairs[a].2, &pairs[b].2)).unwrap();
        let (i, j, l) = pairs.swap_remove(best);
        if mono_deg(&l) > degree_cap {
            return Err(Error::DegreeBoundExceeded(degree_cap));
        }
        let ti = mono_div(&l, &entries[i].lm);
        let tj = mono_div(&l, &entries[j].lm);
        let s = &entries[i].poly.mul_term(&ti, &K::one()) - &entries[j].poly.mul_term(&tj, &K::one());
        let cof = match (&entries[i].cof, &entries[j].cof) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| &x.mul_term(&ti, &K::one()) - &y.mul_term(&tj, &K::one())).collect()),
            _ => None,
        };
        let all: Vec<usize> = (0..entries.len()).collect();
        let (r, cof) = reduce_entry(s, cof, &entries, &all, ord);
        if r.is_zero() {
            continue;
        }
        let mut e = Entry { lm: Vec::new(), poly: r, cof };
        make_monic(&mut e, ord)?;
        entries.push(e);
        let h = entries.len() - 1;
        update(&entries, &mut basis, &mut pairs, h);
    }

    // interreduce to the reduced basis
    basis.sort_by(|&a, &b| ord.cmp(&entries[a].lm, &entries[b].lm));
    let mut out: Vec<Entry<K>> = Vec::new();
    for &b in &basis {
        let e = &entries[b];
        let others: Vec<usize> = basis.iter().copied().filter(|&x| x != b).collect();
        let lead_term = Poly::monomial(e.lm.clone(), K::one());
        let mut tail = e.poly.clone();
        tail.add_term(e.lm.clone(), -K::one());
        // cofactors track e.poly minus the subtracted multiples, which is lead + reduced tail
        let (rt, cof) = reduce_entry(tail, e.cof.clone(), &entries, &others, ord);
        let poly = &lead_term + &rt;
        out.push(Entry { lm: e.lm.clone(), poly, cof });
    }
    let cofs = track.then(|| out.iter().map(|e| e.cof.clone().unwrap()).collect());
    Ok((out.into_iter().map(|e| e.poly).collect(), cofs))
}

/// An ideal with a cached reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct Ideal<K: Coeff> {
    nvars: usize,
    generators: Vec<Poly<K>>,
    order: MonomialOrder,
    degree_cap: u32,
    gb_cache: Option<Vec<Poly<K>>>,
}

impl<K: Coeff> Ideal<K> {
    pub fn new(nvars: usize, generators: Vec<Poly<K>>, order: MonomialOrder) -> Self {
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ideal { nvars, generators, order, degree_cap: DEFAULT_DEGREE_CAP, gb_cache: None }
    }

    pub fn with_degree_cap(mut self, cap: u32) -> Self {
        self.degree_cap = cap;
        self.gb_cache = None;
        self
    }

    /// Construct with the Gröbner basis already computed.
    pub fn computed(nvars: usize, generators: Vec<Poly<K>>, order: MonomialOrder) -> Result<Self> {
        Ideal::new(nvars, generators, order).groebner()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Poly<K>] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn gb(&self) -> Option<&[Poly<K>]> {
        self.gb_cache.as_deref()
    }

    /// Return the ideal with its reduced Gröbner basis populated.
    pub fn groebner(&self) -> Result<Self> {
        if self.gb_cache.is_some() {
            return Ok(self.clone());
        }
        let (gb, _) = buchberger(&self.generators, self.order, self.degree_cap, false)?;
        Ok(Ideal { gb_cache: Some(gb), ..self.clone() })
    }

    fn basis(&self) -> Result<std::borrow::Cow<'_, [Poly<K>]>> {
        match &self.gb_cache {
            Some(g) => Ok(std::borrow::Cow::Borrowed(g.as_slice())),
            None => Ok(std::borrow::Cow::Owned(buchberger(&self.generators, self.order, self.degree_cap, false)?.0)),
        }
    }

    pub fn normal_form(&self, f: &Poly<K>) -> Result<Poly<K>> {
        assert_eq!(f.nvars(), self.nvars, "variable count mismatch");
        let gb = self.basis()?;
        if gb.is_empty() {
            return Ok(f.clone());
        }
        normal_form_by(f, &gb, self.order)
    }

    pub fn contains(&self, f: &Poly<K>) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    pub fn is_unit(&self) -> Result<bool> {
        self.contains(&Poly::one(self.nvars))
    }

    pub fn leading_monomials(&self) -> Result<Vec<Mono>> {
        Ok(self.basis()?.iter().map(|g| g.leading(self.order).unwrap().0.clone()).collect())
    }

    /// Monomials of weighted degree `d` not divisible by any leading monomial.
    pub fn standard_monomials(&self, weights: &[u32], d: u32) -> Result<Vec<Mono>> {
        let leads = self.leading_monomials()?;
        let mut out = Vec::new();
        weighted_monomials(weights, d, &mut |m| {
            if !leads.iter().any(|l| mono_divides(l, m)) {
                out.push(m.to_vec());
            }
        });
        out.sort_by(|a, b| self.order.cmp(b, a));
        Ok(out)
    }

    /// S-polynomial check of the cached basis.
    pub fn verify_gb(&self) -> Result<bool> {
        let gb = self.basis()?;
        for i in 0..gb.len() {
            for j in i + 1..gb.len() {
                let (li, _) = gb[i].leading(self.order).unwrap();
                let (lj, _) = gb[j].leading(self.order).unwrap();
                let l = mono_lcm(li, lj);
                let s = &gb[i].mul_term(&mono_div(&l, li), &gb[j].leading(self.order).unwrap().1.clone())
                    - &gb[j].mul_term(&mono_div(&l, lj), &gb[i].leading(self.order).unwrap().1.clone());
                if !normal_form_by(&s, &gb, self.order)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Visit every exponent vector of weighted degree `d` (weights positive).
pub fn weighted_monomials(weights: &[u32], d: u32, visit: &mut dyn FnMut(&[u32])) {
    fn rec(w: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if i == w.len() {
            if left == 0 {
                visit(cur);
            }
            return;
        }
        let mut a = 0;
        while a * w[i] <= left {
            cur.push(a);
            rec(w, i + 1, left - a * w[i], cur, visit);
            cur.pop();
            a += 1;
        }
    }
    assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
    rec(weights, 0, d, &mut Vec::new(), visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{rint, Rational, Scalar};

    type P = Poly<Rational>;

    fn v(n: usize, i: usize) -> P {
        P::var(n, i)
    }

    #[test]
    fn spec_normal_forms() {
        let (x, y) = (v(2, 0), v(2, 1));
        let i = Ideal::new(2, vec![&x - &y], MonomialOrder::Grevlex);
        assert_eq!(i.normal_form(&(&x * &y)).unwrap(), &y * &y);
        let sq = Ideal::new(2, vec![&x * &x], MonomialOrder::Grevlex);
        assert!(sq.normal_form(&(&x * &x)).unwrap().is_zero());
        let unit = Ideal::new(2, vec![P::one(2)], MonomialOrder::Grevlex);
        assert!(unit.normal_form(&P::one(2)).unwrap().is_zero());
    }

    #[test]
    fn spec_groebner_bases() {
        let (x, y) = (v(2, 0), v(2, 1));
        let g = Ideal::computed(2, vec![&x * &x, &x * &y], MonomialOrder::Grevlex).unwrap();
        let gb = g.gb().unwrap();
        assert_eq!(gb.len(), 2);
        assert!(gb.contains(&(&x * &x)) && gb.contains(&(&x * &y)));
        let g = Ideal::computed(2, vec![&x - &y], MonomialOrder::Grevlex).unwrap();
        assert_eq!(g.gb().unwrap(), &[&x - &y]);
    }

    #[test]
    fn cyclic_three_has_known_leading_terms() {
        // cyclic-3: x+y+z, xy+yz+zx, xyz-1 under lex has basis with leads x, y^2, z^3
        let (x, y, z) = (v(3, 0), v(3, 1), v(3, 2));
        let f1 = &(&x + &y) + &z;
        let f2 = &(&(&x * &y) + &(&y * &z)) + &(&z * &x);
        let f3 = &(&(&x * &y) * &z) - &P::one(3);
        let g = Ideal::computed(3, vec![f1, f2, f3], MonomialOrder::Lex).unwrap();
        let mut leads = g.leading_monomials().unwrap();
        leads.sort();
        assert_eq!(leads, vec![vec![0, 0, 3], vec![0, 2, 0], vec![1, 0, 0]]);
        assert!(g.verify_gb().unwrap());
    }

    #[test]
    fn cofactors_reconstruct_basis() {
        let (x, y) = (v(2, 0), v(2, 1));
        let gens = vec![&(&x * &x) - &y, &(&x * &y) - &P::one(2)];
        let (gb, cof) = buchberger(&gens, MonomialOrder::Grevlex, 24, true).unwrap();
        for (g, c) in gb.iter().zip(cof.unwrap()) {
            let mut s = P::zero(2);
            for (ci, fi) in c.iter().zip(&gens) {
                s = &s + &(ci * fi);
            }
            assert_eq!(&s, g);
        }
    }

    #[test]
    fn finite_field_and_non_field() {
        let x = Poly::<Scalar>::var(1, 0);
        let two = Poly::constant(1, Scalar::modular(3, 1, 2));
        let i = Ideal::computed(1, vec![&(&x * &two) - &Poly::one(1)], MonomialOrder::Grevlex).unwrap();
        // 2x - 1 over F_3 is x - 2
        assert!(i.contains(&(&x - &Poly::constant(1, Scalar::modular(3, 1, 2)))).unwrap());
        let three = Poly::constant(1, Scalar::modular(3, 2, 3));
        let bad = Ideal::new(1, vec![&x * &three], MonomialOrder::Grevlex).groebner();
        assert!(matches!(bad, Err(Error::NotAField(_))));
    }

    #[test]
    fn degree_cap_is_enforced() {
        let (x, y) = (v(2, 0), v(2, 1));
        let f = &x.pow(30) - &y;
        let r = Ideal::new(2, vec![f, &x * &y], MonomialOrder::Grevlex).groebner();
        assert_eq!(r.unwrap_err(), Error::DegreeBoundExceeded(24));
        let _ = rint(0);
    }
}
