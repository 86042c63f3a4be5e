//! Positively graded quotient rings k[x]/J, finite modules, and minimal free
//! resolutions computed degree by degree.
//!
//! A resolution is only returned together with a certificate that every
//! generator lies below a computed degree bound: over a polynomial ring the
//! bound comes from Tor against the Koszul complex of k (the source must have
//! finite length), over an Artinian ring from the top degree of the ring.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::groebner::Ideal;
use super::matrix::Matrix;
use super::poly::{Mono, MonomialOrder, MultiPoly, Poly};
use super::scalar::{BaseRing, Coeff, Scalar};
use crate::error::{Error, Result};

const MAX_MODULE_DEGREE: i64 = 200;

/// k[x₁..xₙ]/J with positive weights and J homogeneous.
#[derive(Clone, Debug)]
pub struct GradedRing {
    pub field: BaseRing,
    pub names: Vec<String>,
    pub weights: Vec<u32>,
    ideal: Ideal<Scalar>,
    end: Option<u32>,
}

impl GradedRing {
    pub fn new(field: BaseRing, names: Vec<String>, weights: Vec<u32>, relations: Vec<MultiPoly>) -> Result<Self> {
        if !field.is_field() {
            return Err(Error::NotAField(field.label()));
        }
        let n = names.len();
        if weights.len() != n || weights.contains(&0) {
            return Err(Error::Invalid("weights must be positive, one per variable".into()));
        }
        let rels: Vec<MultiPoly> = relations.into_iter().map(|r| coerce_poly(field, &r)).collect::<Result<_>>()?;
        if let Some(r) = rels.iter().find(|r| !r.is_homogeneous(&weights)) {
            return Err(Error::Invalid(format!("relation {} is not weighted-homogeneous", r.fmt_with(&names))));
        }
        let ideal = Ideal::computed(n, rels, MonomialOrder::Grevlex)?;
        let mut ring = GradedRing { field, names, weights, ideal, end: None };
        ring.end = ring.detect_end()?;
        Ok(ring)
    }

    pub fn polynomial(field: BaseRing, names: &[&str]) -> Result<Self> {
        let n = names.len();
        GradedRing::new(field, names.iter().map(|s| s.to_string()).collect(), vec![1; n], Vec::new())
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn ideal(&self) -> &Ideal<Scalar> {
        &self.ideal
    }

    pub fn is_polynomial(&self) -> bool {
        self.ideal.generators().is_empty()
    }

    /// Top nonzero degree when the ring is finite-dimensional.
    pub fn end(&self) -> Option<u32> {
        self.end
    }

    pub fn is_artinian(&self) -> bool {
        self.end.is_some()
    }

    fn detect_end(&self) -> Result<Option<u32>> {
        let leads = self.ideal.leading_monomials()?;
        let n = self.nvars();
        let pure = (0..n).all(|i| leads.iter().any(|m| m[i] > 0 && m.iter().enumerate().all(|(j, &a)| j == i || a == 0)));
        if !pure {
            return Ok(None);
        }
        let wmax = *self.weights.iter().max().unwrap_or(&1);
        let mut last = 0;
        let mut zeros = 0;
        let mut d = 0;
        while zeros < wmax {
            if self.basis(d)?.is_empty() {
                zeros += 1;
            } else {
                zeros = 0;
                last = d;
            }
            d += 1;
        }
        Ok(Some(last))
    }

    /// Standard monomials of degree d, a basis of R_d.
    pub fn basis(&self, d: u32) -> Result<Vec<Mono>> {
        self.ideal.standard_monomials(&self.weights, d)
    }

    pub fn degree_of(&self, m: &[u32]) -> u32 {
        m.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn reduce(&self, p: &MultiPoly) -> Result<MultiPoly> {
        self.ideal.normal_form(p)
    }

    pub fn var(&self, i: usize) -> MultiPoly {
        Poly::var(self.nvars(), i)
    }

    pub fn max_weight(&self) -> u32 {
        *self.weights.iter().max().unwrap_or(&1)
    }
}

pub fn coerce_poly(field: BaseRing, p: &MultiPoly) -> Result<MultiPoly> {
    let mut out = Poly::zero(p.nvars());
    for (e, c) in p.terms() {
        let c = field.coerce(c).ok_or_else(|| Error::Invalid(format!("coefficient {c} not in {}", field.label())))?;
        out.add_term(e.clone(), c);
    }
    Ok(out)
}

/// A finite-dimensional module: a vector space with commuting variable actions.
#[derive(Clone, Debug, PartialEq)]
pub struct FinModule {
    pub dim: usize,
    /// action of each variable as a dim × dim matrix (columns are images of basis vectors)
    pub actions: Vec<Matrix<Scalar>>,
    /// degree of each basis vector, when graded
    pub degrees: Option<Vec<i64>>,
}

impl FinModule {
    /// The residue field k = R/(x₁..xₙ) in degree 0.
    pub fn residue_field(nvars: usize) -> Self {
        FinModule { dim: 1, actions: vec![Matrix::zeros(1, 1); nvars], degrees: Some(vec![0]) }
    }

    pub fn zero(nvars: usize) -> Self {
        FinModule { dim: 0, actions: vec![Matrix::zeros(0, 0); nvars], degrees: Some(vec![]) }
    }

    /// Check commutation and that the ring relations act by zero.
    pub fn validate(&self, ring: &GradedRing) -> Result<()> {
        if self.actions.len() != ring.nvars() {
            return Err(Error::Invalid("one action matrix per variable required".into()));
        }
        for a in &self.actions {
            if a.rows() != self.dim || a.cols() != self.dim {
                return Err(Error::Invalid("action matrix has wrong shape".into()));
            }
        }
        for i in 0..self.actions.len() {
            for j in i + 1..self.actions.len() {
                if self.actions[i].mul(&self.actions[j]) != self.actions[j].mul(&self.actions[i]) {
                    return Err(Error::Invalid("variable actions do not commute".into()));
                }
            }
        }
        for g in ring.ideal().generators() {
            if !self.act(g).is_zero() {
                return Err(Error::Invalid("ring relation does not act by zero".into()));
            }
        }
        if let Some(deg) = &self.degrees {
            for (i, a) in self.actions.iter().enumerate() {
                for r in 0..self.dim {
                    for c in 0..self.dim {
                        if !a[(r, c)].is_zero() && deg[r] != deg[c] + ring.weights[i] as i64 {
                            return Err(Error::Invalid("action does not respect the grading".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix by which a polynomial acts.
    pub fn act(&self, p: &MultiPoly) -> Matrix<Scalar> {
        let mut out = Matrix::zeros(self.dim, self.dim);
        let mut cache: BTreeMap<(usize, u32), Matrix<Scalar>> = BTreeMap::new();
        for (e, c) in p.terms() {
            let mut m = Matrix::identity(self.dim).scale(c);
            for (i, &a) in e.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let pw = cache
                    .entry((i, a))
                    .or_insert_with(|| {
                        let mut acc = Matrix::identity(self.dim);
                        for _ in 0..a {
                            acc = self.actions[i].mul(&acc);
                        }
                        acc
                    })
                    .clone();
                m = pw.mul(&m);
            }
            out = out.add(&m);
        }
        out
    }

    /// Direct sum of `k` copies, with degree shifts per copy.
    pub fn tensor_free(&self, shifts: &[i64]) -> FinModule {
        let k = shifts.len();
        let dim = self.dim * k;
        let actions = self
            .actions
            .iter()
            .map(|a| {
                Matrix::from_fn(dim, dim, |r, c| {
                    if r / self.dim == c / self.dim {
                        a[(r % self.dim, c % self.dim)].clone()
                    } else {
                        Scalar::zero()
                    }
                })
            })
            .collect();
        let degrees = self.degrees.as_ref().map(|d| (0..dim).map(|i| d[i % self.dim] + shifts[i / self.dim]).collect());
        FinModule { dim, actions, degrees }
    }

    pub fn direct_sum(&self, o: &FinModule) -> FinModule {
        let actions = self.actions.iter().zip(&o.actions).map(|(a, b)| a.block_diag(b)).collect();
        let degrees = match (&self.degrees, &o.degrees) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        FinModule { dim: self.dim + o.dim, actions, degrees }
    }

    /// Quotient by the submodule generated by the given vectors (closed under the action).
    pub fn quotient(&self, gens: &[Vec<Scalar>]) -> Result<(FinModule, Matrix<Scalar>)> {
        // saturate under the action
        let mut sub: Vec<Vec<Scalar>> = Vec::new();
        let mut queue: Vec<Vec<Scalar>> = gens.to_vec();
        let mut rank = 0;
        while let Some(v) = queue.pop() {
            sub.push(v.clone());
            let r = Matrix::from_rows_with_cols(sub.clone(), self.dim).unwrap().rank()?;
            if r == rank {
                sub.pop();
                continue;
            }
            rank = r;
            for a in &self.actions {
                queue.push(a.apply(&v));
            }
        }
        // complement basis: standard vectors not in the span, chosen greedily
        let mut span = sub.clone();
        let mut keep = Vec::new();
        let mut r = rank;
        for j in 0..self.dim {
            let mut e = vec![Scalar::zero(); self.dim];
            e[j] = Scalar::one();
            span.push(e);
            let nr = Matrix::from_rows_with_cols(span.clone(), self.dim).unwrap().rank()?;
            if nr > r {
                r = nr;
                keep.push(j);
            } else {
                span.pop();
            }
        }
        // projection: express each standard vector in terms of kept basis modulo sub
        let q = keep.len();
        let mut cols: Vec<Vec<Scalar>> = sub.clone();
        for &j in &keep {
            let mut e = vec![Scalar::zero(); self.dim];
            e[j] = Scalar::one();
            cols.push(e);
        }
        let basis = Matrix::from_rows_with_cols(cols, self.dim).unwrap().transpose();
        let inv = basis.inverse()?.expect("complement basis is invertible");
        let proj = Matrix::from_fn(q, self.dim, |i, j| inv[(sub.len() + i, j)].clone());
        let actions = self
            .actions
            .iter()
            .map(|a| {
                let lift = Matrix::from_fn(self.dim, q, |r, c| if r == keep[c] { Scalar::one() } else { Scalar::zero() });
                proj.mul(&a.mul(&lift))
            })
            .collect();
        let degrees = self.degrees.as_ref().map(|d| keep.iter().map(|&j| d[j]).collect());
        Ok((FinModule { dim: q, actions, degrees }, proj))
    }

    /// Graded presentation: one generator per basis vector.
    pub fn presentation(&self, ring: &GradedRing) -> Result<GradedModule> {
        let deg = self.degrees.clone().ok_or_else(|| Error::Unsupported("resolving an ungraded module".into()))?;
        let n = ring.nvars();
        let mut relations = Vec::new();
        for (i, a) in self.actions.iter().enumerate() {
            for b in 0..self.dim {
                let mut rel = vec![MultiPoly::zero(n); self.dim];
                rel[b] = ring.var(i);
                for c in 0..self.dim {
                    if !a[(c, b)].is_zero() {
                        rel[c] = &rel[c] - &MultiPoly::constant(n, a[(c, b)].clone());
                    }
                }
                relations.push(rel);
            }
        }
        GradedModule::new(ring, deg, relations)
    }
}

/// coker(⊕ R(−b_j) → ⊕ R(−a_i)) given by homogeneous relation columns.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedModule {
    pub gen_degrees: Vec<i64>,
    pub relations: Vec<Vec<MultiPoly>>,
    pub relation_degrees: Vec<i64>,
}

impl GradedModule {
    pub fn new(ring: &GradedRing, gen_degrees: Vec<i64>, relations: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let mut rels = Vec::new();
        let mut rdeg = Vec::new();
        for r in relations {
            if r.len() != gen_degrees.len() {
                return Err(Error::Invalid("relation length differs from generator count".into()));
            }
            let r: Vec<MultiPoly> = r.iter().map(|p| coerce_poly(ring.field, p).and_then(|p| ring.reduce(&p))).collect::<Result<_>>()?;
            let mut d = None;
            for (g, p) in r.iter().enumerate() {
                for (e, _) in p.terms() {
                    let dd = ring.degree_of(e) as i64 + gen_degrees[g];
                    if d.is_some_and(|x| x != dd) {
                        return Err(Error::Invalid("relation is not homogeneous".into()));
                    }
                    d = Some(dd);
                }
            }
            if let Some(d) = d {
                rels.push(r);
                rdeg.push(d);
            }
        }
        Ok(GradedModule { gen_degrees, relations: rels, relation_degrees: rdeg })
    }

    pub fn free(degrees: Vec<i64>) -> Self {
        GradedModule { gen_degrees: degrees, relations: Vec::new(), relation_degrees: Vec::new() }
    }

    /// Dimension of M_d.
    pub fn hilbert(&self, ring: &GradedRing, d: i64) -> Result<usize> {
        let f = FreeModule { degrees: self.gen_degrees.clone() };
        let basis = f.piece(ring, d)?;
        let rel = FreeModule { degrees: self.relation_degrees.clone() };
        let m = map_matrix(ring, &rel, &f, &self.relations, d)?;
        let r = if m.cols() == 0 || m.rows() == 0 { 0 } else { m.rank()? };
        Ok(basis.len() - r)
    }

    /// Top nonzero degree if the module has finite length.
    pub fn end(&self, ring: &GradedRing) -> Result<Option<i64>> {
        if self.gen_degrees.is_empty() {
            return Ok(Some(i64::MIN));
        }
        let lo = *self.gen_degrees.iter().min().unwrap();
        let hi = *self.gen_degrees.iter().max().unwrap();
        let w = ring.max_weight() as i64;
        let mut last = i64::MIN;
        let mut zeros = 0;
        let mut d = lo;
        while d <= MAX_MODULE_DEGREE {
            if self.hilbert(ring, d)? == 0 {
                if d > hi {
                    zeros += 1;
                    if zeros >= w {
                        return Ok(Some(last));
                    }
                }
            } else {
                zeros = 0;
                last = d;
            }
            d += 1;
        }
        Ok(None)
    }
}

/// Free module ⊕ R(−a_i).
#[derive(Clone, Debug, PartialEq)]
pub struct FreeModule {
    pub degrees: Vec<i64>,
}

impl FreeModule {
    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// Basis (generator, monomial) of the degree-d piece.
    pub fn piece(&self, ring: &GradedRing, d: i64) -> Result<Vec<(usize, Mono)>> {
        let mut out = Vec::new();
        for (g, &a) in self.degrees.iter().enumerate() {
            if d - a < 0 {
                continue;
            }
            for m in ring.basis((d - a) as u32)? {
                out.push((g, m));
            }
        }
        Ok(out)
    }

    /// Coordinates of a reduced homogeneous vector in the degree-d basis.
    pub fn coords(&self, ring: &GradedRing, v: &[MultiPoly], d: i64) -> Result<Vec<Scalar>> {
        let basis = self.piece(ring, d)?;
        let mut out = vec![Scalar::zero(); basis.len()];
        let index: BTreeMap<(usize, &Mono), usize> = basis.iter().enumerate().map(|(i, (g, m))| ((*g, m), i)).collect();
        for (g, p) in v.iter().enumerate() {
            for (e, c) in p.terms() {
                if ring.degree_of(e) as i64 + self.degrees[g] != d {
                    continue;
                }
                let i = index.get(&(g, e)).ok_or_else(|| Error::Invalid("vector not reduced".into()))?;
                out[*i] = c.clone();
            }
        }
        Ok(out)
    }

    pub fn from_coords(&self, ring: &GradedRing, c: &[Scalar], d: i64) -> Result<Vec<MultiPoly>> {
        let basis = self.piece(ring, d)?;
        let n = ring.nvars();
        let mut v = vec![MultiPoly::zero(n); self.rank()];
        for ((g, m), x) in basis.iter().zip(c) {
            v[*g].add_term(m.clone(), x.clone());
        }
        Ok(v)
    }
}

/// m·v reduced, for a free-module vector v.
pub fn mul_vec(ring: &GradedRing, m: &MultiPoly, v: &[MultiPoly]) -> Result<Vec<MultiPoly>> {
    v.iter().map(|p| ring.reduce(&(m * p))).collect()
}

/// Matrix of the map src → tgt (generator images `images`) in degree d.
pub fn map_matrix(ring: &GradedRing, src: &FreeModule, tgt: &FreeModule, images: &[Vec<MultiPoly>], d: i64) -> Result<Matrix<Scalar>> {
    let sb = src.piece(ring, d)?;
    let tb = tgt.piece(ring, d)?;
    let n = ring.nvars();
    let mut m = Matrix::zeros(tb.len(), sb.len());
    for (j, (g, mono)) in sb.iter().enumerate() {
        let v = mul_vec(ring, &Poly::monomial(mono.clone(), Scalar::one()), &images[*g])?;
        let c = tgt.coords(ring, &v, d)?;
        for (i, x) in c.into_iter().enumerate() {
            m[(i, j)] = x;
        }
        let _ = n;
    }
    Ok(m)
}

/// F₀ ← F₁ ← ⋯ ← F_L with d_i(h) ∈ F_{i−1} for each generator h of F_i.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub ring: Arc<GradedRing>,
    pub module: GradedModule,
    pub free: Vec<FreeModule>,
    /// diffs[i] lists images of generators of F_{i+1} in F_i
    pub diffs: Vec<Vec<Vec<MultiPoly>>>,
}

impl Resolution {
    /// Resolve M through F_len.
    pub fn compute(ring: Arc<GradedRing>, module: &GradedModule, len: usize) -> Result<Resolution> {
        let f0 = FreeModule { degrees: module.gen_degrees.clone() };
        let f1 = FreeModule { degrees: module.relation_degrees.clone() };
        let mut free = vec![f0];
        let mut diffs = Vec::new();
        if len >= 1 {
            free.push(f1);
            diffs.push(module.relations.clone());
        }
        if module.relations.is_empty() {
            // free module: the resolution stops
            while free.len() <= len {
                free.push(FreeModule { degrees: vec![] });
                diffs.push(vec![]);
            }
            return Ok(Resolution { ring, module: module.clone(), free, diffs });
        }
        let bounds = Self::degree_bounds(&ring, module, len)?;
        for i in 2..=len {
            let prev = free[i - 1].clone();
            let prev2 = free[i - 2].clone();
            let lo = prev.degrees.iter().copied().min().unwrap_or(0) + 1;
            let hi = bounds[i];
            let mut gens: Vec<i64> = Vec::new();
            let mut imgs: Vec<Vec<MultiPoly>> = Vec::new();
            let mut d = lo;
            while d <= hi && !prev.degrees.is_empty() {
                let dm = map_matrix(&ring, &prev, &prev2, &diffs[i - 2], d)?;
                let dim = prev.piece(&ring, d)?.len();
                let ker = if dim == 0 {
                    Vec::new()
                } else if dm.rows() == 0 {
                    (0..dim).map(|j| unit(dim, j)).collect()
                } else {
                    dm.kernel()?
                };
                if !ker.is_empty() {
                    let cur = FreeModule { degrees: gens.clone() };
                    let have = map_matrix(&ring, &cur, &prev, &imgs, d)?;
                    let mut span: Vec<Vec<Scalar>> = (0..have.cols()).map(|c| have.col(c)).collect();
                    let mut r = if span.is_empty() { 0 } else { Matrix::from_rows_with_cols(span.clone(), dim).unwrap().rank()? };
                    for v in ker {
                        span.push(v.clone());
                        let nr = Matrix::from_rows_with_cols(span.clone(), dim).unwrap().rank()?;
                        if nr > r {
                            r = nr;
                            gens.push(d);
                            imgs.push(prev.from_coords(&ring, &v, d)?);
                        } else {
                            span.pop();
                        }
                    }
                }
                d += 1;
            }
            free.push(FreeModule { degrees: gens });
            diffs.push(imgs);
        }
        Ok(Resolution { ring, module: module.clone(), free, diffs })
    }

    /// Certified upper bounds on generator degrees of F_i.
    fn degree_bounds(ring: &GradedRing, module: &GradedModule, len: usize) -> Result<Vec<i64>> {
        let mut b = vec![i64::MIN; len + 1];
        if let Some(end) = ring.end() {
            let mut top = *module.relation_degrees.iter().max().unwrap_or(&0);
            for slot in b.iter_mut().skip(2) {
                *slot = top + end as i64;
                top = *slot;
            }
            return Ok(b);
        }
        if !ring.is_polynomial() {
            return Err(Error::ResolutionBoundExceeded("only polynomial or Artinian rings have certified bounds".into()));
        }
        let end = module.end(ring)?.ok_or_else(|| Error::ResolutionBoundExceeded("module is not of finite length".into()))?;
        let mut w = ring.weights.clone();
        w.sort_unstable_by(|a, c| c.cmp(a));
        let tor = |i: usize| end + w.iter().take(i).map(|&x| x as i64).sum::<i64>();
        let f1max = *module.relation_degrees.iter().max().unwrap_or(&0);
        for (i, slot) in b.iter_mut().enumerate().skip(2) {
            *slot = if i == 2 { tor(2).max(f1max) } else { tor(i) };
        }
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.free.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn rank(&self, i: usize) -> usize {
        self.free.get(i).map(|f| f.rank()).unwrap_or(0)
    }

    /// Check d∘d = 0 on generators.
    pub fn verify(&self) -> Result<bool> {
        for i in 1..self.diffs.len() {
            for img in &self.diffs[i] {
                let mut acc = vec![MultiPoly::zero(self.ring.nvars()); self.rank(i - 1)];
                for (g, p) in img.iter().enumerate() {
                    let v = mul_vec(&self.ring, p, &self.diffs[i - 1][g])?;
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a = &*a + &b;
                    }
                }
                if !acc.iter().all(|p| p.is_zero()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn unit(n: usize, j: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[j] = Scalar::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qxy() -> Arc<GradedRing> {
        Arc::new(GradedRing::polynomial(BaseRing::Rationals, &["x", "y"]).unwrap())
    }

    #[test]
    fn koszul_resolution_of_residue_field() {
        let r = qxy();
        let k = FinModule::residue_field(2).presentation(&r).unwrap();
        let res = Resolution::compute(r.clone(), &k, 3).unwrap();
        assert_eq!((res.rank(0), res.rank(1), res.rank(2), res.rank(3)), (1, 2, 1, 0));
        assert!(res.verify().unwrap());
    }

    #[test]
    fn artinian_detection() {
        let x = MultiPoly::var(1, 0);
        let r = GradedRing::new(BaseRing::Rationals, vec!["x".into()], vec![1], vec![&x * &x]).unwrap();
        assert_eq!(r.end(), Some(1));
        let k = FinModule::residue_field(1).presentation(&r).unwrap();
        let res = Resolution::compute(Arc::new(r), &k, 4).unwrap();
        assert_eq!((1..=4).map(|i| res.rank(i)).collect::<Vec<_>>(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn non_homogeneous_relation_rejected() {
        let x = MultiPoly::var(1, 0);
        let r = GradedRing::new(BaseRing::Rationals, vec!["x".into()], vec![1], vec![&x - &MultiPoly::one(1)]);
        assert!(r.is_err());
    }

    #[test]
    fn infinite_length_over_quotient_is_refused() {
        let (x, y) = (MultiPoly::var(2, 0), MultiPoly::var(2, 1));
        let r = Arc::new(GradedRing::new(BaseRing::Rationals, vec!["x".into(), "y".into()], vec![1, 1], vec![&x * &y]).unwrap());
        let k = FinModule::residue_field(2).presentation(&r).unwrap();
        let res = Resolution::compute(r, &k, 3);
        assert!(matches!(res, Err(Error::ResolutionBoundExceeded(_))));
    }
}
