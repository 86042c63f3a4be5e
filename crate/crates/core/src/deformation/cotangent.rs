//! The two-term cotangent complex [K/K² → Ω_P⊗B] of B = P/K over k, square-zero
//! extensions of Artinian algebras, and Kodaira–Spencer classes of Artinian
//! families.
//!
//! For a family B' = P/K' over R' and B = B'⊗R = P/K, the class κ is the
//! projection K/K² → J/J² with J = K/K', read in
//! Ext¹(L_{B/k}, N) = coker(Hom_B(Ω_P⊗B, N) → Hom_B(K/K², N)), N = J/J².
//! Since I² = 0 and B' is flat, J² = 0 and N = J = I⊗_R B.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::derham::kaehler::{coerce, kaehler, QuotientRing};
use crate::error::{Error, Result};
use crate::exact::graded::{FinModule, GradedModule, GradedRing, Resolution};
use crate::exact::groebner::weighted_monomials;
use crate::exact::matrix::Matrix;
use crate::exact::poly::{Mono, MultiPoly};
use crate::exact::scalar::{Coeff, Scalar};
use crate::exact::zpn::Span;

/// [K/K² → Ω_P⊗B] in homological degrees 1, 0 for B = P/K graded by positive weights.
#[derive(Clone, Debug)]
pub struct TruncatedCotangent {
    pub ring: QuotientRing,
    pub weights: Vec<u32>,
}

/// Dimensions of one weight piece of the truncated cotangent complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CotangentWeight {
    pub weight: u32,
    pub c1: usize,
    pub c0: usize,
    pub h1: usize,
    pub h0: usize,
}

fn monomials(weights: &[u32], w: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    weighted_monomials(weights, w, &mut |m| out.push(m.to_vec()));
    out
}

impl TruncatedCotangent {
    pub fn new(ring: QuotientRing, weights: Vec<u32>) -> Result<Self> {
        if weights.len() != ring.nvars() || weights.contains(&0) {
            return Err(Error::Invalid("one positive weight per variable".into()));
        }
        for f in &ring.relations {
            if !f.is_homogeneous(&weights) {
                return Err(Error::GradingMismatch(format!("relation {} is not weighted homogeneous", f.fmt_with(&ring.names))));
            }
        }
        Ok(TruncatedCotangent { ring, weights })
    }

    /// Span of (products of) generators times monomials, in weight w.
    fn ideal_piece(&self, gens: &[MultiPoly], w: u32, basis: &[Mono]) -> Span {
        let idx: BTreeMap<&Mono, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut s = Span::new(self.ring.field, basis.len());
        for g in gens {
            let Some(dg) = g.weighted_degree(&self.weights) else { continue };
            if dg > w {
                continue;
            }
            for mu in monomials(&self.weights, w - dg) {
                let p = g.mul_term(&mu, &Scalar::one());
                let mut v = vec![Scalar::zero(); basis.len()];
                for (e, c) in p.terms() {
                    v[idx[e]] = c.clone();
                }
                s.insert(v);
            }
        }
        s
    }

    /// Dimensions of C₁, C₀, H₁ and H₀ in weight w.
    pub fn weight_piece(&self, w: u32) -> CotangentWeight {
        let n = self.ring.nvars();
        let rels: Vec<MultiPoly> = self.ring.relations.iter().filter(|f| !f.is_zero()).cloned().collect();
        let squares: Vec<MultiPoly> =
            (0..rels.len()).flat_map(|i| (i..rels.len()).map(move |j| (i, j))).map(|(i, j)| &rels[i] * &rels[j]).collect();
        let basis = monomials(&self.weights, w);
        let k = self.ideal_piece(&rels, w, &basis);
        let k2 = self.ideal_piece(&squares, w, &basis);
        // target ⊕_i P_{w−w_i} with the K-parts
        let blocks: Vec<Vec<Mono>> =
            (0..n).map(|i| if self.weights[i] <= w { monomials(&self.weights, w - self.weights[i]) } else { Vec::new() }).collect();
        let offsets: Vec<usize> = blocks
            .iter()
            .scan(0, |a, b| {
                let o = *a;
                *a += b.len();
                Some(o)
            })
            .collect();
        let total: usize = blocks.iter().map(|b| b.len()).sum();
        let mut kparts = Span::new(self.ring.field, total);
        let mut c0 = 0;
        for i in 0..n {
            if blocks[i].is_empty() {
                continue;
            }
            let piece = self.ideal_piece(&rels, w - self.weights[i], &blocks[i]);
            c0 += blocks[i].len() - piece.length() as usize;
            for v in piece.basis() {
                let mut big = vec![Scalar::zero(); total];
                big[offsets[i]..offsets[i] + v.len()].clone_from_slice(&v);
                kparts.insert(big);
            }
        }
        let block_idx: Vec<BTreeMap<&Mono, usize>> = blocks.iter().map(|b| b.iter().enumerate().map(|(j, m)| (m, j)).collect()).collect();
        let mut image = kparts.clone();
        for v in k.basis() {
            let g = MultiPoly::from_terms(n, basis.iter().zip(&v).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.clone(), c.clone())));
            let mut big = vec![Scalar::zero(); total];
            for i in 0..n {
                for (e, c) in g.derivative(i).terms() {
                    big[offsets[i] + block_idx[i][e]] = c.clone();
                }
            }
            image.insert(big);
        }
        let rank = (image.length() - kparts.length()) as usize;
        let c1 = (k.length() - k2.length()) as usize;
        CotangentWeight { weight: w, c1, c0, h1: c1 - rank, h0: c0 - rank }
    }

    /// Weight pieces 0..=max_weight.
    pub fn weights_up_to(&self, max_weight: u32) -> Vec<CotangentWeight> {
        (0..=max_weight).map(|w| self.weight_piece(w)).collect()
    }

    /// H₀ against Ω_{B/k} from the Jacobian presentation, weight by weight.
    pub fn h0_matches_kaehler(&self, max_weight: u32) -> Result<bool> {
        let om = kaehler(&self.ring)?.module;
        for w in 0..=max_weight {
            if self.weight_piece(w).h0 != om.weight_dim(&self.weights, &self.weights, w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// R' → R = R'/I with I² = 0, R' Artinian.
#[derive(Clone, Debug)]
pub struct SquareZeroExtension {
    pub big: QuotientRing,
    pub ideal_gens: Vec<MultiPoly>,
    pub small: QuotientRing,
    pub dim_big: usize,
    pub dim_small: usize,
    pub dim_ideal: usize,
}

impl SquareZeroExtension {
    /// Verify I² = 0 and dim R' = dim R + dim I.
    pub fn new(big: QuotientRing, ideal_gens: Vec<MultiPoly>) -> Result<Self> {
        let ideal_gens: Vec<MultiPoly> = ideal_gens.iter().map(|g| coerce(g, big.field)).collect();
        for a in &ideal_gens {
            for b in &ideal_gens {
                if !big.is_zero(&(a * b))? {
                    return Err(Error::NotSquareZero(format!("{} · {} ≠ 0", a.fmt_with(&big.names), b.fmt_with(&big.names))));
                }
            }
        }
        let mut rels = big.relations.clone();
        rels.extend(ideal_gens.iter().cloned());
        let small = QuotientRing::new(big.field, big.names.clone(), rels)?;
        let basis = big.artinian_basis()?;
        let dim_ideal = ideal_span(&big, &basis, &ideal_gens)?.length() as usize;
        let dim_small = small.artinian_basis()?.len();
        if basis.len() != dim_small + dim_ideal {
            return Err(Error::Invalid("R'/I does not have the expected dimension".into()));
        }
        Ok(SquareZeroExtension { dim_big: basis.len(), big, ideal_gens, small, dim_small, dim_ideal })
    }
}

/// Coordinates of a reduced polynomial in a monomial basis.
fn coords(ring: &QuotientRing, basis: &[Mono], f: &MultiPoly) -> Result<Vec<Scalar>> {
    let r = ring.reduce(f)?;
    let mut v = vec![Scalar::zero(); basis.len()];
    for (e, c) in r.terms() {
        let i = basis.iter().position(|b| b == e).ok_or_else(|| Error::Invalid("normal form outside the basis".into()))?;
        v[i] = c.clone();
    }
    Ok(v)
}

/// The ideal generated by `gens` in an Artinian ring, as a span of coordinates.
fn ideal_span(ring: &QuotientRing, basis: &[Mono], gens: &[MultiPoly]) -> Result<Span> {
    let mut s = Span::new(ring.field, basis.len());
    for g in gens {
        for m in basis {
            s.insert(coords(ring, basis, &g.mul_term(m, &Scalar::one()))?);
        }
    }
    Ok(s)
}

/// B' = R'[y]/(F) over a square-zero extension R' → R; the first variables
/// are those of R'.
#[derive(Clone, Debug)]
pub struct ArtinianFamily {
    pub ext: SquareZeroExtension,
    pub names: Vec<String>,
    pub weights: Vec<u32>,
    pub total: QuotientRing,
    pub fibre_relations: Vec<MultiPoly>,
}

impl ArtinianFamily {
    /// Build and check flatness: dim B' = dim R' · dim(B'/𝔪_{R'}B').
    pub fn new(ext: SquareZeroExtension, fibre_names: &[&str], weights: Vec<u32>, fibre_relations: Vec<MultiPoly>) -> Result<Self> {
        let nb = ext.big.nvars();
        let mut names = ext.big.names.clone();
        names.extend(fibre_names.iter().map(|s| s.to_string()));
        let n = names.len();
        if weights.len() != n {
            return Err(Error::Invalid("one weight per variable".into()));
        }
        let pos: Vec<usize> = (0..nb).collect();
        let mut rels: Vec<MultiPoly> = ext.big.relations.iter().map(|f| f.reindex(n, &pos)).collect();
        rels.extend(fibre_relations.iter().cloned());
        let total = QuotientRing::new(ext.big.field, names.clone(), rels.clone())?;
        for f in &rels {
            if !f.is_homogeneous(&weights) {
                return Err(Error::GradingMismatch("family relations must be weighted homogeneous".into()));
            }
        }
        let dim_total = total.artinian_basis()?.len();
        let mut closed = rels.clone();
        closed.extend((0..nb).map(|i| MultiPoly::var(n, i)));
        let fibre = QuotientRing::new(ext.big.field, names.clone(), closed)?;
        let dim_fibre = fibre.artinian_basis()?.len();
        if dim_total != ext.dim_big * dim_fibre {
            return Err(Error::NotFlat(format!("dim B' = {dim_total} but dim R' · dim B₀ = {}", ext.dim_big * dim_fibre)));
        }
        Ok(ArtinianFamily { ext, names, weights, total, fibre_relations })
    }

    /// The ideal generators of I in the total variables.
    pub fn ideal_gens(&self) -> Vec<MultiPoly> {
        let n = self.names.len();
        let pos: Vec<usize> = (0..self.ext.big.nvars()).collect();
        self.ext.ideal_gens.iter().map(|g| g.reindex(n, &pos)).collect()
    }
}

/// κ_{B/B'/k} as a cocycle on the generators of K, with the data to decide
/// whether it is a coboundary.
#[derive(Clone, Debug)]
pub struct KsClass {
    /// generators f_j of K (relations of B)
    pub relations: Vec<MultiPoly>,
    /// N = J as a module over P
    pub module: Arc<FinModule>,
    /// images of the f_j in N
    pub cocycle: Vec<Vec<Scalar>>,
    /// Hom_B(Ω_P⊗B, N) → Hom_B(K/K², N), h ↦ h∘d
    pub coboundary: Matrix<Scalar>,
    /// Hom_P(K, N) ⊂ N^c, as a kernel basis
    pub cocycles: Vec<Vec<Scalar>>,
    /// number of leading relations coming from I
    pub ideal_positions: Vec<usize>,
    pub ideal_images: Vec<Vec<Scalar>>,
}

impl KsClass {
    fn flat(&self) -> Vec<Scalar> {
        self.cocycle.iter().flatten().cloned().collect()
    }

    pub fn is_zero(&self) -> Result<bool> {
        let v = self.flat();
        if v.iter().all(|x| x.is_zero()) {
            return Ok(true);
        }
        if self.coboundary.cols() == 0 {
            return Ok(false);
        }
        Ok(self.coboundary.solve(&v)?.is_some())
    }

    /// dim Ext¹(τ≤1 L_{B/k}, N).
    pub fn ext1_dim(&self) -> Result<usize> {
        let dim = self.cocycles.len();
        let im = if self.coboundary.cols() == 0 || self.coboundary.rows() == 0 { 0 } else { self.coboundary.rank()? };
        Ok(dim - im)
    }

    /// On the generators of I, the cocycle is the projection I → I/I² = I,
    /// and that map is injective on I.
    pub fn recovers_projection(&self) -> Result<bool> {
        for (&j, img) in self.ideal_positions.iter().zip(&self.ideal_images) {
            if &self.cocycle[j] != img {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The Kodaira–Spencer class of an Artinian family.
pub fn kodaira_spencer(fam: &ArtinianFamily) -> Result<KsClass> {
    let field = fam.ext.big.field;
    let n = fam.names.len();
    let ideal = fam.ideal_gens();
    // K = K' + I: relations of B
    let mut rels_b: Vec<MultiPoly> = fam.total.relations.clone();
    let first_ideal = rels_b.len();
    rels_b.extend(ideal.iter().cloned());
    let basis = fam.total.artinian_basis()?;
    // N = J = I·B' ⊂ B'
    let jspan = ideal_span(&fam.total, &basis, &ideal)?;
    let jbasis = jspan.basis();
    let r = jbasis.len();
    let in_j = |v: &[Scalar]| -> Result<Vec<Scalar>> {
        if r == 0 {
            return Ok(Vec::new());
        }
        let m = Matrix::from_rows_with_cols(jbasis.clone(), basis.len()).unwrap().transpose();
        m.solve(v)?.ok_or_else(|| Error::Invalid("element outside J".into()))
    };
    let to_poly =
        |v: &[Scalar]| MultiPoly::from_terms(n, basis.iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.clone(), c.clone())));
    let mut actions = Vec::new();
    for i in 0..n {
        let cols: Vec<Vec<Scalar>> =
            jbasis.iter().map(|b| in_j(&coords(&fam.total, &basis, &(&to_poly(b) * &MultiPoly::var(n, i)))?)).collect::<Result<_>>()?;
        actions.push(if r == 0 { Matrix::zeros(0, 0) } else { Matrix::from_rows_with_cols(cols, r).unwrap().transpose() });
    }
    let module = Arc::new(FinModule { dim: r, actions, degrees: None });
    // syzygies of the f_j from a resolution of P/K
    let ring = Arc::new(GradedRing::new(field, fam.names.clone(), fam.weights.clone(), Vec::new())?);
    let gm = GradedModule::new(&ring, vec![0], rels_b.iter().map(|f| vec![f.clone()]).collect())?;
    let res = Resolution::compute(ring.clone(), &gm, 2)?;
    let fs: Vec<MultiPoly> = res.diffs[0].iter().map(|v| v[0].clone()).collect();
    let c = fs.len();
    let syz = &res.diffs[1];
    // Hom_P(K, N) = {(n_j) : Σ s_j n_j = 0 for every syzygy s}
    let total = c * r;
    let mut rows = Vec::new();
    for s in syz {
        for a in 0..r {
            let mut row = vec![Scalar::zero(); total];
            for (j, p) in s.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let m = module.act(p);
                for b in 0..r {
                    row[j * r + b] = row[j * r + b].clone() + m[(a, b)].clone();
                }
            }
            rows.push(row);
        }
    }
    let cocycles = if total == 0 {
        Vec::new()
    } else if rows.is_empty() {
        (0..total).map(|j| crate::exact::graded::unit(total, j)).collect()
    } else {
        Matrix::from_rows_with_cols(rows, total).unwrap().kernel()?
    };
    // coboundaries h ↦ (Σ_i ∂_i f_j · h_i)_j
    let coboundary = Matrix::from_fn(total, n * r, |row, col| {
        let (j, a) = (row / r, row % r);
        let (i, b) = (col / r, col % r);
        let dfi = fs[j].derivative(i);
        if dfi.is_zero() {
            Scalar::zero()
        } else {
            module.act(&dfi)[(a, b)].clone()
        }
    });
    let cocycle: Vec<Vec<Scalar>> = fs.iter().map(|f| in_j(&coords(&fam.total, &basis, f)?)).collect::<Result<_>>()?;
    let mut ideal_positions = Vec::new();
    let mut ideal_images = Vec::new();
    for g in &rels_b[first_ideal..] {
        if let Some(j) = fs.iter().position(|f| f == g) {
            ideal_positions.push(j);
            ideal_images.push(in_j(&coords(&fam.total, &basis, g)?)?);
        }
    }
    Ok(KsClass { relations: fs, module, cocycle, coboundary, cocycles, ideal_positions, ideal_images })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::polyparse::parse_poly;
    use crate::exact::scalar::BaseRing;

    fn q() -> BaseRing {
        BaseRing::Rationals
    }

    #[test]
    fn smooth_line_has_no_h1() {
        let b = QuotientRing::polynomial(q(), &["x"]).unwrap();
        let t = TruncatedCotangent::new(b, vec![1]).unwrap();
        for p in t.weights_up_to(4) {
            assert_eq!((p.c1, p.h1), (0, 0));
            assert_eq!(p.h0, if p.weight >= 1 { 1 } else { 0 });
        }
        assert!(t.h0_matches_kaehler(4).unwrap());
    }

    #[test]
    fn dual_numbers() {
        for (field, h1) in [(q(), 1), (BaseRing::fp(2), 2)] {
            let b = QuotientRing::parse(field, &["x"], &["x^2"]).unwrap();
            let t = TruncatedCotangent::new(b, vec![1]).unwrap();
            let ps = t.weights_up_to(6);
            assert_eq!(ps.iter().map(|p| p.h1).sum::<usize>(), h1);
            let h0: usize = ps.iter().map(|p| p.h0).sum();
            assert_eq!(h0, if h1 == 1 { 1 } else { 2 });
            assert!(t.h0_matches_kaehler(6).unwrap());
        }
    }

    #[test]
    fn node_is_a_complete_intersection() {
        let b = QuotientRing::parse(q(), &["x", "y"], &["x*y"]).unwrap();
        let t = TruncatedCotangent::new(b, vec![1, 1]).unwrap();
        assert!(t.weights_up_to(6).iter().all(|p| p.h1 == 0));
        assert!(t.h0_matches_kaehler(6).unwrap());
    }

    fn ext(big_names: &[&str], rels: &[&str], ideal: &[&str]) -> SquareZeroExtension {
        let big = QuotientRing::parse(q(), big_names, rels).unwrap();
        let gens = ideal.iter().map(|g| parse_poly(g, big_names, q()).unwrap()).collect();
        SquareZeroExtension::new(big, gens).unwrap()
    }

    #[test]
    fn square_zero_checks() {
        let e = ext(&["t"], &["t^3"], &["t^2"]);
        assert_eq!((e.dim_big, e.dim_small, e.dim_ideal), (3, 2, 1));
        let big = QuotientRing::parse(q(), &["t"], &["t^3"]).unwrap();
        assert!(matches!(SquareZeroExtension::new(big, vec![MultiPoly::var(1, 0)]), Err(Error::NotSquareZero(_))));
    }

    fn fam(e: SquareZeroExtension, weights: Vec<u32>, rels: &[&str]) -> Result<ArtinianFamily> {
        let mut names: Vec<&str> = e.big.names.iter().map(|s| s.as_str()).collect();
        names.push("y");
        let rels = rels.iter().map(|r| parse_poly(r, &names, q()).unwrap()).collect();
        ArtinianFamily::new(e, &["y"], weights, rels)
    }

    #[test]
    fn split_extension_gives_zero() {
        let e = ext(&["t", "e"], &["t^2", "e^2", "t*e"], &["e"]);
        let f = fam(e, vec![2, 2, 1], &["y^2 - t"]).unwrap();
        let k = kodaira_spencer(&f).unwrap();
        assert!(k.is_zero().unwrap());
        assert!(k.recovers_projection().unwrap());
    }

    #[test]
    fn nonsplit_extension_is_nonzero() {
        let e = ext(&["t"], &["t^3"], &["t^2"]);
        let f = fam(e, vec![2, 1], &["y^2 - t"]).unwrap();
        let k = kodaira_spencer(&f).unwrap();
        assert!(!k.is_zero().unwrap());
        assert!(k.ext1_dim().unwrap() >= 1);
        assert!(k.recovers_projection().unwrap());
    }

    #[test]
    fn structure_map_of_the_base() {
        // R' = k[x]/(x²) → k with B' = R': L_{k/k} = 0, yet κ restricts to I → I/I²
        let e = ext(&["x"], &["x^2"], &["x"]);
        let f = ArtinianFamily::new(e, &[], vec![1], vec![]).unwrap();
        let k = kodaira_spencer(&f).unwrap();
        assert!(k.is_zero().unwrap());
        assert!(k.recovers_projection().unwrap());
        assert!(k.ideal_images.iter().all(|v| v.iter().any(|c| !c.is_zero())));
    }

    #[test]
    fn non_flat_family_rejected() {
        let e = ext(&["t"], &["t^2"], &["t"]);
        assert!(matches!(fam(e, vec![1, 1], &["y^2", "t*y"]), Err(Error::NotFlat(_))));
    }
}
