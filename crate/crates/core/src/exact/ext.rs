//! Ext groups against graded free resolutions, explicit cocycles, chain-map
//! lifting and Yoneda composition.
//!
//! The target module N is finite-dimensional, so Hom(F_p, N) = N^{rank F_p}
//! and a degree-p class is one vector of N per generator of F_p. Two classes
//! agree when their difference is a coboundary.

use std::sync::Arc;

use super::graded::{mul_vec, FinModule, GradedRing, Resolution};
use super::matrix::Matrix;
use super::poly::MultiPoly;
use super::scalar::{Coeff, Scalar};
use crate::error::{Error, Result};

/// A class in Ext^p(M, N) carried as a cocycle on F_p.
#[derive(Clone, Debug)]
pub struct ExtClass {
    pub source: Arc<Resolution>,
    pub target: Arc<FinModule>,
    pub degree: usize,
    /// one vector of N per generator of F_p
    pub cocycle: Vec<Vec<Scalar>>,
}

/// δ^p : Hom(F_p, N) → Hom(F_{p+1}, N), φ ↦ φ ∘ d.
pub fn hom_differential(res: &Resolution, n: &FinModule, p: usize) -> Matrix<Scalar> {
    let dim = n.dim;
    let src = res.rank(p);
    let tgt = if p < res.diffs.len() { res.rank(p + 1) } else { 0 };
    let mut m = Matrix::zeros(tgt * dim, src * dim);
    for h in 0..tgt {
        for (g, poly) in res.diffs[p][h].iter().enumerate() {
            if poly.is_zero() {
                continue;
            }
            let a = n.act(poly);
            for r in 0..dim {
                for c in 0..dim {
                    m[(h * dim + r, g * dim + c)] = a[(r, c)].clone();
                }
            }
        }
    }
    m
}

fn flatten(v: &[Vec<Scalar>]) -> Vec<Scalar> {
    v.iter().flatten().cloned().collect()
}

fn unflatten(v: &[Scalar], dim: usize) -> Vec<Vec<Scalar>> {
    if dim == 0 {
        return Vec::new();
    }
    v.chunks(dim).map(|c| c.to_vec()).collect()
}

fn kernel_of(m: &Matrix<Scalar>, cols: usize) -> Result<Vec<Vec<Scalar>>> {
    if m.rows() == 0 {
        Ok((0..cols).map(|j| super::graded::unit(cols, j)).collect())
    } else {
        m.kernel()
    }
}

fn rank_of(m: &Matrix<Scalar>) -> Result<usize> {
    if m.rows() == 0 || m.cols() == 0 {
        Ok(0)
    } else {
        m.rank()
    }
}

/// dim Ext^p(M, N); the resolution must reach F_{p+1}.
pub fn ext_dim(res: &Resolution, n: &FinModule, p: usize) -> Result<usize> {
    need_length(res, p + 1)?;
    let out = hom_differential(res, n, p);
    let ker = kernel_of(&out, res.rank(p) * n.dim)?.len();
    let im = if p == 0 { 0 } else { rank_of(&hom_differential(res, n, p - 1))? };
    Ok(ker - im)
}

fn need_length(res: &Resolution, len: usize) -> Result<()> {
    if res.len() < len {
        return Err(Error::ResolutionBoundExceeded(format!("resolution has length {}, need {len}", res.len())));
    }
    Ok(())
}

/// Cocycle representatives of a basis of Ext^p(M, N).
pub fn ext_basis(res: &Arc<Resolution>, n: &Arc<FinModule>, p: usize) -> Result<Vec<ExtClass>> {
    need_length(res, p + 1)?;
    let dim = res.rank(p) * n.dim;
    let out = hom_differential(res, n, p);
    let ker = kernel_of(&out, dim)?;
    let inc = if p == 0 { Matrix::zeros(dim, 0) } else { hom_differential(res, n, p - 1) };
    let mut span: Vec<Vec<Scalar>> = (0..inc.cols()).map(|c| inc.col(c)).collect();
    let mut r = if span.is_empty() { 0 } else { Matrix::from_rows_with_cols(span.clone(), dim).unwrap().rank()? };
    let mut out = Vec::new();
    for v in ker {
        span.push(v.clone());
        let nr = Matrix::from_rows_with_cols(span.clone(), dim).unwrap().rank()?;
        if nr > r {
            r = nr;
            out.push(ExtClass { source: res.clone(), target: n.clone(), degree: p, cocycle: unflatten(&v, n.dim) });
        } else {
            span.pop();
        }
    }
    Ok(out)
}

fn same_ring(a: &GradedRing, b: &GradedRing) -> bool {
    a.names == b.names && a.weights == b.weights && a.ideal().generators() == b.ideal().generators()
}

impl ExtClass {
    /// Build a class, checking the cocycle condition.
    pub fn new(source: Arc<Resolution>, target: Arc<FinModule>, degree: usize, cocycle: Vec<Vec<Scalar>>) -> Result<Self> {
        need_length(&source, degree + 1)?;
        if cocycle.len() != source.rank(degree) || cocycle.iter().any(|v| v.len() != target.dim) {
            return Err(Error::Invalid("cocycle has the wrong shape".into()));
        }
        let c = ExtClass { source, target, degree, cocycle };
        let d = hom_differential(&c.source, &c.target, degree);
        if d.rows() > 0 && !d.apply(&flatten(&c.cocycle)).iter().all(|x| x.is_zero()) {
            return Err(Error::NotChainMap("cocycle condition fails".into()));
        }
        Ok(c)
    }

    pub fn zero(source: Arc<Resolution>, target: Arc<FinModule>, degree: usize) -> Result<Self> {
        let cocycle = vec![vec![Scalar::zero(); target.dim]; source.rank(degree)];
        ExtClass::new(source, target, degree, cocycle)
    }

    pub fn ring(&self) -> &GradedRing {
        &self.source.ring
    }

    /// True when the cocycle is a coboundary.
    pub fn is_zero(&self) -> Result<bool> {
        let v = flatten(&self.cocycle);
        if v.iter().all(|x| x.is_zero()) {
            return Ok(true);
        }
        if self.degree == 0 {
            return Ok(false);
        }
        let inc = hom_differential(&self.source, &self.target, self.degree - 1);
        if inc.cols() == 0 {
            return Ok(false);
        }
        Ok(inc.solve(&v)?.is_some())
    }

    fn check_same_group(&self, o: &ExtClass) -> Result<()> {
        if self.degree != o.degree || self.target != o.target || self.source.free[..=self.degree] != o.source.free[..=o.degree] {
            return Err(Error::DegreeMismatch(format!("classes live in different groups (degrees {} and {})", self.degree, o.degree)));
        }
        Ok(())
    }

    pub fn add(&self, o: &ExtClass) -> Result<ExtClass> {
        self.check_same_group(o)?;
        let cocycle =
            self.cocycle.iter().zip(&o.cocycle).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()).collect();
        Ok(ExtClass { cocycle, ..self.clone() })
    }

    pub fn scale(&self, c: &Scalar) -> ExtClass {
        let cocycle = self.cocycle.iter().map(|v| v.iter().map(|x| x.clone() * c.clone()).collect()).collect();
        ExtClass { cocycle, ..self.clone() }
    }

    pub fn sub(&self, o: &ExtClass) -> Result<ExtClass> {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    /// Equality of classes (difference is a coboundary).
    pub fn equals(&self, o: &ExtClass) -> Result<bool> {
        self.sub(o)?.is_zero()
    }

    /// Scalar λ with self = λ·o, if any.
    pub fn ratio(&self, o: &ExtClass) -> Result<Option<Scalar>> {
        self.check_same_group(o)?;
        let dim = self.target.dim * self.source.rank(self.degree);
        let mut cols = vec![flatten(&o.cocycle)];
        if self.degree > 0 {
            let inc = hom_differential(&self.source, &self.target, self.degree - 1);
            cols.extend((0..inc.cols()).map(|c| inc.col(c)));
        }
        let m = Matrix::from_rows_with_cols(cols, dim).unwrap().transpose();
        Ok(m.solve(&flatten(&self.cocycle))?.map(|x| x[0].clone()))
    }

    /// Post-compose with a module map N → N' (matrix columns are images of basis vectors).
    pub fn push_forward(&self, phi: &Matrix<Scalar>, new_target: Arc<FinModule>) -> Result<ExtClass> {
        if phi.cols() != self.target.dim || phi.rows() != new_target.dim {
            return Err(Error::Invalid("module map has the wrong shape".into()));
        }
        for (a, b) in self.target.actions.iter().zip(&new_target.actions) {
            if phi.mul(a) != b.mul(phi) {
                return Err(Error::Invalid("map is not a module homomorphism".into()));
            }
        }
        let cocycle = self.cocycle.iter().map(|v| phi.apply(v)).collect();
        ExtClass::new(self.source.clone(), new_target, self.degree, cocycle)
    }

    /// Yoneda product `after ∘ self` in Ext^{p+q}(M, L).
    pub fn compose(&self, after: &ExtClass) -> Result<ExtClass> {
        let ring = self.ring();
        if !same_ring(ring, after.ring()) {
            return Err(Error::DegreeMismatch("classes over different rings".into()));
        }
        let pres = self.target.presentation(ring)?;
        if after.source.module != pres {
            return Err(Error::DegreeMismatch("target of the first class is not the source of the second".into()));
        }
        let p = self.degree;
        let q = after.degree;
        let source = extend(&self.source, p + q + 1)?;
        let alpha0: Vec<Vec<MultiPoly>> =
            self.cocycle.iter().map(|v| v.iter().map(|c| MultiPoly::constant(ring.nvars(), c.clone())).collect()).collect();
        let alphas = lift_chain_map(&source, p, &after.source, alpha0, q)?;
        let l = &after.target;
        let cocycle = alphas[q]
            .iter()
            .map(|img| {
                let mut acc = vec![Scalar::zero(); l.dim];
                for (k, poly) in img.iter().enumerate() {
                    if poly.is_zero() {
                        continue;
                    }
                    let v = l.act(poly).apply(&after.cocycle[k]);
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a = a.clone() + b;
                    }
                }
                acc
            })
            .collect();
        ExtClass::new(source, after.target.clone(), p + q, cocycle)
    }
}

/// The same resolution continued to at least `len` (the prefix is unchanged).
pub fn extend(res: &Arc<Resolution>, len: usize) -> Result<Arc<Resolution>> {
    if res.len() >= len {
        return Ok(res.clone());
    }
    let longer = Resolution::compute(res.ring.clone(), &res.module, len)?;
    debug_assert!(longer.diffs[..res.diffs.len()] == res.diffs[..]);
    Ok(Arc::new(longer))
}

/// Lift a map F_p → G_0 (given on generators) to α_j : F_{p+j} → G_j for j ≤ q.
///
/// Each step solves d_G(α_j h) = α_{j−1}(d_F h) one homogeneous component at a time.
pub fn lift_chain_map(
    src: &Resolution,
    p: usize,
    tgt: &Resolution,
    alpha0: Vec<Vec<MultiPoly>>,
    q: usize,
) -> Result<Vec<Vec<Vec<MultiPoly>>>> {
    need_length(src, p + q)?;
    need_length(tgt, q)?;
    let ring = &*src.ring;
    let n = ring.nvars();
    let mut alphas = vec![alpha0];
    for j in 1..=q {
        let gj = &tgt.free[j];
        let gj1 = &tgt.free[j - 1];
        let mut level = Vec::new();
        for h in &src.diffs[p + j - 1] {
            let mut rhs = vec![MultiPoly::zero(n); gj1.rank()];
            for (g, coef) in h.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let v = mul_vec(ring, coef, &alphas[j - 1][g])?;
                for (a, b) in rhs.iter_mut().zip(v) {
                    *a = &*a + &b;
                }
            }
            let mut degrees: Vec<i64> = Vec::new();
            for (k, poly) in rhs.iter().enumerate() {
                for (e, _) in poly.terms() {
                    degrees.push(ring.degree_of(e) as i64 + gj1.degrees[k]);
                }
            }
            degrees.sort_unstable();
            degrees.dedup();
            let mut sol = vec![MultiPoly::zero(n); gj.rank()];
            for d in degrees {
                let b = gj1.coords(ring, &rhs, d)?;
                let m = super::graded::map_matrix(ring, gj, gj1, &tgt.diffs[j - 1], d)?;
                let x = if m.cols() == 0 {
                    if b.iter().all(|c| c.is_zero()) {
                        Some(Vec::new())
                    } else {
                        None
                    }
                } else {
                    m.solve(&b)?
                };
                let x = x.ok_or_else(|| Error::NotChainMap("lift has no solution".into()))?;
                let part = gj.from_coords(ring, &x, d)?;
                for (a, b) in sol.iter_mut().zip(part) {
                    *a = &*a + &b;
                }
            }
            level.push(sol);
        }
        alphas.push(level);
    }
    Ok(alphas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::BaseRing;

    fn setup() -> (Arc<GradedRing>, Arc<Resolution>, Arc<FinModule>) {
        let r = Arc::new(GradedRing::polynomial(BaseRing::Rationals, &["x", "y"]).unwrap());
        let k = Arc::new(FinModule::residue_field(2));
        let res = Arc::new(Resolution::compute(r.clone(), &k.presentation(&r).unwrap(), 4).unwrap());
        (r, res, k)
    }

    #[test]
    fn ext_of_residue_field_over_plane() {
        let (_, res, k) = setup();
        let dims: Vec<usize> = (0..=3).map(|p| ext_dim(&res, &k, p).unwrap()).collect();
        assert_eq!(dims, vec![1, 2, 1, 0]);
    }

    #[test]
    fn ext_over_dual_numbers() {
        let x = MultiPoly::var(1, 0);
        let r = Arc::new(GradedRing::new(BaseRing::Rationals, vec!["x".into()], vec![1], vec![&x * &x]).unwrap());
        let k = FinModule::residue_field(1);
        let res = Resolution::compute(r.clone(), &k.presentation(&r).unwrap(), 4).unwrap();
        for p in 0..=3 {
            assert_eq!(ext_dim(&res, &k, p).unwrap(), 1);
        }
    }

    #[test]
    fn yoneda_products_of_degree_one_classes() {
        let (_, res, k) = setup();
        let e = ext_basis(&res, &k, 1).unwrap();
        let top = ext_basis(&res, &k, 2).unwrap();
        assert_eq!((e.len(), top.len()), (2, 1));
        let e01 = e[0].compose(&e[1]).unwrap();
        let e10 = e[1].compose(&e[0]).unwrap();
        assert!(!e01.is_zero().unwrap());
        // exterior algebra: graded commutativity and vanishing squares
        assert!(e01.add(&e10).unwrap().is_zero().unwrap());
        assert!(e[0].compose(&e[0]).unwrap().is_zero().unwrap());
        assert!(e01.ratio(&top[0]).unwrap().is_some());
    }

    #[test]
    fn identity_class_is_neutral() {
        let (_, res, k) = setup();
        let id = ext_basis(&res, &k, 0).unwrap().remove(0);
        let e = ext_basis(&res, &k, 1).unwrap();
        for c in &e {
            assert!(c.compose(&id).unwrap().equals(c).unwrap());
            assert!(id.compose(c).unwrap().equals(c).unwrap());
        }
    }

    #[test]
    fn coboundaries_are_zero() {
        let (_, res, k) = setup();
        let d = hom_differential(&res, &k, 0);
        let v = d.col(0);
        let c = ExtClass::new(res.clone(), k.clone(), 1, unflatten(&v, 1)).unwrap();
        assert!(c.is_zero().unwrap());
    }
}
