//! The de Rham complex Ω•_{B/k} of a positively graded B = k[x]/(f), one
//! weight at a time, with Ω^q = Λ^q(coker of the Jacobian).
//!
//! In weight w the q-th term is V^q_w / R^q_w, where V is spanned by
//! monomials m·dx_S and R by m·f·dx_S and m·df∧dx_T.

use serde::Serialize;

use super::forms::{subsets_of_size, wedge_sign, Form};
use super::kaehler::QuotientRing;
use crate::error::{Error, Result};
use crate::exact::groebner::weighted_monomials;
use crate::exact::matrix::Matrix;
use crate::exact::poly::{Mono, MultiPoly};
use crate::exact::scalar::{Coeff, Scalar};

/// Exterior powers above this are refused.
pub const RANK_CAP: usize = 8;

/// Which filtration a complex carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Filtration {
    Hodge,
    PdAdic,
}

/// Ω•_{B/k} with weights on the variables.
#[derive(Clone, Debug)]
pub struct DeRhamComplex {
    pub ring: QuotientRing,
    pub weights: Vec<u32>,
    pub top: usize,
}

/// One weight of the complex: term dimensions and cohomology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub weight: u32,
    pub dims: Vec<usize>,
    pub cohomology: Vec<usize>,
}

impl DeRhamComplex {
    /// Requires positive weights making every relation homogeneous.
    pub fn new(ring: QuotientRing, weights: Vec<u32>, top: usize) -> Result<Self> {
        if weights.len() != ring.nvars() || weights.contains(&0) {
            return Err(Error::Invalid("one positive weight per variable".into()));
        }
        if top > RANK_CAP {
            return Err(Error::RankBoundExceeded(top));
        }
        for f in &ring.relations {
            if !f.is_homogeneous(&weights) {
                return Err(Error::DegreeMismatch("relations must be weighted homogeneous".into()));
            }
        }
        let top = top.min(ring.nvars());
        Ok(DeRhamComplex { ring, weights, top })
    }

    /// Standard grading, all exterior powers.
    pub fn standard(ring: QuotientRing) -> Result<Self> {
        let n = ring.nvars();
        DeRhamComplex::new(ring, vec![1; n], n.min(RANK_CAP))
    }

    fn form_weight(&self, s: u32) -> u32 {
        (0..self.ring.nvars()).filter(|j| s >> j & 1 == 1).map(|j| self.weights[j]).sum()
    }

    /// Basis m·dx_S of V^q_w.
    pub fn free_basis(&self, q: usize, w: u32) -> Vec<(Mono, u32)> {
        let mut out = Vec::new();
        for s in subsets_of_size(self.ring.nvars(), q) {
            let fw = self.form_weight(s);
            if fw > w {
                continue;
            }
            weighted_monomials(&self.weights, w - fw, &mut |m| out.push((m.to_vec(), s)));
        }
        out
    }

    fn coords(basis: &[(Mono, u32)], f: &Form) -> Result<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); basis.len()];
        for (s, p) in &f.terms {
            for (e, c) in p.terms() {
                let k = basis
                    .iter()
                    .position(|(m, t)| t == s && m == e)
                    .ok_or_else(|| Error::DegreeMismatch("form is not of the expected weight".into()))?;
                v[k] = c.clone();
            }
        }
        Ok(v)
    }

    /// Spanning vectors of R^q_w in the coordinates of `free_basis(q, w)`.
    pub fn relation_vectors(&self, q: usize, w: u32) -> Result<Vec<Vec<Scalar>>> {
        let n = self.ring.nvars();
        let basis = self.free_basis(q, w);
        let mut out = Vec::new();
        for f in &self.ring.relations {
            let fw = f.weighted_degree(&self.weights).unwrap_or(0);
            // f·dx_S
            for s in subsets_of_size(n, q) {
                let tot = fw + self.form_weight(s);
                if tot > w {
                    continue;
                }
                let mut ms = Vec::new();
                weighted_monomials(&self.weights, w - tot, &mut |m| ms.push(m.to_vec()));
                for m in ms {
                    let g = &MultiPoly::monomial(m, self.ring.field.int(1)) * f;
                    out.push(Self::coords(&basis, &Form::term(g, s))?);
                }
            }
            // df ∧ dx_T
            if q >= 1 {
                let df = Form {
                    nvars: n,
                    terms: (0..n)
                        .filter_map(|j| {
                            let p = f.derivative(j);
                            (!p.is_zero()).then(|| (1u32 << j, p))
                        })
                        .collect(),
                };
                for t in subsets_of_size(n, q - 1) {
                    let tot = fw + self.form_weight(t);
                    if tot > w {
                        continue;
                    }
                    let mut ms = Vec::new();
                    weighted_monomials(&self.weights, w - tot, &mut |m| ms.push(m.to_vec()));
                    for m in ms {
                        let g = Form::term(MultiPoly::monomial(m, self.ring.field.int(1)), t);
                        let v = df.wedge(&g);
                        if !v.is_zero() {
                            out.push(Self::coords(&basis, &v)?);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// d on V^q_w → V^{q+1}_w, one column per basis element.
    pub fn differential(&self, q: usize, w: u32) -> Result<Matrix<Scalar>> {
        let src = self.free_basis(q, w);
        let dst = self.free_basis(q + 1, w);
        let mut cols = Vec::new();
        for (m, s) in &src {
            let f = Form::term(MultiPoly::monomial(m.clone(), self.ring.field.int(1)), *s);
            cols.push(Self::coords(&dst, &f.d())?);
        }
        Ok(Matrix::from_rows_with_cols(cols, dst.len()).expect("rectangular").transpose())
    }

    fn rank_of(rows: &[Vec<Scalar>], width: usize) -> Result<usize> {
        if rows.is_empty() || width == 0 {
            return Ok(0);
        }
        Matrix::from_rows_with_cols(rows.to_vec(), width).expect("rectangular").rank()
    }

    /// Dimensions of Ω^q_w and of H^q in weight w, for 0 ≤ q ≤ top.
    ///
    /// h^q = dim d⁻¹(R^{q+1}) − dim(d V^{q−1} + R^q).
    pub fn weight_report(&self, w: u32) -> Result<WeightReport> {
        let top = self.top;
        let mut dims = Vec::new();
        let mut coh = Vec::new();
        for q in 0..=top {
            let vq = self.free_basis(q, w).len();
            let rq = self.relation_vectors(q, w)?;
            let rank_rq = Self::rank_of(&rq, vq)?;
            dims.push(vq - rank_rq);
            // preimage of R^{q+1}
            let pre = if q < top {
                let vq1 = self.free_basis(q + 1, w).len();
                let rq1 = self.relation_vectors(q + 1, w)?;
                let d = self.differential(q, w)?;
                let mut rows: Vec<Vec<Scalar>> = d.transpose().to_rows();
                let r_only = Self::rank_of(&rq1, vq1)?;
                rows.extend(rq1);
                vq - (Self::rank_of(&rows, vq1)? - r_only)
            } else {
                vq
            };
            // image of d plus R^q
            let mut rows = rq.clone();
            if q > 0 {
                rows.extend(self.differential(q - 1, w)?.transpose().to_rows());
            }
            let im = Self::rank_of(&rows, vq)?;
            coh.push(pre - im);
        }
        Ok(WeightReport { weight: w, dims, cohomology: coh })
    }

    /// Hodge slice F^i: the terms Ω^q with q ≥ i.
    pub fn hodge_slice(&self, i: usize, w: u32) -> Result<Vec<usize>> {
        let r = self.weight_report(w)?;
        Ok(r.dims.iter().enumerate().map(|(q, &d)| if q >= i { d } else { 0 }).collect())
    }
}

/// The de Rham complex of the torus k[x₁^±..xₙ^±] in one exponent a ∈ ℤⁿ:
/// with basis x^a·dlog x_S, d is wedge with Σ a_i dlog x_i. Returns H^q dims.
pub fn torus_cohomology(field: crate::exact::scalar::BaseRing, a: &[i64]) -> Result<Vec<usize>> {
    let n = a.len();
    let mut out = Vec::new();
    let mat = |q: usize| -> Matrix<Scalar> {
        let src = subsets_of_size(n, q);
        let dst = subsets_of_size(n, q + 1);
        Matrix::from_fn(dst.len(), src.len(), |r, c| {
            let (s, t) = (src[c], dst[r]);
            let diff = t & !s;
            if t & s == s && diff.count_ones() == 1 {
                let j = diff.trailing_zeros() as usize;
                let sign = wedge_sign(diff, s).unwrap();
                field.int(sign * a[j])
            } else {
                Scalar::zero()
            }
        })
    };
    for q in 0..=n {
        let dimq = subsets_of_size(n, q).len();
        let rk_out = if q < n { mat(q).rank()? } else { 0 };
        let rk_in = if q > 0 { mat(q - 1).rank()? } else { 0 };
        out.push(dimq - rk_out - rk_in);
    }
    Ok(out)
}

/// Total torus cohomology over exponents with |a_i| ≤ window.
pub fn torus_cohomology_window(field: crate::exact::scalar::BaseRing, n: usize, window: i64) -> Result<Vec<usize>> {
    let mut total = vec![0; n + 1];
    let mut a = vec![-window; n];
    loop {
        for (t, h) in total.iter_mut().zip(torus_cohomology(field, &a)?) {
            *t += h;
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(total);
            }
            if a[i] < window {
                a[i] += 1;
                break;
            }
            a[i] = -window;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::BaseRing;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn affine_line_and_plane() {
        let a1 = DeRhamComplex::standard(QuotientRing::polynomial(BaseRing::Rationals, &["x"]).unwrap()).unwrap();
        assert_eq!(a1.weight_report(0).unwrap().cohomology, vec![1, 0]);
        for w in 1..5 {
            assert_eq!(a1.weight_report(w).unwrap().cohomology, vec![0, 0]);
        }
        let a2 = DeRhamComplex::standard(QuotientRing::polynomial(BaseRing::Rationals, &["x", "y"]).unwrap()).unwrap();
        for w in 0..5u32 {
            let r = a2.weight_report(w).unwrap();
            // Ω^p free of rank binom(2,p): weight-w piece counts monomials of degree w−p
            for p in 0..=2 {
                let expect = if (w as usize) >= p { binom(2, p) * (w as usize - p + 1) } else { 0 };
                assert_eq!(r.dims[p], expect);
            }
            assert_eq!(r.cohomology, if w == 0 { vec![1, 0, 0] } else { vec![0, 0, 0] });
        }
    }

    #[test]
    fn dd_vanishes() {
        let c = DeRhamComplex::standard(QuotientRing::polynomial(BaseRing::Rationals, &["x", "y", "z"]).unwrap()).unwrap();
        for w in 0..4 {
            for q in 0..2 {
                let d0 = c.differential(q, w).unwrap();
                let d1 = c.differential(q + 1, w).unwrap();
                assert!(d1.mul(&d0).is_zero());
            }
        }
    }

    #[test]
    fn punctured_line() {
        assert_eq!(torus_cohomology(BaseRing::Rationals, &[0]).unwrap(), vec![1, 1]);
        assert_eq!(torus_cohomology(BaseRing::Rationals, &[3]).unwrap(), vec![0, 0]);
        assert_eq!(torus_cohomology_window(BaseRing::Rationals, 1, 6).unwrap(), vec![1, 1]);
        // in characteristic p the exponents divisible by p survive
        assert_eq!(torus_cohomology(BaseRing::fp(3), &[3]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn cusp_top_forms() {
        // y² = x³ with weights (2,3): dx∧dy survives in weight 5 and is d(x dy)
        let b = QuotientRing::parse(BaseRing::Rationals, &["x", "y"], &["y^2 - x^3"]).unwrap();
        let c = DeRhamComplex::new(b, vec![2, 3], 2).unwrap();
        assert_eq!(c.weight_report(0).unwrap().cohomology, vec![1, 0, 0]);
        let r = c.weight_report(5).unwrap();
        assert_eq!(r.dims[2], 1);
        assert_eq!(r.cohomology[2], 0);
    }
}
