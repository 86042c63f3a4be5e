//! Bounded cochain complexes of finite free modules and their cohomology.

use serde::Serialize;

use super::matrix::Matrix;
use super::scalar::{BaseRing, Coeff, Scalar, Zpn};
use super::zpn::zpn_snf;
use crate::error::{Error, Result};

/// C^lo → C^{lo+1} → ⋯ → C^hi with d^i : C^i → C^{i+1} stored as a
/// rank_{i+1} × rank_i matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeComplex<K: Coeff> {
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<Matrix<K>>,
}

/// Cohomology in one degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomologyModule {
    /// dimension over a field, or composition length over ℤ/pⁿ
    pub dim: usize,
    /// orders pᵉ of the cyclic summands over ℤ/pⁿ (empty over a field)
    pub invariant_factors: Vec<u64>,
    /// representative cocycles over a field
    #[serde(skip)]
    pub basis: Vec<Vec<Scalar>>,
}

impl<K: Coeff> FreeComplex<K> {
    /// Build and check shapes and d∘d = 0.
    pub fn new(lo: i64, ranks: Vec<usize>, diffs: Vec<Matrix<K>>) -> Result<Self> {
        if diffs.len() + 1 != ranks.len().max(1) {
            return Err(Error::Invalid(format!("{} ranks need {} differentials", ranks.len(), ranks.len().saturating_sub(1))));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[k + 1] || d.cols() != ranks[k] {
                return Err(Error::Invalid(format!("differential at degree {} has wrong shape", lo + k as i64)));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].mul(&diffs[k - 1]).is_zero() {
                return Err(Error::NonCommutingDifferentials(lo + k as i64 - 1));
            }
        }
        Ok(FreeComplex { lo, ranks, diffs })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn rank(&self, i: i64) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.ranks[(i - self.lo) as usize]
        }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// d^i : C^i → C^{i+1}; a zero matrix outside the stored range.
    pub fn d(&self, i: i64) -> Matrix<K> {
        if i >= self.lo && i < self.hi() {
            self.diffs[(i - self.lo) as usize].clone()
        } else {
            Matrix::zeros(self.rank(i + 1), self.rank(i))
        }
    }

    pub fn map_coeffs<L: Coeff>(&self, f: impl Fn(&K) -> L + Copy) -> FreeComplex<L> {
        FreeComplex { lo: self.lo, ranks: self.ranks.clone(), diffs: self.diffs.iter().map(|d| d.map(f)).collect() }
    }

    /// Σ (−1)^i rank_i
    pub fn euler_characteristic_of_ranks(&self) -> i64 {
        (self.lo..=self.hi()).map(|i| sign(i) * self.rank(i) as i64).sum()
    }

    /// Mapping cone of the identity, an exact complex.
    pub fn cone_of_identity(&self) -> FreeComplex<K> {
        // cone^i = C^{i+1} ⊕ C^i, d(a, b) = (−d a, a + d b)
        let lo = self.lo - 1;
        let hi = self.hi();
        let ranks: Vec<usize> = (lo..=hi).map(|i| self.rank(i + 1) + self.rank(i)).collect();
        let mut diffs = Vec::new();
        for i in lo..hi {
            let a1 = self.rank(i + 1);
            let b1 = self.rank(i);
            let a2 = self.rank(i + 2);
            let b2 = self.rank(i + 1);
            let d1 = self.d(i + 1);
            let d0 = self.d(i);
            let m = Matrix::from_fn(a2 + b2, a1 + b1, |r, c| {
                if r < a2 && c < a1 {
                    -d1[(r, c)].clone()
                } else if r >= a2 && c < a1 {
                    if r - a2 == c {
                        K::one()
                    } else {
                        K::zero()
                    }
                } else if r >= a2 && c >= a1 {
                    d0[(r - a2, c - a1)].clone()
                } else {
                    K::zero()
                }
            });
            diffs.push(m);
        }
        FreeComplex { lo, ranks, diffs }
    }

    /// Cohomology over a field-like coefficient type.
    pub fn field_cohomology(&self, i: i64) -> Result<(usize, Vec<Vec<K>>)> {
        let out = self.d(i);
        let inc = self.d(i - 1);
        let ker = if out.rows() == 0 {
            (0..self.rank(i)).map(|j| (0..self.rank(i)).map(|k| if j == k { K::one() } else { K::zero() }).collect()).collect()
        } else {
            out.kernel()?
        };
        let im_rank = if inc.cols() == 0 { 0 } else { inc.rank()? };
        // extend a basis of the image by kernel vectors
        let mut span: Vec<Vec<K>> = (0..inc.cols()).map(|c| inc.col(c)).collect();
        let mut r = im_rank;
        let mut reps = Vec::new();
        for v in ker.iter() {
            span.push(v.clone());
            let nr = Matrix::from_rows_with_cols(span.clone(), self.rank(i)).unwrap().rank()?;
            if nr > r {
                r = nr;
                reps.push(v.clone());
            } else {
                span.pop();
            }
        }
        Ok((ker.len() - im_rank, reps))
    }
}

fn sign(i: i64) -> i64 {
    if i.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl FreeComplex<Scalar> {
    /// Cohomology in degree i over the declared base ring.
    pub fn homology(&self, ring: BaseRing, i: i64) -> Result<HomologyModule> {
        match ring {
            BaseRing::Rationals | BaseRing::Zpn { n: 1, .. } => {
                let (dim, basis) = self.field_cohomology(i)?;
                Ok(HomologyModule { dim, invariant_factors: Vec::new(), basis })
            }
            BaseRing::Zpn { p, n } => Ok(zpn_homology(p, n, &self.d(i - 1), &self.d(i))),
        }
    }

    /// Σ(−1)^i dim H^i (field coefficients).
    pub fn euler_characteristic(&self, ring: BaseRing) -> Result<i64> {
        let mut s = 0;
        for i in self.lo..=self.hi() {
            s += sign(i) * self.homology(ring, i)?.dim as i64;
        }
        Ok(s)
    }
}

fn to_zpn(p: u64, n: u32, m: &Matrix<Scalar>) -> Vec<Vec<Zpn>> {
    let ring = BaseRing::Zpn { p, n };
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| match ring.coerce(x).expect("entry outside ring") {
                    Scalar::Modular(z) => z,
                    Scalar::Rational(_) => Zpn::new(p, n, 0),
                })
                .collect()
        })
        .collect()
}

/// H = ker(b) / im(a) over ℤ/pⁿ, with a : C^{i−1} → C^i and b : C^i → C^{i+1}.
fn zpn_homology(p: u64, n: u32, a: &Matrix<Scalar>, b: &Matrix<Scalar>) -> HomologyModule {
    let ci = b.cols();
    let bz = to_zpn(p, n, b);
    let snf = zpn_snf(p, n, &bz, ci);
    // in the basis given by the columns of Q, ker b = ⊕ p^{c_j} R e_j
    let c: Vec<u32> = (0..ci).map(|j| if j < snf.diag.len() { n - snf.diag[j] } else { 0 }).collect();
    // new coordinates of the image columns: Q⁻¹ a
    let az = to_zpn(p, n, a);
    let acols = a.cols();
    let mut pres: Vec<Vec<Zpn>> = vec![Vec::new(); ci];
    for k in 0..acols {
        for j in 0..ci {
            let mut s = Zpn::new(p, n, 0);
            for l in 0..ci {
                s = s.add(snf.q_inv[j][l].mul(az[l][k]));
            }
            // entry is divisible by p^{c_j}; divide exactly
            let (u, v) = s.unit_part();
            let e = if s.rep == 0 || v < c[j] { Zpn::new(p, n, 0) } else { u.mul(Zpn::new(p, n, (p as i64).pow(v - c[j]))) };
            pres[j].push(e);
        }
    }
    for j in 0..ci {
        for l in 0..ci {
            let e = if j == l && c[j] > 0 { Zpn::new(p, n, (p as i64).pow(n - c[j])) } else { Zpn::new(p, n, 0) };
            pres[j].push(e);
        }
    }
    let cols = acols + ci;
    let s = zpn_snf(p, n, &pres, cols);
    let mut exps: Vec<u32> = s.diag.iter().copied().filter(|&v| v > 0).collect();
    exps.sort();
    let dim = exps.iter().map(|&v| v as usize).sum();
    let inv = exps.into_iter().map(|v| p.pow(v)).collect();
    HomologyModule { dim, invariant_factors: inv, basis: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: Vec<Vec<i64>>, cols: usize) -> Matrix<Scalar> {
        Matrix::from_rows_with_cols(rows.into_iter().map(|r| r.into_iter().map(Scalar::from_int).collect()).collect(), cols).unwrap()
    }

    #[test]
    fn zero_and_identity_complexes() {
        let c = FreeComplex::new(0, vec![2, 3], vec![Matrix::zeros(3, 2)]).unwrap();
        assert_eq!(c.homology(BaseRing::Rationals, 0).unwrap().dim, 2);
        assert_eq!(c.homology(BaseRing::Rationals, 1).unwrap().dim, 3);
        let id = FreeComplex::new(0, vec![2, 2], vec![Matrix::identity(2)]).unwrap();
        assert_eq!(id.homology(BaseRing::Rationals, 0).unwrap().dim, 0);
        assert_eq!(id.homology(BaseRing::Rationals, 1).unwrap().dim, 0);
    }

    #[test]
    fn non_complex_is_rejected() {
        let d = qm(vec![vec![1]], 1);
        let r = FreeComplex::new(0, vec![1, 1, 1], vec![d.clone(), d]);
        assert_eq!(r.unwrap_err(), Error::NonCommutingDifferentials(0));
    }

    #[test]
    fn cone_of_identity_is_exact() {
        let d = qm(vec![vec![1, 2], vec![0, 0]], 2);
        let c = FreeComplex::new(0, vec![2, 2], vec![d]).unwrap();
        let cone = c.cone_of_identity();
        for i in cone.lo()..=cone.hi() {
            assert_eq!(cone.homology(BaseRing::Rationals, i).unwrap().dim, 0);
        }
    }

    #[test]
    fn z9_multiplication_by_three() {
        let ring = BaseRing::Zpn { p: 3, n: 2 };
        let three = Matrix::from_rows(vec![vec![Scalar::modular(3, 2, 3)]]);
        let c = FreeComplex::new(0, vec![1, 1], vec![three]).unwrap();
        // ker(3) = (3) ≅ Z/3, coker(3) ≅ Z/3
        assert_eq!(c.homology(ring, 0).unwrap().invariant_factors, vec![3]);
        assert_eq!(c.homology(ring, 1).unwrap().invariant_factors, vec![3]);
        let one = Matrix::from_rows(vec![vec![Scalar::modular(3, 2, 1)]]);
        let c = FreeComplex::new(0, vec![1, 1], vec![one]).unwrap();
        assert!(c.homology(ring, 1).unwrap().invariant_factors.is_empty());
        let z = FreeComplex::new(0, vec![2], vec![]).unwrap();
        assert_eq!(z.homology(ring, 0).unwrap().invariant_factors, vec![9, 9]);
    }
}
