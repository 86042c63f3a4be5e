//! Super-traces of chain self-maps of bounded free complexes, together with
//! generators of random complexes, termwise split short exact sequences and
//! chain homotopies used to exercise additivity and homotopy invariance.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::complex::FreeComplex;
use crate::exact::matrix::Matrix;
use crate::exact::scalar::{BaseRing, Coeff, Scalar};

/// A degreewise self-map of a bounded complex.
#[derive(Clone, Debug)]
pub struct ChainEndo {
    pub complex: FreeComplex<Scalar>,
    /// one square matrix per degree lo..=hi
    pub maps: Vec<Matrix<Scalar>>,
}

impl ChainEndo {
    /// Check shapes and f∘d = d∘f.
    pub fn new(complex: FreeComplex<Scalar>, maps: Vec<Matrix<Scalar>>) -> Result<Self> {
        if maps.len() != complex.ranks().len() {
            return Err(Error::ShapeMismatch(format!("{} maps for {} degrees", maps.len(), complex.ranks().len())));
        }
        for (m, &r) in maps.iter().zip(complex.ranks()) {
            if m.rows() != r || m.cols() != r {
                return Err(Error::ShapeMismatch("maps must be square of the rank in each degree".into()));
            }
        }
        let e = ChainEndo { complex, maps };
        for i in e.complex.lo()..e.complex.hi() {
            let d = e.complex.d(i);
            if d.mul(e.at(i)) != e.at(i + 1).mul(&d) {
                return Err(Error::NotChainMap(format!("f does not commute with d at degree {i}")));
            }
        }
        Ok(e)
    }

    pub fn identity(complex: FreeComplex<Scalar>) -> Self {
        let maps = complex.ranks().iter().map(|&r| Matrix::identity(r)).collect();
        ChainEndo { complex, maps }
    }

    fn at(&self, i: i64) -> &Matrix<Scalar> {
        &self.maps[(i - self.complex.lo()) as usize]
    }

    /// The map on C[1]: degrees drop by one and d changes sign.
    pub fn shift(&self) -> Result<ChainEndo> {
        let lo = self.complex.lo();
        let diffs = (lo..self.complex.hi()).map(|i| self.complex.d(i).scale(&Scalar::from_int(-1))).collect();
        let c = FreeComplex::new(lo - 1, self.complex.ranks().to_vec(), diffs)?;
        Ok(ChainEndo { complex: c, maps: self.maps.clone() })
    }

    pub fn add(&self, o: &ChainEndo) -> Result<ChainEndo> {
        if self.complex != o.complex {
            return Err(Error::ShapeMismatch("maps on different complexes".into()));
        }
        Ok(ChainEndo { complex: self.complex.clone(), maps: self.maps.iter().zip(&o.maps).map(|(a, b)| a.add(b)).collect() })
    }

    pub fn compose(&self, after: &ChainEndo) -> Result<ChainEndo> {
        if self.complex != after.complex {
            return Err(Error::ShapeMismatch("maps on different complexes".into()));
        }
        Ok(ChainEndo { complex: self.complex.clone(), maps: self.maps.iter().zip(&after.maps).map(|(a, b)| b.mul(a)).collect() })
    }

    /// f + d∘h + h∘d for a degree −1 map h (h[k] : C^{lo+k} → C^{lo+k−1}).
    pub fn add_homotopy(&self, h: &[Matrix<Scalar>]) -> Result<ChainEndo> {
        let lo = self.complex.lo();
        let mut maps = self.maps.clone();
        for (k, m) in maps.iter_mut().enumerate() {
            let i = lo + k as i64;
            let r = self.complex.rank(i);
            let mut extra = Matrix::zeros(r, r);
            if k > 0 {
                extra = extra.add(&self.complex.d(i - 1).mul(&h[k]));
            }
            if k + 1 < h.len() {
                extra = extra.add(&h[k + 1].mul(&self.complex.d(i)));
            }
            *m = m.add(&extra);
        }
        ChainEndo::new(self.complex.clone(), maps)
    }
}

/// Σᵢ (−1)ⁱ tr(fᵢ).
pub fn super_trace(f: &ChainEndo) -> Scalar {
    let lo = f.complex.lo();
    let mut acc = Scalar::zero();
    for (k, m) in f.maps.iter().enumerate() {
        let t = m.trace();
        acc = if (lo + k as i64).rem_euclid(2) == 0 { acc + t } else { acc - t };
    }
    acc
}

fn random_scalar(ring: BaseRing, rng: &mut impl Rng) -> Scalar {
    ring.int(rng.gen_range(-3..=3))
}

fn random_matrix(ring: BaseRing, r: usize, c: usize, rng: &mut impl Rng) -> Matrix<Scalar> {
    let rows: Vec<Vec<Scalar>> = (0..r).map(|_| (0..c).map(|_| random_scalar(ring, rng)).collect()).collect();
    Matrix::from_rows_with_cols(rows, c).unwrap()
}

/// A random unimodular matrix: a product of elementary operations.
pub fn random_unimodular(ring: BaseRing, n: usize, rng: &mut impl Rng) -> Matrix<Scalar> {
    let mut m = Matrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = random_scalar(ring, rng);
        let mut e = Matrix::identity(n);
        e[(i, j)] = c;
        m = e.mul(&m);
    }
    m
}

/// A random complex with ranks ≤ `max_rank` in degrees lo..lo+len−1, built from
/// split pieces and conjugated by unimodular changes of basis.
pub fn random_complex(ring: BaseRing, lo: i64, len: usize, max_rank: usize, rng: &mut impl Rng) -> FreeComplex<Scalar> {
    // degree k = boundary part b_k ⊕ homology h_k ⊕ part ℓ_k mapped onto b_{k+1}
    let mut b = vec![0usize; len + 1];
    let mut h = vec![0usize; len];
    let mut l = vec![0usize; len];
    for k in 0..len {
        let room = max_rank.saturating_sub(b[k]);
        h[k] = rng.gen_range(0..=room.min(2));
        l[k] = if k + 1 < len { rng.gen_range(0..=room - h[k]) } else { 0 };
        b[k + 1] = l[k];
    }
    let ranks: Vec<usize> = (0..len).map(|k| b[k] + h[k] + l[k]).collect();
    let bases: Vec<Matrix<Scalar>> = ranks.iter().map(|&r| random_unimodular(ring, r, rng)).collect();
    let diffs =
        (0..len.saturating_sub(1))
            .map(|k| {
                // identity from the ℓ_k block onto the b_{k+1} block
                let raw = Matrix::from_fn(ranks[k + 1], ranks[k], |r, c| {
                    if r < b[k + 1] && c == b[k] + h[k] + r {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                });
                let inv = bases[k].inverse().unwrap().expect("unimodular");
                bases[k + 1].mul(&raw).mul(&inv)
            })
            .collect();
    FreeComplex::new(lo, ranks, diffs).expect("split construction gives a complex")
}

/// Random chain endomorphism: a random element of the space of chain maps.
pub fn random_chain_endo(ring: BaseRing, c: &FreeComplex<Scalar>, rng: &mut impl Rng) -> Result<ChainEndo> {
    let sol = chain_map_space(c, None)?;
    let maps = combine(ring, c, &sol, rng);
    ChainEndo::new(c.clone(), maps)
}

/// Basis of the chain self-maps of `c`; with `block = Some(s)` only maps
/// preserving the subcomplex spanned by the first s[k] basis vectors in each degree.
fn chain_map_space(c: &FreeComplex<Scalar>, block: Option<&[usize]>) -> Result<Vec<Vec<Scalar>>> {
    let ranks = c.ranks().to_vec();
    let lo = c.lo();
    let offsets: Vec<usize> = ranks
        .iter()
        .scan(0, |acc, &r| {
            let o = *acc;
            *acc += r * r;
            Some(o)
        })
        .collect();
    let nunk: usize = ranks.iter().map(|r| r * r).sum();
    let var = |k: usize, r: usize, col: usize| offsets[k] + r * ranks[k] + col;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for k in 0..ranks.len().saturating_sub(1) {
        let d = c.d(lo + k as i64);
        // (d f_k − f_{k+1} d)[r][col] = 0
        for r in 0..ranks[k + 1] {
            for col in 0..ranks[k] {
                let mut row = vec![Scalar::zero(); nunk];
                for t in 0..ranks[k] {
                    // d[r][t]·f_k[t][col]
                    if !d[(r, t)].is_zero() {
                        let v = var(k, t, col);
                        row[v] = row[v].clone() + d[(r, t)].clone();
                    }
                }
                for t in 0..ranks[k + 1] {
                    // f_{k+1}[r][t]·d[t][col]
                    if !d[(t, col)].is_zero() {
                        let v = var(k + 1, r, t);
                        row[v] = row[v].clone() - d[(t, col)].clone();
                    }
                }
                rows.push(row);
            }
        }
    }
    if let Some(s) = block {
        for (k, &r) in ranks.iter().enumerate() {
            for row_i in s[k]..r {
                for col in 0..s[k] {
                    let mut row = vec![Scalar::zero(); nunk];
                    row[var(k, row_i, col)] = Scalar::one();
                    rows.push(row);
                }
            }
        }
    }
    if nunk == 0 {
        return Ok(Vec::new());
    }
    if rows.is_empty() {
        return Ok((0..nunk).map(|j| crate::exact::graded::unit(nunk, j)).collect());
    }
    Matrix::from_rows_with_cols(rows, nunk).unwrap().kernel()
}

fn combine(ring: BaseRing, c: &FreeComplex<Scalar>, sol: &[Vec<Scalar>], rng: &mut impl Rng) -> Vec<Matrix<Scalar>> {
    let ranks = c.ranks();
    let nunk: usize = ranks.iter().map(|r| r * r).sum();
    let mut v = vec![Scalar::zero(); nunk];
    for s in sol {
        let a = random_scalar(ring, rng);
        for (x, y) in v.iter_mut().zip(s) {
            *x = x.clone() + a.clone() * y.clone();
        }
    }
    let mut out = Vec::new();
    let mut off = 0;
    for &r in ranks {
        out.push(Matrix::from_fn(r, r, |i, j| v[off + i * r + j].clone()));
        off += r * r;
    }
    out
}

/// A termwise split short exact sequence X → Y → Z with an endomorphism g of Y
/// preserving X, and the induced f on X and h on Z.
#[derive(Clone, Debug)]
pub struct SplitTriple {
    pub f: ChainEndo,
    pub g: ChainEndo,
    pub h: ChainEndo,
}

/// Y^k = X^k ⊕ Z^k with d_Y = [[d_X, θ], [0, d_Z]] for a random θ, and g a
/// random chain endomorphism preserving X.
pub fn random_split_triple(ring: BaseRing, max_rank: usize, len: usize, rng: &mut impl Rng) -> Result<SplitTriple> {
    let lo = rng.gen_range(-1..=1);
    let x = random_complex(ring, lo, len, max_rank, rng);
    let z = random_complex(ring, lo, len, max_rank, rng);
    let rx = x.ranks().to_vec();
    let rz = z.ranks().to_vec();
    let sig: Vec<Matrix<Scalar>> = (0..len).map(|k| random_matrix(ring, rx[k], rz[k], rng)).collect();
    let mut diffs = Vec::new();
    for k in 0..len.saturating_sub(1) {
        let i = lo + k as i64;
        let dx = x.d(i);
        let dz = z.d(i);
        // θ_k = d_X σ_k − σ_{k+1} d_Z satisfies d_X θ_k + θ_{k+1} d_Z = 0
        let theta = dx.mul(&sig[k]).sub(&sig[k + 1].mul(&dz));
        let top = dx.hcat(&theta);
        let bottom = Matrix::zeros(rz[k + 1], rx[k]).hcat(&dz);
        diffs.push(top.vcat(&bottom));
    }
    let ranks: Vec<usize> = rx.iter().zip(&rz).map(|(a, b)| a + b).collect();
    let y = FreeComplex::new(lo, ranks.clone(), diffs)?;
    let sol = chain_map_space(&y, Some(&rx))?;
    let gm = combine(ring, &y, &sol, rng);
    let g = ChainEndo::new(y, gm.clone())?;
    let fm: Vec<Matrix<Scalar>> =
        gm.iter().enumerate().map(|(k, m)| m.submatrix(&(0..rx[k]).collect::<Vec<_>>(), &(0..rx[k]).collect::<Vec<_>>())).collect();
    let hm: Vec<Matrix<Scalar>> = gm
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let idx: Vec<usize> = (rx[k]..ranks[k]).collect();
            m.submatrix(&idx, &idx)
        })
        .collect();
    Ok(SplitTriple { f: ChainEndo::new(x, fm)?, g, h: ChainEndo::new(z, hm)? })
}

/// A random homotopy h[k] : C^{lo+k} → C^{lo+k−1}.
pub fn random_homotopy(ring: BaseRing, c: &FreeComplex<Scalar>, rng: &mut impl Rng) -> Vec<Matrix<Scalar>> {
    let r = c.ranks();
    (0..r.len()).map(|k| random_matrix(ring, if k == 0 { 0 } else { r[k - 1] }, r[k], rng)).collect()
}

/// Traces on the rank-one invertible object k[−shift]: endomorphisms a, b and
/// the values (tr(b∘a), tr(b)·tr(a), tr(id)).
pub fn invertible_traces(ring: BaseRing, shift: i64, a: &Scalar, b: &Scalar) -> Result<(Scalar, Scalar, Scalar)> {
    let c = FreeComplex::new(shift, vec![1], vec![])?;
    let end = |x: &Scalar| ChainEndo::new(c.clone(), vec![Matrix::from_rows(vec![vec![ring.coerce(x).unwrap_or_else(|| x.clone())]])]);
    let (fa, fb) = (end(a)?, end(b)?);
    let ba = super_trace(&fa.compose(&fb)?);
    Ok((ba, super_trace(&fb) * super_trace(&fa), super_trace(&ChainEndo::identity(c))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_trace_is_euler_characteristic() {
        let c = FreeComplex::new(0, vec![1, 2], vec![Matrix::zeros(2, 1)]).unwrap();
        assert_eq!(super_trace(&ChainEndo::identity(c)), Scalar::from_int(-1));
    }

    #[test]
    fn non_chain_map_rejected() {
        let d = Matrix::from_rows(vec![vec![Scalar::one()]]);
        let c = FreeComplex::new(0, vec![1, 1], vec![d]).unwrap();
        let f = vec![Matrix::identity(1), Matrix::zeros(1, 1)];
        assert!(matches!(ChainEndo::new(c.clone(), f), Err(Error::NotChainMap(_))));
        assert!(matches!(ChainEndo::new(c, vec![Matrix::identity(1)]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn shift_and_homotopy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ring in [BaseRing::Rationals, BaseRing::fp(5)] {
            for _ in 0..10 {
                let c = random_complex(ring, 0, 3, 4, &mut rng);
                let f = random_chain_endo(ring, &c, &mut rng).unwrap();
                let t = super_trace(&f);
                assert_eq!(super_trace(&f.shift().unwrap()), Scalar::zero() - t.clone());
                let h = random_homotopy(ring, &c, &mut rng);
                assert_eq!(super_trace(&f.add_homotopy(&h).unwrap()), t);
            }
        }
    }

    #[test]
    fn additivity_on_split_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let s = random_split_triple(BaseRing::Rationals, 4, 3, &mut rng).unwrap();
            assert_eq!(super_trace(&s.g), super_trace(&s.f) + super_trace(&s.h));
        }
    }

    #[test]
    fn multiplicativity_on_invertible_objects() {
        let q = BaseRing::Rationals;
        let (a, b) = (Scalar::from_int(3), Scalar::rational(-2, 5));
        for shift in -2..=3 {
            let (ba, prod, id) = invertible_traces(q, shift, &a, &b).unwrap();
            assert_eq!(prod, id.clone() * ba.clone());
            assert_eq!(ba == prod, shift % 2 == 0);
        }
    }
}
