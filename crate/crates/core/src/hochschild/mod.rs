//! Finite-dimensional Hochschild bookkeeping: HKR dimensions from Hodge
//! numbers, Künneth convolution, adjoints for perfect pairings and the
//! injectivity of the action of HH* on HH_* for Calabi–Yau gradings.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::matrix::Matrix;
use crate::exact::scalar::{BaseRing, Coeff, Scalar};

/// Dimensions of a finitely supported graded vector space, starting at `min`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDims {
    pub min: i64,
    pub dims: Vec<u64>,
}

impl GradedDims {
    pub fn new(min: i64, dims: Vec<u64>) -> Self {
        GradedDims { min, dims }.trimmed()
    }

    pub fn get(&self, j: i64) -> u64 {
        let k = j - self.min;
        if k < 0 {
            0
        } else {
            self.dims.get(k as usize).copied().unwrap_or(0)
        }
    }

    pub fn max(&self) -> i64 {
        self.min + self.dims.len() as i64 - 1
    }

    pub fn total(&self) -> u64 {
        self.dims.iter().sum()
    }

    /// Σ (−1)^j dim V_j.
    pub fn euler(&self) -> i64 {
        (self.min..=self.max()).map(|j| if j.rem_euclid(2) == 0 { self.get(j) as i64 } else { -(self.get(j) as i64) }).sum()
    }

    /// V ⊗ W as a graded space.
    pub fn convolve(&self, o: &GradedDims) -> GradedDims {
        if self.dims.is_empty() || o.dims.is_empty() {
            return GradedDims { min: 0, dims: vec![] };
        }
        let mut out = vec![0u64; self.dims.len() + o.dims.len() - 1];
        for (i, a) in self.dims.iter().enumerate() {
            for (j, b) in o.dims.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        GradedDims::new(self.min + o.min, out)
    }

    /// Drop zero entries at both ends.
    fn trimmed(mut self) -> Self {
        while self.dims.last() == Some(&0) {
            self.dims.pop();
        }
        let lead = self.dims.iter().take_while(|&&d| d == 0).count();
        if lead == self.dims.len() {
            return GradedDims { min: 0, dims: vec![] };
        }
        self.dims.drain(..lead);
        self.min += lead as i64;
        self
    }

    /// Degree of each basis vector, in order.
    pub fn basis_degrees(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for (k, &d) in self.dims.iter().enumerate() {
            out.extend(std::iter::repeat_n(self.min + k as i64, d as usize));
        }
        out
    }
}

/// Hodge numbers h^{p,q} = dim H^q(X, Ω^p) of a smooth proper variety.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeDatum {
    pub dim: usize,
    /// h[p][q]
    pub h: Vec<Vec<u64>>,
    #[serde(default)]
    pub calabi_yau: bool,
    /// also require h^{p,q} = h^{q,p}
    #[serde(default)]
    pub conjugation: bool,
}

impl HodgeDatum {
    pub fn new(dim: usize, h: Vec<Vec<u64>>, calabi_yau: bool) -> Result<Self> {
        let hd = HodgeDatum { dim, h, calabi_yau, conjugation: false };
        hd.validate()?;
        Ok(hd)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let hd: HodgeDatum = serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
        hd.validate()?;
        Ok(hd)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if self.h.len() != d + 1 || self.h.iter().any(|r| r.len() != d + 1) {
            return Err(Error::InvalidDiamond(format!("expected a {0}x{0} table", d + 1)));
        }
        for p in 0..=d {
            for q in 0..=d {
                if self.h[p][q] != self.h[d - p][d - q] {
                    return Err(Error::InvalidDiamond(format!("Serre symmetry fails at ({p},{q})")));
                }
                if self.conjugation && self.h[p][q] != self.h[q][p] {
                    return Err(Error::InvalidDiamond(format!("conjugation symmetry fails at ({p},{q})")));
                }
            }
        }
        if self.calabi_yau && self.h[d][0] != 1 {
            return Err(Error::InvalidDiamond("Calabi-Yau requires h^{d,0} = 1".into()));
        }
        Ok(())
    }

    pub fn hodge(&self, p: i64, q: i64) -> u64 {
        let d = self.dim as i64;
        if (0..=d).contains(&p) && (0..=d).contains(&q) {
            self.h[p as usize][q as usize]
        } else {
            0
        }
    }

    pub fn total(&self) -> u64 {
        self.h.iter().flatten().sum()
    }

    /// Σ (−1)^{p+q} h^{p,q}.
    pub fn euler(&self) -> i64 {
        let mut e = 0;
        for (p, row) in self.h.iter().enumerate() {
            for (q, &x) in row.iter().enumerate() {
                e += if (p + q) % 2 == 0 { x as i64 } else { -(x as i64) };
            }
        }
        e
    }
}

/// dim HH_j = Σ_i h^{i, i−j} for −d ≤ j ≤ d.
pub fn hkr_homology_dims(h: &HodgeDatum) -> GradedDims {
    let d = h.dim as i64;
    let dims = (-d..=d).map(|j| (0..=d).map(|i| h.hodge(i, i - j)).sum()).collect();
    GradedDims { min: -d, dims }
}

/// dim HH^j = dim HH_{d−j} for a Calabi–Yau variety.
pub fn cy_cohomology_dims(h: &HodgeDatum) -> Result<GradedDims> {
    if !h.calabi_yau {
        return Err(Error::NotCalabiYau);
    }
    let hom = hkr_homology_dims(h);
    let d = h.dim as i64;
    let dims = (0..=2 * d).map(|j| hom.get(d - j)).collect();
    Ok(GradedDims { min: 0, dims })
}

/// HH_* of a product from the factors.
pub fn kunneth_hh(a: &GradedDims, b: &GradedDims) -> GradedDims {
    a.convolve(b)
}

/// Finite-dimensional graded algebra given by structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedAlgebra {
    pub field: BaseRing,
    pub degrees: Vec<i64>,
    /// mult[a][b] = coordinates of e_a·e_b
    pub mult: Vec<Vec<Vec<Scalar>>>,
    pub unit: Option<Vec<Scalar>>,
    /// nonzero entries of each product
    sparse: Vec<Vec<Vec<(usize, Scalar)>>>,
}

impl GradedAlgebra {
    /// Validate homogeneity and associativity, then search for a unit.
    pub fn new(field: BaseRing, degrees: Vec<i64>, mult: Vec<Vec<Vec<Scalar>>>) -> Result<Self> {
        let n = degrees.len();
        if mult.len() != n || mult.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
            return Err(Error::ShapeMismatch(format!("structure constants must be {n}x{n}x{n}")));
        }
        for a in 0..n {
            for b in 0..n {
                for (c, x) in mult[a][b].iter().enumerate() {
                    if !x.is_zero() && degrees[c] != degrees[a] + degrees[b] {
                        return Err(Error::GradingMismatch(format!("e{a}*e{b} has a component in degree {}", degrees[c])));
                    }
                }
            }
        }
        let mut alg = GradedAlgebra::raw(field, degrees, mult);
        alg.check_associative()?;
        alg.unit = alg.find_unit()?;
        Ok(alg)
    }

    fn raw(field: BaseRing, degrees: Vec<i64>, mult: Vec<Vec<Vec<Scalar>>>) -> Self {
        let sparse = mult
            .iter()
            .map(|r| r.iter().map(|v| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(c, x)| (c, x.clone())).collect()).collect())
            .collect();
        GradedAlgebra { field, degrees, mult, unit: None, sparse }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn graded_dims(&self) -> GradedDims {
        let (lo, hi) = match (self.degrees.iter().min(), self.degrees.iter().max()) {
            (Some(&l), Some(&h)) => (l, h),
            _ => return GradedDims { min: 0, dims: vec![] },
        };
        let dims = (lo..=hi).map(|j| self.degrees.iter().filter(|&&d| d == j).count() as u64).collect();
        GradedDims::new(lo, dims)
    }

    /// Basis indices of degree j.
    pub fn piece(&self, j: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&a| self.degrees[a] == j).collect()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![Scalar::zero(); n];
        for a in 0..n {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if y[b].is_zero() {
                    continue;
                }
                let s = x[a].clone() * y[b].clone();
                for (c, m) in &self.sparse[a][b] {
                    out[*c] = out[*c].clone() + s.clone() * m.clone();
                }
            }
        }
        out
    }

    fn basis(&self, a: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[a] = self.field.int(1);
        v
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.dim();
        fn combine<'a>(n: usize, outer: &[(usize, Scalar)], inner: impl Fn(usize) -> &'a [(usize, Scalar)]) -> Vec<Scalar> {
            let mut v = vec![Scalar::zero(); n];
            for (x, s) in outer {
                for (c, t) in inner(*x) {
                    v[*c] = v[*c].clone() + s.clone() * t.clone();
                }
            }
            v
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let l = combine(n, &self.sparse[a][b], |x| &self.sparse[x][c]);
                    let r = combine(n, &self.sparse[b][c], |y| &self.sparse[a][y]);
                    if l != r {
                        return Err(Error::Invalid(format!("multiplication is not associative at (e{a}, e{b}, e{c})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Solve u·e_b = e_b = e_b·u for all b.
    pub fn find_unit(&self) -> Result<Option<Vec<Scalar>>> {
        let n = self.dim();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for b in 0..n {
            for c in 0..n {
                let target = if b == c { self.field.int(1) } else { Scalar::zero() };
                rows.push((0..n).map(|a| self.mult[a][b][c].clone()).collect());
                rhs.push(target.clone());
                rows.push((0..n).map(|a| self.mult[b][a][c].clone()).collect());
                rhs.push(target);
            }
        }
        if n == 0 {
            return Ok(None);
        }
        Matrix::from_rows_with_cols(rows, n).expect("rectangular").solve(&rhs)
    }

    /// Check that a claimed unit really is one.
    pub fn verify_unit(&self, u: &[Scalar]) -> Result<()> {
        for b in 0..self.dim() {
            let e = self.basis(b);
            if self.mul(u, &e) != e || self.mul(&e, u) != e {
                return Err(Error::NotUnital(format!("1*e{b} or e{b}*1 differs from e{b}")));
            }
        }
        Ok(())
    }

    /// Matrix of left multiplication by e_a.
    pub fn left_mult(&self, a: usize) -> Matrix<Scalar> {
        let n = self.dim();
        Matrix::from_fn(n, n, |r, c| self.mult[a][c][r].clone())
    }

    /// Zero multiplication on `n` basis vectors of degree 0.
    pub fn zero_product(field: BaseRing, n: usize) -> Self {
        GradedAlgebra::raw(field, vec![0; n], vec![vec![vec![Scalar::zero(); n]; n]; n])
    }

    /// A random unital associative algebra with the given graded dimensions
    /// in non-negative degrees, one-dimensional in degree 0.
    ///
    /// Products of non-unit basis vectors land in the top degree and vanish
    /// when a factor is already there, so every triple product is zero. A
    /// random change of basis in each degree hides the unit.
    pub fn random_unital(field: BaseRing, dims: &GradedDims, rng: &mut impl Rng) -> Result<Self> {
        if dims.min != 0 || dims.get(0) != 1 {
            return Err(Error::Unsupported("random algebras need degree 0 of dimension one and no negative degrees".into()));
        }
        let degrees = dims.basis_degrees();
        let n = degrees.len();
        let top = dims.max();
        let zero = Scalar::zero();
        let mut mult = vec![vec![vec![zero.clone(); n]; n]; n];
        for a in 0..n {
            mult[0][a][a] = field.int(1);
            mult[a][0][a] = field.int(1);
        }
        let tops: Vec<usize> = (0..n).filter(|&c| degrees[c] == top).collect();
        for a in 1..n {
            for b in 1..n {
                if top > 0 && degrees[a] + degrees[b] == top && degrees[a] < top && degrees[b] < top {
                    for &c in &tops {
                        mult[a][b][c] = field.int(rng.gen_range(-3..=3));
                    }
                }
            }
        }
        // per-degree change of basis
        let mut p = Matrix::<Scalar>::identity(n);
        for j in dims.min..=top {
            let idx: Vec<usize> = (0..n).filter(|&c| degrees[c] == j).collect();
            if j == 0 {
                p[(idx[0], idx[0])] = field.int(if rng.gen_bool(0.5) { 1 } else { -1 });
                continue;
            }
            // unitriangular factors keep the structure constants integral
            let k = idx.len();
            let mut lower = Matrix::<Scalar>::identity(k);
            let mut upper = Matrix::<Scalar>::identity(k);
            for r in 0..k {
                for c in 0..r {
                    lower[(r, c)] = field.int(rng.gen_range(-1..=1));
                    upper[(c, r)] = field.int(rng.gen_range(-1..=1));
                }
            }
            let block = lower.mul(&upper);
            for (r, &ir) in idx.iter().enumerate() {
                for (c, &ic) in idx.iter().enumerate() {
                    p[(ir, ic)] = block[(r, c)].clone();
                }
            }
        }
        // new structure constants: P⁻¹ applied to Pᵀ·M_c·P for each output c
        let pinv = p.inverse()?.expect("block invertible");
        let pt = p.transpose();
        let mut m2 = vec![vec![vec![zero.clone(); n]; n]; n];
        for c in 0..n {
            let mc = Matrix::from_fn(n, n, |a, b| mult[a][b][c].clone());
            if mc.is_zero() {
                continue;
            }
            let conj = pt.mul(&mc).mul(&p);
            for c2 in 0..n {
                let w = &pinv[(c2, c)];
                if w.is_zero() {
                    continue;
                }
                for a in 0..n {
                    for b in 0..n {
                        if !conj[(a, b)].is_zero() {
                            m2[a][b][c2] = m2[a][b][c2].clone() + w.clone() * conj[(a, b)].clone();
                        }
                    }
                }
            }
        }
        GradedAlgebra::new(field, degrees, m2)
    }
}

/// A graded module over a graded algebra with homological degrees.
#[derive(Clone, Debug)]
pub struct ActionModule {
    pub degrees: Vec<i64>,
    /// act[a] = matrix of e_a acting on M
    pub act: Vec<Matrix<Scalar>>,
}

impl ActionModule {
    /// A acting on itself with M_i = A^{d−i}.
    pub fn cy_regrading(a: &GradedAlgebra, d: i64) -> Self {
        ActionModule { degrees: a.degrees.iter().map(|&j| d - j).collect(), act: (0..a.dim()).map(|i| a.left_mult(i)).collect() }
    }
}

/// Rank data of a: A^j → ⊕_i Hom(M_i, M_{i−j}) in one degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionDegree {
    pub degree: i64,
    pub source_dim: usize,
    pub rank: usize,
    pub injective: bool,
    /// a nonzero element of A^j acting as zero, in A-coordinates
    #[serde(skip)]
    pub witness: Option<Vec<Scalar>>,
}

/// The action map degree by degree, with its matrices.
pub fn action_map(a: &GradedAlgebra, m: &ActionModule) -> Result<Vec<(ActionDegree, Matrix<Scalar>)>> {
    if m.act.len() != a.dim() {
        return Err(Error::ShapeMismatch("one action matrix per algebra basis vector".into()));
    }
    let dm = m.degrees.len();
    for (i, x) in m.act.iter().enumerate() {
        if x.rows() != dm || x.cols() != dm {
            return Err(Error::ShapeMismatch(format!("action matrix {i} is not {dm}x{dm}")));
        }
        for r in 0..dm {
            for c in 0..dm {
                if !x[(r, c)].is_zero() && m.degrees[r] != m.degrees[c] - a.degrees[i] {
                    return Err(Error::GradingMismatch(format!("e{i} sends degree {} to degree {}", m.degrees[c], m.degrees[r])));
                }
            }
        }
    }
    let gd = a.graded_dims();
    let mut out = Vec::new();
    for j in gd.min..=gd.max() {
        let src = a.piece(j);
        if src.is_empty() {
            continue;
        }
        let pairs: Vec<(usize, usize)> =
            (0..dm).flat_map(|r| (0..dm).map(move |c| (r, c))).filter(|&(r, c)| m.degrees[r] == m.degrees[c] - j).collect();
        let mat = Matrix::from_fn(pairs.len(), src.len(), |k, s| m.act[src[s]][pairs[k]].clone());
        let rank = mat.rank()?;
        let witness = mat.kernel()?.into_iter().next().map(|v| {
            let mut full = vec![Scalar::zero(); a.dim()];
            for (s, &idx) in src.iter().enumerate() {
                full[idx] = v[s].clone();
            }
            full
        });
        let info = ActionDegree { degree: j, source_dim: src.len(), rank, injective: rank == src.len(), witness };
        out.push((info, mat));
    }
    Ok(out)
}

/// Graded vector spaces paired into the ground field: V_i pairs with W_{s−i}.
#[derive(Clone, Debug)]
pub struct PerfectPairing {
    pub left: Vec<i64>,
    pub right: Vec<i64>,
    pub shift: i64,
    pub matrix: Matrix<Scalar>,
}

impl PerfectPairing {
    pub fn new(left: Vec<i64>, right: Vec<i64>, shift: i64, matrix: Matrix<Scalar>) -> Result<Self> {
        if matrix.rows() != left.len() || matrix.cols() != right.len() {
            return Err(Error::ShapeMismatch("pairing matrix does not match the spaces".into()));
        }
        for r in 0..left.len() {
            for c in 0..right.len() {
                if !matrix[(r, c)].is_zero() && left[r] + right[c] != shift {
                    return Err(Error::GradingMismatch(format!("degrees {} and {} are not complementary", left[r], right[c])));
                }
            }
        }
        let mut degs: Vec<i64> = left.clone();
        degs.sort();
        degs.dedup();
        for i in degs {
            let rs: Vec<usize> = (0..left.len()).filter(|&r| left[r] == i).collect();
            let cs: Vec<usize> = (0..right.len()).filter(|&c| right[c] == shift - i).collect();
            if rs.len() != cs.len() || matrix.submatrix(&rs, &cs).rank()? < rs.len() {
                return Err(Error::DegeneratePairing(format!("block in degree {i} is not invertible")));
            }
        }
        if left.len() != right.len() {
            return Err(Error::DegeneratePairing("total dimensions differ".into()));
        }
        Ok(PerfectPairing { left, right, shift, matrix })
    }

    /// The standard pairing of a graded space with its reflection.
    pub fn standard(degrees: Vec<i64>, field: BaseRing) -> Self {
        let n = degrees.len();
        let right = degrees.iter().map(|d| -d).collect();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = field.int(1);
        }
        PerfectPairing { left: degrees, right, shift: 0, matrix: m }
    }

    /// ⟨g, f⟩ with the slots swapped.
    pub fn swapped(&self) -> Self {
        PerfectPairing { left: self.right.clone(), right: self.left.clone(), shift: self.shift, matrix: self.matrix.transpose() }
    }
}

/// A degree-preserving linear map between graded spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMap {
    pub src: Vec<i64>,
    pub dst: Vec<i64>,
    pub matrix: Matrix<Scalar>,
}

impl GradedMap {
    pub fn new(src: Vec<i64>, dst: Vec<i64>, matrix: Matrix<Scalar>) -> Result<Self> {
        if matrix.rows() != dst.len() || matrix.cols() != src.len() {
            return Err(Error::ShapeMismatch("map matrix does not match the spaces".into()));
        }
        for r in 0..dst.len() {
            for c in 0..src.len() {
                if !matrix[(r, c)].is_zero() && dst[r] != src[c] {
                    return Err(Error::GradingMismatch(format!("map sends degree {} to degree {}", src[c], dst[r])));
                }
            }
        }
        Ok(GradedMap { src, dst, matrix })
    }

    pub fn identity(degrees: Vec<i64>, field: BaseRing) -> Self {
        let n = degrees.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = field.int(1);
        }
        GradedMap { src: degrees.clone(), dst: degrees, matrix: m }
    }

    /// self ∘ o
    pub fn compose(&self, o: &GradedMap) -> GradedMap {
        GradedMap { src: o.src.clone(), dst: self.dst.clone(), matrix: self.matrix.mul(&o.matrix) }
    }
}

/// The Ψ with ⟨f, Φ(g)⟩_Q = ⟨Ψ(f), g⟩_P, for Φ: G → G', P on F×G and Q on F'×G'.
///
/// In matrices Ψᵀ·P = Q·Φ, so Ψ = P⁻ᵀ·Φᵀ·Qᵀ.
pub fn serre_adjoint(phi: &GradedMap, p: &PerfectPairing, q: &PerfectPairing) -> Result<GradedMap> {
    if phi.src != p.right || phi.dst != q.right {
        return Err(Error::ShapeMismatch("map does not run between the right slots of the pairings".into()));
    }
    let pinv = p.matrix.inverse()?.ok_or_else(|| Error::DegeneratePairing("source pairing".into()))?;
    let m = pinv.transpose().mul(&phi.matrix.transpose()).mul(&q.matrix.transpose());
    GradedMap::new(q.left.clone(), p.left.clone(), m)
}

/// Verdict of the injectivity skeleton: a, Φ and Φ∘ev.
#[derive(Clone, Debug, Serialize)]
pub struct InjectivityVerdict {
    pub action: Vec<ActionDegree>,
    pub action_injective: bool,
    /// rank of Φ, certified by L·Φ = 1
    pub phi_rank: usize,
    pub composite_rank: usize,
    pub composite_injective: bool,
    pub algebra_dim: usize,
}

/// The evaluation part of a: A^j → Hom(M_d, M_{d−j}) = Hom(A⁰, A^j), stacked over j.
pub fn evaluation_matrix(a: &GradedAlgebra) -> Matrix<Scalar> {
    let zero = a.piece(0);
    let n = a.dim();
    let mut rows = Vec::new();
    let gd = a.graded_dims();
    for j in gd.min..=gd.max() {
        for r in a.piece(j) {
            for &c in &zero {
                rows.push((0..n).map(|s| if a.degrees[s] == j { a.mult[s][c][r].clone() } else { Scalar::zero() }).collect());
            }
        }
    }
    Matrix::from_rows_with_cols(rows, n).expect("rectangular")
}

/// Certify that the action map is injective, that Φ has the given left
/// inverse, and that Φ∘ev is injective, where ev is the evaluation part of
/// the action under the Calabi–Yau regrading of degree d.
pub fn semiregularity_injectivity_check(
    a: &GradedAlgebra,
    d: i64,
    phi: &Matrix<Scalar>,
    left_inverse: &Matrix<Scalar>,
) -> Result<InjectivityVerdict> {
    let unit = a.unit.clone().ok_or_else(|| Error::NotUnital("no element acts as the identity".into()))?;
    a.verify_unit(&unit)?;
    let ev = evaluation_matrix(a);
    if phi.cols() != ev.rows() || left_inverse.cols() != phi.rows() || left_inverse.rows() != phi.cols() {
        return Err(Error::ShapeMismatch(format!("expected Φ with {} columns and a matching left inverse", ev.rows())));
    }
    if left_inverse.mul(phi) != Matrix::identity(phi.cols()) {
        return Err(Error::NoLeftInverse("L*Phi is not the identity".into()));
    }
    let action: Vec<ActionDegree> = action_map(a, &ActionModule::cy_regrading(a, d))?.into_iter().map(|x| x.0).collect();
    let action_injective = action.iter().all(|x| x.injective);
    let composite = phi.mul(&ev);
    let composite_rank = composite.rank()?;
    Ok(InjectivityVerdict {
        action,
        action_injective,
        phi_rank: phi.cols(),
        composite_rank,
        composite_injective: composite_rank == a.dim(),
        algebra_dim: a.dim(),
    })
}

/// A random n×m matrix (n ≥ m) with an exhibited left inverse.
///
/// m of the rows form a unimodular block B = lower·upper; the rest are
/// random, and the rows are shuffled. The left inverse is B⁻¹ on those rows.
pub fn random_left_invertible(field: BaseRing, n: usize, m: usize, rng: &mut impl Rng) -> Result<(Matrix<Scalar>, Matrix<Scalar>)> {
    assert!(n >= m);
    let mut lower = Matrix::<Scalar>::identity(m);
    let mut upper = Matrix::<Scalar>::identity(m);
    for r in 0..m {
        for c in 0..r {
            lower[(r, c)] = field.int(rng.gen_range(-1..=1));
            upper[(c, r)] = field.int(rng.gen_range(-1..=1));
        }
    }
    let block = lower.mul(&upper);
    let inv = block.inverse()?.expect("unimodular");
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut phi = Matrix::zeros(n, m);
    let mut l = Matrix::zeros(m, n);
    for (k, &row) in order.iter().enumerate() {
        for c in 0..m {
            phi[(row, c)] = if k < m { block[(k, c)].clone() } else { field.int(rng.gen_range(-2..=2)) };
        }
        if k < m {
            for i in 0..m {
                l[(i, row)] = inv[(i, k)].clone();
            }
        }
    }
    Ok((phi, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k3() -> HodgeDatum {
        HodgeDatum::new(2, vec![vec![1, 0, 1], vec![0, 20, 0], vec![1, 0, 1]], true).unwrap()
    }

    #[test]
    fn hkr_examples() {
        let pt = HodgeDatum::new(0, vec![vec![1]], true).unwrap();
        assert_eq!(hkr_homology_dims(&pt), GradedDims { min: 0, dims: vec![1] });
        let p1 = HodgeDatum::new(1, vec![vec![1, 0], vec![0, 1]], false).unwrap();
        assert_eq!(hkr_homology_dims(&p1), GradedDims { min: -1, dims: vec![0, 2, 0] });
        assert_eq!(hkr_homology_dims(&k3()).dims, vec![1, 0, 22, 0, 1]);
        assert_eq!(cy_cohomology_dims(&k3()).unwrap().dims, vec![1, 0, 22, 0, 1]);
        assert_eq!(cy_cohomology_dims(&p1), Err(Error::NotCalabiYau));
        let hh = hkr_homology_dims(&k3());
        assert_eq!(kunneth_hh(&hh, &hh).get(0), 486);
        let hp = hkr_homology_dims(&p1);
        assert_eq!(kunneth_hh(&hp, &hp).get(0), 4);
    }

    #[test]
    fn diamond_validation() {
        assert!(matches!(HodgeDatum::new(1, vec![vec![1, 1], vec![0, 1]], false), Err(Error::InvalidDiamond(_))));
        assert!(matches!(HodgeDatum::new(1, vec![vec![1, 0], vec![0, 1]], true), Err(Error::InvalidDiamond(_))));
    }

    #[test]
    fn unital_acts_injectively() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dims = GradedDims::new(0, vec![1, 0, 5, 0, 1]);
        let a = GradedAlgebra::random_unital(BaseRing::Rationals, &dims, &mut rng).unwrap();
        assert!(a.unit.is_some());
        let m = ActionModule::cy_regrading(&a, 2);
        assert!(action_map(&a, &m).unwrap().iter().all(|(x, _)| x.injective));
    }

    #[test]
    fn zero_product_fails() {
        let a = GradedAlgebra::new(BaseRing::Rationals, vec![0, 0], vec![vec![vec![Scalar::zero(); 2]; 2]; 2]).unwrap();
        assert!(a.unit.is_none());
        let m = ActionModule::cy_regrading(&a, 0);
        let res = action_map(&a, &m).unwrap();
        assert!(!res[0].0.injective);
        assert!(res[0].0.witness.is_some());
    }

    #[test]
    fn adjoint_of_standard_pairing_is_transpose() {
        let f = BaseRing::Rationals;
        let degs = vec![0, 0, 1];
        let p = PerfectPairing::standard(degs.iter().map(|d| -d).collect(), f);
        let m = Matrix::from_rows(vec![
            vec![f.int(1), f.int(2), f.int(0)],
            vec![f.int(3), f.int(4), f.int(0)],
            vec![f.int(0), f.int(0), f.int(5)],
        ]);
        let phi = GradedMap::new(degs.clone(), degs, m.clone()).unwrap();
        let psi = serre_adjoint(&phi, &p, &p).unwrap();
        assert_eq!(psi.matrix, m.transpose());
        let back = serre_adjoint(&psi, &p.swapped(), &p.swapped()).unwrap();
        assert_eq!(back.matrix, m);
    }

    #[test]
    fn injectivity_skeleton() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = BaseRing::Rationals;
        let a = GradedAlgebra::random_unital(f, &GradedDims::new(0, vec![1, 0, 22, 0, 1]), &mut rng).unwrap();
        let ev = evaluation_matrix(&a);
        let (phi, l) = random_left_invertible(f, ev.rows() + 3, ev.rows(), &mut rng).unwrap();
        let v = semiregularity_injectivity_check(&a, 2, &phi, &l).unwrap();
        assert!(v.action_injective && v.composite_injective);
        assert_eq!(v.composite_rank, 24);
        let z = GradedAlgebra::zero_product(f, 2);
        assert!(matches!(semiregularity_injectivity_check(&z, 0, &phi, &l), Err(Error::NotUnital(_))));
    }
}
