//! Atiyah classes from first jets, their powers, the obstruction composite
//! and traces, in two models: finite-dimensional modules over a graded affine
//! ring, and vector bundles on the projective line glued from two charts.
//!
//! Affine: P¹(M) = M ⊕ M⊗Ω with x_i acting by (m, ω) ↦ (x_i m, x_i ω + dx_i⊗m),
//! the left structure on (B⊗B/I²)⊗_B M. The class is read off a lift of the
//! identity of M along P¹(M) → M.
//!
//! Projective line: charts U₀ = Spec k[x], U₁ = Spec k[1/x]; a bundle is a
//! transition matrix g with f₀ = g·f₁ on coordinate vectors, upper triangular
//! with monomial diagonal. The Čech cocycle of At is dg·g⁻¹ and
//! H¹(Ω¹) ≅ k via the coefficient of dx/x.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use super::signs::{antisymmetrize, sort_word, Wedge};
use crate::chern::{ChernVector, FormalRing};
use crate::error::{Error, Result};
use crate::exact::ext::{lift_chain_map, ExtClass};
use crate::exact::graded::{FinModule, GradedRing, Resolution};
use crate::exact::matrix::Matrix;
use crate::exact::poly::MultiPoly;
use crate::exact::scalar::{BaseRing, Coeff, Scalar};

// ---------------------------------------------------------------- affine model

/// M⊗Ω_B as a quotient of M^n (block i is M·dx_i), with the projection.
pub fn omega_tensor(ring: &GradedRing, m: &FinModule) -> Result<(FinModule, Matrix<Scalar>)> {
    let n = ring.nvars();
    let shifts: Vec<i64> = ring.weights.iter().map(|&w| w as i64).collect();
    let free = m.tensor_free(&shifts);
    let rels: Vec<MultiPoly> = ring.ideal().generators().iter().filter(|g| !g.is_zero()).cloned().collect();
    if rels.is_empty() {
        return Ok((free, Matrix::identity(m.dim * n)));
    }
    let mut gens = Vec::new();
    for g in &rels {
        let parts: Vec<Matrix<Scalar>> = (0..n).map(|i| m.act(&g.derivative(i))).collect();
        for b in 0..m.dim {
            let mut v = Vec::with_capacity(m.dim * n);
            for p in &parts {
                v.extend(p.col(b));
            }
            gens.push(v);
        }
    }
    free.quotient(&gens)
}

/// The jet module P¹(M) and M⊗Ω_B; the first `m.dim` coordinates of P¹(M) map to M.
pub fn jet_module(ring: &GradedRing, m: &FinModule) -> Result<(FinModule, FinModule)> {
    let (om, proj) = omega_tensor(ring, m)?;
    let d = m.dim;
    let big = d + om.dim;
    let actions = (0..ring.nvars())
        .map(|i| {
            Matrix::from_fn(big, big, |r, c| match (r < d, c < d) {
                (true, true) => m.actions[i][(r, c)].clone(),
                (false, true) => proj[(r - d, i * d + c)].clone(),
                (false, false) => om.actions[i][(r - d, c - d)].clone(),
                (true, false) => Scalar::zero(),
            })
        })
        .collect();
    let degrees = match (&m.degrees, &om.degrees) {
        (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
        _ => None,
    };
    Ok((FinModule { dim: big, actions, degrees }, om))
}

/// Resolve M through its one-generator-per-basis-vector presentation.
pub fn resolve(ring: &Arc<GradedRing>, m: &FinModule, len: usize) -> Result<Arc<Resolution>> {
    Ok(Arc::new(Resolution::compute(ring.clone(), &m.presentation(ring)?, len)?))
}

/// Class in Ext¹(M, N) of an extension E with E → M the first `m_dim`
/// coordinates and N the rest: lift generators e_c ↦ (e_c, 0) and read the
/// relations in N.
pub fn extension_class(res: &Arc<Resolution>, e: &FinModule, m_dim: usize, sub: Arc<FinModule>) -> Result<ExtClass> {
    if res.rank(0) != m_dim || e.dim != m_dim + sub.dim {
        return Err(Error::ShapeMismatch("extension does not match the resolution".into()));
    }
    let mut cocycle = Vec::new();
    for rel in &res.diffs[0] {
        let mut acc = vec![Scalar::zero(); e.dim];
        for (c, p) in rel.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (a, b) in acc.iter_mut().zip(e.act(p).col(c)) {
                *a = a.clone() + b;
            }
        }
        if acc[..m_dim].iter().any(|x| !x.is_zero()) {
            return Err(Error::Invalid("relation does not map into the submodule".into()));
        }
        cocycle.push(acc[m_dim..].to_vec());
    }
    ExtClass::new(res.clone(), sub, 1, cocycle)
}

/// At(M) ∈ Ext¹(M, M⊗Ω_B) together with the data it was built from.
#[derive(Clone, Debug)]
pub struct Atiyah {
    pub ring: Arc<GradedRing>,
    pub module: Arc<FinModule>,
    pub jets: FinModule,
    pub class: ExtClass,
}

pub fn atiyah_class(ring: &Arc<GradedRing>, m: &FinModule) -> Result<Atiyah> {
    m.validate(ring)?;
    let res = resolve(ring, m, 2)?;
    let (jets, om) = jet_module(ring, m)?;
    let class = extension_class(&res, &jets, m.dim, Arc::new(om))?;
    Ok(Atiyah { ring: ring.clone(), module: Arc::new(m.clone()), jets, class })
}

/// Index sets of size i in 0..n, in lexicographic order.
fn subsets(n: usize, i: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == i {
            out.push(cur.clone());
            return;
        }
        for a in start..n {
            cur.push(a);
            go(a + 1, n, i, cur, out);
            cur.pop();
        }
    }
    go(0, n, i, &mut cur, &mut out);
    out
}

/// M⊗Ω^i over a polynomial ring: one copy of M per index set, shifted by its weight.
pub fn wedge_module(ring: &GradedRing, m: &FinModule, i: usize) -> FinModule {
    let shifts: Vec<i64> = subsets(ring.nvars(), i).iter().map(|s| s.iter().map(|&a| ring.weights[a] as i64).sum()).collect();
    m.tensor_free(&shifts)
}

/// Atᶦ(M) ∈ Extᶦ(M, M⊗Ωᶦ): the i-fold Yoneda composite followed by Ω^{⊗i} → Ωᶦ.
///
/// Factor j of Ω^{⊗i} comes from the j-th Atiyah class applied; the word
/// (i₁, …, i_j) is sent to dx_{i₁}∧⋯∧dx_{i_j}.
pub fn atiyah_power(ring: &Arc<GradedRing>, m: &FinModule, i: usize) -> Result<ExtClass> {
    if i == 0 {
        let res = resolve(ring, m, 1)?;
        let cocycle = (0..m.dim).map(|c| crate::exact::graded::unit(m.dim, c)).collect();
        return ExtClass::new(res, Arc::new(m.clone()), 0, cocycle);
    }
    let first = atiyah_class(ring, m)?.class;
    if i == 1 {
        return Ok(first);
    }
    if !ring.is_polynomial() {
        return Err(Error::Unsupported("atiyah powers beyond the first need a polynomial ring".into()));
    }
    let n = ring.nvars();
    let mut acc = first;
    for _ in 1..i {
        let next = atiyah_class(ring, &acc.target)?.class;
        acc = acc.compose(&next)?;
    }
    // wedge projection, position = ((i_i·n + ⋯)·n + i_1)·d + b
    let d = m.dim;
    let target = Arc::new(wedge_module(ring, m, i));
    let subs = subsets(n, i);
    let mut phi = Matrix::zeros(target.dim, acc.target.dim);
    for col in 0..acc.target.dim {
        let b = col % d;
        let mut rest = col / d;
        let mut word = Vec::with_capacity(i);
        for _ in 0..i {
            word.push(rest % n);
            rest /= n;
        }
        // word is (i_1, …, i_i) with i_1 the first class applied
        if let Some((s, sign)) = sort_word(&word) {
            let pos = subs.iter().position(|x| *x == s).unwrap();
            phi[(pos * d + b, col)] = Scalar::from_int(sign);
        }
    }
    acc.push_forward(&phi, target)
}

/// ob = (id⊗κ)∘At in Ext²(M, M⊗I), with κ already tensored with M.
pub fn obstruction_class(at: &ExtClass, kappa: &ExtClass) -> Result<ExtClass> {
    if at.degree != 1 || kappa.degree != 1 {
        return Err(Error::DegreeMismatch(format!("obstruction needs two degree-one classes, got {} and {}", at.degree, kappa.degree)));
    }
    at.compose(kappa)
}

/// Pull a module back along the linear automorphism y_i ↦ Σ_j c_ij x_j:
/// x_j acts by Σ_k (c⁻¹)_jk y_k.
pub fn linear_pullback(m: &FinModule, c: &Matrix<Scalar>) -> Result<FinModule> {
    let inv = c.inverse()?.ok_or_else(|| Error::Invalid("coordinate change is not invertible".into()))?;
    let n = c.rows();
    let actions = (0..n)
        .map(|j| {
            let mut a = Matrix::zeros(m.dim, m.dim);
            for k in 0..n {
                a = a.add(&m.actions[k].scale(&inv[(j, k)]));
            }
            a
        })
        .collect();
    Ok(FinModule { dim: m.dim, actions, degrees: m.degrees.clone() })
}

/// Both sides of At(f*M) = (id⊗φ)∘f*At(M) for a linear automorphism over a
/// polynomial ring with equal weights.
pub fn atiyah_naturality(ring: &Arc<GradedRing>, m: &FinModule, c: &Matrix<Scalar>) -> Result<(ExtClass, ExtClass)> {
    let pulled = linear_pullback(m, c)?;
    let direct = atiyah_class(ring, &pulled)?.class;
    let (jets, _) = jet_module(ring, m)?;
    let pjets = linear_pullback(&jets, c)?;
    let n = ring.nvars();
    let d = m.dim;
    let sub = Arc::new(pulled.tensor_free(&ring.weights.iter().map(|&w| w as i64).collect::<Vec<_>>()));
    let raw = Arc::new(FinModule {
        dim: d * n,
        actions: (0..n)
            .map(|j| pjets.actions[j].submatrix(&(d..d * (n + 1)).collect::<Vec<_>>(), &(d..d * (n + 1)).collect::<Vec<_>>()))
            .collect(),
        degrees: sub.degrees.clone(),
    });
    let pulled_class = extension_class(&direct.source, &pjets, d, raw)?;
    // dy_i ↦ Σ_j c_ij dx_j
    let phi = Matrix::from_fn(d * n, d * n, |r, col| if r % d == col % d { c[(col / d, r / d)].clone() } else { Scalar::zero() });
    Ok((direct, pulled_class.push_forward(&phi, sub)?))
}

/// Super trace of a degree-0 endomorphism of M, lifted to a finite free
/// resolution over a polynomial ring: Σ_j (−1)^j tr(α_j) ∈ B.
pub fn affine_trace(ring: &Arc<GradedRing>, m: &FinModule, alpha: &Matrix<Scalar>) -> Result<MultiPoly> {
    if !ring.is_polynomial() {
        return Err(Error::Unsupported("finite free resolutions need a polynomial ring".into()));
    }
    for a in &m.actions {
        if alpha.mul(a) != a.mul(alpha) {
            return Err(Error::NotChainMap("endomorphism does not commute with the action".into()));
        }
    }
    let n = ring.nvars();
    let res = resolve(ring, m, n + 1)?;
    if res.rank(n + 1) != 0 {
        return Err(Error::ResolutionBoundExceeded("resolution longer than the number of variables".into()));
    }
    let alpha0: Vec<Vec<MultiPoly>> =
        (0..m.dim).map(|c| (0..m.dim).map(|r| MultiPoly::constant(n, alpha[(r, c)].clone())).collect()).collect();
    let maps = lift_chain_map(&res, 0, &res, alpha0, n)?;
    let mut acc = MultiPoly::zero(n);
    for (j, level) in maps.iter().enumerate() {
        for (h, img) in level.iter().enumerate() {
            let t = if j % 2 == 0 { img[h].clone() } else { -&img[h] };
            acc = &acc + &t;
        }
    }
    ring.reduce(&acc)
}

/// Affine semiregularity σ_i(α) for α ∈ Ext^j(M, M): the trace lands in
/// H^{i+j}(Ωᶦ), which vanishes on an affine scheme unless i = j = 0.
#[derive(Clone, Debug, Serialize)]
pub struct AffineSemiregularity {
    pub form_degree: usize,
    pub cohomological_degree: usize,
    /// the trace in B when i = j = 0
    pub value: Option<String>,
    pub vanishes: bool,
}

pub fn affine_semiregularity(ring: &Arc<GradedRing>, m: &FinModule, alpha: &ExtClass, i: usize) -> Result<AffineSemiregularity> {
    factorial_inverse(ring.field, i)?;
    if alpha.degree + i > 0 {
        return Ok(AffineSemiregularity { form_degree: i, cohomological_degree: alpha.degree + i, value: None, vanishes: true });
    }
    let a = Matrix::from_rows_with_cols(alpha.cocycle.clone(), m.dim).unwrap().transpose();
    let t = affine_trace(ring, m, &a)?;
    Ok(AffineSemiregularity { form_degree: 0, cohomological_degree: 0, vanishes: t.is_zero(), value: Some(t.fmt_with(&ring.names)) })
}

fn factorial_inverse(field: BaseRing, i: usize) -> Result<Scalar> {
    let f: BigInt = (1..=i as u64).product::<u64>().into();
    field.bigint(&f).try_inv().ok_or(Error::FactorialNotInvertible(i as u32))
}

// ---------------------------------------------------------- projective line

/// A Laurent polynomial in x: exponent ↦ coefficient.
pub type Laurent = BTreeMap<i64, Scalar>;

fn l_clean(mut a: Laurent) -> Laurent {
    a.retain(|_, c| !c.is_zero());
    a
}

pub fn l_mono(c: Scalar, e: i64) -> Laurent {
    l_clean([(e, c)].into_iter().collect())
}

pub fn l_add(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (e, c) in b {
        let v = out.remove(e).unwrap_or_else(Scalar::zero) + c.clone();
        out.insert(*e, v);
    }
    l_clean(out)
}

pub fn l_neg(a: &Laurent) -> Laurent {
    a.iter().map(|(e, c)| (*e, -c.clone())).collect()
}

pub fn l_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (e, c) in a {
        for (f, d) in b {
            let v = out.remove(&(e + f)).unwrap_or_else(Scalar::zero) + c.clone() * d.clone();
            out.insert(e + f, v);
        }
    }
    l_clean(out)
}

/// d/dx.
pub fn l_deriv(a: &Laurent) -> Laurent {
    l_clean(a.iter().map(|(e, c)| (e - 1, c.clone() * Scalar::from_int(*e))).collect())
}

type LMatrix = Vec<Vec<Laurent>>;

fn lm_mul(a: &LMatrix, b: &LMatrix) -> LMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n).map(|i| (0..m).map(|j| (0..b.len()).fold(Laurent::new(), |acc, k| l_add(&acc, &l_mul(&a[i][k], &b[k][j])))).collect()).collect()
}

fn lm_trace(a: &LMatrix) -> Laurent {
    (0..a.len()).fold(Laurent::new(), |acc, i| l_add(&acc, &a[i][i]))
}

/// H¹(ℙ¹, Ω¹) decomposition of f·dx on U₀∩U₁: f = u₀ + r/x + u₁ with
/// u₀·dx regular on U₀ and u₁·dx regular on U₁.
#[derive(Clone, Debug, PartialEq)]
pub struct CechSplit {
    pub residue: Scalar,
    pub on_u0: Laurent,
    pub on_u1: Laurent,
}

pub fn cech_h1_omega(f: &Laurent) -> CechSplit {
    let mut s = CechSplit { residue: Scalar::zero(), on_u0: Laurent::new(), on_u1: Laurent::new() };
    for (&e, c) in f {
        match e {
            -1 => s.residue = c.clone(),
            e if e >= 0 => {
                s.on_u0.insert(e, c.clone());
            }
            _ => {
                s.on_u1.insert(e, c.clone());
            }
        }
    }
    s
}

impl CechSplit {
    /// u₁·dx = g(1/x)·d(1/x) with g a polynomial in 1/x, u₀ a polynomial in x,
    /// and the pieces sum back to f.
    pub fn verify(&self, f: &Laurent) -> bool {
        let g = l_neg(&l_mul(&self.on_u1, &l_mono(Scalar::one(), 2)));
        let back = l_add(&l_add(&self.on_u0, &self.on_u1), &l_mono(self.residue.clone(), -1));
        g.keys().all(|&e| e <= 0) && self.on_u0.keys().all(|&e| e >= 0) && back == l_clean(f.clone())
    }
}

/// A vector bundle on ℙ¹ by an upper triangular transition with monomial diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct P1Bundle {
    pub field: BaseRing,
    pub transition: LMatrix,
}

impl P1Bundle {
    pub fn new(field: BaseRing, transition: LMatrix) -> Result<Self> {
        let r = transition.len();
        if transition.iter().any(|row| row.len() != r) {
            return Err(Error::ShapeMismatch("transition must be square".into()));
        }
        let coerce = |a: &Laurent| -> Result<Laurent> {
            a.iter()
                .map(|(e, c)| field.coerce(c).map(|c| (*e, c)).ok_or_else(|| Error::Invalid("coefficient outside the field".into())))
                .collect::<Result<Laurent>>()
                .map(l_clean)
        };
        let transition: LMatrix = transition.iter().map(|row| row.iter().map(coerce).collect()).collect::<Result<_>>()?;
        for i in 0..r {
            if transition[i][i].len() != 1 {
                return Err(Error::Invalid("diagonal entries must be monomials".into()));
            }
            if (0..i).any(|j| !transition[i][j].is_empty()) {
                return Err(Error::Invalid("transition must be upper triangular".into()));
            }
        }
        Ok(P1Bundle { field, transition })
    }

    /// O(a), with f₀ = x^a·f₁.
    pub fn line(field: BaseRing, a: i64) -> Self {
        P1Bundle { field, transition: vec![vec![l_mono(Scalar::one(), a)]] }
    }

    pub fn rank(&self) -> usize {
        self.transition.len()
    }

    pub fn direct_sum(&self, o: &P1Bundle) -> P1Bundle {
        self.extension(o, &vec![vec![Laurent::new(); o.rank()]; self.rank()]).unwrap()
    }

    /// 0 → self → E → quot → 0 with transition [[g', off], [0, g'']].
    pub fn extension(&self, quot: &P1Bundle, off: &LMatrix) -> Result<P1Bundle> {
        let (a, b) = (self.rank(), quot.rank());
        if off.len() != a || off.iter().any(|r| r.len() != b) {
            return Err(Error::ShapeMismatch("off-diagonal block has the wrong shape".into()));
        }
        let mut g = vec![vec![Laurent::new(); a + b]; a + b];
        for i in 0..a {
            for j in 0..a {
                g[i][j] = self.transition[i][j].clone();
            }
            for j in 0..b {
                g[i][a + j] = off[i][j].clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                g[a + i][a + j] = quot.transition[i][j].clone();
            }
        }
        P1Bundle::new(self.field, g)
    }

    /// g⁻¹ by back substitution.
    pub fn inverse_transition(&self) -> LMatrix {
        let r = self.rank();
        let inv_diag: Vec<Laurent> = (0..r)
            .map(|i| {
                let (&e, c) = self.transition[i][i].iter().next().unwrap();
                l_mono(c.try_inv().expect("nonzero coefficient in a field"), -e)
            })
            .collect();
        let mut x = vec![vec![Laurent::new(); r]; r];
        for col in 0..r {
            for i in (0..r).rev() {
                let mut rhs = if i == col { l_mono(Scalar::one(), 0) } else { Laurent::new() };
                for k in i + 1..r {
                    rhs = l_add(&rhs, &l_neg(&l_mul(&self.transition[i][k], &x[k][col])));
                }
                x[i][col] = l_mul(&inv_diag[i], &rhs);
            }
        }
        x
    }

    /// The Čech cocycle dg·g⁻¹ of At, as the coefficient matrix of dx.
    pub fn atiyah_cocycle(&self) -> LMatrix {
        let dg: LMatrix = self.transition.iter().map(|row| row.iter().map(l_deriv).collect()).collect();
        lm_mul(&dg, &self.inverse_transition())
    }

    /// tr At ∈ H¹(Ω¹) as its Čech splitting.
    pub fn trace_class(&self) -> CechSplit {
        cech_h1_omega(&lm_trace(&self.atiyah_cocycle()))
    }

    /// Degree from d log det g (the determinant is the product of the diagonal).
    pub fn degree_from_determinant(&self) -> i64 {
        (0..self.rank()).map(|i| *self.transition[i][i].keys().next().unwrap()).sum()
    }

    /// tr(Atᶦ)/i! as a multiple of hᶦ (h the class of dx/x); zero past i = 1.
    pub fn chern_via_atiyah(&self, i: usize) -> Result<Scalar> {
        let inv = factorial_inverse(self.field, i)?;
        Ok(match i {
            0 => self.field.int(self.rank() as i64),
            1 => self.trace_class().residue * inv,
            _ => Scalar::zero(),
        })
    }

    /// The splitting-principle vector with roots a_k·h in ℚ[h]/(h²).
    pub fn chern_vector(&self) -> Result<ChernVector> {
        let ring = FormalRing::roots(&["h"], 1);
        let roots: Vec<MultiPoly> =
            (0..self.rank()).map(|i| ring.var(0).scale(&Scalar::from_int(*self.transition[i][i].keys().next().unwrap()))).collect();
        ChernVector::from_roots(ring, &roots)
    }

    /// Check that α₀ (on U₀, polynomial in x) glues: g⁻¹α₀g is polynomial in 1/x.
    pub fn is_global_endomorphism(&self, alpha0: &LMatrix) -> bool {
        if alpha0.iter().flatten().any(|a| a.keys().any(|&e| e < 0)) {
            return false;
        }
        let a1 = lm_mul(&lm_mul(&self.inverse_transition(), alpha0), &self.transition);
        a1.iter().flatten().all(|a| a.keys().all(|&e| e <= 0))
    }

    /// σ_i(α) = tr(Atᶦ/i!∘α) for a global endomorphism α: in H⁰(O) = k for
    /// i = 0 and H¹(Ω¹) = k·h for i = 1; zero beyond.
    pub fn semiregularity(&self, alpha0: &LMatrix, i: usize) -> Result<Scalar> {
        let inv = factorial_inverse(self.field, i)?;
        if !self.is_global_endomorphism(alpha0) {
            return Err(Error::Invalid("endomorphism does not glue across the charts".into()));
        }
        match i {
            0 => {
                let t = lm_trace(alpha0);
                if t.keys().any(|&e| e != 0) {
                    return Err(Error::Invalid("trace of a global endomorphism must be constant".into()));
                }
                Ok(t.get(&0).cloned().unwrap_or_else(Scalar::zero))
            }
            1 => Ok(cech_h1_omega(&lm_trace(&lm_mul(&self.atiyah_cocycle(), alpha0))).residue * inv),
            _ => Ok(Scalar::zero()),
        }
    }

    /// tr(π∘Δ₀∘At), with Δ₀ from the antisymmetrization on Ω¹ = k·dx.
    pub fn delta_trace(&self) -> Scalar {
        let w: Wedge = [(vec![0], Scalar::one())].into_iter().collect();
        let coeff = antisymmetrize(&w).get(&(vec![], 0)).cloned().unwrap_or_else(Scalar::zero);
        coeff * self.trace_class().residue
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ext::{ext_basis, ext_dim};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> BaseRing {
        BaseRing::Rationals
    }

    fn plane() -> Arc<GradedRing> {
        Arc::new(GradedRing::polynomial(q(), &["x", "y"]).unwrap())
    }

    #[test]
    fn skyscraper_on_the_line() {
        let r = Arc::new(GradedRing::polynomial(q(), &["x"]).unwrap());
        let at = atiyah_class(&r, &FinModule::residue_field(1)).unwrap();
        assert_eq!(ext_dim(&at.class.source, &at.class.target, 1).unwrap(), 1);
        assert!(!at.class.is_zero().unwrap());
        let gen = &ext_basis(&at.class.source, &at.class.target, 1).unwrap()[0];
        assert!(at.class.ratio(gen).unwrap().is_some());
    }

    #[test]
    fn free_module_over_artinian_ring_has_no_atiyah_class() {
        let x = MultiPoly::var(1, 0);
        let r = Arc::new(GradedRing::new(q(), vec!["x".into()], vec![1], vec![x.pow(3)]).unwrap());
        // B itself: basis 1, x, x²
        let a = Matrix::from_fn(3, 3, |i, j| if i == j + 1 { Scalar::one() } else { Scalar::zero() });
        let b = FinModule { dim: 3, actions: vec![a], degrees: Some(vec![0, 1, 2]) };
        let at = atiyah_class(&r, &b).unwrap();
        assert!(at.class.is_zero().unwrap());
        // the residue field is not free, and its class survives
        let k = atiyah_class(&r, &FinModule::residue_field(1)).unwrap();
        assert!(!k.class.is_zero().unwrap());
    }

    #[test]
    fn square_of_the_skyscraper_class() {
        let r = plane();
        let k = FinModule::residue_field(2);
        let at2 = atiyah_power(&r, &k, 2).unwrap();
        assert_eq!(at2.target.dim, 1);
        assert_eq!(ext_dim(&at2.source, &at2.target, 2).unwrap(), 1);
        assert!(!at2.is_zero().unwrap());
        assert!(atiyah_power(&r, &k, 3).unwrap().is_zero().unwrap());
        assert!(atiyah_power(&r, &k, 1).unwrap().equals(&atiyah_class(&r, &k).unwrap().class).unwrap());
    }

    #[test]
    fn powers_need_a_polynomial_ring() {
        let x = MultiPoly::var(1, 0);
        let r = Arc::new(GradedRing::new(q(), vec!["x".into()], vec![1], vec![x.pow(2)]).unwrap());
        assert!(matches!(atiyah_power(&r, &FinModule::residue_field(1), 2), Err(Error::Unsupported(_))));
    }

    /// Compose by hand: F₁(k) generator g is x_g·e and At sends it to dx_g, so the
    /// lift sends F₂ ∋ h with d h = Σ_g c·x_j·(gen g) to Σ c·(x_j e_g), whose κ value
    /// sits at index 2j + g of F₁(k²).
    fn hand_obstruction(res: &Resolution, kappa: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (g, p) in res.diffs[1][0].iter().enumerate() {
            for (e, c) in p.terms() {
                let j = e.iter().position(|&a| a == 1).unwrap();
                acc = acc + c.clone() * kappa[2 * j + g].clone();
            }
        }
        acc
    }

    #[test]
    fn koszul_obstruction_sample() {
        let r = plane();
        let k = FinModule::residue_field(2);
        let at = atiyah_class(&r, &k).unwrap().class;
        let om = at.target.clone();
        let kres = resolve(&r, &om, 3).unwrap();
        let kbasis = ext_basis(&kres, &Arc::new(FinModule::residue_field(2)), 1).unwrap();
        assert_eq!(kbasis.len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let cs: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
            let mut kappa = ExtClass::zero(kres.clone(), Arc::new(FinModule::residue_field(2)), 1).unwrap();
            for (c, b) in cs.iter().zip(&kbasis) {
                kappa = kappa.add(&b.scale(&Scalar::from_int(*c))).unwrap();
            }
            let ob = obstruction_class(&at, &kappa).unwrap();
            let values: Vec<Scalar> = kappa.cocycle.iter().map(|v| v[0].clone()).collect();
            assert_eq!(ob.cocycle, vec![vec![hand_obstruction(&ob.source, &values)]]);
        }
        // linearity in κ
        let a = obstruction_class(&at, &kbasis[0]).unwrap();
        let b = obstruction_class(&at, &kbasis[3]).unwrap();
        let sum = obstruction_class(&at, &kbasis[0].add(&kbasis[3]).unwrap().scale(&Scalar::from_int(2))).unwrap();
        assert!(sum.equals(&a.add(&b).unwrap().scale(&Scalar::from_int(2))).unwrap());
        // κ = 0 gives zero, and degrees are checked
        let zero = ExtClass::zero(kres.clone(), Arc::new(FinModule::residue_field(2)), 1).unwrap();
        assert!(obstruction_class(&at, &zero).unwrap().is_zero().unwrap());
        assert!(matches!(obstruction_class(&at.compose(&kbasis[0]).unwrap(), &kbasis[0]), Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn naturality_under_coordinate_changes() {
        let r = plane();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // k and the length-3 module k[x,y]/(x², y) with x acting nilpotently
        let nil = Matrix::from_fn(2, 2, |i, j| if i == 1 && j == 0 { Scalar::one() } else { Scalar::zero() });
        let m2 = FinModule { dim: 2, actions: vec![nil.clone(), Matrix::zeros(2, 2)], degrees: Some(vec![0, 1]) };
        for m in [FinModule::residue_field(2), m2] {
            for _ in 0..3 {
                let c = loop {
                    let v: Vec<i64> = (0..4).map(|_| rng.gen_range(-2..=2)).collect();
                    let c = Matrix::from_fn(2, 2, |i, j| Scalar::from_int(v[2 * i + j]));
                    if !c.determinant().is_zero() {
                        break c;
                    }
                };
                let (direct, pulled) = atiyah_naturality(&r, &m, &c).unwrap();
                assert!(direct.equals(&pulled).unwrap());
            }
        }
    }

    #[test]
    fn affine_traces() {
        let r = plane();
        let k = FinModule::residue_field(2);
        assert!(affine_trace(&r, &k, &Matrix::identity(1)).unwrap().is_zero());
        let at = atiyah_class(&r, &k).unwrap().class;
        let id = atiyah_power(&r, &k, 0).unwrap();
        let s0 = affine_semiregularity(&r, &k, &id, 0).unwrap();
        assert!(s0.vanishes);
        let e1 = &ext_basis(&at.source, &Arc::new(k.clone()), 1).unwrap()[0];
        let s1 = affine_semiregularity(&r, &k, e1, 1).unwrap();
        assert!(s1.vanishes && s1.cohomological_degree == 2);
        // At∘α itself is a nonzero Ext² class; only its trace vanishes
        assert!(!e1.compose(&atiyah_class(&r, &k).unwrap().class).unwrap().is_zero().unwrap());
        let f2 = Arc::new(GradedRing::polynomial(BaseRing::fp(2), &["x"]).unwrap());
        assert!(matches!(affine_semiregularity(&f2, &FinModule::residue_field(1), &id, 2), Err(Error::FactorialNotInvertible(2))));
    }

    #[test]
    fn line_bundles_on_p1() {
        for a in -2..=3 {
            let l = P1Bundle::line(q(), a);
            let cocycle = l.atiyah_cocycle();
            assert_eq!(cocycle[0][0], l_mono(Scalar::from_int(a), -1));
            let split = l.trace_class();
            assert!(split.verify(&lm_trace(&cocycle)));
            assert_eq!(l.chern_via_atiyah(1).unwrap(), Scalar::from_int(a));
            assert_eq!(Scalar::from_int(l.degree_from_determinant()), split.residue);
            let ch1 = l.chern_vector().unwrap().chern_character(1).unwrap();
            assert_eq!(ch1.coeff(&[1]), l.chern_via_atiyah(1).unwrap());
            assert_eq!(l.chern_via_atiyah(0).unwrap(), Scalar::one());
            assert!(l.chern_via_atiyah(2).unwrap().is_zero());
        }
        assert!(matches!(P1Bundle::line(BaseRing::fp(2), 1).chern_via_atiyah(2), Err(Error::FactorialNotInvertible(2))));
    }

    fn random_laurent(rng: &mut ChaCha8Rng) -> Laurent {
        l_clean((0..3).map(|_| (rng.gen_range(-3..=3), Scalar::from_int(rng.gen_range(-4..=4)))).collect())
    }

    #[test]
    fn additivity_on_extensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = P1Bundle::line(q(), rng.gen_range(-3..=3)).direct_sum(&P1Bundle::line(q(), rng.gen_range(-3..=3)));
            let b = P1Bundle::line(q(), rng.gen_range(-3..=3));
            let off = vec![vec![random_laurent(&mut rng)], vec![random_laurent(&mut rng)]];
            let e = a.extension(&b, &off).unwrap();
            let lhs = e.chern_via_atiyah(1).unwrap();
            assert_eq!(lhs, a.chern_via_atiyah(1).unwrap() + b.chern_via_atiyah(1).unwrap());
            assert_eq!(e.chern_via_atiyah(0).unwrap(), Scalar::from_int(3));
            let direct = e.chern_vector().unwrap().chern_character(1).unwrap();
            assert_eq!(direct.coeff(&[1]), lhs);
        }
    }

    #[test]
    fn semiregularity_on_p1() {
        let e = P1Bundle::line(q(), 2).direct_sum(&P1Bundle::line(q(), -1));
        let one = l_mono(Scalar::one(), 0);
        let id: LMatrix = vec![vec![one.clone(), Laurent::new()], vec![Laurent::new(), one.clone()]];
        assert_eq!(e.semiregularity(&id, 0).unwrap(), Scalar::from_int(2));
        assert_eq!(e.semiregularity(&id, 1).unwrap(), Scalar::from_int(1));
        // projection to the O(2) summand, and a map O(−1) → O(2) given by x³ + 1
        let p: LMatrix = vec![vec![one.clone(), Laurent::new()], vec![Laurent::new(), Laurent::new()]];
        assert_eq!(e.semiregularity(&p, 1).unwrap(), Scalar::from_int(2));
        let n: LMatrix = vec![vec![Laurent::new(), l_add(&l_mono(Scalar::one(), 3), &one)], vec![Laurent::new(), Laurent::new()]];
        assert!(e.is_global_endomorphism(&n));
        assert!(e.semiregularity(&n, 1).unwrap().is_zero());
        let bad: LMatrix = vec![vec![Laurent::new(), Laurent::new()], vec![l_mono(Scalar::one(), 0), Laurent::new()]];
        assert!(e.semiregularity(&bad, 1).is_err());
        // Δ₀ = −1 under the printed sign: tr(Δ∘At) = (−1)^1·1·tr(At)
        assert_eq!(e.delta_trace(), -e.chern_via_atiyah(1).unwrap());
    }
}
