//! Graded sign bookkeeping: Koszul signs of permutations of tensor factors,
//! the cyclic sums Σ^{±,n}, the antisymmetrization Δ_{i−1} and the β map that
//! splits forms on a product of affine spaces.
//!
//! A permutation σ moves the factor in position j to position σ(j).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::scalar::{Coeff, Scalar};

/// A permutation of tensor factors together with their degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedSignature {
    /// perm[j] is the new position of factor j (0-based)
    pub perm: Vec<usize>,
    pub degrees: Vec<i64>,
}

impl GradedSignature {
    pub fn new(perm: Vec<usize>, degrees: Vec<i64>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::Invalid("not a permutation".into()));
            }
            seen[p] = true;
        }
        if degrees.len() != n {
            return Err(Error::ShapeMismatch("one degree per factor".into()));
        }
        Ok(GradedSignature { perm, degrees })
    }

    /// Degrees shifted by one, as for X[1].
    pub fn shifted(&self) -> Self {
        GradedSignature { perm: self.perm.clone(), degrees: self.degrees.iter().map(|d| d + 1).collect() }
    }
}

fn parity(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the permutation.
pub fn sgn(perm: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}

/// Koszul sign: the product over inverted pairs of (−1)^{deg·deg}.
pub fn koszul_sign(sig: &GradedSignature) -> i64 {
    let (p, d) = (&sig.perm, &sig.degrees);
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s *= parity(d[i] * d[j]);
            }
        }
    }
    s
}

/// The same sign by moving strands one adjacent swap at a time.
pub fn strand_sign(sig: &GradedSignature) -> i64 {
    // current arrangement: targets and degrees of the factors left to right
    let mut targets = sig.perm.clone();
    let mut degs = sig.degrees.clone();
    let mut s = 1;
    let mut swapped = true;
    while swapped {
        swapped = false;
        for k in 0..targets.len().saturating_sub(1) {
            if targets[k] > targets[k + 1] {
                s *= parity(degs[k] * degs[k + 1]);
                targets.swap(k, k + 1);
                degs.swap(k, k + 1);
                swapped = true;
            }
        }
    }
    s
}

/// Sign of the identification X^{⊗n}[n] ≅ (X[1])^{⊗n} on factors of the given
/// degrees: the j-th suspension passes the first j−1 factors.
pub fn suspension_sign(degrees: &[i64]) -> i64 {
    let n = degrees.len() as i64;
    parity(degrees.iter().enumerate().map(|(i, d)| d * (n - 1 - i as i64)).sum())
}

/// Check of the square relating σ(X)[n] and sgn(σ)·σ(X[1]) through the
/// suspension identifications.
pub fn shift_square_commutes(sig: &GradedSignature) -> bool {
    let n = sig.perm.len();
    let mut permuted = vec![0; n];
    for (j, &p) in sig.perm.iter().enumerate() {
        permuted[p] = sig.degrees[j];
    }
    let top = koszul_sign(sig) * suspension_sign(&permuted);
    let bottom = suspension_sign(&sig.degrees) * sgn(&sig.perm) * koszul_sign(&sig.shifted());
    top == bottom
}

/// σ^{i,n}: the factor in position i (1-based) moves to the end.
pub fn sigma_in(i: usize, n: usize) -> Vec<usize> {
    (1..=n)
        .map(|j| {
            if j < i {
                j - 1
            } else if j == i {
                n - 1
            } else {
                j - 2
            }
        })
        .collect()
}

/// Which of the two cyclic sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SigmaKind {
    Plus,
    Minus,
}

/// Σ^{+,n} = Σ σ^{i,n} and Σ^{−,n} = Σ (−1)^{n−i} σ^{i,n}, as signed permutations.
pub fn sigma_sum(kind: SigmaKind, n: usize) -> Vec<(Vec<usize>, i64)> {
    (1..=n)
        .map(|i| {
            let c = match kind {
                SigmaKind::Plus => 1,
                SigmaKind::Minus => parity((n - i) as i64),
            };
            (sigma_in(i, n), c)
        })
        .collect()
}

/// An element of M^{⊗n} for free M: words in basis indices.
pub type Tensor = BTreeMap<Vec<usize>, Scalar>;

fn add_to(t: &mut Tensor, k: Vec<usize>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let e = t.entry(k.clone()).or_insert_with(Scalar::zero);
    *e = e.clone() + c;
    if e.is_zero() {
        t.remove(&k);
    }
}

/// σ acting on a tensor whose factors all have degree `degree`, with Koszul signs.
pub fn act(perm: &[usize], degree: i64, t: &Tensor) -> Tensor {
    let sign = koszul_sign(&GradedSignature { perm: perm.to_vec(), degrees: vec![degree; perm.len()] });
    let mut out = Tensor::new();
    for (w, c) in t {
        let mut nw = vec![0; w.len()];
        for (j, &p) in perm.iter().enumerate() {
            nw[p] = w[j];
        }
        add_to(&mut out, nw, c.clone() * Scalar::from_int(sign));
    }
    out
}

/// A signed sum of permutations applied to a tensor.
pub fn act_sum(sum: &[(Vec<usize>, i64)], degree: i64, t: &Tensor) -> Tensor {
    let mut out = Tensor::new();
    for (p, c) in sum {
        for (w, x) in act(p, degree, t) {
            add_to(&mut out, w, x * Scalar::from_int(*c));
        }
    }
    out
}

/// An element of Λ^i M: sorted index sets.
pub type Wedge = BTreeMap<Vec<usize>, Scalar>;

/// An element of Λ^{i−1} M ⊗ M: (sorted index set, index).
pub type WedgeTensor = BTreeMap<(Vec<usize>, usize), Scalar>;

/// Sort a word, returning the sign, or None on a repeated index.
pub fn sort_word(w: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = w.to_vec();
    let mut s = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                s = -s;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    Some((v, s))
}

/// Δ_{i−1}(m₁∧⋯∧mᵢ) = Σ_k (−1)^k m₁∧⋯m̂_k⋯∧mᵢ ⊗ m_k, k counted from 1.
pub fn antisymmetrize(w: &Wedge) -> WedgeTensor {
    let mut out = WedgeTensor::new();
    for (s, c) in w {
        for k in 0..s.len() {
            let mut rest = s.clone();
            let m = rest.remove(k);
            let sign = parity(k as i64 + 1);
            let key = (rest, m);
            let v = out.remove(&key).unwrap_or_else(Scalar::zero) + c.clone() * Scalar::from_int(sign);
            if !v.is_zero() {
                out.insert(key, v);
            }
        }
    }
    out
}

/// M^{⊗i} → Λ^i M.
pub fn wedge_projection(t: &Tensor) -> Wedge {
    let mut out = Wedge::new();
    for (w, c) in t {
        if let Some((s, sign)) = sort_word(w) {
            let v = out.remove(&s).unwrap_or_else(Scalar::zero) + c.clone() * Scalar::from_int(sign);
            if !v.is_zero() {
                out.insert(s, v);
            }
        }
    }
    out
}

/// M^{⊗i} → Λ^{i−1}M ⊗ M, wedging the first i−1 factors.
pub fn split_projection(t: &Tensor) -> WedgeTensor {
    let mut out = WedgeTensor::new();
    for (w, c) in t {
        let (head, last) = w.split_at(w.len() - 1);
        if let Some((s, sign)) = sort_word(head) {
            let key = (s, last[0]);
            let v = out.remove(&key).unwrap_or_else(Scalar::zero) + c.clone() * Scalar::from_int(sign);
            if !v.is_zero() {
                out.insert(key, v);
            }
        }
    }
    out
}

/// The sign ε with Δ_{i−1}∘π = ε·π'∘Σ^{−,i} on every basis word of M^{⊗i},
/// rank M = `rank`, or None if no single sign works.
pub fn delta_sigma_sign(rank: usize, i: usize) -> Option<i64> {
    let minus = sigma_sum(SigmaKind::Minus, i);
    let mut fits = [true, true];
    for word in words(rank, i) {
        let t: Tensor = [(word, Scalar::one())].into_iter().collect();
        let lhs = antisymmetrize(&wedge_projection(&t));
        let rhs = split_projection(&act_sum(&minus, 0, &t));
        for (slot, e) in [1i64, -1].into_iter().enumerate() {
            let scaled: WedgeTensor = rhs.iter().map(|(k, v)| (k.clone(), v.clone() * Scalar::from_int(e))).collect();
            fits[slot] &= scaled == lhs;
        }
    }
    match fits {
        [true, false] => Some(1),
        [false, true] => Some(-1),
        // both sides vanish identically
        [true, true] => Some(1),
        _ => None,
    }
}

/// The scalar c with wedge∘Δ_{i−1} = c·id on Λ^i of a rank-`rank` free
/// module, or None if it is not a scalar.
pub fn delta_wedge_factor(rank: usize, i: usize) -> Option<i64> {
    let mut found: Option<i64> = None;
    for (s, _) in words(rank, i).into_iter().filter_map(|w| sort_word(&w)).filter(|(s, sign)| *sign == 1 && s.len() == i) {
        let w: Wedge = [(s.clone(), Scalar::one())].into_iter().collect();
        let mut back = Wedge::new();
        for ((rest, m), c) in antisymmetrize(&w) {
            let mut word = rest;
            word.push(m);
            if let Some((t, sign)) = sort_word(&word) {
                let v = back.remove(&t).unwrap_or_else(Scalar::zero) + c * Scalar::from_int(sign);
                if !v.is_zero() {
                    back.insert(t, v);
                }
            }
        }
        let c = match back.len() {
            0 => 0,
            1 if back.contains_key(&s) => (-(i as i64)..=i as i64).find(|&k| Scalar::from_int(k) == back[&s])?,
            _ => return None,
        };
        if found.is_some_and(|f| f != c) {
            return None;
        }
        found = Some(c);
    }
    found
}

/// All words of length n in {0..rank}.
pub fn words(rank: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..rank).map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    w2
                })
            })
            .collect();
    }
    out
}

/// Σ^{−,n} on degree-0 factors equals Σ^{+,n} on degree-1 factors, checked on
/// every basis word of a rank-`rank` module.
pub fn shift_relation_holds(rank: usize, n: usize) -> bool {
    let minus = sigma_sum(SigmaKind::Minus, n);
    let plus = sigma_sum(SigmaKind::Plus, n);
    words(rank, n).into_iter().all(|w| {
        let t: Tensor = [(w, Scalar::one())].into_iter().collect();
        act_sum(&minus, 0, &t) == act_sum(&plus, 1, &t)
    }) && (1..=n).all(|i| sgn(&sigma_in(i, n)) == parity((n - i) as i64))
}

/// A monomial form x^a dx_V ⊗ dx_ℓ on C = k[x₁..x_{n+m}].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FormTensorTerm {
    pub exps: Vec<u32>,
    /// sorted indices of the wedge factors
    pub wedge: Vec<usize>,
    pub last: usize,
}

/// (x^{a_A} dx_V) ⊗ (x^{a_B} dx_ℓ) with A-variables 0..n and B-variables n..n+m.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SplitTerm {
    pub a_exps: Vec<u32>,
    pub wedge: Vec<usize>,
    pub b_exps: Vec<u32>,
    /// index among the B-variables
    pub last: usize,
}

/// β: keep the terms whose wedge factors are all A-variables and whose last
/// factor is a B-variable, splitting the monomial; kill everything else.
pub fn beta_split(n: usize, terms: &BTreeMap<FormTensorTerm, Scalar>) -> BTreeMap<SplitTerm, Scalar> {
    let mut out = BTreeMap::new();
    for (t, c) in terms {
        if t.wedge.iter().any(|&v| v >= n) || t.last < n || c.is_zero() {
            continue;
        }
        let key = SplitTerm { a_exps: t.exps[..n].to_vec(), wedge: t.wedge.clone(), b_exps: t.exps[n..].to_vec(), last: t.last - n };
        let v: Scalar = out.remove(&key).unwrap_or_else(Scalar::zero) + c.clone();
        if !v.is_zero() {
            out.insert(key, v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..n {
                let mut q: Vec<usize> = p.iter().map(|&x| if x >= pos { x + 1 } else { x }).collect();
                q.push(pos);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn small_signs() {
        let id = GradedSignature::new(vec![0, 1, 2], vec![1, 1, 1]).unwrap();
        assert_eq!(koszul_sign(&id), 1);
        let swap = GradedSignature::new(vec![1, 0], vec![1, 1]).unwrap();
        assert_eq!(koszul_sign(&swap), -1);
        assert_eq!(koszul_sign(&GradedSignature::new(vec![1, 0], vec![2, 1]).unwrap()), 1);
        assert!(GradedSignature::new(vec![0, 0], vec![0, 0]).is_err());
    }

    #[test]
    fn degree_one_sign_is_sgn() {
        for p in perms(4) {
            let s = GradedSignature::new(p.clone(), vec![1; 4]).unwrap();
            assert_eq!(koszul_sign(&s), sgn(&p));
            assert_eq!(strand_sign(&s), sgn(&p));
        }
    }

    #[test]
    fn koszul_multiplicative() {
        // sign(τ∘σ, d) = sign(σ, d)·sign(τ, σ·d)
        let d = vec![1, 0, 2, 1];
        for s in perms(4) {
            for t in perms(4) {
                let comp: Vec<usize> = s.iter().map(|&j| t[j]).collect();
                let mut moved = vec![0; 4];
                for (j, &p) in s.iter().enumerate() {
                    moved[p] = d[j];
                }
                let lhs = koszul_sign(&GradedSignature { perm: comp, degrees: d.clone() });
                let rhs = koszul_sign(&GradedSignature { perm: s.clone(), degrees: d.clone() })
                    * koszul_sign(&GradedSignature { perm: t.clone(), degrees: moved });
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn delta_examples() {
        let one: Wedge = [(vec![0], Scalar::one())].into_iter().collect();
        let d0 = antisymmetrize(&one);
        assert_eq!(d0.get(&(vec![], 0)), Some(&Scalar::from_int(-1)));
        let two: Wedge = [(vec![0, 1], Scalar::one())].into_iter().collect();
        let d1 = antisymmetrize(&two);
        assert_eq!(d1.get(&(vec![1], 0)), Some(&Scalar::from_int(-1)));
        assert_eq!(d1.get(&(vec![0], 1)), Some(&Scalar::from_int(1)));
    }

    #[test]
    fn delta_against_sigma_minus() {
        // the printed sign convention differs from Σ⁻ by the global (−1)^i
        for rank in 1..=3 {
            for i in 1..=rank.max(2) {
                assert_eq!(delta_sigma_sign(rank, i), Some(parity(i as i64)), "rank {rank}, i {i}");
            }
        }
        assert_eq!(delta_sigma_sign(4, 4), Some(1));
    }

    #[test]
    fn sigma_shift() {
        for n in 1..=4 {
            assert!(shift_relation_holds(2, n));
        }
        assert_eq!(sigma_in(2, 4), vec![0, 3, 1, 2]);
    }

    #[test]
    fn beta_examples() {
        let term = |e: Vec<u32>, w: Vec<usize>, l: usize| {
            [(FormTensorTerm { exps: e, wedge: w, last: l }, Scalar::one())].into_iter().collect::<BTreeMap<_, _>>()
        };
        let r = beta_split(2, &term(vec![1, 1, 0], vec![0], 2));
        let (k, _) = r.iter().next().unwrap();
        assert_eq!((k.a_exps.clone(), k.b_exps.clone(), k.last), (vec![1, 1], vec![0], 0));
        let r = beta_split(2, &term(vec![1, 0, 1], vec![0], 2));
        let (k, _) = r.iter().next().unwrap();
        assert_eq!((k.a_exps.clone(), k.b_exps.clone()), (vec![1, 0], vec![1]));
        assert!(beta_split(2, &term(vec![0, 0, 0], vec![2], 2)).is_empty());
        assert!(beta_split(2, &term(vec![0, 0, 0], vec![0], 1)).is_empty());
    }

    #[test]
    fn wedge_after_delta() {
        for rank in 1..=4 {
            for i in 1..=rank {
                assert_eq!(delta_wedge_factor(rank, i), Some(parity(i as i64) * i as i64));
            }
        }
    }
}
