//! Chern calculus in a truncated formal graded ring: Newton polynomials θ_i,
//! Chern characters, the Cartan convolution and the projective-bundle
//! relation that defines the classes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::poly::{MultiPoly, Poly};
use crate::exact::scalar::{factorial, BaseRing, Coeff, Scalar};

/// ℚ[a₁..a_s]/(degree > cap) with deg aⱼ = weightⱼ.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalRing {
    pub field: BaseRing,
    pub names: Vec<String>,
    pub weights: Vec<u32>,
    pub cap: u32,
}

impl FormalRing {
    /// Formal roots a₁..a_s of degree 1.
    pub fn roots(names: &[&str], cap: u32) -> Self {
        FormalRing { field: BaseRing::Rationals, names: names.iter().map(|s| s.to_string()).collect(), weights: vec![1; names.len()], cap }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn var(&self, i: usize) -> MultiPoly {
        Poly::var(self.nvars(), i)
    }

    pub fn constant(&self, c: i64) -> MultiPoly {
        MultiPoly::constant(self.nvars(), self.field.int(c))
    }

    /// Drop every term above the degree cap.
    pub fn truncate(&self, p: &MultiPoly) -> MultiPoly {
        Poly::from_terms(
            self.nvars(),
            p.terms()
                .filter(|(e, _)| e.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<u32>() <= self.cap)
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    pub fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        self.truncate(&(a * b))
    }

    pub fn parse(&self, s: &str) -> Result<MultiPoly> {
        let names: Vec<&str> = self.names.iter().map(|s| s.as_str()).collect();
        crate::exact::polyparse::parse_poly(s, &names, self.field)
    }

    pub fn format(&self, p: &MultiPoly) -> String {
        p.fmt_with(&self.names)
    }
}

/// θ₁..θ_d as polynomials in σ₁..σ_d, by the Newton recursion
/// p_i = σ₁p_{i−1} − σ₂p_{i−2} + ⋯ + (−1)^{i−2}σ_{i−1}p₁ + (−1)^{i−1}·i·σ_i.
pub fn newton_thetas(d: usize) -> Vec<MultiPoly> {
    let mut out: Vec<MultiPoly> = Vec::with_capacity(d);
    for i in 1..=d {
        let mut acc = MultiPoly::zero(d);
        for j in 1..i {
            let term = &MultiPoly::var(d, j - 1) * &out[i - j - 1];
            acc = if j % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        let last = MultiPoly::var(d, i - 1).scale(&Scalar::from_int(i as i64));
        acc = if i % 2 == 1 { &acc + &last } else { &acc - &last };
        out.push(acc);
    }
    out
}

/// θ_i alone, in variables σ₁..σ_i.
pub fn newton_theta(i: usize) -> MultiPoly {
    assert!(i >= 1, "θ_i needs i ≥ 1");
    let all = newton_thetas(i);
    all[i - 1].clone()
}

/// Names σ1..σd for printing.
pub fn sigma_names(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("s{i}")).collect()
}

/// A rank together with Chern classes c₁..c_d in a formal ring.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernVector {
    pub ring: FormalRing,
    pub rank: i64,
    /// c₁, c₂, … (c₀ = 1 is implicit)
    pub classes: Vec<MultiPoly>,
}

/// JSON form: {"rank": r, "classes": ["a+b", "a*b"], "vars": ["a","b"], "cap": 6}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChernJson {
    pub rank: i64,
    #[serde(default)]
    pub classes: Vec<String>,
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default)]
    pub cap: Option<u32>,
}

impl ChernVector {
    pub fn new(ring: FormalRing, rank: i64, classes: Vec<MultiPoly>) -> Result<Self> {
        for (i, c) in classes.iter().enumerate() {
            let d = (i + 1) as u32;
            let t = ring.truncate(c);
            if !t.is_zero() && (!t.is_homogeneous(&ring.weights) || t.weighted_degree(&ring.weights) != Some(d)) {
                return Err(Error::DegreeMismatch(format!("c{} must be homogeneous of degree {}", i + 1, d)));
            }
        }
        let classes = classes.iter().map(|c| ring.truncate(c)).collect();
        Ok(ChernVector { ring, rank, classes })
    }

    /// The vector of a direct sum of line bundles with the given first Chern classes.
    pub fn from_roots(ring: FormalRing, roots: &[MultiPoly]) -> Result<Self> {
        let mut c = vec![ring.constant(1)];
        for r in roots {
            let mut next = c.clone();
            next.push(MultiPoly::zero(ring.nvars()));
            for k in 1..next.len() {
                next[k] = &next[k] + &ring.mul(&c[k - 1], r);
            }
            c = next;
        }
        ChernVector::new(ring, roots.len() as i64, c[1..].to_vec())
    }

    pub fn trivial(ring: FormalRing, rank: i64) -> Self {
        ChernVector { ring, rank, classes: Vec::new() }
    }

    pub fn from_json(j: &ChernJson) -> Result<Self> {
        let names: Vec<&str> = j.vars.iter().map(|s| s.as_str()).collect();
        let ring = FormalRing::roots(&names, j.cap.unwrap_or(j.classes.len().max(1) as u32 * 2));
        let classes = j.classes.iter().map(|s| ring.parse(s)).collect::<Result<_>>()?;
        ChernVector::new(ring, j.rank, classes)
    }

    /// c_i, with c₀ = 1 and c_i = 0 past the stored list.
    pub fn c(&self, i: usize) -> MultiPoly {
        if i == 0 {
            self.ring.constant(1)
        } else {
            self.classes.get(i - 1).cloned().unwrap_or_else(|| MultiPoly::zero(self.ring.nvars()))
        }
    }

    /// ch_i = θ_i(c₁..c_i)/i!, ch₀ = rank.
    pub fn chern_character(&self, i: usize) -> Result<MultiPoly> {
        if i == 0 {
            return Ok(self.ring.constant(self.rank));
        }
        let inv = self.ring.field.bigint(&factorial(i as u64)).try_inv().ok_or(Error::FactorialNotInvertible(i as u32))?;
        let theta = newton_theta(i);
        let images: Vec<MultiPoly> = (1..=i).map(|k| self.c(k)).collect();
        Ok(self.ring.truncate(&theta.compose(&images)).scale(&inv))
    }

    /// Cartan convolution c(u⊕v) = c(u)·c(v).
    pub fn cartan_total(&self, o: &ChernVector) -> Result<ChernVector> {
        if self.ring != o.ring {
            return Err(Error::DegreeMismatch("Chern vectors live in different formal rings".into()));
        }
        let top = (self.classes.len() + o.classes.len()).min(self.ring.cap as usize);
        let mut classes = Vec::new();
        for k in 1..=top {
            let mut acc = MultiPoly::zero(self.ring.nvars());
            for j in 0..=k {
                acc = &acc + &self.ring.mul(&self.c(j), &o.c(k - j));
            }
            classes.push(acc);
        }
        while classes.last().is_some_and(|c| c.is_zero()) {
            classes.pop();
        }
        Ok(ChernVector { ring: self.ring.clone(), rank: self.rank + o.rank, classes })
    }

    /// Apply a ring map given by images of the formal generators.
    pub fn substitute(&self, target: FormalRing, images: &[MultiPoly]) -> Result<ChernVector> {
        let classes = self.classes.iter().map(|c| target.truncate(&c.compose(images))).collect();
        ChernVector::new(target, self.rank, classes)
    }
}

/// ch(u⊕v) = ch(u) + ch(v) for all degrees up to d.
pub fn whitney_additivity_check(u: &ChernVector, v: &ChernVector, d: usize) -> Result<bool> {
    let s = u.cartan_total(v)?;
    for i in 0..=d {
        let lhs = s.chern_character(i)?;
        let rhs = &u.chern_character(i)? + &v.chern_character(i)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The free module on 1, t, …, t^{r−1} with t^r + Σ c_i t^{r−i} = 0, and the
/// classes read back from it.
#[derive(Clone, Debug)]
pub struct ProjectiveBundle {
    /// matrix of multiplication by t: column j is t·t^j
    pub t_action: Vec<Vec<MultiPoly>>,
    /// classes recovered from the image of −t^r
    pub from_relation: Vec<MultiPoly>,
    /// classes recovered from det(T − t)
    pub from_charpoly: Vec<MultiPoly>,
}

pub fn projective_bundle_chern(v: &ChernVector) -> Result<ProjectiveBundle> {
    let r = usize::try_from(v.rank).map_err(|_| Error::Invalid("negative rank".into()))?;
    let n = v.ring.nvars();
    let zero = MultiPoly::zero(n);
    let mut t = vec![vec![zero.clone(); r]; r];
    for j in 0..r {
        if j + 1 < r {
            t[j + 1][j] = v.ring.constant(1);
        } else {
            for (k, row) in t.iter_mut().enumerate() {
                row[j] = -&v.c(r - k);
            }
        }
    }
    // −t^r from repeated multiplication, starting at 1
    let mut vec_t = vec![zero.clone(); r];
    if r > 0 {
        vec_t[0] = v.ring.constant(1);
    }
    for _ in 0..r {
        let mut next = vec![zero.clone(); r];
        for (i, nx) in next.iter_mut().enumerate() {
            for (j, x) in vec_t.iter().enumerate() {
                *nx = &*nx + &v.ring.mul(&t[i][j], x);
            }
        }
        vec_t = next;
    }
    // −t^r = Σ c_i t^{r−i}: c_i is the (r−i)-th component of −t^r
    let from_relation = (1..=r).map(|i| -&vec_t[r - i]).collect();
    // det(T·I − M_t) = T^r + c₁T^{r−1} + ⋯ + c_r, with T an extra variable
    let big = n + 1;
    let pos: Vec<usize> = (0..n).collect();
    let tvar = MultiPoly::var(big, n);
    let m: Vec<Vec<MultiPoly>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let e = -&t[i][j].reindex(big, &pos);
                    if i == j {
                        &e + &tvar
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let det = poly_det(&m, big);
    let mut from_charpoly = Vec::new();
    for i in 1..=r {
        // coefficient of T^{r−i}
        let mut c = MultiPoly::zero(n);
        for (e, x) in det.terms() {
            if e[n] as usize == r - i {
                c.add_term(e[..n].to_vec(), x.clone());
            }
        }
        from_charpoly.push(v.ring.truncate(&c));
    }
    Ok(ProjectiveBundle { t_action: t, from_relation, from_charpoly })
}

/// Leibniz determinant of a small polynomial matrix.
pub fn poly_det(m: &[Vec<MultiPoly>], nvars: usize) -> MultiPoly {
    let r = m.len();
    if r == 0 {
        return MultiPoly::one(nvars);
    }
    let mut acc = MultiPoly::zero(nvars);
    let mut perm: Vec<usize> = (0..r).collect();
    permute(&mut perm, 0, &mut |p, sign| {
        let mut t = MultiPoly::constant(nvars, Scalar::from_int(sign));
        for (i, &j) in p.iter().enumerate() {
            if m[i][j].is_zero() {
                return;
            }
            t = &t * &m[i][j];
        }
        acc = &acc + &t;
    });
    acc
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize], i64)) {
    if k == p.len() {
        let mut sign = 1;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    sign = -sign;
                }
            }
        }
        f(p, sign);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Power sums of n formal roots expressed in elementary symmetric polynomials,
/// by repeated leading-term elimination; independent of the Newton recursion.
pub fn power_sum_in_elementary(i: usize, n: usize) -> MultiPoly {
    let mut target = MultiPoly::zero(n);
    for k in 0..n {
        target = &target + &MultiPoly::var(n, k).pow(i as u32);
    }
    // e_j in the roots
    let mut e = vec![MultiPoly::one(n)];
    for j in 1..=n {
        let mut acc = MultiPoly::zero(n);
        for subset in subsets(n, j) {
            let mut m = vec![0; n];
            for s in subset {
                m[s] = 1;
            }
            acc.add_term(m, Scalar::one());
        }
        e.push(acc);
    }
    let mut out: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
    let lex = crate::exact::poly::MonomialOrder::Lex;
    while let Some((lead, c)) = target.leading(lex).map(|(m, c)| (m.clone(), c.clone())) {
        // leading monomial x^λ with λ decreasing ↦ e_1^{λ1−λ2} ⋯ e_n^{λn}
        let mut ex = vec![0u32; n];
        for j in 0..n {
            let next = if j + 1 < n { lead[j + 1] } else { 0 };
            ex[j] = lead[j] - next;
        }
        let mut prod = MultiPoly::constant(n, c.clone());
        for (j, &a) in ex.iter().enumerate() {
            prod = &prod * &e[j + 1].pow(a);
        }
        target = &target - &prod;
        let entry = out.entry(ex).or_insert_with(Scalar::zero);
        *entry = entry.clone() + c;
    }
    MultiPoly::from_terms(n, out)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(p: &MultiPoly) -> String {
        p.fmt_with(&sigma_names(p.nvars()))
    }

    #[test]
    fn small_thetas() {
        assert_eq!(show(&newton_theta(1)), "s1");
        assert_eq!(show(&newton_theta(2)), "s1^2 - 2*s2");
        assert_eq!(show(&newton_theta(3)), "s1^3 - 3*s1*s2 + 3*s3");
    }

    #[test]
    fn newton_matches_elementary_elimination() {
        for i in 1..=6 {
            assert_eq!(newton_theta(i), power_sum_in_elementary(i, i));
        }
    }

    #[test]
    fn line_bundle_and_sum() {
        let ring = FormalRing::roots(&["a", "b"], 6);
        let (a, b) = (ring.var(0), ring.var(1));
        let l = ChernVector::from_roots(ring.clone(), std::slice::from_ref(&a)).unwrap();
        let ch3 = l.chern_character(3).unwrap();
        assert_eq!(ch3, a.pow(3).scale(&Scalar::rational(1, 6)));
        let s = ChernVector::from_roots(ring.clone(), &[a.clone(), b.clone()]).unwrap();
        let ch2 = s.chern_character(2).unwrap();
        assert_eq!(ch2, (&a.pow(2) + &b.pow(2)).scale(&Scalar::rational(1, 2)));
        let t = ChernVector::trivial(ring, 4);
        assert_eq!(t.chern_character(0).unwrap(), MultiPoly::constant(2, Scalar::from_int(4)));
        assert!(t.chern_character(2).unwrap().is_zero());
    }

    #[test]
    fn cartan_of_line_bundles() {
        let ring = FormalRing::roots(&["a", "b"], 4);
        let (a, b) = (ring.var(0), ring.var(1));
        let la = ChernVector::from_roots(ring.clone(), std::slice::from_ref(&a)).unwrap();
        let lb = ChernVector::from_roots(ring.clone(), std::slice::from_ref(&b)).unwrap();
        let s = la.cartan_total(&lb).unwrap();
        assert_eq!(s.classes, vec![&a + &b, &a * &b]);
        assert!(whitney_additivity_check(&la, &lb, 4).unwrap());
    }

    #[test]
    fn projective_bundle_roundtrip() {
        let ring = FormalRing::roots(&["a", "b", "c"], 6);
        let roots = [ring.var(0), ring.var(1), ring.var(2)];
        let v = ChernVector::from_roots(ring.clone(), &roots).unwrap();
        let pb = projective_bundle_chern(&v).unwrap();
        assert_eq!(pb.from_relation, v.classes);
        assert_eq!(pb.from_charpoly, v.classes);
        // rank one: t + c₁ = 0
        let l = ChernVector::from_roots(ring.clone(), &[ring.var(0)]).unwrap();
        let pb = projective_bundle_chern(&l).unwrap();
        assert_eq!(pb.t_action[0][0], -&ring.var(0));
    }

    #[test]
    fn factorial_must_be_invertible() {
        let mut ring = FormalRing::roots(&["a"], 4);
        ring.field = BaseRing::fp(3);
        let l = ChernVector::from_roots(ring.clone(), &[ring.var(0)]).unwrap();
        assert_eq!(l.chern_character(3).unwrap_err(), Error::FactorialNotInvertible(3));
        assert!(l.chern_character(2).is_ok());
    }
}
