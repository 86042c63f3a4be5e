//! Griffiths–Dwork reduction for pencils of smooth projective hypersurfaces
//! over ℚ[t]/(tᵐ): Jacobian-ring bases, pole-order reduction, the
//! Gauss–Manin connection, Picard–Fuchs operators, horizontal lifts and
//! Bloch's obstruction.
//!
//! A class of primitive middle cohomology of X_t ⊂ ℙⁿ is Σ_k P_k·Ω₀/f^k with
//! deg P_k = k·d − n − 1. Reduced classes have every P_k in the span of
//! standard monomials of the Jacobian ideal of f at t = 0; pure pole order k
//! lies in F^{n−k}.

pub mod obstruction;
pub mod picard_fuchs;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::groebner::{weighted_monomials, Ideal};
use crate::exact::matrix::Matrix;
use crate::exact::poly::{Mono, MonomialOrder, MultiPoly};
use crate::exact::polyparse::parse_poly;
use crate::exact::scalar::{BaseRing, Coeff, Scalar};

pub use obstruction::{bloch_obstruction, hodge_type_check, ObstructionReport};
pub use picard_fuchs::{picard_fuchs, PicardFuchs, PolyOperator};

/// Decomposition of each monomial of one degree at t = 0:
/// μ = Σ_j a_j·∂_j f₀ + r with r in the standard span.
#[derive(Debug)]
struct Reducer {
    index: BTreeMap<Mono, usize>,
    jacobian: Vec<Vec<MultiPoly>>,
    standard: Vec<Vec<(usize, Scalar)>>,
    std_monos: Vec<Mono>,
}

/// f(t, x₀..xₙ) homogeneous of degree d in x, worked modulo t^order.
#[derive(Debug)]
pub struct HypersurfaceFamily {
    pub n: usize,
    pub degree: u32,
    /// "t" followed by the n+1 projective coordinates
    pub names: Vec<String>,
    pub f: MultiPoly,
    pub order: usize,
    f0: MultiPoly,
    /// ∂f/∂x_j in all variables
    dfx: Vec<MultiPoly>,
    /// ∂f/∂t
    dft: MultiPoly,
    jacobian: Ideal<Scalar>,
    /// (pole order, standard monomial) for each basis class
    pub basis: Vec<(usize, Mono)>,
    /// exponent N with x_j^N ∈ J(f₀) for all j
    pub certificate: u32,
    reducers: Mutex<BTreeMap<u32, Arc<Reducer>>>,
}

/// {"ambient_dim": 3, "degree": 4, "f": "...", "trunc_order": 3, "vars": [...]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyJson {
    pub ambient_dim: usize,
    pub degree: u32,
    pub f: String,
    pub trunc_order: usize,
    #[serde(default)]
    pub vars: Vec<String>,
}

/// A reduced class: coefficient series per basis element, plus an optional
/// formal algebraic part c(t)·hʲ with ∇hʲ = 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CohomologyClass {
    pub order: usize,
    /// coeffs[b][s] is the coefficient of t^s on basis class b
    pub coeffs: Vec<Vec<Scalar>>,
    pub algebraic: Option<(usize, Vec<Scalar>)>,
}

/// An unreduced representative Σ_k P_k·Ω₀/f^k, P_k in (t, x).
#[derive(Clone, Debug, PartialEq)]
pub struct Representative {
    pub terms: BTreeMap<usize, MultiPoly>,
}

/// Pieces removed during reduction: at pole order k, P_k = Σ_j A_j·∂_j f + R_k.
#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub steps: BTreeMap<usize, Vec<MultiPoly>>,
}

fn default_names(n: usize) -> Vec<String> {
    let mut v = vec!["t".to_string()];
    match n {
        1 => v.extend(["x", "y"].map(String::from)),
        2 => v.extend(["x", "y", "z"].map(String::from)),
        3 => v.extend(["x", "y", "z", "w"].map(String::from)),
        _ => v.extend((0..=n).map(|i| format!("x{i}"))),
    }
    v
}

fn series_zero(m: usize) -> Vec<Scalar> {
    vec![Scalar::zero(); m]
}

impl HypersurfaceFamily {
    /// Build from a polynomial string in t and the default coordinates.
    pub fn parse(n: usize, degree: u32, f: &str, order: usize) -> Result<Self> {
        Self::parse_with(n, degree, f, order, default_names(n))
    }

    pub fn parse_with(n: usize, degree: u32, f: &str, order: usize, names: Vec<String>) -> Result<Self> {
        if names.len() != n + 2 {
            return Err(Error::Invalid(format!("expected t and {} coordinates", n + 1)));
        }
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let f = parse_poly(f, &refs, BaseRing::Rationals)?;
        Self::new(n, degree, names, f, order)
    }

    pub fn from_json(j: &FamilyJson) -> Result<Self> {
        let names = if j.vars.is_empty() { default_names(j.ambient_dim) } else { j.vars.clone() };
        Self::parse_with(j.ambient_dim, j.degree, &j.f, j.trunc_order, names)
    }

    pub fn new(n: usize, degree: u32, names: Vec<String>, f: MultiPoly, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::TruncationTooSmall("order must be at least 1".into()));
        }
        if degree < 2 || f.nvars() != n + 2 {
            return Err(Error::Invalid("need degree ≥ 2 and a polynomial in t and n+1 coordinates".into()));
        }
        let mut xw = vec![0u32];
        xw.extend(std::iter::repeat_n(1, n + 1));
        if !f.is_homogeneous(&xw) || f.weighted_degree(&xw).is_some_and(|d| d != degree) {
            return Err(Error::GradingMismatch(format!("f is not homogeneous of degree {degree} in the coordinates")));
        }
        let f = truncate(&f, order);
        let f0 = MultiPoly::from_terms(n + 1, f.terms().filter(|(e, _)| e[0] == 0).map(|(e, c)| (e[1..].to_vec(), c.clone())));
        let jac0: Vec<MultiPoly> = (0..=n).map(|j| f0.derivative(j)).collect();
        let jacobian = Ideal::computed(n + 1, jac0, MonomialOrder::Grevlex)?;
        let certificate = (n as u32 + 1) * (degree - 2) + 1;
        for j in 0..=n {
            let mut e = vec![0; n + 1];
            e[j] = certificate;
            if !jacobian.normal_form(&MultiPoly::monomial(e, Scalar::one()))?.is_zero() {
                return Err(Error::NotSmooth(format!("x{j}^{certificate} is not in the Jacobian ideal at t = 0")));
            }
        }
        let ones = vec![1u32; n + 1];
        let mut basis = Vec::new();
        for k in 1..=n {
            let Some(dk) = numerator_degree(k, degree, n) else { continue };
            for m in jacobian.standard_monomials(&ones, dk)? {
                basis.push((k, m));
            }
        }
        let dfx = (1..=n + 1).map(|j| f.derivative(j)).collect();
        let dft = f.derivative(0);
        Ok(HypersurfaceFamily {
            n,
            degree,
            names,
            f,
            order,
            f0,
            dfx,
            dft,
            jacobian,
            basis,
            certificate,
            reducers: Mutex::new(BTreeMap::new()),
        })
    }

    /// The same pencil at another truncation order.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        HypersurfaceFamily::new(self.n, self.degree, self.names.clone(), self.f.clone(), order)
    }

    pub fn nvars(&self) -> usize {
        self.n + 2
    }

    /// Graded dimensions of the Jacobian ring of f₀ up to its socle degree.
    pub fn jacobian_dims(&self) -> Result<Vec<usize>> {
        let ones = vec![1u32; self.n + 1];
        let top = (self.n as u32 + 1) * (self.degree - 2);
        (0..=top).map(|d| Ok(self.jacobian.standard_monomials(&ones, d)?.len())).collect()
    }

    /// Standard monomials of one degree.
    pub fn jacobian_basis(&self, d: u32) -> Result<Vec<Mono>> {
        self.jacobian.standard_monomials(&vec![1; self.n + 1], d)
    }

    /// Number of basis classes at each pole order 1..=n.
    pub fn pole_dims(&self) -> Vec<usize> {
        (1..=self.n).map(|k| self.basis.iter().filter(|(p, _)| *p == k).count()).collect()
    }

    fn reducer(&self, d: u32) -> Result<Arc<Reducer>> {
        if let Some(r) = self.reducers.lock().unwrap().get(&d) {
            return Ok(r.clone());
        }
        let nx = self.n + 1;
        let ones = vec![1u32; nx];
        let mut monos = Vec::new();
        weighted_monomials(&ones, d, &mut |m| monos.push(m.to_vec()));
        let index: BTreeMap<Mono, usize> = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let std_monos = self.jacobian.standard_monomials(&ones, d)?;
        let mut lower = Vec::new();
        if d + 1 >= self.degree {
            weighted_monomials(&ones, d + 1 - self.degree, &mut |m| lower.push(m.to_vec()));
        }
        let jcols = nx * lower.len();
        let cols = jcols + std_monos.len();
        let mut m0 = Matrix::zeros(monos.len(), cols);
        for j in 0..nx {
            let dj = self.f0.derivative(j);
            for (l, nu) in lower.iter().enumerate() {
                for (e, c) in dj.mul_term(nu, &Scalar::one()).terms() {
                    m0[(index[e], j * lower.len() + l)] = c.clone();
                }
            }
        }
        for (s, mu) in std_monos.iter().enumerate() {
            m0[(index[mu], jcols + s)] = Scalar::one();
        }
        let sol = if monos.is_empty() {
            Matrix::zeros(cols, 0)
        } else {
            m0.solve_matrix(&Matrix::identity(monos.len()))?
                .ok_or_else(|| Error::NotSmooth(format!("Jacobian part and standard monomials do not span degree {d}")))?
        };
        let mut jacobian = Vec::new();
        let mut standard = Vec::new();
        for col in 0..monos.len() {
            let a: Vec<MultiPoly> = (0..nx)
                .map(|j| {
                    MultiPoly::from_terms(
                        nx,
                        lower.iter().enumerate().filter_map(|(l, nu)| {
                            let c = &sol[(j * lower.len() + l, col)];
                            (!c.is_zero()).then(|| (nu.clone(), c.clone()))
                        }),
                    )
                })
                .collect();
            let r: Vec<(usize, Scalar)> =
                (0..std_monos.len()).filter(|&s| !sol[(jcols + s, col)].is_zero()).map(|s| (s, sol[(jcols + s, col)].clone())).collect();
            jacobian.push(a);
            standard.push(r);
        }
        let red = Arc::new(Reducer { index, jacobian, standard, std_monos });
        self.reducers.lock().unwrap().insert(d, red.clone());
        Ok(red)
    }

    /// Lift a polynomial in x to (t, x), times t^s.
    fn lift(&self, p: &MultiPoly, s: u32) -> MultiPoly {
        let pos: Vec<usize> = (1..=self.n + 1).collect();
        let mut e = vec![0; self.n + 2];
        e[0] = s;
        p.reindex(self.n + 2, &pos).mul_term(&e, &Scalar::one())
    }

    /// P = Σ_j A_j·∂_j f + R modulo t^order, R over standard monomials of degree d.
    fn decompose(&self, p: &MultiPoly, d: u32, order: usize) -> Result<(Vec<MultiPoly>, Vec<Vec<Scalar>>)> {
        let red = self.reducer(d)?;
        let nv = self.n + 2;
        let mut a = vec![MultiPoly::zero(nv); self.n + 1];
        let mut r = vec![series_zero(order); red.std_monos.len()];
        let mut rem = truncate(p, order);
        for s in 0..order {
            let slice: Vec<(Mono, Scalar)> =
                rem.terms().filter(|(e, _)| e[0] as usize == s).map(|(e, c)| (e[1..].to_vec(), c.clone())).collect();
            if slice.is_empty() {
                continue;
            }
            let mut aj = vec![MultiPoly::zero(self.n + 1); self.n + 1];
            let mut rs = MultiPoly::zero(self.n + 1);
            for (mu, c) in &slice {
                let i = *red.index.get(mu).ok_or_else(|| Error::GradingMismatch("numerator of the wrong degree".into()))?;
                for (j, part) in red.jacobian[i].iter().enumerate() {
                    aj[j] = &aj[j] + &part.scale(c);
                }
                for (sidx, v) in &red.standard[i] {
                    r[*sidx][s] = r[*sidx][s].clone() + c.clone() * v.clone();
                    rs.add_term(red.std_monos[*sidx].clone(), c.clone() * v.clone());
                }
            }
            let mut used = self.lift(&rs, s as u32);
            for (j, q) in aj.iter().enumerate() {
                let lifted = self.lift(q, s as u32);
                used = &used + &(&lifted * &self.dfx[j]);
                a[j] = &a[j] + &lifted;
            }
            rem = truncate(&(&rem - &used), order);
        }
        debug_assert!(rem.is_zero());
        Ok((a, r))
    }

    /// Griffiths–Dwork reduction of a representative, modulo t^order.
    pub fn reduce(&self, rep: &Representative, order: usize) -> Result<(CohomologyClass, ReductionTrace)> {
        let mut terms: BTreeMap<usize, MultiPoly> = rep.terms.iter().map(|(k, p)| (*k, truncate(p, order))).collect();
        let mut coeffs = vec![series_zero(order); self.basis.len()];
        let mut steps = BTreeMap::new();
        while let Some((&k, _)) = terms.iter().next_back() {
            let p = terms.remove(&k).unwrap();
            if p.is_zero() {
                continue;
            }
            let d = numerator_degree(k, self.degree, self.n)
                .ok_or_else(|| Error::GradingMismatch(format!("pole order {k} admits no numerators")))?;
            let (a, r) = self.decompose(&p, d, order)?;
            let red = self.reducer(d)?;
            for (s, series) in r.iter().enumerate() {
                if series.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let b = self
                    .basis
                    .iter()
                    .position(|(kk, m)| *kk == k && *m == red.std_monos[s])
                    .ok_or_else(|| Error::Invalid(format!("standard part at pole order {k} outside the basis")))?;
                for (x, y) in coeffs[b].iter_mut().zip(series) {
                    *x = x.clone() + y.clone();
                }
            }
            if a.iter().any(|q| !q.is_zero()) {
                if k == 1 {
                    return Err(Error::Invalid("Jacobian part at pole order one".into()));
                }
                let inv = Scalar::rational(1, k as i64 - 1);
                let mut down = MultiPoly::zero(self.nvars());
                for (j, q) in a.iter().enumerate() {
                    down = &down + &q.derivative(j + 1);
                }
                let entry = terms.entry(k - 1).or_insert_with(|| MultiPoly::zero(self.nvars()));
                *entry = &*entry + &down.scale(&inv);
                steps.insert(k, a);
            }
        }
        Ok((CohomologyClass { order, coeffs, algebraic: None }, ReductionTrace { steps }))
    }

    /// The representative Σ_b c_b(t)·μ_b·Ω₀/f^{k_b}.
    pub fn representative(&self, c: &CohomologyClass) -> Representative {
        let mut terms: BTreeMap<usize, MultiPoly> = BTreeMap::new();
        for (b, (k, mu)) in self.basis.iter().enumerate() {
            for (s, x) in c.coeffs[b].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let p = self.lift(&MultiPoly::monomial(mu.clone(), x.clone()), s as u32);
                let e = terms.entry(*k).or_insert_with(|| MultiPoly::zero(self.nvars()));
                *e = &*e + &p;
            }
        }
        Representative { terms }
    }

    /// Basis class b with constant coefficient 1.
    pub fn basis_class(&self, b: usize, order: usize) -> CohomologyClass {
        let mut coeffs = vec![series_zero(order); self.basis.len()];
        coeffs[b][0] = Scalar::one();
        CohomologyClass { order, coeffs, algebraic: None }
    }

    /// The class of μ·Ω₀/f^k at t = 0, extended with constant coefficients.
    pub fn monomial_class(&self, k: usize, mu: &[u32], order: usize) -> Result<CohomologyClass> {
        let mut terms = BTreeMap::new();
        terms.insert(k, self.lift(&MultiPoly::monomial(mu.to_vec(), Scalar::one()), 0));
        Ok(self.reduce(&Representative { terms }, order)?.0)
    }

    /// The algebraic class hʲ, constant.
    pub fn algebraic_class(&self, j: usize, order: usize) -> Result<CohomologyClass> {
        if 2 * j > 2 * (self.n - 1) {
            return Err(Error::Invalid(format!("h^{j} vanishes on a hypersurface of dimension {}", self.n - 1)));
        }
        let mut a = series_zero(order);
        a[0] = Scalar::one();
        Ok(CohomologyClass { order, coeffs: vec![series_zero(order); self.basis.len()], algebraic: Some((j, a)) })
    }

    /// ∇_{d/dt}: differentiate the representative in t and reduce; the result
    /// is known modulo t^{order−1}.
    pub fn gm_connect(&self, c: &CohomologyClass) -> Result<CohomologyClass> {
        if c.order < 2 {
            return Err(Error::TruncationOrderExceeded("∇ needs at least order 2".into()));
        }
        let out = c.order - 1;
        let rep = self.representative(c);
        let mut terms: BTreeMap<usize, MultiPoly> = BTreeMap::new();
        for (k, p) in &rep.terms {
            let e = terms.entry(*k).or_insert_with(|| MultiPoly::zero(self.nvars()));
            *e = &*e + &p.derivative(0);
            let up = (&self.dft * p).scale(&Scalar::from_int(-(*k as i64)));
            let e = terms.entry(k + 1).or_insert_with(|| MultiPoly::zero(self.nvars()));
            *e = &*e + &up;
        }
        let (mut r, _) = self.reduce(&Representative { terms }, out)?;
        r.algebraic = c.algebraic.as_ref().map(|(j, a)| (*j, series_derivative(a)[..out].to_vec()));
        Ok(r)
    }

    /// Connection matrix: column b is ∇e_b, modulo t^{order−1}.
    pub fn connection_matrix(&self, order: usize) -> Result<Vec<CohomologyClass>> {
        (0..self.basis.len()).map(|b| self.gm_connect(&self.basis_class(b, order))).collect()
    }

    /// The unique w ≡ v₀ (mod t) with ∇w = 0 modulo t^{order−1}, by the
    /// recurrence (s+1)·c_{s+1} = −Σ_u Γ_u c_{s−u}.
    pub fn horizontal_lift(&self, v0: &CohomologyClass, order: usize) -> Result<CohomologyClass> {
        let nb = self.basis.len();
        let mut coeffs = vec![series_zero(order); nb];
        for b in 0..nb {
            coeffs[b][0] = v0.coeffs[b][0].clone();
        }
        let algebraic = v0.algebraic.as_ref().map(|(j, a)| {
            let mut s = series_zero(order);
            s[0] = a[0].clone();
            (*j, s)
        });
        if order >= 2 {
            let gamma = self.connection_matrix(order)?;
            for s in 0..order - 1 {
                let inv = Scalar::rational(1, s as i64 + 1);
                for a in 0..nb {
                    let mut acc = Scalar::zero();
                    for (b, col) in gamma.iter().enumerate() {
                        for u in 0..=s {
                            let g = &col.coeffs[a][u];
                            if !g.is_zero() {
                                acc = acc + g.clone() * coeffs[b][s - u].clone();
                            }
                        }
                    }
                    coeffs[a][s + 1] = -(acc * inv.clone());
                }
            }
        }
        Ok(CohomologyClass { order, coeffs, algebraic })
    }
}

/// Legendre pencil y²z = x(x − z)(x − λz) with λ = t − 1.
pub fn legendre(order: usize) -> Result<HypersurfaceFamily> {
    HypersurfaceFamily::parse(2, 3, "y^2*z - x*(x-z)*(x+z-t*z)", order)
}

/// Hesse pencil x³ + y³ + z³ − 3t·xyz.
pub fn hesse_cubic(order: usize) -> Result<HypersurfaceFamily> {
    HypersurfaceFamily::parse(2, 3, "x^3 + y^3 + z^3 - 3*t*x*y*z", order)
}

/// Dwork pencil x⁴ + y⁴ + z⁴ + w⁴ − 4t·xyzw.
pub fn dwork_quartic(order: usize) -> Result<HypersurfaceFamily> {
    HypersurfaceFamily::parse(3, 4, "x^4 + y^4 + z^4 + w^4 - 4*t*x*y*z*w", order)
}

/// Constant Fermat hypersurface of degree d in ℙⁿ.
pub fn fermat(n: usize, d: u32, order: usize) -> Result<HypersurfaceFamily> {
    let names = default_names(n);
    let f = names[1..].iter().map(|v| format!("{v}^{d}")).collect::<Vec<_>>().join(" + ");
    HypersurfaceFamily::parse(n, d, &f, order)
}

/// deg P_k = k·d − n − 1, if nonnegative.
pub fn numerator_degree(k: usize, d: u32, n: usize) -> Option<u32> {
    let v = k as i64 * d as i64 - n as i64 - 1;
    (v >= 0).then_some(v as u32)
}

/// Drop terms with t-exponent ≥ order (t is variable 0).
pub fn truncate(p: &MultiPoly, order: usize) -> MultiPoly {
    MultiPoly::from_terms(p.nvars(), p.terms().filter(|(e, _)| (e[0] as usize) < order).map(|(e, c)| (e.clone(), c.clone())))
}

fn series_derivative(a: &[Scalar]) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = (1..a.len()).map(|s| a[s].clone() * Scalar::from_int(s as i64)).collect();
    out.push(Scalar::zero());
    out
}

/// Product of two series modulo t^m.
pub fn series_mul(a: &[Scalar], b: &[Scalar], m: usize) -> Vec<Scalar> {
    let mut out = series_zero(m);
    for (i, x) in a.iter().enumerate().take(m) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(m - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

impl CohomologyClass {
    pub fn zero(nbasis: usize, order: usize) -> Self {
        CohomologyClass { order, coeffs: vec![series_zero(order); nbasis], algebraic: None }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|c| c.is_zero()) && self.algebraic.as_ref().is_none_or(|(_, a)| a.iter().all(|c| c.is_zero()))
    }

    /// Reduce the precision.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        CohomologyClass {
            order,
            coeffs: self.coeffs.iter().map(|s| s[..order].to_vec()).collect(),
            algebraic: self.algebraic.as_ref().map(|(j, a)| (*j, a[..order].to_vec())),
        }
    }

    /// Coefficients at t^s.
    pub fn at(&self, s: usize) -> Vec<Scalar> {
        self.coeffs.iter().map(|c| c.get(s).cloned().unwrap_or_else(Scalar::zero)).collect()
    }

    pub fn add(&self, o: &CohomologyClass) -> Result<CohomologyClass> {
        let order = self.order.min(o.order);
        let algebraic = match (&self.algebraic, &o.algebraic) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some((a.0, a.1[..order].to_vec())),
            (Some(a), Some(b)) if a.0 == b.0 => Some((a.0, (0..order).map(|s| a.1[s].clone() + b.1[s].clone()).collect())),
            _ => return Err(Error::DegreeMismatch("algebraic parts of different degrees".into())),
        };
        Ok(CohomologyClass {
            order,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (0..order).map(|s| a[s].clone() + b[s].clone()).collect()).collect(),
            algebraic,
        })
    }

    /// Multiply by a series a(t).
    pub fn scale_series(&self, a: &[Scalar]) -> CohomologyClass {
        let m = self.order;
        CohomologyClass {
            order: m,
            coeffs: self.coeffs.iter().map(|c| series_mul(a, c, m)).collect(),
            algebraic: self.algebraic.as_ref().map(|(j, c)| (*j, series_mul(a, c, m))),
        }
    }

    pub fn pole_order(&self, fam: &HypersurfaceFamily) -> usize {
        self.coeffs.iter().enumerate().filter(|(_, s)| s.iter().any(|c| !c.is_zero())).map(|(b, _)| fam.basis[b].0).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests;
