//! Finitely presented algebras B = k[x]/(f), presented B-modules and the
//! Kähler differentials Ω_{B/k} as the cokernel of the Jacobian.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::groebner::Ideal;
use crate::exact::matrix::Matrix;
use crate::exact::poly::{Mono, MonomialOrder, MultiPoly};
use crate::exact::polyparse::parse_poly;
use crate::exact::scalar::{BaseRing, Coeff, Scalar};

/// B = k[x₁..xₙ]/(f₁..f_m).
#[derive(Clone, Debug)]
pub struct QuotientRing {
    pub field: BaseRing,
    pub names: Vec<String>,
    pub relations: Vec<MultiPoly>,
    ideal: Ideal<Scalar>,
}

impl QuotientRing {
    pub fn new(field: BaseRing, names: Vec<String>, relations: Vec<MultiPoly>) -> Result<Self> {
        if !field.is_field() {
            return Err(Error::NotAField(field.label()));
        }
        let n = names.len();
        if relations.iter().any(|f| f.nvars() != n) {
            return Err(Error::ShapeMismatch("relation in the wrong number of variables".into()));
        }
        let relations: Vec<MultiPoly> = relations.iter().map(|f| coerce(f, field)).collect();
        let ideal = Ideal::computed(n, relations.clone(), MonomialOrder::Grevlex)?;
        Ok(QuotientRing { field, names, relations, ideal })
    }

    pub fn polynomial(field: BaseRing, names: &[&str]) -> Result<Self> {
        QuotientRing::new(field, names.iter().map(|s| s.to_string()).collect(), Vec::new())
    }

    pub fn parse(field: BaseRing, names: &[&str], relations: &[&str]) -> Result<Self> {
        let rels = relations.iter().map(|r| parse_poly(r, names, field)).collect::<Result<_>>()?;
        QuotientRing::new(field, names.iter().map(|s| s.to_string()).collect(), rels)
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn ideal(&self) -> &Ideal<Scalar> {
        &self.ideal
    }

    pub fn reduce(&self, f: &MultiPoly) -> Result<MultiPoly> {
        self.ideal.normal_form(&coerce(f, self.field))
    }

    pub fn is_zero(&self, f: &MultiPoly) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }

    /// B[x]: one more variable appended at the end.
    pub fn adjoin(&self, name: &str) -> Result<Self> {
        let n = self.nvars();
        let pos: Vec<usize> = (0..n).collect();
        let mut names = self.names.clone();
        names.push(name.into());
        QuotientRing::new(self.field, names, self.relations.iter().map(|f| f.reindex(n + 1, &pos)).collect())
    }

    /// A k-basis of B if it is finite-dimensional (standard monomials).
    pub fn artinian_basis(&self) -> Result<Vec<Mono>> {
        let n = self.nvars();
        let leads = self.ideal.leading_monomials()?;
        let mut bounds = vec![None; n];
        for l in &leads {
            let nz: Vec<usize> = (0..n).filter(|&i| l[i] > 0).collect();
            if nz.len() == 1 {
                let i = nz[0];
                bounds[i] = Some(bounds[i].map_or(l[i], |b: u32| b.min(l[i])));
            }
        }
        if bounds.iter().any(|b| b.is_none()) {
            return Err(Error::NotArtinian("some variable has no pure-power leading monomial".into()));
        }
        let bounds: Vec<u32> = bounds.into_iter().map(|b| b.unwrap()).collect();
        let mut out = vec![Vec::new()];
        for &b in &bounds {
            let mut next = Vec::new();
            for m in &out {
                for e in 0..b {
                    let mut m2: Vec<u32> = m.clone();
                    m2.push(e);
                    next.push(m2);
                }
            }
            out = next;
        }
        out.retain(|m| !leads.iter().any(|l| l.iter().zip(m).all(|(a, b)| a <= b)));
        out.sort_by(|a, b| MonomialOrder::Grevlex.cmp(a, b));
        Ok(out)
    }

    /// Random B with n variables and m relations of degree ≤ deg.
    pub fn random(field: BaseRing, n: usize, m: usize, deg: u32, rng: &mut impl Rng) -> Result<Self> {
        let names: Vec<String> = (0..n).map(|i| format!("y{}", i + 1)).collect();
        let mut rels = Vec::new();
        for _ in 0..m {
            let mut f = MultiPoly::zero(n);
            for _ in 0..rng.gen_range(1..=3) {
                let mut e = vec![0u32; n];
                let d = rng.gen_range(1..=deg);
                for _ in 0..d {
                    e[rng.gen_range(0..n)] += 1;
                }
                let c = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
                f.add_term(e, field.int(c));
            }
            rels.push(f);
        }
        QuotientRing::new(field, names, rels)
    }
}

/// Coefficients brought into the given ring.
pub fn coerce(f: &MultiPoly, field: BaseRing) -> MultiPoly {
    MultiPoly::from_terms(f.nvars(), f.terms().map(|(e, c)| (e.clone(), field.coerce(c).expect("coefficient outside the field"))))
}

/// coker(B^m → B^r): r generators and relation rows.
#[derive(Clone, Debug)]
pub struct PresentedModule {
    pub ring: QuotientRing,
    pub gen_names: Vec<String>,
    pub relations: Vec<Vec<MultiPoly>>,
    membership: Ideal<Scalar>,
}

impl PresentedModule {
    pub fn new(ring: QuotientRing, gen_names: Vec<String>, relations: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let r = gen_names.len();
        if relations.iter().any(|row| row.len() != r) {
            return Err(Error::ShapeMismatch(format!("relation rows must have {r} entries")));
        }
        let membership = membership_ideal(&ring, r, &relations)?;
        Ok(PresentedModule { ring, gen_names, relations, membership })
    }

    pub fn rank(&self) -> usize {
        self.gen_names.len()
    }

    /// Is v zero in the module, i.e. in the span of the relations plus (f)·B^r?
    pub fn is_zero(&self, v: &[MultiPoly]) -> Result<bool> {
        let enc = encode(self.ring.nvars(), self.rank(), v, self.ring.field);
        self.membership.contains(&enc)
    }

    /// dim of the weight-w piece, with generator j of weight gen_weights[j]
    /// and variables weighted by `weights` (relations must be homogeneous):
    /// standard monomials of the membership ideal linear in e.
    pub fn weight_dim(&self, weights: &[u32], gen_weights: &[u32], w: u32) -> Result<usize> {
        let n = self.ring.nvars();
        let mut all: Vec<u32> = weights.to_vec();
        all.extend_from_slice(gen_weights);
        let std = self.membership.standard_monomials(&all, w)?;
        Ok(std.iter().filter(|m| m[n..].iter().sum::<u32>() == 1).count())
    }

    /// The k-dimension, when B is finite-dimensional.
    pub fn dim_over_field(&self) -> Result<usize> {
        let basis = self.ring.artinian_basis()?;
        let n = self.ring.nvars();
        let r = self.rank();
        let idx = |m: &Mono| basis.iter().position(|b| b == m);
        let total = basis.len() * r;
        let mut rows = Vec::new();
        for row in &self.relations {
            for m in &basis {
                let mono = MultiPoly::monomial(m.clone(), self.ring.field.int(1));
                let mut v = vec![Scalar::zero(); total];
                for (j, f) in row.iter().enumerate() {
                    let g = self.ring.reduce(&(&mono * f))?;
                    for (e, c) in g.terms() {
                        let k = idx(e).ok_or_else(|| Error::Invalid(format!("normal form outside the basis in {n} variables")))?;
                        v[k * r + j] = c.clone();
                    }
                }
                rows.push(v);
            }
        }
        let rank = if rows.is_empty() { 0 } else { Matrix::from_rows(rows).rank()? };
        Ok(total - rank)
    }
}

/// Ideal of k[x, e₁..e_r] generated by (f), the relation rows Σ r_j e_j and
/// all e_i e_j. Its part linear in e is exactly the relation module.
fn membership_ideal(ring: &QuotientRing, r: usize, rows: &[Vec<MultiPoly>]) -> Result<Ideal<Scalar>> {
    let n = ring.nvars();
    let big = n + r;
    let pos: Vec<usize> = (0..n).collect();
    let mut gens: Vec<MultiPoly> = ring.relations.iter().map(|f| f.reindex(big, &pos)).collect();
    for row in rows {
        gens.push(encode(n, r, row, ring.field));
    }
    for i in 0..r {
        for j in i..r {
            let mut e = vec![0u32; big];
            e[n + i] += 1;
            e[n + j] += 1;
            gens.push(MultiPoly::monomial(e, ring.field.int(1)));
        }
    }
    Ideal::computed(big, gens, MonomialOrder::Grevlex)
}

fn encode(n: usize, r: usize, v: &[MultiPoly], field: BaseRing) -> MultiPoly {
    let big = n + r;
    let pos: Vec<usize> = (0..n).collect();
    let mut acc = MultiPoly::zero(big);
    for (j, f) in v.iter().enumerate() {
        let ej = MultiPoly::var(big, n + j);
        acc = &acc + &(&coerce(f, field).reindex(big, &pos) * &ej);
    }
    acc
}

/// A module map given by the images of the generators.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    /// images[j] = image of generator j, as a vector over the target generators
    pub images: Vec<Vec<MultiPoly>>,
}

impl ModuleMap {
    pub fn apply(&self, v: &[MultiPoly], target_rank: usize) -> Vec<MultiPoly> {
        let n = v.first().map(|f| f.nvars()).unwrap_or(0);
        let mut out = vec![MultiPoly::zero(n); target_rank];
        for (j, c) in v.iter().enumerate() {
            for (k, img) in self.images[j].iter().enumerate() {
                out[k] = &out[k] + &(c * img);
            }
        }
        out
    }

    /// Relations go to zero.
    pub fn is_well_defined(&self, src: &PresentedModule, dst: &PresentedModule) -> Result<bool> {
        if self.images.len() != src.rank() || self.images.iter().any(|v| v.len() != dst.rank()) {
            return Err(Error::ShapeMismatch("map shape does not match the modules".into()));
        }
        for row in &src.relations {
            if !dst.is_zero(&self.apply(row, dst.rank()))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// g∘f is the identity on the generators of `src`.
    pub fn composes_to_identity(f: &ModuleMap, g: &ModuleMap, src: &PresentedModule, mid: &PresentedModule) -> Result<bool> {
        let n = src.ring.nvars();
        for j in 0..src.rank() {
            let back = g.apply(&f.apply(&unit_vec(n, src.rank(), j, src.ring.field), mid.rank()), src.rank());
            let diff: Vec<MultiPoly> = back.iter().zip(unit_vec(n, src.rank(), j, src.ring.field)).map(|(a, b)| a - &b).collect();
            if !src.is_zero(&diff)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn unit_vec(n: usize, r: usize, j: usize, field: BaseRing) -> Vec<MultiPoly> {
    (0..r).map(|k| if k == j { MultiPoly::constant(n, field.int(1)) } else { MultiPoly::zero(n) }).collect()
}

/// Ω_{B/k} presented by dx₁..dxₙ modulo the rows df_i.
#[derive(Clone, Debug)]
pub struct KaehlerPresentation {
    pub module: PresentedModule,
}

impl KaehlerPresentation {
    /// d: B → Ω_{B/k} on representatives.
    pub fn d(&self, f: &MultiPoly) -> Vec<MultiPoly> {
        (0..self.module.ring.nvars()).map(|j| f.derivative(j)).collect()
    }
}

pub fn kaehler(b: &QuotientRing) -> Result<KaehlerPresentation> {
    let rows = b.relations.iter().map(|f| (0..b.nvars()).map(|j| f.derivative(j)).collect()).collect();
    let names = b.names.iter().map(|x| format!("d{x}")).collect();
    Ok(KaehlerPresentation { module: PresentedModule::new(b.clone(), names, rows)? })
}

/// Both sides of Ω_{B/k} ⊗ k[x] ⊕ B[x]dx ≅ Ω_{B[x]/k} with the witness maps.
#[derive(Clone, Debug)]
pub struct KunnethWitness {
    pub split: PresentedModule,
    pub target: PresentedModule,
    pub forward: ModuleMap,
    pub backward: ModuleMap,
    pub forward_well_defined: bool,
    pub backward_well_defined: bool,
    pub back_after_forward: bool,
    pub forward_after_back: bool,
}

impl KunnethWitness {
    pub fn is_isomorphism(&self) -> bool {
        self.forward_well_defined && self.backward_well_defined && self.back_after_forward && self.forward_after_back
    }
}

/// Build Ω_{B/k}⊗k[x] ⊕ B[x]dx from the presentation of Ω_{B/k}, compute
/// Ω_{B[x]/k} from its own Jacobian, and certify the canonical map.
pub fn kunneth_check(b: &QuotientRing, var: &str) -> Result<KunnethWitness> {
    let om = kaehler(b)?;
    let bx = b.adjoin(var)?;
    let n = b.nvars();
    let pos: Vec<usize> = (0..n).collect();
    // split side: dy₁..dyₙ from Ω_B, then dx; relations are the old rows with 0 in dx
    let mut names = om.module.gen_names.clone();
    names.push(format!("d{var}"));
    let rows: Vec<Vec<MultiPoly>> = om
        .module
        .relations
        .iter()
        .map(|row| {
            let mut r: Vec<MultiPoly> = row.iter().map(|f| f.reindex(n + 1, &pos)).collect();
            r.push(MultiPoly::zero(n + 1));
            r
        })
        .collect();
    let split = PresentedModule::new(bx.clone(), names, rows)?;
    let target = kaehler(&bx)?.module;
    // canonical map: dy_j ↦ dy_j, dx ↦ dx
    let id = |r: usize| ModuleMap { images: (0..r).map(|j| unit_vec(n + 1, r, j, b.field)).collect() };
    let forward = id(n + 1);
    let backward = id(n + 1);
    Ok(KunnethWitness {
        forward_well_defined: forward.is_well_defined(&split, &target)?,
        backward_well_defined: backward.is_well_defined(&target, &split)?,
        back_after_forward: ModuleMap::composes_to_identity(&forward, &backward, &split, &target)?,
        forward_after_back: ModuleMap::composes_to_identity(&backward, &forward, &target, &split)?,
        split,
        target,
        forward,
        backward,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_numbers_differentials() {
        let b = QuotientRing::parse(BaseRing::Rationals, &["x"], &["x^2"]).unwrap();
        assert_eq!(kaehler(&b).unwrap().module.dim_over_field().unwrap(), 1);
        let b2 = QuotientRing::parse(BaseRing::fp(2), &["x"], &["x^2"]).unwrap();
        assert_eq!(kaehler(&b2).unwrap().module.dim_over_field().unwrap(), 2);
    }

    #[test]
    fn node_relation() {
        let b = QuotientRing::parse(BaseRing::Rationals, &["x", "y"], &["x*y"]).unwrap();
        let om = kaehler(&b).unwrap().module;
        assert_eq!(om.relations.len(), 1);
        assert_eq!(om.relations[0], vec![MultiPoly::var(2, 1), MultiPoly::var(2, 0)]);
        // y dx + x dy = 0 but dx ≠ 0
        assert!(om.is_zero(&om.relations[0]).unwrap());
        assert!(!om.is_zero(&[MultiPoly::one(2), MultiPoly::zero(2)]).unwrap());
        // x·(y dx) = x y dx = 0 in B
        assert!(om.is_zero(&[&MultiPoly::var(2, 0) * &MultiPoly::var(2, 1), MultiPoly::zero(2)]).unwrap());
    }

    #[test]
    fn kunneth_examples() {
        let a = QuotientRing::polynomial(BaseRing::Rationals, &[]).unwrap();
        assert!(kunneth_check(&a, "x").unwrap().is_isomorphism());
        let b = QuotientRing::polynomial(BaseRing::Rationals, &["y"]).unwrap();
        let w = kunneth_check(&b, "x").unwrap();
        assert!(w.is_isomorphism());
        assert_eq!(w.target.rank(), 2);
        let c = QuotientRing::parse(BaseRing::Rationals, &["y"], &["y^2"]).unwrap();
        let w = kunneth_check(&c, "x").unwrap();
        assert!(w.is_isomorphism());
        assert_eq!(w.target.relations[0][1], MultiPoly::zero(2));
    }
}
