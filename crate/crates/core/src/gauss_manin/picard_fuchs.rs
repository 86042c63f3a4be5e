//! Picard–Fuchs operators: the minimal monic relation ∇ʳc + Σ b_j(t)·∇ʲc = 0
//! over ℚ[[t]]/(t^m), with rational recovery of polynomial coefficients.

use serde::Serialize;

use super::{series_mul, CohomologyClass, HypersurfaceFamily};
use crate::error::{Error, Result};
use crate::exact::matrix::Matrix;
use crate::exact::scalar::{Coeff, Scalar};

/// Σ_j a_j(t)·D^j with polynomial coefficients, a_j[s] the t^s coefficient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyOperator {
    pub coeffs: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardFuchs {
    pub order: usize,
    /// b_j as truncated series, j < order
    pub series: Vec<Vec<Scalar>>,
    pub precision: usize,
    /// a_r·∇ʳ + Σ a_j·∇ʲ with a_j = a_r·b_j polynomial, if recovered
    pub operator: Option<PolyOperator>,
}

fn trim(mut v: Vec<Scalar>) -> Vec<Scalar> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn binomial(n: usize, k: usize) -> Scalar {
    let mut r = Scalar::one();
    for i in 0..k {
        r = r * Scalar::rational((n - i) as i64, (i + 1) as i64);
    }
    r
}

impl PolyOperator {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Substitute t = s + c: the operator in the coordinate s = t − c.
    pub fn shift(&self, c: &Scalar) -> PolyOperator {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let mut out = vec![Scalar::zero(); a.len()];
                for (k, ak) in a.iter().enumerate() {
                    if ak.is_zero() {
                        continue;
                    }
                    for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                        *slot = slot.clone() + ak.clone() * binomial(k, j) * c.pow((k - j) as u32);
                    }
                }
                trim(out)
            })
            .collect();
        PolyOperator { coeffs }
    }

    /// Divide every coefficient by the leading coefficient of the top one.
    pub fn normalized(&self) -> PolyOperator {
        let lead = self.coeffs.last().and_then(|a| a.iter().rev().find(|c| !c.is_zero())).cloned();
        match lead.and_then(|l| l.try_inv()) {
            Some(inv) => PolyOperator { coeffs: self.coeffs.iter().map(|a| a.iter().map(|x| x.clone() * inv.clone()).collect()).collect() },
            None => self.clone(),
        }
    }

    /// Apply to a power series y; the result is exact through t^{len(y) − order − 1}.
    pub fn apply_to_series(&self, y: &[Scalar]) -> Vec<Scalar> {
        let r = self.order();
        let m = y.len().saturating_sub(r);
        let mut out = vec![Scalar::zero(); m];
        let mut dy = y.to_vec();
        for (j, a) in self.coeffs.iter().enumerate() {
            if j > 0 {
                dy = (1..dy.len()).map(|s| dy[s].clone() * Scalar::from_int(s as i64)).collect();
            }
            let prod = series_mul(a, &dy, m);
            for (o, p) in out.iter_mut().zip(prod) {
                *o = o.clone() + p;
            }
        }
        out
    }
}

/// Solve V(t)·b(t) = rhs(t) order by order; None if inconsistent.
fn series_solve(v: &[Vec<Vec<Scalar>>], rhs: &[Vec<Scalar>], prec: usize) -> Result<Option<Vec<Vec<Scalar>>>> {
    let r = v.len();
    let nb = rhs.len();
    let at = |j: usize, a: usize, s: usize| v[j][a].get(s).cloned().unwrap_or_else(Scalar::zero);
    let v0 = Matrix::from_fn(nb, r, |a, j| at(j, a, 0));
    if v0.rank()? < r {
        return Err(Error::Unsupported("the iterated derivatives are dependent at t = 0".into()));
    }
    let mut b = vec![vec![Scalar::zero(); prec]; r];
    for s in 0..prec {
        let target: Vec<Scalar> = (0..nb)
            .map(|a| {
                let mut x = rhs[a].get(s).cloned().unwrap_or_else(Scalar::zero);
                for u in 1..=s {
                    for (j, bj) in b.iter().enumerate() {
                        x = x - at(j, a, u) * bj[s - u].clone();
                    }
                }
                x
            })
            .collect();
        match v0.solve(&target)? {
            Some(sol) => {
                for (j, x) in sol.into_iter().enumerate() {
                    b[j][s] = x;
                }
            }
            None => return Ok(None),
        }
    }
    Ok(Some(b))
}

/// Smallest δ with a polynomial p of degree ≤ δ, p(0) = 1, such that every
/// p·b_j is a polynomial of degree ≤ δ, verified on the spare coefficients.
fn recover(series: &[Vec<Scalar>], prec: usize) -> Result<Option<(Vec<Scalar>, Vec<Vec<Scalar>>)>> {
    for delta in 0..prec {
        if 2 * delta + 2 > prec {
            break;
        }
        // unknowns p_1..p_δ; equations: coefficient s of p·b_j is zero for s in δ+1..prec
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for bj in series {
            for s in delta + 1..prec {
                rows.push((1..=delta).map(|k| if k <= s { bj[s - k].clone() } else { Scalar::zero() }).collect::<Vec<_>>());
                rhs.push(-bj[s].clone());
            }
        }
        let p_tail = if delta == 0 {
            rhs.iter().all(|x| x.is_zero()).then(Vec::new)
        } else {
            let m = Matrix::from_rows_with_cols(rows, delta).expect("rectangular");
            m.solve(&rhs)?
        };
        if let Some(tail) = p_tail {
            let mut p = vec![Scalar::one()];
            p.extend(tail);
            let numerators = series.iter().map(|bj| trim(series_mul(&p, bj, delta + 1))).collect();
            return Ok(Some((trim(p), numerators)));
        }
    }
    Ok(None)
}

/// Minimal-order operator annihilating c under ∇, searching orders up to max_order.
pub fn picard_fuchs(fam: &HypersurfaceFamily, c: &CohomologyClass, max_order: usize) -> Result<PicardFuchs> {
    if c.is_zero() {
        return Err(Error::Invalid("the zero class has no minimal operator".into()));
    }
    let mut vs = vec![c.clone()];
    for r in 1..=max_order {
        if c.order <= r {
            return Err(Error::TruncationOrderExceeded(format!("order {} too small for a relation of order {r}", c.order)));
        }
        let next = fam.gm_connect(vs.last().unwrap())?;
        vs.push(next);
        let prec = c.order - r;
        let top = &vs[r];
        // the algebraic coefficient is one more coordinate
        let rows = |w: &CohomologyClass| {
            let mut out = w.coeffs.clone();
            out.push(w.algebraic.as_ref().map(|(_, a)| a.clone()).unwrap_or_default());
            out
        };
        let v: Vec<Vec<Vec<Scalar>>> = vs[..r].iter().map(rows).collect();
        let rhs: Vec<Vec<Scalar>> = rows(top).iter().map(|s| s.iter().map(|x| -x.clone()).collect()).collect();
        if let Some(series) = series_solve(&v, &rhs, prec)? {
            let operator = recover(&series, prec)?.map(|(p, nums)| {
                let mut coeffs = nums;
                coeffs.push(p);
                PolyOperator { coeffs }
            });
            return Ok(PicardFuchs { order: r, series, precision: prec, operator });
        }
    }
    Err(Error::OrderBoundTooSmall(max_order))
}
