//! Obstructions to a horizontal class staying in the Hodge filtration over
//! ℚ[t]/(tᵐ) → ℚ[t]/(tᵐ⁻¹).
//!
//! A basis class of pole order k lies in F^{n−k}; the algebraic class hʲ
//! lies in F^i exactly when i ≤ j.

use serde::Serialize;

use super::{CohomologyClass, HypersurfaceFamily};
use crate::error::{Error, Result};
use crate::exact::scalar::{Coeff, Scalar};

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub level: usize,
    pub order: usize,
    /// image of the horizontal lift in H/F^i, coefficient of t^{m−1}
    pub dr: Vec<Scalar>,
    /// ∇ of an F^i lift of the order-(m−1) horizontal section, in H/F^i, coefficient of t^{m−2}
    pub bloch: Vec<Scalar>,
    pub vanishes: bool,
    /// (m−1)·dr = −bloch
    pub sign_relation: bool,
}

impl HypersurfaceFamily {
    /// Basis indices outside F^i.
    pub fn outside_filtration(&self, i: usize) -> Vec<usize> {
        (0..self.basis.len()).filter(|&b| self.basis[b].0 + i > self.n).collect()
    }

    /// Whether the t^s part of c lies in F^i.
    pub fn in_filtration_at(&self, c: &CohomologyClass, i: usize, s: usize) -> bool {
        let alg_ok = match &c.algebraic {
            Some((j, a)) => i <= *j || a.get(s).is_none_or(|x| x.is_zero()),
            None => true,
        };
        alg_ok && self.outside_filtration(i).iter().all(|&b| c.coeffs[b].get(s).is_none_or(|x| x.is_zero()))
    }

    fn quotient_part(&self, c: &CohomologyClass, i: usize, s: usize) -> Vec<Scalar> {
        let mut out: Vec<Scalar> =
            self.outside_filtration(i).iter().map(|&b| c.coeffs[b].get(s).cloned().unwrap_or_else(Scalar::zero)).collect();
        if let Some((j, a)) = &c.algebraic {
            if i > *j {
                out.push(a.get(s).cloned().unwrap_or_else(Scalar::zero));
            }
        }
        out
    }
}

fn check_start(fam: &HypersurfaceFamily, v0: &CohomologyClass, i: usize, m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::TruncationTooSmall("an obstruction needs order at least 2".into()));
    }
    if v0.coeffs.len() != fam.basis.len() {
        return Err(Error::ShapeMismatch("class does not match the family's basis".into()));
    }
    if !fam.in_filtration_at(v0, i, 0) {
        return Err(Error::NotInFiltration(format!("v₀ is not in F^{i}")));
    }
    Ok(())
}

/// Both obstructions for v₀ at level i over ℚ[t]/(tᵐ).
pub fn bloch_obstruction(v0: &CohomologyClass, fam: &HypersurfaceFamily, i: usize, m: usize) -> Result<ObstructionReport> {
    check_start(fam, v0, i, m)?;
    let owned;
    let fam = if fam.order < m {
        owned = fam.with_order(m)?;
        &owned
    } else {
        fam
    };
    let w = fam.horizontal_lift(&v0.truncate(1), m)?;
    for s in 0..m - 1 {
        if !fam.in_filtration_at(&w, i, s) {
            return Err(Error::NotInFiltration(format!("the horizontal lift leaves F^{i} at t^{s}")));
        }
    }
    let dr = fam.quotient_part(&w, i, m - 1);

    // the F^i lift: w modulo t^{m−1}, extended by zero
    let mut v = w.clone();
    for series in v.coeffs.iter_mut() {
        series[m - 1] = Scalar::zero();
    }
    if let Some((_, a)) = v.algebraic.as_mut() {
        a[m - 1] = Scalar::zero();
    }
    let nabla = fam.gm_connect(&v)?;
    let bloch = fam.quotient_part(&nabla, i, m - 2);
    for s in 0..m - 2 {
        debug_assert!(fam.in_filtration_at(&nabla, i, s));
    }

    let factor = Scalar::from_int(m as i64 - 1);
    let sign_relation = dr.iter().zip(&bloch).all(|(a, b)| (a.clone() * factor.clone() + b.clone()).is_zero());
    let vanishes = bloch.iter().all(|x| x.is_zero());
    Ok(ObstructionReport { level: i, order: m, dr, bloch, vanishes, sign_relation })
}

/// True iff the horizontal lift of v₀ stays in F^i through t^{m−1}.
pub fn hodge_type_check(v0: &CohomologyClass, fam: &HypersurfaceFamily, i: usize, m: usize) -> Result<bool> {
    if m == 0 {
        return Err(Error::TruncationTooSmall("order must be at least 1".into()));
    }
    if !fam.in_filtration_at(v0, i, 0) {
        return Err(Error::NotInFiltration(format!("v₀ is not in F^{i}")));
    }
    let owned;
    let fam = if fam.order < m {
        owned = fam.with_order(m)?;
        &owned
    } else {
        fam
    };
    let w = fam.horizontal_lift(&v0.truncate(1), m)?;
    Ok((0..m).all(|s| fam.in_filtration_at(&w, i, s)))
}
