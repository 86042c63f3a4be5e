//! Polynomial differential forms Σ p_S dx_S on affine space, with wedge
//! product and exterior derivative.

use std::collections::BTreeMap;

use crate::exact::poly::MultiPoly;
use crate::exact::scalar::{Coeff, Scalar};

/// Sign of e_S ∧ e_T, or None if S and T meet.
pub fn wedge_sign(s: u32, t: u32) -> Option<i64> {
    if s & t != 0 {
        return None;
    }
    // count pairs (i ∈ S, j ∈ T) with i > j
    let mut inv = 0;
    let mut rest = t;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inv += (s >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if inv % 2 == 0 { 1 } else { -1 })
}

/// All subsets of {0..n} with q elements, as bit masks in increasing order.
pub fn subsets_of_size(n: usize, q: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0u32..(1 << n)).filter(|m| m.count_ones() as usize == q).collect();
    out.sort();
    out
}

/// A differential form with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub nvars: usize,
    pub terms: BTreeMap<u32, MultiPoly>,
}

impl Form {
    pub fn zero(nvars: usize) -> Self {
        Form { nvars, terms: BTreeMap::new() }
    }

    pub fn function(f: MultiPoly) -> Self {
        let n = f.nvars();
        Form::zero(n).plus_term(0, f)
    }

    /// f·dx_S
    pub fn term(f: MultiPoly, s: u32) -> Self {
        let n = f.nvars();
        Form::zero(n).plus_term(s, f)
    }

    fn plus_term(mut self, s: u32, f: MultiPoly) -> Self {
        self.add_term(s, f);
        self
    }

    pub fn add_term(&mut self, s: u32, f: MultiPoly) {
        if f.is_zero() {
            return;
        }
        let e = self.terms.entry(s).or_insert_with(|| MultiPoly::zero(self.nvars));
        *e = &*e + &f;
        if e.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Homogeneous form degree, if all terms agree.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|s| s.count_ones());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut out = self.clone();
        for (s, f) in &o.terms {
            out.add_term(*s, f.clone());
        }
        out
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        let mut out = Form::zero(self.nvars);
        for (s, f) in &self.terms {
            out.add_term(*s, f.scale(c));
        }
        out
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut out = Form::zero(self.nvars);
        for (s, f) in &self.terms {
            for (t, g) in &o.terms {
                if let Some(sign) = wedge_sign(*s, *t) {
                    out.add_term(s | t, (f * g).scale(&Scalar::from_int(sign)));
                }
            }
        }
        out
    }

    /// Exterior derivative: d(f dx_S) = Σ_j ∂f/∂x_j dx_j ∧ dx_S.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(self.nvars);
        for (s, f) in &self.terms {
            for j in 0..self.nvars {
                if let Some(sign) = wedge_sign(1 << j, *s) {
                    let df = f.derivative(j);
                    if !df.is_zero() {
                        out.add_term((1 << j) | s, df.scale(&Scalar::from_int(sign)));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(1));
        assert_eq!(wedge_sign(0b10, 0b01), Some(-1));
        assert_eq!(wedge_sign(0b11, 0b01), None);
        assert_eq!(wedge_sign(0b100, 0b011), Some(1));
        assert_eq!(wedge_sign(0b010, 0b101), Some(-1));
    }

    #[test]
    fn dd_zero_and_leibniz() {
        let x = MultiPoly::var(3, 0);
        let y = MultiPoly::var(3, 1);
        let z = MultiPoly::var(3, 2);
        let w = Form::term(&(&x * &y) * &z, 0).add(&Form::term(&x * &x, 0b100));
        assert!(w.d().d().is_zero());
        let eta = Form::term(&y * &z, 0b001);
        let lhs = w.wedge(&eta).d();
        // w mixes degrees 0 and 1, so check the homogeneous parts separately
        let w0 = Form::term(&(&x * &y) * &z, 0);
        let w1 = Form::term(&x * &x, 0b100);
        let l0 = w0.wedge(&eta).d();
        assert_eq!(l0, w0.d().wedge(&eta).add(&w0.wedge(&eta.d())));
        let l1 = w1.wedge(&eta).d();
        assert_eq!(l1, w1.d().wedge(&eta).sub(&w1.wedge(&eta.d())));
        assert_eq!(lhs, l0.add(&l1));
    }
}
