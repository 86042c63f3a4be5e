//! Submodules of free modules over ℚ or ℤ/pⁿ, and Smith normal form over ℤ/pⁿ.
//!
//! A [`Span`] keeps its generators in Howell form: each row has a pivot equal
//! to p^v in its first nonzero column, and p^{n-v} times the row is again in
//! the span of the later rows. Membership is then decided by one reduction pass.

use super::scalar::{BaseRing, Coeff, Scalar, Zpn};

#[derive(Clone, Debug)]
struct Row {
    col: usize,
    val: u32,
    v: Vec<Scalar>,
    coef: Option<Vec<Scalar>>,
}

/// A finitely generated submodule of R^dim, R = ℚ or ℤ/pⁿ.
#[derive(Clone, Debug)]
pub struct Span {
    ring: BaseRing,
    dim: usize,
    rows: Vec<Row>,
    ngens: usize,
    track: bool,
}

fn p_pow(ring: BaseRing, e: u32) -> Scalar {
    match ring {
        BaseRing::Rationals => Scalar::from_int(1),
        BaseRing::Zpn { p, n } => Scalar::Modular(Zpn::new(p, n, (p as i64).pow(e))),
    }
}

/// Split a nonzero scalar as (unit, valuation).
fn split(ring: BaseRing, a: &Scalar) -> (Scalar, u32) {
    match ring {
        BaseRing::Rationals => (a.clone(), 0),
        BaseRing::Zpn { .. } => match ring.coerce(a).expect("scalar outside ring") {
            Scalar::Modular(z) => {
                let (u, v) = z.unit_part();
                (Scalar::Modular(u), v)
            }
            Scalar::Rational(_) => unreachable!(),
        },
    }
}

fn nilpotency(ring: BaseRing) -> u32 {
    match ring {
        BaseRing::Rationals => 1,
        BaseRing::Zpn { n, .. } => n,
    }
}

fn axpy(y: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = yi.clone() + a.clone() * xi.clone();
        }
    }
}

impl Span {
    pub fn new(ring: BaseRing, dim: usize) -> Self {
        Span { ring, dim, rows: Vec::new(), ngens: 0, track: false }
    }

    /// A span that records each row as a combination of inserted generators.
    pub fn tracking(ring: BaseRing, dim: usize) -> Self {
        Span { track: true, ..Span::new(ring, dim) }
    }

    pub fn from_vectors(ring: BaseRing, dim: usize, vs: impl IntoIterator<Item = Vec<Scalar>>) -> Self {
        let mut s = Span::new(ring, dim);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_count(&self) -> usize {
        self.ngens
    }

    fn canon(&self, v: Vec<Scalar>) -> Vec<Scalar> {
        v.into_iter().map(|x| if x.is_zero() { Scalar::zero() } else { self.ring.coerce(&x).expect("scalar outside ring") }).collect()
    }

    /// Insert a vector; returns true if the span grew.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let coef = self.track.then(|| {
            let mut c = vec![Scalar::zero(); self.ngens + 1];
            c[self.ngens] = Scalar::one();
            c
        });
        self.ngens += 1;
        if self.track {
            for r in self.rows.iter_mut() {
                if let Some(c) = &mut r.coef {
                    c.push(Scalar::zero());
                }
            }
        }
        let before = self.length();
        let v = self.canon(v);
        let mut queue = vec![(v, coef)];
        while let Some((w, c)) = queue.pop() {
            self.absorb(w, c, &mut queue);
        }
        self.length() > before
    }

    fn absorb(&mut self, mut w: Vec<Scalar>, mut c: Option<Vec<Scalar>>, queue: &mut Vec<(Vec<Scalar>, Option<Vec<Scalar>>)>) {
        let n = nilpotency(self.ring);
        loop {
            let Some(col) = w.iter().position(|x| !x.is_zero()) else { return };
            let (u, va) = split(self.ring, &w[col]);
            match self.rows.iter().position(|r| r.col == col) {
                Some(ri) => {
                    let rv = self.rows[ri].val;
                    if va >= rv {
                        let f = -(u * p_pow(self.ring, va - rv));
                        let row = &self.rows[ri];
                        axpy(&mut w, &f, &row.v);
                        if let (Some(cw), Some(cr)) = (&mut c, &row.coef) {
                            axpy(cw, &f, cr);
                        }
                    } else {
                        let ui = u.try_inv().unwrap();
                        w.iter_mut().for_each(|x| *x = x.clone() * ui.clone());
                        if let Some(cw) = &mut c {
                            cw.iter_mut().for_each(|x| *x = x.clone() * ui.clone());
                        }
                        let closure = self.closure_of(&w, &c, va, n);
                        let new = Row { col, val: va, v: w, coef: c };
                        let old = std::mem::replace(&mut self.rows[ri], new);
                        queue.extend(closure);
                        // old pivot p^rv reduces against the new pivot p^va
                        let f = -p_pow(self.ring, rv - va);
                        let mut ow = old.v;
                        axpy(&mut ow, &f, &self.rows[ri].v);
                        let mut oc = old.coef;
                        if let (Some(o), Some(nc)) = (&mut oc, &self.rows[ri].coef) {
                            axpy(o, &f, nc);
                        }
                        w = ow;
                        c = oc;
                    }
                }
                None => {
                    let ui = u.try_inv().unwrap();
                    w.iter_mut().for_each(|x| *x = x.clone() * ui.clone());
                    if let Some(cw) = &mut c {
                        cw.iter_mut().for_each(|x| *x = x.clone() * ui.clone());
                    }
                    let closure = self.closure_of(&w, &c, va, n);
                    let pos = self.rows.iter().position(|r| r.col > col).unwrap_or(self.rows.len());
                    self.rows.insert(pos, Row { col, val: va, v: w, coef: c });
                    queue.extend(closure);
                    return;
                }
            }
        }
    }

    fn closure_of(&self, w: &[Scalar], c: &Option<Vec<Scalar>>, va: u32, n: u32) -> Option<(Vec<Scalar>, Option<Vec<Scalar>>)> {
        if matches!(self.ring, BaseRing::Rationals) || va == 0 && n == 1 {
            return None;
        }
        let f = p_pow(self.ring, n - va);
        let v: Vec<Scalar> = w.iter().map(|x| x.clone() * f.clone()).collect();
        if v.iter().all(|x| x.is_zero()) {
            return None;
        }
        let cc = c.as_ref().map(|c| c.iter().map(|x| x.clone() * f.clone()).collect());
        Some((v, cc))
    }

    /// Remainder of `v` after reduction by the rows.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.reduce_tracking(v).0
    }

    /// Remainder plus the coefficients of the subtracted generator combination.
    pub fn reduce_tracking(&self, v: &[Scalar]) -> (Vec<Scalar>, Option<Vec<Scalar>>) {
        let mut w = self.canon(v.to_vec());
        let mut comb = self.track.then(|| vec![Scalar::zero(); self.ngens]);
        for r in &self.rows {
            let a = &w[r.col];
            if a.is_zero() {
                continue;
            }
            let (u, va) = split(self.ring, a);
            if va < r.val {
                continue;
            }
            let f = u * p_pow(self.ring, va - r.val);
            let nf = -f.clone();
            axpy(&mut w, &nf, &r.v);
            if let (Some(cm), Some(cr)) = (&mut comb, &r.coef) {
                axpy(cm, &f, cr);
            }
        }
        (w, comb)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Coefficients λ with v = Σ λ_k g_k over the inserted generators.
    pub fn express(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert!(self.track, "express requires a tracking span");
        let (w, c) = self.reduce_tracking(v);
        w.iter().all(|x| x.is_zero()).then(|| c.unwrap())
    }

    pub fn contains_span(&self, o: &Span) -> bool {
        o.rows.iter().all(|r| self.contains(&r.v))
    }

    pub fn same_as(&self, o: &Span) -> bool {
        self.contains_span(o) && o.contains_span(self)
    }

    /// Composition length (dimension over a field).
    pub fn length(&self) -> u32 {
        let n = nilpotency(self.ring);
        self.rows.iter().map(|r| n - r.val).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Generators in Howell form.
    pub fn basis(&self) -> Vec<Vec<Scalar>> {
        self.rows.iter().map(|r| r.v.clone()).collect()
    }

    /// Pivot column and valuation of every row.
    pub fn pivots(&self) -> Vec<(usize, u32)> {
        self.rows.iter().map(|r| (r.col, r.val)).collect()
    }

    pub fn sum(&self, o: &Span) -> Span {
        let mut s = Span::new(self.ring, self.dim);
        for r in self.rows.iter().chain(&o.rows) {
            s.insert(r.v.clone());
        }
        s
    }

    /// Image of the span under a linear map given as a closure.
    pub fn image(&self, dim: usize, f: impl Fn(&[Scalar]) -> Vec<Scalar>) -> Span {
        Span::from_vectors(self.ring, dim, self.rows.iter().map(|r| f(&r.v)))
    }
}

/// Smith normal form of a matrix over ℤ/pⁿ: P·A·Q = D with D diagonal p-powers.
pub struct ZpnSnf {
    /// valuations of the diagonal entries, `n` for zero entries
    pub diag: Vec<u32>,
    /// column transform Q (cols × cols)
    pub q: Vec<Vec<Zpn>>,
    /// inverse of Q
    pub q_inv: Vec<Vec<Zpn>>,
}

pub fn zpn_snf(p: u64, n: u32, a: &[Vec<Zpn>], cols: usize) -> ZpnSnf {
    let rows = a.len();
    let z = |v: i64| Zpn::new(p, n, v);
    let mut m: Vec<Vec<Zpn>> = a.to_vec();
    let mut q: Vec<Vec<Zpn>> = (0..cols).map(|i| (0..cols).map(|j| z((i == j) as i64)).collect()).collect();
    let mut qi = q.clone();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // minimal valuation entry in the remaining block
        let mut best: Option<(usize, usize, u32)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = m[i][j].valuation();
                if v < n && best.is_none_or(|b| v < b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((bi, bj, v)) = best else { break };
        m.swap(t, bi);
        if bj != t {
            for r in m.iter_mut() {
                r.swap(t, bj);
            }
            for r in q.iter_mut() {
                r.swap(t, bj);
            }
            qi.swap(t, bj);
        }
        let (u, _) = m[t][t].unit_part();
        let ui = u.inv().unwrap();
        for x in m[t].iter_mut() {
            *x = x.mul(ui);
        }
        // clear column t by row operations
        for i in 0..rows {
            if i == t || m[i][t].rep == 0 {
                continue;
            }
            let (ui2, vi) = m[i][t].unit_part();
            let f = ui2.mul(z((p as i64).pow(vi - v)));
            for j in 0..cols {
                let d = f.mul(m[t][j]);
                m[i][j] = m[i][j].sub(d);
            }
        }
        // clear row t by column operations, mirrored on Q and Q⁻¹
        for j in 0..cols {
            if j == t || m[t][j].rep == 0 {
                continue;
            }
            let (uj, vj) = m[t][j].unit_part();
            let f = uj.mul(z((p as i64).pow(vj - v)));
            for r in m.iter_mut() {
                let d = f.mul(r[t]);
                r[j] = r[j].sub(d);
            }
            for r in q.iter_mut() {
                let d = f.mul(r[t]);
                r[j] = r[j].sub(d);
            }
            // Q⁻¹ gets the inverse row operation: row t += f·row j
            let rowj = qi[j].clone();
            for (x, y) in qi[t].iter_mut().zip(rowj) {
                *x = x.add(f.mul(y));
            }
        }
        diag.push(v);
        t += 1;
    }
    diag.resize(rows.min(cols), n);
    ZpnSnf { diag, q, q_inv: qi }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zv(p: u64, n: u32, xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::modular(p, n, x)).collect()
    }

    #[test]
    fn howell_span_over_z9_matches_enumeration() {
        let ring = BaseRing::Zpn { p: 3, n: 2 };
        let gens = vec![zv(3, 2, &[3, 1, 0]), zv(3, 2, &[0, 3, 6])];
        let s = Span::from_vectors(ring, 3, gens.clone());
        let mut elems = std::collections::BTreeSet::new();
        for a in 0..9 {
            for b in 0..9 {
                let v: Vec<u64> = (0..3)
                    .map(|k| {
                        let x = a * match &gens[0][k] {
                            Scalar::Modular(z) => z.rep,
                            _ => 0,
                        } + b * match &gens[1][k] {
                            Scalar::Modular(z) => z.rep,
                            _ => 0,
                        };
                        x % 9
                    })
                    .collect();
                elems.insert(v);
            }
        }
        // length is log_3 of the module size
        let size = elems.len() as u64;
        assert_eq!(3u64.pow(s.length()), size);
        for a in 0..9 {
            for b in 0..9 {
                for c in 0..9 {
                    let v = vec![a, b, c];
                    let inside = elems.contains(&v);
                    assert_eq!(s.contains(&zv(3, 2, &[a as i64, b as i64, c as i64])), inside);
                }
            }
        }
    }

    #[test]
    fn tracking_expresses_members() {
        let ring = BaseRing::Rationals;
        let mut s = Span::tracking(ring, 2);
        s.insert(vec![Scalar::from_int(1), Scalar::from_int(1)]);
        s.insert(vec![Scalar::from_int(1), Scalar::from_int(-1)]);
        let lam = s.express(&[Scalar::from_int(3), Scalar::from_int(1)]).unwrap();
        assert_eq!(lam, vec![Scalar::from_int(2), Scalar::from_int(1)]);
    }

    #[test]
    fn snf_diagonalizes() {
        let z = |v| Zpn::new(3, 2, v);
        let a = vec![vec![z(3), z(6)], vec![z(1), z(2)]];
        let s = zpn_snf(3, 2, &a, 2);
        assert_eq!(s.diag, vec![0, 2]);
    }
}
