//! Dense matrices with exact Gaussian elimination.
//!
//! Elimination only pivots on units, so the same code serves fields and local
//! rings such as ℚ[t]/(tᵐ) as long as a unit pivot exists in every step.

use std::fmt;

use super::scalar::Coeff;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<K: Coeff> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon<K: Coeff> {
    pub matrix: Matrix<K>,
    pub pivots: Vec<usize>,
}

impl<K: Coeff> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![K::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = K::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Self::from_rows_with_cols(rows, c).unwrap_or_else(|| panic!("ragged rows ({r} rows)"))
    }

    pub fn from_rows_with_cols(rows: Vec<Vec<K>>, cols: usize) -> Option<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return None;
            }
            data.extend(row);
        }
        Some(Matrix { rows: r, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> K) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<K> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<K>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, o: &Matrix<K>) -> Matrix<K> {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out: Matrix<K> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[K]) -> Vec<K> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut s = K::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s = s + a.clone() * b.clone();
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix<K>) -> Matrix<K> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, o: &Matrix<K>) -> Matrix<K> {
        self.add(&o.scale(&-K::one()))
    }

    pub fn scale(&self, c: &K) -> Matrix<K> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn trace(&self) -> K {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        (0..self.rows).fold(K::zero(), |s, i| s + self[(i, i)].clone())
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, o: &Matrix<K>) -> Matrix<K> {
        assert_eq!(self.rows, o.rows);
        Matrix::from_fn(
            self.rows,
            self.cols + o.cols,
            |i, j| {
                if j < self.cols {
                    self[(i, j)].clone()
                } else {
                    o[(i, j - self.cols)].clone()
                }
            },
        )
    }

    /// Vertical concatenation.
    pub fn vcat(&self, o: &Matrix<K>) -> Matrix<K> {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, o: &Matrix<K>) -> Matrix<K> {
        Matrix::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)].clone()
            } else if i >= self.rows && j >= self.cols {
                o[(i - self.rows, j - self.cols)].clone()
            } else {
                K::zero()
            }
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<K> {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn map<L: Coeff>(&self, f: impl Fn(&K) -> L) -> Matrix<L> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form; pivots must be units.
    ///
    /// Fails with `NotAField` when a column has nonzero entries but no unit.
    pub fn rref(&self) -> Result<Echelon<K>> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut found = None;
            let mut nonunit = false;
            for i in r..m.rows {
                if m[(i, c)].is_zero() {
                    continue;
                }
                if m[(i, c)].is_unit() {
                    found = Some(i);
                    break;
                }
                nonunit = true;
            }
            let Some(pi) = found else {
                if nonunit {
                    return Err(Error::NotAField(format!("no unit pivot in column {c}")));
                }
                continue;
            };
            m.swap_rows(r, pi);
            let inv = m[(r, c)].try_inv().unwrap();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok(Echelon { matrix: m, pivots })
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.pivots.len())
    }

    /// Basis of the right kernel {v : A v = 0}, one vector per free column.
    pub fn kernel(&self) -> Result<Vec<Vec<K>>> {
        let e = self.rref()?;
        let mut out = Vec::new();
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        for &f in &free {
            let mut v = vec![K::zero(); self.cols];
            v[f] = K::one();
            for (r, &p) in e.pivots.iter().enumerate() {
                v[p] = -e.matrix[(r, f)].clone();
            }
            out.push(v);
        }
        Ok(out)
    }

    /// One solution of A x = b, or None if inconsistent.
    pub fn solve(&self, b: &[K]) -> Result<Option<Vec<K>>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hcat(&Matrix::from_fn(self.rows, 1, |i, _| b[i].clone()));
        let e = aug.rref()?;
        if e.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![K::zero(); self.cols];
        for (r, &p) in e.pivots.iter().enumerate() {
            x[p] = e.matrix[(r, self.cols)].clone();
        }
        Ok(Some(x))
    }

    /// Solve A X = B column by column.
    pub fn solve_matrix(&self, b: &Matrix<K>) -> Result<Option<Matrix<K>>> {
        let aug = self.hcat(b);
        let e = aug.rref()?;
        if e.pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (r, &p) in e.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(p, j)] = e.matrix[(r, self.cols + j)].clone();
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Option<Matrix<K>>> {
        assert_eq!(self.rows, self.cols);
        if self.rank()? < self.rows {
            return Ok(None);
        }
        self.solve_matrix(&Matrix::identity(self.rows))
    }

    pub fn determinant(&self) -> K {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return K::one();
        }
        // Laplace for tiny sizes keeps this valid over any commutative ring
        if n == 1 {
            return self[(0, 0)].clone();
        }
        let mut s = K::zero();
        for j in 0..n {
            if self[(0, j)].is_zero() {
                continue;
            }
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = self.submatrix(&rows, &cols).determinant();
            let t = self[(0, j)].clone() * minor;
            s = if j % 2 == 0 { s + t } else { s - t };
        }
        s
    }
}

impl<K: Coeff> std::ops::Index<(usize, usize)> for Matrix<K> {
    type Output = K;
    fn index(&self, (i, j): (usize, usize)) -> &K {
        &self.data[i * self.cols + j]
    }
}

impl<K: Coeff> std::ops::IndexMut<(usize, usize)> for Matrix<K> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut K {
        &mut self.data[i * self.cols + j]
    }
}

impl<K: Coeff> fmt::Display for Matrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", r.join(", "))?;
        }
        Ok(())
    }
}

/// Rank of the column span of a list of vectors.
pub fn span_rank<K: Coeff>(vectors: &[Vec<K>], dim: usize) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    Matrix::from_rows_with_cols(vectors.to_vec(), dim).expect("vector length").rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{rint, Rational, Scalar};

    fn q(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(rint).collect()).collect())
    }

    #[test]
    fn rank_kernel_solve() {
        let a = q(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(a.rank().unwrap(), 2);
        let k = a.kernel().unwrap();
        assert_eq!(k.len(), 1);
        assert!(a.apply(&k[0]).iter().all(Coeff::is_zero));
        let b = vec![rint(4), rint(8), rint(2)];
        let x = a.solve(&b).unwrap().unwrap();
        assert_eq!(a.apply(&x), b);
        assert!(a.solve(&[rint(1), rint(0), rint(0)]).unwrap().is_none());
    }

    #[test]
    fn determinant_and_inverse() {
        let a = q(vec![vec![2, 1], vec![7, 4]]);
        assert_eq!(a.determinant(), rint(1));
        let inv = a.inverse().unwrap().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
    }

    #[test]
    fn modular_elimination() {
        let m = Matrix::from_rows(vec![
            vec![Scalar::modular(3, 1, 1), Scalar::modular(3, 1, 2)],
            vec![Scalar::modular(3, 1, 2), Scalar::modular(3, 1, 1)],
        ]);
        assert_eq!(m.rank().unwrap(), 1);
    }
}
