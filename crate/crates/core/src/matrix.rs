//! Dense matrices over an exact [`Field`].
//!
//! Row reduction uses the first nonzero entry of each column as pivot, so every
//! echelon form, kernel basis and rank decision is reproducible.

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_rows(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_nested(rows: usize, cols: usize, nested: Vec<Vec<E>>) -> Result<Self> {
        if nested.len() != rows || nested.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!(
                "expected {rows}x{cols} entries"
            )));
        }
        Ok(Matrix {
            rows,
            cols,
            data: nested.into_iter().flatten().collect(),
        })
    }

    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn to_nested(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map<T, G: FnMut(&E) -> T>(&self, f: G) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &Matrix<E>) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix<E> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in r0..r0 + rows {
            data.extend_from_slice(&self.data[r * self.cols + c0..r * self.cols + c0 + cols]);
        }
        Matrix { rows, cols, data }
    }
}

impl<E: Clone + PartialEq> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, f.zero())
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn is_identity<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.is_square() && *self == Matrix::identity(f, self.rows)
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, rhs: &Matrix<E>) -> Result<Matrix<E>> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..rhs.cols {
                    let prod = f.mul(a, rhs.get(k, c));
                    let idx = r * rhs.cols + c;
                    out.data[idx] = f.add(&out.data[idx], &prod);
                }
            }
        }
        Ok(out)
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, rhs: &Matrix<E>) -> Result<Matrix<E>> {
        self.zip(rhs, |a, b| f.add(a, b))
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, rhs: &Matrix<E>) -> Result<Matrix<E>> {
        self.zip(rhs, |a, b| f.sub(a, b))
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: &E) -> Matrix<E> {
        self.map(|x| f.mul(s, x))
    }

    fn zip(&self, rhs: &Matrix<E>, op: impl Fn(&E, &E) -> E) -> Result<Matrix<E>> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| op(a, b)).collect(),
        })
    }

    /// Block-diagonal sum `[[self, 0], [0, other]]`.
    pub fn block_diag<F: Field<Elem = E>>(&self, f: &F, other: &Matrix<E>) -> Matrix<E> {
        let mut out = Matrix::zeros(f, self.rows + other.rows, self.cols + other.cols);
        out.put_block(0, 0, self);
        out.put_block(self.rows, self.cols, other);
        out
    }

    /// Reduce in place to reduced row-echelon form; returns the pivot columns.
    pub fn rref_in_place<F: Field<Elem = E>>(&mut self, f: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..self.cols {
            if pr == self.rows {
                break;
            }
            let Some(r) = (pr..self.rows).find(|&r| !f.is_zero(self.get(r, c))) else {
                continue;
            };
            self.swap_rows(pr, r);
            let inv = f.inv(self.get(pr, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let v = f.mul(self.get(pr, j), &inv);
                self.set(pr, j, v);
            }
            for r2 in 0..self.rows {
                if r2 == pr || f.is_zero(self.get(r2, c)) {
                    continue;
                }
                let factor = self.get(r2, c).clone();
                for j in c..self.cols {
                    let v = f.sub(self.get(r2, j), &f.mul(&factor, self.get(pr, j)));
                    self.set(r2, j, v);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        pivots
    }

    pub fn rref<F: Field<Elem = E>>(&self, f: &F) -> (Matrix<E>, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(f);
        (m, pivots)
    }

    pub fn rank<F: Field<Elem = E>>(&self, f: &F) -> usize {
        self.rref(f).1.len()
    }

    /// Basis of `{x : self·x = 0}`, one vector per free column, in column order.
    pub fn kernel<F: Field<Elem = E>>(&self, f: &F) -> Vec<Vec<E>> {
        let (red, pivots) = self.rref(f);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![f.zero(); self.cols];
                v[free] = f.one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = f.neg(red.get(r, free));
                }
                v
            })
            .collect()
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det<F: Field<Elem = E>>(&self, f: &F) -> Result<E> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(f.one());
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = f.one();
        for k in 0..n - 1 {
            if f.is_zero(m.get(k, k)) {
                match (k + 1..n).find(|&r| !f.is_zero(m.get(r, k))) {
                    Some(r) => {
                        m.swap_rows(k, r);
                        negate = !negate;
                    }
                    None => return Ok(f.zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = f.sub(
                        &f.mul(m.get(i, j), m.get(k, k)),
                        &f.mul(m.get(i, k), m.get(k, j)),
                    );
                    let v = f.div(&t, &prev).expect("Bareiss divisor is a nonzero pivot");
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        let d = m.get(n - 1, n - 1).clone();
        Ok(if negate { f.neg(&d) } else { d })
    }

    /// Exact inverse, or `None` when singular.
    pub fn inverse<F: Field<Elem = E>>(&self, f: &F) -> Result<Option<Matrix<E>>> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(f, n, 2 * n);
        aug.put_block(0, 0, self);
        aug.put_block(0, n, &Matrix::identity(f, n));
        let pivots = aug.rref_in_place(f);
        if pivots.len() < n || pivots[..n].iter().enumerate().any(|(i, &p)| p != i) {
            return Ok(None);
        }
        Ok(Some(aug.block(0, n, n, n)))
    }

    pub fn mul_vec<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}
