//! Small dense matrices over an exact commutative ring.

use std::fmt;

use crate::error::{Error, Result};
use crate::ffalg::FpRatFn;

/// Ring operations needed by [`Matrix`]; constants are produced from a
/// sample element because some rings carry parameters (the prime).
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

/// A ring in which nonzero elements are invertible.
pub trait Field: Ring {
    fn inv(&self) -> Result<Self>;
}

impl Ring for FpRatFn {
    fn zero_like(&self) -> Self {
        FpRatFn::zero(self.prime())
    }
    fn one_like(&self) -> Self {
        FpRatFn::one(self.prime())
    }
    fn is_zero(&self) -> bool {
        FpRatFn::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Field for FpRatFn {
    fn inv(&self) -> Result<Self> {
        FpRatFn::inv(self)
    }
}

/// Row-major `rows x cols` matrix; always nonempty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Invalid("matrix rows must be nonempty and of equal length".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut f = f;
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, data }
    }

    pub fn scalar(x: T) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![x],
        }
    }

    pub fn zeros_like(sample: &T, rows: usize, cols: usize) -> Self {
        let z = sample.zero_like();
        Matrix::from_fn(rows, cols, |_, _| z.clone())
    }

    pub fn identity_like(sample: &T, n: usize) -> Self {
        let z = sample.zero_like();
        let o = sample.one_like();
        Matrix::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn diagonal(entries: Vec<T>) -> Self {
        let n = entries.len();
        let z = entries[0].zero_like();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { z.clone() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols).map(<[T]>::to_vec).collect()
    }

    pub fn sample(&self) -> &T {
        &self.data[0]
    }

    pub fn map<U: Ring>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Ring>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<Matrix<U>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        *x == x.one_like()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn add(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Matrix<T> {
        self.map(Ring::neg)
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        self.map(|x| c.mul(x))
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let zero = self.sample().zero_like();
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = zero.clone();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            acc
        })
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Kronecker product, indexing `(i1 * r2 + i2, j1 * c2 + j2)`.
    pub fn kron(&self, other: &Matrix<T>) -> Matrix<T> {
        let (r2, c2) = (other.rows, other.cols);
        Matrix::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            let a = self.get(i / r2, j / c2);
            let b = other.get(i % r2, j % c2);
            if a.is_zero() || b.is_zero() {
                a.zero_like()
            } else {
                a.mul(b)
            }
        })
    }

    pub fn block_diag(&self, other: &Matrix<T>) -> Matrix<T> {
        let zero = self.sample().zero_like();
        Matrix::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => other.get(i - self.rows, j - self.cols).clone(),
                _ => zero.clone(),
            }
        })
    }

    /// First `(row, col)` where the matrices differ.
    pub fn first_difference(&self, other: &Matrix<T>) -> Option<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != other.get(i, j))
    }
}

impl<T: Field> Matrix<T> {
    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix<T>> {
        if !self.is_square() {
            return Err(Error::RankMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Matrix::identity_like(self.sample(), n).to_rows();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::Invalid("singular matrix".into()))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let pinv = a[col][col].inv()?;
            for j in 0..n {
                a[col][j] = a[col][j].mul(&pinv);
                inv[col][j] = inv[col][j].mul(&pinv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    let x = f.mul(&a[col][j]);
                    a[r][j] = a[r][j].sub(&x);
                    let y = f.mul(&inv[col][j]);
                    inv[r][j] = inv[r][j].sub(&y);
                }
            }
        }
        Matrix::from_rows(inv)
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols)).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffalg::{parse_ratfn, Prime};

    fn m(p: Prime, rows: &[&[&str]]) -> Matrix<FpRatFn> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_ratfn(p, s, "t").unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn inverse_and_products() {
        let p = Prime::new(5).unwrap();
        let a = m(p, &[&["t", "1"], &["1/t", "2"]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(inv.mul(&a).is_identity());
        let k = a.kron(&Matrix::identity_like(a.sample(), 2));
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(2, 0), a.get(1, 0));
        assert!(m(p, &[&["1", "t"], &["1", "t"]]).inverse().is_err());
    }

    #[test]
    fn block_and_transpose() {
        let p = Prime::new(3).unwrap();
        let a = m(p, &[&["t", "1"]]);
        assert_eq!(a.transpose().rows(), 2);
        let b = a.block_diag(&m(p, &[&["2"]]));
        assert_eq!((b.rows(), b.cols()), (2, 3));
        assert!(b.get(1, 0).is_zero());
        assert_eq!(a.first_difference(&m(p, &[&["t", "2"]])), Some((0, 1)));
        assert!(Matrix::<FpRatFn>::from_rows(vec![]).is_err());
    }
}
