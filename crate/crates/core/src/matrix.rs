//! Dense row-major matrices over any [`Scalar`] domain.

use std::ops::{Index, IndexMut};

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{BigInt, HpComplex, Precision, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    ctx: T::Ctx,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize, ctx: T::Ctx) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(ctx); rows * cols],
            ctx,
        }
    }

    pub fn identity(n: usize, ctx: T::Ctx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m[(i, i)] = T::one(ctx);
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        ctx: T::Ctx,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            data,
            ctx,
        }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<T>>, ctx: T::Ctx) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
            ctx,
        })
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

    pub fn ctx(&self) -> T::Ctx {
        self.ctx
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U: Scalar>(&self, ctx: U::Ctx, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            ctx,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.ctx, |i, j| self[(j, i)].clone())
    }

    /// The submatrix on the given row and column indices, repeats allowed.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), self.ctx, |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::invalid(format!(
                "shape mismatch {}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols, self.ctx);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let mut t = a.clone();
                    t.mul_assign_ref(&rhs[(k, j)]);
                    out[(i, j)].add_assign_ref(&t);
                }
            }
        }
        Ok(out)
    }

    /// Multiplies row `i` by `c`.
    pub fn scale_row(&mut self, i: usize, c: &T) {
        for j in 0..self.cols {
            self[(i, j)].mul_assign_ref(c);
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix<BigInt> {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
            (),
        )
    }
}

impl Matrix<HpComplex> {
    pub fn prec(&self) -> Precision {
        self.ctx
    }

    pub fn from_f64_rows(prec: Precision, rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| HpComplex::from_f64(prec, v, 0.0))
                        .collect()
                })
                .collect(),
            prec,
        )
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.ctx, |i, j| self[(j, i)].conj())
    }

    /// Largest entrywise distance `max |a_ij - b_ij|`.
    pub fn max_dist(&self, other: &Self) -> Float {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.dist(b))
            .fold(Float::new(self.ctx.bits()), |acc, d| acc.max(&d))
    }

    /// `max |M†M − I|`.
    pub fn unitarity_defect(&self) -> Float {
        let gram = self
            .conj_transpose()
            .matmul(self)
            .expect("square matrix is conformable with its adjoint");
        gram.max_dist(&Self::identity(self.cols, self.ctx))
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> Float {
        self.data
            .iter()
            .map(|z| Float::with_val(self.ctx.bits(), z.im().abs_ref()))
            .fold(Float::new(self.ctx.bits()), |acc, d| acc.max(&d))
    }

    /// Largest row sum of absolute values (the induced ∞-norm).
    pub fn inf_norm(&self) -> Float {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .fold(Float::new(self.ctx.bits()), |acc, z| acc + z.abs())
            })
            .fold(Float::new(self.ctx.bits()), |acc, d| acc.max(&d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_repeats_rows_and_columns() {
        let m = Matrix::from_i64_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        let s = m.select(&[0, 0, 1], &[1, 1]);
        assert_eq!(
            s,
            Matrix::from_i64_rows(&[vec![2, 2], vec![2, 2], vec![4, 4]]).unwrap()
        );
    }

    #[test]
    fn matmul_and_transpose() {
        let a = Matrix::from_i64_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        let b = Matrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(
            a.matmul(&b).unwrap(),
            Matrix::from_i64_rows(&[vec![2, 1], vec![4, 3]]).unwrap()
        );
        assert_eq!(
            a.transpose(),
            Matrix::from_i64_rows(&[vec![1, 3], vec![2, 4]]).unwrap()
        );
        assert!(a.matmul(&Matrix::zeros(3, 1, ())).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::<BigInt>::from_rows(vec![vec![BigInt::from(1)], vec![]], ()).is_err());
    }
}
