use std::fmt;
use std::ops::{Index, IndexMut};

use super::scalar::{self, Scalar};
use super::AbelianError;

/// Dense integer matrix, row-major. Matrices act on column vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> IntMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Diagonal matrix of shape `rows × cols` with the given leading diagonal.
    pub fn diagonal(rows: usize, cols: usize, diag: &[T]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Builds a matrix from rows. `cols` is needed to give zero-row matrices a width.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self, AbelianError> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(AbelianError::Shape(format!(
                    "row {i} has length {}, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(IntMatrix { rows: r, cols, data })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| scalar::from_i64(v)).collect())
            .collect();
        Self::from_rows(rows, cols).expect("rectangular literal")
    }

    /// Single column matrix.
    pub fn column(v: &[T]) -> Self {
        IntMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AbelianError> {
        if self.cols != other.rows {
            return Err(AbelianError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = scalar::axpy(&out[(i, j)], a, b)?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>, AbelianError> {
        if self.cols != v.len() {
            return Err(AbelianError::Shape(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .try_fold(T::zero(), |acc, (a, b)| scalar::axpy(&acc, a, b))
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self, AbelianError> {
        self.zip_with(other, scalar::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AbelianError> {
        self.zip_with(other, scalar::sub)
    }

    pub fn scale(&self, k: &T) -> Result<Self, AbelianError> {
        let data = self.data.iter().map(|v| scalar::mul(v, k)).collect::<Result<_, _>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&T, &T) -> Result<T, AbelianError>,
    ) -> Result<Self, AbelianError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AbelianError::Shape(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect::<Result<_, _>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self, AbelianError> {
        if self.rows != other.rows {
            return Err(AbelianError::Shape(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        Ok(out)
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Adds `block` into `self` at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &Self) -> Result<(), AbelianError> {
        for i in 0..block.rows {
            for j in 0..block.cols {
                let v = scalar::add(&self[(r0 + i, c0 + j)], &block[(i, j)])?;
                self[(r0 + i, c0 + j)] = v;
            }
        }
        Ok(())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<T, AbelianError> {
        if self.rows != self.cols {
            return Err(AbelianError::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(T::one());
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(T::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = scalar::sub(
                        &scalar::mul(&a[(i, j)], &a[(k, k)])?,
                        &scalar::mul(&a[(i, k)], &a[(k, j)])?,
                    )?;
                    a[(i, j)] = scalar::div(&t, &prev)?;
                }
            }
            prev = a[(k, k)].clone();
        }
        scalar::mul(&sign, &a[(n - 1, n - 1)])
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += f * row[src]`
    pub(crate) fn add_row_multiple(&mut self, target: usize, src: usize, f: &T) -> Result<(), AbelianError> {
        if f.is_zero() {
            return Ok(());
        }
        for j in 0..self.cols {
            let v = scalar::axpy(&self[(target, j)], f, &self[(src, j)])?;
            self[(target, j)] = v;
        }
        Ok(())
    }

    /// `col[target] += f * col[src]`
    pub(crate) fn add_col_multiple(&mut self, target: usize, src: usize, f: &T) -> Result<(), AbelianError> {
        if f.is_zero() {
            return Ok(());
        }
        for i in 0..self.rows {
            let v = scalar::axpy(&self[(i, target)], f, &self[(i, src)])?;
            self[(i, target)] = v;
        }
        Ok(())
    }

    pub(crate) fn negate_row(&mut self, i: usize) -> Result<(), AbelianError> {
        for j in 0..self.cols {
            self[(i, j)] = scalar::neg(&self[(i, j)])?;
        }
        Ok(())
    }

    pub(crate) fn negate_col(&mut self, j: usize) -> Result<(), AbelianError> {
        for i in 0..self.rows {
            self[(i, j)] = scalar::neg(&self[(i, j)])?;
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for IntMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for IntMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for IntMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_small() {
        let m = IntMatrix::<i64>::from_i64_rows(&[&[2, 4], &[6, 8]]);
        assert_eq!(m.determinant().unwrap(), -8);
        let m = IntMatrix::<i64>::from_i64_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(m.determinant().unwrap(), -1);
        let m = IntMatrix::<i64>::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(m.determinant().unwrap(), 0);
        let m = IntMatrix::<i64>::from_i64_rows(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(m.determinant().unwrap(), 4);
    }

    #[test]
    fn product_and_shapes() {
        let a = IntMatrix::<i64>::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let b = IntMatrix::<i64>::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), IntMatrix::from_i64_rows(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.mul_vec(&[1, 1]).unwrap(), vec![3, 7]);
        assert!(a.mul(&IntMatrix::zeros(3, 1)).is_err());
        let empty = IntMatrix::<i64>::zeros(2, 0).mul(&IntMatrix::zeros(0, 3)).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (2, 3));
        assert!(empty.is_zero());
    }
}
