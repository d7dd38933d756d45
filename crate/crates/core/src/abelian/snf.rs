//! Smith normal form by unimodular row and column operations.
//!
//! Every elementary operation applied to the input is mirrored on `u` (rows)
//! or `v` (columns), and its inverse on `u_inv` / `v_inv`, so the caller gets
//! both transforms and their inverses without a separate inversion step.

use super::matrix::IntMatrix;
use super::scalar::{self, Scalar};
use super::AbelianError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult<T> {
    /// Left transform, `rows × rows`, unimodular.
    pub u: IntMatrix<T>,
    pub u_inv: IntMatrix<T>,
    /// Diagonal form, same shape as the input.
    pub d: IntMatrix<T>,
    /// Right transform, `cols × cols`, unimodular.
    pub v: IntMatrix<T>,
    pub v_inv: IntMatrix<T>,
    /// Number of nonzero diagonal entries; they occupy positions `0..rank`.
    pub rank: usize,
}

impl<T: Scalar> SnfResult<T> {
    /// Diagonal entries `d[(i, i)]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }
}

struct Reducer<T> {
    a: IntMatrix<T>,
    u: IntMatrix<T>,
    u_inv: IntMatrix<T>,
    v: IntMatrix<T>,
    v_inv: IntMatrix<T>,
}

impl<T: Scalar> Reducer<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    /// row[target] += f * row[src]
    fn add_row(&mut self, target: usize, src: usize, f: &T) -> Result<(), AbelianError> {
        self.a.add_row_multiple(target, src, f)?;
        self.u.add_row_multiple(target, src, f)?;
        self.u_inv.add_col_multiple(src, target, &scalar::neg(f)?)
    }

    /// col[target] += f * col[src]
    fn add_col(&mut self, target: usize, src: usize, f: &T) -> Result<(), AbelianError> {
        self.a.add_col_multiple(target, src, f)?;
        self.v.add_col_multiple(target, src, f)?;
        self.v_inv.add_row_multiple(src, target, &scalar::neg(f)?)
    }

    fn negate_row(&mut self, i: usize) -> Result<(), AbelianError> {
        self.a.negate_row(i)?;
        self.u.negate_row(i)?;
        self.u_inv.negate_col(i)
    }

    /// Position of a nonzero entry of least absolute value in the trailing block.
    fn smallest_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), T)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let v = self.a[(i, j)].abs();
                if v.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, b)| v < *b) {
                    best = Some(((i, j), v));
                }
            }
        }
        best.map(|(pos, _)| pos)
    }

    /// Clears row and column `t` below/right of the pivot. Returns true when
    /// some remainder survived, i.e. a smaller pivot now exists.
    fn eliminate(&mut self, t: usize) -> Result<bool, AbelianError> {
        let mut residue = false;
        let p = self.a[(t, t)].clone();
        for i in t + 1..self.a.rows() {
            if self.a[(i, t)].is_zero() {
                continue;
            }
            let q = nearest_quotient(&self.a[(i, t)], &p)?;
            self.add_row(i, t, &scalar::neg(&q)?)?;
            residue |= !self.a[(i, t)].is_zero();
        }
        for j in t + 1..self.a.cols() {
            if self.a[(t, j)].is_zero() {
                continue;
            }
            let q = nearest_quotient(&self.a[(t, j)], &p)?;
            self.add_col(j, t, &scalar::neg(&q)?)?;
            residue |= !self.a[(t, j)].is_zero();
        }
        Ok(residue)
    }

    /// A row below `t` holding an entry the pivot does not divide.
    fn non_divisible_row(&self, t: usize) -> Option<usize> {
        let p = &self.a[(t, t)];
        (t + 1..self.a.rows()).find(|&i| (t + 1..self.a.cols()).any(|j| !self.a[(i, j)].is_multiple_of(p)))
    }
}

/// Quotient rounded to nearest, so the remainder satisfies `|r| ≤ |p| / 2`.
fn nearest_quotient<T: Scalar>(a: &T, p: &T) -> Result<T, AbelianError> {
    let q = scalar::div(a, p)?;
    let r = scalar::sub(a, &scalar::mul(&q, p)?)?;
    let twice = scalar::add(&r, &r)?;
    if twice.abs() <= p.abs() {
        return Ok(q);
    }
    // r and a share a sign; step q away from zero in the direction of a / p
    if r.is_negative() == p.is_negative() {
        scalar::add(&q, &T::one())
    } else {
        scalar::sub(&q, &T::one())
    }
}

/// Smith normal form of an integer matrix: `u · m · v = d`, `d` diagonal with
/// nonnegative entries `d₁ | d₂ | …`, zeros last.
///
/// Deterministic for a fixed input. Fails only with [`AbelianError::Overflow`]
/// when a fixed-width scalar cannot hold an intermediate entry.
pub fn snf<T: Scalar>(m: &IntMatrix<T>) -> Result<SnfResult<T>, AbelianError> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = Reducer {
        a: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        while let Some((i, j)) = r.smallest_entry(t) {
            r.swap_rows(t, i);
            r.swap_cols(t, j);
            if r.eliminate(t)? {
                continue;
            }
            match r.non_divisible_row(t) {
                Some(i) => r.add_row(t, i, &T::one())?,
                None => break,
            }
        }
        if r.a[(t, t)].is_zero() {
            break;
        }
        if r.a[(t, t)].is_negative() {
            r.negate_row(t)?;
        }
        rank += 1;
    }
    Ok(SnfResult { u: r.u, u_inv: r.u_inv, d: r.a, v: r.v, v_inv: r.v_inv, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn check<T: Scalar>(m: &IntMatrix<T>, s: &SnfResult<T>) {
        assert_eq!(s.u.mul(m).unwrap().mul(&s.v).unwrap(), s.d, "u m v = d");
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(m.cols()));
        assert!(s.u.determinant().unwrap().abs().is_one());
        assert!(s.v.determinant().unwrap().abs().is_one());
        let diag = s.diagonal();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        assert!(diag.iter().all(|v| !v.is_negative()));
        for w in diag.windows(2) {
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero(), "zeros must trail");
            assert!(w[1].is_multiple_of(&w[0]), "divisibility chain {diag:?}");
        }
        assert_eq!(diag.iter().filter(|v| !v.is_zero()).count(), s.rank);
    }

    #[test]
    fn identity_is_fixed() {
        let m = IntMatrix::<i64>::identity(2);
        let s = snf(&m).unwrap();
        assert_eq!(s.d, m);
        check(&m, &s);
    }

    #[test]
    fn already_diagonal() {
        let m = IntMatrix::<i64>::from_i64_rows(&[&[2, 0], &[0, 4]]);
        let s = snf(&m).unwrap();
        assert_eq!(s.diagonal(), vec![2, 4]);
        check(&m, &s);
    }

    #[test]
    fn two_by_two_reduction() {
        // d1 = gcd of entries = 2, d1 d2 = |det| = 8
        let m = IntMatrix::<i64>::from_i64_rows(&[&[2, 4], &[6, 8]]);
        let s = snf(&m).unwrap();
        assert_eq!(s.diagonal(), vec![2, 4]);
        check(&m, &s);
    }

    #[test]
    fn divisibility_repair() {
        // diag(2, 3) is diagonal but not in divisibility form: expect diag(1, 6).
        let m = IntMatrix::<i64>::from_i64_rows(&[&[2, 0], &[0, 3]]);
        let s = snf(&m).unwrap();
        assert_eq!(s.diagonal(), vec![1, 6]);
        check(&m, &s);
    }

    #[test]
    fn zero_and_degenerate_shapes() {
        for (r, c) in [(0, 0), (0, 3), (3, 0), (2, 3)] {
            let m = IntMatrix::<i64>::zeros(r, c);
            let s = snf(&m).unwrap();
            assert_eq!(s.rank, 0);
            check(&m, &s);
        }
    }

    #[test]
    fn rectangular_with_trailing_zero() {
        let m = IntMatrix::<i64>::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9], &[2, 4, 6]]);
        let s = snf(&m).unwrap();
        assert_eq!(s.diagonal(), vec![1, 3, 0]);
        check(&m, &s);
    }

    #[test]
    fn fixed_width_overflow_is_reported() {
        let big = i64::MAX / 2 + 7;
        let m = IntMatrix::<i64>::from_i64_rows(&[&[big, big - 1], &[big - 3, big + 1]]);
        // Either the reduction fits or it fails loudly; it must never wrap.
        match snf(&m) {
            Ok(s) => check(&m, &s),
            Err(e) => assert_eq!(e, AbelianError::Overflow),
        }
        let as_big = IntMatrix::<BigInt>::from_i64_rows(&[&[big, big - 1], &[big - 3, big + 1]]);
        let s = snf(&as_big).unwrap();
        check(&as_big, &s);
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix<i64>> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-20i64..=20, r * c).prop_map(move |data| {
                let rows = data.chunks(c).map(|ch| ch.to_vec()).collect();
                IntMatrix::from_rows(rows, c).unwrap()
            })
        })
    }

    fn to_big(m: &IntMatrix<i64>) -> IntMatrix<BigInt> {
        let rows = m.to_rows().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        IntMatrix::from_rows(rows, m.cols()).unwrap()
    }

    proptest! {
        #[test]
        fn snf_invariants_hold(m in small_matrix()) {
            let big = to_big(&m);
            let s = snf(&big).unwrap();
            check(&big, &s);
        }

        // Fixed-width reduction either agrees with the exact one or reports overflow.
        #[test]
        fn fixed_width_agrees_or_fails_loudly(m in small_matrix()) {
            let exact = snf(&to_big(&m)).unwrap();
            match snf(&m) {
                Ok(s) => {
                    let widened = SnfResult {
                        u: to_big(&s.u),
                        u_inv: to_big(&s.u_inv),
                        d: to_big(&s.d),
                        v: to_big(&s.v),
                        v_inv: to_big(&s.v_inv),
                        rank: s.rank,
                    };
                    check(&to_big(&m), &widened);
                    prop_assert_eq!(widened.diagonal(), exact.diagonal());
                }
                Err(e) => prop_assert_eq!(e, AbelianError::Overflow),
            }
        }
    }
}
