//! Dense matrix algebra over GF(p): solve, invert, determinant.
//!
//! Plain Gaussian elimination with the first nonzero entry in a column as
//! the pivot. Arithmetic is exact, so there is no pivot-growth concern.

use crate::error::{CodeError, Result};
use crate::field::Field;

/// Row-major dense matrix over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Outcome of solving a square linear system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<u64>),
    NoUniqueSolution,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Matrix, f: &Field) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(CodeError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self[(i, t)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = f.add(out[(i, j)], f.mul(a, other[(t, j)]));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64], f: &Field) -> Result<Vec<u64>> {
        if self.cols != v.len() {
            return Err(CodeError::DimensionMismatch(format!(
                "{}x{} * vec[{}]",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc = f.add(acc, f.mul(self[(i, j)], v[j]));
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Solves `A x = b` for square `A`.
    pub fn solve(&self, b: &[u64], f: &Field) -> Result<Solution> {
        if self.rows != self.cols {
            return Err(CodeError::DimensionMismatch(format!(
                "solve needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if b.len() != self.rows {
            return Err(CodeError::DimensionMismatch(format!(
                "rhs length {} != {}",
                b.len(),
                self.rows
            )));
        }
        match solve_rectangular(self, b, f)? {
            Some(x) => Ok(Solution::Unique(x)),
            None => Ok(Solution::NoUniqueSolution),
        }
    }

    /// Determinant via elimination; pivoting by first nonzero in column.
    pub fn determinant(&self, f: &Field) -> Result<u64> {
        if self.rows != self.cols {
            return Err(CodeError::DimensionMismatch(format!(
                "determinant needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1u64;
        for col in 0..n {
            let pivot = (col..n).find(|&r| m[(r, col)] != 0);
            let pr = match pivot {
                Some(pr) => pr,
                None => return Ok(0),
            };
            if pr != col {
                m.swap_rows(pr, col);
                det = f.neg(det);
            }
            let p = m[(col, col)];
            det = f.mul(det, p);
            let pinv = f.inv(p)?;
            for r in col + 1..n {
                let factor = f.mul(m[(r, col)], pinv);
                if factor == 0 {
                    continue;
                }
                for c in col..n {
                    let sub = f.mul(factor, m[(col, c)]);
                    m[(r, c)] = f.sub(m[(r, c)], sub);
                }
            }
        }
        Ok(det)
    }

    pub fn invert(&self, f: &Field) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(CodeError::DimensionMismatch(format!(
                "invert needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pr = (col..n)
                .find(|&r| m[(r, col)] != 0)
                .ok_or(CodeError::Singular)?;
            if pr != col {
                m.swap_rows(pr, col);
                inv.swap_rows(pr, col);
            }
            let pinv = f.inv(m[(col, col)])?;
            for c in 0..n {
                m[(col, c)] = f.mul(m[(col, c)], pinv);
                inv[(col, c)] = f.mul(inv[(col, c)], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = m[(r, col)];
                if factor == 0 {
                    continue;
                }
                for c in 0..n {
                    let s1 = f.mul(factor, m[(col, c)]);
                    m[(r, c)] = f.sub(m[(r, c)], s1);
                    let s2 = f.mul(factor, inv[(col, c)]);
                    inv[(r, c)] = f.sub(inv[(r, c)], s2);
                }
            }
        }
        Ok(inv)
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

/// Solves a possibly overdetermined system `A x = b` (rows >= cols).
///
/// Returns `Ok(Some(x))` when the system has the unique solution `x`,
/// `Ok(None)` when the coefficient matrix is rank-deficient, and
/// `Err(InconsistentSurvivors)` when full column rank is reached but the
/// remaining equations contradict the solution.
pub fn solve_rectangular(a: &Matrix, b: &[u64], f: &Field) -> Result<Option<Vec<u64>>> {
    if a.rows < a.cols {
        return Err(CodeError::DimensionMismatch(format!(
            "underdetermined system {}x{}",
            a.rows, a.cols
        )));
    }
    if b.len() != a.rows {
        return Err(CodeError::DimensionMismatch(format!(
            "rhs length {} != {}",
            b.len(),
            a.rows
        )));
    }
    let (rows, cols) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut rank = 0usize;
    for col in 0..cols {
        let pr = match (rank..rows).find(|&r| m[(r, col)] != 0) {
            Some(pr) => pr,
            None => continue,
        };
        m.swap_rows(pr, rank);
        rhs.swap(pr, rank);
        let pinv = f.inv(m[(rank, col)])?;
        for c in col..cols {
            m[(rank, c)] = f.mul(m[(rank, c)], pinv);
        }
        rhs[rank] = f.mul(rhs[rank], pinv);
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = m[(r, col)];
            if factor == 0 {
                continue;
            }
            for c in col..cols {
                let s = f.mul(factor, m[(rank, c)]);
                m[(r, c)] = f.sub(m[(r, c)], s);
            }
            let s = f.mul(factor, rhs[rank]);
            rhs[r] = f.sub(rhs[r], s);
        }
        rank += 1;
    }
    if rank < cols {
        return Ok(None);
    }
    // rows below the rank must have been reduced to 0 = 0
    if rhs[rank..].iter().any(|&v| v != 0) {
        return Err(CodeError::InconsistentSurvivors);
    }
    Ok(Some(rhs[..cols].to_vec()))
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = u64;
    fn index(&self, (r, c): (usize, usize)) -> &u64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut u64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf7() -> Field {
        Field::new(7).unwrap()
    }

    #[test]
    fn solve_identity() {
        let f = gf7();
        let a = Matrix::identity(3);
        let b = vec![4, 0, 6];
        assert_eq!(a.solve(&b, &f).unwrap(), Solution::Unique(b));
    }

    #[test]
    fn solve_back_substitution() {
        let f = gf7();
        let a = Matrix::new(2, 2, vec![1, 1, 0, 1]);
        assert_eq!(
            a.solve(&[3, 2], &f).unwrap(),
            Solution::Unique(vec![1, 2])
        );
    }

    #[test]
    fn solve_singular() {
        let f = gf7();
        let a = Matrix::new(2, 2, vec![2, 3, 2, 3]);
        assert_eq!(a.solve(&[1, 2], &f).unwrap(), Solution::NoUniqueSolution);
    }

    #[test]
    fn determinant_examples() {
        let f = gf7();
        assert_eq!(Matrix::identity(4).determinant(&f).unwrap(), 1);
        let swap = Matrix::new(2, 2, vec![0, 1, 1, 0]);
        assert_eq!(swap.determinant(&f).unwrap(), 6);
        let vand = Matrix::new(2, 2, vec![1, 1, 2, 5]);
        assert_eq!(vand.determinant(&f).unwrap(), f.sub(5, 2));
    }

    #[test]
    fn invert_examples() {
        let f = gf7();
        let id = Matrix::identity(3);
        assert_eq!(id.invert(&f).unwrap(), id);
        let d = Matrix::new(2, 2, vec![2, 0, 0, 3]);
        assert_eq!(d.invert(&f).unwrap(), Matrix::new(2, 2, vec![4, 0, 0, 5]));
        let ones = Matrix::new(2, 2, vec![1, 1, 1, 1]);
        assert_eq!(ones.invert(&f), Err(CodeError::Singular));
    }

    #[test]
    fn vandermonde_columns_invertible() {
        // any square matrix of distinct power columns is invertible
        let f = Field::new(257).unwrap();
        let lambdas = [3u64, 10, 19, 41];
        let r = lambdas.len();
        let mut m = Matrix::zeros(r, r);
        for (j, &l) in lambdas.iter().enumerate() {
            for i in 0..r {
                m[(i, j)] = f.pow(l, i as u64);
            }
        }
        assert_ne!(m.determinant(&f).unwrap(), 0);
    }

    proptest! {
        #[test]
        fn solve_round_trip(seed in proptest::collection::vec(0u64..257, 16)) {
            let f = Field::new(257).unwrap();
            let a = Matrix::new(4, 4, seed.clone());
            if a.determinant(&f).unwrap() != 0 {
                let x: Vec<u64> = (0..4).map(|i| (i as u64 * 31 + 5) % 257).collect();
                let b = a.mul_vec(&x, &f).unwrap();
                prop_assert_eq!(a.solve(&b, &f).unwrap(), Solution::Unique(x));
                let inv = a.invert(&f).unwrap();
                let d = a.determinant(&f).unwrap();
                let di = inv.determinant(&f).unwrap();
                prop_assert_eq!(f.mul(d, di), 1);
            }
        }
    }
}
