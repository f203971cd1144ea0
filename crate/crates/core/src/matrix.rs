//! Dense matrices over exact scalars.

use std::fmt;

use crate::error::{Error, Result};
use crate::form::OneForm;
use crate::poly::Poly;
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Block-diagonal assembly.
    pub fn block_diag(blocks: &[Matrix]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
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

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn field(&self) -> Field {
        if self.data.iter().all(Scalar::is_real) {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut out = Matrix::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero()).ok_or(Error::Singular)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].inv()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r != col && !a[(r, col)].is_zero() {
                    let factor = a[(r, col)].clone();
                    a.sub_row_multiple(r, col, &factor);
                    inv.sub_row_multiple(r, col, &factor);
                }
            }
        }
        Ok(inv)
    }

    /// Smallest `r >= 1` with `self^r = 0`, if the matrix is nilpotent.
    pub fn nilpotency_index(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::Dimension("nilpotency of a non-square matrix".into()));
        }
        let n = self.rows.max(1);
        let mut p = self.clone();
        for r in 1..=n {
            if p.is_zero() {
                return Ok(r);
            }
            p = p.mul(self)?;
        }
        Err(Error::NotNilpotent)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, c: &Scalar) {
        for j in 0..self.cols {
            let v = &self[(r, j)] * c;
            self[(r, j)] = v;
        }
    }

    /// row[r] -= factor * row[src]
    fn sub_row_multiple(&mut self, r: usize, src: usize, factor: &Scalar) {
        for j in 0..self.cols {
            let s = &self[(src, j)];
            if s.is_zero() {
                continue;
            }
            let v = &self[(r, j)] - &(factor * s);
            self[(r, j)] = v;
        }
    }

    /// Matrix acting on a one-form viewed as a column vector of polynomials.
    pub fn apply_form(&self, omega: &OneForm) -> Result<OneForm> {
        if self.cols != omega.len() || self.rows != omega.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix applied to a form with {} components",
                self.rows,
                self.cols,
                omega.len()
            )));
        }
        let comps = omega.components();
        let ring = comps[0].ring().with_field(comps[0].field().join(self.field()));
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = Poly::zero(&ring);
            for (j, c) in comps.iter().enumerate() {
                let a = &self[(i, j)];
                if !a.is_zero() && !c.is_zero() {
                    acc = &acc + &c.scale(a);
                }
            }
            out.push(acc);
        }
        OneForm::new(&ring, out)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Outcome of an exact linear solve `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    /// A particular solution (free variables set to zero) and the rank of `A`.
    Consistent { x: Vec<Scalar>, rank: usize },
    /// Fredholm certificate: `y^T A = 0` while `y^T b != 0`. `residual` lists the
    /// reduced right-hand side entries sitting on zero rows of the echelon form.
    Inconsistent { certificate: Vec<Scalar>, residual: Vec<Scalar>, rank: usize },
}

/// Exact Gaussian elimination on `[A | b | I]`.
pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Result<LinearSolution> {
    if a.rows != b.len() {
        return Err(Error::Dimension(format!("{} equations but {} right-hand sides", a.rows, b.len())));
    }
    let (m, n) = (a.rows, a.cols);
    let width = n + 1 + m;
    let mut aug = Matrix::zeros(m, width);
    for i in 0..m {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
        aug[(i, n + 1 + i)] = Scalar::one();
    }

    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let Some(p) = (row..m).find(|&r| !aug[(r, col)].is_zero()) else { continue };
        aug.swap_rows(row, p);
        let inv = aug[(row, col)].inv()?;
        aug.scale_row(row, &inv);
        for r in 0..m {
            if r != row && !aug[(r, col)].is_zero() {
                let f = aug[(r, col)].clone();
                aug.sub_row_multiple(r, row, &f);
            }
        }
        pivots.push(col);
        row += 1;
    }
    let rank = pivots.len();

    let residual: Vec<Scalar> = (rank..m).map(|r| aug[(r, n)].clone()).collect();
    if let Some(offset) = residual.iter().position(|v| !v.is_zero()) {
        let r = rank + offset;
        let certificate = (0..m).map(|i| aug[(r, n + 1 + i)].clone()).collect();
        return Ok(LinearSolution::Inconsistent { certificate, residual, rank });
    }
    let mut x = vec![Scalar::zero(); n];
    for (r, &col) in pivots.iter().enumerate() {
        x[col] = aug[(r, n)].clone();
    }
    Ok(LinearSolution::Consistent { x, rank })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1, 0], &[0, 2, 1], &[1, 0, 3]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(3));
        assert!(matches!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular)));
    }

    #[test]
    fn nilpotency() {
        let u2 = m(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(u2.nilpotency_index().unwrap(), 3);
        assert_eq!(m(&[&[0]]).nilpotency_index().unwrap(), 1);
        assert!(matches!(Matrix::identity(2).nilpotency_index(), Err(Error::NotNilpotent)));
    }

    #[test]
    fn solve_consistent_and_certificate() {
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        let b = [Scalar::from_int(3), Scalar::from_int(1), Scalar::from_int(4)];
        match solve_linear(&a, &b).unwrap() {
            LinearSolution::Consistent { x, rank } => {
                assert_eq!(rank, 2);
                assert_eq!(x, vec![Scalar::from_int(2), Scalar::from_int(1)]);
            }
            other => panic!("expected consistent, got {other:?}"),
        }
        let b = [Scalar::from_int(3), Scalar::from_int(1), Scalar::from_int(5)];
        match solve_linear(&a, &b).unwrap() {
            LinearSolution::Inconsistent { certificate, .. } => {
                // y^T A = 0 and y^T b != 0
                for j in 0..2 {
                    let s = (0..3).fold(Scalar::zero(), |acc, i| acc + &certificate[i] * &a[(i, j)]);
                    assert!(s.is_zero());
                }
                let yb = (0..3).fold(Scalar::zero(), |acc, i| acc + &certificate[i] * &b[i]);
                assert!(!yb.is_zero());
            }
            other => panic!("expected inconsistent, got {other:?}"),
        }
    }
}
