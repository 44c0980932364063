//! Dense square matrices, row-major storage.
//!
//! Everything dense in this crate is at most (L-1) x (L-1) with L the number
//! of electrodes, so no attempt is made at blocking or BLAS dispatch.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Diagonal matrix with the given entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute difference between the matrix and its transpose.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// (A + A^T) / 2
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }

    pub fn transposed(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SquareMatrix {
            dim: self.dim,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SquareMatrix {
            dim: self.dim,
            data,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// A + s * Id
    pub fn plus_scaled_identity(&self, s: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.add_to(i, i, s);
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        Ok(y)
    }

    /// w^T A w
    pub fn quadratic_form(&self, w: &[f64]) -> Result<f64> {
        let aw = self.mul_vec(w)?;
        Ok(w.iter().zip(&aw).map(|(a, b)| a * b).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_and_asymmetry() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![4.0, 3.0]]).unwrap();
        assert_eq!(m.max_asymmetry(), 2.0);
        let s = m.symmetrized();
        assert_eq!(s.get(0, 1), 3.0);
        assert_eq!(s.get(1, 0), 3.0);
        assert_eq!(s.max_asymmetry(), 0.0);
    }

    #[test]
    fn quadratic_form_matches_manual() {
        let m = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let q = m.quadratic_form(&[1.0, -1.0]).unwrap();
        assert_eq!(q, 2.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = SquareMatrix::zeros(2);
        let b = SquareMatrix::zeros(3);
        assert!(a.add(&b).is_err());
        assert!(a.mul_vec(&[1.0]).is_err());
    }
}
