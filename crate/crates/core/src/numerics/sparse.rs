//! Symmetric sparse matrices, lower triangle in compressed-column form.

use crate::error::{Error, Result};

/// Triplet accumulator for building a [`SparseSymMatrix`].
///
/// Entries may be added in any order and in either triangle; duplicates are
/// summed on build. Only the lower triangle is stored.
#[derive(Debug, Clone)]
pub struct SparseSymBuilder {
    dim: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl SparseSymBuilder {
    pub fn new(dim: usize) -> Self {
        SparseSymBuilder {
            dim,
            triplets: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        SparseSymBuilder {
            dim,
            triplets: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.dim && j < self.dim);
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.triplets.push((r, c, v));
    }

    pub fn build(mut self) -> SparseSymMatrix {
        // Sort by (col, row) and merge duplicates; exact zeros are dropped so
        // the stored pattern matches the numeric nonzeros.
        self.triplets
            .sort_unstable_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        let mut col_ptr = vec![0usize; self.dim + 1];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        let mut iter = self.triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v != 0.0 {
                col_ptr[c + 1] += 1;
                row_idx.push(r);
                values.push(v);
            }
        }
        for c in 0..self.dim {
            col_ptr[c + 1] += col_ptr[c];
        }
        SparseSymMatrix {
            dim: self.dim,
            col_ptr,
            row_idx,
            values,
        }
    }
}

/// Symmetric sparse matrix; the lower triangle (row >= col) is stored in
/// compressed-column form with rows ascending within each column.
#[derive(Debug, Clone)]
pub struct SparseSymMatrix {
    dim: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut b = SparseSymBuilder::new(dim);
        for i in 0..dim {
            b.add(i, i, 1.0);
        }
        b.build()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz_lower(&self) -> usize {
        self.row_idx.len()
    }

    pub(crate) fn lower_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |c| {
            (self.col_ptr[c]..self.col_ptr[c + 1]).map(move |p| (self.row_idx[p], c, self.values[p]))
        })
    }

    /// Off-diagonal adjacency of the full (symmetric) pattern.
    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.dim];
        for (r, c, _) in self.lower_entries() {
            if r != c {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// y = A x using the symmetric structure.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.dim];
        for c in 0..self.dim {
            let xc = x[c];
            for p in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[p];
                let v = self.values[p];
                y[r] += v * xc;
                if r != c {
                    y[c] += v * x[r];
                }
            }
        }
        Ok(y)
    }
}
