//! Sparse Cholesky factorization for symmetric positive definite systems.
//!
//! Up-looking LL^T: the matrix is permuted with the minimum-degree order,
//! the elimination tree gives each row's pattern (ereach), and rows are
//! computed by a sparse triangular solve against the columns built so far.
//! The factor keeps the original matrix so every solve can be certified by
//! its residual, with one step of iterative refinement when rounding alone
//! does not reach the contract.

use super::ordering::min_degree_order;
use super::sparse::SparseSymMatrix;
use crate::error::{Error, Result};

/// Required relative residual ||Ax - b|| / ||b|| of a solve.
const SOLVE_TOL: f64 = 1e-10;
/// Refinement trigger; one correction pass runs above this.
const REFINE_TRIGGER: f64 = 1e-12;

const NONE: usize = usize::MAX;

/// Cholesky factor of a sparse SPD matrix; immutable once built, so several
/// right-hand sides (or threads) can reuse one factorization.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    /// iperm[old] = new
    iperm: Vec<usize>,
    // L in compressed columns, diagonal entry first in each column.
    l_colptr: Vec<usize>,
    l_rowidx: Vec<usize>,
    l_values: Vec<f64>,
    matrix: SparseSymMatrix,
}

impl CholeskyFactor {
    pub fn new(a: &SparseSymMatrix) -> Result<Self> {
        let n = a.dim();
        let order = min_degree_order(&a.adjacency());
        let mut iperm = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            iperm[old] = new;
        }

        // Permuted upper triangle in compressed columns (row <= col).
        let mut counts = vec![0usize; n + 1];
        let entries: Vec<(usize, usize, f64)> = a
            .lower_entries()
            .map(|(r, c, v)| {
                let (pr, pc) = (iperm[r], iperm[c]);
                if pr <= pc {
                    (pr, pc, v)
                } else {
                    (pc, pr, v)
                }
            })
            .collect();
        for &(_, c, _) in &entries {
            counts[c + 1] += 1;
        }
        for c in 0..n {
            counts[c + 1] += counts[c];
        }
        let mut up_colptr = counts.clone();
        let nnz = entries.len();
        let mut up_rowidx = vec![0usize; nnz];
        let mut up_values = vec![0.0f64; nnz];
        {
            let mut next = counts;
            for (r, c, v) in entries {
                let p = next[c];
                up_rowidx[p] = r;
                up_values[p] = v;
                next[c] += 1;
            }
        }

        let parent = etree(n, &up_colptr, &up_rowidx);

        // Symbolic pass: column counts of L via ereach per row.
        let mut col_count = vec![1usize; n]; // diagonal
        let mut work_mark = vec![NONE; n];
        let mut stack = vec![0usize; n];
        for k in 0..n {
            let top = ereach(
                k, &up_colptr, &up_rowidx, &parent, &mut work_mark, &mut stack,
            );
            for &i in &stack[top..n] {
                col_count[i] += 1;
            }
        }
        let mut l_colptr = vec![0usize; n + 1];
        for c in 0..n {
            l_colptr[c + 1] = l_colptr[c] + col_count[c];
        }
        let l_nnz = l_colptr[n];
        let mut l_rowidx = vec![0usize; l_nnz];
        let mut l_values = vec![0.0f64; l_nnz];
        // Fill pointer per column; the diagonal slot is reserved up front.
        let mut fill: Vec<usize> = (0..n).map(|c| l_colptr[c] + 1).collect();

        // Numeric pass.
        let mut x = vec![0.0f64; n];
        for m in work_mark.iter_mut() {
            *m = NONE;
        }
        for k in 0..n {
            let top = ereach(
                k, &up_colptr, &up_rowidx, &parent, &mut work_mark, &mut stack,
            );
            // Scatter column k of the permuted upper triangle.
            let mut d = 0.0f64;
            for p in up_colptr[k]..up_colptr[k + 1] {
                let i = up_rowidx[p];
                if i < k {
                    x[i] = up_values[p];
                } else if i == k {
                    d = up_values[p];
                }
            }
            // Sparse triangular solve along the pattern, topological order.
            for &i in &stack[top..n] {
                let diag = l_values[l_colptr[i]];
                let lki = x[i] / diag;
                x[i] = 0.0;
                for p in l_colptr[i] + 1..fill[i] {
                    x[l_rowidx[p]] -= l_values[p] * lki;
                }
                d -= lki * lki;
                let slot = fill[i];
                l_rowidx[slot] = k;
                l_values[slot] = lki;
                fill[i] += 1;
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite(order[k]));
            }
            l_rowidx[l_colptr[k]] = k;
            l_values[l_colptr[k]] = d.sqrt();
        }

        Ok(CholeskyFactor {
            dim: n,
            perm: order,
            iperm,
            l_colptr,
            l_rowidx,
            l_values,
            matrix: a.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn l_nnz(&self) -> usize {
        self.l_values.len()
    }

    /// Solve without the residual certificate.
    fn solve_raw(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        // Permute, forward solve L z = Pb, backward solve L^T y = z, unpermute.
        let mut z: Vec<f64> = (0..n).map(|k| b[self.perm[k]]).collect();
        for j in 0..n {
            let diag = self.l_values[self.l_colptr[j]];
            z[j] /= diag;
            let zj = z[j];
            for p in self.l_colptr[j] + 1..self.l_colptr[j + 1] {
                z[self.l_rowidx[p]] -= self.l_values[p] * zj;
            }
        }
        for j in (0..n).rev() {
            let mut s = z[j];
            for p in self.l_colptr[j] + 1..self.l_colptr[j + 1] {
                s -= self.l_values[p] * z[self.l_rowidx[p]];
            }
            z[j] = s / self.l_values[self.l_colptr[j]];
        }
        let mut out = vec![0.0f64; n];
        for k in 0..n {
            out[self.perm[k]] = z[k];
        }
        out
    }

    /// Solve `A x = b` to a relative residual of at most `1e-10`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: b.len(),
            });
        }
        let b_norm = norm2(b);
        if b_norm == 0.0 {
            return Ok(vec![0.0; self.dim]);
        }
        let mut x = self.solve_raw(b);
        let mut rel = self.relative_residual(b, &x, b_norm)?;
        if rel > REFINE_TRIGGER {
            let ax = self.matrix.mul_vec(&x)?;
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            let dx = self.solve_raw(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            rel = self.relative_residual(b, &x, b_norm)?;
        }
        if rel > SOLVE_TOL {
            return Err(Error::SolveFailed(format!(
                "relative residual {rel:e} exceeds {SOLVE_TOL:e} after refinement"
            )));
        }
        Ok(x)
    }

    fn relative_residual(&self, b: &[f64], x: &[f64], b_norm: f64) -> Result<f64> {
        let ax = self.matrix.mul_vec(x)?;
        let mut r2 = 0.0;
        for (bi, ai) in b.iter().zip(&ax) {
            let d = bi - ai;
            r2 += d * d;
        }
        Ok(r2.sqrt() / b_norm)
    }
}

/// One-shot SPD solve; callers with several right-hand sides should build a
/// [`CholeskyFactor`] and reuse it.
pub fn solve_spd(a: &SparseSymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    CholeskyFactor::new(a)?.solve(b)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Elimination tree from the upper triangle in compressed columns.
fn etree(n: usize, colptr: &[usize], rowidx: &[usize]) -> Vec<usize> {
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for p in colptr[k]..colptr[k + 1] {
            let mut i = rowidx[p];
            while i != NONE && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == NONE {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

/// Pattern of row `k` of L: nonzero columns in topological order, written to
/// `stack[top..n]`. `mark` is a workspace keyed by `k`.
fn ereach(
    k: usize,
    colptr: &[usize],
    rowidx: &[usize],
    parent: &[usize],
    mark: &mut [usize],
    stack: &mut [usize],
) -> usize {
    let n = mark.len();
    let mut top = n;
    mark[k] = k;
    let mut path = Vec::new();
    for p in colptr[k]..colptr[k + 1] {
        let mut i = rowidx[p];
        if i >= k {
            continue;
        }
        path.clear();
        while mark[i] != k {
            path.push(i);
            mark[i] = k;
            i = parent[i];
            if i == NONE {
                break;
            }
        }
        for &node in path.iter().rev() {
            top -= 1;
            stack[top] = node;
        }
    }
    top
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sparse::SparseSymBuilder;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_system_returns_rhs() {
        let a = SparseSymMatrix::identity(5);
        let b = vec![1.0, -2.0, 3.5, 0.0, 7.0];
        let x = solve_spd(&a, &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn two_by_two_hand_checkable() {
        // [[2,1],[1,2]] x = [3,3] -> x = [1,1]
        let mut b = SparseSymBuilder::new(2);
        b.add(0, 0, 2.0);
        b.add(1, 1, 2.0);
        b.add(1, 0, 1.0);
        let a = b.build();
        let x = solve_spd(&a, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        // [[1,2],[2,1]] has eigenvalues 3 and -1.
        let mut b = SparseSymBuilder::new(2);
        b.add(0, 0, 1.0);
        b.add(1, 1, 1.0);
        b.add(1, 0, 2.0);
        let a = b.build();
        match solve_spd(&a, &[1.0, 1.0]) {
            Err(Error::NotPositiveDefinite(_)) => {}
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        // Zero column -> zero pivot.
        let mut b = SparseSymBuilder::new(3);
        b.add(0, 0, 1.0);
        b.add(2, 2, 1.0);
        let a = b.build();
        assert!(solve_spd(&a, &[1.0, 1.0, 1.0]).is_err());
    }

    /// Seeded random SPD system: A = M^T M + I built densely, verified by the
    /// residual contract.
    #[test]
    fn random_spd_50x50_meets_residual_contract() {
        let n = 50;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
        let mut m = vec![vec![0.0f64; n]; n];
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                // Sparse-ish random factor.
                if rng.gen_bool(0.2) {
                    *v = rng.gen_range(-1.0..1.0);
                }
            }
        }
        let mut builder = SparseSymBuilder::new(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..n {
                    s += m[k][i] * m[k][j];
                }
                if i == j {
                    s += 1.0;
                }
                if s != 0.0 {
                    builder.add(i, j, s);
                }
            }
        }
        let a = builder.build();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let factor = CholeskyFactor::new(&a).unwrap();
        let x = factor.solve(&b).unwrap();
        let ax = a.mul_vec(&x).unwrap();
        let mut r2 = 0.0;
        let mut b2 = 0.0;
        for (bi, ai) in b.iter().zip(&ax) {
            r2 += (bi - ai) * (bi - ai);
            b2 += bi * bi;
        }
        assert!(r2.sqrt() / b2.sqrt() <= 1e-10);
    }

    #[test]
    fn repeated_solves_are_deterministic() {
        let mut b = SparseSymBuilder::new(4);
        for i in 0..4 {
            b.add(i, i, 4.0);
        }
        for i in 1..4 {
            b.add(i, i - 1, -1.0);
        }
        let a = b.build();
        let f = CholeskyFactor::new(&a).unwrap();
        let rhs = vec![1.0, 2.0, 3.0, 4.0];
        let x1 = f.solve(&rhs).unwrap();
        let x2 = f.solve(&rhs).unwrap();
        assert_eq!(x1, x2);
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let a = SparseSymMatrix::identity(3);
        let x = solve_spd(&a, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(x, vec![0.0; 3]);
    }
}
