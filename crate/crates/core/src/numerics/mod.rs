//! Self-contained linear algebra kernel.
//!
//! Two nontrivial primitives back the whole artifact: sparse SPD solves
//! (FEM systems, Cholesky with a fill-reducing ordering) and dense symmetric
//! eigendecomposition (semidefiniteness tests on measurement matrices).

mod cholesky;
mod dense;
mod eigen;
mod ordering;
mod sparse;

pub use cholesky::{solve_spd, CholeskyFactor};
pub use dense::SquareMatrix;
pub use eigen::{
    definiteness_tolerance, max_eigenvalue, min_eigenvalue, spectral_norm, spectral_norm_general,
    sym_eig, SymEigResult,
};
pub use ordering::min_degree_order;
pub use sparse::{SparseSymBuilder, SparseSymMatrix};
