//! Dense symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! The matrices that reach this solver are measurement-matrix differences of
//! size (L-1) x (L-1) with L <= ~64 electrodes, so the O(n^3) cost per sweep
//! is irrelevant next to the accuracy of Jacobi: eigenvalues come out with a
//! residual near machine precision, which the semidefiniteness tests depend
//! on.

use super::dense::SquareMatrix;
use crate::error::{Error, Result};

/// Relative symmetry tolerance for inputs, against the largest entry.
const SYMMETRY_TOL: f64 = 1e-9;
/// Required eigen residual, relative to the spectral norm.
const RESIDUAL_TOL: f64 = 1e-10;
/// Off-diagonal sweep target relative to the Frobenius norm.
const SWEEP_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 60;

/// Eigenvalues of a symmetric matrix, ascending, with a certified residual.
///
/// `residual_bound` is max_k ||A v_k - lambda_k v_k||_2 over the computed
/// eigenpairs (eigenvectors are used for the check and then dropped).
#[derive(Debug, Clone)]
pub struct SymEigResult {
    pub eigenvalues: Vec<f64>,
    pub residual_bound: f64,
}

impl SymEigResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }
}

/// Tolerance for semidefiniteness tests `A >= B`, interpreted as
/// `min eig(A - B) >= -definiteness_tolerance(||A - B||_2)`.
///
/// Exact semidefiniteness cannot survive floating point; the scale guard
/// keeps the test meaningful for both tiny and large measurement matrices.
pub fn definiteness_tolerance(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
///
/// Rejects matrices whose asymmetry exceeds `1e-9` times the largest entry;
/// anything within that band is symmetrized before iterating.
pub fn sym_eig(a: &SquareMatrix) -> Result<SymEigResult> {
    let n = a.dim();
    if n == 0 {
        return Ok(SymEigResult {
            eigenvalues: vec![],
            residual_bound: 0.0,
        });
    }
    let scale = a.max_abs();
    let asym = a.max_asymmetry();
    let tol = SYMMETRY_TOL * scale;
    if asym > tol && scale > 0.0 {
        return Err(Error::NotSymmetric {
            deviation: asym,
            tolerance: tol,
        });
    }
    let sym = a.symmetrized();

    let mut work = sym.clone();
    let mut vectors = SquareMatrix::identity(n);
    jacobi(&mut work, &mut vectors)?;

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| work.get(i, i)).collect();

    // Certify against the symmetrized input: r_k = ||A v_k - lambda_k v_k||.
    let mut residual_bound = 0.0f64;
    for k in 0..n {
        let mut r2 = 0.0;
        for i in 0..n {
            let mut av = 0.0;
            for j in 0..n {
                av += sym.get(i, j) * vectors.get(j, k);
            }
            let r = av - eigenvalues[k] * vectors.get(i, k);
            r2 += r * r;
        }
        residual_bound = residual_bound.max(r2.sqrt());
    }

    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let norm = eigenvalues[0].abs().max(eigenvalues[n - 1].abs());
    if residual_bound > RESIDUAL_TOL * norm && norm > 0.0 {
        return Err(Error::EigenNoConvergence(format!(
            "residual {residual_bound:e} exceeds {:e}",
            RESIDUAL_TOL * norm
        )));
    }

    Ok(SymEigResult {
        eigenvalues,
        residual_bound,
    })
}

/// Spectral norm of a symmetric matrix: the largest eigenvalue magnitude.
pub fn spectral_norm(a: &SquareMatrix) -> Result<f64> {
    Ok(sym_eig(a)?.spectral_norm())
}

/// Spectral norm of an arbitrary square matrix, via eig(A^T A).
pub fn spectral_norm_general(a: &SquareMatrix) -> Result<f64> {
    let n = a.dim();
    let gram = SquareMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| a.get(k, i) * a.get(k, j)).sum()
    });
    let max = sym_eig(&gram)?.max().max(0.0);
    Ok(max.sqrt())
}

pub fn min_eigenvalue(a: &SquareMatrix) -> Result<f64> {
    Ok(sym_eig(a)?.min())
}

pub fn max_eigenvalue(a: &SquareMatrix) -> Result<f64> {
    Ok(sym_eig(a)?.max())
}

/// Cyclic Jacobi sweeps; diagonalizes `a` in place while accumulating the
/// rotations into `v`.
fn jacobi(a: &mut SquareMatrix, v: &mut SquareMatrix) -> Result<()> {
    let n = a.dim();
    if n == 1 {
        return Ok(());
    }
    let fro: f64 = a
        .as_slice()
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if fro == 0.0 {
        return Ok(());
    }
    let target = SWEEP_TOL * fro;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a.get(p, q).abs();
            }
        }
        if off <= target {
            return Ok(());
        }

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                // Stable rotation (Golub & Van Loan): tan via the smaller root.
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e154 {
                    // Guard against overflow in theta^2.
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);

                for i in 0..n {
                    if i != p && i != q {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        let new_p = aip - s * (aiq + tau * aip);
                        let new_q = aiq + s * (aip - tau * aiq);
                        a.set(i, p, new_p);
                        a.set(p, i, new_p);
                        a.set(i, q, new_q);
                        a.set(q, i, new_q);
                    }
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip - s * (viq + tau * vip));
                    v.set(i, q, viq + s * (vip - tau * viq));
                }
            }
        }
    }
    Err(Error::EigenNoConvergence(format!(
        "off-diagonal mass did not drop below {target:e} in {MAX_SWEEPS} sweeps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let a = SquareMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let r = sym_eig(&a).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert!(r.residual_bound <= 1e-10 * 3.0);
    }

    #[test]
    fn known_two_by_two() {
        let a = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let r = sym_eig(&a).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_norm() {
        let a = SquareMatrix::zeros(4);
        assert_eq!(spectral_norm(&a).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_spectral_norm_takes_magnitude() {
        let a = SquareMatrix::from_diagonal(&[-5.0, 2.0]);
        assert_eq!(spectral_norm(&a).unwrap(), 5.0);
    }

    #[test]
    fn trace_identity_on_seeded_random() {
        // Trace equals the eigenvalue sum: independent oracle for the sweep.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(35);
        let n = 35;
        let mut a = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
        let r = sym_eig(&a).unwrap();
        assert_eq!(r.eigenvalues.len(), n);
        let sum: f64 = r.eigenvalues.iter().sum();
        let scale = a.max_abs();
        assert!(
            (sum - a.trace()).abs() <= 1e-9 * scale.max(1.0) * n as f64,
            "trace {} vs eigensum {}",
            a.trace(),
            sum
        );
        for w in r.eigenvalues.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let a = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 1.0]]).unwrap();
        match sym_eig(&a) {
            Err(Error::NotSymmetric { .. }) => {}
            other => panic!("expected NotSymmetric, got {other:?}"),
        }
    }

    #[test]
    fn spectral_norm_matches_power_iteration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 20;
        let mut a = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-2.0..2.0);
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
        // Independent oracle: power iteration on A^2 (so the sign of the
        // dominant eigenvalue cannot interfere).
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.01).collect();
        let mut lambda2 = 0.0;
        for _ in 0..20_000 {
            let y = a.mul_vec(&x).unwrap();
            let z = a.mul_vec(&y).unwrap();
            let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            lambda2 = x.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>()
                / x.iter().map(|v| v * v).sum::<f64>();
            x = z.iter().map(|v| v / norm).collect();
        }
        let oracle = lambda2.sqrt();
        let got = spectral_norm(&a).unwrap();
        assert!(
            (got - oracle).abs() <= 1e-8 * oracle,
            "jacobi {got} vs power iteration {oracle}"
        );
    }

    #[test]
    fn definiteness_tolerance_floors_at_one() {
        assert_eq!(definiteness_tolerance(0.5), 1e-9);
        assert_eq!(definiteness_tolerance(100.0), 1e-7);
    }
}
