//! Dense linear-algebra kernels the rest of the crate stands on: the matrix
//! exponential, the real Schur decomposition, a Bartels-Stewart Sylvester
//! solver, and field-of-values (numerical range) queries.
//!
//! All kernels operate on real dense matrices (`nalgebra::DMatrix<f64>`).
//! Complex arithmetic appears only inside spectral queries and resolvent
//! solves. Matrices entering through [`dense_from_rows`] are validated for
//! shape consistency and finiteness; the kernels re-validate squareness and
//! finiteness on their own inputs.

mod eig;
mod expm;
mod fov;
mod sylvester;

pub use eig::{eig_general, Eigendecomposition};
pub use expm::expm;
pub use fov::{
    fov_distance, fov_distance_from_estimate, fov_estimate, log_norm, sectorial_resolvent_bound,
    FovEstimate,
};
pub use sylvester::{solve_sylvester, SylvesterSolver};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Build a dense matrix from row-major entries, validating that the entry
/// count matches `rows * cols` and that every entry is finite.
pub fn dense_from_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<DMatrix<f64>> {
    if rows * cols != entries.len() {
        return Err(Error::Dimension(format!(
            "{rows}x{cols} matrix needs {} entries, got {}",
            rows * cols,
            entries.len()
        )));
    }
    if let Some(bad) = entries.iter().find(|e| !e.is_finite()) {
        return Err(Error::NonFinite(format!("matrix entry {bad}")));
    }
    Ok(DMatrix::from_row_slice(rows, cols, entries))
}

pub(crate) fn ensure_finite(name: &str, a: &DMatrix<f64>) -> Result<()> {
    if a.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite(format!("{name} contains NaN/Inf")));
    }
    Ok(())
}

pub(crate) fn ensure_square(name: &str, a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "{name} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn ensure_finite_vec(name: &str, v: &DVector<f64>) -> Result<()> {
    if v.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite(format!("{name} contains NaN/Inf")));
    }
    Ok(())
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    // sqrt of the top eigenvalue of A^T A; cheaper and more robust at desk
    // scale than a full SVD for the handful of places that need it.
    let gram = a.transpose() * a;
    let eigs = gram.symmetric_eigen().eigenvalues;
    eigs.iter().fold(0.0f64, |m, &e| m.max(e.max(0.0))).sqrt()
}

/// Largest absolute column sum.
pub fn one_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|e| e.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Real Schur decomposition `A = Q T Q^T` with orthogonal `Q` and quasi upper
/// triangular `T` (1x1 and 2x2 diagonal blocks).
#[derive(Debug, Clone)]
pub struct SchurForm {
    /// Orthogonal factor.
    pub q: DMatrix<f64>,
    /// Quasi upper triangular factor.
    pub tmat: DMatrix<f64>,
}

impl SchurForm {
    /// Eigenvalues read off the 1x1 / 2x2 diagonal blocks of `tmat`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        quasi_triangular_eigenvalues(&self.tmat)
    }

    /// Assemble a Schur form from factors already known to be valid, e.g.
    /// structurally exact block forms. No orthogonality check is performed.
    pub fn from_parts(q: DMatrix<f64>, tmat: DMatrix<f64>) -> Self {
        SchurForm { q, tmat }
    }
}

/// Compute the real Schur decomposition of a square matrix.
///
/// Fails with [`Error::Numerical`] if the QR iteration does not converge
/// within the iteration cap.
pub fn real_schur(a: &DMatrix<f64>) -> Result<SchurForm> {
    ensure_square("schur input", a)?;
    ensure_finite("schur input", a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(SchurForm {
            q: DMatrix::zeros(0, 0),
            tmat: DMatrix::zeros(0, 0),
        });
    }
    // The QR iteration normalizes by the largest entry; the zero matrix must
    // be special-cased.
    if a.iter().all(|&e| e == 0.0) {
        return Ok(SchurForm {
            q: DMatrix::identity(n, n),
            tmat: DMatrix::zeros(n, n),
        });
    }
    let max_iter = 100 * n.max(10);
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, max_iter)
        .ok_or_else(|| {
            Error::Numerical(format!(
                "real Schur iteration did not converge within {max_iter} steps for {n}x{n} input"
            ))
        })?;
    let (q, tmat) = schur.unpack();
    Ok(SchurForm { q, tmat })
}

/// Eigenvalues of a real quasi upper triangular matrix from its diagonal
/// blocks. A 2x2 block is detected by a nonzero subdiagonal entry.
pub(crate) fn quasi_triangular_eigenvalues(t: &DMatrix<f64>) -> Vec<Complex64> {
    let n = t.nrows();
    let mut eigs = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let a = t[(i, i)];
            let b = t[(i, i + 1)];
            let c = t[(i + 1, i)];
            let d = t[(i + 1, i + 1)];
            let mean = 0.5 * (a + d);
            let disc = 0.25 * (a - d) * (a - d) + b * c;
            if disc < 0.0 {
                let im = (-disc).sqrt();
                eigs.push(Complex64::new(mean, im));
                eigs.push(Complex64::new(mean, -im));
            } else {
                let s = disc.sqrt();
                eigs.push(Complex64::new(mean + s, 0.0));
                eigs.push(Complex64::new(mean - s, 0.0));
            }
            i += 2;
        } else {
            eigs.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    eigs
}

/// Diagonal block structure of a quasi upper triangular matrix: start index
/// and size (1 or 2) of each block.
pub(crate) fn quasi_triangular_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_matrix(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn dense_from_rows_validates_count() {
        let err = dense_from_rows(2, 2, &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn dense_from_rows_rejects_nan() {
        let err = dense_from_rows(1, 2, &[1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
        let err = dense_from_rows(1, 2, &[f64::INFINITY, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn dense_from_rows_is_row_major() {
        let a = dense_from_rows(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a[(0, 1)], 2.0);
        assert_eq!(a[(1, 0)], 4.0);
        assert_eq!(a[(1, 2)], 6.0);
    }

    #[test]
    fn schur_reconstructs_and_is_orthogonal() {
        for seed in 0..5u64 {
            let a = random_matrix(6, seed);
            let s = real_schur(&a).unwrap();
            let n = a.nrows() as f64;
            let qtq = s.q.transpose() * &s.q;
            let eye = DMatrix::identity(6, 6);
            assert!((qtq - &eye).norm() <= 1e-12 * n);
            let rec = &s.q * &s.tmat * s.q.transpose();
            assert!((rec - &a).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn schur_of_symmetric_matches_char_poly_roots_3x3() {
        // Independent oracle: roots of the characteristic polynomial of a 3x3
        // symmetric matrix via the trigonometric cubic formula.
        let a = dense_from_rows(3, 3, &[2.0, 1.0, 0.5, 1.0, -1.0, 0.3, 0.5, 0.3, 0.7]).unwrap();
        let s = real_schur(&a).unwrap();
        let mut eigs: Vec<f64> = s.eigenvalues().iter().map(|e| e.re).collect();
        eigs.sort_by(f64::total_cmp);
        // char poly x^3 - c2 x^2 + c1 x - c0 with invariants of A
        let c2 = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
        let c1 = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)])
            + (a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)])
            + (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)]);
        let c0 = a.determinant();
        // depressed cubic t^3 + p t + q, roots via the trigonometric formula
        // (all real for symmetric input)
        let p = c1 - c2 * c2 / 3.0;
        let q = -2.0 * c2.powi(3) / 27.0 + c2 * c1 / 3.0 - c0;
        assert!(p < 0.0, "trig formula requires three real roots");
        let r = (-p / 3.0f64).sqrt();
        let phi = (3.0 * q / (2.0 * p * r)).clamp(-1.0, 1.0).acos() / 3.0;
        let mut roots: Vec<f64> = (0..3)
            .map(|k| 2.0 * r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + c2 / 3.0)
            .collect();
        roots.sort_by(f64::total_cmp);
        for (e, r) in eigs.iter().zip(roots.iter()) {
            assert_relative_eq!(e, r, max_relative = 1e-9, epsilon = 1e-10);
        }
    }

    #[test]
    fn schur_of_triangular_input() {
        let a = dense_from_rows(3, 3, &[1.0, 2.0, 3.0, 0.0, 4.0, 5.0, 0.0, 0.0, 6.0]).unwrap();
        let s = real_schur(&a).unwrap();
        let rec = &s.q * &s.tmat * s.q.transpose();
        assert!((rec - &a).norm() <= 1e-12 * a.norm());
        let mut eigs: Vec<f64> = s.eigenvalues().iter().map(|e| e.re).collect();
        eigs.sort_by(f64::total_cmp);
        assert_relative_eq!(eigs[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(eigs[1], 4.0, epsilon = 1e-10);
        assert_relative_eq!(eigs[2], 6.0, epsilon = 1e-10);
    }

    #[test]
    fn schur_of_rotation_generator_has_imaginary_pair() {
        let a = dense_from_rows(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let s = real_schur(&a).unwrap();
        let eigs = s.eigenvalues();
        let mut ims: Vec<f64> = eigs.iter().map(|e| e.im).collect();
        ims.sort_by(f64::total_cmp);
        assert_relative_eq!(ims[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(ims[1], 1.0, epsilon = 1e-12);
        assert!(eigs.iter().all(|e| e.re.abs() < 1e-12));
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-3.0, 2.0, 1.0]));
        assert_relative_eq!(spectral_norm(&a), 3.0, epsilon = 1e-12);
    }
}
