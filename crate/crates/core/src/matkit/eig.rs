//! Eigendecomposition of general real matrices: Schur eigenvalues refined by
//! shifted inverse (subspace) iteration in complex arithmetic. Intended for
//! diagonalizable inputs; defectiveness surfaces as a failed residual or an
//! enormous eigenvector condition number, which callers gate on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{ensure_finite, ensure_square, real_schur};
use crate::{Error, Result};

/// Spectral decomposition `A = V diag(values) V^{-1}`.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<Complex64>,
    pub vectors: DMatrix<Complex64>,
    pub vectors_inv: DMatrix<Complex64>,
    /// Frobenius-norm estimate of the condition number of `vectors`
    /// (an upper bound on the spectral condition number up to a factor `n`).
    pub cond_estimate: f64,
}

/// Decompose a general real matrix. Fails with [`Error::Numerical`] when the
/// eigenvector basis cannot be resolved (defective or pathologically
/// clustered input).
pub fn eig_general(a: &DMatrix<f64>) -> Result<Eigendecomposition> {
    ensure_square("eig input", a)?;
    ensure_finite("eig input", a)?;
    let n = a.nrows();
    let schur = real_schur(a)?;
    let mut values = schur.eigenvalues();
    let scale = a.norm().max(1.0);
    let ac = DMatrix::from_fn(n, n, |i, j| Complex64::new(a[(i, j)], 0.0));

    // group (numerically) coincident eigenvalues so repeated semisimple
    // eigenvalues get an orthonormal basis of their eigenspace
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .re
            .total_cmp(&values[j].re)
            .then(values[i].im.total_cmp(&values[j].im))
    });
    let group_tol = 1e-8 * scale;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match groups.last_mut() {
            Some(g) if (values[g[0]] - values[idx]).norm() <= group_tol => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }

    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for group in &groups {
        let g = group.len();
        let lambda = group.iter().map(|&i| values[i]).sum::<Complex64>() / g as f64;
        // small complex detuning keeps the shifted LU comfortably regular
        let shift = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
        let shifted = &ac
            - DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    shift
                } else {
                    Complex64::ZERO
                }
            });
        let lu = shifted.lu();
        // deterministic pseudo-random starts, orthonormalized every sweep
        let mut basis: Vec<DVector<Complex64>> = (0..g)
            .map(|j| {
                DVector::from_fn(n, |i, _| {
                    Complex64::new(
                        (0.7 * ((i + 1) * (j + 2)) as f64).cos(),
                        (1.3 * (i + 1) as f64 + 0.4 * j as f64).sin(),
                    )
                })
            })
            .collect();
        for _sweep in 0..3 {
            for v in basis.iter_mut() {
                *v = lu.solve(v).ok_or_else(|| {
                    Error::Numerical("singular shift in inverse iteration".into())
                })?;
            }
            orthonormalize(&mut basis, scale)?;
        }
        for (j, &idx) in group.iter().enumerate() {
            // Rayleigh refinement of the eigenvalue
            let av = &ac * &basis[j];
            let refined = basis[j].dotc(&av);
            let residual = (&av - &basis[j] * refined).norm();
            if residual > 1e-6 * scale {
                return Err(Error::Numerical(format!(
                    "inverse iteration residual {residual:.3e} too large; \
                     matrix may be defective"
                )));
            }
            values[idx] = refined;
            vectors.set_column(idx, &basis[j]);
        }
    }

    let vectors_inv = vectors.clone().lu().try_inverse().ok_or_else(|| {
        Error::Numerical("eigenvector basis is numerically singular".into())
    })?;
    let cond_estimate = vectors.norm() * vectors_inv.norm();
    Ok(Eigendecomposition {
        values,
        vectors,
        vectors_inv,
        cond_estimate,
    })
}

fn orthonormalize(basis: &mut [DVector<Complex64>], scale: f64) -> Result<()> {
    let n = basis.len();
    for i in 0..n {
        for j in 0..i {
            let proj = basis[j].dotc(&basis[i]);
            let prev = basis[j].clone();
            basis[i] -= prev * proj;
        }
        let norm = basis[i].norm();
        if norm <= 1e-10 * scale.max(1.0) {
            return Err(Error::Numerical(
                "eigenspace basis collapsed during orthonormalization; \
                 matrix may be defective"
                    .into(),
            ));
        }
        basis[i] /= Complex64::new(norm, 0.0);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::dense_from_rows;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn check_decomposition(a: &DMatrix<f64>, tol: f64) {
        let e = eig_general(a).unwrap();
        let n = a.nrows();
        let ac = DMatrix::from_fn(n, n, |i, j| Complex64::new(a[(i, j)], 0.0));
        let d = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                e.values[i]
            } else {
                Complex64::ZERO
            }
        });
        let rec = &e.vectors * d * &e.vectors_inv;
        assert!(
            (rec - &ac).norm() <= tol * a.norm().max(1.0),
            "reconstruction error too large"
        );
    }

    #[test]
    fn random_nonsymmetric_matrices() {
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..5 {
            let a = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0f64));
            check_decomposition(&a, 1e-9);
        }
    }

    #[test]
    fn repeated_semisimple_eigenvalues() {
        // block diag(-2, -2, -5) has a two-dimensional eigenspace
        let a = dense_from_rows(
            3,
            3,
            &[-2.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, -5.0],
        )
        .unwrap();
        check_decomposition(&a, 1e-10);
    }

    #[test]
    fn complex_conjugate_pairs() {
        let a = dense_from_rows(2, 2, &[0.0, -3.0, 3.0, 0.0]).unwrap();
        let e = eig_general(&a).unwrap();
        let mut ims: Vec<f64> = e.values.iter().map(|v| v.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 3.0).abs() < 1e-9 && (ims[1] - 3.0).abs() < 1e-9);
        check_decomposition(&a, 1e-10);
    }

    #[test]
    fn defective_matrix_is_rejected_or_ill_conditioned() {
        let a = dense_from_rows(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        match eig_general(&a) {
            Err(_) => {}
            Ok(e) => assert!(e.cond_estimate > 1e8, "cond {}", e.cond_estimate),
        }
    }
}
