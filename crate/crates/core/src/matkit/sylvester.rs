//! Bartels-Stewart solver for the Sylvester equation `L X - X C = Q` on real
//! Schur forms of `L` and `C`. Diagonal 2x2 blocks couple into small Kronecker
//! systems of size at most 4.

use nalgebra::DMatrix;

use super::{
    ensure_finite, ensure_square, quasi_triangular_blocks, real_schur, SchurForm,
};
use crate::{Error, Result};

/// Reusable Sylvester solver with cached Schur decompositions, for callers
/// that solve `L X - X C = Q` repeatedly with fresh right-hand sides.
#[derive(Debug, Clone)]
pub struct SylvesterSolver {
    schur_l: SchurForm,
    schur_c: SchurForm,
    blocks_l: Vec<(usize, usize)>,
    blocks_c: Vec<(usize, usize)>,
}

impl SylvesterSolver {
    pub fn new(l: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<Self> {
        ensure_square("sylvester L", l)?;
        ensure_square("sylvester C", c)?;
        ensure_finite("sylvester L", l)?;
        ensure_finite("sylvester C", c)?;
        let schur_l = real_schur(l)?;
        let schur_c = real_schur(c)?;
        Self::from_schur(schur_l, schur_c)
    }

    /// Build from precomputed Schur forms (e.g. structurally exact ones).
    /// Checks that the spectra are disjoint relative to the matrix scales.
    pub fn from_schur(schur_l: SchurForm, schur_c: SchurForm) -> Result<Self> {
        let eig_l = schur_l.eigenvalues();
        let eig_c = schur_c.eigenvalues();
        let scale = schur_l.tmat.norm() + schur_c.tmat.norm();
        let threshold = 1e-12 * scale;
        let mut gap = f64::INFINITY;
        for a in &eig_l {
            for b in &eig_c {
                gap = gap.min((a - b).norm());
            }
        }
        if gap < threshold {
            return Err(Error::EigenvalueCollision {
                gap,
                threshold,
                context: "spectra of L and C must be disjoint for L X - X C = Q".into(),
            });
        }
        let blocks_l = quasi_triangular_blocks(&schur_l.tmat);
        let blocks_c = quasi_triangular_blocks(&schur_c.tmat);
        Ok(SylvesterSolver {
            schur_l,
            schur_c,
            blocks_l,
            blocks_c,
        })
    }

    pub fn solve(&self, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.schur_l.tmat.nrows();
        let m = self.schur_c.tmat.nrows();
        if q.nrows() != n || q.ncols() != m {
            return Err(Error::Dimension(format!(
                "right-hand side must be {n}x{m}, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        ensure_finite("sylvester rhs", q)?;

        let tl = &self.schur_l.tmat;
        let tc = &self.schur_c.tmat;
        // transform to Schur coordinates
        let f = self.schur_l.q.transpose() * q * &self.schur_c.q;
        let mut y = DMatrix::<f64>::zeros(n, m);

        for &(jc, qw) in &self.blocks_c {
            // fold the already-solved column blocks into this block's rhs
            let mut g = f.view((0, jc), (n, qw)).clone_owned();
            if jc > 0 {
                g += y.view((0, 0), (n, jc)) * tc.view((0, jc), (jc, qw));
            }
            // bottom-up over the row blocks of T_L
            for &(il, pw) in self.blocks_l.iter().rev() {
                let tail = il + pw;
                let mut rhs = g.view((il, 0), (pw, qw)).clone_owned();
                if tail < n {
                    rhs -= tl.view((il, tail), (pw, n - tail)) * y.view((tail, jc), (n - tail, qw));
                }
                let a = tl.view((il, il), (pw, pw));
                let b = tc.view((jc, jc), (qw, qw));
                // (I_q (x) A - B^T (x) I_p) vec(Z) = vec(rhs)
                let dim = pw * qw;
                let mut small = DMatrix::<f64>::zeros(dim, dim);
                for cj in 0..qw {
                    for ci in 0..qw {
                        for ri in 0..pw {
                            for rj in 0..pw {
                                let mut v = 0.0;
                                if ci == cj {
                                    v += a[(ri, rj)];
                                }
                                if ri == rj {
                                    v -= b[(cj, ci)];
                                }
                                small[(ci * pw + ri, cj * pw + rj)] = v;
                            }
                        }
                    }
                }
                let vec_rhs =
                    nalgebra::DVector::from_fn(dim, |k, _| rhs[(k % pw, k / pw)]);
                let sol = small.lu().solve(&vec_rhs).ok_or_else(|| {
                    Error::Numerical(
                        "singular diagonal-block system in Sylvester back-substitution".into(),
                    )
                })?;
                for cj in 0..qw {
                    for ri in 0..pw {
                        y[(il + ri, jc + cj)] = sol[cj * pw + ri];
                    }
                }
            }
        }
        Ok(&self.schur_l.q * y * self.schur_c.q.transpose())
    }
}

/// One-shot solve of `L X - X C = Q`. The spectra of `L` and `C` must be
/// disjoint; a near-collision is reported with the offending eigenvalue gap.
pub fn solve_sylvester(
    l: &DMatrix<f64>,
    c: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    SylvesterSolver::new(l, c)?.solve(q)
}
