//! Trigonometric phi functions of scalar and matrix arguments.
//!
//! For a frequency `lambda` and horizon `t` these are the convolutions of the
//! exponential semigroup with a cosine or sine forcing,
//!
//! ```text
//! phi_cos(z) = int_0^t e^{(t-s) z} cos(lambda s) ds
//! phi_sin(z) = int_0^t e^{(t-s) z} sin(lambda s) ds
//! ```
//!
//! both entire in `z`. Scalars are evaluated through stabilized divided
//! differences of the exponential, which handle the removable singularities
//! at `z = +/- i lambda` uniformly. Matrix arguments go through the resolvent
//! formula `Re/Im((e^{tA} - e^{i lambda t} I)(A - i lambda I)^{-1})` with a
//! quadrature fallback when `i lambda` collides with the spectrum.

pub mod quad;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::matkit::{self, expm, fov_distance_from_estimate, fov_estimate, FovEstimate};
use crate::{Error, Result};

/// A frequency/horizon pair identifying one phi function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSpec {
    /// Angular frequency (radians per unit time).
    pub lambda: f64,
    /// Upper integration limit; must be nonnegative.
    pub t: f64,
}

impl PhiSpec {
    pub fn new(lambda: f64, t: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NonFinite(format!("frequency {lambda}")));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("horizon {t} must be finite and >= 0")));
        }
        Ok(PhiSpec { lambda, t })
    }
}

/// Stabilized divided difference `(e^{t z} - e^{t w}) / (z - w)`.
///
/// Near confluence the rational form loses all digits to cancellation, so it
/// switches to a fourth-order series of `e^{t w} t (e^{t h} - 1)/(t h)`.
fn exp_divided_difference(t: f64, z: Complex64, w: Complex64) -> Complex64 {
    let h = z - w;
    let scale = z.norm().max(w.norm()).max(1.0);
    if h.norm() > 1e-7 * scale {
        ((z * t).exp() - (w * t).exp()) / h
    } else {
        let th = h * t;
        let series = Complex64::new(1.0, 0.0)
            + th * 0.5
            + th * th * (1.0 / 6.0)
            + th * th * th * (1.0 / 24.0);
        (w * t).exp() * t * series
    }
}

/// Evaluate `phi_cos` at a complex scalar argument.
pub fn phi_cos_scalar(spec: PhiSpec, z: Complex64) -> Complex64 {
    let il = Complex64::new(0.0, spec.lambda);
    let plus = exp_divided_difference(spec.t, z, il);
    let minus = exp_divided_difference(spec.t, z, -il);
    (plus + minus) * 0.5
}

/// Evaluate `phi_sin` at a complex scalar argument.
pub fn phi_sin_scalar(spec: PhiSpec, z: Complex64) -> Complex64 {
    let il = Complex64::new(0.0, spec.lambda);
    let plus = exp_divided_difference(spec.t, z, il);
    let minus = exp_divided_difference(spec.t, z, -il);
    (plus - minus) / Complex64::new(0.0, 2.0)
}

/// `phi_cos` at a real argument (the imaginary part vanishes identically).
pub fn phi_cos_real(spec: PhiSpec, x: f64) -> f64 {
    phi_cos_scalar(spec, Complex64::new(x, 0.0)).re
}

/// `phi_sin` at a real argument.
pub fn phi_sin_real(spec: PhiSpec, x: f64) -> f64 {
    phi_sin_scalar(spec, Complex64::new(x, 0.0)).re
}

/// How a matrix phi value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiRoute {
    /// Complex resolvent solve (the default).
    Resolvent,
    /// Quadrature fallback taken because `i lambda` is numerically an
    /// eigenvalue of the argument.
    Quadrature,
}

/// A matrix phi value together with the evaluation route that produced it.
#[derive(Debug, Clone)]
pub struct MatrixPhi {
    pub matrix: DMatrix<f64>,
    pub route: PhiRoute,
}

/// Shared-state evaluator of matrix phi functions for a fixed `(A, t)`.
///
/// `e^{tA}` is computed once and reused across all frequencies; each
/// frequency costs one complex linear solve.
#[derive(Debug, Clone)]
pub struct PhiMatrixEvaluator {
    a: DMatrix<f64>,
    t: f64,
    exp_ta: DMatrix<f64>,
    eigvals: Vec<Complex64>,
    scale: f64,
}

/// Relative spectral-gap threshold below which the resolvent formula is
/// abandoned for quadrature.
const GAP_THRESHOLD: f64 = 1e-7;

impl PhiMatrixEvaluator {
    pub fn new(a: &DMatrix<f64>, t: f64) -> Result<Self> {
        let exp_ta = expm(a, t)?;
        Self::with_exp(a, t, exp_ta)
    }

    /// Reuse a caller-supplied `e^{tA}`.
    pub fn with_exp(a: &DMatrix<f64>, t: f64, exp_ta: DMatrix<f64>) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("horizon {t} must be finite and >= 0")));
        }
        if exp_ta.nrows() != a.nrows() || exp_ta.ncols() != a.ncols() {
            return Err(Error::Dimension(
                "supplied exponential does not match the matrix size".into(),
            ));
        }
        let eigvals = matkit::real_schur(a)?.eigenvalues();
        let scale = a.norm().max(1.0);
        Ok(PhiMatrixEvaluator {
            a: a.clone(),
            t,
            exp_ta,
            eigvals,
            scale,
        })
    }

    pub fn exp_ta(&self) -> &DMatrix<f64> {
        &self.exp_ta
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    fn resolvent_degenerate(&self, lambda: f64) -> bool {
        let il = Complex64::new(0.0, lambda);
        let gap = self
            .eigvals
            .iter()
            .map(|e| (e - il).norm())
            .fold(f64::INFINITY, f64::min);
        gap < GAP_THRESHOLD * self.scale.max(lambda.abs())
    }

    /// Solve `(A - i lambda I) M = e^{tA} - e^{i lambda t} I` for the full
    /// complex phi matrix `M = phi_cos(A) + i phi_sin(A)`.
    fn resolvent_matrix(&self, lambda: f64) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        let il = Complex64::new(0.0, lambda);
        let shift = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.a[(i, j)], 0.0) - if i == j { il } else { Complex64::ZERO }
        });
        let phase = (il * self.t).exp();
        let rhs = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.exp_ta[(i, j)], 0.0) - if i == j { phase } else { Complex64::ZERO }
        });
        shift
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular resolvent shift in phi evaluation".into()))
    }

    pub fn phi_cos(&self, lambda: f64) -> Result<MatrixPhi> {
        Ok(self.phi_pair(lambda)?.0)
    }

    pub fn phi_sin(&self, lambda: f64) -> Result<MatrixPhi> {
        Ok(self.phi_pair(lambda)?.1)
    }

    /// Both phi matrices for one frequency, sharing a single solve.
    pub fn phi_pair(&self, lambda: f64) -> Result<(MatrixPhi, MatrixPhi)> {
        if !lambda.is_finite() {
            return Err(Error::NonFinite(format!("frequency {lambda}")));
        }
        if self.resolvent_degenerate(lambda) {
            let cos = self.quadrature_matrix(lambda, false)?;
            let sin = self.quadrature_matrix(lambda, true)?;
            return Ok((
                MatrixPhi {
                    matrix: cos,
                    route: PhiRoute::Quadrature,
                },
                MatrixPhi {
                    matrix: sin,
                    route: PhiRoute::Quadrature,
                },
            ));
        }
        let m = self.resolvent_matrix(lambda)?;
        let cos = m.map(|e| e.re);
        let sin = m.map(|e| e.im);
        Ok((
            MatrixPhi {
                matrix: cos,
                route: PhiRoute::Resolvent,
            },
            MatrixPhi {
                matrix: sin,
                route: PhiRoute::Resolvent,
            },
        ))
    }

    /// Apply `phi_cos(A) a + phi_sin(A) b` with a single complex solve.
    ///
    /// Uses `Re((A - i lambda I)^{-1} (e^{tA} - e^{i lambda t} I)(a - i b))`,
    /// which equals the sum because the resolvent and the exponential commute.
    pub fn phi_apply(
        &self,
        lambda: f64,
        a_vec: &DVector<f64>,
        b_vec: &DVector<f64>,
    ) -> Result<(DVector<f64>, PhiRoute)> {
        let n = self.dim();
        if a_vec.len() != n || b_vec.len() != n {
            return Err(Error::Dimension(format!(
                "forcing vectors must have length {n}"
            )));
        }
        if self.resolvent_degenerate(lambda) {
            let t = self.t;
            let a = self.a.clone();
            let av = a_vec.clone();
            let bv = b_vec.clone();
            let f = move |s: f64| -> DVector<f64> {
                let e = expm(&a, t - s).expect("expm inside quadrature");
                &e * (&av * (lambda * s).cos() + &bv * (lambda * s).sin())
            };
            let tol = 1e-12 * (a_vec.norm() + b_vec.norm()).max(1.0) * self.scale;
            let v = quad::adaptive_simpson(&f, 0.0, t, tol);
            return Ok((v, PhiRoute::Quadrature));
        }
        let il = Complex64::new(0.0, lambda);
        let phase = (il * self.t).exp();
        let w = DVector::from_fn(n, |i, _| Complex64::new(a_vec[i], -b_vec[i]));
        let nw = DVector::from_fn(n, |i, _| {
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                acc += Complex64::new(self.exp_ta[(i, j)], 0.0) * w[j];
            }
            acc - phase * w[i]
        });
        let shift = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.a[(i, j)], 0.0) - if i == j { il } else { Complex64::ZERO }
        });
        let y = shift
            .lu()
            .solve(&nw)
            .ok_or_else(|| Error::Numerical("singular resolvent shift in phi apply".into()))?;
        Ok((y.map(|e| e.re), PhiRoute::Resolvent))
    }

    fn quadrature_matrix(&self, lambda: f64, sine: bool) -> Result<DMatrix<f64>> {
        let t = self.t;
        let a = self.a.clone();
        let f = move |s: f64| -> DMatrix<f64> {
            let e = expm(&a, t - s).expect("expm inside quadrature");
            let w = if sine {
                (lambda * s).sin()
            } else {
                (lambda * s).cos()
            };
            e * w
        };
        let tol = 1e-12 * self.scale * (self.dim() as f64).sqrt().max(1.0);
        Ok(quad::adaptive_simpson(&f, 0.0, t, tol))
    }
}

/// `phi_cos` of a matrix argument (one-shot convenience around the
/// evaluator).
pub fn phi_cos_matrix(spec: PhiSpec, a: &DMatrix<f64>) -> Result<MatrixPhi> {
    PhiMatrixEvaluator::new(a, spec.t)?.phi_cos(spec.lambda)
}

/// `phi_sin` of a matrix argument.
pub fn phi_sin_matrix(spec: PhiSpec, a: &DMatrix<f64>) -> Result<MatrixPhi> {
    PhiMatrixEvaluator::new(a, spec.t)?.phi_sin(spec.lambda)
}

/// A-priori bound `(1 + e^{t mu(A)}) / d(i lambda, F(A))` on the spectral
/// norm of both matrix phi functions. Fails when `i lambda` lies in the
/// numerical range.
pub fn phi_norm_bound(spec: PhiSpec, a: &DMatrix<f64>) -> Result<f64> {
    let est = fov_estimate(a, 64)?;
    phi_norm_bound_from_estimate(spec, &est)
}

/// Same bound reusing a precomputed boundary sample.
pub fn phi_norm_bound_from_estimate(spec: PhiSpec, est: &FovEstimate) -> Result<f64> {
    let d = fov_distance_from_estimate(est, spec.lambda);
    if d <= 0.0 {
        return Err(Error::BoundUnavailable(format!(
            "i*{} lies in the numerical range; no resolvent bound",
            spec.lambda
        )));
    }
    Ok((1.0 + (spec.t * est.mu).exp()) / d)
}
