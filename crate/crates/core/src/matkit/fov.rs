//! Field-of-values (numerical range) queries: the logarithmic norm, a sampled
//! boundary of F(A), a certified lower bound on the distance from a point of
//! the imaginary axis to F(A), and the sectorial resolvent bound.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ensure_finite, ensure_square};
use crate::{Error, Result};

/// Number of support directions used by [`fov_distance`].
const FOV_ANGLES: usize = 64;

/// Sampled description of the numerical range F(A).
#[derive(Debug, Clone)]
pub struct FovEstimate {
    /// Logarithmic norm, the largest eigenvalue of the symmetric part.
    pub mu: f64,
    /// Boundary points `x* A x` attained by extreme eigenvectors of rotated
    /// Hermitian parts; all lie on the boundary of F(A).
    pub boundary: Vec<Complex64>,
    /// Number of rotation angles sampled (uniform on `[0, 2pi)`).
    pub angles: usize,
}

impl FovEstimate {
    /// Support value in direction `theta_j`: `max Re(e^{-i theta} z)` over
    /// F(A). Recovered exactly from the stored boundary point.
    pub fn support(&self, j: usize) -> f64 {
        let theta = self.angle(j);
        let z = self.boundary[j];
        theta.cos() * z.re + theta.sin() * z.im
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.angles as f64
    }

    /// Vertices of the outer polygon formed by intersecting the supporting
    /// half-planes; the polygon contains F(A).
    pub fn polygon_vertices(&self) -> Vec<Complex64> {
        let k = self.angles;
        let mut verts = Vec::with_capacity(k);
        for j in 0..k {
            let jn = (j + 1) % k;
            let (t0, t1) = (self.angle(j), self.angle(jn));
            let (h0, h1) = (self.support(j), self.support(jn));
            // solve cos t x + sin t y = h for the two adjacent directions
            let det = (t1 - t0).sin();
            let x = (h0 * t1.sin() - h1 * t0.sin()) / det;
            let y = (h1 * t0.cos() - h0 * t1.cos()) / det;
            verts.push(Complex64::new(x, y));
        }
        verts
    }

    /// Fit a left-opening sector `(alpha, gamma)` containing F(A): for each
    /// candidate half-angle `alpha` the smallest admissible vertex is
    /// `gamma(alpha) = max(mu, max_v(Re v + |Im v| cot(alpha)))` over the
    /// outer-polygon vertices; among candidates the fit prefers small
    /// half-angles with a nonpositive vertex. Returns `None` only for empty
    /// ranges (never in practice; a wide cone always exists).
    pub fn fit_sector(&self) -> Option<(f64, f64)> {
        let verts = self.polygon_vertices();
        let mut best: Option<(f64, f64, f64)> = None;
        for j in 1..90 {
            let alpha = std::f64::consts::FRAC_PI_2 * j as f64 / 90.0;
            let cot = 1.0 / alpha.tan();
            let gamma = verts
                .iter()
                .map(|v| v.re + v.im.abs() * cot)
                .fold(self.mu, f64::max);
            let score = (gamma.max(0.0) + 1.0) / alpha.cos();
            if best.map_or(true, |(s, _, _)| score < s) {
                best = Some((score, alpha, gamma));
            }
        }
        best.map(|(_, alpha, gamma)| (alpha, gamma))
    }
}

/// Logarithmic norm `mu(A)`: the largest eigenvalue of `(A + A^T)/2`.
pub fn log_norm(a: &DMatrix<f64>) -> Result<f64> {
    ensure_square("log_norm input", a)?;
    ensure_finite("log_norm input", a)?;
    let sym = (a + a.transpose()) * 0.5;
    let eigs = sym.symmetric_eigen().eigenvalues;
    Ok(eigs.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e)))
}

/// Sample the boundary of F(A) with `angles` uniformly rotated Hermitian
/// parts. For each angle the extreme eigenpair of `Herm(e^{-i theta} A)` gives
/// one support value and one boundary point.
pub fn fov_estimate(a: &DMatrix<f64>, angles: usize) -> Result<FovEstimate> {
    ensure_square("fov input", a)?;
    ensure_finite("fov input", a)?;
    if angles < 4 {
        return Err(Error::Domain("need at least 4 rotation angles".into()));
    }
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let skew = (a - a.transpose()) * 0.5;
    let mut boundary = Vec::with_capacity(angles);
    for j in 0..angles {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / angles as f64;
        // Herm(e^{-i theta} A) = cos(theta) S - i sin(theta) W with S
        // symmetric and W skew; embed as the real symmetric 2n x 2n matrix
        // [[Hr, -Hi], [Hi, Hr]] whose spectrum matches (doubled).
        let hr = &sym * theta.cos();
        let hi = &skew * (-theta.sin());
        let mut emb = DMatrix::<f64>::zeros(2 * n, 2 * n);
        emb.view_mut((0, 0), (n, n)).copy_from(&hr);
        emb.view_mut((n, n), (n, n)).copy_from(&hr);
        emb.view_mut((0, n), (n, n)).copy_from(&(-&hi));
        emb.view_mut((n, 0), (n, n)).copy_from(&hi);
        let eig = emb.symmetric_eigen();
        let (mut imax, mut emax) = (0usize, f64::NEG_INFINITY);
        for (i, &e) in eig.eigenvalues.iter().enumerate() {
            if e > emax {
                emax = e;
                imax = i;
            }
        }
        let vec = eig.eigenvectors.column(imax);
        let u = vec.rows(0, n);
        let v = vec.rows(n, n);
        // boundary point x* A x for x = u + i v (unit by embedding)
        let au = a * u;
        let av = a * v;
        let re = u.dot(&au) + v.dot(&av);
        let im = u.dot(&av) - v.dot(&au);
        boundary.push(Complex64::new(re, im));
    }
    let mu = log_norm(a)?;
    Ok(FovEstimate {
        mu,
        boundary,
        angles,
    })
}

/// Certified lower bound on the distance `d(i lambda, F(A))`.
///
/// The supporting half-planes of F(A) sampled at 64 angles intersect to an
/// outer polygon `P` with `F(A)` contained in `P`, so the distance from
/// `i lambda` to `P` never exceeds the true distance. Returns `0` when
/// `i lambda` lies inside the polygon; callers must treat a zero as "no
/// usable bound".
pub fn fov_distance(a: &DMatrix<f64>, lambda: f64) -> Result<f64> {
    let est = fov_estimate(a, FOV_ANGLES)?;
    Ok(fov_distance_from_estimate(&est, lambda))
}

/// Distance bound reusing a precomputed boundary sample.
pub fn fov_distance_from_estimate(est: &FovEstimate, lambda: f64) -> f64 {
    let p = Complex64::new(0.0, lambda);
    let inside = (0..est.angles).all(|j| {
        let theta = est.angle(j);
        theta.cos() * p.re + theta.sin() * p.im <= est.support(j) + 1e-14
    });
    if inside {
        return 0.0;
    }
    let verts = est.polygon_vertices();
    let k = verts.len();
    let mut dist = f64::INFINITY;
    for j in 0..k {
        dist = dist.min(point_segment_distance(p, verts[j], verts[(j + 1) % k]));
    }
    dist
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Resolvent bound `1 / (|lambda| cos(alpha) - gamma sin(alpha))` for a
/// sectorial matrix with half-angle `alpha` and vertex `gamma`; an upper bound
/// on `1 / d(i lambda, F(L))`.
pub fn sectorial_resolvent_bound(lambda: f64, alpha: f64, gamma: f64) -> Result<f64> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&alpha) {
        return Err(Error::Domain(format!(
            "half-angle {alpha} outside [0, pi/2)"
        )));
    }
    let denom = lambda.abs() * alpha.cos() - gamma * alpha.sin();
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "nonpositive denominator |lambda| cos(alpha) - gamma sin(alpha) = {denom:.3e}"
        )));
    }
    Ok(1.0 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::dense_from_rows;
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn log_norm_examples() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0]));
        assert_relative_eq!(log_norm(&a).unwrap(), -1.0, epsilon = 1e-12);
        let r = dense_from_rows(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(log_norm(&r).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn log_norm_dominates_random_rayleigh_quotients() {
        let mut rng = StdRng::seed_from_u64(5);
        let a = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let mu = log_norm(&a).unwrap();
        let mut best = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let x = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0f64)).normalize();
            // Re(x* A x) for real x equals x^T S x with S the symmetric part
            best = best.max(x.dot(&(&a * &x)));
        }
        assert!(mu >= best - 1e-12);
        assert!(mu - best <= 0.05 * crate::matkit::spectral_norm(&a));
    }

    #[test]
    fn fov_estimate_mu_matches_symmetric_part() {
        let mut rng = StdRng::seed_from_u64(17);
        let a = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
        let est = fov_estimate(&a, 64).unwrap();
        let mu = log_norm(&a).unwrap();
        assert!((est.mu - mu).abs() <= 1e-10 * crate::matkit::spectral_norm(&a).max(1.0));
    }

    #[test]
    fn fov_boundary_points_lie_in_hull_band() {
        let mut rng = StdRng::seed_from_u64(23);
        let a = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
        let est = fov_estimate(&a, 64).unwrap();
        let scale = crate::matkit::spectral_norm(&a).max(1.0);
        for z in &est.boundary {
            for j in 0..est.angles {
                let theta = est.angle(j);
                assert!(theta.cos() * z.re + theta.sin() * z.im <= est.support(j) + 1e-10 * scale);
            }
        }
    }

    #[test]
    fn distance_for_real_segment_spectrum() {
        // F(A) = [-3, -1] on the real axis; distance from i pi/2 is the exact
        // planar distance to the segment.
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -3.0]));
        let d = fov_distance(&a, PI / 2.0).unwrap();
        let exact = (1.0 + PI * PI / 4.0).sqrt();
        assert_relative_eq!(d, exact, max_relative = 1e-10);
    }

    #[test]
    fn distance_for_zero_matrix() {
        let a = DMatrix::<f64>::zeros(3, 3);
        assert_relative_eq!(fov_distance(&a, 2.0).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_lower_bounds_for_negative_semidefinite() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..5 {
            let m = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0f64));
            let a = -(&m * m.transpose()); // symmetric negative semidefinite
            let d = fov_distance(&a, PI).unwrap();
            assert!(d >= PI - 1e-10);
        }
    }

    #[test]
    fn distance_zero_inside_range() {
        // F of the rotation generator contains the segment [-i, i]
        let a = dense_from_rows(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert_eq!(fov_distance(&a, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn sectorial_bound_values() {
        assert_relative_eq!(
            sectorial_resolvent_bound(PI / 2.0, 0.0, 0.0).unwrap(),
            2.0 / PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            sectorial_resolvent_bound(2.0, PI / 4.0, 0.0).unwrap(),
            1.0 / 2.0f64.sqrt(),
            max_relative = 1e-14
        );
        let expect = 1.0 / (3.0 * (3.0f64.sqrt() / 2.0) + 0.5);
        assert_relative_eq!(
            sectorial_resolvent_bound(3.0, PI / 6.0, -1.0).unwrap(),
            expect,
            max_relative = 1e-14
        );
    }

    #[test]
    fn sectorial_bound_domain_errors() {
        assert!(sectorial_resolvent_bound(1.0, PI / 2.0, 0.0).is_err());
        // gamma sin(alpha) >= |lambda| cos(alpha) makes the denominator die
        assert!(sectorial_resolvent_bound(0.5, PI / 4.0, 1.0).is_err());
    }

    #[test]
    fn sector_fit_covers_advection_like_matrix() {
        // tridiagonal advection-diffusion block: sectorial, nonnormal
        let n = 12;
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = -2.0;
            if i + 1 < n {
                a[(i, i + 1)] = 1.3;
                a[(i + 1, i)] = 0.7;
            }
        }
        let est = fov_estimate(&a, 64).unwrap();
        let (alpha, gamma) = est.fit_sector().expect("sector must exist");
        assert!(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2);
        assert!(gamma >= est.mu);
        // every boundary point must lie inside the fitted cone
        for z in &est.boundary {
            let dx = gamma - z.re;
            if z.im.abs() > 1e-12 {
                assert!(z.im.abs() <= (dx + 1e-12) * alpha.tan() + 1e-10);
            }
        }
    }
}
