//! Adaptive Simpson quadrature over scalar-, complex-, vector- and
//! matrix-valued integrands. Serves as the fallback evaluation route when the
//! resolvent formula degenerates and as an independent oracle in tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Values adaptive Simpson can integrate: a normed vector space over f64.
pub trait QuadValue: Clone {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn norm(&self) -> f64;
}

impl QuadValue for f64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

impl QuadValue for DVector<f64> {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn norm(&self) -> f64 {
        nalgebra::DVector::norm(self)
    }
}

impl QuadValue for DMatrix<f64> {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn norm(&self) -> f64 {
        nalgebra::DMatrix::norm(self)
    }
}

const MAX_DEPTH: usize = 40;

/// Integrate `f` over `[a, b]` with adaptive Simpson refinement until the
/// local Richardson error estimate drops below `tol` (absolute, in the norm of
/// the value type).
pub fn adaptive_simpson<T, F>(f: &F, a: f64, b: f64, tol: f64) -> T
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson_rule(&fa, &fm, &fb, b - a);
    step(f, a, b, &fa, &fm, &fb, &whole, tol, MAX_DEPTH)
}

fn simpson_rule<T: QuadValue>(fa: &T, fm: &T, fb: &T, h: f64) -> T {
    fa.add(&fm.scale(4.0)).add(fb).scale(h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn step<T, F>(
    f: &F,
    a: f64,
    b: f64,
    fa: &T,
    fm: &T,
    fb: &T,
    whole: &T,
    tol: f64,
    depth: usize,
) -> T
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_rule(fa, &flm, fm, m - a);
    let right = simpson_rule(fm, &frm, fb, b - m);
    let refined = left.add(&right);
    let err = refined.sub(whole).norm() / 15.0;
    if err <= tol || depth == 0 {
        // accept with the standard Richardson correction
        refined.add(&refined.sub(whole).scale(1.0 / 15.0))
    } else {
        let l = step(f, a, m, fa, &flm, fm, &left, 0.5 * tol, depth - 1);
        let r = step(f, m, b, fm, &frm, fb, &right, 0.5 * tol, depth - 1);
        l.add(&r)
    }
}
