//! Endpoint sampling of the linear SDE `dX = L X dt + B dW` through a
//! truncated Karhunen-Loeve expansion of the noise,
//!
//! ```text
//! X_t^m = e^{tL} X_0 + amp * sum_{k=1..m} phi_cos_k(L) B Z_k,
//! ```
//!
//! plus the deterministic Fourier-forced ODE solvers this formula is a
//! special case of. Four interchangeable strategies evaluate the sum:
//!
//! * `PhiSeries` — precompute the `m` matrices `phi_cos_k(L) B` once, then
//!   each sample is a single stacked matrix-vector product;
//! * `Diagonalized` — eigendecompose `L` once, evaluate scalar phi tables on
//!   the spectrum; with symmetric `L` and `B = cI` a further fast path skips
//!   the basis rotation of the draws entirely;
//! * `AugmentedExp` — one `(n + 2m)` square matrix exponential per draw;
//! * `Sylvester` — per draw, solve `L X - X C = e^{tL} B_blk - B_blk e^{tC}`
//!   with cached Schur factors, where `C` is the skew block of the expansion
//!   frequencies.
//!
//! All strategies are output-equivalent pathwise for a common draw.

use nalgebra::{DMatrix, DVector, DVectorView};
use num_complex::Complex64;

use crate::klprocess::{GaussianDraw, KlBasis, KlBasisKind};
use crate::matkit::{self, eig_general, expm, real_schur, SchurForm, SylvesterSolver};
use crate::phifn::PhiMatrixEvaluator;
use crate::{Error, Result};

/// The problem tuple defining `dX = L X dt + B dW` with its expansion basis.
#[derive(Debug, Clone)]
pub struct SdeProblem {
    pub l: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub x0: DVector<f64>,
    pub t_end: f64,
    pub basis: KlBasis,
}

impl SdeProblem {
    /// Build a problem whose expansion horizon equals `t_end`.
    pub fn new(
        l: DMatrix<f64>,
        b: DMatrix<f64>,
        x0: DVector<f64>,
        t_end: f64,
        kind: KlBasisKind,
    ) -> Result<Self> {
        let basis = KlBasis::new(kind, t_end)?;
        Self::with_basis(l, b, x0, t_end, basis)
    }

    /// Build with an explicit basis; its horizon must cover `t_end`.
    pub fn with_basis(
        l: DMatrix<f64>,
        b: DMatrix<f64>,
        x0: DVector<f64>,
        t_end: f64,
        basis: KlBasis,
    ) -> Result<Self> {
        matkit::ensure_square("drift L", &l)?;
        matkit::ensure_finite("drift L", &l)?;
        matkit::ensure_finite("noise loading B", &b)?;
        matkit::ensure_finite_vec("initial state", &x0)?;
        let n = l.nrows();
        if b.nrows() != n {
            return Err(Error::Dimension(format!(
                "B must have {n} rows, got {}",
                b.nrows()
            )));
        }
        if x0.len() != n {
            return Err(Error::Dimension(format!(
                "initial state must have length {n}, got {}",
                x0.len()
            )));
        }
        if !t_end.is_finite() || t_end <= 0.0 {
            return Err(Error::Domain(format!(
                "t_end {t_end} must be finite and positive"
            )));
        }
        if t_end > basis.horizon() * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "t_end {t_end} exceeds the expansion horizon {}",
                basis.horizon()
            )));
        }
        Ok(SdeProblem {
            l,
            b,
            x0,
            t_end,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Number of independent noise channels (columns of `B`).
    pub fn noise_dim(&self) -> usize {
        self.b.ncols()
    }

    /// Returns `c` when `B = c I`.
    pub fn isotropic_noise(&self) -> Option<f64> {
        let n = self.dim();
        if self.b.ncols() != n {
            return None;
        }
        let c = self.b[(0, 0)];
        let tol = 1e-14 * c.abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { c } else { 0.0 };
                if (self.b[(i, j)] - want).abs() > tol {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// True when `L` is symmetric to roundoff.
    pub fn symmetric_drift(&self) -> bool {
        let n = self.dim();
        let scale = self.l.norm().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.l[(i, j)] - self.l[(j, i)]).abs() > 1e-13 * scale {
                    return false;
                }
            }
        }
        true
    }
}

/// Finite Fourier forcing `g(t) = sum_k a_k cos(c_k t) + b_k sin(c_k t)`.
#[derive(Debug, Clone)]
pub struct FourierForcing {
    cos_coeffs: Vec<DVector<f64>>,
    sin_coeffs: Vec<DVector<f64>>,
    frequencies: Vec<f64>,
}

impl FourierForcing {
    pub fn new(
        cos_coeffs: Vec<DVector<f64>>,
        sin_coeffs: Vec<DVector<f64>>,
        frequencies: Vec<f64>,
    ) -> Result<Self> {
        if cos_coeffs.len() != frequencies.len() || sin_coeffs.len() != frequencies.len() {
            return Err(Error::Dimension(format!(
                "coefficient lists must share length: {} cos, {} sin, {} frequencies",
                cos_coeffs.len(),
                sin_coeffs.len(),
                frequencies.len()
            )));
        }
        if let Some(first) = cos_coeffs.first() {
            let n = first.len();
            if cos_coeffs
                .iter()
                .chain(sin_coeffs.iter())
                .any(|v| v.len() != n)
            {
                return Err(Error::Dimension(
                    "all coefficient vectors must share one dimension".into(),
                ));
            }
        }
        if frequencies.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("forcing frequency".into()));
        }
        Ok(FourierForcing {
            cos_coeffs,
            sin_coeffs,
            frequencies,
        })
    }

    pub fn empty() -> Self {
        FourierForcing {
            cos_coeffs: Vec::new(),
            sin_coeffs: Vec::new(),
            frequencies: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn cos_coeff(&self, k: usize) -> &DVector<f64> {
        &self.cos_coeffs[k]
    }

    pub fn sin_coeff(&self, k: usize) -> &DVector<f64> {
        &self.sin_coeffs[k]
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.frequencies[k]
    }

    /// Evaluate the forcing at time `t`.
    pub fn eval(&self, t: f64, dim: usize) -> DVector<f64> {
        let mut g = DVector::zeros(dim);
        for k in 0..self.len() {
            let c = self.frequencies[k];
            g += self.cos_coeffs[k].clone() * (c * t).cos();
            g += self.sin_coeffs[k].clone() * (c * t).sin();
        }
        g
    }
}

/// Evaluation strategy for the truncated expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Diagonalized,
    PhiSeries,
    AugmentedExp,
    Sylvester,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Diagonalized => "diagonalized",
            Strategy::PhiSeries => "phi-series",
            Strategy::AugmentedExp => "augmented-exp",
            Strategy::Sylvester => "sylvester",
        }
    }
}

#[derive(Debug, Clone)]
enum PlanCache {
    /// Stacked `[phi_1 B | ... | phi_m B]`, `n x (m q)`.
    PhiSeries { stack: DMatrix<f64> },
    /// Real orthogonal eigenbasis of symmetric `L`; `phi` is term-major
    /// `m x n`. `iso` carries the `B = cI` scalar enabling the rotation-free
    /// fast path.
    DiagonalizedReal {
        v: DMatrix<f64>,
        vinv_b: DMatrix<f64>,
        phi: Vec<f64>,
        iso: Option<f64>,
    },
    /// Complex eigenbasis of a general diagonalizable `L`.
    DiagonalizedComplex {
        v: DMatrix<Complex64>,
        vinv_b: DMatrix<Complex64>,
        phi: Vec<Complex64>,
    },
    /// No sample-independent work beyond the common cache.
    AugmentedExp,
    /// Cached Schur factors of `L` and of the skew frequency block, plus the
    /// diagonal of `e^{tC}`.
    Sylvester {
        solver: Box<SylvesterSolver>,
        cos_t: Vec<f64>,
        sin_t: Vec<f64>,
    },
}

/// A prepared sampling plan: all sample-independent work done once.
#[derive(Debug, Clone)]
pub struct SamplerPlan {
    problem: SdeProblem,
    m: usize,
    requested: Strategy,
    effective: Strategy,
    amplitude: f64,
    freqs: Vec<f64>,
    exp_tl: DMatrix<f64>,
    exp_tl_x0: DVector<f64>,
    cache: PlanCache,
}

/// Eigenvector condition number above which diagonalization is refused.
const DIAG_COND_LIMIT: f64 = 1e8;

/// Prepare a sampling plan for `m` expansion terms with the given strategy.
pub fn prepare(problem: &SdeProblem, m: usize, strategy: Strategy) -> Result<SamplerPlan> {
    let t = problem.t_end;
    let exp_tl = expm(&problem.l, t)?;
    let exp_tl_x0 = &exp_tl * &problem.x0;
    let freqs = problem.basis.frequencies(m);
    let amplitude = problem.basis.amplitude();

    let (cache, effective) = match strategy {
        Strategy::PhiSeries => (build_phi_series(problem, &exp_tl, &freqs)?, strategy),
        Strategy::AugmentedExp => (PlanCache::AugmentedExp, strategy),
        Strategy::Diagonalized => (build_diagonalized(problem, &freqs)?, strategy),
        Strategy::Sylvester => match build_sylvester(problem, &freqs) {
            Ok(cache) => (cache, strategy),
            Err(Error::EigenvalueCollision { gap, threshold, .. }) => {
                log::warn!(
                    "spectrum of L meets an expansion frequency (gap {gap:.3e} < {threshold:.3e}); \
                     falling back to the phi-series strategy"
                );
                (
                    build_phi_series(problem, &exp_tl, &freqs)?,
                    Strategy::PhiSeries,
                )
            }
            Err(e) => return Err(e),
        },
    };

    Ok(SamplerPlan {
        problem: problem.clone(),
        m,
        requested: strategy,
        effective,
        amplitude,
        freqs,
        exp_tl,
        exp_tl_x0,
        cache,
    })
}

fn build_phi_series(
    problem: &SdeProblem,
    exp_tl: &DMatrix<f64>,
    freqs: &[f64],
) -> Result<PlanCache> {
    let n = problem.dim();
    let q = problem.noise_dim();
    let ev = PhiMatrixEvaluator::with_exp(&problem.l, problem.t_end, exp_tl.clone())?;
    let mut stack = DMatrix::<f64>::zeros(n, freqs.len() * q);
    for (k, &lambda) in freqs.iter().enumerate() {
        let phi = ev.phi_cos(lambda)?;
        let block = phi.matrix * &problem.b;
        stack.view_mut((0, k * q), (n, q)).copy_from(&block);
    }
    Ok(PlanCache::PhiSeries { stack })
}

fn build_diagonalized(problem: &SdeProblem, freqs: &[f64]) -> Result<PlanCache> {
    let n = problem.dim();
    let t = problem.t_end;
    if problem.symmetric_drift() {
        let eig = problem.l.clone().symmetric_eigen();
        let v = eig.eigenvectors.clone();
        let vinv_b = eig.eigenvectors.transpose() * &problem.b;
        let mut phi = Vec::with_capacity(freqs.len() * n);
        for &lambda in freqs {
            let spec = crate::phifn::PhiSpec::new(lambda, t)?;
            for i in 0..n {
                phi.push(crate::phifn::phi_cos_real(spec, eig.eigenvalues[i]));
            }
        }
        return Ok(PlanCache::DiagonalizedReal {
            v,
            vinv_b,
            phi,
            iso: problem.isotropic_noise(),
        });
    }
    let eig = eig_general(&problem.l).map_err(|e| {
        Error::StrategyUnavailable(format!(
            "diagonalization failed ({e}); use the phi-series strategy instead"
        ))
    })?;
    if eig.cond_estimate > DIAG_COND_LIMIT {
        return Err(Error::StrategyUnavailable(format!(
            "eigenvector basis condition {:.3e} exceeds {DIAG_COND_LIMIT:.1e}; \
             use the phi-series strategy instead",
            eig.cond_estimate
        )));
    }
    let bc = DMatrix::from_fn(n, problem.noise_dim(), |i, j| {
        Complex64::new(problem.b[(i, j)], 0.0)
    });
    let vinv_b = &eig.vectors_inv * bc;
    let mut phi = Vec::with_capacity(freqs.len() * n);
    for &lambda in freqs {
        let spec = crate::phifn::PhiSpec::new(lambda, t)?;
        for i in 0..n {
            phi.push(crate::phifn::phi_cos_scalar(spec, eig.values[i]));
        }
    }
    Ok(PlanCache::DiagonalizedComplex {
        v: eig.vectors,
        vinv_b,
        phi,
    })
}

fn build_sylvester(problem: &SdeProblem, freqs: &[f64]) -> Result<PlanCache> {
    let m = freqs.len();
    let t = problem.t_end;
    let schur_l = real_schur(&problem.l)?;
    // the skew frequency block C = [[0, -Lambda], [Lambda, 0]] has the exact
    // real Schur form P^T C P = blockdiag([[0, -lambda_k], [lambda_k, 0]])
    // with P the perfect-shuffle permutation pairing k with m + k
    let mut perm = DMatrix::<f64>::zeros(2 * m, 2 * m);
    let mut tc = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for (k, &lambda) in freqs.iter().enumerate() {
        perm[(k, 2 * k)] = 1.0;
        perm[(m + k, 2 * k + 1)] = 1.0;
        tc[(2 * k, 2 * k + 1)] = -lambda;
        tc[(2 * k + 1, 2 * k)] = lambda;
    }
    let schur_c = SchurForm::from_parts(perm, tc);
    let solver = SylvesterSolver::from_schur(schur_l, schur_c)?;
    let cos_t = freqs.iter().map(|&l| (l * t).cos()).collect();
    let sin_t = freqs.iter().map(|&l| (l * t).sin()).collect();
    Ok(PlanCache::Sylvester {
        solver: Box::new(solver),
        cos_t,
        sin_t,
    })
}

impl SamplerPlan {
    pub fn problem(&self) -> &SdeProblem {
        &self.problem
    }

    pub fn truncation(&self) -> usize {
        self.m
    }

    pub fn requested_strategy(&self) -> Strategy {
        self.requested
    }

    /// Strategy actually in effect (differs from the requested one only for
    /// the Sylvester -> phi-series frequency-collision fallback).
    pub fn strategy(&self) -> Strategy {
        self.effective
    }

    pub fn deterministic_part(&self) -> &DVector<f64> {
        &self.exp_tl_x0
    }

    pub fn exp_tl(&self) -> &DMatrix<f64> {
        &self.exp_tl
    }

    /// Whether [`sample_normal_fastpath`] applies: symmetric drift with
    /// isotropic noise.
    pub fn supports_normal_fastpath(&self) -> bool {
        matches!(
            self.cache,
            PlanCache::DiagonalizedReal { iso: Some(_), .. }
        )
    }

    fn check_draw(&self, draw: &GaussianDraw) -> Result<()> {
        if draw.m() < self.m {
            return Err(Error::Dimension(format!(
                "draw provides {} terms, plan needs {}",
                draw.m(),
                self.m
            )));
        }
        if draw.n() != self.problem.noise_dim() {
            return Err(Error::Dimension(format!(
                "draw dimension {} does not match the {} noise channels",
                draw.n(),
                self.problem.noise_dim()
            )));
        }
        Ok(())
    }
}

/// One realization of `X^m_{t_end}` from the given draw.
pub fn sample(plan: &SamplerPlan, draw: &GaussianDraw) -> Result<DVector<f64>> {
    plan.check_draw(draw)?;
    let n = plan.problem.dim();
    let q = plan.problem.noise_dim();
    let m = plan.m;
    if m == 0 {
        return Ok(plan.exp_tl_x0.clone());
    }
    match &plan.cache {
        PlanCache::PhiSeries { stack } => {
            let z = DVectorView::from_slice(&draw.flat()[..m * q], m * q);
            Ok(&plan.exp_tl_x0 + stack * z * plan.amplitude)
        }
        PlanCache::DiagonalizedReal { v, vinv_b, phi, .. } => {
            let mut w = DVector::<f64>::zeros(n);
            for k in 0..m {
                let zk = DVectorView::from_slice(draw.term(k), q);
                let y = vinv_b * zk;
                let tab = &phi[k * n..(k + 1) * n];
                for i in 0..n {
                    w[i] += tab[i] * y[i];
                }
            }
            Ok(&plan.exp_tl_x0 + v * w * plan.amplitude)
        }
        PlanCache::DiagonalizedComplex { v, vinv_b, phi } => {
            let mut w = DVector::<Complex64>::zeros(n);
            for k in 0..m {
                let zk = draw.term(k);
                let zc = DVector::from_fn(q, |i, _| Complex64::new(zk[i], 0.0));
                let y = vinv_b * zc;
                let tab = &phi[k * n..(k + 1) * n];
                for i in 0..n {
                    w[i] += tab[i] * y[i];
                }
            }
            let rotated = v * w;
            Ok(&plan.exp_tl_x0 + rotated.map(|e| e.re) * plan.amplitude)
        }
        PlanCache::AugmentedExp => {
            // the expansion derivative is a pure cosine forcing, so the
            // scaled draws occupy the cosine coefficient block
            let mut a_cols = Vec::with_capacity(m);
            for k in 0..m {
                let zk = DVectorView::from_slice(draw.term(k), q);
                a_cols.push(&plan.problem.b * zk * plan.amplitude);
            }
            let b_cols = vec![DVector::zeros(n); m];
            augmented_endpoint(
                &plan.problem.l,
                &a_cols,
                &b_cols,
                &plan.freqs,
                &plan.problem.x0,
                plan.problem.t_end,
            )
        }
        PlanCache::Sylvester { .. } => solve_sylvester_route(plan, draw),
    }
}

/// Simplified sampler for symmetric `L` with `B = cI`: rotated i.i.d. draws
/// stay i.i.d., so the basis rotation of each `Z_k` is skipped. The output is
/// distributionally (not pathwise) equivalent to [`sample`].
pub fn sample_normal_fastpath(plan: &SamplerPlan, draw: &GaussianDraw) -> Result<DVector<f64>> {
    plan.check_draw(draw)?;
    let (v, phi, c) = match &plan.cache {
        PlanCache::DiagonalizedReal {
            v,
            phi,
            iso: Some(c),
            ..
        } => (v, phi, *c),
        PlanCache::DiagonalizedReal { iso: None, .. } => {
            return Err(Error::StrategyUnavailable(
                "normal fast path needs isotropic noise B = cI".into(),
            ))
        }
        _ => {
            return Err(Error::StrategyUnavailable(
                "normal fast path needs a diagonalized plan for symmetric L".into(),
            ))
        }
    };
    let n = plan.problem.dim();
    if plan.m == 0 {
        return Ok(plan.exp_tl_x0.clone());
    }
    let mut w = vec![0.0f64; n];
    let z = draw.flat();
    for k in 0..plan.m {
        let tab = &phi[k * n..(k + 1) * n];
        let zk = &z[k * n..(k + 1) * n];
        for i in 0..n {
            w[i] += tab[i] * zk[i];
        }
    }
    let w = DVector::from_vec(w);
    Ok(&plan.exp_tl_x0 + v * w * (plan.amplitude * c))
}

/// Per-draw Sylvester evaluation: assemble the noise block from the draw,
/// form the right-hand side from the cached exponentials, solve
/// `L X - X C = e^{tL} B_blk - B_blk e^{tC}` and read the endpoint off the
/// first block column sum.
pub fn solve_sylvester_route(plan: &SamplerPlan, draw: &GaussianDraw) -> Result<DVector<f64>> {
    plan.check_draw(draw)?;
    let PlanCache::Sylvester {
        solver,
        cos_t,
        sin_t,
    } = &plan.cache
    else {
        return Err(Error::StrategyUnavailable(
            "plan was not prepared with the Sylvester strategy".into(),
        ));
    };
    let n = plan.problem.dim();
    let q = plan.problem.noise_dim();
    let m = plan.m;
    if m == 0 {
        return Ok(plan.exp_tl_x0.clone());
    }
    // W = amp * B Z occupies the cosine coefficient block of the augmented
    // system (the expansion derivative is a pure cosine forcing)
    let zmat = DMatrix::from_fn(q, m, |i, k| draw.term(k)[i]);
    let w = &plan.problem.b * zmat * plan.amplitude;
    // rhs = e^{tL} [W | 0] - [W | 0] e^{tC}
    //     = [e^{tL} W - W cos(t L_k) | W sin(t L_k)]
    let expw = &plan.exp_tl * &w;
    let mut rhs = DMatrix::<f64>::zeros(n, 2 * m);
    for k in 0..m {
        for i in 0..n {
            rhs[(i, k)] = expw[(i, k)] - w[(i, k)] * cos_t[k];
            rhs[(i, m + k)] = w[(i, k)] * sin_t[k];
        }
    }
    let x = solver.solve(&rhs)?;
    // endpoint = e^{tL} x0 + X [1; 0]
    let mut out = plan.exp_tl_x0.clone();
    for k in 0..m {
        for i in 0..n {
            out[i] += x[(i, k)];
        }
    }
    Ok(out)
}

/// Fourier-forced linear ODE endpoint by variation of constants:
/// `u(t) = e^{tL} u0 + sum_k phi_cos_k(L) a_k + phi_sin_k(L) b_k`.
pub fn solve_fourier_ode(
    l: &DMatrix<f64>,
    forcing: &FourierForcing,
    u0: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    matkit::ensure_square("drift L", l)?;
    let n = l.nrows();
    if u0.len() != n {
        return Err(Error::Dimension(format!(
            "initial state must have length {n}"
        )));
    }
    let ev = PhiMatrixEvaluator::new(l, t)?;
    let mut out = ev.exp_ta() * u0;
    for k in 0..forcing.len() {
        if forcing.cos_coeff(k).len() != n {
            return Err(Error::Dimension(
                "forcing coefficients must match the state dimension".into(),
            ));
        }
        let (v, _) =
            ev.phi_apply(forcing.frequency(k), forcing.cos_coeff(k), forcing.sin_coeff(k))?;
        out += v;
    }
    Ok(out)
}

/// Same endpoint through one augmented matrix exponential
/// `[I 0] exp(t [[L, A, B], [0, 0, -C], [0, C, 0]]) [u0; 1; 0]`.
pub fn solve_augmented_exp(
    l: &DMatrix<f64>,
    forcing: &FourierForcing,
    u0: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    matkit::ensure_square("drift L", l)?;
    let n = l.nrows();
    if u0.len() != n {
        return Err(Error::Dimension(format!(
            "initial state must have length {n}"
        )));
    }
    let m = forcing.len();
    let mut a_cols = Vec::with_capacity(m);
    let mut b_cols = Vec::with_capacity(m);
    let mut freqs = Vec::with_capacity(m);
    for k in 0..m {
        if forcing.cos_coeff(k).len() != n || forcing.sin_coeff(k).len() != n {
            return Err(Error::Dimension(
                "forcing coefficients must match the state dimension".into(),
            ));
        }
        a_cols.push(forcing.cos_coeff(k).clone());
        b_cols.push(forcing.sin_coeff(k).clone());
        freqs.push(forcing.frequency(k));
    }
    augmented_endpoint(l, &a_cols, &b_cols, &freqs, u0, t)
}

fn augmented_endpoint(
    l: &DMatrix<f64>,
    a_cols: &[DVector<f64>],
    b_cols: &[DVector<f64>],
    freqs: &[f64],
    u0: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    let n = l.nrows();
    let m = freqs.len();
    let dim = n + 2 * m;
    let mut big = DMatrix::<f64>::zeros(dim, dim);
    big.view_mut((0, 0), (n, n)).copy_from(l);
    for k in 0..m {
        big.view_mut((0, n + k), (n, 1)).copy_from(&a_cols[k]);
        big.view_mut((0, n + m + k), (n, 1)).copy_from(&b_cols[k]);
        big[(n + k, n + m + k)] = -freqs[k];
        big[(n + m + k, n + k)] = freqs[k];
    }
    let e = expm(&big, t)?;
    let mut w0 = DVector::<f64>::zeros(dim);
    w0.rows_mut(0, n).copy_from(u0);
    for k in 0..m {
        w0[n + k] = 1.0;
    }
    let full = e * w0;
    Ok(full.rows(0, n).clone_owned())
}
