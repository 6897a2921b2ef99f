//! Matrix exponential via scaling and squaring with a degree-13 Pade
//! approximant and 1-norm based scaling selection.

use nalgebra::DMatrix;

use super::{ensure_finite, ensure_square, one_norm};
use crate::{Error, Result};

/// 1-norm threshold below which the degree-13 Pade approximant is accurate to
/// machine precision without scaling (Higham, "The scaling and squaring method
/// for the matrix exponential revisited", Table 10.2).
const THETA_13: f64 = 5.371920351148152;

/// Numerator coefficients of the [13/13] diagonal Pade approximant to exp;
/// the denominator uses the same coefficients with alternating signs.
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Compute `exp(t A)` for a square real matrix.
pub fn expm(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    ensure_square("expm input", a)?;
    ensure_finite("expm input", a)?;
    if !t.is_finite() {
        return Err(Error::NonFinite(format!("expm time {t}")));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if n == 1 {
        return Ok(DMatrix::from_element(1, 1, (t * a[(0, 0)]).exp()));
    }

    let b = a * t;
    let norm = one_norm(&b);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = &b / 2f64.powi(s as i32);

    let mut f = pade_13(&scaled)?;
    for _ in 0..s {
        f = &f * &f;
    }
    Ok(f)
}

/// Degree-13 Pade approximant of exp evaluated with the Paterson-Stockmeyer
/// style splitting of Higham: one LU solve on `(-U + V) F = U + V`.
fn pade_13(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let b = &PADE_13;
    let w1 = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let w2 = &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &eye * b[1];
    let u = a * (&a6 * &w1 + w2);

    let z1 = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * &z1 + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &eye * b[0];

    let lhs = &v - &u;
    let rhs = &v + &u;
    lhs.lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Pade denominator in expm".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{dense_from_rows, log_norm, spectral_norm};
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Truncated Taylor-series oracle, adequate for small-norm inputs only.
    fn expm_taylor(a: &DMatrix<f64>, t: f64, terms: usize) -> DMatrix<f64> {
        let n = a.nrows();
        let b = a * t;
        let mut sum = DMatrix::<f64>::identity(n, n);
        let mut term = DMatrix::<f64>::identity(n, n);
        for k in 1..=terms {
            term = &term * &b / k as f64;
            sum += &term;
        }
        sum
    }

    fn random_matrix(n: usize, seed: u64, scale: f64) -> DMatrix<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        DMatrix::from_fn(n, n, |_, _| rng.gen_range(-scale..scale))
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let a = DMatrix::zeros(3, 3);
        let e = expm(&a, 1.0).unwrap();
        assert_eq!(e, DMatrix::identity(3, 3));
    }

    #[test]
    fn exp_of_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0]));
        let e = expm(&a, 1.0).unwrap();
        assert_relative_eq!(e[(0, 0)], (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(e[(1, 1)], (-2.0f64).exp(), max_relative = 1e-14);
        assert!(e[(0, 1)].abs() < 1e-16 && e[(1, 0)].abs() < 1e-16);
    }

    #[test]
    fn matches_taylor_oracle_at_small_norm() {
        for seed in 0..5u64 {
            let mut a = random_matrix(4, seed, 1.0);
            let nrm = spectral_norm(&a);
            if nrm > 1.0 {
                a /= nrm; // keep ||A|| <= 1 so 30 Taylor terms are exact to eps
            }
            let e = expm(&a, 0.7).unwrap();
            let oracle = expm_taylor(&a, 0.7, 30);
            assert!((e - &oracle).norm() <= 1e-12 * oracle.norm());
        }
    }

    #[test]
    fn scaling_kicks_in_for_large_norm() {
        // 1-norm far above theta_13 exercises the squaring phase
        let a = dense_from_rows(2, 2, &[-30.0, 12.0, 5.0, -40.0]).unwrap();
        let e = expm(&a, 1.0).unwrap();
        // compare against the halved-time semigroup product
        let h = expm(&a, 0.5).unwrap();
        assert!((&h * &h - &e).norm() <= 1e-11 * e.norm().max(1e-300));
    }

    #[test]
    fn semigroup_property_on_random_stable_matrices() {
        let mut rng = StdRng::seed_from_u64(99);
        for seed in 0..8u64 {
            let mut a = random_matrix(5, seed, 1.0);
            // shift to make it stable-ish; property holds regardless
            for i in 0..5 {
                a[(i, i)] -= 2.0;
            }
            let s: f64 = rng.gen_range(0.0..1.0);
            let t: f64 = rng.gen_range(0.0..1.0);
            let est = expm(&a, s + t).unwrap();
            let prod = expm(&a, s).unwrap() * expm(&a, t).unwrap();
            assert!((&prod - &est).norm() <= 1e-10 * est.norm());
        }
    }

    #[test]
    fn norm_bounded_by_log_norm_exponential() {
        for seed in 10..18u64 {
            let a = random_matrix(5, seed, 2.0);
            let e = expm(&a, 1.0).unwrap();
            let mu = log_norm(&a).unwrap();
            assert!(spectral_norm(&e) <= mu.exp() + 1e-8);
        }
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        let a = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(expm(&a, 1.0), Err(Error::Dimension(_))));
        let mut b = DMatrix::<f64>::zeros(2, 2);
        b[(0, 0)] = f64::NAN;
        assert!(matches!(expm(&b, 1.0), Err(Error::NonFinite(_))));
        let c = DMatrix::<f64>::zeros(2, 2);
        assert!(matches!(expm(&c, f64::INFINITY), Err(Error::NonFinite(_))));
    }
}
