//! Deterministic parallel Monte Carlo reduction.
//!
//! Samples are evaluated on a rayon pool in fixed-size index chunks; the
//! per-chunk partial sums are reduced sequentially in chunk order, so the
//! result is bit-identical regardless of thread count.

use rayon::prelude::*;

/// Mean and standard error of `f(sample_index)` over indices `0..n`.
pub fn mean_and_se<F>(n: u64, f: F) -> (f64, f64)
where
    F: Fn(u64) -> f64 + Sync,
{
    assert!(n > 0, "need at least one sample");
    let chunk = chunk_size(n);
    let starts: Vec<u64> = (0..n).step_by(chunk as usize).collect();
    let partials: Vec<(f64, f64)> = starts
        .par_iter()
        .map(|&s| {
            let end = (s + chunk).min(n);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for i in s..end {
                let v = f(i);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq)
        })
        .collect();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for (a, b) in partials {
        sum += a;
        sumsq += b;
    }
    let nf = n as f64;
    let mean = sum / nf;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = ((sumsq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Component-wise mean and standard error for vector-valued samples.
pub fn vector_mean_and_se<F>(n: u64, dim: usize, f: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(u64) -> nalgebra::DVector<f64> + Sync,
{
    assert!(n > 0, "need at least one sample");
    let chunk = chunk_size(n);
    let starts: Vec<u64> = (0..n).step_by(chunk as usize).collect();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = starts
        .par_iter()
        .map(|&s| {
            let end = (s + chunk).min(n);
            let mut sum = vec![0.0; dim];
            let mut sumsq = vec![0.0; dim];
            for i in s..end {
                let v = f(i);
                for j in 0..dim {
                    sum[j] += v[j];
                    sumsq[j] += v[j] * v[j];
                }
            }
            (sum, sumsq)
        })
        .collect();
    let mut sum = vec![0.0; dim];
    let mut sumsq = vec![0.0; dim];
    for (a, b) in partials {
        for j in 0..dim {
            sum[j] += a[j];
            sumsq[j] += b[j];
        }
    }
    let nf = n as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / nf).collect();
    let se: Vec<f64> = mean
        .iter()
        .zip(sumsq.iter())
        .map(|(&m, &sq)| {
            if n == 1 {
                f64::NAN
            } else {
                (((sq / nf - m * m) * nf / (nf - 1.0)).max(0.0) / nf).sqrt()
            }
        })
        .collect();
    (mean, se)
}

fn chunk_size(n: u64) -> u64 {
    // enough chunks to keep all cores busy without drowning in scheduling
    let threads = rayon::current_num_threads() as u64;
    (n / (8 * threads).max(1)).clamp(1, 65_536)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_of_indices() {
        let (mean, se) = mean_and_se(1000, |i| i as f64);
        assert!((mean - 499.5).abs() < 1e-9);
        assert!(se > 0.0);
    }

    #[test]
    fn deterministic_across_runs() {
        let f = |i: u64| (i as f64 * 0.1).sin();
        let a = mean_and_se(100_000, f);
        let b = mean_and_se(100_000, f);
        assert_eq!(a, b);
    }

    #[test]
    fn single_sample_has_nan_se() {
        let (mean, se) = mean_and_se(1, |_| 2.5);
        assert_eq!(mean, 2.5);
        assert!(se.is_nan());
    }
}
