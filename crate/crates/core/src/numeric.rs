//! Deterministic accumulation primitives.
//!
//! Every mean/variance in this crate is reduced through the helpers below so
//! that results are bit-identical across runs and across rayon thread counts:
//! inputs are cut into fixed-size chunks, each chunk is summed with Neumaier
//! compensation, and the per-chunk partials are combined in chunk order.

use rayon::prelude::*;

/// Chunk length used by all deterministic parallel reductions. Constant on
/// purpose: the reduction tree must not depend on the worker count.
pub const CHUNK: usize = 4096;

/// Neumaier (improved Kahan) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of `f(i)` for `i` in `0..n`, parallel over fixed chunks,
/// partials combined in chunk order.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks: Vec<f64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut acc = CompensatedSum::new();
            for i in lo..hi {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    let mut total = CompensatedSum::new();
    for p in chunks {
        total.add(p);
    }
    total.value()
}

/// Compensated sum over a slice.
pub fn sum_slice(xs: &[f64]) -> f64 {
    sum_indexed(xs.len(), |i| xs[i])
}

/// Mean and population standard deviation of `f(i)` over `0..n`, two-pass,
/// deterministic. Returns `(mean, sigma)`; `sigma` is clamped at 0.
pub fn mean_dispersion_indexed<F>(n: usize, f: F) -> (f64, f64)
where
    F: Fn(usize) -> f64 + Sync,
{
    assert!(n > 0, "mean of an empty set");
    let mean = sum_indexed(n, &f) / n as f64;
    let ss = sum_indexed(n, |i| {
        let d = f(i) - mean;
        d * d
    });
    (mean, (ss / n as f64).max(0.0).sqrt())
}

pub fn mean_dispersion(xs: &[f64]) -> (f64, f64) {
    mean_dispersion_indexed(xs.len(), |i| xs[i])
}

/// Standard error of the mean by batch means: the sequence is split into
/// `batches` contiguous blocks and the SE is the standard deviation of the
/// block means over sqrt(batches). Robust to the strong autocorrelation of
/// overlapping-window statistics, where the naive iid SE is far too small.
pub fn batch_mean_se(xs: &[f64], batches: usize) -> (f64, f64) {
    assert!(!xs.is_empty());
    let b = batches.clamp(2, xs.len());
    let n = xs.len();
    let means: Vec<f64> = (0..b)
        .map(|k| {
            let lo = k * n / b;
            let hi = ((k + 1) * n / b).max(lo + 1);
            sum_slice(&xs[lo..hi]) / (hi - lo) as f64
        })
        .collect();
    let grand = sum_slice(xs) / n as f64;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (b - 1) as f64;
    (grand, (var / b as f64).sqrt())
}

/// Compensated per-component sum of `dim`-vectors contributed by indices
/// `0..n`. `fill(i, scratch)` writes index `i`'s vector into `scratch`.
/// Deterministic under any thread count (fixed chunks, ordered combine).
pub fn sum_vec_indexed<F>(n: usize, dim: usize, fill: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let chunks: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut acc = vec![CompensatedSum::new(); dim];
            let mut scratch = vec![0.0; dim];
            for i in lo..hi {
                fill(i, &mut scratch);
                for (a, &v) in acc.iter_mut().zip(scratch.iter()) {
                    a.add(v);
                }
            }
            acc.iter().map(|a| a.value()).collect()
        })
        .collect();
    let mut total = vec![CompensatedSum::new(); dim];
    for part in chunks {
        for (t, v) in total.iter_mut().zip(part) {
            t.add(v);
        }
    }
    total.iter().map(|a| a.value()).collect()
}

/// Percentile bootstrap confidence interval for the mean. Returns
/// `(lo, hi)` at the given two-sided confidence level.
pub fn bootstrap_mean_ci<R: rand::Rng>(
    xs: &[f64],
    resamples: usize,
    confidence: f64,
    rng: &mut R,
) -> (f64, f64) {
    assert!(!xs.is_empty());
    let n = xs.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| {
            let mut acc = CompensatedSum::new();
            for _ in 0..n {
                acc.add(xs[rng.random_range(0..n)]);
            }
            acc.value() / n as f64
        })
        .collect();
    means.sort_by(|a, b| a.total_cmp(b));
    let alpha = (1.0 - confidence) / 2.0;
    let lo = ((alpha * resamples as f64) as usize).min(resamples - 1);
    let hi = (((1.0 - alpha) * resamples as f64) as usize).min(resamples - 1);
    (means[lo], means[hi])
}

/// Ordinary least squares fit y = a + b·x. Returns `(slope, intercept, slope_stderr)`.
pub fn ols_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    assert!(x.len() >= 3, "need at least 3 points");
    let mx = sum_slice(x) / n;
    let my = sum_slice(y) / n;
    let sxx = sum_indexed(x.len(), |i| (x[i] - mx) * (x[i] - mx));
    let sxy = sum_indexed(x.len(), |i| (x[i] - mx) * (y[i] - my));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr = sum_indexed(x.len(), |i| {
        let r = y[i] - intercept - slope * x[i];
        r * r
    });
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    (slope, intercept, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        // 1 + 1e-16 repeated: naive accumulation drops the tiny addend.
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1000.0 * 1e-16)).abs() < 1e-18);
    }

    #[test]
    fn sum_indexed_matches_exact() {
        let n = 100_000;
        let s = sum_indexed(n, |i| i as f64);
        assert_eq!(s, (n as f64 - 1.0) * n as f64 / 2.0);
    }

    #[test]
    fn dispersion_of_constant_is_zero() {
        let xs = vec![2.5; 1000];
        let (m, d) = mean_dispersion(&xs);
        assert_eq!(m, 2.5);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let (slope, intercept, stderr) = ols_fit(&x, &y);
        assert!((slope - 3.0).abs() < 1e-12);
        assert!((intercept + 1.0).abs() < 1e-10);
        assert!(stderr < 1e-12);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let n = 1_000_000;
        let f = |i: usize| ((i as f64) * 0.37).sin() / (i as f64 + 1.0);
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let s1 = pool1.install(|| sum_indexed(n, f));
        let s4 = pool4.install(|| sum_indexed(n, f));
        assert_eq!(s1.to_bits(), s4.to_bits());
    }
}
