//! Goodness-of-fit statistics used by the experiments.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `Q_KS(λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2j²λ²}`, the limiting tail of the
/// Kolmogorov distribution.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series converges fast for small λ
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let s: f64 = (0..6).map(|j| y.powi((2 * j + 1) * (2 * j + 1))).sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value for a KS distance `d` at effective sample size `n`.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let sn = n.sqrt();
    kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub distance: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS distance of `samples` from the uniform law on `[0, 1]`.
pub fn ks_uniform(samples: &[f64]) -> KsResult {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let u = u.clamp(0.0, 1.0);
            (u - i as f64 / n).max((i + 1) as f64 / n - u)
        })
        .fold(0.0, f64::max);
    KsResult {
        distance: d,
        p_value: ks_p_value(d, n),
        n: v.len(),
    }
}

/// Two-sample KS distance; ties are handled by stepping over equal values
/// in both samples at once.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let t = a[i].min(b[j]);
        while i < na && a[i] <= t {
            i += 1;
        }
        while j < nb && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    KsResult {
        distance: d,
        p_value: ks_p_value(d, ne),
        n: na.min(nb),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of `counts` against equal expected counts.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquareResult {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = counts.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(f64::NAN);
    ChiSquareResult {
        statistic,
        dof,
        p_value,
    }
}

/// Bin values of `[0, 1]` into `bins` equal cells.
pub fn histogram_unit(samples: &[f64], bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    for &u in samples {
        let b = ((u * bins as f64) as usize).min(bins - 1);
        h[b] += 1;
    }
    h
}

/// Mean and standard error of the mean.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Binomial proportion and its standard error.
pub fn proportion(hits: u64, n: u64) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}
