//! Density, Q-Q, and Kolmogorov-Smirnov summaries for replicated statistics.

use crate::{Error, Result};
use statrs::distribution::{ContinuousCDF, Normal};

/// Evaluation grid for the kernel density estimate.
#[derive(Debug, Clone, Copy)]
pub struct KdeGrid {
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
}

/// Gaussian kernel density estimate with the Silverman bandwidth
/// `1.06 * sd * N^{-1/5}`, evaluated on a uniform grid. Returns
/// `(x, density)` pairs.
pub fn kde(samples: &[f64], grid: KdeGrid) -> Result<Vec<(f64, f64)>> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput(
            "kernel density estimate needs at least 2 samples".into(),
        ));
    }
    if grid.n_points < 2 || !(grid.lo < grid.hi) {
        return Err(Error::InvalidInput("bad KDE grid".into()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Err(Error::Domain(
            "degenerate sample (zero variance) has no density estimate".into(),
        ));
    }
    let bandwidth = 1.06 * var.sqrt() * n.powf(-0.2);
    let norm = 1.0 / (n * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let step = (grid.hi - grid.lo) / (grid.n_points - 1) as f64;
    let out = (0..grid.n_points)
        .map(|i| {
            let x = grid.lo + step * i as f64;
            let mut dens = 0.0;
            for &s in samples {
                let z = (x - s) / bandwidth;
                dens += (-0.5 * z * z).exp();
            }
            (x, dens * norm)
        })
        .collect();
    Ok(out)
}

/// Grid that covers the sample range padded by three bandwidths, so the
/// trapezoid mass on it is 1 up to truncation error.
pub fn default_kde_grid(samples: &[f64], n_points: usize) -> Result<KdeGrid> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let bw = 1.06 * var.sqrt() * n.powf(-0.2);
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(KdeGrid {
        lo: lo - 3.0 * bw,
        hi: hi + 3.0 * bw,
        n_points,
    })
}

/// Trapezoid integral of `(x, y)` pairs on a sorted grid.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for w in points.windows(2) {
        total += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
    }
    total
}

/// Q-Q points of the samples against `N(0, sigma^2)`:
/// `(sigma * Phi^{-1}((i - 0.5) / N), x_(i))` for `i = 1..N`.
pub fn qq_points(samples: &[f64], target_sigma: f64) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    if !(target_sigma > 0.0) {
        return Err(Error::Domain(format!(
            "target sigma must be positive, got {target_sigma}"
        )));
    }
    let std_normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let t = (i as f64 + 0.5) / n;
            (target_sigma * std_normal.inverse_cdf(t), x)
        })
        .collect())
}

/// One-sample Kolmogorov-Smirnov distance to `N(0, sigma^2)`:
/// `sup_i max(|i/N - Phi(x_i / sigma)|, |(i-1)/N - Phi(x_i / sigma)|)`.
pub fn ks_distance(samples: &[f64], sigma: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let std_normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let n = sorted.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = std_normal.cdf(x / sigma);
        ks = ks
            .max(((i as f64 + 1.0) / n - cdf).abs())
            .max((i as f64 / n - cdf).abs());
    }
    Ok(ks)
}

/// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("non-finite sample"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("non-finite sample"));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut ks: f64 = 0.0;
    // Walk the merged distinct values; ties within and across samples must
    // advance together so both EDFs are compared at the same point.
    while i < sa.len() || j < sb.len() {
        let x = match (sa.get(i), sb.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => break,
        };
        while i < sa.len() && sa[i] == x {
            i += 1;
        }
        while j < sb.len() && sb[j] == x {
            j += 1;
        }
        ks = ks.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(ks)
}
