use serde::{Deserialize, Serialize};

use crate::distributions::CompensatedSum;
use crate::error::ensure;
use crate::Result;

const MIN_MGF_SAMPLES: usize = 1000;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn proportion(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Estimate { value: p, std_error: (p * (1.0 - p) / trials as f64).sqrt(), samples: trials }
    }

    /// Standard error of a proportion under the null that the true value is
    /// `target` or the estimate, whichever has the larger variance. Keeps
    /// zero-count estimates of small probabilities from looking exact.
    pub fn null_se(&self, target: f64) -> f64 {
        let var = |p: f64| p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0));
        (var(self.value).max(var(target)) / self.samples as f64).sqrt()
    }

    /// `|estimate − target| ≤ k` null standard errors.
    pub fn consistent_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.null_se(target)
    }

    pub fn at_least(&self, target: f64, k: f64) -> bool {
        self.value >= target - k * self.null_se(target)
    }

    pub fn at_most(&self, target: f64, k: f64) -> bool {
        self.value <= target + k * self.null_se(target)
    }
}

/// Sample mean of `e^{u x}` with a jackknife standard error.
///
/// `roc`, if given, is the edge of the region of convergence of the true
/// MGF; `u` must then stay below `0.9·roc`, where the estimator still has a
/// usable (if heavy) tail.
pub fn empirical_mgf(samples: &[f64], u: f64, roc: Option<f64>) -> Result<Estimate> {
    let n = samples.len();
    if n < MIN_MGF_SAMPLES {
        return Err(crate::Error::InsufficientData { needed: MIN_MGF_SAMPLES, got: n });
    }
    if let Some(roc) = roc {
        ensure!(u <= 0.9 * roc, Domain, "u = {u} too close to the convergence edge {roc}");
    }
    if u == 0.0 {
        return Ok(Estimate { value: 1.0, std_error: 0.0, samples: n as u64 });
    }
    let ys: Vec<f64> = samples.iter().map(|&x| (u * x).exp()).collect();
    let total = ys.iter().copied().collect::<CompensatedSum>().value();
    let nf = n as f64;
    let mean = total / nf;
    // Leave-one-out means (S − yᵢ)/(n − 1) average to the full mean.
    let ss = ys
        .iter()
        .map(|&y| {
            let d = (total - y) / (nf - 1.0) - mean;
            d * d
        })
        .collect::<CompensatedSum>()
        .value();
    Ok(Estimate { value: mean, std_error: ((nf - 1.0) / nf * ss).sqrt(), samples: n as u64 })
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Histogram of a nonnegative integer variable with per-bin errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfTable {
    /// `counts[k]` for `k < counts.len() − 1`; the last bin collects the rest.
    pub counts: Vec<u64>,
    pub trials: u64,
}

impl PmfTable {
    pub fn from_values(values: impl IntoIterator<Item = u64>, max_bin: usize) -> Self {
        let mut counts = vec![0u64; max_bin + 2];
        let mut trials = 0;
        for v in values {
            counts[(v as usize).min(max_bin + 1)] += 1;
            trials += 1;
        }
        PmfTable { counts, trials }
    }

    pub fn max_bin(&self) -> usize {
        self.counts.len() - 2
    }

    pub fn estimate(&self, k: usize) -> Estimate {
        Estimate::proportion(self.counts.get(k).copied().unwrap_or(0), self.trials)
    }
}
