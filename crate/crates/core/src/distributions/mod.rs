//! Elementary distributions evaluated in the log domain.
//!
//! Every mass function is assembled as a log-probability from
//! [`ln_gamma`](statrs::function::gamma::ln_gamma) and exponentiated last, so
//! arguments such as `λ = 400` or `αt ≈ 10³` neither overflow nor lose the
//! tail. Cumulative functions walk the term recurrence outward from the
//! requested index and sum with Neumaier compensation.

mod series;

pub use series::{PowerSeries, DEFAULT_ORDER};

use statrs::function::gamma::ln_gamma;

use crate::error::ensure;
use crate::Result;

/// Relative size below which a tail term no longer changes a sum.
const TAIL_EPS: f64 = 1e-17;

/// Natural logarithm of a probability.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn from_ln(value: f64) -> Self {
        LogProb(value)
    }

    pub fn from_prob(p: f64) -> Self {
        LogProb(p.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// The probability, clamped to `[0, 1]`.
    pub fn prob(self) -> f64 {
        self.0.min(0.0).exp()
    }

    /// Product of two probabilities.
    pub fn and(self, other: LogProb) -> LogProb {
        LogProb(self.0 + other.0)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

fn check_rate(name: &str, lambda: f64) -> Result<()> {
    ensure!(
        lambda.is_finite() && lambda >= 0.0,
        Domain,
        "{name} must be a finite nonnegative number, got {lambda}"
    );
    Ok(())
}

/// `ln P(X = k)` for `X ~ Poisson(lambda)`.
pub fn poisson_ln_pmf(k: u64, lambda: f64) -> Result<LogProb> {
    check_rate("lambda", lambda)?;
    Ok(ln_poisson(k, lambda))
}

fn ln_poisson(k: u64, lambda: f64) -> LogProb {
    if lambda == 0.0 {
        return if k == 0 { LogProb::ONE } else { LogProb::ZERO };
    }
    let k = k as f64;
    LogProb(k * lambda.ln() - lambda - ln_gamma(k + 1.0))
}

/// `P(X = k)` for `X ~ Poisson(lambda)`.
pub fn poisson_pmf(k: u64, lambda: f64) -> Result<f64> {
    Ok(poisson_ln_pmf(k, lambda)?.prob())
}

/// `P(X ≤ k)` for `X ~ Poisson(lambda)`; zero for negative `k`.
pub fn poisson_cdf(k: i64, lambda: f64) -> Result<f64> {
    check_rate("lambda", lambda)?;
    if k < 0 {
        return Ok(0.0);
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if (k as f64) <= lambda {
        Ok(lower_tail(k as u64, lambda))
    } else {
        Ok((1.0 - upper_tail(k as u64 + 1, lambda)).clamp(0.0, 1.0))
    }
}

/// `P(X ≥ k)` for `X ~ Poisson(lambda)`; one for `k ≤ 0`.
pub fn poisson_ccdf(k: i64, lambda: f64) -> Result<f64> {
    check_rate("lambda", lambda)?;
    if k <= 0 {
        return Ok(1.0);
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if (k as f64) > lambda {
        Ok(upper_tail(k as u64, lambda))
    } else {
        Ok((1.0 - lower_tail(k as u64 - 1, lambda)).clamp(0.0, 1.0))
    }
}

// Σ_{i ≤ k} pmf(i), for k ≤ λ so that terms shrink walking down.
fn lower_tail(k: u64, lambda: f64) -> f64 {
    let head = ln_poisson(k, lambda).ln();
    let mut sum = CompensatedSum::new();
    let mut term = 1.0;
    let mut i = k;
    loop {
        sum.add(term);
        if i == 0 {
            break;
        }
        term *= i as f64 / lambda;
        i -= 1;
        if term < TAIL_EPS * sum.value() {
            break;
        }
    }
    (head + sum.value().ln()).exp().min(1.0)
}

// Σ_{i ≥ k} pmf(i), for k > λ so that terms shrink walking up.
fn upper_tail(k: u64, lambda: f64) -> f64 {
    let head = ln_poisson(k, lambda).ln();
    let mut sum = CompensatedSum::new();
    let mut term = 1.0;
    let mut i = k;
    loop {
        sum.add(term);
        i += 1;
        term *= lambda / i as f64;
        if term < TAIL_EPS * sum.value() {
            break;
        }
    }
    (head + sum.value().ln()).exp().min(1.0)
}

fn check_erlang(n: u64, rate: f64) -> Result<()> {
    ensure!(n >= 1, Domain, "Erlang shape must be at least 1, got {n}");
    ensure!(
        rate.is_finite() && rate > 0.0,
        Domain,
        "Erlang rate must be positive, got {rate}"
    );
    Ok(())
}

/// `P(S ≤ x)` where `S` is a sum of `n` i.i.d. exponentials with `rate`.
pub fn erlang_cdf(x: f64, n: u64, rate: f64) -> Result<f64> {
    check_erlang(n, rate)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    poisson_ccdf(n as i64, rate * x)
}

/// `P(S > x)`, the complement of [`erlang_cdf`].
pub fn erlang_ccdf(x: f64, n: u64, rate: f64) -> Result<f64> {
    check_erlang(n, rate)?;
    if x <= 0.0 {
        return Ok(1.0);
    }
    poisson_cdf(n as i64 - 1, rate * x)
}

/// `ln P(P₁ − P₂ = k)` for independent `P₁ ~ Poisson(mu1)` and
/// `P₂ ~ Poisson(mu2)`.
///
/// Evaluated as the convolution `Σ_j pmf(j + k; μ₁) pmf(j; μ₂)`, summed
/// outward from its largest term until the geometric tail bound drops below
/// `1e-16` of the running total.
pub fn skellam_ln_pmf(k: i64, mu1: f64, mu2: f64) -> Result<LogProb> {
    check_rate("mu1", mu1)?;
    check_rate("mu2", mu2)?;
    if mu2 == 0.0 {
        return Ok(if k >= 0 { ln_poisson(k as u64, mu1) } else { LogProb::ZERO });
    }
    if mu1 == 0.0 {
        return Ok(if k <= 0 { ln_poisson((-k) as u64, mu2) } else { LogProb::ZERO });
    }
    let j_min = (-k).max(0) as u64;
    let product = mu1 * mu2;
    // Largest term where (j + k + 1)(j + 1) crosses μ₁μ₂.
    let kf = k as f64;
    let disc = (kf * kf + 4.0 * product).sqrt();
    let j_peak = ((-(kf + 2.0) + disc) / 2.0).ceil().max(0.0) as u64;
    let j0 = j_peak.max(j_min);
    let ln_term = |j: u64| ln_poisson((j as i64 + k) as u64, mu1).ln() + ln_poisson(j, mu2).ln();
    let head = ln_term(j0);

    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    // Upward: ratio μ₁μ₂ / ((j + k + 1)(j + 1)) decreases in j.
    let mut term = 1.0;
    let mut j = j0;
    loop {
        let ratio = product / ((j as f64 + kf + 1.0) * (j as f64 + 1.0));
        term *= ratio;
        j += 1;
        sum.add(term);
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-16 * sum.value() {
            break;
        }
    }
    // Downward: ratio (j + k) j / (μ₁μ₂) decreases as j falls.
    let mut term = 1.0;
    let mut j = j0;
    while j > j_min {
        let ratio = (j as f64 + kf) * j as f64 / product;
        term *= ratio;
        j -= 1;
        sum.add(term);
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-16 * sum.value() {
            break;
        }
    }
    Ok(LogProb(head + sum.value().ln()))
}

/// `P(P₁ − P₂ = k)`; see [`skellam_ln_pmf`].
pub fn skellam_pmf(k: i64, mu1: f64, mu2: f64) -> Result<f64> {
    Ok(skellam_ln_pmf(k, mu1, mu2)?.prob())
}

fn check_ratio(q: f64) -> Result<()> {
    ensure!(
        q > 0.0 && q < 1.0,
        Domain,
        "geometric ratio must lie in (0, 1), got {q}"
    );
    Ok(())
}

/// `P(L = k) = (1 − q) q^k` on `{0, 1, …}`.
pub fn geometric_pmf(k: u64, q: f64) -> Result<f64> {
    if q == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    check_ratio(q)?;
    Ok((1.0 - q) * q.powf(k as f64))
}

/// `P(L₁ + L₂ ≥ n)` for i.i.d. geometric `L₁, L₂` with ratio `q`, which is
/// `qⁿ (1 + n(1 − q))`.
pub fn geometric_sum_ccdf(n: u64, q: f64) -> Result<f64> {
    check_ratio(q)?;
    let n = n as f64;
    Ok(q.powf(n) * (1.0 + n * (1.0 - q)))
}
