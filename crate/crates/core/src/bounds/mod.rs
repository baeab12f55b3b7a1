//! Security–latency bounds.
//!
//! Upper bounds are *achievable*: confirming a block after waiting `t`
//! seconds keeps it permanent except with at most the returned probability.
//! Lower bounds are *unachievable*: a concrete private attack succeeds with
//! at least the returned probability, so no latency-`t` rule can be safer.

mod delay;
mod depth;
mod growth;
mod lower;
mod renewal;
mod zero_delay;

pub use delay::{delay_upper, delay_upper_universal, eta, find_theta, g_denominator, DelayBound};
pub use depth::{depth_from_time, invert, invert_latency, kappa, UpperBound};
pub use growth::{growth_bound, liveness_bound};
pub use lower::{delay_lower, postmine_gain_pmf, DEFAULT_N_MAX};
pub use renewal::{double_lagger_mgf, lagger_mgf, renewal_race_bound, renewal_race_bound_min, Mgf, RaceSpec};
pub use zero_delay::{zero_delay_lower, zero_delay_upper, DEFAULT_K_MAX};

use serde::{Deserialize, Serialize};

use crate::error::ensure;
use crate::Result;

/// Mining rates and network delay bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Honest mining rate, blocks per second.
    pub alpha: f64,
    /// Adversarial mining rate, blocks per second.
    pub beta: f64,
    /// Upper bound on block propagation delay, seconds.
    pub delta: f64,
}

impl ProtocolParams {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        ensure!(alpha.is_finite() && alpha > 0.0, Domain, "alpha must be positive, got {alpha}");
        ensure!(beta.is_finite() && beta >= 0.0, Domain, "beta must be nonnegative, got {beta}");
        ensure!(delta.is_finite() && delta >= 0.0, Domain, "delta must be nonnegative, got {delta}");
        Ok(ProtocolParams { alpha, beta, delta })
    }

    /// Splits `total` blocks per second so that the adversary holds
    /// `adversary_fraction` of the mining power.
    pub fn from_total_rate(total: f64, adversary_fraction: f64, delta: f64) -> Result<Self> {
        ensure!(
            (0.0..1.0).contains(&adversary_fraction),
            Domain,
            "adversary fraction must lie in [0, 1), got {adversary_fraction}"
        );
        Self::new((1.0 - adversary_fraction) * total, adversary_fraction * total, delta)
    }

    pub fn total_rate(&self) -> f64 {
        self.alpha + self.beta
    }

    /// Rates per delay unit, `(αΔ, βΔ)`.
    pub fn normalized(&self) -> (f64, f64) {
        (self.alpha * self.delta, self.beta * self.delta)
    }
}

/// A bound value with the diagnostics of how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    /// `min(raw_value, 1)`.
    pub probability: f64,
    pub raw_value: f64,
    /// Minimizing rate `v` (per second), for optimized bounds.
    pub optimizer_v: Option<f64>,
    /// Smallest positive zero of the delay-bound denominator (per second).
    pub theta: Option<f64>,
    /// Upper estimate of the mass discarded by series truncation.
    pub truncation_tail: Option<f64>,
}

impl BoundResult {
    pub fn from_raw(raw_value: f64) -> Self {
        BoundResult {
            probability: raw_value.clamp(0.0, 1.0),
            raw_value,
            optimizer_v: None,
            theta: None,
            truncation_tail: None,
        }
    }
}

/// Selector for the five latency bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    ZeroDelayUpper,
    ZeroDelayLower,
    DelayUpper,
    DelayUpperUniversal,
    DelayLower,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [
        BoundKind::ZeroDelayUpper,
        BoundKind::ZeroDelayLower,
        BoundKind::DelayUpper,
        BoundKind::DelayUpperUniversal,
        BoundKind::DelayLower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::ZeroDelayUpper => "zero-delay-upper",
            BoundKind::ZeroDelayLower => "zero-delay-lower",
            BoundKind::DelayUpper => "delay-upper",
            BoundKind::DelayUpperUniversal => "delay-upper-universal",
            BoundKind::DelayLower => "delay-lower",
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(
            self,
            BoundKind::ZeroDelayUpper | BoundKind::DelayUpper | BoundKind::DelayUpperUniversal
        )
    }

    /// Evaluates the bound at `t` seconds with default truncations.
    pub fn evaluate(self, params: &ProtocolParams, t: f64) -> Result<BoundResult> {
        match self {
            BoundKind::ZeroDelayUpper => zero_delay_upper(params, t),
            BoundKind::ZeroDelayLower => zero_delay_lower(params, t, DEFAULT_K_MAX),
            BoundKind::DelayUpper => delay_upper(params, t),
            BoundKind::DelayUpperUniversal => delay_upper_universal(params, t),
            BoundKind::DelayLower => delay_lower(params, t, DEFAULT_N_MAX, DEFAULT_K_MAX),
        }
    }
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| crate::Error::Domain(format!("unknown bound kind {s:?}")))
    }
}

fn check_time(t: f64) -> Result<()> {
    ensure!(t.is_finite() && t >= 0.0, Domain, "time must be finite and nonnegative, got {t}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validate() {
        assert!(ProtocolParams::new(0.0, 0.1, 1.0).is_err());
        assert!(ProtocolParams::new(1.0, -0.1, 1.0).is_err());
        assert!(ProtocolParams::new(1.0, 0.1, -1.0).is_err());
        let p = ProtocolParams::from_total_rate(1.0 / 600.0, 0.25, 10.0).unwrap();
        assert!((p.alpha - 0.75 / 600.0).abs() < 1e-18);
        assert!((p.beta - 0.25 / 600.0).abs() < 1e-18);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in BoundKind::ALL {
            assert_eq!(k.name().parse::<BoundKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
    }

    #[test]
    fn clamping() {
        let r = BoundResult::from_raw(16.0 / 9.0);
        assert_eq!(r.probability, 1.0);
        assert_eq!(BoundResult::from_raw(0.25).probability, 0.25);
    }
}
