use super::{check_time, BoundResult, ProtocolParams};
use crate::distributions::{skellam_ln_pmf, CompensatedSum};
use crate::error::ensure;
use crate::Result;

/// Default number of terms kept in the sum over the adversary's lead.
pub const DEFAULT_K_MAX: usize = 512;

fn check_honest_majority(p: &ProtocolParams) -> Result<()> {
    ensure!(
        p.beta < p.alpha,
        Infeasible,
        "honest majority requires beta < alpha (beta = {}, alpha = {})",
        p.beta,
        p.alpha
    );
    Ok(())
}

/// Achievable level with instantaneous propagation:
/// `(1 + √(β/α))² exp(−(√α − √β)² t)`. The delay bound is ignored.
pub fn zero_delay_upper(params: &ProtocolParams, t: f64) -> Result<BoundResult> {
    check_honest_majority(params)?;
    check_time(t)?;
    let (a, b) = (params.alpha, params.beta);
    let gap = a.sqrt() - b.sqrt();
    let ln = 2.0 * (1.0 + (b / a).sqrt()).ln() - gap * gap * t;
    Ok(BoundResult::from_raw(ln.exp()))
}

/// Unachievable level with instantaneous propagation: the success
/// probability of a private attack with a steady-state head start,
/// `Σ_k skellam(k − 1; αt, βt) rᵏ (1 + k(1 − r))`, `r = β/α`.
///
/// Dropping terms beyond `k_max` only lowers the sum, so the result stays a
/// valid unachievable level; `truncation_tail` bounds what was dropped.
pub fn zero_delay_lower(params: &ProtocolParams, t: f64, k_max: usize) -> Result<BoundResult> {
    check_honest_majority(params)?;
    check_time(t)?;
    let (a, b) = (params.alpha, params.beta);
    let r = b / a;
    if r == 0.0 {
        let mut res = BoundResult::from_raw(0.0);
        res.truncation_tail = Some(0.0);
        return Ok(res);
    }
    let ln_r = r.ln();
    let mut sum = CompensatedSum::new();
    for k in 0..=k_max {
        let kf = k as f64;
        let ln_term = skellam_ln_pmf(k as i64 - 1, a * t, b * t)?.ln() + kf * ln_r;
        sum.add(ln_term.exp() * (1.0 + kf * (1.0 - r)));
    }
    // The pmf is at most one, leaving Σ_{k>K} rᵏ(1 + k(1 − r)).
    let k1 = (k_max + 1) as f64;
    let rk1 = r.powf(k1);
    let tail = rk1 / (1.0 - r) + rk1 * (k1 - (k1 - 1.0) * r) / (1.0 - r);
    let mut res = BoundResult::from_raw(sum.value());
    res.truncation_tail = Some(tail);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> ProtocolParams {
        ProtocolParams::new(0.0015, 1.0 / 6000.0, 10.0).unwrap()
    }

    #[test]
    fn upper_values() {
        let p = params();
        let r0 = zero_delay_upper(&p, 0.0).unwrap();
        assert_relative_eq!(r0.raw_value, 16.0 / 9.0, max_relative = 1e-14);
        assert_eq!(r0.probability, 1.0);
        // 50-digit reference evaluations.
        let r4 = zero_delay_upper(&p, 14400.0).unwrap();
        assert_relative_eq!(r4.raw_value, 1.204_066_426_504_069e-4, max_relative = 1e-11);
        let r2 = zero_delay_upper(&p, 7200.0).unwrap();
        assert_relative_eq!(r2.raw_value, 0.014_630_661_420_480_05, max_relative = 1e-11);
        assert!(r2.raw_value > r4.raw_value);
    }

    #[test]
    fn dishonest_majority_is_infeasible() {
        let p = ProtocolParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(zero_delay_upper(&p, 1.0), Err(crate::Error::Infeasible(_))));
        assert!(matches!(zero_delay_lower(&p, 1.0, 10), Err(crate::Error::Infeasible(_))));
    }

    #[test]
    fn lower_vanishes_without_adversary() {
        for &beta in &[1e-6, 1e-9, 1e-12] {
            let p = ProtocolParams::new(1.0, beta, 0.0).unwrap();
            let v = zero_delay_lower(&p, 3.0, 64).unwrap().raw_value;
            assert!(v < 10.0 * beta, "beta {beta}: {v}");
        }
        let p = ProtocolParams::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(zero_delay_lower(&p, 3.0, 64).unwrap().raw_value, 0.0);
    }

    #[test]
    fn lower_below_upper_and_truncation_conservative() {
        let p = params();
        for &t in &[600.0, 3600.0, 14400.0, 36000.0] {
            let full = zero_delay_lower(&p, t, DEFAULT_K_MAX).unwrap();
            let short = zero_delay_lower(&p, t, 8).unwrap();
            assert!(short.raw_value <= full.raw_value);
            assert!(full.raw_value - short.raw_value <= short.truncation_tail.unwrap());
            assert!(full.raw_value <= zero_delay_upper(&p, t).unwrap().raw_value);
        }
    }
}
