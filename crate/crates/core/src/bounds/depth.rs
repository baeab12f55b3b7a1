use super::{zero_delay_upper, DelayBound, ProtocolParams};
use crate::distributions::poisson_ccdf;
use crate::error::ensure;
use crate::Result;

/// Longest wait considered when inverting a bound, in seconds (~35 years).
const MAX_LATENCY: u64 = 1 << 30;

fn check_level(eps: f64) -> Result<()> {
    ensure!(eps > 0.0 && eps < 1.0, Domain, "security level must lie in (0, 1), got {eps}");
    Ok(())
}

/// `κ(λ, ε) = min{k : P(Pois(λ) ≥ k) ≤ ε}`.
pub fn kappa(lambda: f64, eps: f64) -> Result<u64> {
    check_level(eps)?;
    ensure!(lambda.is_finite() && lambda >= 0.0, Domain, "lambda must be nonnegative, got {lambda}");
    let tail = |k: u64| poisson_ccdf(k as i64, lambda);
    let mut lo = 0u64;
    let mut hi = (lambda + 50.0 * lambda.sqrt() + 100.0).ceil() as u64;
    while tail(hi)? > eps {
        hi *= 2;
    }
    // Invariant: tail(lo) > eps ≥ tail(hi); tail(0) = 1.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid)? > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Blocks to wait for so that at least `tau` seconds have passed except
/// with probability `eps`: `κ((α + β)τ, ε)`.
pub fn depth_from_time(params: &ProtocolParams, tau: f64, eps: f64) -> Result<u64> {
    ensure!(tau > 0.0 && tau.is_finite(), Domain, "tau must be positive, got {tau}");
    kappa(params.total_rate() * tau, eps)
}

/// Upper bounds that can be inverted into a confirmation latency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperBound {
    ZeroDelay,
    Delay,
    DelayUniversal,
}

/// Smallest whole number of seconds `t ≥ 1` with `bound(t) ≤ eps`, for a
/// bound nonincreasing in `t`.
pub fn invert<F: FnMut(f64) -> Result<f64>>(mut bound: F, eps: f64) -> Result<u64> {
    check_level(eps)?;
    let mut lo = 0u64;
    let mut hi = 1u64;
    while bound(hi as f64)? > eps {
        lo = hi;
        hi *= 2;
        ensure!(
            hi <= MAX_LATENCY,
            Infeasible,
            "bound stays above {eps} for every latency up to {MAX_LATENCY} s"
        );
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid as f64)? > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Confirmation latency in seconds achieving security level `eps`.
pub fn invert_latency(kind: UpperBound, params: &ProtocolParams, eps: f64) -> Result<u64> {
    check_level(eps)?;
    match kind {
        UpperBound::ZeroDelay => invert(|t| Ok(zero_delay_upper(params, t)?.probability), eps),
        UpperBound::Delay => {
            let b = DelayBound::feasible(params)?;
            invert(|t| Ok(b.upper(t)?.probability), eps)
        }
        UpperBound::DelayUniversal => {
            let b = DelayBound::feasible(params)?;
            invert(|t| Ok(b.upper_universal(t)?.probability), eps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        assert_eq!(kappa(4.35 * 6.0, 0.0005).unwrap(), 45);
    }

    #[test]
    fn kappa_edges() {
        assert_eq!(kappa(1e-12, 0.5).unwrap(), 1);
        assert_eq!(kappa(0.0, 0.5).unwrap(), 1);
        assert!(kappa(1.0, 0.0).is_err());
        assert!(kappa(1.0, 1.0).is_err());
    }

    #[test]
    fn kappa_is_minimal() {
        for &lam in &[0.5, 3.0, 26.1, 90.0] {
            for &eps in &[1e-1, 1e-3, 1e-6, 1e-9] {
                let k = kappa(lam, eps).unwrap();
                assert!(poisson_ccdf(k as i64, lam).unwrap() <= eps);
                assert!(poisson_ccdf(k as i64 - 1, lam).unwrap() > eps);
            }
        }
    }

    #[test]
    fn bitcoin_latencies() {
        let p = ProtocolParams::from_total_rate(1.0 / 600.0, 0.1, 10.0).unwrap();
        let t3 = invert_latency(UpperBound::Delay, &p, 1e-3).unwrap();
        let t9 = invert_latency(UpperBound::Delay, &p, 1e-9).unwrap();
        assert!((12_600..=16_200).contains(&t3), "{t3}");
        assert!((34_200..=37_800).contains(&t9), "{t9}");
        assert!(t9 > t3);
        assert!(invert_latency(UpperBound::DelayUniversal, &p, 1e-3).unwrap() >= t3);
    }

    #[test]
    fn inversion_is_exact_to_the_second() {
        let p = ProtocolParams::new(0.0015, 1.0 / 6000.0, 0.0).unwrap();
        let t = invert_latency(UpperBound::ZeroDelay, &p, 1e-6).unwrap();
        assert!(zero_delay_upper(&p, t as f64).unwrap().probability <= 1e-6);
        assert!(zero_delay_upper(&p, (t - 1) as f64).unwrap().probability > 1e-6);
    }

    proptest! {
        #[test]
        fn kappa_monotone(lam in 0.0f64..100.0, dl in 0.0f64..10.0, e in 1usize..10) {
            let eps = 10f64.powi(-(e as i32));
            let k = kappa(lam, eps).unwrap();
            prop_assert!(kappa(lam + dl, eps).unwrap() >= k);
            prop_assert!(kappa(lam, eps / 10.0).unwrap() >= k);
        }
    }
}
