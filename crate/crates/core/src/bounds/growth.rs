use super::{check_time, ProtocolParams};
use crate::distributions::{erlang_cdf, poisson_ccdf, poisson_pmf, CompensatedSum};
use crate::error::ensure;
use crate::Result;

/// Lower bound on the probability that every honest chain grows by at least
/// `n` blocks over `t` seconds: jumpers are spaced by `Δ` plus an
/// exponential gap, giving `P(Erlang(n, α) ≤ t − (n + 1)Δ)`.
pub fn growth_bound(params: &ProtocolParams, n: u64, t: f64) -> Result<f64> {
    ensure!(n >= 1, Domain, "block count must be at least 1");
    check_time(t)?;
    erlang_cdf(t - (n + 1) as f64 * params.delta, n, params.alpha)
}

/// Lower bound on the probability that at least `n` honest blocks enter
/// every honest chain within `t` seconds, whatever the adversary mines: the
/// chain must outgrow the `i` adversarial blocks mined meanwhile by `n`.
pub fn liveness_bound(params: &ProtocolParams, n: u64, t: f64) -> Result<f64> {
    ensure!(n >= 1, Domain, "block count must be at least 1");
    check_time(t)?;
    let (alpha, beta, delta) = (params.alpha, params.beta, params.delta);
    let mut sum = CompensatedSum::new();
    let mut i = 0u64;
    loop {
        let x = t - (i + n + 1) as f64 * delta;
        if x <= 0.0 {
            break;
        }
        sum.add(poisson_pmf(i, beta * t)? * erlang_cdf(x, i + n, alpha)?);
        i += 1;
        if poisson_ccdf(i as i64, beta * t)? < 1e-15 {
            break;
        }
    }
    Ok(sum.value().clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ProtocolParams {
        ProtocolParams::new(0.0015, 1.0 / 6000.0, 10.0).unwrap()
    }

    #[test]
    fn zero_before_first_jumper() {
        let p = params();
        assert_eq!(growth_bound(&p, 1, 10.0).unwrap(), 0.0);
        assert_eq!(growth_bound(&p, 3, 40.0).unwrap(), 0.0);
        assert!(growth_bound(&p, 0, 100.0).is_err());
        let no_adv = ProtocolParams::new(0.0015, 0.0, 10.0).unwrap();
        assert_eq!(liveness_bound(&no_adv, 2, 30.0).unwrap(), 0.0);
    }

    #[test]
    fn liveness_without_adversary_is_growth() {
        let p = ProtocolParams::new(0.0015, 0.0, 10.0).unwrap();
        for &t in &[500.0, 4000.0, 20000.0] {
            let g = growth_bound(&p, 4, t).unwrap();
            assert!((liveness_bound(&p, 4, t).unwrap() - g).abs() < 1e-15);
        }
    }

    #[test]
    fn monotone() {
        let p = params();
        let mut prev = 0.0;
        for k in 1..200 {
            let t = 100.0 * k as f64;
            let g = growth_bound(&p, 6, t).unwrap();
            assert!(g >= prev);
            assert!(growth_bound(&p, 7, t).unwrap() <= g);
            assert!(liveness_bound(&p, 6, t).unwrap() <= g + 1e-15);
            prev = g;
        }
    }
}
