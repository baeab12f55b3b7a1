//! A renewal process racing an independent Poisson process.
//!
//! Time here is in abstract units chosen by the caller (the double-lagger
//! stream uses the delay bound as its unit); every rate is per such unit.

use std::fmt;
use std::sync::Arc;

use super::delay::{g_raw, smallest_root};
use super::BoundResult;
use crate::error::ensure;
use crate::roots::grid_then_golden;
use crate::Result;

/// Moment generating function of a renewal time.
#[derive(Clone)]
pub struct Mgf {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    roc_sup: f64,
    mean: f64,
}

impl fmt::Debug for Mgf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mgf")
            .field("roc_sup", &self.roc_sup)
            .field("mean", &self.mean)
            .finish_non_exhaustive()
    }
}

impl Mgf {
    /// `eval` must be the MGF on `(-∞, roc_sup)` of a positive random
    /// variable with the given mean.
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static, roc_sup: f64, mean: f64) -> Self {
        Mgf { eval: Arc::new(eval), roc_sup, mean }
    }

    /// Exponential renewal times with `rate`: a Poisson process.
    pub fn exponential(rate: f64) -> Result<Self> {
        ensure!(rate > 0.0 && rate.is_finite(), Domain, "rate must be positive, got {rate}");
        Ok(Mgf::new(move |u| rate / (rate - u), rate, 1.0 / rate))
    }

    /// `shift` plus an exponential with `rate`, e.g. the gap between
    /// consecutive jumpers (`shift` = one delay bound).
    pub fn shifted_exponential(shift: f64, rate: f64) -> Result<Self> {
        ensure!(shift >= 0.0, Domain, "shift must be nonnegative, got {shift}");
        ensure!(rate > 0.0 && rate.is_finite(), Domain, "rate must be positive, got {rate}");
        Ok(Mgf::new(
            move |u| (u * shift).exp() * rate / (rate - u),
            rate,
            shift + 1.0 / rate,
        ))
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        ensure!(
            u < self.roc_sup,
            Domain,
            "MGF argument {u} outside the region of convergence (-inf, {})",
            self.roc_sup
        );
        Ok((self.eval)(u))
    }

    pub fn roc_sup(&self) -> f64 {
        self.roc_sup
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// MGF of the time between consecutive double-laggers, with the delay bound
/// as the time unit and `alpha_norm` honest blocks per unit:
/// `φ(u) = 1 + (αu − u²) / (u² − αu − αu e^{u−α} + α² e^{2(u−α)})`.
pub fn double_lagger_mgf(alpha_norm: f64) -> Result<Mgf> {
    let a = alpha_norm;
    ensure!(a > 0.0 && a.is_finite(), Domain, "alpha must be positive, got {a}");
    let roc = smallest_root(a, 1.0)?;
    Ok(Mgf::new(
        move |u| 1.0 + (a * u - u * u) / g_raw(u, a, 1.0),
        roc,
        (2.0 * a).exp() / a,
    ))
}

/// MGF of the time between consecutive laggers, in delay units:
/// `a e^{u−a} / (a e^{u−a} − u)` with `a = alpha_norm`.
pub fn lagger_mgf(alpha_norm: f64) -> Result<Mgf> {
    let a = alpha_norm;
    ensure!(a > 0.0 && a.is_finite(), Domain, "alpha must be positive, got {a}");
    let denom = move |u: f64| a * (u - a).exp() - u;
    // The denominator is convex with a zero at `a`; for `a > 1` an earlier
    // zero comes first.
    let roc = if a <= 1.0 { a } else { crate::roots::first_root(denom, 0.0, a, 2000)? };
    Ok(Mgf::new(
        move |u| a * (u - a).exp() / denom(u),
        roc,
        a.exp() / a,
    ))
}

/// Shape of the race: does some window `(c, d]` with `c ≤ s`, `d ≥ s + t`
/// hold no more renewals than there are Poisson arrivals in the widened
/// window `(c − μ, d + ν)`, plus `n`?
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaceSpec {
    pub mu: f64,
    pub nu: f64,
    pub n: u64,
    pub t: f64,
}

impl RaceSpec {
    pub fn new(mu: f64, nu: f64, n: u64, t: f64) -> Result<Self> {
        ensure!(mu >= 0.0 && nu >= 0.0, Domain, "mu and nu must be nonnegative");
        ensure!(t > 0.0 && t.is_finite(), Domain, "race duration must be positive, got {t}");
        Ok(RaceSpec { mu, nu, n, t })
    }
}

/// `ln` of the race-loss bound at `u`; see [`renewal_race_bound`].
fn ln_race_bound(mgf: &Mgf, beta: f64, spec: &RaceSpec, u: f64) -> Result<f64> {
    ensure!(
        u > 0.0 && u < mgf.roc_sup,
        Domain,
        "u = {u} outside (0, {})",
        mgf.roc_sup
    );
    let phi = mgf.eval(u)?;
    let ell = if beta == 0.0 {
        1.0
    } else {
        let inner = beta * (phi - 1.0);
        ensure!(
            inner < mgf.roc_sup,
            Domain,
            "nested argument beta*(phi(u)-1) = {inner} outside the region of convergence"
        );
        let slack = 1.0 - beta * mgf.mean;
        ensure!(slack > 0.0, Infeasible, "renewal rate 1/m must exceed beta (beta*m = {})", beta * mgf.mean);
        (phi - 1.0) * slack / (phi / mgf.eval(inner)? - 1.0)
    };
    ensure!(ell > 0.0 && ell.is_finite(), Domain, "transform factor is not positive at u = {u}");
    let psi = u + beta - beta * phi;
    Ok((phi - 1.0) * beta * (spec.mu + spec.nu) + (spec.n + 1) as f64 * phi.ln() + 2.0 * ell.ln()
        - psi * spec.t)
}

/// Upper bound on the probability of the race loss described by `spec`:
/// `exp((φ−1)β(μ+ν)) φⁿ⁺¹ L²(φ) e^{−ψt}` with `ψ = u + β − βφ(u)` and
/// `L(r) = (r−1)(1−βm) / (r/φ(β(r−1)) − 1)`, valid for every `u` in the
/// region of convergence.
pub fn renewal_race_bound(mgf: &Mgf, beta: f64, spec: &RaceSpec, u: f64) -> Result<BoundResult> {
    let ln = ln_race_bound(mgf, beta, spec, u)?;
    let mut r = BoundResult::from_raw(ln.exp());
    r.optimizer_v = Some(u);
    r.theta = Some(mgf.roc_sup);
    Ok(r)
}

/// [`renewal_race_bound`] minimized over `u`.
pub fn renewal_race_bound_min(mgf: &Mgf, beta: f64, spec: &RaceSpec) -> Result<BoundResult> {
    let f = |u: f64| ln_race_bound(mgf, beta, spec, u).unwrap_or(f64::NAN);
    let (u, _) = grid_then_golden(f, 0.0, mgf.roc_sup, 512)
        .ok_or_else(|| crate::Error::Domain("no admissible u for the race bound".into()))?;
    renewal_race_bound(mgf, beta, spec, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{DelayBound, ProtocolParams};
    use approx::assert_relative_eq;

    #[test]
    fn double_lagger_mgf_basics() {
        for &a in &[0.01, 0.025, 0.1] {
            let m = double_lagger_mgf(a).unwrap();
            assert_eq!(m.eval(0.0).unwrap(), 1.0);
            assert!(m.eval(m.roc_sup()).is_err());
            assert!(m.roc_sup() > 0.0 && m.roc_sup() <= a);
            let h = 1e-7 * m.roc_sup();
            let slope = (m.eval(h).unwrap() - m.eval(-h).unwrap()) / (2.0 * h);
            assert_relative_eq!(slope, m.mean(), max_relative = 1e-6);
            let mut prev = 1.0;
            for i in 1..100 {
                let v = m.eval(m.roc_sup() * i as f64 / 100.0).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn lagger_mgf_basics() {
        for &a in &[0.05, 0.5, 2.0] {
            let m = lagger_mgf(a).unwrap();
            assert_eq!(m.eval(0.0).unwrap(), 1.0);
            let h = 1e-6 * m.roc_sup();
            let slope = (m.eval(h).unwrap() - m.eval(-h).unwrap()) / (2.0 * h);
            assert_relative_eq!(slope, m.mean(), max_relative = 1e-6);
            assert!(m.eval(m.roc_sup() * (1.0 - 1e-9)).unwrap() > 1e6);
        }
    }

    #[test]
    fn no_adversary_reduces_to_mgf_power() {
        let m = double_lagger_mgf(0.025).unwrap();
        let spec = RaceSpec::new(1.0, 1.0, 2, 50.0).unwrap();
        let u = 0.4 * m.roc_sup();
        let r = renewal_race_bound(&m, 0.0, &spec, u).unwrap();
        let phi = m.eval(u).unwrap();
        assert_relative_eq!(r.raw_value, phi.powi(3) * (-u * 50.0).exp(), max_relative = 1e-13);
    }

    #[test]
    fn poisson_transform_closed_form() {
        // Exponential renewals: L(r) = (α − β)/(α − βr).
        let (a, b) = (1.0, 0.3);
        let m = Mgf::exponential(a).unwrap();
        let spec = RaceSpec::new(0.0, 0.0, 0, 1e-9).unwrap();
        for &u in &[0.05, 0.2, 0.3] {
            let phi = m.eval(u).unwrap();
            let ell = (a - b) / (a - b * phi);
            let r = renewal_race_bound(&m, b, &spec, u).unwrap();
            assert_relative_eq!(r.raw_value, phi * ell * ell, max_relative = 1e-6);
        }
    }

    #[test]
    fn reduces_to_delay_objective() {
        let p = ProtocolParams::from_total_rate(1.0 / 600.0, 0.1, 10.0).unwrap();
        let db = DelayBound::feasible(&p).unwrap();
        let (a, b) = p.normalized();
        let m = double_lagger_mgf(a).unwrap();
        let t_sec = 4.0 * 3600.0;
        let spec = RaceSpec::new(1.0, 1.0, 1, t_sec / p.delta).unwrap();
        for i in 1..100 {
            let v = db.theta() * i as f64 / 100.0;
            let Some(expected) = db.ln_objective(v, t_sec) else { continue };
            let got = renewal_race_bound(&m, b, &spec, v * p.delta).unwrap();
            assert_relative_eq!(got.raw_value, expected.exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn rejects_arguments_outside_roc() {
        let m = double_lagger_mgf(0.025).unwrap();
        let spec = RaceSpec::new(1.0, 1.0, 1, 10.0).unwrap();
        assert!(renewal_race_bound(&m, 0.001, &spec, 0.0).is_err());
        assert!(renewal_race_bound(&m, 0.001, &spec, m.roc_sup()).is_err());
        assert!(RaceSpec::new(1.0, 1.0, 1, 0.0).is_err());
    }
}
