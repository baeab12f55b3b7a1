use super::{check_time, BoundResult, ProtocolParams};
use crate::error::ensure;
use crate::roots::{bisect, grid_then_golden};
use crate::Result;

const SEARCH_GRID: usize = 512;
const ROOT_GRID: usize = 2000;

pub(crate) fn g_raw(v: f64, alpha: f64, delta: f64) -> f64 {
    let e = ((v - alpha) * delta).exp();
    v * v - alpha * v - alpha * v * e + alpha * alpha * e * e
}

/// `v² − αv − αv e^{(v−α)Δ} + α² e^{2(v−α)Δ}`, in per-second units.
pub fn g_denominator(v: f64, params: &ProtocolParams) -> f64 {
    g_raw(v, params.alpha, params.delta)
}

/// Smallest positive zero of `g_raw(·, alpha, delta)`.
///
/// `g` is positive at zero, vanishes at `alpha` with slope `α²Δ`, so it dips
/// below zero just left of `alpha`; the dip is only about `αΔ` wide in
/// relative terms. The scan therefore combines a uniform grid
/// with points crowding geometrically towards `alpha`.
pub(crate) fn smallest_root(alpha: f64, delta: f64) -> Result<f64> {
    let g = |v: f64| g_raw(v, alpha, delta);
    let mut grid: Vec<f64> = (1..ROOT_GRID).map(|i| alpha * i as f64 / ROOT_GRID as f64).collect();
    grid.extend((4..=48).map(|m| alpha * (1.0 - 10f64.powf(-m as f64 / 4.0))));
    grid.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    let mut g_prev = g(0.0);
    for &v in &grid {
        let gv = g(v);
        if gv <= 0.0 && g_prev > 0.0 {
            return bisect(g, prev, v);
        }
        prev = v;
        g_prev = gv;
    }
    Err(crate::Error::Bracket(format!(
        "the delay denominator (alpha = {alpha}, delta = {delta})"
    )))
}

/// `θ`, the smallest positive zero of [`g_denominator`], per second.
pub fn find_theta(params: &ProtocolParams) -> Result<f64> {
    ensure!(
        params.delta > 0.0,
        Infeasible,
        "delay bounds require delta > 0; use the zero-delay bounds"
    );
    smallest_root(params.alpha, params.delta)
}

/// `η(v) = (αv − v²) / g(v)` for `v ∈ (0, θ)`.
pub fn eta(v: f64, params: &ProtocolParams) -> Result<f64> {
    DelayBound::new(params)?.eta(v)
}

/// Achievable level for delay bound `Δ > 0`, minimized over `v`.
pub fn delay_upper(params: &ProtocolParams, t: f64) -> Result<BoundResult> {
    DelayBound::feasible(params)?.upper(t)
}

/// The same bound at the single `v` maximizing the decay exponent; a closed
/// exponential `c² e^{−ψ t}` that dominates [`delay_upper`] for every `t`.
pub fn delay_upper_universal(params: &ProtocolParams, t: f64) -> Result<BoundResult> {
    DelayBound::feasible(params)?.upper_universal(t)
}

/// Delay-bound machinery with `θ` and the exponent maximizer cached, for
/// repeated evaluation at one parameter point (latency inversion, sweeps).
#[derive(Debug, Clone)]
pub struct DelayBound {
    params: ProtocolParams,
    theta: f64,
    u_star: Option<f64>,
}

impl DelayBound {
    /// Requires only `Δ > 0`; enough for `η` and `ψ`.
    pub fn new(params: &ProtocolParams) -> Result<Self> {
        let theta = find_theta(params)?;
        Ok(DelayBound { params: *params, theta, u_star: None })
    }

    /// Additionally requires `β < α e^{−2αΔ}`, under which the bound is finite.
    pub fn feasible(params: &ProtocolParams) -> Result<Self> {
        let (alpha, beta, delta) = (params.alpha, params.beta, params.delta);
        ensure!(
            delta > 0.0,
            Infeasible,
            "delay bounds require delta > 0; use the zero-delay bounds"
        );
        let limit = alpha * (-2.0 * alpha * delta).exp();
        ensure!(
            beta < limit,
            Infeasible,
            "condition beta < alpha*exp(-2*alpha*delta) violated: beta = {beta}, limit = {limit}"
        );
        let mut bound = Self::new(params)?;
        let (u, psi) = bound.maximize_exponent();
        ensure!(psi > 0.0, Domain, "no v in (0, theta) with a positive exponent");
        bound.u_star = Some(u);
        Ok(bound)
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn eta_unchecked(&self, v: f64) -> f64 {
        let p = &self.params;
        (p.alpha * v - v * v) / g_raw(v, p.alpha, p.delta)
    }

    pub fn eta(&self, v: f64) -> Result<f64> {
        ensure!(
            v > 0.0 && v < self.theta,
            Domain,
            "eta is defined on (0, theta) = (0, {}), got {v}",
            self.theta
        );
        Ok(self.eta_unchecked(v))
    }

    /// Decay exponent `ψ(v) = v − η(v)β`.
    pub fn exponent(&self, v: f64) -> Result<f64> {
        Ok(v - self.eta(v)? * self.params.beta)
    }

    /// `(v, ψ(v))` at the maximum of the exponent on `(0, θ)`.
    fn maximize_exponent(&self) -> (f64, f64) {
        let neg_psi = |v: f64| -(v - self.eta_unchecked(v) * self.params.beta);
        let (u, y) = grid_then_golden(neg_psi, 0.0, self.theta, SEARCH_GRID)
            .expect("exponent is finite inside (0, theta)");
        (u, -y)
    }

    /// Maximizer of the exponent; computed on demand if this instance was
    /// built with [`DelayBound::new`].
    pub fn universal_v(&self) -> f64 {
        self.u_star.unwrap_or_else(|| self.maximize_exponent().0)
    }

    /// `ln c²(v)`, or `None` where `η(v)β ∉ (0, θ)` or `c(v) ≤ 0`.
    pub fn ln_c_squared(&self, v: f64) -> Option<f64> {
        let p = &self.params;
        if !(v > 0.0 && v < self.theta) {
            return None;
        }
        let e1 = self.eta_unchecked(v);
        let w = e1 * p.beta;
        if !(w > 0.0 && w < self.theta) {
            // β = 0 collapses the nested term: η(0⁺) = 0.
            if p.beta == 0.0 && e1 > 0.0 {
                let c = e1 / (1.0 - 1.0 / (1.0 + e1));
                return (c > 0.0).then(|| 2.0 * c.ln());
            }
            return None;
        }
        let e2 = self.eta_unchecked(w);
        let slack = 1.0 - p.beta / p.alpha * (2.0 * p.alpha * p.delta).exp();
        // 1/(1+e2) − 1/(1+e1) without cancellation at small v.
        let gap = (e1 - e2) / ((1.0 + e1) * (1.0 + e2));
        let c = (w * p.delta).exp() * slack * e1 / gap;
        (c > 0.0 && c.is_finite()).then(|| 2.0 * c.ln())
    }

    /// `ln c²(v) − ψ(v) t`, or `None` outside the admissible set.
    pub fn ln_objective(&self, v: f64, t: f64) -> Option<f64> {
        let ln_c2 = self.ln_c_squared(v)?;
        Some(ln_c2 - (v - self.eta_unchecked(v) * self.params.beta) * t)
    }

    pub fn upper(&self, t: f64) -> Result<BoundResult> {
        check_time(t)?;
        let f = |v: f64| self.ln_objective(v, t).unwrap_or(f64::NAN);
        let mut best = grid_then_golden(f, 0.0, self.theta, SEARCH_GRID);
        let u = self.universal_v();
        if let Some(y) = self.ln_objective(u, t) {
            if best.map_or(true, |(_, b)| y < b) {
                best = Some((u, y));
            }
        }
        let (v, y) = best.ok_or_else(|| {
            crate::Error::Domain("empty admissible interval for the delay bound".into())
        })?;
        Ok(self.result(v, y))
    }

    pub fn upper_universal(&self, t: f64) -> Result<BoundResult> {
        check_time(t)?;
        let u = self.universal_v();
        let y = self.ln_objective(u, t).ok_or_else(|| {
            crate::Error::Domain("exponent maximizer lies outside the admissible set".into())
        })?;
        Ok(self.result(u, y))
    }

    fn result(&self, v: f64, ln_value: f64) -> BoundResult {
        let mut r = BoundResult::from_raw(ln_value.exp());
        r.optimizer_v = Some(v);
        r.theta = Some(self.theta);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn btc(frac: f64) -> ProtocolParams {
        ProtocolParams::from_total_rate(1.0 / 600.0, frac, 10.0).unwrap()
    }

    #[test]
    fn denominator_endpoints() {
        let p = ProtocolParams::new(0.0015, 1.0 / 6000.0, 10.0).unwrap();
        let g0 = g_denominator(0.0, &p);
        assert_relative_eq!(g0, 0.0015f64.powi(2) * (-0.03f64).exp(), max_relative = 1e-14);
        // Normalized units: αΔ plays the role of α with Δ = 1.
        for &a in &[0.01, 0.025, 0.1, 1.0] {
            assert!(g_raw(a, a, 1.0).abs() < 1e-15);
        }
        let n = 10_000;
        let changes = (1..=n)
            .filter(|&i| {
                let v0 = 0.0015 * (i - 1) as f64 / n as f64;
                let v1 = 0.0015 * i as f64 / n as f64;
                g_denominator(v0, &p) > 0.0 && g_denominator(v1, &p) <= 0.0
            })
            .count();
        assert!(changes >= 1);
    }

    #[test]
    fn theta_oracle() {
        let p = ProtocolParams::new(0.0015, 1.0 / 6000.0, 10.0).unwrap();
        let th = find_theta(&p).unwrap();
        assert!(g_denominator(th, &p).abs() < 1e-10 * p.alpha * p.alpha);
        assert!(th * p.delta <= p.alpha * p.delta);
        // 40-digit root of the same function.
        assert_relative_eq!(th, 0.001_477_165_222_814_998_5, max_relative = 1e-11);

        // Independent dense scan.
        let n = 1_000_000;
        let first = (1..=n)
            .map(|i| p.alpha * i as f64 / n as f64)
            .find(|&v| g_denominator(v, &p) <= 0.0)
            .unwrap();
        assert!((first - th).abs() <= p.alpha / n as f64);
    }

    #[test]
    fn theta_for_tiny_delays() {
        for &delta in &[1e-3, 0.1, 1.0, 100.0] {
            let p = ProtocolParams::new(0.0015, 0.0, delta).unwrap();
            let th = find_theta(&p).unwrap();
            assert!(th > 0.0 && th < p.alpha);
            assert!(g_denominator(th, &p).abs() < 1e-9 * p.alpha * p.alpha);
        }
        assert!(find_theta(&ProtocolParams::new(0.0015, 0.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn eta_limits_and_slope() {
        let p = btc(0.1);
        let b = DelayBound::new(&p).unwrap();
        assert!(b.eta(0.0).is_err());
        assert!(b.eta(b.theta()).is_err());
        let h = 1e-9 * b.theta();
        let slope = b.eta(h).unwrap() / h;
        let mean = (2.0 * p.alpha * p.delta).exp() / p.alpha;
        assert_relative_eq!(slope, mean, max_relative = 1e-6);
    }

    #[test]
    fn infeasible_when_loner_rate_too_small() {
        let p = ProtocolParams::new(1.0, 0.5, 1.0).unwrap();
        assert!(matches!(delay_upper(&p, 10.0), Err(crate::Error::Infeasible(_))));
        let p0 = ProtocolParams::new(1.0, 0.1, 0.0).unwrap();
        assert!(matches!(delay_upper(&p0, 10.0), Err(crate::Error::Infeasible(_))));
    }

    #[test]
    fn quoted_waits_at_ten_percent() {
        let p = btc(0.1);
        assert!(delay_upper(&p, 4.0 * 3600.0).unwrap().probability <= 1e-3);
        assert!(delay_upper(&p, 10.0 * 3600.0).unwrap().probability <= 1e-9);
    }

    #[test]
    fn result_diagnostics() {
        let p = btc(0.1);
        let r = delay_upper(&p, 3600.0).unwrap();
        let (v, th) = (r.optimizer_v.unwrap(), r.theta.unwrap());
        assert!(v > 0.0 && v < th);
        assert_eq!(r.probability, r.raw_value.min(1.0));
    }

    #[test]
    fn universal_dominates_and_approximates() {
        for &frac in &[0.1, 0.25] {
            let b = DelayBound::feasible(&btc(frac)).unwrap();
            for h in 1..=40 {
                let t = 3600.0 * h as f64;
                let opt = b.upper(t).unwrap().raw_value;
                let uni = b.upper_universal(t).unwrap().raw_value;
                assert!(uni >= opt, "t = {h}h");
            }
        }
        let b = DelayBound::feasible(&btc(0.1)).unwrap();
        let opt = b.upper(36000.0).unwrap().raw_value;
        let uni = b.upper_universal(36000.0).unwrap().raw_value;
        assert!(uni / opt < 1.1);
    }

    #[test]
    fn exponent_positive_up_to_maximizer() {
        for &a in &[0.005f64, 0.02, 0.1] {
            for &f in &[0.05, 0.2, 0.4] {
                let beta = f * a * (-2.0 * a).exp();
                let b = DelayBound::feasible(&ProtocolParams::new(a, beta, 1.0).unwrap()).unwrap();
                let u = b.universal_v();
                for i in 1..=50 {
                    let v = u * i as f64 / 50.0;
                    assert!(b.exponent(v).unwrap() > 0.0);
                }
                let near_theta = b.theta() * (1.0 - 1e-9);
                assert!(b.exponent(near_theta).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn prefactor_tends_to_one() {
        let b = DelayBound::feasible(&btc(0.1)).unwrap();
        let c2 = b.ln_c_squared(1e-7 * b.theta()).unwrap().exp();
        assert!((c2 - 1.0).abs() < 1e-4, "{c2}");
    }
}
