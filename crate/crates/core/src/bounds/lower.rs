use super::{check_time, BoundResult, ProtocolParams};
use crate::distributions::{erlang_ccdf, poisson_pmf, CompensatedSum, PowerSeries};
use crate::error::ensure;
use crate::Result;

/// Default number of post-mining gain probabilities kept.
pub const DEFAULT_N_MAX: usize = 128;

/// Coefficients more negative than this mean the transform is not a pmf.
const NEGATIVITY_TOL: f64 = 1e-12;

/// Pmf `q(0..=n_max)` of the adversary's post-mining gain when honest
/// growth is paced by jumpers.
///
/// `q` comes from the Taylor coefficients `ξ_j` of
/// `ξ(ρ) = (1 − ρ)(α − β − αβΔ) / (α − e^{(1−ρ)βΔ}(α + β − βρ)ρ)`:
/// `q(0) = ξ₀ + ξ₁` and `q(n) = ξ_{n+1}`. The second value is the mass the
/// truncation leaves out, `1 − Σ q`.
pub fn postmine_gain_pmf(params: &ProtocolParams, n_max: usize) -> Result<(Vec<f64>, f64)> {
    let (alpha, beta, delta) = (params.alpha, params.beta, params.delta);
    ensure!(beta < alpha, Infeasible, "lower bound requires beta < alpha");
    let slack = alpha - beta - alpha * beta * delta;
    ensure!(
        slack > 0.0,
        Infeasible,
        "lower bound requires alpha - beta - alpha*beta*delta > 0, got {slack}"
    );
    let order = n_max + 2;
    // The denominator D(ρ) vanishes at ρ = 1, cancelling the numerator's
    // (1 − ρ). Dividing it out by hand, D̃_j = −Σ_{i>j} d_i, avoids a
    // round-off residue with a pole at 1 that would otherwise put a flat
    // ~1e-17 floor under every coefficient. `d_i` decays factorially
    // (βΔ < 1 here), so a few extra terms make the tail sums exact.
    let full = order + 40;
    let growth = PowerSeries::exp_affine(beta * delta, -beta * delta, full);
    let linear = PowerSeries::polynomial(&[0.0, alpha + beta, -beta], full);
    let d = &PowerSeries::constant(alpha, full) - &(&growth * &linear);
    let mut reduced = vec![0.0; order];
    let mut tail = CompensatedSum::new();
    for j in (0..full - 1).rev() {
        tail.add(d.coeff(j + 1));
        if j < order {
            reduced[j] = -tail.value();
        }
    }
    let xi = PowerSeries::constant(slack, order).div(&PowerSeries::new(reduced))?;

    let mut q = Vec::with_capacity(n_max + 1);
    q.push(xi.coeff(0) + xi.coeff(1));
    q.extend((1..=n_max).map(|n| xi.coeff(n + 1)));
    if let Some((n, &worst)) = q.iter().enumerate().find(|(_, &x)| x < -NEGATIVITY_TOL) {
        return Err(crate::Error::Infeasible(format!(
            "post-mining gain transform is not a pmf: q({n}) = {worst}"
        )));
    }
    let total: CompensatedSum = q.iter().copied().collect();
    Ok((q, (1.0 - total.value()).max(0.0)))
}

/// Unachievable level for delay bound `Δ > 0`: the success probability of a
/// private attack that pre-mines to its steady-state lead, delays every
/// honest block by `Δ`, and keeps mining after the confirmation time.
///
/// Evaluated as `Σ_{m ≥ 1} P(L + A_t + N = m) · P(Erlang(m, α) > t − mΔ)`,
/// where `L + A_t` (head start plus arrivals during the wait) has pmf
/// `p_k = r p_{k−1} + (1 − r) Pois(k; βt)`. Truncating either series only
/// lowers the sum.
pub fn delay_lower(params: &ProtocolParams, t: f64, n_max: usize, k_max: usize) -> Result<BoundResult> {
    check_time(t)?;
    ensure!(
        params.delta > 0.0,
        Infeasible,
        "delay bounds require delta > 0; use the zero-delay bounds"
    );
    let (q, q_tail) = postmine_gain_pmf(params, n_max)?;
    let (alpha, beta, delta) = (params.alpha, params.beta, params.delta);
    let r = beta / alpha;

    let mut p = Vec::with_capacity(k_max + 1);
    let mut prev = 0.0;
    for k in 0..=k_max {
        let next = r * prev + (1.0 - r) * poisson_pmf(k as u64, beta * t)?;
        p.push(next);
        prev = next;
    }
    let p_tail = (1.0 - p.iter().copied().collect::<CompensatedSum>().value()).max(0.0);

    let mut joint = vec![CompensatedSum::new(); n_max + k_max + 1];
    for (n, &qn) in q.iter().enumerate() {
        for (k, &pk) in p.iter().enumerate() {
            joint[n + k].add(qn * pk);
        }
    }
    let mut total = CompensatedSum::new();
    for (m, mass) in joint.iter().enumerate().skip(1) {
        let w = mass.value();
        if w <= 0.0 {
            continue;
        }
        total.add(w * erlang_ccdf(t - m as f64 * delta, m as u64, alpha)?);
    }
    let mut res = BoundResult::from_raw(total.value());
    res.truncation_tail = Some(q_tail + p_tail);
    Ok(res)
}
