//! The private attack: mine a secret chain, publish only once it is longer.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::stats::{Estimate, PmfTable};
use super::{count_le, generate_trace, poisson_arrivals, run_trials, SimConfig};

/// One trial of the attack on a block confirmed after waiting `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackOutcome {
    /// Secret lead at the start `s` of the window.
    #[serde(rename = "premine_gain_L")]
    pub premine_gain_l: u64,
    /// Honest growth minus adversarial blocks over `(s, s + t]`.
    pub race_deficit: i64,
    /// Largest later reduction of the deficit.
    #[serde(rename = "postmine_gain_N")]
    pub postmine_gain_n: u64,
    pub success: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackSummary {
    pub success: Estimate,
    pub mean_premine_gain: f64,
    pub mean_postmine_gain: f64,
}

/// Lead of a birth–death walk driven by adversarial (up) and honest (down,
/// floored at zero) arrivals on `(0, s]`.
fn premine_lead(honest: &[f64], adversarial: &[f64], s: f64) -> u64 {
    let (mut i, mut j, mut lead) = (0, 0, 0u64);
    loop {
        let h = honest.get(i).copied().filter(|&x| x <= s);
        let a = adversarial.get(j).copied().filter(|&x| x <= s);
        match (h, a) {
            (Some(h), Some(a)) if a < h => {
                lead += 1;
                j += 1;
            }
            (Some(_), _) => {
                lead = lead.saturating_sub(1);
                i += 1;
            }
            (None, Some(_)) => {
                lead += 1;
                j += 1;
            }
            (None, None) => return lead,
        }
    }
}

/// Jumpers among `honest` with the first taken as the first block after
/// `start` at or beyond `first_at`.
fn jumpers_after(honest: &[f64], start: f64, first_at: f64, delta: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &t in honest.iter().filter(|&&t| t > start) {
        match out.last() {
            None if t >= first_at => out.push(t),
            Some(&last) if t >= last + delta => out.push(t),
            _ => {}
        }
    }
    out
}

/// `−min` over `d > from` of the change in (honest growth − adversarial
/// count), with growth steps at `steps` and adversarial arrivals `adv`.
fn max_catch_up(steps: &[f64], adv: &[f64], from: f64) -> u64 {
    let steps = &steps[count_le(steps, from)..];
    let adv = &adv[count_le(adv, from)..];
    let (mut i, mut j, mut d, mut min) = (0, 0, 0i64, 0i64);
    while j < adv.len() {
        if i < steps.len() && steps[i] < adv[j] {
            d += 1;
            i += 1;
        } else {
            d -= 1;
            j += 1;
            min = min.min(d);
        }
    }
    (-min) as u64
}

fn attack_trial(config: &SimConfig, t: f64, trial: u64) -> AttackOutcome {
    let tr = generate_trace(config, trial);
    let (s, delta) = (config.warmup_s, config.params.delta);
    let end = s + t;
    let lead = premine_lead(&tr.honest_times, &tr.adversarial_times, s);
    // Every honest block is held back by Δ, so honest chains only grow by
    // jumpers, each counting once it has propagated.
    let effective: Vec<f64> = jumpers_after(&tr.honest_times, s, s, delta)
        .into_iter()
        .map(|j| j + delta)
        .collect();
    let growth = count_le(&effective, end) as i64;
    let a = &tr.adversarial_times;
    let adv = (count_le(a, end) - count_le(a, s)) as i64;
    let deficit = growth - adv;
    let n = max_catch_up(&effective, a, end);
    AttackOutcome {
        premine_gain_l: lead,
        race_deficit: deficit,
        postmine_gain_n: n,
        success: deficit - (n as i64) < lead as i64,
    }
}

/// Simulates the attack in every trial of `config` against a block
/// confirmed after `t` seconds. Each trace covers
/// `[0, warmup_s + t + post_horizon]`; `config.horizon` is not used.
pub fn run_private_attack(config: &SimConfig, t: f64, post_horizon: f64) -> Vec<AttackOutcome> {
    run_private_attack_until(config, t, post_horizon, None).0
}

/// [`run_private_attack`] stopping at `deadline`; the flag is `false` if
/// some trials were skipped.
pub fn run_private_attack_until(
    config: &SimConfig,
    t: f64,
    post_horizon: f64,
    deadline: Option<Instant>,
) -> (Vec<AttackOutcome>, bool) {
    let cfg = SimConfig { horizon: config.warmup_s + t + post_horizon, ..*config };
    run_trials(cfg.trials, deadline, |i| attack_trial(&cfg, t, i))
}

pub fn summarize_attacks(outcomes: &[AttackOutcome]) -> AttackSummary {
    let n = outcomes.len().max(1) as f64;
    let hits = outcomes.iter().filter(|o| o.success).count() as u64;
    AttackSummary {
        success: Estimate::proportion(hits, outcomes.len() as u64),
        mean_premine_gain: outcomes.iter().map(|o| o.premine_gain_l as f64).sum::<f64>() / n,
        mean_postmine_gain: outcomes.iter().map(|o| o.postmine_gain_n as f64).sum::<f64>() / n,
    }
}

fn postmine_trial(config: &SimConfig, trial: u64) -> u64 {
    let mut rng = config.rng_for(trial);
    let p = &config.params;
    let honest = poisson_arrivals(p.alpha, config.horizon, &mut rng);
    let adv = poisson_arrivals(p.beta, config.horizon, &mut rng);
    if p.delta == 0.0 {
        return max_catch_up(&honest, &adv, 0.0);
    }
    // A fresh jumper race: the first jumper is the first block at or after Δ.
    let jumpers = jumpers_after(&honest, 0.0, p.delta, p.delta);
    max_catch_up(&jumpers, &adv, 0.0).saturating_sub(1)
}

/// Histogram of the post-mining gain over `config.trials` races of length
/// `config.horizon`: `−min_d (H_d − A_d)` without delay, and
/// `max(0, −1 − min_d (J_d − A_d))` for the jumper race otherwise.
pub fn empirical_postmine_pmf(config: &SimConfig, max_bin: usize) -> PmfTable {
    empirical_postmine_pmf_until(config, max_bin, None).0
}

/// [`empirical_postmine_pmf`] stopping at `deadline`; the flag is `false`
/// if some trials were skipped.
pub fn empirical_postmine_pmf_until(
    config: &SimConfig,
    max_bin: usize,
    deadline: Option<Instant>,
) -> (PmfTable, bool) {
    let (values, complete) = run_trials(config.trials, deadline, |i| postmine_trial(config, i));
    (PmfTable::from_values(values, max_bin), complete)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ProtocolParams;

    #[test]
    fn premine_walk() {
        assert_eq!(premine_lead(&[1.0, 2.0], &[0.5, 0.7, 0.9], 10.0), 1);
        assert_eq!(premine_lead(&[0.1, 0.2], &[0.5], 10.0), 1);
        assert_eq!(premine_lead(&[], &[0.5, 11.0], 10.0), 1);
    }

    #[test]
    fn catch_up_scan() {
        // steps at 1, 2; adversary at 0.5, 0.6, 3.0: D = -1, -2, -1, 0, -1.
        assert_eq!(max_catch_up(&[1.0, 2.0], &[0.5, 0.6, 3.0], 0.0), 2);
        assert_eq!(max_catch_up(&[1.0], &[], 0.0), 0);
    }

    #[test]
    fn jumper_rule() {
        let j = jumpers_after(&[0.5, 1.2, 1.4, 2.3, 2.4, 3.0], 1.0, 1.0, 1.0);
        assert_eq!(j, vec![1.2, 2.3]);
    }

    #[test]
    fn no_adversary_never_wins() {
        let p = ProtocolParams::new(1.0 / 600.0, 0.0, 10.0).unwrap();
        let cfg = SimConfig::new(p, 1.0, 0.0, 2000, 1).unwrap();
        let out = run_private_attack(&cfg, 7200.0, 3000.0);
        assert!(out.iter().all(|o| !o.success));
    }

    #[test]
    fn geometric_postmine_gain() {
        let p = ProtocolParams::new(0.9, 0.1, 0.0).unwrap();
        let cfg = SimConfig::new(p, 400.0, 0.0, 40_000, 2).unwrap();
        let table = empirical_postmine_pmf(&cfg, 10);
        let r: f64 = 1.0 / 9.0;
        for k in 0..=4 {
            let target = (1.0 - r) * r.powi(k as i32);
            assert!(table.estimate(k).consistent_with(target, 3.0), "k {k}");
        }
    }
}
