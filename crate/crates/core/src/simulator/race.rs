//! Empirical race-loss frequency of a block species against the adversary.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::species::species_times;
use super::stats::Estimate;
use super::{count_le, generate_trace, run_trials, SimConfig};
use crate::bounds::RaceSpec;
use crate::error::ensure;
use crate::Result;

/// Which honest arrivals count as renewals in the race.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stream {
    Honest,
    Lagger,
    Loner,
    DoubleLagger,
    Jumper,
}

/// `max_{c ∈ [0, s]} W(c) − A(c − μ)`, counting arrivals at negative times as
/// absent.
fn best_start(w: &[f64], a: &[f64], s: f64, mu: f64) -> i64 {
    let mut best = 0i64;
    for (k, &c) in w.iter().take_while(|&&c| c <= s).enumerate() {
        let value = (k + 1) as i64 - count_le(a, c - mu) as i64;
        best = best.max(value);
    }
    best
}

/// `min_{d ∈ [from, to]} W(d) − A(d + ν)`.
fn worst_end(w: &[f64], a: &[f64], from: f64, to: f64, nu: f64) -> i64 {
    let value = |d: f64| count_le(w, d) as i64 - count_le(a, d + nu) as i64;
    let mut worst = value(from);
    // Minima sit right after an adversarial arrival enters the window.
    for &x in a.iter().skip(count_le(a, from + nu)) {
        let d = x - nu;
        if d > to {
            break;
        }
        worst = worst.min(value(d));
    }
    worst
}

fn race_trial(config: &SimConfig, spec: &RaceSpec, stream: Stream, trial: u64) -> bool {
    let tr = generate_trace(config, trial);
    let delta = config.params.delta;
    let w = match stream {
        Stream::Honest => tr.honest_times.clone(),
        _ => {
            let s = species_times(&tr, delta);
            match stream {
                Stream::Lagger => s.laggers,
                Stream::Loner => s.loners,
                Stream::DoubleLagger => s.double_laggers,
                Stream::Jumper => s.jumpers,
                Stream::Honest => unreachable!(),
            }
        }
    };
    let a = &tr.adversarial_times;
    let (mu, nu) = (spec.mu * delta, spec.nu * delta);
    let s = config.warmup_s;
    let end = s + spec.t * delta;
    let start = best_start(&w, a, s, mu);
    let finish = worst_end(&w, a, end, config.horizon - nu, nu);
    finish - start <= spec.n as i64
}

/// Frequency of `∃ c ∈ [0, s], d ∈ [s + t, horizon − ν]` with
/// `W_{c,d} ≤ A_{c−μ, d+ν} + n`, where `W` counts `stream` arrivals.
///
/// `spec` is in units of the delay bound. Capping `d` at the horizon makes
/// the result a slight underestimate of the unbounded event.
pub fn estimate_race_loss(config: &SimConfig, spec: &RaceSpec, stream: Stream) -> Result<Estimate> {
    Ok(estimate_race_loss_until(config, spec, stream, None)?.0)
}

/// [`estimate_race_loss`] stopping at `deadline`; the flag is `false` if
/// some trials were skipped.
pub fn estimate_race_loss_until(
    config: &SimConfig,
    spec: &RaceSpec,
    stream: Stream,
    deadline: Option<Instant>,
) -> Result<(Estimate, bool)> {
    let delta = config.params.delta;
    ensure!(delta > 0.0, Domain, "race specs are in delay units and need delta > 0");
    ensure!(
        config.warmup_s + (spec.t + spec.nu) * delta < config.horizon,
        Domain,
        "horizon too short for the race window"
    );
    let (hits, complete) = run_trials(config.trials, deadline, |i| race_trial(config, spec, stream, i));
    let n = hits.len() as u64;
    let k = hits.into_iter().filter(|&h| h).count() as u64;
    Ok((Estimate::proportion(k, n), complete))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ProtocolParams;

    #[test]
    fn window_scans() {
        // W at 1, 2, 3; A at 0.5, 2.5.
        let (w, a) = ([1.0, 2.0, 3.0], [0.5, 2.5]);
        assert_eq!(best_start(&w, &a, 2.0, 0.0), 1);
        assert_eq!(best_start(&w, &a, 2.0, 1.0), 1);
        assert_eq!(best_start(&w, &a, 2.0, 1.6), 2);
        assert_eq!(worst_end(&w, &a, 2.0, 10.0, 0.0), 0);
        assert_eq!(worst_end(&w, &a, 2.0, 2.4, 0.0), 1);
        assert_eq!(worst_end(&w, &a, 0.0, 10.0, 0.0), -1);
    }

    #[test]
    fn huge_allowance_always_loses() {
        let p = ProtocolParams::new(0.25, 0.05, 1.0).unwrap();
        let cfg = SimConfig::new(p, 200.0, 20.0, 500, 3).unwrap();
        let spec = RaceSpec::new(1.0, 1.0, 1000, 50.0).unwrap();
        assert_eq!(estimate_race_loss(&cfg, &spec, Stream::DoubleLagger).unwrap().value, 1.0);
    }

    #[test]
    fn empty_window_probability() {
        // β = 0, n = 0: lose iff no honest arrival in (s, s + t].
        let p = ProtocolParams::new(0.5, 0.0, 1.0).unwrap();
        let cfg = SimConfig::new(p, 20.0, 5.0, 100_000, 8).unwrap();
        let spec = RaceSpec::new(0.0, 0.0, 0, 0.2).unwrap();
        let est = estimate_race_loss(&cfg, &spec, Stream::Honest).unwrap();
        assert!(est.consistent_with((-0.5f64 * 0.2).exp(), 3.0), "{est:?}");
    }
}
