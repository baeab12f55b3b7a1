//! Monte Carlo model of the mining race.
//!
//! Honest and adversarial blocks arrive as independent Poisson processes.
//! Each trial draws from its own ChaCha stream keyed by `(master_seed,
//! trial)`, so aggregate results do not depend on how rayon schedules the
//! trials.

mod attack;
mod race;
mod species;
mod stats;

pub use attack::{
    empirical_postmine_pmf, empirical_postmine_pmf_until, run_private_attack, run_private_attack_until,
    summarize_attacks, AttackOutcome, AttackSummary,
};
pub use race::{estimate_race_loss, estimate_race_loss_until, Stream};
pub use species::{
    classify_species, double_lagger_gaps, jumper_gaps, species_times, SpeciesCounts, SpeciesTimes,
};
pub use stats::{empirical_mgf, ks_critical_1pct, ks_statistic, Estimate, PmfTable};

use std::io::{self, Write};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ProtocolParams;
use crate::error::ensure;
use crate::Result;

/// Trials per scheduling batch; deadlines are checked between batches.
const BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ProtocolParams,
    /// Simulated seconds per trial.
    pub horizon: f64,
    /// Start `s` of the window of interest, seconds.
    pub warmup_s: f64,
    pub trials: u64,
    pub master_seed: u64,
}

impl SimConfig {
    pub fn new(params: ProtocolParams, horizon: f64, warmup_s: f64, trials: u64, master_seed: u64) -> Result<Self> {
        ensure!(warmup_s >= 0.0, Domain, "warmup must be nonnegative, got {warmup_s}");
        ensure!(
            horizon.is_finite() && horizon > warmup_s,
            Domain,
            "horizon {horizon} must exceed warmup {warmup_s}"
        );
        ensure!(trials >= 1, Domain, "at least one trial is required");
        Ok(SimConfig { params, horizon, warmup_s, trials, master_seed })
    }

    /// Warmup long enough for the adversary's lead to reach steady state:
    /// `50 / (α − β)` seconds.
    pub fn default_warmup(params: &ProtocolParams) -> f64 {
        50.0 / (params.alpha - params.beta)
    }

    /// Post-window extension after which the remaining catch-up chance is
    /// negligible: `20 / (α − β)` seconds.
    pub fn default_post_horizon(params: &ProtocolParams) -> f64 {
        20.0 / (params.alpha - params.beta)
    }

    pub fn rng_for(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial);
        rng
    }
}

/// Arrival times of one trial, seconds, on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningTrace {
    pub honest_times: Vec<f64>,
    pub adversarial_times: Vec<f64>,
    pub horizon: f64,
}

impl MiningTrace {
    /// Tab-separated `time_seconds  kind`, one line per block, in time order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let (mut i, mut j) = (0, 0);
        let (h, a) = (&self.honest_times, &self.adversarial_times);
        while i < h.len() || j < a.len() {
            if j >= a.len() || (i < h.len() && h[i] <= a[j]) {
                writeln!(out, "{}\thonest", h[i])?;
                i += 1;
            } else {
                writeln!(out, "{}\tadversarial", a[j])?;
                j += 1;
            }
        }
        Ok(())
    }
}

/// Arrival times of a rate-`rate` Poisson process on `(0, horizon]`.
pub fn poisson_arrivals<R: Rng + ?Sized>(rate: f64, horizon: f64, rng: &mut R) -> Vec<f64> {
    let mut times = Vec::new();
    if rate <= 0.0 {
        return times;
    }
    let exp = Exp::new(rate).expect("positive rate");
    let mut t = 0.0;
    loop {
        t += exp.sample(rng);
        if t > horizon {
            return times;
        }
        times.push(t);
    }
}

pub fn generate_trace(config: &SimConfig, trial: u64) -> MiningTrace {
    let mut rng = config.rng_for(trial);
    let honest_times = poisson_arrivals(config.params.alpha, config.horizon, &mut rng);
    let adversarial_times = poisson_arrivals(config.params.beta, config.horizon, &mut rng);
    MiningTrace { honest_times, adversarial_times, horizon: config.horizon }
}

/// Runs `f` on trials `0..trials` in parallel, in index order. With a
/// deadline, stops starting new batches once it passes; the flag reports
/// whether every trial ran.
pub fn run_trials<T, F>(trials: u64, deadline: Option<Instant>, f: F) -> (Vec<T>, bool)
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let mut out = Vec::with_capacity(trials.min(1 << 24) as usize);
    let mut start = 0;
    while start < trials {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return (out, false);
        }
        let end = (start + BATCH).min(trials);
        out.par_extend((start..end).into_par_iter().map(&f));
        start = end;
    }
    (out, true)
}

/// Number of entries of a sorted slice that are `≤ x`.
pub(crate) fn count_le(sorted: &[f64], x: f64) -> usize {
    sorted.partition_point(|&v| v <= x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(alpha: f64, beta: f64, horizon: f64) -> SimConfig {
        let params = ProtocolParams { alpha, beta, delta: 1.0 };
        SimConfig::new(params, horizon, 0.0, 1, 7).unwrap()
    }

    #[test]
    fn silent_honest_stream() {
        let tr = generate_trace(&config(0.0, 1.0, 10.0), 0);
        assert!(tr.honest_times.is_empty());
        assert!(!tr.adversarial_times.is_empty());
    }

    #[test]
    fn deterministic_per_trial() {
        let c = config(1.0, 0.5, 50.0);
        assert_eq!(generate_trace(&c, 3), generate_trace(&c, 3));
        assert_ne!(generate_trace(&c, 3), generate_trace(&c, 4));
    }

    #[test]
    fn poisson_counts() {
        let c = config(1.0, 0.0, 100.0);
        let n = 10_000;
        let counts: Vec<f64> = (0..n).map(|i| generate_trace(&c, i).honest_times.len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        // Var = 100, so the mean has standard error 0.1.
        assert!((mean - 100.0).abs() < 0.3, "{mean}");
        let tr = generate_trace(&c, 0);
        assert!(tr.honest_times.windows(2).all(|w| w[0] < w[1]));
        assert!(tr.honest_times.iter().all(|&t| t > 0.0 && t <= 100.0));
    }

    #[test]
    fn schedule_independent() {
        let (a, full) = run_trials(10_000, None, |i| i * i);
        assert!(full);
        assert_eq!(a, (0..10_000u64).map(|i| i * i).collect::<Vec<_>>());
        let (b, full) = run_trials(10, Some(Instant::now()), |i| i);
        assert!(!full && b.is_empty());
    }

    #[test]
    fn tsv_dump_is_time_ordered() {
        let tr = MiningTrace { honest_times: vec![1.0, 3.0], adversarial_times: vec![2.0], horizon: 4.0 };
        let mut buf = Vec::new();
        tr.write_tsv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1\thonest\n2\tadversarial\n3\thonest\n");
    }
}
