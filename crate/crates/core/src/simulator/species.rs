//! Honest block species.
//!
//! With genesis at time 0 counting as the 0-th lagger and the 0-th jumper:
//!
//! * a *lagger* is mined more than `Δ` after the previous honest block;
//! * a *loner* is a lagger with no further honest block within `Δ` after it;
//! * a *double-lagger* is a lagger whose predecessor is also a lagger, i.e.
//!   the honest block right after a loner;
//! * a *jumper* is the first honest block mined at least `Δ` after the
//!   previous jumper.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::MiningTrace;
use crate::error::ensure;
use crate::Result;

/// Block counts over an interval `(from, to]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeciesCounts {
    /// Honest blocks.
    #[serde(rename = "H")]
    pub honest: u64,
    /// Adversarial blocks.
    #[serde(rename = "A")]
    pub adversarial: u64,
    #[serde(rename = "J")]
    pub jumpers: u64,
    #[serde(rename = "X")]
    pub laggers: u64,
    #[serde(rename = "V")]
    pub double_laggers: u64,
    #[serde(rename = "Y")]
    pub loners: u64,
}

/// Arrival times of each species over a whole trace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpeciesTimes {
    pub laggers: Vec<f64>,
    pub loners: Vec<f64>,
    pub double_laggers: Vec<f64>,
    pub jumpers: Vec<f64>,
}

/// Classifies every honest block of `trace`. A final block closer than `Δ` to
/// the horizon cannot be confirmed as a loner and is left out of `loners`.
pub fn species_times(trace: &MiningTrace, delta: f64) -> SpeciesTimes {
    let h = &trace.honest_times;
    let mut out = SpeciesTimes::default();
    let mut prev = 0.0;
    let mut prev_lagger = true;
    let mut last_jumper = 0.0;
    for (i, &t) in h.iter().enumerate() {
        let lagger = t - prev > delta;
        if lagger {
            out.laggers.push(t);
            if prev_lagger {
                out.double_laggers.push(t);
            }
            let isolated_after = match h.get(i + 1) {
                Some(&next) => next - t > delta,
                None => t + delta <= trace.horizon,
            };
            if isolated_after {
                out.loners.push(t);
            }
        }
        if t >= last_jumper + delta {
            out.jumpers.push(t);
            last_jumper = t;
        }
        prev = t;
        prev_lagger = lagger;
    }
    out
}

fn count_in(times: &[f64], from: f64, to: f64) -> u64 {
    (super::count_le(times, to) - super::count_le(times, from)) as u64
}

pub fn classify_species(trace: &MiningTrace, delta: f64, from: f64, to: f64) -> Result<SpeciesCounts> {
    ensure!(
        0.0 <= from && from <= to && to <= trace.horizon,
        Domain,
        "interval ({from}, {to}] outside [0, {}]",
        trace.horizon
    );
    let s = species_times(trace, delta);
    Ok(SpeciesCounts {
        honest: count_in(&trace.honest_times, from, to),
        adversarial: count_in(&trace.adversarial_times, from, to),
        jumpers: count_in(&s.jumpers, from, to),
        laggers: count_in(&s.laggers, from, to),
        double_laggers: count_in(&s.double_laggers, from, to),
        loners: count_in(&s.loners, from, to),
    })
}

/// `count` consecutive gaps between double-laggers of a rate-`alpha` honest
/// stream, generated on the fly from exponential inter-block times.
pub fn double_lagger_gaps<R: Rng + ?Sized>(alpha: f64, delta: f64, count: usize, rng: &mut R) -> Vec<f64> {
    let exp = Exp::new(alpha).expect("positive rate");
    let mut out = Vec::with_capacity(count);
    let (mut t, mut last) = (0.0, 0.0);
    // Genesis is a lagger, so the stream starts in the renewal state.
    let mut prev_lagger = true;
    while out.len() < count {
        let gap: f64 = exp.sample(rng);
        t += gap;
        let lagger = gap > delta;
        if lagger && prev_lagger {
            out.push(t - last);
            last = t;
        }
        prev_lagger = lagger;
    }
    out
}

/// `count` consecutive gaps between jumpers of a rate-`alpha` honest stream.
pub fn jumper_gaps<R: Rng + ?Sized>(alpha: f64, delta: f64, count: usize, rng: &mut R) -> Vec<f64> {
    let exp = Exp::new(alpha).expect("positive rate");
    let mut out = Vec::with_capacity(count);
    let (mut t, mut last) = (0.0, 0.0);
    while out.len() < count {
        t += exp.sample(rng);
        if t >= last + delta {
            out.push(t - last);
            last = t;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ProtocolParams;
    use crate::simulator::{generate_trace, ks_critical_1pct, ks_statistic, Estimate, SimConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trace(honest: &[f64], horizon: f64) -> MiningTrace {
        MiningTrace { honest_times: honest.to_vec(), adversarial_times: vec![], horizon }
    }

    #[test]
    fn isolated_block_is_everything() {
        let tr = trace(&[5.0], 10.0);
        let c = classify_species(&tr, 1.0, 0.0, 10.0).unwrap();
        assert_eq!((c.honest, c.laggers, c.loners, c.jumpers, c.double_laggers), (1, 1, 1, 1, 1));
    }

    #[test]
    fn close_pair() {
        let tr = trace(&[5.0, 5.5], 10.0);
        let s = species_times(&tr, 1.0);
        assert_eq!(s.laggers, vec![5.0]);
        assert!(s.loners.is_empty());
        // The second block is within Δ of the first: neither lagger nor loner.
        assert!(!s.laggers.contains(&5.5));
    }

    #[test]
    fn horizon_guard() {
        let tr = trace(&[9.5], 10.0);
        assert!(species_times(&tr, 1.0).loners.is_empty());
        assert!(classify_species(&tr, 1.0, 0.0, 11.0).is_err());
    }

    #[test]
    fn genesis_conventions() {
        // First block within Δ of genesis: not a lagger, not a jumper.
        let s = species_times(&trace(&[0.5, 3.0], 10.0), 1.0);
        assert_eq!(s.laggers, vec![3.0]);
        assert_eq!(s.jumpers, vec![3.0]);
        assert!(s.double_laggers.is_empty());
    }

    #[test]
    fn sandwich_on_random_traces() {
        let params = ProtocolParams { alpha: 0.5, beta: 0.1, delta: 1.0 };
        let cfg = SimConfig::new(params, 400.0, 0.0, 1, 11).unwrap();
        for trial in 0..200 {
            let tr = generate_trace(&cfg, trial);
            let s = species_times(&tr, 1.0);
            // Loners are isolated in ±Δ, so consecutive ones are > Δ apart.
            assert!(s.loners.windows(2).all(|w| w[1] - w[0] > 1.0));
            for &(a, b) in &[(0.0, 400.0), (13.0, 250.0), (100.0, 101.0)] {
                let c = classify_species(&tr, 1.0, a, b).unwrap();
                assert!(c.loners <= c.laggers && c.laggers <= c.honest);
                assert!(c.double_laggers <= c.laggers && c.jumpers <= c.honest);
                assert!((c.loners as i64 - c.double_laggers as i64).abs() <= 1);
            }
        }
    }

    #[test]
    fn loner_rate() {
        // αΔ = 0.025 per unit; rate α e^{-2αΔ}.
        let params = ProtocolParams { alpha: 0.025, beta: 0.0, delta: 1.0 };
        let horizon = 4.0e6;
        let cfg = SimConfig::new(params, horizon, 0.0, 1, 5).unwrap();
        let tr = generate_trace(&cfg, 0);
        let y = species_times(&tr, 1.0).loners.len() as f64;
        let expected = 0.025 * (-0.05f64).exp() * horizon;
        assert!((y - expected).abs() < 3.0 * expected.sqrt(), "{y} vs {expected}");
    }

    #[test]
    fn jumper_gaps_are_shifted_exponentials() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (alpha, delta) = (0.2, 1.5);
        let gaps = jumper_gaps(alpha, delta, 100_000, &mut rng);
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let sd = (1.0 / alpha) / (gaps.len() as f64).sqrt();
        assert!((mean - (delta + 1.0 / alpha)).abs() < 3.0 * sd);
        let ks = ks_statistic(&gaps, |x| 1.0 - (-(alpha * (x - delta)).max(0.0)).exp());
        assert!(ks < ks_critical_1pct(gaps.len()), "{ks}");
    }

    #[test]
    fn double_lagger_mean_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gaps = double_lagger_gaps(0.1, 1.0, 200_000, &mut rng);
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let m = (0.2f64).exp() / 0.1;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
        let est = Estimate { value: mean, std_error: (var / gaps.len() as f64).sqrt(), samples: 0 };
        assert!((est.value - m).abs() < 3.0 * est.std_error, "{mean} vs {m}");
    }
}
