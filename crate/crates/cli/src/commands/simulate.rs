use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::{Duration, Instant};

use nakamoto_bounds::bounds::{
    delay_lower, delay_upper, double_lagger_mgf, lagger_mgf, postmine_gain_pmf, renewal_race_bound_min,
    zero_delay_lower, zero_delay_upper, Mgf, ProtocolParams, RaceSpec, DEFAULT_K_MAX, DEFAULT_N_MAX,
};
use nakamoto_bounds::simulator::{
    classify_species, empirical_postmine_pmf_until, estimate_race_loss_until, generate_trace, run_private_attack_until,
    run_trials, summarize_attacks, Estimate, SimConfig, SpeciesCounts, Stream,
};
use serde_json::{json, Value};

use super::params_fields;
use crate::args::{SimCommon, SimKind, SimulateArgs, StreamChoice};
use crate::output::{num, Output, Table};
use crate::{CliError, CliResult, Outcome};

/// How an empirical value should relate to its analytic counterpart.
#[derive(Clone, Copy)]
enum Relation {
    AtMost,
    AtLeast,
    Matches,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Matches => "~=",
        }
    }
}

/// Allowed discrepancy in standard errors.
const K_SE: f64 = 3.0;

struct Metric {
    name: String,
    empirical: Option<f64>,
    std_error: Option<f64>,
    analytic: Option<f64>,
    relation: Option<Relation>,
    ok: Option<bool>,
}

impl Metric {
    fn info(name: impl Into<String>, empirical: f64) -> Self {
        Metric { name: name.into(), empirical: Some(empirical), std_error: None, analytic: None, relation: None, ok: None }
    }

    /// A Monte Carlo proportion against an analytic value, judged with the
    /// null standard error so zero counts do not look exact.
    fn proportion(name: impl Into<String>, est: &Estimate, analytic: Option<f64>, relation: Relation) -> Self {
        let ok = analytic.filter(|_| est.samples > 0).map(|target| match relation {
            Relation::AtMost => est.at_most(target, K_SE),
            Relation::AtLeast => est.at_least(target, K_SE),
            Relation::Matches => est.consistent_with(target, K_SE),
        });
        Metric {
            name: name.into(),
            empirical: (est.samples > 0).then_some(est.value),
            std_error: (est.samples > 0).then_some(est.std_error),
            analytic,
            relation: analytic.map(|_| relation),
            ok,
        }
    }

    /// A sample mean with its own standard error against an exact value.
    fn mean(name: impl Into<String>, mean: f64, se: f64, analytic: f64) -> Self {
        let ok = mean.is_finite().then_some((mean - analytic).abs() <= K_SE * se);
        Metric {
            name: name.into(),
            empirical: Some(mean),
            std_error: Some(se),
            analytic: Some(analytic),
            relation: Some(Relation::Matches),
            ok,
        }
    }

    fn to_cells(&self) -> Vec<Value> {
        vec![
            json!(self.name),
            num(self.empirical),
            num(self.std_error),
            num(self.analytic),
            self.relation.map_or(Value::Null, |r| json!(r.symbol())),
            self.ok.map_or(Value::Null, |ok| json!(ok)),
        ]
    }
}

struct Campaign {
    kind: &'static str,
    params: ProtocolParams,
    requested: u64,
    run: u64,
    complete: bool,
    metrics: Vec<Metric>,
}

fn deadline(c: &SimCommon) -> Option<Instant> {
    c.max_seconds.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0)))
}

fn dump(path: Option<&Path>, cfg: &SimConfig) -> CliResult<()> {
    if let Some(path) = path {
        let mut w = BufWriter::new(File::create(path)?);
        generate_trace(cfg, 0).write_tsv(&mut w)?;
        std::io::Write::flush(&mut w)?;
    }
    Ok(())
}

fn positive_drift(p: &ProtocolParams) -> CliResult<f64> {
    if p.alpha > p.beta {
        Ok(p.alpha - p.beta)
    } else {
        Err(CliError::Infeasible(format!(
            "the honest rate {} must exceed the adversarial rate {} for the attack to terminate",
            p.alpha, p.beta
        )))
    }
}

pub fn simulate(a: &SimulateArgs, seed: u64) -> CliResult<Outcome> {
    let campaign = match &a.kind {
        SimKind::Attack { common, t, warmup, post } => attack(common, seed, *t, *warmup, *post)?,
        SimKind::Species { common, horizon } => species(common, seed, *horizon)?,
        SimKind::Race { common, stream, t, mu, nu, n, warmup, post } => {
            race(common, seed, *stream, *t, RaceShape { mu: *mu, nu: *nu, n: *n }, *warmup, *post)?
        }
        SimKind::Postmine { common, max_bin, horizon } => postmine(common, seed, *max_bin, *horizon)?,
    };
    let self_test = match &a.kind {
        SimKind::Attack { common, .. }
        | SimKind::Species { common, .. }
        | SimKind::Race { common, .. }
        | SimKind::Postmine { common, .. } => common.self_test,
    };
    Ok(report(campaign, seed, self_test))
}

fn report(c: Campaign, seed: u64, self_test: bool) -> Outcome {
    let mut table = Table::new(["name", "empirical", "std_error", "analytic", "relation", "ok", "trials_run", "complete"]);
    for m in &c.metrics {
        let mut cells = m.to_cells();
        cells.extend([json!(c.run), json!(c.complete)]);
        table.push(cells);
    }
    let json = json!({
        "simulation": c.kind,
        "seed": seed,
        "trials_requested": c.requested,
        "trials_run": c.run,
        "complete": c.complete,
        "params": Value::Object(params_fields(&c.params)),
        "metrics": table.to_json(),
    });
    let failed: Vec<&str> = c.metrics.iter().filter(|m| m.ok == Some(false)).map(|m| m.name.as_str()).collect();
    let failure = (self_test && !failed.is_empty()).then(|| format!("inconsistent metrics: {}", failed.join(", ")));
    Outcome { output: Output::Report { json, table }, failure }
}

fn attack(c: &SimCommon, seed: u64, t: f64, warmup: Option<f64>, post: Option<f64>) -> CliResult<Campaign> {
    let p = c.params.resolve()?;
    positive_drift(&p)?;
    let warmup = warmup.unwrap_or_else(|| SimConfig::default_warmup(&p));
    let post = post.unwrap_or_else(|| SimConfig::default_post_horizon(&p));
    let cfg = SimConfig::new(p, warmup + t + post, warmup, c.trials, seed)?;
    dump(c.dump_trace.as_deref(), &cfg)?;
    let (outcomes, complete) = run_private_attack_until(&cfg, t, post, deadline(c));
    let s = summarize_attacks(&outcomes);
    let (lower, upper) = if p.delta == 0.0 {
        (zero_delay_lower(&p, t, DEFAULT_K_MAX)?, zero_delay_upper(&p, t)?)
    } else {
        (delay_lower(&p, t, DEFAULT_N_MAX, DEFAULT_K_MAX)?, delay_upper(&p, t)?)
    };
    let (lk, uk) = if p.delta == 0.0 { ("zero-delay-lower", "zero-delay-upper") } else { ("delay-lower", "delay-upper") };
    let mut metrics = vec![
        Metric::proportion(format!("attack_success vs {lk}"), &s.success, Some(lower.probability), Relation::AtLeast),
        Metric::proportion(format!("attack_success vs {uk}"), &s.success, Some(upper.probability), Relation::AtMost),
    ];
    if !outcomes.is_empty() {
        metrics.push(Metric::info("mean_premine_gain", s.mean_premine_gain));
        metrics.push(Metric::info("mean_postmine_gain", s.mean_postmine_gain));
    }
    Ok(Campaign { kind: "attack", params: p, requested: c.trials, run: outcomes.len() as u64, complete, metrics })
}

fn species(c: &SimCommon, seed: u64, horizon: Option<f64>) -> CliResult<Campaign> {
    let p = c.params.resolve()?;
    if p.delta <= 0.0 {
        return Err(CliError::Input("block species need a positive --delta".into()));
    }
    let horizon = horizon.unwrap_or(1e4 / p.alpha);
    // Skip the start, where genesis stands in for an unobserved past, and
    // the end, where a block cannot yet be confirmed as a loner.
    let (from, to) = (3.0 * p.delta, horizon - p.delta);
    if to <= from {
        return Err(CliError::Input(format!("horizon {horizon} s is too short for delta {} s", p.delta)));
    }
    let cfg = SimConfig::new(p, horizon, 0.0, c.trials, seed)?;
    dump(c.dump_trace.as_deref(), &cfg)?;
    let (counts, complete) = run_trials(cfg.trials, deadline(c), |i| classify_species(&generate_trace(&cfg, i), p.delta, from, to));
    let counts = counts.into_iter().collect::<Result<Vec<_>, _>>()?;
    let span = to - from;
    let (a, d) = (p.alpha, p.delta);
    type Count = fn(&SpeciesCounts) -> u64;
    let expected: [(&str, f64, Count); 6] = [
        ("honest_rate", a, |s| s.honest),
        ("adversarial_rate", p.beta, |s| s.adversarial),
        ("lagger_rate", a * (-a * d).exp(), |s| s.laggers),
        ("loner_rate", a * (-2.0 * a * d).exp(), |s| s.loners),
        ("double_lagger_rate", a * (-2.0 * a * d).exp(), |s| s.double_laggers),
        ("jumper_rate", 1.0 / (d + 1.0 / a), |s| s.jumpers),
    ];
    let n = counts.len() as f64;
    let metrics = if counts.len() < 2 {
        Vec::new()
    } else {
        expected
            .iter()
            .map(|&(name, rate, field)| {
                let xs: Vec<f64> = counts.iter().map(|s| field(s) as f64 / span).collect();
                let mean = xs.iter().sum::<f64>() / n;
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
                Metric::mean(name, mean, (var / n).sqrt(), rate)
            })
            .collect()
    };
    Ok(Campaign { kind: "species", params: p, requested: c.trials, run: counts.len() as u64, complete, metrics })
}

struct RaceShape {
    mu: f64,
    nu: f64,
    n: u64,
}

/// Inter-arrival MGF of `stream` in delay units, if it is a renewal process
/// with a closed form.
fn stream_mgf(stream: StreamChoice, alpha_norm: f64) -> nakamoto_bounds::Result<Option<Mgf>> {
    Ok(match stream {
        StreamChoice::Honest => Some(Mgf::exponential(alpha_norm)?),
        StreamChoice::Lagger => Some(lagger_mgf(alpha_norm)?),
        StreamChoice::DoubleLagger => Some(double_lagger_mgf(alpha_norm)?),
        StreamChoice::Jumper => Some(Mgf::shifted_exponential(1.0, alpha_norm)?),
        StreamChoice::Loner => None,
    })
}

fn race(
    c: &SimCommon,
    seed: u64,
    stream: StreamChoice,
    t: f64,
    shape: RaceShape,
    warmup: Option<f64>,
    post: Option<f64>,
) -> CliResult<Campaign> {
    let p = c.params.resolve()?;
    if p.delta <= 0.0 {
        return Err(CliError::Input("races are measured in delay bounds and need a positive --delta".into()));
    }
    positive_drift(&p)?;
    let spec = RaceSpec::new(shape.mu, shape.nu, shape.n, t / p.delta)?;
    let warmup = warmup.unwrap_or_else(|| SimConfig::default_warmup(&p));
    let post = post.unwrap_or_else(|| SimConfig::default_post_horizon(&p)).max(2.0 * shape.nu * p.delta);
    let cfg = SimConfig::new(p, warmup + t + post, warmup, c.trials, seed)?;
    dump(c.dump_trace.as_deref(), &cfg)?;
    let (est, complete) = estimate_race_loss_until(&cfg, &spec, Stream::from(stream), deadline(c))?;
    let (a_norm, b_norm) = p.normalized();
    let bound = match stream_mgf(stream, a_norm)? {
        Some(mgf) => Some(renewal_race_bound_min(&mgf, b_norm, &spec)?.probability),
        None => None,
    };
    let run = est.samples;
    let metrics = vec![Metric::proportion("race_loss vs renewal-race-bound", &est, bound, Relation::AtMost)];
    Ok(Campaign { kind: "race", params: p, requested: c.trials, run, complete, metrics })
}

fn postmine(c: &SimCommon, seed: u64, max_bin: usize, horizon: Option<f64>) -> CliResult<Campaign> {
    let p = c.params.resolve()?;
    let drift = positive_drift(&p)?;
    let horizon = horizon.unwrap_or(400.0 / drift);
    let cfg = SimConfig::new(p, horizon, 0.0, c.trials, seed)?;
    dump(c.dump_trace.as_deref(), &cfg)?;
    let (table, complete) = empirical_postmine_pmf_until(&cfg, max_bin, deadline(c));
    let q: Vec<f64> = if p.delta == 0.0 {
        let r = p.beta / p.alpha;
        (0..=max_bin).map(|k| (1.0 - r) * r.powi(k as i32)).collect()
    } else {
        let (q, _) = postmine_gain_pmf(&p, DEFAULT_N_MAX.max(max_bin + 1))?;
        q.into_iter().take(max_bin + 1).collect()
    };
    let mut metrics: Vec<Metric> = q
        .iter()
        .enumerate()
        .map(|(k, &qk)| Metric::proportion(format!("P(N={k})"), &table.estimate(k), Some(qk), Relation::Matches))
        .collect();
    let tail = (1.0 - q.iter().sum::<f64>()).max(0.0);
    metrics.push(Metric::proportion(
        format!("P(N>{max_bin})"),
        &table.estimate(max_bin + 1),
        Some(tail),
        Relation::Matches,
    ));
    Ok(Campaign { kind: "postmine", params: p, requested: c.trials, run: table.trials, complete, metrics })
}
