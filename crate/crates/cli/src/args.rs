use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nakamoto_bounds::bounds::{BoundKind, ProtocolParams};
use nakamoto_bounds::protocols::FaultCriterion;
use nakamoto_bounds::simulator::Stream;

use crate::output::Format;
use crate::units::*;
use crate::{CliError, CliResult};

/// Latency–security bounds for longest-chain proof-of-work consensus.
///
/// Rates accept `N/hour`, `N/min`, `N/sec` or `A/B` (A blocks per B
/// seconds); durations accept `3600`, `90s`, `45m`, `4h`, `2h30m`, `1d`.
#[derive(Debug, Parser)]
#[command(name = "nakamoto", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format [default: json, or csv for sweep and protocol-table].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Master seed for simulations.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound at a confirmation latency.
    Bound(BoundArgs),
    /// Latency (and confirmation depth) achieving a security level.
    Latency(LatencyArgs),
    /// Tabulate bounds or latencies over a grid.
    Sweep(SweepArgs),
    /// Run a Monte Carlo campaign next to the matching analytic bounds.
    Simulate(SimulateArgs),
    /// Latency, throughput and fault tolerance of deployed protocols.
    ProtocolTable(TableArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Combined honest and adversarial block rate.
    #[arg(long, default_value = "6/hour", value_parser = parse_rate)]
    pub total_rate: f64,

    /// Honest share of the mining power.
    #[arg(long, value_parser = parse_fraction, conflicts_with = "beta_frac")]
    pub alpha_frac: Option<f64>,

    /// Adversarial share of the mining power [default: 0.25].
    #[arg(long, value_parser = parse_fraction)]
    pub beta_frac: Option<f64>,

    /// Honest rate; overrides --total-rate and the shares.
    #[arg(long, value_parser = parse_rate, requires = "beta")]
    pub alpha: Option<f64>,

    /// Adversarial rate; used together with --alpha.
    #[arg(long, value_parser = parse_rate, requires = "alpha")]
    pub beta: Option<f64>,

    /// Upper bound on block propagation delay.
    #[arg(long, default_value = "10s", value_parser = parse_time)]
    pub delta: f64,

    /// Honest blocks per delay bound, αΔ; sets the honest rate, the
    /// adversary keeps its share.
    #[arg(long, value_parser = parse_number, conflicts_with_all = ["alpha", "beta"])]
    pub alpha_delta: Option<f64>,
}

impl ParamArgs {
    pub fn adversary_fraction(&self) -> f64 {
        match (self.beta_frac, self.alpha_frac) {
            (Some(b), _) => b,
            (None, Some(a)) => 1.0 - a,
            (None, None) => 0.25,
        }
    }

    pub fn resolve(&self) -> CliResult<ProtocolParams> {
        self.resolve_with_delta(self.delta)
    }

    pub fn resolve_with_delta(&self, delta: f64) -> CliResult<ProtocolParams> {
        if let (Some(a), Some(b)) = (self.alpha, self.beta) {
            return Ok(ProtocolParams::new(a, b, delta)?);
        }
        let f = self.adversary_fraction();
        if f >= 1.0 {
            return Err(CliError::Input("the adversary cannot hold all of the mining power".into()));
        }
        match self.alpha_delta {
            Some(x) => {
                if delta <= 0.0 {
                    return Err(CliError::Input("--alpha-delta needs a positive --delta".into()));
                }
                let alpha = x / delta;
                Ok(ProtocolParams::new(alpha, alpha * f / (1.0 - f), delta)?)
            }
            None => Ok(ProtocolParams::from_total_rate(self.total_rate, f, delta)?),
        }
    }
}

/// Bound selectors; `upper`, `lower` and `upper-universal` pick the
/// zero-delay forms when `--delta 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundChoice {
    Upper,
    Lower,
    UpperUniversal,
    ZeroDelayUpper,
    ZeroDelayLower,
    DelayUpper,
    DelayUpperUniversal,
    DelayLower,
}

impl BoundChoice {
    pub fn resolve(self, delta: f64) -> BoundKind {
        let zero = delta == 0.0;
        match self {
            BoundChoice::Upper | BoundChoice::UpperUniversal if zero => BoundKind::ZeroDelayUpper,
            BoundChoice::Lower if zero => BoundKind::ZeroDelayLower,
            BoundChoice::Upper | BoundChoice::DelayUpper => BoundKind::DelayUpper,
            BoundChoice::UpperUniversal | BoundChoice::DelayUpperUniversal => BoundKind::DelayUpperUniversal,
            BoundChoice::Lower | BoundChoice::DelayLower => BoundKind::DelayLower,
            BoundChoice::ZeroDelayUpper => BoundKind::ZeroDelayUpper,
            BoundChoice::ZeroDelayLower => BoundKind::ZeroDelayLower,
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub kind: BoundChoice,

    /// Confirmation latency.
    #[arg(long, value_parser = parse_time)]
    pub t: f64,

    #[command(flatten)]
    pub params: ParamArgs,

    /// Terms kept in the post-mining gain series (delay lower bound).
    #[arg(long, default_value_t = nakamoto_bounds::bounds::DEFAULT_N_MAX)]
    pub n_max: usize,

    /// Terms kept in the sum over the adversary's lead (lower bounds).
    #[arg(long, default_value_t = nakamoto_bounds::bounds::DEFAULT_K_MAX)]
    pub k_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatencyBound {
    /// Zero-delay bound when `--delta 0`, the optimized delay bound otherwise.
    Auto,
    Delay,
    Universal,
    Zero,
}

#[derive(Debug, Args)]
pub struct LatencyArgs {
    /// Target security level (probability of a reverted confirmation).
    #[arg(long, value_parser = parse_probability)]
    pub level: f64,

    #[arg(long, value_enum, default_value_t = LatencyBound::Auto)]
    pub bound: LatencyBound,

    /// Share of the level given to the time bound when converting to a
    /// block depth; the rest covers blocks arriving faster than expected.
    #[arg(long, default_value_t = 0.5, value_parser = parse_split)]
    pub split: f64,

    #[command(flatten)]
    pub params: ParamArgs,
}

fn parse_split(s: &str) -> Result<f64, String> {
    let x = parse_number(s)?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("split {s:?} must lie in (0, 1)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    /// Grid of latencies; columns are probabilities.
    Latency,
    /// Grid of total block rates (blocks/hour); columns are latencies (s).
    Rate,
    /// Grid of throughputs (KB/s); columns are the smallest latency (s)
    /// over block rates, with the delay set by block size.
    Throughput,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub vary: Vary,

    /// `a,b,c` or `start:stop:step`; durations for latency, numbers
    /// otherwise.
    #[arg(long)]
    pub grid: String,

    /// Bound columns.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "upper")]
    pub outputs: Vec<BoundChoice>,

    /// Security level for latency columns.
    #[arg(long, default_value = "1e-9", value_parser = parse_probability)]
    pub level: f64,

    /// Several delay bounds, one column group each (rate sweeps).
    #[arg(long, value_delimiter = ',', value_parser = parse_time)]
    pub deltas: Option<Vec<f64>>,

    /// Slowest block rate searched in throughput sweeps.
    #[arg(long, default_value = "6/hour", value_parser = parse_rate)]
    pub min_rate: f64,

    /// Fastest block rate searched in throughput sweeps.
    #[arg(long, default_value = "600/hour", value_parser = parse_rate)]
    pub max_rate: f64,

    /// Delay model slope, seconds per KB (throughput sweeps).
    #[arg(long, default_value_t = 0.0098)]
    pub delay_a: f64,

    /// Delay model intercept, seconds (throughput sweeps).
    #[arg(long, default_value_t = 0.208)]
    pub delay_b: f64,

    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub kind: SimKind,
}

#[derive(Debug, Clone, Args)]
pub struct SimCommon {
    #[command(flatten)]
    pub params: ParamArgs,

    /// Number of independent trials.
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    pub trials: u64,

    /// Wall-clock budget; the report is flagged incomplete if it runs out.
    #[arg(long, value_parser = parse_number)]
    pub max_seconds: Option<f64>,

    /// Exit with status 4 if an empirical value is inconsistent with the
    /// analytic bound beside it by more than 3 standard errors.
    #[arg(long)]
    pub self_test: bool,

    /// Write the first trial's trace as `time<TAB>kind` lines.
    #[arg(long, value_name = "FILE")]
    pub dump_trace: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SimKind {
    /// The private attack against a block confirmed after `--t`.
    Attack {
        #[command(flatten)]
        common: SimCommon,
        #[arg(long, value_parser = parse_time)]
        t: f64,
        /// Pre-mining time before the confirmation window [default: 50/(α−β)].
        #[arg(long, value_parser = parse_time)]
        warmup: Option<f64>,
        /// Simulated time after the window [default: 20/(α−β)].
        #[arg(long, value_parser = parse_time)]
        post: Option<f64>,
    },
    /// Block species arrival rates.
    Species {
        #[command(flatten)]
        common: SimCommon,
        /// Length of each trace [default: 10^4 honest inter-block times].
        #[arg(long, value_parser = parse_time)]
        horizon: Option<f64>,
    },
    /// Race of one honest block species against the adversary.
    Race {
        #[command(flatten)]
        common: SimCommon,
        #[arg(long, value_enum, default_value_t = StreamChoice::DoubleLagger)]
        stream: StreamChoice,
        /// Window length `t`.
        #[arg(long, default_value = "2h", value_parser = parse_time)]
        t: f64,
        /// Widening before the window, in delay bounds.
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        /// Widening after the window, in delay bounds.
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        /// Allowance `n` in the race.
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, value_parser = parse_time)]
        warmup: Option<f64>,
        #[arg(long, value_parser = parse_time)]
        post: Option<f64>,
    },
    /// Post-mining gain distribution.
    Postmine {
        #[command(flatten)]
        common: SimCommon,
        /// Largest bin reported separately.
        #[arg(long, default_value_t = 10)]
        max_bin: usize,
        /// Race length [default: 400/(α−β)].
        #[arg(long, value_parser = parse_time)]
        horizon: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StreamChoice {
    Honest,
    Lagger,
    Loner,
    DoubleLagger,
    Jumper,
}

impl From<StreamChoice> for Stream {
    fn from(s: StreamChoice) -> Self {
        match s {
            StreamChoice::Honest => Stream::Honest,
            StreamChoice::Lagger => Stream::Lagger,
            StreamChoice::Loner => Stream::Loner,
            StreamChoice::DoubleLagger => Stream::DoubleLagger,
            StreamChoice::Jumper => Stream::Jumper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionChoice {
    LonerRate,
    Ultimate,
    UltimateTotalRate,
}

impl From<CriterionChoice> for FaultCriterion {
    fn from(c: CriterionChoice) -> Self {
        match c {
            CriterionChoice::LonerRate => FaultCriterion::LonerRate,
            CriterionChoice::Ultimate => FaultCriterion::Ultimate,
            CriterionChoice::UltimateTotalRate => FaultCriterion::UltimateTotalRate,
        }
    }
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Protocol list (JSON); the built-in six protocols if omitted.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, default_value_t = 0.25, value_parser = parse_fraction)]
    pub adversary_frac: f64,

    #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-6,1e-9", value_parser = parse_probability)]
    pub levels: Vec<f64>,

    /// Compare against the published figures; exit 4 on a mismatch.
    #[arg(long)]
    pub check: bool,

    /// Fault-tolerance criteria accepted by --check (any one may match).
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "loner-rate,ultimate,ultimate-total-rate"
    )]
    pub criteria: Vec<CriterionChoice>,
}
