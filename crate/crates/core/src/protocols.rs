//! Deployed-protocol parameters: block-size delay model, throughput, fault
//! tolerance, and a cross-protocol comparison table.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{invert_latency, ProtocolParams, UpperBound};
use crate::roots::bisect;

/// Linear propagation-delay model `Δ = a·S + b` for a block of `S` KB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayModel {
    #[serde(rename = "a_s_per_kb")]
    pub a: f64,
    #[serde(rename = "b_s")]
    pub b: f64,
}

impl Default for DelayModel {
    /// Fit to measured Bitcoin propagation: 10 s for a 1 MB block.
    fn default() -> Self {
        DelayModel { a: 0.0098, b: 0.208 }
    }
}

pub fn delay_from_size(model: &DelayModel, size_kb: f64) -> f64 {
    model.a * size_kb + model.b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub name: String,
    pub block_size_kb: f64,
    /// Total (honest plus adversarial) block rate.
    pub blocks_per_hour: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_override_s: Option<f64>,
}

impl ProtocolSpec {
    pub fn delay(&self, model: &DelayModel) -> f64 {
        self.delay_override_s
            .unwrap_or_else(|| delay_from_size(model, self.block_size_kb))
    }

    pub fn total_rate(&self) -> f64 {
        self.blocks_per_hour / 3600.0
    }

    /// Rates and delay with the adversary holding `fraction` of the power.
    pub fn params(&self, model: &DelayModel, fraction: f64) -> crate::Result<ProtocolParams> {
        ProtocolParams::from_total_rate(self.total_rate(), fraction, self.delay(model))
    }
}

/// Throughput in KB per second when every block is full.
pub fn throughput(spec: &ProtocolSpec) -> f64 {
    spec.block_size_kb * spec.blocks_per_hour / 3600.0
}

/// Condition an adversarial fraction must satisfy to be tolerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultCriterion {
    /// `β < α e^{−2αΔ}`: the adversary is slower than the loners.
    LonerRate,
    /// `β/α < 1/(1 + αΔ)`.
    Ultimate,
    /// `β/α < 1/(1 + (α + β)Δ)`, the same condition with the total rate in
    /// the delay term.
    UltimateTotalRate,
}

/// The two criteria stated as such; [`FaultCriterion::UltimateTotalRate`] is
/// the variant that matches the published column.
pub const STATED_CRITERIA: [FaultCriterion; 2] = [FaultCriterion::LonerRate, FaultCriterion::Ultimate];

impl FaultCriterion {
    pub const ALL: [FaultCriterion; 3] =
        [FaultCriterion::LonerRate, FaultCriterion::Ultimate, FaultCriterion::UltimateTotalRate];

    /// Negative exactly when fraction `f` of total rate `total` is tolerated.
    fn margin(self, f: f64, total: f64, delta: f64) -> f64 {
        let (alpha, beta) = ((1.0 - f) * total, f * total);
        match self {
            FaultCriterion::LonerRate => beta - alpha * (-2.0 * alpha * delta).exp(),
            FaultCriterion::Ultimate => beta / alpha - 1.0 / (1.0 + alpha * delta),
            FaultCriterion::UltimateTotalRate => beta / alpha - 1.0 / (1.0 + total * delta),
        }
    }
}

/// Largest adversarial fraction of the protocol's total mining power that
/// `criterion` tolerates.
pub fn fault_tolerance(spec: &ProtocolSpec, model: &DelayModel, criterion: FaultCriterion) -> f64 {
    let (total, delta) = (spec.total_rate(), spec.delay(model));
    let h = |f: f64| criterion.margin(f, total, delta);
    if h(0.5) <= 0.0 {
        return 0.5;
    }
    bisect(h, 0.0, 0.5).expect("margin is negative at f = 0 and positive at f = 1/2")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultTolerances {
    pub loner_rate: f64,
    pub ultimate: f64,
    pub ultimate_total_rate: f64,
}

impl FaultTolerances {
    pub fn get(&self, c: FaultCriterion) -> f64 {
        match c {
            FaultCriterion::LonerRate => self.loner_rate,
            FaultCriterion::Ultimate => self.ultimate,
            FaultCriterion::UltimateTotalRate => self.ultimate_total_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub name: String,
    pub block_size_kb: f64,
    pub blocks_per_hour: f64,
    pub delay_s: f64,
    /// Confirmation latency per requested level, seconds; `None` when the
    /// parameters are infeasible.
    pub latency_s: Vec<Option<u64>>,
    pub throughput_kb_s: f64,
    pub fault_tolerance: FaultTolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One row per spec, computed in parallel and returned in input order.
pub fn build_comparison_table(
    specs: &[ProtocolSpec],
    model: &DelayModel,
    adversary_fraction: f64,
    levels: &[f64],
) -> Vec<TableRow> {
    specs
        .par_iter()
        .map(|spec| {
            let mut note = None;
            let latency_s = levels
                .iter()
                .map(|&eps| {
                    let r = spec
                        .params(model, adversary_fraction)
                        .and_then(|p| invert_latency(UpperBound::Delay, &p, eps));
                    r.map_err(|e| note = Some(e.to_string())).ok()
                })
                .collect();
            TableRow {
                name: spec.name.clone(),
                block_size_kb: spec.block_size_kb,
                blocks_per_hour: spec.blocks_per_hour,
                delay_s: spec.delay(model),
                latency_s,
                throughput_kb_s: throughput(spec),
                fault_tolerance: FaultTolerances {
                    loner_rate: fault_tolerance(spec, model, FaultCriterion::LonerRate),
                    ultimate: fault_tolerance(spec, model, FaultCriterion::Ultimate),
                    ultimate_total_rate: fault_tolerance(spec, model, FaultCriterion::UltimateTotalRate),
                },
                note,
            }
        })
        .collect()
}

/// Protocol list plus delay model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    #[serde(default)]
    pub delay_model: DelayModel,
    pub protocols: Vec<ProtocolSpec>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    List(Vec<ProtocolSpec>),
    Full(ProtocolConfig),
}

/// Parses either a bare JSON array of protocols (default delay model) or an
/// object `{"delay_model": {...}, "protocols": [...]}`.
pub fn parse_config(json: &str) -> Result<ProtocolConfig, serde_json::Error> {
    // Untagged enums swallow field names in errors; parse by shape instead.
    let value: serde_json::Value = serde_json::from_str(json)?;
    let file = if value.is_array() {
        ConfigFile::List(serde_json::from_value(value)?)
    } else {
        ConfigFile::Full(serde_json::from_value(value)?)
    };
    Ok(match file {
        ConfigFile::List(protocols) => ProtocolConfig { delay_model: DelayModel::default(), protocols },
        ConfigFile::Full(c) => c,
    })
}

pub const DEFAULT_CONFIG_JSON: &str = include_str!("../data/protocols.json");

pub fn default_config() -> ProtocolConfig {
    parse_config(DEFAULT_CONFIG_JSON).expect("bundled config is valid")
}

/// Security levels of the published comparison.
pub const TABLE_LEVELS: [f64; 3] = [1e-3, 1e-6, 1e-9];

/// Adversarial share used in the published comparison.
pub const TABLE_ADVERSARY_FRACTION: f64 = 0.25;

/// A published row: name, delay (s), latencies (s) at [`TABLE_LEVELS`],
/// throughput (KB/s), fault tolerance (fraction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expected {
    pub name: &'static str,
    pub delay_s: f64,
    pub latency_s: [u64; 3],
    pub throughput_kb_s: f64,
    pub fault_tolerance: f64,
}

const fn hm(h: u64, m: u64) -> u64 {
    h * 3600 + m * 60
}

pub const PUBLISHED_TABLE: [Expected; 6] = [
    Expected { name: "Bitcoin", delay_s: 10.0, latency_s: [hm(11, 39), hm(20, 40), hm(29, 40)], throughput_kb_s: 1.7, fault_tolerance: 0.497 },
    Expected { name: "BCH", delay_s: 78.5, latency_s: [hm(16, 55), hm(29, 59), hm(43, 3)], throughput_kb_s: 13.3, fault_tolerance: 0.469 },
    Expected { name: "Litecoin", delay_s: 10.0, latency_s: [hm(3, 24), hm(6, 2), hm(8, 39)], throughput_kb_s: 6.7, fault_tolerance: 0.484 },
    Expected { name: "Dogecoin", delay_s: 10.0, latency_s: [hm(1, 56), hm(3, 26), hm(4, 56)], throughput_kb_s: 16.6, fault_tolerance: 0.462 },
    Expected { name: "Zcash", delay_s: 19.8, latency_s: [hm(3, 40), hm(6, 32), hm(9, 23)], throughput_kb_s: 26.7, fault_tolerance: 0.442 },
    Expected { name: "Ethereum", delay_s: 2.0, latency_s: [hm(0, 26), hm(0, 46), hm(1, 6)], throughput_kb_s: 12.2, fault_tolerance: 0.469 },
];

/// Mismatches of `rows` against [`PUBLISHED_TABLE`]: latency and delay
/// within 5% relative, throughput within 2%, and fault tolerance within half
/// a percentage point under at least one of `criteria`.
pub fn check_against_published(rows: &[TableRow], criteria: &[FaultCriterion]) -> Vec<String> {
    let mut problems = Vec::new();
    let rel = |got: f64, want: f64| (got - want).abs() / want;
    for want in &PUBLISHED_TABLE {
        let Some(row) = rows.iter().find(|r| r.name == want.name) else {
            problems.push(format!("{}: row missing", want.name));
            continue;
        };
        if rel(row.delay_s, want.delay_s) > 0.05 {
            problems.push(format!("{}: delay {:.2} s vs {}", want.name, row.delay_s, want.delay_s));
        }
        for (i, &w) in want.latency_s.iter().enumerate() {
            match row.latency_s.get(i).copied().flatten() {
                Some(got) if rel(got as f64, w as f64) <= 0.05 => {}
                got => problems.push(format!("{}: latency[{i}] {got:?} s vs {w} s", want.name)),
            }
        }
        if rel(row.throughput_kb_s, want.throughput_kb_s) > 0.02 {
            problems.push(format!(
                "{}: throughput {:.3} vs {}",
                want.name, row.throughput_kb_s, want.throughput_kb_s
            ));
        }
        let ft_ok = criteria
            .iter()
            .any(|&c| (row.fault_tolerance.get(c) - want.fault_tolerance).abs() <= 0.005);
        if !ft_ok {
            let got: Vec<String> =
                criteria.iter().map(|&c| format!("{:.4} ({c:?})", row.fault_tolerance.get(c))).collect();
            problems.push(format!(
                "{}: fault tolerance {} vs {}",
                want.name,
                got.join(", "),
                want.fault_tolerance
            ));
        }
    }
    problems
}
