use nakamoto_bounds::bounds::{BoundKind, ProtocolParams};
use nakamoto_bounds::protocols::{delay_from_size, DelayModel};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::latency_for;
use crate::args::{SweepArgs, Vary};
use crate::output::{num, Output, Table};
use crate::units::{parse_grid, parse_number, parse_time};
use crate::{CliError, CliResult};

/// Log-spaced block rates searched in throughput sweeps.
const RATE_POINTS: usize = 96;
/// Extra evaluations between the two neighbours of the coarse optimum.
const RATE_REFINE: usize = 24;

pub fn sweep(a: &SweepArgs) -> CliResult<Output> {
    let grid = match a.vary {
        Vary::Latency => parse_grid(&a.grid, parse_time),
        _ => parse_grid(&a.grid, parse_number),
    }
    .map_err(CliError::Input)?;
    if a.vary != Vary::Latency && grid[0] <= 0.0 {
        return Err(CliError::Input(format!("{:?} grid values must be positive", a.vary).to_lowercase()));
    }
    let deltas = match (&a.deltas, a.vary) {
        (Some(_), Vary::Throughput) => {
            return Err(CliError::Input("--deltas does not apply to throughput sweeps; the delay follows block size".into()))
        }
        (Some(d), _) => d.clone(),
        (None, _) => vec![a.params.delta],
    };
    if a.vary == Vary::Throughput && !(a.min_rate > 0.0 && a.min_rate < a.max_rate) {
        return Err(CliError::Input("--min-rate must be positive and below --max-rate".into()));
    }
    // Validate the fixed parameters once so that a bad flag is an input
    // error rather than a column of empty cells.
    for &d in &deltas {
        a.params.resolve_with_delta(d)?;
    }
    let model = DelayModel { a: a.delay_a, b: a.delay_b };
    let columns: Vec<(f64, BoundKind)> =
        deltas.iter().flat_map(|&d| a.outputs.iter().map(move |o| (d, o.resolve(d)))).collect();
    let mut names = vec!["x".to_string()];
    for &(d, kind) in &columns {
        names.push(if deltas.len() > 1 { format!("{}@{}s", kind.name(), d) } else { kind.name().to_string() });
    }
    let rows: Vec<Vec<Value>> = grid
        .par_iter()
        .map(|&x| {
            let mut row = vec![json!(x)];
            row.extend(columns.iter().map(|&(d, kind)| cell(a, &model, x, d, kind)));
            row
        })
        .collect();
    let mut table = Table::new(names);
    for r in rows {
        table.push(r);
    }
    Ok(Output::Table(table))
}

fn cell(a: &SweepArgs, model: &DelayModel, x: f64, delta: f64, kind: BoundKind) -> Value {
    match a.vary {
        Vary::Latency => {
            let r = a.params.resolve_with_delta(delta).ok().and_then(|p| kind.evaluate(&p, x).ok());
            num(r.map(|r| r.probability))
        }
        Vary::Rate => {
            let t = rate_params(a, x, delta).and_then(|p| latency_for(kind, &p, a.level).ok());
            t.map_or(Value::Null, |t| json!(t))
        }
        Vary::Throughput => best_latency(a, model, x, kind).map_or(Value::Null, |t| json!(t)),
    }
}

fn rate_params(a: &SweepArgs, blocks_per_hour: f64, delta: f64) -> Option<ProtocolParams> {
    let f = a.params.adversary_fraction();
    ProtocolParams::from_total_rate(blocks_per_hour / 3600.0, f, delta).ok()
}

/// Smallest latency over block rates in `[min_rate, max_rate]` at a fixed
/// throughput `x` KB/s: blocks of `x/rate` KB whose delay follows `model`.
fn best_latency(a: &SweepArgs, model: &DelayModel, x: f64, kind: BoundKind) -> Option<u64> {
    let at = |rate: f64| {
        let delta = delay_from_size(model, x / rate);
        rate_params(a, rate * 3600.0, delta).and_then(|p| latency_for(kind, &p, a.level).ok())
    };
    let (lo, hi, n) = (a.min_rate, a.max_rate, RATE_POINTS);
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    let rates: Vec<f64> = (0..n).map(|i| lo * ratio.powi(i as i32)).collect();
    let coarse: Vec<Option<u64>> = rates.iter().map(|&r| at(r)).collect();
    let (i, best) = coarse.iter().enumerate().filter_map(|(i, t)| t.map(|t| (i, t))).min_by_key(|&(_, t)| t)?;
    let from = rates[i.saturating_sub(1)];
    let to = rates[(i + 1).min(n - 1)];
    let step = (to / from).powf(1.0 / (RATE_REFINE + 1) as f64);
    let refined = (1..=RATE_REFINE).filter_map(|k| at(from * step.powi(k as i32))).min();
    Some(refined.map_or(best, |r| r.min(best)))
}
