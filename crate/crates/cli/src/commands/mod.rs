mod simulate;
mod sweep;
mod table;

pub use simulate::simulate;
pub use sweep::sweep;
pub use table::protocol_table;

use nakamoto_bounds::bounds::{
    delay_lower, depth_from_time, invert, invert_latency, zero_delay_lower, BoundKind, ProtocolParams, UpperBound,
};
use serde_json::{json, Map, Value};

use crate::args::{BoundArgs, LatencyArgs, LatencyBound};
use crate::output::{num, Output};
use crate::CliResult;

fn params_fields(p: &ProtocolParams) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("alpha".into(), json!(p.alpha));
    m.insert("beta".into(), json!(p.beta));
    m.insert("delta".into(), json!(p.delta));
    m
}

pub fn bound(a: &BoundArgs) -> CliResult<Output> {
    let p = a.params.resolve()?;
    let kind = a.kind.resolve(p.delta);
    let r = match kind {
        BoundKind::ZeroDelayLower => zero_delay_lower(&p, a.t, a.k_max)?,
        BoundKind::DelayLower => delay_lower(&p, a.t, a.n_max, a.k_max)?,
        k => k.evaluate(&p, a.t)?,
    };
    let mut m = Map::new();
    m.insert("bound_kind".into(), json!(kind.name()));
    m.insert("probability".into(), json!(r.probability));
    m.insert("raw_value".into(), num(Some(r.raw_value)));
    m.insert("optimizer_v".into(), num(r.optimizer_v));
    m.insert("theta".into(), num(r.theta));
    m.insert("truncation_tail".into(), num(r.truncation_tail));
    m.insert("t_seconds".into(), json!(a.t));
    m.extend(params_fields(&p));
    Ok(Output::Record(m))
}

/// Smallest whole-second latency at which `kind` falls to `level`. For a
/// lower bound this is a wait no confirmation rule can undercut.
pub(crate) fn latency_for(kind: BoundKind, p: &ProtocolParams, level: f64) -> nakamoto_bounds::Result<u64> {
    match kind {
        BoundKind::ZeroDelayUpper => invert_latency(UpperBound::ZeroDelay, p, level),
        BoundKind::DelayUpper => invert_latency(UpperBound::Delay, p, level),
        BoundKind::DelayUpperUniversal => invert_latency(UpperBound::DelayUniversal, p, level),
        lower => invert(|t| Ok(lower.evaluate(p, t)?.probability), level),
    }
}

pub fn latency(a: &LatencyArgs) -> CliResult<Output> {
    let p = a.params.resolve()?;
    let kind = match a.bound {
        LatencyBound::Auto if p.delta == 0.0 => BoundKind::ZeroDelayUpper,
        LatencyBound::Auto | LatencyBound::Delay => BoundKind::DelayUpper,
        LatencyBound::Universal => BoundKind::DelayUpperUniversal,
        LatencyBound::Zero => BoundKind::ZeroDelayUpper,
    };
    let t = latency_for(kind, &p, a.level)?;
    // Depth: wait out the time bound at split·ε, then cover the chance that
    // that many blocks arrive sooner with the remaining (1 − split)·ε.
    let (time_level, conversion_level) = (a.split * a.level, (1.0 - a.split) * a.level);
    let tau = latency_for(kind, &p, time_level)?;
    let depth = depth_from_time(&p, tau as f64, conversion_level)?;
    let mut m = Map::new();
    m.insert("bound_kind".into(), json!(kind.name()));
    m.insert("level".into(), json!(a.level));
    m.insert("t_seconds".into(), json!(t));
    m.insert("depth_blocks".into(), json!(depth));
    m.insert("split".into(), json!(a.split));
    m.insert("depth_time_level".into(), json!(time_level));
    m.insert("depth_time_seconds".into(), json!(tau));
    m.insert("depth_conversion_level".into(), json!(conversion_level));
    m.extend(params_fields(&p));
    Ok(Output::Record(m))
}
