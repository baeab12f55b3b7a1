use nakamoto_bounds::protocols::{
    build_comparison_table, check_against_published, default_config, parse_config, FaultCriterion, TABLE_LEVELS,
};
use serde_json::{json, Value};

use crate::args::TableArgs;
use crate::output::{num, Output, Table};
use crate::{CliError, CliResult, Outcome};

fn level_label(eps: f64) -> String {
    format!("latency_{eps:e}_s")
}

pub fn protocol_table(a: &TableArgs) -> CliResult<Outcome> {
    let config = match &a.config {
        None => default_config(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text).map_err(|e| CliError::Input(format!("invalid config {}: {e}", path.display())))?
        }
    };
    if a.check && a.levels != TABLE_LEVELS {
        return Err(CliError::Input("--check compares the published levels 1e-3,1e-6,1e-9 only".into()));
    }
    let rows = build_comparison_table(&config.protocols, &config.delay_model, a.adversary_frac, &a.levels);

    let mut columns = vec!["name".to_string(), "block_size_kb".into(), "blocks_per_hour".into(), "delay_s".into()];
    columns.extend(a.levels.iter().map(|&l| level_label(l)));
    columns.extend(
        ["throughput_kb_s", "ft_loner_rate", "ft_ultimate", "ft_ultimate_total_rate", "note"].map(String::from),
    );
    let mut table = Table::new(columns);
    for r in &rows {
        let mut cells = vec![json!(r.name), json!(r.block_size_kb), json!(r.blocks_per_hour), num(Some(r.delay_s))];
        cells.extend(r.latency_s.iter().map(|t| t.map_or(Value::Null, |t| json!(t))));
        let ft = &r.fault_tolerance;
        cells.extend([
            num(Some(r.throughput_kb_s)),
            num(Some(ft.loner_rate)),
            num(Some(ft.ultimate)),
            num(Some(ft.ultimate_total_rate)),
            r.note.as_ref().map_or(Value::Null, |n| json!(n)),
        ]);
        table.push(cells);
    }

    let failure = if a.check {
        let criteria: Vec<FaultCriterion> = a.criteria.iter().map(|&c| c.into()).collect();
        let problems = check_against_published(&rows, &criteria);
        (!problems.is_empty()).then(|| problems.join("; "))
    } else {
        None
    };
    Ok(Outcome { output: Output::Table(table), failure })
}
