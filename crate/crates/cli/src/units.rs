//! Parsers for rates, durations, counts and grids given on the command line.

/// `N/hour`, `N/min`, `N/sec` (and the short forms `h`, `m`, `s`), `A/B`
/// for `A` blocks per `B` seconds, or a bare number of blocks per second.
pub fn parse_rate(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, per) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "sec"),
    };
    let n: f64 = num.parse().map_err(|_| format!("invalid rate {s:?}"))?;
    let per_seconds = match per {
        "hour" | "hr" | "h" => 3600.0,
        "min" | "m" => 60.0,
        "sec" | "s" => 1.0,
        other => other
            .parse::<f64>()
            .map_err(|_| format!("invalid rate unit {other:?} in {s:?}; use hour, min or sec"))?,
    };
    let rate = n / per_seconds;
    if !(rate.is_finite() && rate >= 0.0 && per_seconds > 0.0) {
        return Err(format!("rate {s:?} must be finite and nonnegative"));
    }
    Ok(rate)
}

/// Durations such as `3600`, `90s`, `45m`, `4h`, `2h30m`, `1d6h`.
pub fn parse_time(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return check_time(x, s);
    }
    let mut total = 0.0;
    let mut rest = s;
    while !rest.is_empty() {
        let split = rest
            .find(|c: char| c.is_ascii_alphabetic())
            .ok_or_else(|| format!("invalid duration {s:?}: missing unit"))?;
        let value: f64 = rest[..split].parse().map_err(|_| format!("invalid duration {s:?}"))?;
        let unit_len = rest[split..].find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(rest.len() - split);
        let scale = match &rest[split..split + unit_len] {
            "d" => 86_400.0,
            "h" => 3600.0,
            "m" | "min" => 60.0,
            "s" | "sec" => 1.0,
            u => return Err(format!("invalid duration unit {u:?} in {s:?}; use d, h, m or s")),
        };
        total += value * scale;
        rest = &rest[split + unit_len..];
    }
    check_time(total, s)
}

fn check_time(x: f64, s: &str) -> Result<f64, String> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("duration {s:?} must be finite and nonnegative"))
    }
}

/// A positive whole count, also accepting scientific notation (`1e6`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("invalid count {s:?}"))?;
    if x >= 1.0 && x.fract() == 0.0 && x <= 2f64.powi(53) {
        Ok(x as u64)
    } else {
        Err(format!("count {s:?} must be a positive integer"))
    }
}

pub fn parse_probability(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("invalid probability {s:?}"))?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("probability {s:?} must lie in (0, 1)"))
    }
}

pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("invalid fraction {s:?}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("fraction {s:?} must lie in [0, 1]"))
    }
}

/// A strictly increasing grid: either a comma list or `start:stop:step`
/// (inclusive of `stop` up to rounding), each value read by `value`.
pub fn parse_grid(s: &str, value: impl Fn(&str) -> Result<f64, String>) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, h) = (value(start)?, value(stop)?, value(step)?);
            if h.is_nan() || h <= 0.0 {
                return Err(format!("grid step in {s:?} must be positive"));
            }
            let n = ((b - a) / h + 1e-9).floor();
            if !(0.0..1e7).contains(&n) {
                return Err(format!("grid {s:?} is empty or too large"));
            }
            (0..=n as u64).map(|i| a + i as f64 * h).collect()
        }
        [_] => s.split(',').map(&value).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("invalid grid {s:?}; use a,b,c or start:stop:step")),
    };
    if grid.is_empty() {
        return Err(format!("grid {s:?} is empty"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("grid {s:?} must be strictly increasing"));
    }
    Ok(grid)
}

pub fn parse_number(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("invalid number {s:?}"))
}
