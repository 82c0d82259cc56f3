//! Parameter values and sweep ranges.
//!
//! A value is a number, optionally scaled by `pi` (`pi`, `2pi`, `0.5*pi`,
//! `pi/4`, `3pi/4`). A range is `start:stop:step` (stop included when it lies
//! on the grid) or a comma list.

use anyhow::{bail, Context, Result};

const GRID_SLACK: f64 = 1e-9;

pub fn parse_value(s: &str) -> Result<f64> {
    let s = s.trim().to_ascii_lowercase().replace(' ', "");
    if s.is_empty() {
        bail!("empty value");
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().with_context(|| format!("bad divisor in {s:?}"))?),
        None => (s.clone(), 1.0),
    };
    let value = if let Some(head) = num.strip_suffix("pi") {
        let head = head.strip_suffix('*').unwrap_or(head);
        let factor = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().with_context(|| format!("bad factor in {s:?}"))?,
        };
        factor * std::f64::consts::PI
    } else {
        num.parse::<f64>().with_context(|| format!("not a number: {s:?}"))?
    };
    let v = value / den;
    if !v.is_finite() {
        bail!("value {s:?} is not finite");
    }
    Ok(v)
}

pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [one] => one.split(',').map(parse_value).collect::<Result<Vec<_>>>()?,
        [start, stop, step] => {
            let (a, b, h) = (parse_value(start)?, parse_value(stop)?, parse_value(step)?);
            if h <= 0.0 {
                bail!("range {s:?} needs a positive step");
            }
            if b < a {
                bail!("range {s:?} runs backwards");
            }
            let n = ((b - a) / h + GRID_SLACK).floor() as usize + 1;
            (0..n).map(|i| a + i as f64 * h).collect()
        }
        _ => bail!("malformed range {s:?}; expected start:stop:step or a comma list"),
    };
    if values.is_empty() {
        bail!("range {s:?} is empty");
    }
    Ok(values)
}

/// Integer view of a parameter value.
pub fn as_count(name: &str, v: f64) -> Result<usize> {
    if v < 0.0 || (v - v.round()).abs() > GRID_SLACK {
        bail!("--{name} must be a non-negative integer, got {v}");
    }
    Ok(v.round() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pi_literals() {
        assert_eq!(parse_value("pi").unwrap(), PI);
        assert_eq!(parse_value("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_value("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_value("0.9*pi").unwrap(), 0.9 * PI);
        assert_eq!(parse_value("-pi/2").unwrap(), -PI / 2.0);
        assert!(parse_value("tau").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:3.14159:0.05").unwrap().len(), 63);
        assert_eq!(parse_range("4:10:1").unwrap().len(), 7);
        assert_eq!(parse_range("0:pi:pi/4").unwrap().last().copied(), Some(PI));
        assert_eq!(parse_range("3,5,8").unwrap(), vec![3.0, 5.0, 8.0]);
        assert!(parse_range("1:0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
    }
}
