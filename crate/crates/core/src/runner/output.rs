//! CSV and JSON artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::observables::ObservableSeries;

/// Shortest representation that reads back to the same `f64`.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// `t,imbalance,entropy_cut<ℓ>,sz_1..sz_L`, one row per time.
pub fn series_csv(series: &ObservableSeries) -> String {
    let length = series.magnetization.first().map_or(0, Vec::len);
    let mut out = format!("t,imbalance,entropy_cut{}", series.cut);
    for j in 1..=length {
        let _ = write!(out, ",sz_{j}");
    }
    out.push('\n');
    for k in 0..series.len() {
        out.push_str(&fmt_f64(series.times[k]));
        out.push(',');
        out.push_str(&fmt_f64(series.imbalance[k]));
        out.push(',');
        out.push_str(&fmt_f64(series.entropy[k]));
        for m in &series.magnetization[k] {
            out.push(',');
            out.push_str(&fmt_f64(*m));
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`series_csv`].
pub fn read_series_csv(text: &str) -> Result<ObservableSeries> {
    let bad = |msg: String| Error::Config(format!("series CSV: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 3 || columns[0] != "t" || columns[1] != "imbalance" {
        return Err(bad(format!("unexpected header `{header}`")));
    }
    let cut = columns[2]
        .strip_prefix("entropy_cut")
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| bad(format!("unexpected column `{}`", columns[2])))?;
    let mut series = ObservableSeries::new(cut);
    for (n, line) in lines.enumerate() {
        let values = line
            .split(',')
            .map(str::parse::<f64>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", n + 2)))?;
        if values.len() != columns.len() {
            return Err(bad(format!("row {} has {} fields", n + 2, values.len())));
        }
        series.times.push(values[0]);
        series.imbalance.push(values[1]);
        series.entropy.push(values[2]);
        series.magnetization.push(values[3..].to_vec());
    }
    Ok(series)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(format!("JSON encoding: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

/// Two-column CSV with a header.
pub(crate) fn columns_csv(header: &[&str], columns: &[&[f64]]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    let rows = columns.first().map_or(0, |c| c.len());
    for k in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| fmt_f64(c[k])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut s = ObservableSeries::new(3);
        for k in 0..4 {
            let t = k as f64 * 0.1;
            s.times.push(t);
            s.imbalance.push((t * 7.0).cos() / 3.0);
            s.entropy.push(1e-300 * k as f64 + t.sqrt());
            s.magnetization.push(vec![0.5 - t, -0.5 + t, 1.0 / 3.0]);
        }
        let text = series_csv(&s);
        assert!(text.starts_with("t,imbalance,entropy_cut3,sz_1,sz_2,sz_3\n"));
        assert_eq!(read_series_csv(&text).unwrap(), s);
    }

    #[test]
    fn malformed_csv() {
        assert!(read_series_csv("").is_err());
        assert!(read_series_csv("t,x,entropy_cut1\n").is_err());
        assert!(read_series_csv("t,imbalance,entropy_cut1,sz_1\n0,1,0\n").is_err());
    }
}
