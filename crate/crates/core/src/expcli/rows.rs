use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowVerdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl RowVerdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            RowVerdict::Pass
        } else {
            RowVerdict::Fail
        }
    }
}

/// One measured quantity. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub command: String,
    /// Level `n` or schedule index, when the metric has one.
    pub level: Option<u64>,
    pub metric: String,
    pub value: f64,
    pub verdict: RowVerdict,
}

impl ResultRow {
    /// Non-finite values are clamped to `±f64::MAX` (NaN to `f64::MAX`) so
    /// every emitted value parses back as a number.
    pub fn new(
        experiment: &str,
        command: &str,
        level: Option<u64>,
        metric: impl Into<String>,
        value: f64,
        verdict: RowVerdict,
    ) -> Self {
        let value = if value.is_finite() {
            value
        } else if value == f64::NEG_INFINITY {
            -f64::MAX
        } else {
            f64::MAX
        };
        Self {
            experiment: experiment.to_string(),
            command: command.to_string(),
            level,
            metric: metric.into(),
            value,
            verdict,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "experiment,command,level,metric,value,verdict";

pub fn to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::InvalidArgument(format!("unexpected CSV header {header:?}")));
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?)
}

pub fn to_json(rows: &[ResultRow]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<ResultRow>> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(rows: &[ResultRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}

/// Writes to `dest`, or to standard output when `dest` is `None`.
pub fn emit(rows: &[ResultRow], format: Format, dest: Option<&Path>) -> Result<()> {
    let text = render(rows, format)?;
    match dest {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io { path: p.to_path_buf(), source }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io { path: "<stdout>".into(), source }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ResultRow> {
        vec![
            ResultRow::new("e,1", "prop1", Some(3), "assembled", 0.1 + 0.2, RowVerdict::Pass),
            ResultRow::new("e\"2", "certify", None, "l2_opnorm", f64::INFINITY, RowVerdict::NotApplicable),
            ResultRow::new("e3", "dsae", Some(0), "defect", 1e-300, RowVerdict::Fail),
        ]
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(to_csv(&[]).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn single_row_json() {
        let rows = &sample()[..1];
        let v: serde_json::Value = serde_json::from_str(&to_json(rows).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);
        assert_eq!(v[0]["verdict"], "pass");
    }

    #[test]
    fn csv_json_round_trip() {
        let rows = sample();
        let via_csv = from_csv(&to_csv(&rows).unwrap()).unwrap();
        let via_json = from_json(&to_json(&via_csv).unwrap()).unwrap();
        assert_eq!(via_json, rows);
        assert!(to_csv(&rows).unwrap().contains("\"e,1\""));
        assert_eq!(rows[1].value, f64::MAX);
    }
}
