//! Point and sample CSV files: a mandatory header `x1,…,xn[,f]`, then one
//! row per point.

use std::fs::File;
use std::io::Write;

use crate::error::{CliError, CliResult};

/// Points read from a CSV file, with the value column when present.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTable {
    pub points: Vec<Vec<f64>>,
    pub values: Option<Vec<f64>>,
}

impl PointTable {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}

/// Shortest decimal representation that parses back to the same double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn header_for(n: usize, with_values: bool, value_name: &str) -> Vec<String> {
    let mut h: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    if with_values {
        h.push(value_name.to_string());
    }
    h
}

pub fn write_points(path: &str, points: &[Vec<f64>], values: Option<&[f64]>) -> CliResult<()> {
    let n = points.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(header_for(n, values.is_some(), "f")).map_err(|e| CliError::io(path, e))?;
    for (k, p) in points.iter().enumerate() {
        let mut row: Vec<String> = p.iter().map(|&v| fmt_f64(v)).collect();
        if let Some(vals) = values {
            row.push(fmt_f64(vals[k]));
        }
        w.write_record(&row).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_points(path: &str) -> CliResult<PointTable> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| CliError::format(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let has_values = header.last().is_some_and(|h| h == "f");
    let n = header.len() - usize::from(has_values);
    let expected: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    if n == 0 || header[..n] != expected[..] {
        return Err(CliError::format(
            path,
            format!("header must be x1,...,xn[,f], found {}", header.join(",")),
        ));
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::format(path, e.to_string()))?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::format(path, format!("row {}: {e}", line + 1)))?;
        if nums.len() != header.len() {
            return Err(CliError::format(path, format!("row {} has {} fields", line + 1, nums.len())));
        }
        if has_values {
            values.push(nums[n]);
        }
        points.push(nums[..n].to_vec());
    }
    Ok(PointTable {
        points,
        values: has_values.then_some(values),
    })
}

/// Writes a single-column CSV with the given header name.
pub fn write_column(path: &str, name: &str, values: &[f64]) -> CliResult<()> {
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = String::with_capacity(values.len() * 20);
    out.push_str(name);
    out.push('\n');
    for v in values {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    f.write_all(out.as_bytes()).map_err(|e| CliError::io(path, e))
}
