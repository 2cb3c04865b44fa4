//! Report assembly and the table, JSON and CSV emitters.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{json, Map, Value};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};

/// Significant digits kept in JSON floats.
pub const JSON_DIGITS: usize = 15;

/// Columns of the per-`(d, q, k)` CSV.
pub const LAMBDA_CSV: &[&str] = &[
    "d", "q", "k", "power_lo", "power_hi", "lambda_lo", "lambda_hi", "tail_hi", "cutoff_R",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
    Range(Enclosure),
    Json(Value),
    Missing,
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl From<Enclosure> for Cell {
    fn from(v: Enclosure) -> Self {
        Cell::Range(v)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// One result record; column order is kept for tables and CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row(pub Vec<(String, Cell)>);

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, cell: impl Into<Cell>) -> Self {
        self.0.push((key.to_string(), cell.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, c)| c)
    }

    fn keys(&self) -> Vec<&str> {
        self.0.iter().map(|(k, _)| k.as_str()).collect()
    }

    /// Enclosures split into `_lo` / `_hi` columns.
    fn flat(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (k, c) in &self.0 {
            match c {
                Cell::Range(e) => {
                    out.push((format!("{k}_lo"), format!("{:e}", e.lo)));
                    out.push((format!("{k}_hi"), format!("{:e}", e.hi)));
                }
                Cell::Num(x) => out.push((k.clone(), format!("{x:e}"))),
                Cell::Int(i) => out.push((k.clone(), i.to_string())),
                Cell::Bool(b) => out.push((k.clone(), b.to_string())),
                Cell::Text(s) => out.push((k.clone(), s.clone())),
                Cell::Json(v) => out.push((k.clone(), v.to_string())),
                Cell::Missing => out.push((k.clone(), String::new())),
            }
        }
        out
    }

    fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (k, c) in &self.0 {
            let v = match c {
                Cell::Int(i) => json!(i),
                Cell::Num(x) => num(*x, Rounding::Nearest),
                Cell::Text(s) => json!(s),
                Cell::Bool(b) => json!(b),
                Cell::Range(e) => json!({
                    "lo": num(e.lo, Rounding::Down),
                    "hi": num(e.hi, Rounding::Up),
                }),
                Cell::Json(v) => round_floats(v.clone()),
                Cell::Missing => Value::Null,
            };
            map.insert(k.clone(), v);
        }
        Value::Object(map)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rounding {
    Nearest,
    Down,
    Up,
}

/// `x` rounded to [`JSON_DIGITS`] significant digits. Directed rounding
/// keeps enclosure endpoints outside the exact value.
fn round_sig(x: f64, mode: Rounding) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let text = format!("{:.*e}", JSON_DIGITS - 1, x);
    let r: f64 = text.parse().expect("formatted float parses");
    let step = |sign: f64| {
        let (mant, exp) = text.split_once('e').expect("exponent present");
        let m: f64 = mant.parse().expect("mantissa parses");
        let moved = m + sign * 10f64.powi(1 - JSON_DIGITS as i32);
        format!("{:.*}e{}", JSON_DIGITS - 1, moved, exp).parse::<f64>().expect("float parses")
    };
    match mode {
        Rounding::Nearest => r,
        Rounding::Down if r > x => step(-1.0),
        Rounding::Up if r < x => step(1.0),
        _ => r,
    }
}

fn num(x: f64, mode: Rounding) -> Value {
    serde_json::Number::from_f64(round_sig(x, mode)).map_or(Value::Null, Value::Number)
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN), Rounding::Nearest),
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => {
            let lo_hi = map.len() == 2 && map.contains_key("lo") && map.contains_key("hi");
            Value::Object(
                map.into_iter()
                    .map(|(k, v)| {
                        let mode = match (lo_hi, k.as_str()) {
                            (true, "lo") => Rounding::Down,
                            (true, "hi") => Rounding::Up,
                            _ => Rounding::Nearest,
                        };
                        let v = match (&v, mode) {
                            (Value::Number(n), m) if m != Rounding::Nearest => num(n.as_f64().unwrap_or(f64::NAN), m),
                            _ => round_floats(v),
                        };
                        (k, v)
                    })
                    .collect(),
            )
        }
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub results: Vec<Row>,
    pub verdict: Option<String>,
    /// Fixed CSV columns; when absent the CSV follows the last row's shape.
    pub csv_columns: Option<&'static [&'static str]>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), params: BTreeMap::new(), results: Vec::new(), verdict: None, csv_columns: None }
    }

    pub fn param(mut self, key: &str, value: impl serde::Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(key.to_string(), round_floats(v));
        self
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("command".into(), json!(self.command));
        map.insert("params".into(), Value::Object(self.params.clone().into_iter().collect()));
        map.insert("results".into(), Value::Array(self.results.iter().map(Row::to_json).collect()));
        if let Some(v) = &self.verdict {
            map.insert("verdict".into(), json!(v));
        }
        map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        Value::Object(map)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).map_err(|e| Error::Range(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.csv(),
            Format::Table => Ok(self.table()),
        }
    }

    fn csv(&self) -> Result<String> {
        let (header, rows): (Vec<String>, Vec<Vec<(String, String)>>) = match self.csv_columns {
            Some(cols) => {
                let rows = self
                    .results
                    .iter()
                    .map(Row::flat)
                    .filter(|f| cols.iter().all(|c| f.iter().any(|(k, _)| k == c)))
                    .collect();
                (cols.iter().map(|c| c.to_string()).collect(), rows)
            }
            None => {
                let Some(last) = self.results.last() else { return Ok(String::new()) };
                let keys = last.keys();
                let rows = self.results.iter().filter(|r| r.keys() == keys).map(Row::flat).collect();
                (last.flat().into_iter().map(|(k, _)| k).collect(), rows)
            }
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Range(e.to_string());
        w.write_record(&header).map_err(err)?;
        for row in rows {
            let record: Vec<&str> = header
                .iter()
                .map(|h| row.iter().find(|(k, _)| k == h).map_or("", |(_, v)| v.as_str()))
                .collect();
            w.write_record(record).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Range(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Range(e.to_string()))
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
        out.push_str(&format!("{} {}\n", self.command, params.join(" ")));
        let mut start = 0;
        while start < self.results.len() {
            let keys = self.results[start].keys();
            let end = start + self.results[start..].iter().take_while(|r| r.keys() == keys).count();
            out.push('\n');
            out.push_str(&grid(&self.results[start..end]));
            start = end;
        }
        if let Some(v) = &self.verdict {
            out.push_str(&format!("\nverdict: {v}\n"));
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn show(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Num(x) => show_num(*x),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => if *b { "yes" } else { "no" }.to_string(),
        Cell::Range(e) => format!("[{}, {}]", show_num(e.lo), show_num(e.hi)),
        Cell::Json(Value::Array(items)) => format!("({} entries)", items.len()),
        Cell::Json(v) => v.to_string(),
        Cell::Missing => "-".to_string(),
    }
}

fn show_num(x: f64) -> String {
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        let decimals = (12 - x.abs().log10().floor() as i32).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s }
    } else {
        format!("{x:.9e}")
    }
}

fn grid(rows: &[Row]) -> String {
    let header: Vec<String> = rows[0].keys().iter().map(|k| k.to_string()).collect();
    let body: Vec<Vec<String>> = rows.iter().map(|r| r.0.iter().map(|(_, c)| show(c)).collect()).collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| body.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(&header);
    for r in &body {
        out.push_str(&line(r));
    }
    out
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> Result<()> {
    let io = |e: std::io::Error| Error::Range(format!("cannot write output: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(io)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_rounding() {
        let x = 0.1 + 0.2;
        assert!(round_sig(x, Rounding::Down) <= x);
        assert!(round_sig(x, Rounding::Up) >= x);
        assert_eq!(round_sig(1.0 / 3.0, Rounding::Nearest), 0.333333333333333);
        assert_eq!(round_sig(-2.5, Rounding::Up), -2.5);
    }

    #[test]
    fn json_reparses_identically() {
        let mut r = Report::new("lambda").param("q", "10/3").param("cutoff", 200.0);
        r.results.push(
            Row::new()
                .with("k", 0u32)
                .with("power", Enclosure::new(0.2571781512345678, 0.25717815123457).unwrap())
                .with("tail_hi", 1.0 / 3.0),
        );
        let text = r.render(Format::Json).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
        let lo = v["results"][0]["power"]["lo"].as_f64().unwrap();
        assert!(lo <= 0.2571781512345678);
    }

    #[test]
    fn csv_uses_fixed_columns() {
        let mut r = Report::new("lambda");
        r.csv_columns = Some(&["k", "power_lo", "power_hi"]);
        r.results.push(Row::new().with("note", "skip"));
        r.results.push(Row::new().with("k", 1u32).with("power", Enclosure::point(0.5)));
        let text = r.render(Format::Csv).unwrap();
        assert_eq!(text, "k,power_lo,power_hi\n1,5e-1,5e-1\n");
    }
}
