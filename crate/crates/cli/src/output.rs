//! Record formatting for CSV and JSON-lines output.

use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Null,
}

/// Rounds to 12 significant digits and prints the shortest form that reads
/// back to the rounded value.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0.0".into();
    }
    format!("{rounded:?}")
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Num(x) => fmt_num(*x),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.replace(['\n', '\r'], " "),
            Value::Null => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::Num(x) if x.is_finite() => fmt_num(*x),
            Value::Num(x) => serde_json::to_string(&fmt_num(*x)).unwrap(),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => serde_json::to_string(&s.replace(['\n', '\r'], " ")).unwrap(),
            Value::Null => "null".into(),
        }
    }
}

/// Writes records with a fixed column list, flushing after every row.
pub struct Sink {
    format: Format,
    columns: Vec<String>,
    out: Box<dyn Write>,
}

impl Sink {
    pub fn new(format: Format, columns: Vec<String>, out: Box<dyn Write>, write_header: bool) -> io::Result<Self> {
        let mut sink = Sink { format, columns, out };
        if write_header && format == Format::Csv {
            let header = sink.columns.clone();
            sink.write_line(&csv_line(header.iter().map(String::as_str)))?;
        }
        Ok(sink)
    }

    pub fn stdout(format: Format, columns: Vec<String>) -> io::Result<Self> {
        Sink::new(format, columns, Box::new(io::stdout()), true)
    }

    pub fn create(path: &Path, format: Format, columns: Vec<String>) -> io::Result<Self> {
        let file = File::create(path)?;
        Sink::new(format, columns, Box::new(BufWriter::new(file)), true)
    }

    pub fn row(&mut self, values: &[Value]) -> io::Result<()> {
        assert_eq!(values.len(), self.columns.len(), "row width");
        let line = match self.format {
            Format::Csv => csv_line(values.iter().map(Value::csv_field).collect::<Vec<_>>().iter().map(String::as_str)),
            Format::Json => {
                let fields: Vec<String> = self
                    .columns
                    .iter()
                    .zip(values)
                    .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).unwrap(), v.json()))
                    .collect();
                format!("{{{}}}", fields.join(","))
            }
        };
        self.write_line(&line)
    }

    fn write_line(&mut self, line: &str) -> io::Result<()> {
        self.out.write_all(line.as_bytes())?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }
}

fn csv_line<'a>(fields: impl Iterator<Item = &'a str>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    let mut bytes = w.into_inner().expect("in-memory flush");
    bytes.pop();
    String::from_utf8(bytes).expect("utf-8 fields")
}

/// Rows already present in a partially written output file.
pub struct Existing {
    pub rows: usize,
    pub failed: usize,
    /// Nothing usable was found, so a CSV header is still owed.
    pub empty: bool,
}

/// Validates a previous run's file against `columns`, drops any trailing
/// partial line and returns the file opened for appending.
pub fn reopen(path: &Path, format: Format, columns: &[String]) -> Result<(Existing, File), String> {
    let mut file = OpenOptions::new()
        .read(true)
        .write(true)
        .open(path)
        .map_err(|e| format!("cannot resume {}: {e}", path.display()))?;
    let mut text = String::new();
    file.read_to_string(&mut text).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let complete = text.rfind('\n').map_or(0, |i| i + 1);
    let text = &text[..complete];

    let mut existing = Existing { rows: 0, failed: 0, empty: text.is_empty() };
    match format {
        _ if existing.empty => {}
        Format::Csv => {
            let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
            let header = reader.headers().map_err(|e| e.to_string())?.clone();
            if !header.iter().eq(columns.iter().map(String::as_str)) {
                return Err(format!("{} was written with different columns", path.display()));
            }
            let error_col = columns.iter().position(|c| c == "error");
            for record in reader.records() {
                let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
                check_index(&record[0], existing.rows, path)?;
                if error_col.is_some_and(|i| !record[i].is_empty()) {
                    existing.failed += 1;
                }
                existing.rows += 1;
            }
        }
        Format::Json => {
            for line in text.lines() {
                let v: serde_json::Value =
                    serde_json::from_str(line).map_err(|e| format!("{}: {e}", path.display()))?;
                let obj = v.as_object().ok_or_else(|| format!("{}: not a record", path.display()))?;
                if !obj.keys().all(|k| columns.contains(k)) || obj.len() != columns.len() {
                    return Err(format!("{} was written with different columns", path.display()));
                }
                check_index(&obj["index"].to_string(), existing.rows, path)?;
                if obj.get("error").is_some_and(|e| !e.is_null()) {
                    existing.failed += 1;
                }
                existing.rows += 1;
            }
        }
    }
    file.set_len(complete as u64).map_err(|e| e.to_string())?;
    file.seek(SeekFrom::End(0)).map_err(|e| e.to_string())?;
    Ok((existing, file))
}

fn check_index(field: &str, expected: usize, path: &Path) -> Result<(), String> {
    match field.parse::<usize>() {
        Ok(i) if i == expected => Ok(()),
        _ => Err(format!("{}: row {expected} has index '{field}'", path.display())),
    }
}
