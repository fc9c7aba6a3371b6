use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

/// Columns of numbers plus the metadata written ahead of them.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Extra `key = value` lines, e.g. summary statistics.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }
}

pub struct Meta<'a> {
    pub command: &'a str,
    pub config: Value,
    pub units: String,
}

/// Flattens nested objects to dotted keys in a stable order.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Null => {}
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn config_value(args: &impl Serialize) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

/// 17 significant digits, enough to round-trip every double.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn write_csv<W: Write>(mut w: W, meta: &Meta<'_>, table: &Table) -> Result<(), CliError> {
    writeln!(w, "# levy-deco {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# command = {}", meta.command)?;
    let mut cfg = Vec::new();
    flatten("", &meta.config, &mut cfg);
    for (k, v) in cfg {
        writeln!(w, "# config.{k} = {v}")?;
    }
    writeln!(w, "# units = {}", meta.units)?;
    for (k, v) in &table.notes {
        writeln!(w, "# {k} = {v}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.columns)?;
    for row in &table.rows {
        csv.write_record(row.iter().map(|x| fmt_num(*x)))?;
    }
    csv.flush()?;
    Ok(())
}

fn write_json<W: Write>(mut w: W, meta: &Meta<'_>, table: &Table) -> Result<(), CliError> {
    let notes: Map<String, Value> = table.notes.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    // non-finite entries become null, which JSON has no number for
    let doc = json!({
        "metadata": {
            "version": env!("CARGO_PKG_VERSION"),
            "command": meta.command,
            "config": meta.config,
            "units": meta.units,
            "notes": notes,
        },
        "columns": table.columns,
        "rows": table.rows,
    });
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    Ok(())
}

pub fn emit(out: Option<&Path>, format: Format, meta: &Meta<'_>, table: &Table) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_to(&mut w, format, meta, table)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            write_to(stdout.lock(), format, meta, table)?;
        }
    }
    Ok(())
}

fn write_to<W: Write>(w: W, format: Format, meta: &Meta<'_>, table: &Table) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(w, meta, table),
        Format::Json => write_json(w, meta, table),
    }
}
