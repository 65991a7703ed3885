//! Run reports: typed rows rendered as RFC-4180 CSV or JSON lines.
//!
//! The row payload is deterministic for a given command and seed; wall time
//! goes to a trailing summary (stderr for CSV, a `summary` line for JSON)
//! so byte-identical payload comparisons stay meaningful.

use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Value {
    UInt(u64),
    Float(f64),
    Str(String),
    Bool(bool),
}

impl Value {
    fn csv(&self, full_precision: bool) -> String {
        match self {
            Value::UInt(v) => v.to_string(),
            Value::Float(v) => {
                if full_precision {
                    format!("{v:.16e}")
                } else {
                    format!("{v:.9}")
                }
            }
            Value::Str(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::UInt(v) => v.to_string(),
            // 17 significant digits round-trips every f64.
            Value::Float(v) => format!("{v:.16e}"),
            Value::Str(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
            Value::Bool(b) => b.to_string(),
        }
    }
}

pub type Row = Vec<(&'static str, Value)>;

/// Report of one CLI command.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub parameters: Vec<(&'static str, String)>,
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            parameters: Vec::new(),
            rows: Vec::new(),
            warnings: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn param(&mut self, key: &'static str, value: impl ToString) -> &mut Self {
        self.parameters.push((key, value.to_string()));
        self
    }

    pub fn write(
        &self,
        out: &mut dyn Write,
        format: Format,
        full_precision: bool,
    ) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out, full_precision),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write, full_precision: bool) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if let Some(first) = self.rows.first() {
            w.write_record(first.iter().map(|(k, _)| *k))?;
            for row in &self.rows {
                w.write_record(row.iter().map(|(_, v)| v.csv(full_precision)))?;
            }
        }
        w.flush()?;
        for warning in &self.warnings {
            eprintln!("warning: {warning}");
        }
        eprintln!(
            "# {} completed in {:.3}s",
            self.command, self.wall_time_s
        );
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let params: Vec<String> = self
            .parameters
            .iter()
            .map(|(k, v)| format!("\"{k}\":\"{v}\""))
            .collect();
        writeln!(
            out,
            "{{\"type\":\"meta\",\"command\":\"{}\",{}}}",
            self.command,
            format_args!("\"parameters\":{{{}}}", params.join(","))
        )?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|(k, v)| format!("\"{k}\":{}", v.json()))
                .collect();
            writeln!(out, "{{\"type\":\"row\",{}}}", fields.join(","))?;
        }
        for warning in &self.warnings {
            writeln!(
                out,
                "{{\"type\":\"warning\",\"message\":{}}}",
                Value::Str(warning.clone()).json()
            )?;
        }
        writeln!(
            out,
            "{{\"type\":\"summary\",\"wall_time_s\":{:.3}}}",
            self.wall_time_s
        )?;
        Ok(())
    }
}
