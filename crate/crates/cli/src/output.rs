use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use torsion_bounds::bounds::BoundReport;
use torsion_bounds::real::OUTPUT_DIGITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One serialized bound row.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub degree: u64,
    pub bound: String,
    pub exact_rank: Option<String>,
    pub theorem: String,
    pub vacuous: bool,
    pub precision_bits: usize,
}

impl From<&BoundReport> for Row {
    fn from(r: &BoundReport) -> Self {
        Row {
            degree: r.degree,
            bound: r.bound.to_decimal_string(OUTPUT_DIGITS),
            exact_rank: r.exact_rank.as_ref().map(|x| x.to_string()),
            theorem: r.theorem.tag().to_string(),
            vacuous: r.vacuous(),
            precision_bits: r.precision_bits,
        }
    }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_rows(rows: &[Row], format: Format) -> io::Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.degree.to_string(),
                        r.bound.clone(),
                        r.exact_rank.clone().unwrap_or_default(),
                        r.theorem.clone(),
                        r.vacuous.to_string(),
                        r.precision_bits.to_string(),
                    ]
                })
                .collect();
            csv_table(&["degree", "bound", "exact_rank", "theorem", "vacuous", "precision_bits"], &body)
        }
    }
}

/// Writes to `out` when given, stdout otherwise.
pub fn emit(text: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => File::create(path)?.write_all(text.as_bytes()),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
