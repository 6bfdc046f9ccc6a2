use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use crate::config::Settings;
use crate::error::CliResult;

pub fn sink(settings: &Settings) -> io::Result<Box<dyn Write>> {
    Ok(match &settings.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `#` provenance lines: tool version, command line, units and tolerances.
pub fn csv_metadata(
    out: &mut dyn Write,
    settings: &Settings,
    extra: &[(&str, String)],
) -> io::Result<()> {
    writeln!(out, "# gravidec {}", gravidec_version())?;
    writeln!(out, "# command: {}", settings.command_line)?;
    writeln!(
        out,
        "# units: {}",
        if settings.natural() { "natural" } else { "si" }
    )?;
    match settings.tol {
        Some(tol) => writeln!(out, "# tol: {}", gravidec::export::machine(tol))?,
        None => writeln!(out, "# tol: library default")?,
    }
    for (key, value) in extra {
        writeln!(out, "# {key}: {value}")?;
    }
    Ok(())
}

pub fn gravidec_version() -> &'static str {
    gravidec::VERSION
}

pub fn json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Two aligned columns.
pub fn key_values(out: &mut dyn Write, rows: &[(&str, String)]) -> io::Result<()> {
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    for (k, v) in rows {
        writeln!(out, "{k:<width$}  {v}")?;
    }
    Ok(())
}

/// Header plus rows, each column padded to its widest cell.
pub fn table(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

pub fn flag(value: Option<bool>) -> String {
    match value {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "n/a".into(),
    }
}
