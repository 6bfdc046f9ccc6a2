use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::{GlobalArgs, OutputFormat, Units};
use crate::error::{CliError, CliResult};

/// Optional JSON config; every field may be overridden on the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub units: Option<Units>,
    pub output: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub epsilon: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub units: Units,
    /// `None` leaves the choice to the command.
    pub output: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub epsilon: Option<f64>,
    /// Arguments as invoked, for CSV provenance lines.
    pub command_line: String,
}

impl Settings {
    pub fn resolve(global: &GlobalArgs, command_line: String) -> CliResult<Self> {
        let file = match &global.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let settings = Settings {
            units: global.units.or(file.units).unwrap_or(Units::Si),
            output: global.output.or(file.output),
            out: global.out.clone().or(file.out),
            tol: global.tol.or(file.tol),
            epsilon: global.epsilon.or(file.epsilon),
            command_line,
        };
        if let Some(tol) = settings.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::usage(format!(
                    "--tol must be positive, got {tol}"
                )));
            }
        }
        if let Some(eps) = settings.epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(CliError::usage(format!(
                    "--epsilon must be positive, got {eps}"
                )));
            }
        }
        Ok(settings)
    }

    pub fn output_or(&self, default: OutputFormat) -> OutputFormat {
        self.output.unwrap_or(default)
    }

    pub fn natural(&self) -> bool {
        self.units == Units::Natural
    }
}
