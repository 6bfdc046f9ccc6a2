use std::io::Write;

use gravidec::decoherence::{decoherence_rate_with, RateContext};
use gravidec::units::{parse_energy, PhysicalConstants};

use super::RateView;
use crate::args::{OutputFormat, RateArgs};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output;

pub fn run(args: &RateArgs, settings: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let constants = PhysicalConstants::codata2018();
    let delta_e = parse_energy(&args.delta_e, &constants)
        .map_err(|e| CliError::usage(format!("--delta-e `{}`: {e}", args.delta_e)))?;
    let result = decoherence_rate_with(
        delta_e,
        args.temp,
        &constants,
        RateContext {
            markov_time_s: args.markov_time,
            compton_ok: None,
        },
    )?;
    let natural = settings.natural();
    let view = RateView::new(&result, natural, &constants);
    match settings.output_or(OutputFormat::Table) {
        OutputFormat::Json => output::json(out, &result)?,
        OutputFormat::Csv => {
            output::csv_metadata(out, settings, &[])?;
            writeln!(out, "{}", RateView::csv_header(natural))?;
            writeln!(out, "{}", view.csv_cells(&result))?;
        }
        OutputFormat::Table => output::key_values(out, &view.table_rows(&result))?,
    }
    Ok(())
}
