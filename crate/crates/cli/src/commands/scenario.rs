use std::io::Write;

use gravidec::decoherence::{scenarios_named, RateResult, ScenarioResult};
use gravidec::export::{machine, table};
use gravidec::units::PhysicalConstants;
use serde::{Deserialize, Serialize};

use super::RateView;
use crate::args::{OutputFormat, ScenarioArgs};
use crate::config::Settings;
use crate::error::CliResult;
use crate::output;

/// JSON schema of one scenario row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub name: String,
    #[serde(rename = "delta_E_description")]
    pub delta_e_description: String,
    pub paper_order: f64,
    pub within_order: bool,
    #[serde(flatten)]
    pub result: RateResult,
}

impl From<ScenarioResult> for ScenarioRow {
    fn from(s: ScenarioResult) -> Self {
        ScenarioRow {
            name: s.name.to_string(),
            delta_e_description: s.delta_e_description.to_string(),
            paper_order: s.paper_order,
            within_order: s.within_order,
            result: s.result,
        }
    }
}

pub fn run(args: &ScenarioArgs, settings: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let constants = PhysicalConstants::codata2018();
    let rows: Vec<ScenarioRow> = scenarios_named(&args.name, &constants)?
        .into_iter()
        .map(ScenarioRow::from)
        .collect();
    let natural = settings.natural();
    match settings.output_or(OutputFormat::Table) {
        OutputFormat::Json => {
            if args.name == "all" {
                output::json(out, &rows)?
            } else {
                output::json(out, &rows[0])?
            }
        }
        OutputFormat::Csv => {
            output::csv_metadata(out, settings, &[])?;
            writeln!(
                out,
                "name,paper_order,within_order,{}",
                RateView::csv_header(natural)
            )?;
            for row in &rows {
                let view = RateView::new(&row.result, natural, &constants);
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.name,
                    machine(row.paper_order),
                    row.within_order,
                    view.csv_cells(&row.result)
                )?;
            }
        }
        OutputFormat::Table => {
            let first = RateView::new(&rows[0].result, natural, &constants);
            let header = [
                "name".to_string(),
                format!("delta_E [{}]", first.energy_unit),
                format!("T [{}]", first.temperature_unit),
                format!("rate [{}]", first.rate_unit),
                "paper_order [1/s]".to_string(),
                "within_order".to_string(),
            ];
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let v = RateView::new(&row.result, natural, &constants);
                    vec![
                        row.name.clone(),
                        table(v.delta_e),
                        table(v.temperature),
                        table(v.rate),
                        table(row.paper_order),
                        row.within_order.to_string(),
                    ]
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            output::table(out, &header, &cells)?;
        }
    }
    Ok(())
}
