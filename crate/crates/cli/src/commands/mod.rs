pub mod ball;
pub mod evolve;
pub mod kernel;
pub mod rate;
pub mod scenario;

use gravidec::decoherence::RateResult;
use gravidec::export::{machine, table};
use gravidec::units::{NaturalUnits, PhysicalConstants};

use crate::error::{CliError, CliResult};

/// A rate result converted to the active unit system for tables and CSV.
pub struct RateView {
    pub rate: f64,
    pub delta_e: f64,
    pub temperature: f64,
    pub coherence: f64,
    pub markov: Option<f64>,
    pub rate_unit: &'static str,
    pub energy_unit: &'static str,
    pub temperature_unit: &'static str,
    pub time_unit: &'static str,
}

impl RateView {
    pub fn new(r: &RateResult, natural: bool, constants: &PhysicalConstants) -> Self {
        if natural {
            let u = NaturalUnits::new(*constants);
            RateView {
                rate: u.rate_to_natural(r.rate_per_s),
                delta_e: u.energy_to_natural(r.delta_e_j),
                temperature: u.temperature_to_natural(r.t_k),
                coherence: u.time_to_natural(r.coherence_time()),
                markov: r.markov_time_s.map(|t| u.time_to_natural(t)),
                rate_unit: "1/m",
                energy_unit: "1/m",
                temperature_unit: "1/m",
                time_unit: "m",
            }
        } else {
            RateView {
                rate: r.rate_per_s,
                delta_e: r.delta_e_j,
                temperature: r.t_k,
                coherence: r.coherence_time(),
                markov: r.markov_time_s,
                rate_unit: "1/s",
                energy_unit: "J",
                temperature_unit: "K",
                time_unit: "s",
            }
        }
    }

    /// CSV column names matching [`csv_cells`](Self::csv_cells).
    pub fn csv_header(natural: bool) -> &'static str {
        if natural {
            "rate_per_m,delta_E_per_m,T_per_m,coherence_length_m,markov_length_m,high_t_ok,markov_ok,compton_ok"
        } else {
            "rate_per_s,delta_E_J,T_K,coherence_time_s,markov_time_s,high_t_ok,markov_ok,compton_ok"
        }
    }

    pub fn csv_cells(&self, r: &RateResult) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            machine(self.rate),
            machine(self.delta_e),
            machine(self.temperature),
            machine(self.coherence),
            self.markov.map(machine).unwrap_or_default(),
            csv_flag(r.flags.high_t_ok),
            csv_flag(r.flags.markov_ok),
            csv_flag(r.flags.compton_ok),
        )
    }

    pub fn table_rows(&self, r: &RateResult) -> Vec<(&'static str, String)> {
        let mut rows = vec![
            ("rate", format!("{} {}", table(self.rate), self.rate_unit)),
            (
                "coherence time",
                format!("{} {}", table(self.coherence), self.time_unit),
            ),
            (
                "delta E",
                format!("{} {}", table(self.delta_e), self.energy_unit),
            ),
            (
                "T",
                format!("{} {}", table(self.temperature), self.temperature_unit),
            ),
        ];
        if let Some(m) = self.markov {
            rows.push(("markov time", format!("{} {}", table(m), self.time_unit)));
        }
        rows.push(("high_t_ok", crate::output::flag(r.flags.high_t_ok)));
        rows.push(("markov_ok", crate::output::flag(r.flags.markov_ok)));
        rows.push(("compton_ok", crate::output::flag(r.flags.compton_ok)));
        rows
    }
}

fn csv_flag(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

/// Comma-separated floats, e.g. `1,2.5,-3`.
pub fn parse_floats(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                CliError::usage(format!("cannot parse `{}` in {what} `{text}`", part.trim()))
            })
        })
        .collect()
}

pub fn parse_vec3(text: &str, what: &str) -> CliResult<[f64; 3]> {
    let v = parse_floats(text, what)?;
    <[f64; 3]>::try_from(v.as_slice()).map_err(|_| {
        CliError::usage(format!(
            "{what} `{text}` needs exactly three components x,y,z"
        ))
    })
}
