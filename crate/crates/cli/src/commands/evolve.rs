use std::collections::BTreeSet;
use std::io::Write;

use gravidec::bath::{Cutoff, OhmicBath};
use gravidec::dephasing::{
    analytic_propagate, fit_decay_rate, numeric_propagate, records, DephasingRun, EvolutionRecord,
    FockDensityMatrix, EVOLUTION_CSV_HEADER,
};
use gravidec::export::{machine, table};
use gravidec::units::{NaturalUnits, PhysicalConstants};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::args::{EvolveArgs, OutputFormat};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output;

/// Parse `n:amplitude` pairs; amplitudes may be complex (`0.3+0.4i`).
pub fn parse_state(spec: &str) -> CliResult<Vec<(usize, Complex64)>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (level, amp) = item.split_once(':').ok_or_else(|| {
            CliError::usage(format!(
                "state entry `{item}` is not of the form n:amplitude"
            ))
        })?;
        let n: usize = level.trim().parse().map_err(|_| {
            CliError::usage(format!(
                "bad level `{}` in state entry `{item}`",
                level.trim()
            ))
        })?;
        let c: Complex64 = amp.trim().parse().map_err(|_| {
            CliError::usage(format!(
                "bad amplitude `{}` in state entry `{item}`",
                amp.trim()
            ))
        })?;
        out.push((n, c));
    }
    if out.is_empty() {
        return Err(CliError::usage(format!("empty state spec `{spec}`")));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub t: f64,
    pub n: usize,
    pub ntilde: usize,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl From<&EvolutionRecord> for Row {
    fn from(r: &EvolutionRecord) -> Self {
        Row {
            t: r.t,
            n: r.n,
            ntilde: r.ntilde,
            re: r.value.re,
            im: r.value.im,
            abs: r.value.norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub n: usize,
    pub ntilde: usize,
    pub analytic_rate_per_s: f64,
    pub numeric_rate_per_s: f64,
    pub markov_rate_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub coupling: f64,
    pub temperature_k: f64,
    pub omega0_rad_per_s: f64,
    pub cutoff_rad_per_s: f64,
    pub n_max: usize,
    pub high_temperature: bool,
    pub analytic: Vec<Row>,
    pub numeric: Vec<Row>,
    pub fits: Vec<Fit>,
    pub warnings: Vec<String>,
}

fn fit_pair(records: &[EvolutionRecord], n: usize, ntilde: usize) -> Option<f64> {
    let (times, moduli): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|r| r.n == n && r.ntilde == ntilde)
        .map(|r| (r.t, r.value.norm()))
        .unzip();
    fit_decay_rate(&times, &moduli).ok()
}

pub fn compute(args: &EvolveArgs) -> CliResult<EvolveReport> {
    let constants = PhysicalConstants::codata2018();
    let amplitudes = parse_state(&args.state)?;
    let rho0 = FockDensityMatrix::from_pure(args.nmax, &amplitudes)?;
    if args.steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    let grid = DephasingRun::uniform_grid(args.tmax, args.steps);
    let thermal = constants.k_b() * args.temp / constants.hbar();
    let cutoff = args.cutoff.unwrap_or(100.0 * thermal);
    if cutoff.is_nan() || cutoff <= 0.0 {
        return Err(CliError::usage(
            "the numeric propagation needs a positive --cutoff when --temp is 0",
        ));
    }
    let analytic_run = DephasingRun::new(
        OhmicBath::new(args.c, args.omega0, Cutoff::None)?,
        args.temp,
        grid.clone(),
    )?;
    let numeric_run = DephasingRun::new(
        OhmicBath::new(args.c, args.omega0, Cutoff::Exponential(cutoff))?,
        args.temp,
        grid.clone(),
    )?;

    let analytic_states = grid
        .iter()
        .map(|&t| analytic_propagate(&rho0, &analytic_run, t))
        .collect::<Result<Vec<_>, _>>()?;
    let evolution = numeric_propagate(&rho0, &numeric_run)?;

    let levels: BTreeSet<usize> = if args.all_pairs {
        (0..=args.nmax).collect()
    } else {
        amplitudes
            .iter()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|&(n, _)| n)
            .collect()
    };
    let pairs: Vec<(usize, usize)> = levels
        .iter()
        .flat_map(|&n| {
            levels
                .iter()
                .filter(move |&&m| m >= n)
                .map(move |&m| (n, m))
        })
        .collect();
    let analytic = records(&grid, &analytic_states, &pairs);
    let numeric = evolution.records(&pairs);

    let fits = pairs
        .iter()
        .filter(|&&(n, m)| n != m && rho0.get(n, m).norm() > 0.0)
        .filter_map(|&(n, m)| {
            Some(Fit {
                n,
                ntilde: m,
                analytic_rate_per_s: fit_pair(&analytic, n, m)?,
                numeric_rate_per_s: fit_pair(&numeric, n, m)?,
                markov_rate_per_s: analytic_run.markov_rate(m as i64 - n as i64),
            })
        })
        .collect();

    Ok(EvolveReport {
        coupling: args.c,
        temperature_k: args.temp,
        omega0_rad_per_s: args.omega0,
        cutoff_rad_per_s: cutoff,
        n_max: args.nmax,
        high_temperature: analytic_run.high_temperature(),
        analytic: analytic.iter().map(Row::from).collect(),
        numeric: numeric.iter().map(Row::from).collect(),
        fits,
        warnings: evolution.warnings,
    })
}

pub fn run(args: &EvolveArgs, settings: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let mut report = compute(args)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if settings.natural() {
        let u = NaturalUnits::new(PhysicalConstants::codata2018());
        for row in report.analytic.iter_mut().chain(report.numeric.iter_mut()) {
            row.t = u.time_to_natural(row.t);
        }
        for fit in &mut report.fits {
            fit.analytic_rate_per_s = u.rate_to_natural(fit.analytic_rate_per_s);
            fit.numeric_rate_per_s = u.rate_to_natural(fit.numeric_rate_per_s);
            fit.markov_rate_per_s = u.rate_to_natural(fit.markov_rate_per_s);
        }
    }
    let (time_unit, rate_unit) = if settings.natural() {
        ("m", "1/m")
    } else {
        ("s", "1/s")
    };
    match settings.output_or(OutputFormat::Csv) {
        OutputFormat::Json => output::json(out, &report)?,
        OutputFormat::Csv => {
            let mut meta = vec![
                ("coupling", machine(report.coupling)),
                ("temperature_K", machine(report.temperature_k)),
                ("omega0_rad_per_s", machine(report.omega0_rad_per_s)),
                ("cutoff_rad_per_s", machine(report.cutoff_rad_per_s)),
                ("n_max", report.n_max.to_string()),
                ("high_temperature", report.high_temperature.to_string()),
                ("t_unit", time_unit.to_string()),
            ];
            meta.extend(report.warnings.iter().map(|w| ("warning", w.clone())));
            output::csv_metadata(out, settings, &meta)?;
            writeln!(out, "{EVOLUTION_CSV_HEADER}")?;
            for (label, rows) in [("analytic", &report.analytic), ("numeric", &report.numeric)] {
                writeln!(out, "# propagation: {label}")?;
                for r in rows {
                    writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        machine(r.t),
                        r.n,
                        r.ntilde,
                        machine(r.re),
                        machine(r.im),
                        machine(r.abs)
                    )?;
                }
            }
            for f in &report.fits {
                writeln!(
                    out,
                    "# fit n={} ntilde={}: analytic_rate={} numeric_rate={} markov_rate={} ({rate_unit})",
                    f.n,
                    f.ntilde,
                    machine(f.analytic_rate_per_s),
                    machine(f.numeric_rate_per_s),
                    machine(f.markov_rate_per_s)
                )?;
            }
        }
        OutputFormat::Table => {
            let last_t = report.analytic.last().map_or(0.0, |r| r.t);
            let final_abs = |rows: &[Row], n: usize, m: usize| {
                rows.iter()
                    .rev()
                    .find(|r| r.n == n && r.ntilde == m)
                    .map_or(f64::NAN, |r| r.abs)
            };
            let initial_abs = |n: usize, m: usize| {
                report
                    .analytic
                    .iter()
                    .find(|r| r.n == n && r.ntilde == m)
                    .map_or(f64::NAN, |r| r.abs)
            };
            writeln!(out, "t_max = {} {time_unit}", table(last_t))?;
            let header = [
                "n",
                "ntilde",
                "|rho(0)|",
                "analytic |rho(t_max)|",
                "numeric |rho(t_max)|",
                "analytic rate",
                "numeric rate",
                "markov rate",
            ];
            let rows: Vec<Vec<String>> = report
                .fits
                .iter()
                .map(|f| {
                    vec![
                        f.n.to_string(),
                        f.ntilde.to_string(),
                        table(initial_abs(f.n, f.ntilde)),
                        table(final_abs(&report.analytic, f.n, f.ntilde)),
                        table(final_abs(&report.numeric, f.n, f.ntilde)),
                        table(f.analytic_rate_per_s),
                        table(f.numeric_rate_per_s),
                        table(f.markov_rate_per_s),
                    ]
                })
                .collect();
            output::table(out, &header, &rows)?;
            writeln!(out, "rates in {rate_unit}")?;
        }
    }
    Ok(())
}
