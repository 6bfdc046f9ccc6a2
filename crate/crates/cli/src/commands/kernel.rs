use std::io::Write;

use gravidec::export::{machine, table};
use gravidec::kernels::{
    evaluate_grid, grid_points, write_grid_csv, GridRow, KernelKind, KernelParams, DEFAULT_N_TERMS,
    DEFAULT_TOL,
};
use gravidec::parallel::Execution;
use gravidec::units::{NaturalUnits, PhysicalConstants};
use serde::{Deserialize, Serialize};

use crate::args::{KernelArgs, OutputFormat};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output;

/// Regulator used when none is given: this fraction of the smallest |r|.
pub const DEFAULT_EPSILON_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub which: String,
    pub kappa: f64,
    /// Natural units (1/m).
    pub temperature: f64,
    pub epsilon: f64,
    pub tol: f64,
    /// (κ/4)²T/(2π), reported for intN.
    pub limit: Option<f64>,
    pub rows: Vec<GridRow>,
}

/// `start:stop:count` or a single value.
fn parse_range(text: &str, axis: &str) -> CliResult<Vec<f64>> {
    let bad = || {
        CliError::usage(format!(
            "cannot parse {axis} range `{text}` (expected start:stop:count)"
        ))
    };
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.parse().map_err(|_| bad())?]),
        [a, b, n] => {
            let a: f64 = a.parse().map_err(|_| bad())?;
            let b: f64 = b.parse().map_err(|_| bad())?;
            let n: usize = n.parse().map_err(|_| bad())?;
            match n {
                0 => Err(bad()),
                1 => Ok(vec![a]),
                _ => Ok((0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect()),
            }
        }
        _ => Err(bad()),
    }
}

/// `r=start:stop:count,t=start:stop:count`.
pub fn parse_grid(spec: &str) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let (mut rs, mut ts) = (None, None);
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('=') {
            Some(("r", range)) => rs = Some(parse_range(range, "r")?),
            Some(("t", range)) => ts = Some(parse_range(range, "t")?),
            _ => {
                return Err(CliError::usage(format!(
                    "grid entry `{part}` must be r=start:stop:count or t=start:stop:count"
                )))
            }
        }
    }
    match (rs, ts) {
        (Some(r), Some(t)) => Ok((r, t)),
        _ => Err(CliError::usage(format!(
            "grid `{spec}` needs both r= and t= entries"
        ))),
    }
}

pub fn compute(args: &KernelArgs, settings: &Settings) -> CliResult<KernelReport> {
    let kind: KernelKind = args.which.parse()?;
    let constants = PhysicalConstants::codata2018();
    let units = NaturalUnits::new(constants);
    let natural = settings.natural();

    let (rs, ts) = match (&args.grid, args.r, args.t) {
        (Some(spec), None, None) => parse_grid(spec)?,
        (None, Some(r), Some(t)) => (vec![r], vec![t]),
        (Some(_), _, _) => return Err(CliError::usage("use either --grid or --r/--t, not both")),
        _ => return Err(CliError::usage("give --r and --t, or --grid")),
    };
    // times enter as c·t
    let ts_natural: Vec<f64> = if natural {
        ts.clone()
    } else {
        ts.iter().map(|&t| units.time_to_natural(t)).collect()
    };
    let temperature = if natural {
        args.temp
    } else {
        units.temperature_to_natural(args.temp)
    };
    let kappa = args.kappa.unwrap_or(if natural {
        4.0
    } else {
        constants.kappa_natural()
    });
    let smallest_r = rs
        .iter()
        .map(|r| r.abs())
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let epsilon = settings.epsilon.unwrap_or(if smallest_r.is_finite() {
        DEFAULT_EPSILON_FRACTION * smallest_r
    } else {
        DEFAULT_EPSILON_FRACTION
    });
    let tol = settings.tol.unwrap_or(DEFAULT_TOL);
    let params = KernelParams::new(
        kappa,
        temperature,
        epsilon,
        tol,
        args.n_terms.unwrap_or(DEFAULT_N_TERMS),
    )?;

    let mut rows = evaluate_grid(
        kind,
        &grid_points(&rs, &ts_natural),
        &params,
        Execution::Parallel,
    )?;
    if !natural {
        let c = constants.c();
        for row in &mut rows {
            row.t /= c;
        }
    }
    Ok(KernelReport {
        which: match kind {
            KernelKind::Noise => "N",
            KernelKind::Dissipation => "D",
            KernelKind::IntegratedNoise => "intN",
        }
        .to_string(),
        kappa,
        temperature,
        epsilon,
        tol,
        limit: (kind == KernelKind::IntegratedNoise)
            .then(|| params.high_temperature_noise_prefactor()),
        rows,
    })
}

pub fn run(args: &KernelArgs, settings: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let report = compute(args, settings)?;
    let (r_unit, t_unit) = if settings.natural() {
        ("1", "1")
    } else {
        ("m", "s")
    };
    match settings.output_or(OutputFormat::Csv) {
        OutputFormat::Json => output::json(out, &report)?,
        OutputFormat::Csv => {
            let mut meta = vec![
                ("which", report.which.clone()),
                ("kappa", machine(report.kappa)),
                ("temperature_natural", machine(report.temperature)),
                ("epsilon", machine(report.epsilon)),
                ("kernel_tol", machine(report.tol)),
                ("r_unit", r_unit.to_string()),
                ("t_unit", t_unit.to_string()),
            ];
            if let Some(limit) = report.limit {
                meta.push(("high_temperature_limit", machine(limit)));
            }
            output::csv_metadata(out, settings, &meta)?;
            let mut w = &mut *out;
            write_grid_csv(&mut w, &report.rows)?;
        }
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|row| {
                    vec![
                        table(row.r),
                        table(row.t),
                        table(row.value.value),
                        table(row.value.err_estimate),
                        row.value.method.as_str().to_string(),
                    ]
                })
                .collect();
            output::table(out, &["r", "t", "value", "err", "method"], &rows)?;
            if let Some(limit) = report.limit {
                writeln!(
                    out,
                    "high-temperature limit (kappa/4)^2 T/(2 pi) = {}",
                    table(limit)
                )?;
            }
        }
    }
    Ok(())
}
