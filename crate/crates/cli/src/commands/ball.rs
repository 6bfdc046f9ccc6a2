use std::io::Write;

use gravidec::decoherence::{decoherence_rate, rate_from_balls_physical, RateResult};
use gravidec::export::{machine, table};
use gravidec::matter::{
    line, profile_samples, write_profile_csv, BallSuperposition, GaussianBall, Vec3,
};
use gravidec::units::{NaturalUnits, PhysicalConstants};
use serde::{Deserialize, Serialize};

use super::{parse_floats, parse_vec3};
use crate::args::{BallArgs, OutputFormat};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output;

/// Largest relative gap accepted between the ball rate and the closed form.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Profile lines extend this many radii beyond each centre.
const PROFILE_REACH: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallInfo {
    pub phi0: f64,
    pub radius_m: f64,
    pub r0_m: Vec3,
    pub rest_energy_natural: f64,
    pub rest_energy_j: f64,
    pub compton_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairInfo {
    pub separation_m: f64,
    pub delta_e_natural: f64,
    pub closed_form_rate_per_s: f64,
    pub relative_difference: f64,
    pub identity_ok: bool,
    pub rate: RateResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    /// Field mass in 1/m.
    pub mass_natural: f64,
    pub balls: Vec<BallInfo>,
    pub pair: Option<PairInfo>,
}

fn info(ball: &GaussianBall, constants: &PhysicalConstants) -> BallInfo {
    BallInfo {
        phi0: ball.phi0(),
        radius_m: ball.radius(),
        r0_m: ball.r0(),
        rest_energy_natural: ball.rest_energy(),
        rest_energy_j: ball.rest_energy_joules(constants),
        compton_ok: ball.compton_ok(),
    }
}

fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn parse_pair(spec: &str, mass: f64) -> CliResult<GaussianBall> {
    let v = parse_floats(spec, "--pair")?;
    let r0 = match v.len() {
        2 => [0.0; 3],
        5 => [v[2], v[3], v[4]],
        _ => {
            return Err(CliError::usage(format!(
                "--pair `{spec}` must be phi0,radius or phi0,radius,x,y,z"
            )))
        }
    };
    Ok(GaussianBall::new(v[0], r0, v[1], mass)?)
}

fn build(args: &BallArgs, natural: bool) -> CliResult<(Vec<GaussianBall>, BallReport)> {
    let constants = PhysicalConstants::codata2018();
    let mass = if natural {
        args.m
    } else {
        NaturalUnits::new(constants).mass_to_natural(args.m)
    };
    let r0 = match &args.r0 {
        Some(text) => parse_vec3(text, "--r0")?,
        None => [0.0; 3],
    };
    let first = GaussianBall::new(args.phi0, r0, args.radius, mass)?;
    let mut balls = vec![first];

    let pair = match (&args.pair, args.temp) {
        (None, None) => None,
        (None, Some(_)) => return Err(CliError::usage("--temp only applies together with --pair")),
        (Some(_), None) => return Err(CliError::usage("--pair needs --temp (kelvin)")),
        (Some(spec), Some(temp)) => {
            let second = parse_pair(spec, mass)?;
            balls.push(second);
            let sup = BallSuperposition::new(first, second)?;
            let rate = rate_from_balls_physical(&sup, temp, &constants)?;
            let closed = decoherence_rate(rate.delta_e_j, temp, &constants)?;
            let rel = relative_difference(rate.rate_per_s, closed.rate_per_s);
            Some(PairInfo {
                separation_m: sup.separation(),
                delta_e_natural: sup.energy_difference(),
                closed_form_rate_per_s: closed.rate_per_s,
                relative_difference: rel,
                identity_ok: rel <= IDENTITY_TOLERANCE,
                rate,
            })
        }
    };

    let report = BallReport {
        mass_natural: mass,
        balls: balls.iter().map(|b| info(b, &constants)).collect(),
        pair,
    };
    Ok((balls, report))
}

fn profile_line(balls: &[GaussianBall], samples: usize) -> Vec<Vec3> {
    let a = &balls[0];
    let b = balls.last().unwrap_or(a);
    let (ca, cb) = (a.r0(), b.r0());
    let d = [cb[0] - ca[0], cb[1] - ca[1], cb[2] - ca[2]];
    let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let u = if len > 0.0 {
        [d[0] / len, d[1] / len, d[2] / len]
    } else {
        [1.0, 0.0, 0.0]
    };
    let (ra, rb) = (PROFILE_REACH * a.radius(), PROFILE_REACH * b.radius());
    line(
        [ca[0] - ra * u[0], ca[1] - ra * u[1], ca[2] - ra * u[2]],
        [cb[0] + rb * u[0], cb[1] + rb * u[1], cb[2] + rb * u[2]],
        samples,
    )
}

pub fn run(args: &BallArgs, settings: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let natural = settings.natural();
    let (balls, report) = build(args, natural)?;
    let constants = PhysicalConstants::codata2018();
    let units = NaturalUnits::new(constants);
    match settings.output_or(OutputFormat::Table) {
        OutputFormat::Json => output::json(out, &report)?,
        OutputFormat::Csv => {
            if args.samples == 0 {
                return Err(CliError::usage("--samples must be at least 1"));
            }
            let mut meta = vec![("mass_natural", machine(report.mass_natural))];
            for b in &report.balls {
                meta.push(("rest_energy_natural", machine(b.rest_energy_natural)));
            }
            if let Some(p) = &report.pair {
                meta.push(("delta_E_natural", machine(p.delta_e_natural)));
                meta.push(("rate_per_s", machine(p.rate.rate_per_s)));
            }
            output::csv_metadata(out, settings, &meta)?;
            let samples = profile_samples(&balls, &profile_line(&balls, args.samples));
            let mut w = &mut *out;
            write_profile_csv(&mut w, &samples)?;
        }
        OutputFormat::Table => {
            let mut rows = vec![("mass", format!("{} 1/m", table(report.mass_natural)))];
            let labels = [
                ("rest energy (a)", "compton_ok (a)"),
                ("rest energy (b)", "compton_ok (b)"),
            ];
            for (b, (energy_label, compton_label)) in report.balls.iter().zip(labels) {
                let energy = if natural {
                    format!("{} 1/m", table(b.rest_energy_natural))
                } else {
                    format!("{} J", table(b.rest_energy_j))
                };
                rows.push((energy_label, energy));
                rows.push((compton_label, b.compton_ok.to_string()));
            }
            if let Some(p) = &report.pair {
                let (rate, closed, unit) = if natural {
                    (
                        units.rate_to_natural(p.rate.rate_per_s),
                        units.rate_to_natural(p.closed_form_rate_per_s),
                        "1/m",
                    )
                } else {
                    (p.rate.rate_per_s, p.closed_form_rate_per_s, "1/s")
                };
                rows.push(("separation", format!("{} m", table(p.separation_m))));
                rows.push(("delta E", format!("{} 1/m", table(p.delta_e_natural))));
                rows.push(("rate", format!("{} {unit}", table(rate))));
                rows.push(("closed-form rate", format!("{} {unit}", table(closed))));
                rows.push(("relative difference", table(p.relative_difference)));
                rows.push(("identity_ok", p.identity_ok.to_string()));
                if let Some(m) = p.rate.markov_time_s {
                    rows.push(("markov time", format!("{} s", table(m))));
                }
                rows.push(("high_t_ok", output::flag(p.rate.flags.high_t_ok)));
                rows.push(("markov_ok", output::flag(p.rate.flags.markov_ok)));
            }
            output::key_values(out, &rows)?;
        }
    }
    Ok(())
}
