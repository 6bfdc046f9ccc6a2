//! Thermal graviton noise and dissipation kernels.
//!
//! In natural units (ħ = c = k_B = 1) the kernels are
//!
//! N(r, t) = (κ/4)² ∫ d³k/(2π)³ e^{ik·r}/k · cos(kt) [1 + 2n(k)],
//! D(r, t) = (κ/4)² ∫ d³k/(2π)³ e^{ik·r}/k · sin(kt).
//!
//! The angular integral is done analytically, leaving (2π²r)⁻¹∫₀^∞ dk
//! sin(kr)·(...). The vacuum part is a distribution and is only defined with
//! the UV regulator e^{−εk}. Expanding 2n(k) = 2Σₙ e^{−nk/T} turns the
//! thermal part into the same regulated closed form with ε → sₙ = ε + n/T,
//! so every evaluation is a rapidly summable series of rational functions.
//!
//! A direct adaptive quadrature of the radial integral is available as an
//! independent route ([`noise_kernel_quadrature`],
//! [`dissipation_kernel_quadrature`]).

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::bath::coth_half;
use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, invalid, Error, Result};
use crate::export;
use crate::parallel::{self, Execution};
use crate::quad::{self, Estimate, Tolerance};
use crate::series::{sum_with_tail, SeriesControl, SeriesSum};
use crate::units::{NaturalUnits, PhysicalConstants};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_N_TERMS: usize = 10_000_000;

/// Coupling, temperature and regulator, all in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    kappa: f64,
    temperature: f64,
    epsilon: f64,
    tol: f64,
    n_terms: usize,
}

impl KernelParams {
    /// `tol` is a mixed tolerance: results satisfy err ≤ tol·max(1, |value|).
    pub fn new(
        kappa: f64,
        temperature: f64,
        epsilon: f64,
        tol: f64,
        n_terms: usize,
    ) -> Result<Self> {
        ensure_positive("kappa", kappa)?;
        ensure_non_negative("temperature", temperature)?;
        ensure_positive("epsilon", epsilon)?;
        ensure_positive("tol", tol)?;
        if n_terms < 1 {
            return Err(invalid("n_terms", "must be at least 1"));
        }
        Ok(Self {
            kappa,
            temperature,
            epsilon,
            tol,
            n_terms,
        })
    }

    /// Default tolerance and series cap.
    pub fn natural(kappa: f64, temperature: f64, epsilon: f64) -> Result<Self> {
        Self::new(kappa, temperature, epsilon, DEFAULT_TOL, DEFAULT_N_TERMS)
    }

    /// κ = √(32πG) and T = k_BT/ħc from physical constants, lengths in metres.
    pub fn from_constants(
        constants: &PhysicalConstants,
        temperature_kelvin: f64,
        epsilon_metres: f64,
    ) -> Result<Self> {
        let units = NaturalUnits::new(*constants);
        ensure_non_negative("temperature", temperature_kelvin)?;
        Self::natural(
            constants.kappa_natural(),
            units.temperature_to_natural(temperature_kelvin),
            epsilon_metres,
        )
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }
    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn with_temperature(self, temperature: f64) -> Result<Self> {
        Self::new(
            self.kappa,
            temperature,
            self.epsilon,
            self.tol,
            self.n_terms,
        )
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(
            self.kappa,
            self.temperature,
            epsilon,
            self.tol,
            self.n_terms,
        )
    }

    pub fn with_tol(self, tol: f64) -> Result<Self> {
        Self::new(
            self.kappa,
            self.temperature,
            self.epsilon,
            tol,
            self.n_terms,
        )
    }

    /// (κ/4)²/(2π²), the prefactor left after the angular integration.
    fn radial_prefactor(&self) -> f64 {
        let q = self.kappa / 4.0;
        q * q / (2.0 * PI * PI)
    }

    /// (κ/4)²·T/(2π): the high-temperature, long-time limit of ∫₀ᵗ N dτ.
    pub fn high_temperature_noise_prefactor(&self) -> f64 {
        let q = self.kappa / 4.0;
        q * q * self.temperature / (2.0 * PI)
    }

    fn accepts(&self, value: f64, err: f64) -> bool {
        err <= self.tol * value.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    ClosedForm,
    Series,
    Quadrature,
}

impl KernelMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelMethod::ClosedForm => "closed_form",
            KernelMethod::Series => "series",
            KernelMethod::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub err_estimate: f64,
    pub method: KernelMethod,
}

/// x ↦ atan(x)/x, continuous at 0.
fn atan_ratio(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 3.0
    } else {
        x.atan() / x
    }
}

/// x ↦ ln(1 + x)/x, continuous at 0.
fn log1p_ratio(x: f64) -> f64 {
    if x.abs() < 1e-10 {
        1.0 - x / 2.0
    } else {
        x.ln_1p() / x
    }
}

/// (2r)⁻¹∫₀^∞ dk e^{−sk}[sin k(r+t) + sin k(r−t)] written without the
/// cancellation at small r: (s² + r² − t²)/((s² + (r+t)²)(s² + (r−t)²)).
fn noise_term(s: f64, r: f64, t: f64) -> f64 {
    let s2 = s * s;
    (s2 + r * r - t * t) / ((s2 + (r + t) * (r + t)) * (s2 + (r - t) * (r - t)))
}

/// ∫_{s0}^∞ noise_term(s) ds = [atan((r+t)/s₀) + atan((r−t)/s₀)]/(2r), for s₀ > r + |t|.
fn noise_term_tail(s0: f64, r: f64, t: f64) -> f64 {
    let d = s0 * s0 - r * r + t * t;
    let y = 2.0 * r * s0 / d;
    atan_ratio(y) * s0 / d
}

/// (r)⁻¹∫₀^{t_max} dτ ∫₀^∞ dk e^{−sk} sin(kr) cos(kτ)
/// = ln[(s² + (r+t_max)²)/(s² + (r−t_max)²)]/(4r).
fn integrated_term(s: f64, r: f64, t_max: f64) -> f64 {
    let d = s * s + (r - t_max) * (r - t_max);
    let u = 4.0 * r * t_max / d;
    t_max * log1p_ratio(u) / d
}

/// ∫_{s0}^∞ integrated_term(s) ds.
fn integrated_term_tail(s0: f64, r: f64, t_max: f64) -> f64 {
    let a = r + t_max;
    let b = (r - t_max).abs();
    let log_part = s0 * (4.0 * r * t_max / (s0 * s0 + b * b)).ln_1p();
    (2.0 * a * (a / s0).atan() - 2.0 * b * (b / s0).atan() - log_part) / (4.0 * r)
}

/// Σₙ term(ε + n/T) by the tail-corrected series; `features` is the largest
/// length scale at which the terms change character.
fn thermal_series<G, H>(
    params: &KernelParams,
    features: f64,
    scale: f64,
    term: G,
    tail: H,
) -> Result<SeriesSum>
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let temp = params.temperature;
    let eps = params.epsilon;
    let pref = params.radial_prefactor();
    // absolute tolerance on the bracketed sum, before the prefactor and the factor 2
    let tol = 0.25 * params.tol * (1.0 / pref).max(scale);
    let min_terms = (2.0 * temp * features).ceil() as usize + 8;
    sum_with_tail(
        |n| term(eps + n / temp),
        // dn = T ds
        |x| temp * tail(eps + x / temp),
        SeriesControl {
            tol,
            min_terms: min_terms.min(params.n_terms),
            max_terms: params.n_terms,
        },
    )
}

fn finish(params: &KernelParams, vacuum: f64, thermal: Option<SeriesSum>) -> Result<KernelValue> {
    let pref = params.radial_prefactor();
    let (bracket, bracket_err, method) = match thermal {
        None => (
            vacuum,
            8.0 * f64::EPSILON * vacuum.abs(),
            KernelMethod::ClosedForm,
        ),
        Some(s) => (
            vacuum + 2.0 * s.value,
            8.0 * f64::EPSILON * vacuum.abs() + 2.0 * s.error,
            KernelMethod::Series,
        ),
    };
    let value = pref * bracket;
    let err_estimate = pref * bracket_err;
    if !params.accepts(value, err_estimate) {
        return Err(Error::SeriesNotConverged {
            terms: thermal.map_or(0, |s| s.terms),
            partial: value,
            bound: err_estimate,
        });
    }
    Ok(KernelValue {
        value,
        err_estimate,
        method,
    })
}

/// N(r, t) with the e^{−εk} regulator. `r = 0` is served by the limit of
/// the same closed form.
pub fn noise_kernel(r: f64, t: f64, params: &KernelParams) -> Result<KernelValue> {
    ensure_non_negative("r", r)?;
    ensure_finite("t", t)?;
    let vacuum = noise_term(params.epsilon, r, t);
    let thermal = if params.temperature > 0.0 {
        Some(thermal_series(
            params,
            r + t.abs() + params.epsilon,
            vacuum.abs(),
            |s| noise_term(s, r, t),
            |s0| noise_term_tail(s0, r, t),
        )?)
    } else {
        None
    };
    finish(params, vacuum, thermal)
}

/// D(r, t) with the e^{−εk} regulator:
/// (κ/4)²/(2π²) · 2εt/((ε² + (r−t)²)(ε² + (r+t)²)).
pub fn dissipation_kernel(r: f64, t: f64, params: &KernelParams) -> Result<KernelValue> {
    ensure_non_negative("r", r)?;
    ensure_finite("t", t)?;
    let e = params.epsilon;
    let e2 = e * e;
    let bracket = 2.0 * e * t / ((e2 + (r - t) * (r - t)) * (e2 + (r + t) * (r + t)));
    let value = params.radial_prefactor() * bracket;
    Ok(KernelValue {
        value,
        err_estimate: 8.0 * f64::EPSILON * value.abs(),
        method: KernelMethod::ClosedForm,
    })
}

/// ∫₀^{t_max} N(r, τ) dτ together with its high-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratedNoise {
    pub value: KernelValue,
    /// (κ/4)²·T/(2π).
    pub limit: f64,
    /// t_max ≥ 10·r and T·t_max ≥ 10, where the limit is expected to hold.
    pub in_limit_regime: bool,
}

pub fn time_integrated_noise(r: f64, t_max: f64, params: &KernelParams) -> Result<IntegratedNoise> {
    ensure_positive("r", r)?;
    ensure_non_negative("t_max", t_max)?;
    let limit = params.high_temperature_noise_prefactor();
    let in_limit_regime =
        params.temperature > 0.0 && t_max >= 10.0 * r && params.temperature * t_max >= 10.0;
    if t_max == 0.0 {
        return Ok(IntegratedNoise {
            value: KernelValue {
                value: 0.0,
                err_estimate: 0.0,
                method: KernelMethod::ClosedForm,
            },
            limit,
            in_limit_regime,
        });
    }
    let vacuum = integrated_term(params.epsilon, r, t_max);
    let thermal = if params.temperature > 0.0 {
        Some(thermal_series(
            params,
            r + t_max + params.epsilon,
            vacuum.abs().max(params.temperature * PI),
            |s| integrated_term(s, r, t_max),
            |s0| integrated_term_tail(s0, r, t_max),
        )?)
    } else {
        None
    };
    Ok(IntegratedNoise {
        value: finish(params, vacuum, thermal)?,
        limit,
        in_limit_regime,
    })
}

/// ∫₀^K of `f` split into half-period panels plus an exponential tail bound.
fn radial_quadrature<F: Fn(f64) -> f64>(
    f: &F,
    frequency: f64,
    params: &KernelParams,
    tail_bound: impl Fn(f64) -> f64,
    abs_tol: f64,
) -> Result<Estimate> {
    let eps = params.epsilon;
    // e^{−εK} small against the tolerance
    let mut k_max = 40.0 / eps;
    while tail_bound(k_max) > 0.1 * abs_tol {
        k_max *= 1.5;
    }
    let panel = if frequency > 0.0 {
        (PI / frequency).min(k_max)
    } else {
        k_max
    };
    let panels = (k_max / panel).ceil() as usize;
    let panel_tol = Tolerance {
        abs: 0.5 * abs_tol / panels as f64,
        rel: 1e-13,
        max_subdivisions: 200,
    };
    let mut total = Estimate::ZERO;
    for i in 0..panels {
        let a = i as f64 * panel;
        let b = ((i + 1) as f64 * panel).min(k_max);
        total = total + quad::integrate(f, a, b, panel_tol)?;
    }
    total.error += tail_bound(k_max);
    Ok(total)
}

/// N(r, t) by direct adaptive quadrature of the regulated radial integral
/// (κ/4)²/(2π²r) ∫₀^∞ dk e^{−εk} sin(kr) cos(kt) coth(k/2T). Needs r > 0.
pub fn noise_kernel_quadrature(r: f64, t: f64, params: &KernelParams) -> Result<KernelValue> {
    ensure_positive("r", r)?;
    ensure_finite("t", t)?;
    let eps = params.epsilon;
    let temp = params.temperature;
    let pref = params.radial_prefactor();
    let thermal = move |k: f64| if temp > 0.0 { coth_half(k / temp) } else { 1.0 };
    let integrand = |k: f64| (-eps * k).exp() * (k * r).sin() / r * (k * t).cos() * thermal(k);
    // |integrand| ≤ e^{−εk}·coth(k/2T)/r
    let tail = |k: f64| (-eps * k).exp() / (eps * r) * thermal(k);
    let abs_tol = 0.25 * params.tol / pref;
    let est = radial_quadrature(&integrand, r + t.abs(), params, tail, abs_tol)?;
    Ok(KernelValue {
        value: pref * est.value,
        err_estimate: pref * est.error,
        method: KernelMethod::Quadrature,
    })
}

/// D(r, t) by direct adaptive quadrature of
/// (κ/4)²/(2π²r) ∫₀^∞ dk e^{−εk} sin(kr) sin(kt). Needs r > 0.
pub fn dissipation_kernel_quadrature(r: f64, t: f64, params: &KernelParams) -> Result<KernelValue> {
    ensure_positive("r", r)?;
    ensure_finite("t", t)?;
    let eps = params.epsilon;
    let pref = params.radial_prefactor();
    let integrand = |k: f64| (-eps * k).exp() * (k * r).sin() / r * (k * t).sin();
    let tail = |k: f64| (-eps * k).exp() / (eps * r);
    let abs_tol = 0.25 * params.tol / pref;
    let est = radial_quadrature(&integrand, r + t.abs(), params, tail, abs_tol)?;
    Ok(KernelValue {
        value: pref * est.value,
        err_estimate: pref * est.error,
        method: KernelMethod::Quadrature,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Noise,
    Dissipation,
    /// ∫₀ᵗ N(r, τ) dτ, with the grid's t read as t_max.
    IntegratedNoise,
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "noise" => Ok(KernelKind::Noise),
            "D" | "dissipation" => Ok(KernelKind::Dissipation),
            "intN" | "integrated" => Ok(KernelKind::IntegratedNoise),
            other => Err(invalid(
                "which",
                format!("expected N, D or intN, got `{other}`"),
            )),
        }
    }
}

pub fn evaluate(kind: KernelKind, r: f64, t: f64, params: &KernelParams) -> Result<KernelValue> {
    match kind {
        KernelKind::Noise => noise_kernel(r, t, params),
        KernelKind::Dissipation => dissipation_kernel(r, t, params),
        KernelKind::IntegratedNoise => time_integrated_noise(r, t, params).map(|v| v.value),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub r: f64,
    pub t: f64,
    pub value: KernelValue,
}

/// Evaluate a kernel on `(r, t)` points. Fails on the first point that does.
pub fn evaluate_grid(
    kind: KernelKind,
    points: &[(f64, f64)],
    params: &KernelParams,
    exec: Execution,
) -> Result<Vec<GridRow>> {
    parallel::map(points, exec, |&(r, t)| {
        evaluate(kind, r, t, params).map(|value| GridRow { r, t, value })
    })
    .into_iter()
    .collect()
}

/// Cartesian product of r and t samples, r-major.
pub fn grid_points(rs: &[f64], ts: &[f64]) -> Vec<(f64, f64)> {
    rs.iter()
        .flat_map(|&r| ts.iter().map(move |&t| (r, t)))
        .collect()
}

pub const KERNEL_CSV_HEADER: &str = "r,t,value,err,method";

/// Columns r, t, value, err, method.
pub fn write_grid_csv<W: Write>(out: &mut W, rows: &[GridRow]) -> io::Result<()> {
    writeln!(out, "{KERNEL_CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            export::machine(row.r),
            export::machine(row.t),
            export::machine(row.value.value),
            export::machine(row.value.err_estimate),
            row.value.method.as_str()
        )?;
    }
    Ok(())
}
