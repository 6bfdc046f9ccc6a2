//! Pure dephasing of an oscillator coupled through its energy to an Ohmic bath.
//!
//! The system oscillator couples to the bath through its number operator,
//! H_I = ħω₀ a†a ⊗ Σᵢ λᵢ qᵢ/Δᵢ. The coupling commutes with the system
//! Hamiltonian, so populations never change and every coherence ρ_{nñ}
//! decays as exp[−(n−ñ)² Λ(t)]. Three routes to that decay live here:
//!
//! * [`analytic_propagate`]: the Born-Markov limit, rate C·k_BT/ħ·(n−ñ)²;
//! * [`exact_dephasing_exponent`]: Λ(t) as a frequency integral over the
//!   spectral density;
//! * [`numeric_propagate`]: time integration of the second-order time-local
//!   master equation, with the rate γ(t) built from the bath correlation
//!   function.

use std::f64::consts::{FRAC_1_PI, PI};
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{coth_half, OhmicBath};
use crate::error::{ensure_finite, ensure_non_negative, invalid, Error, Result};
use crate::export;
use crate::ode::{DormandPrince, StepControl};
use crate::quad::{self, Estimate, Tolerance};
use crate::series::{sum_with_tail, SeriesControl};
use crate::units::PhysicalConstants;

/// Prefactor a in Λ(t) = a·(Δn)²·∫dω j(ω)(ω₀²/ω²)coth(ħω/2k_BT)(1 − cos ωt).
///
/// Pinned against [`numeric_propagate`]: with J(ω) = π Σᵢ(ħω₀λᵢ)²δ(ω − ωᵢ)
/// the bath correlation function carries 1/π, and this value makes the
/// long-time slope of Λ equal the Markov rate C·k_BT/ħ·(Δn)² exactly.
pub const DEPHASING_CONVENTION: f64 = FRAC_1_PI;

pub const DEFAULT_N_MAX: usize = 16;

/// Tail mass above which the truncated Fock space is reported as too small.
pub const TAIL_MASS_WARNING: f64 = 1e-8;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Density matrix on the Fock space truncated at `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    rho: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn from_matrix(rho: DMatrix<Complex64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected a non-empty square matrix, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let candidate = Self { rho };
        let herm = candidate.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max deviation {herm:e})"
            )));
        }
        let tr = candidate.trace();
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, not 1")));
        }
        let min_eig = candidate.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not positive semidefinite (smallest eigenvalue {min_eig:e})"
            )));
        }
        Ok(candidate)
    }

    /// |ψ⟩⟨ψ| for ψ = Σ cₙ|n⟩, normalised. Repeated indices add.
    pub fn from_pure(n_max: usize, amplitudes: &[(usize, Complex64)]) -> Result<Self> {
        let dim = n_max + 1;
        let mut psi = vec![Complex64::new(0.0, 0.0); dim];
        for &(n, c) in amplitudes {
            if n > n_max {
                return Err(invalid(
                    "state",
                    format!("level {n} exceeds n_max = {n_max}"),
                ));
            }
            ensure_finite("amplitude", c.re)?;
            ensure_finite("amplitude", c.im)?;
            psi[n] += c;
        }
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("state", "all amplitudes are zero"));
        }
        let rho = DMatrix::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Self::from_matrix(rho)
    }

    /// Diagonal state with the given populations (normalised).
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        if populations.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(invalid("populations", "must be finite and non-negative"));
        }
        let total: f64 = populations.iter().sum();
        if total == 0.0 {
            return Err(invalid("populations", "sum to zero"));
        }
        let d = populations.len();
        let rho = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(populations[i] / total, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::from_matrix(rho)
    }

    pub fn maximally_mixed(n_max: usize) -> Self {
        let d = n_max + 1;
        Self {
            rho: DMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    Complex64::new(1.0 / d as f64, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn get(&self, n: usize, ntilde: usize) -> Complex64 {
        self.rho[(n, ntilde)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.rho[(n, n)].re).collect()
    }

    /// max |ρ_{nñ} − conj(ρ_{ñn})|.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let hermitian = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        hermitian
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Population in the two highest retained levels.
    pub fn tail_mass(&self) -> f64 {
        let d = self.dim();
        (d.saturating_sub(2)..d).map(|n| self.rho[(n, n)].re).sum()
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }
}

/// Tr(ρ²).
pub fn purity(rho: &FockDensityMatrix) -> f64 {
    rho.rho.iter().map(|c| c.norm_sqr()).sum()
}

/// Bath, temperature and output times for one dephasing calculation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DephasingRun {
    bath: OhmicBath,
    temperature: f64,
    t_grid: Vec<f64>,
    constants: PhysicalConstants,
}

impl DephasingRun {
    /// `temperature` in K, `t_grid` in s (non-negative, strictly increasing).
    /// The system frequency is the bath's reference frequency ω₀.
    pub fn new(bath: OhmicBath, temperature: f64, t_grid: Vec<f64>) -> Result<Self> {
        Self::with_constants(bath, temperature, t_grid, PhysicalConstants::codata2018())
    }

    pub fn with_constants(
        bath: OhmicBath,
        temperature: f64,
        t_grid: Vec<f64>,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        ensure_non_negative("temperature", temperature)?;
        for &t in &t_grid {
            ensure_non_negative("t_grid", t)?;
        }
        if t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("t_grid", "must be strictly increasing"));
        }
        Ok(Self {
            bath,
            temperature,
            t_grid,
            constants,
        })
    }

    /// Uniform grid of `steps + 1` points on [0, t_max].
    pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
        (0..=steps)
            .map(|i| t_max * i as f64 / steps as f64)
            .collect()
    }

    pub fn bath(&self) -> &OhmicBath {
        &self.bath
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }
    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
    pub fn omega0(&self) -> f64 {
        self.bath.omega0()
    }

    /// k_BT/ħ in s⁻¹.
    pub fn thermal_rate(&self) -> f64 {
        self.constants.k_b() * self.temperature / self.constants.hbar()
    }

    /// k_BT ≥ 10ħω₀.
    pub fn high_temperature(&self) -> bool {
        self.constants.k_b() * self.temperature >= 10.0 * self.constants.hbar() * self.omega0()
    }

    /// Born-Markov decay rate C·(k_BT/ħ)·(Δn)² of a coherence, s⁻¹.
    pub fn markov_rate(&self, delta_n: i64) -> f64 {
        self.bath.coupling() * self.thermal_rate() * (delta_n * delta_n) as f64
    }
}

/// ρ_{nñ}(t) = exp(−C(k_BT/ħ)(n−ñ)²t)·exp(−iω₀(n−ñ)t)·ρ_{nñ}(0).
pub fn analytic_propagate(
    rho0: &FockDensityMatrix,
    run: &DephasingRun,
    t: f64,
) -> Result<FockDensityMatrix> {
    ensure_non_negative("t", t)?;
    let rate = run.bath.coupling() * run.thermal_rate();
    let omega0 = run.omega0();
    let d = rho0.dim();
    let mut rho = rho0.rho.clone();
    for n in 0..d {
        for m in 0..d {
            if n == m {
                continue;
            }
            let dn = n as f64 - m as f64;
            let decay = (-rate * dn * dn * t).exp();
            let phase = Complex64::from_polar(1.0, -omega0 * dn * t);
            rho[(n, m)] *= phase * decay;
        }
    }
    Ok(FockDensityMatrix { rho })
}

/// Λ(t) with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub value: f64,
    pub error: f64,
}

/// Finite-time dephasing exponent Λ(t) of the coherence between levels
/// differing by `delta_n`: |ρ_{nñ}(t)| = e^{−Λ(t)}|ρ_{nñ}(0)|.
///
/// Needs an exponential cutoff: for a bare Ohmic density the vacuum part of
/// the integral diverges logarithmically.
pub fn exact_dephasing_exponent(
    run: &DephasingRun,
    delta_n: i64,
    t: f64,
) -> Result<ExponentEstimate> {
    ensure_non_negative("t", t)?;
    let omega_c = run.bath.cutoff_frequency().ok_or(Error::CutoffRequired)?;
    if delta_n == 0 || t == 0.0 || run.bath.coupling() == 0.0 {
        return Ok(ExponentEstimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let hbar_over_kt = if run.temperature > 0.0 {
        Some(run.constants.hbar() / (run.constants.k_b() * run.temperature))
    } else {
        None
    };
    let prefactor = DEPHASING_CONVENTION * (delta_n * delta_n) as f64;
    let bath = run.bath;
    let omega0_sq = bath.omega0() * bath.omega0();
    // f(ω) = a(Δn)² j(ω)(ω₀²/ω²)coth(ħω/2k_BT)
    let envelope = move |w: f64| {
        let thermal = hbar_over_kt.map_or(1.0, |b| coth_half(b * w));
        prefactor * bath.spectral_density_unchecked(w) * omega0_sq / (w * w) * thermal
    };
    let tol = Tolerance {
        abs: 1e-10,
        rel: 1e-10,
        max_subdivisions: 4000,
    };

    let first_period = 2.0 * PI / t;
    let head = quad::integrate(
        &|w: f64| {
            let s = (0.5 * w * t).sin();
            envelope(w) * 2.0 * s * s
        },
        0.0,
        first_period,
        tol,
    )?;
    let beyond = if hbar_over_kt.is_some() {
        // thermal factor decays on the scale k_BT/ħ, the cutoff on ω_c
        omega_c.max(1.0 / hbar_over_kt.unwrap_or(0.0))
    } else {
        omega_c
    };
    let smooth = quad::integrate_to_infinity(&envelope, first_period, beyond, tol)?;
    // ∫ f(ω)cos(ωt) from 2π/t: a quarter period up to the first zero, then half periods
    let half_period = PI / t;
    let first_zero = 2.5 * PI / t;
    let lead = quad::integrate(
        &|w: f64| envelope(w) * (w * t).cos(),
        first_period,
        first_zero,
        tol,
    )?;
    let oscillating = quad::integrate_oscillatory_tail(
        &|w: f64| envelope(w) * (w * t).cos(),
        first_zero,
        half_period,
        tol,
        200_000,
    )?;
    let total: Estimate = head + smooth - (lead + oscillating);
    Ok(ExponentEstimate {
        value: total.value,
        error: total.error,
    })
}

/// Time-local dephasing rate γ(t) per unit (Δn)², in s⁻¹:
///
/// γ(t) = ħ⁻² ∫₀ᵗ Re C(τ) dτ = (C/π) ∫₀^∞ dω e^{−ω/ω_c} coth(ħω/2k_BT) sin ωt,
///
/// evaluated term by term after expanding coth = 1 + 2Σₙe^{−nħω/k_BT}:
/// γ(t) = (C/π)[t/(τ₀² + t²) + 2Σₙ t/(τₙ² + t²)], τₙ = 1/ω_c + nħ/k_BT.
pub fn time_local_rate(run: &DephasingRun, t: f64) -> Result<f64> {
    ensure_non_negative("t", t)?;
    let omega_c = run.bath.cutoff_frequency().ok_or(Error::CutoffRequired)?;
    let c = run.bath.coupling();
    if t == 0.0 || c == 0.0 {
        return Ok(0.0);
    }
    let tau0 = 1.0 / omega_c;
    let vacuum = t / (tau0 * tau0 + t * t);
    if run.temperature == 0.0 {
        return Ok(c * FRAC_1_PI * vacuum);
    }
    let b = run.constants.hbar() / (run.constants.k_b() * run.temperature);
    let term = |n: f64| {
        let tau = tau0 + n * b;
        t / (tau * tau + t * t)
    };
    let tail = |x: f64| (t / (tau0 + x * b)).atan() / b;
    let scale = vacuum.max(1.0 / b);
    let features = (t / b).ceil() as usize;
    let thermal = sum_with_tail(
        term,
        tail,
        SeriesControl {
            tol: 1e-13 * scale,
            min_terms: 2 * features + 8,
            max_terms: 50_000_000,
        },
    )?;
    Ok(c * FRAC_1_PI * (vacuum + 2.0 * thermal.value))
}

/// States on the run's time grid plus integrator diagnostics.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<FockDensityMatrix>,
    pub warnings: Vec<String>,
    pub steps_taken: usize,
    pub steps_rejected: usize,
}

impl Evolution {
    /// ρ_{nñ} along the grid.
    pub fn element(&self, n: usize, ntilde: usize) -> Vec<Complex64> {
        self.states.iter().map(|s| s.get(n, ntilde)).collect()
    }

    pub fn records(&self, pairs: &[(usize, usize)]) -> Vec<EvolutionRecord> {
        records(&self.times, &self.states, pairs)
    }
}

/// Tail-mass and boundary-coherence warnings for an initial state.
pub fn truncation_warnings(rho0: &FockDensityMatrix) -> Vec<String> {
    let mut warnings = Vec::new();
    let tail = rho0.tail_mass();
    if tail > TAIL_MASS_WARNING {
        warnings.push(format!(
            "initial population {tail:e} in levels n > {} exceeds {TAIL_MASS_WARNING:e}; raise n_max",
            rho0.n_max().saturating_sub(2)
        ));
    }
    let d = rho0.dim();
    let boundary = (0..d)
        .flat_map(|n| (d.saturating_sub(2)..d).map(move |m| (n, m)))
        .filter(|&(n, m)| n != m)
        .map(|(n, m)| rho0.get(n, m).norm())
        .fold(0.0, f64::max);
    if boundary > TAIL_MASS_WARNING {
        warnings.push(format!(
            "coherences with the top two retained levels reach {boundary:e}; truncation may matter"
        ));
    }
    warnings
}

/// Integrate dρ/dt = −iω₀[a†a, ρ] − γ(t)[a†a, [a†a, ρ]] over the run's grid.
///
/// The free rotation is removed by working in the interaction picture and
/// restored analytically at each output time. The second-order
/// reorganisation shift proportional to [(a†a)², ρ] is taken as absorbed
/// into the renormalised ω₀.
pub fn numeric_propagate(rho0: &FockDensityMatrix, run: &DephasingRun) -> Result<Evolution> {
    numeric_propagate_with(rho0, run, StepControl::default())
}

pub fn numeric_propagate_with(
    rho0: &FockDensityMatrix,
    run: &DephasingRun,
    control: StepControl,
) -> Result<Evolution> {
    if run.t_grid.is_empty() {
        return Err(invalid("t_grid", "must not be empty"));
    }
    run.bath.cutoff_frequency().ok_or(Error::CutoffRequired)?;
    let d = rho0.dim();
    let number = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(i as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| -> Result<()> {
        let gamma = time_local_rate(run, t)?;
        let rho = DMatrix::from_column_slice(d, d, y);
        let inner = &number * &rho - &rho * &number;
        let double = &number * &inner - &inner * &number;
        for (out, v) in dy.iter_mut().zip(double.iter()) {
            *out = -*v * gamma;
        }
        Ok(())
    };
    let mut solver = DormandPrince::new(rhs, control);
    let mut y: Vec<Complex64> = rho0.rho.iter().copied().collect();
    let mut states = Vec::with_capacity(run.t_grid.len());
    let mut t_prev = 0.0;
    for &t in &run.t_grid {
        solver.advance(&mut y, t_prev, t)?;
        t_prev = t;
        let mut rho = DMatrix::from_column_slice(d, d, &y);
        for n in 0..d {
            for m in 0..d {
                if n != m {
                    let dn = n as f64 - m as f64;
                    rho[(n, m)] *= Complex64::from_polar(1.0, -run.omega0() * dn * t);
                }
            }
        }
        states.push(FockDensityMatrix { rho });
    }
    Ok(Evolution {
        times: run.t_grid.clone(),
        states,
        warnings: truncation_warnings(rho0),
        steps_taken: solver.steps_taken,
        steps_rejected: solver.steps_rejected,
    })
}

/// Exponential decay rate from a least-squares fit of ln|x| against t over
/// the last decade of the grid (t ≥ t_last/10).
pub fn fit_decay_rate(times: &[f64], moduli: &[f64]) -> Result<f64> {
    if times.len() != moduli.len() {
        return Err(invalid("moduli", "length differs from times"));
    }
    let t_last = *times.last().ok_or_else(|| invalid("times", "empty"))?;
    let points: Vec<(f64, f64)> = times
        .iter()
        .zip(moduli)
        .filter(|(&t, _)| t >= 0.1 * t_last)
        .map(|(&t, &m)| (t, m))
        .collect();
    if points.len() < 2 {
        return Err(invalid(
            "times",
            "need at least two points in the last decade",
        ));
    }
    if points.iter().any(|&(_, m)| m <= 0.0 || !m.is_finite()) {
        return Err(invalid("moduli", "must be positive to fit an exponential"));
    }
    let k = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, m) in &points {
        sxy += (t - mean_t) * (m.ln() - mean_y);
        sxx += (t - mean_t) * (t - mean_t);
    }
    Ok(-sxy / sxx)
}

/// One row of an evolution CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionRecord {
    pub t: f64,
    pub n: usize,
    pub ntilde: usize,
    pub value: Complex64,
}

pub fn records(
    times: &[f64],
    states: &[FockDensityMatrix],
    pairs: &[(usize, usize)],
) -> Vec<EvolutionRecord> {
    times
        .iter()
        .zip(states)
        .flat_map(|(&t, rho)| {
            pairs.iter().map(move |&(n, ntilde)| EvolutionRecord {
                t,
                n,
                ntilde,
                value: rho.get(n, ntilde),
            })
        })
        .collect()
}

pub const EVOLUTION_CSV_HEADER: &str = "t,n,ntilde,re,im,abs";

/// Columns t, n, ntilde, re, im, abs.
pub fn write_evolution_csv<W: Write>(out: &mut W, rows: &[EvolutionRecord]) -> io::Result<()> {
    writeln!(out, "{EVOLUTION_CSV_HEADER}")?;
    write_evolution_rows(out, rows)
}

pub fn write_evolution_rows<W: Write>(out: &mut W, rows: &[EvolutionRecord]) -> io::Result<()> {
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            export::machine(r.t),
            r.n,
            r.ntilde,
            export::machine(r.value.re),
            export::machine(r.value.im),
            export::machine(r.value.norm())
        )?;
    }
    Ok(())
}
