//! Gaussian matter balls: static coherent-state profiles of a massive scalar
//! field, ⟨φ(r)⟩ = φ₀ exp(−|r − r₀|²/2R²), in natural units with lengths in
//! metres (φ₀ and m in m⁻¹).

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, invalid, Error, Result};
use crate::export;
use crate::parallel::{self, Execution};
use crate::units::{NaturalUnits, PhysicalConstants};

/// R·m at or above which the ball is treated as much larger than its Compton wavelength.
pub const COMPTON_THRESHOLD: f64 = 100.0;
/// ct ≫ max(separation, R) is taken to mean ct ≥ 10·max(...).
pub const MARKOV_SAFETY_FACTOR: f64 = 10.0;
/// Closed-form and quadrature rest energies beyond this relative gap are an error.
pub const ENERGY_MISMATCH_TOLERANCE: f64 = 1e-8;

pub type Vec3 = [f64; 3];

fn distance_squared(a: Vec3, b: Vec3) -> f64 {
    (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBall {
    phi0: f64,
    r0: Vec3,
    radius: f64,
    mass: f64,
}

impl GaussianBall {
    pub fn new(phi0: f64, r0: Vec3, radius: f64, mass: f64) -> Result<Self> {
        ensure_positive("phi0", phi0)?;
        ensure_positive("radius", radius)?;
        ensure_positive("mass", mass)?;
        for x in r0 {
            ensure_finite("r0", x)?;
        }
        Ok(Self {
            phi0,
            r0,
            radius,
            mass,
        })
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }
    pub fn r0(&self) -> Vec3 {
        self.r0
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// R·m ≥ 100.
    pub fn compton_ok(&self) -> bool {
        self.radius * self.mass >= COMPTON_THRESHOLD
    }

    pub fn translated(&self, shift: Vec3) -> Result<Self> {
        Self::new(
            self.phi0,
            [
                self.r0[0] + shift[0],
                self.r0[1] + shift[1],
                self.r0[2] + shift[2],
            ],
            self.radius,
            self.mass,
        )
    }

    pub fn with_phi0(&self, phi0: f64) -> Result<Self> {
        Self::new(phi0, self.r0, self.radius, self.mass)
    }

    pub fn field_expectation(&self, r: Vec3) -> f64 {
        self.phi0 * (-distance_squared(r, self.r0) / (2.0 * self.radius * self.radius)).exp()
    }

    /// ⟨φ̇⟩, zero for these static states.
    pub fn field_velocity(&self, _r: Vec3) -> f64 {
        0.0
    }

    /// α(k) = φ₀R³√(ω_m(k)/2)·exp(−ik·r₀ − (kR)²/2), ω_m = √(m² + k²).
    pub fn coherent_amplitude(&self, k: Vec3) -> Complex64 {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let omega = (self.mass * self.mass + k2).sqrt();
        let r3 = self.radius.powi(3);
        let modulus =
            self.phi0 * r3 * (omega / 2.0).sqrt() * (-0.5 * k2 * self.radius * self.radius).exp();
        let phase = -(k[0] * self.r0[0] + k[1] * self.r0[1] + k[2] * self.r0[2]);
        Complex64::from_polar(modulus, phase)
    }

    /// T₀₀ ≈ ½m²⟨φ⟩².
    pub fn energy_density(&self, r: Vec3) -> f64 {
        let phi = self.field_expectation(r);
        0.5 * self.mass * self.mass * phi * phi
    }

    /// ∫d³r ½m²⟨φ⟩² = ½m²φ₀²π^{3/2}R³ (natural units, m⁻¹).
    pub fn rest_energy(&self) -> f64 {
        0.5 * self.mass * self.mass * self.phi0 * self.phi0 * PI.powf(1.5) * self.radius.powi(3)
    }

    /// Rest energy in joules (ħc per m⁻¹).
    pub fn rest_energy_joules(&self, constants: &PhysicalConstants) -> f64 {
        NaturalUnits::new(*constants).energy_to_si(self.rest_energy())
    }

    /// Rest energy by a tensor-product trapezoid rule on a cube of half-width
    /// 10R with spacing R/4; exponentially accurate for the Gaussian integrand.
    pub fn rest_energy_quadrature(&self, exec: Execution) -> f64 {
        let h = self.radius / 4.0;
        let half = 40;
        let n = 2 * half + 1;
        let coord = |i: usize| (i as f64 - half as f64) * h;
        let slabs = parallel::map_range(n, exec, |i| {
            let mut acc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    let r = [
                        self.r0[0] + coord(i),
                        self.r0[1] + coord(j),
                        self.r0[2] + coord(k),
                    ];
                    acc += self.energy_density(r);
                }
            }
            acc
        });
        slabs.iter().sum::<f64>() * h * h * h
    }

    /// Closed form, after checking it against [`rest_energy_quadrature`](Self::rest_energy_quadrature).
    pub fn rest_energy_verified(&self, exec: Execution) -> Result<f64> {
        let closed = self.rest_energy();
        let quadrature = self.rest_energy_quadrature(exec);
        if ((closed - quadrature) / closed).abs() > ENERGY_MISMATCH_TOLERANCE {
            return Err(Error::EnergyMismatch { closed, quadrature });
        }
        Ok(closed)
    }
}

/// Two balls of the same field species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSuperposition {
    a: GaussianBall,
    b: GaussianBall,
}

impl BallSuperposition {
    pub fn new(a: GaussianBall, b: GaussianBall) -> Result<Self> {
        if ((a.mass - b.mass) / a.mass).abs() > 1e-12 {
            return Err(invalid(
                "mass",
                format!(
                    "both balls must share the field mass, got {} and {}",
                    a.mass, b.mass
                ),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &GaussianBall {
        &self.a
    }
    pub fn b(&self) -> &GaussianBall {
        &self.b
    }

    pub fn separation(&self) -> f64 {
        distance_squared(self.a.r0, self.b.r0).sqrt()
    }

    /// E_a − E_b in natural units.
    pub fn energy_difference(&self) -> f64 {
        self.a.rest_energy() - self.b.rest_energy()
    }

    pub fn compton_ok(&self) -> bool {
        self.a.compton_ok() && self.b.compton_ok()
    }

    /// 10·max(‖r₀ − r̃₀‖, R, R̃) as a length (c = 1).
    pub fn markov_length(&self) -> f64 {
        MARKOV_SAFETY_FACTOR * self.separation().max(self.a.radius).max(self.b.radius)
    }

    /// Markov time in seconds.
    pub fn markov_time(&self, constants: &PhysicalConstants) -> f64 {
        self.markov_length() / constants.c()
    }
}

/// A scalar field sampled on a uniform cubic grid of `points³` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    center: Vec3,
    spacing: f64,
    points: usize,
    values: Vec<f64>,
}

impl FieldGrid {
    /// Zero field on the smallest odd grid with the given spacing whose
    /// half-width is at least `half_width`.
    pub fn zeros(center: Vec3, spacing: f64, half_width: f64) -> Result<Self> {
        ensure_positive("spacing", spacing)?;
        ensure_positive("half_width", half_width)?;
        for x in center {
            ensure_finite("center", x)?;
        }
        let half = (half_width / spacing - 1e-9).ceil() as usize;
        let points = 2 * half + 1;
        Ok(Self {
            center,
            spacing,
            points,
            values: vec![0.0; points * points * points],
        })
    }

    /// Grid resolving `ball`: spacing R/8, half-width 3R, centred on r₀.
    pub fn for_ball(ball: &GaussianBall) -> Result<Self> {
        Self::zeros(ball.r0, ball.radius / 8.0, 3.0 * ball.radius)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn points(&self) -> usize {
        self.points
    }
    pub fn center(&self) -> Vec3 {
        self.center
    }
    pub fn half_width(&self) -> f64 {
        (self.points / 2) as f64 * self.spacing
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn position(&self, index: usize) -> Vec3 {
        let n = self.points;
        let half = (n / 2) as f64;
        let (i, j, k) = (index / (n * n), (index / n) % n, index % n);
        [
            self.center[0] + (i as f64 - half) * self.spacing,
            self.center[1] + (j as f64 - half) * self.spacing,
            self.center[2] + (k as f64 - half) * self.spacing,
        ]
    }

    /// Overwrite the samples with `f` evaluated at each node.
    pub fn fill<F: Fn(Vec3) -> f64 + Sync + Send>(mut self, exec: Execution, f: F) -> Self {
        let positions: Vec<usize> = (0..self.values.len()).collect();
        self.values = parallel::map(&positions, exec, |&idx| f(self.position(idx)));
        self
    }

    pub fn ball_profile(ball: &GaussianBall, exec: Execution) -> Result<Self> {
        Ok(Self::for_ball(ball)?.fill(exec, |r| ball.field_expectation(r)))
    }

    pub fn translated(&self, shift: Vec3) -> Self {
        Self {
            center: [
                self.center[0] + shift[0],
                self.center[1] + shift[1],
                self.center[2] + shift[2],
            ],
            ..self.clone()
        }
    }

    fn check_covers(&self, ball: &GaussianBall) -> Result<()> {
        if self.spacing > ball.radius / 8.0 * (1.0 + 1e-12) {
            return Err(Error::GridCoverage(format!(
                "spacing {} exceeds R/8 = {}",
                self.spacing,
                ball.radius / 8.0
            )));
        }
        let half = self.half_width();
        for axis in 0..3 {
            let lo = self.center[axis] - half;
            let hi = self.center[axis] + half;
            let need = 3.0 * ball.radius * (1.0 - 1e-12);
            if ball.r0[axis] - lo < need || hi - ball.r0[axis] < need {
                return Err(Error::GridCoverage(format!(
                    "axis {axis} spans [{lo}, {hi}], needs r0 ± 3R = [{}, {}]",
                    ball.r0[axis] - 3.0 * ball.radius,
                    ball.r0[axis] + 3.0 * ball.radius
                )));
            }
        }
        Ok(())
    }
}

/// Log-amplitude of ⟨φ|α⟩ in the field basis,
/// −(m/2)∫d³r (φ(r) − ⟨φ(r)⟩)², summed over the grid.
pub fn coordinate_wavefunctional_exponent(
    ball: &GaussianBall,
    config: &FieldGrid,
    exec: Execution,
) -> Result<f64> {
    if !ball.compton_ok() {
        return Err(invalid(
            "ball",
            format!(
                "R·m = {} is below {COMPTON_THRESHOLD}; the field-basis form needs R ≫ 1/m",
                ball.radius * ball.mass
            ),
        ));
    }
    config.check_covers(ball)?;
    let h3 = config.spacing.powi(3);
    let sum = parallel::sum_range(config.values.len(), exec, |idx| {
        let d = config.values[idx] - ball.field_expectation(config.position(idx));
        d * d
    });
    Ok(-0.5 * ball.mass * sum * h3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub phi: f64,
    pub t00: f64,
}

/// Field and energy density of the superposed profiles at each point.
pub fn profile_samples(balls: &[GaussianBall], points: &[Vec3]) -> Vec<ProfileSample> {
    points
        .iter()
        .map(|&r| {
            let phi: f64 = balls.iter().map(|b| b.field_expectation(r)).sum();
            let t00: f64 = balls.iter().map(|b| b.energy_density(r)).sum();
            ProfileSample {
                x: r[0],
                y: r[1],
                z: r[2],
                phi,
                t00,
            }
        })
        .collect()
}

/// `n` equally spaced points from `from` to `to`.
pub fn line(from: Vec3, to: Vec3, n: usize) -> Vec<Vec3> {
    if n <= 1 {
        return vec![from];
    }
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            [
                from[0] + s * (to[0] - from[0]),
                from[1] + s * (to[1] - from[1]),
                from[2] + s * (to[2] - from[2]),
            ]
        })
        .collect()
}

pub const PROFILE_CSV_HEADER: &str = "x,y,z,phi,t00";

pub fn write_profile_csv<W: Write>(out: &mut W, samples: &[ProfileSample]) -> io::Result<()> {
    writeln!(out, "{PROFILE_CSV_HEADER}")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{}",
            export::machine(s.x),
            export::machine(s.y),
            export::machine(s.z),
            export::machine(s.phi),
            export::machine(s.t00)
        )?;
    }
    Ok(())
}
