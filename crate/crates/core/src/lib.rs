//! Gravitationally induced decoherence of stationary matter superpositions.
//!
//! The crate covers four layers:
//!
//! * [`bath`] and [`dephasing`]: an oscillator coupled through its energy to
//!   an Ohmic oscillator bath, which loses coherence between Fock states
//!   without any population change;
//! * [`kernels`]: the thermal graviton noise and dissipation kernels and the
//!   time-integrated noise that fixes the high-temperature decoherence
//!   prefactor;
//! * [`matter`]: Gaussian coherent "matter ball" states of a massive scalar
//!   field and their rest energies;
//! * [`decoherence`]: Born-Markov decoherence rates for superpositions of
//!   states with different energies, and preset scenarios.
//!
//! All public entry points take SI inputs unless a type documents natural
//! units (ħ = c = k_B = 1, lengths in metres).

pub mod bath;
pub mod decoherence;
pub mod dephasing;
pub mod error;
pub mod export;
pub mod kernels;
pub mod matter;
pub(crate) mod ode;
pub mod parallel;
pub mod quad;
pub mod series;
pub mod units;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
