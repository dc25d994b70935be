//! Amplitude amplification and amplitude estimation on a classical simulator.
//!
//! The crate is organised bottom-up:
//!
//! - [`sim`]: dense statevectors, unitaries, the Fourier and Walsh–Hadamard
//!   transforms and the seeded random source every measurement draws from.
//! - [`oracle`]: Boolean black boxes with a shared query counter.
//! - [`amplify`]: the iterate `Q = -A S0(φ) A⁻¹ Sχ(φ')`, closed-form iteration,
//!   `QSearch` and the two exact (de-randomized) amplification methods.
//! - [`estimate`]: phase states, the inverse-Fourier measurement law and
//!   `Est_Amp` with an exact circuit engine and an analytic sampling engine.
//! - [`counting`]: `Count` and every counter built on it.
//! - [`heuristics`]: amplitude amplification over the seed space of a
//!   classical guessing heuristic.
//! - [`harness`]: small statistics helpers shared by the CLI and tests.
//!
//! Every random choice flows through an explicit [`sim::Rng`]; there is no
//! hidden global randomness.

pub mod amplify;
pub mod config;
pub mod counting;
pub mod error;
pub mod estimate;
pub mod harness;
pub mod heuristics;
pub mod oracle;
pub mod sim;

pub use error::{Error, Result};
pub use sim::{Engine, Rng, StateVector, Unitary, C64};
