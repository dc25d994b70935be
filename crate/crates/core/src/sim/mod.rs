//! Dense statevector engine.
//!
//! This is the ground truth every closed-form routine in the crate is checked
//! against. Matrices are dense and complex numbers are `f64` pairs; the exact
//! engine is capped at [`MAX_STATE_DIM`](crate::config::MAX_STATE_DIM).

mod rng;
mod state;
mod transforms;
mod unitary;

pub use num_complex::Complex64 as C64;
pub use rng::Rng;
pub(crate) use state::sample_index;
pub use state::{apply, measure, StateVector};
pub(crate) use transforms::fwht;
pub use transforms::{fourier, walsh_hadamard};
pub use unitary::Unitary;

/// Which simulation back end an algorithm runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    /// Materialise the full statevector and apply every operator.
    Exact,
    /// Sample from the closed-form outcome distribution of the same circuit.
    #[default]
    Analytic,
}

impl std::str::FromStr for Engine {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "exact" => Ok(Engine::Exact),
            "analytic" => Ok(Engine::Analytic),
            other => Err(crate::Error::invalid(format!("unknown engine `{other}`"))),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Exact => "exact",
            Engine::Analytic => "analytic",
        })
    }
}

/// `e^{iθ}`
#[inline]
pub fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// `e^{2πi·num/den}` with the numerator reduced first, which keeps the angle
/// exact for large products `x·y`.
#[inline]
pub(crate) fn root_of_unity(num: usize, den: usize) -> C64 {
    let r = (num % den) as f64 / den as f64;
    phase(2.0 * std::f64::consts::PI * r)
}
