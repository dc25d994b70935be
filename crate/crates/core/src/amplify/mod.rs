//! Amplitude amplification.
//!
//! Given a preparation `A` and a good-set predicate `χ`, write
//! `A|0⟩ = |Ψ₁⟩ + |Ψ₀⟩` (good and bad projections) and `a = ⟨Ψ₁|Ψ₁⟩ = sin²θ_a`.
//! The iterate `Q` rotates inside the plane of `|Ψ₁⟩, |Ψ₀⟩` by `2θ_a`, so after
//! `j` applications a measurement is good with probability `sin²((2j+1)θ_a)`.
//!
//! The module offers that closed form, a fixed-iteration amplifier for known
//! `a`, [`qsearch`] for unknown `a`, and two ways of reaching certainty when
//! `a` is known ([`derandomize_rescale`], [`derandomize_phase`]).

mod derandomize;
mod model;
mod operator;
mod prep;
mod search;

use std::f64::consts::PI;

pub use derandomize::{
    derandomize_phase, derandomize_rescale, plan_phase, plan_rescale, solve_final_phases,
    DerandomizeMethod, DerandomizeOutcome, DerandomizePlan,
};
pub use model::AmplitudeModel;
pub use operator::{build_q, grover_iterate, QOperator};
pub(crate) use prep::clamp_probability;
pub use prep::Preparation;
pub use search::{qsearch, QSearchConfig, QSearchOutcome};

use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::sim::{measure, Engine, Rng, StateVector, C64};

/// `θ ∈ [0, π/2]` with `sin²θ = a`.
pub fn theta_of(a: f64) -> f64 {
    clamp_probability(a.clamp(0.0, 1.0)).sqrt().asin()
}

/// `A|0⟩` split by `χ`.
#[derive(Debug, Clone)]
pub struct AmplitudeSpec {
    pub a: f64,
    pub theta_a: f64,
    /// `|Ψ₁⟩`, unnormalised.
    pub good_proj: StateVector,
    /// `|Ψ₀⟩`, unnormalised.
    pub bad_proj: StateVector,
}

impl AmplitudeSpec {
    /// `λ± = e^{±2iθ_a}`, the eigenvalues of `Q(A, χ, π, π)` on the `Ψ` plane.
    pub fn eigenvalues(&self) -> (C64, C64) {
        (
            C64::from_polar(1.0, 2.0 * self.theta_a),
            C64::from_polar(1.0, -2.0 * self.theta_a),
        )
    }

    /// `|Ψ±⟩ = (|Ψ₁⟩/√a ± i|Ψ₀⟩/√(1−a))/√2`; only defined for `0 < a < 1`.
    pub fn eigenvectors(&self) -> Option<(StateVector, StateVector)> {
        if self.a <= 0.0 || self.a >= 1.0 {
            return None;
        }
        let s = 1.0 / 2f64.sqrt();
        let g = C64::new(s / self.a.sqrt(), 0.0);
        let b = C64::new(0.0, s / (1.0 - self.a).sqrt());
        let plus = self.good_proj.combine(g, &self.bad_proj, b).ok()?;
        let minus = self.good_proj.combine(g, &self.bad_proj, -b).ok()?;
        Some((plus, minus))
    }

    /// `Qʲ A|0⟩` from the closed form.
    pub fn state_after(&self, j: u64) -> StateVector {
        let (g, b) = amplitude_after(j, self);
        self.good_proj
            .combine(C64::new(g, 0.0), &self.bad_proj, C64::new(b, 0.0))
            .expect("projections share a dimension")
    }
}

/// Split `A|0⟩` into good and bad projections. Reads the truth table without
/// charging queries.
pub fn decompose(prep: &Preparation, chi: &Oracle) -> Result<AmplitudeSpec> {
    prep.check_oracle(chi)?;
    let psi = prep.initial_state()?;
    let table = chi.truth_table();
    let good_proj = psi.project(|i| table[i]);
    let bad_proj = psi.project(|i| !table[i]);
    let a = clamp_probability(good_proj.norm_sqr());
    Ok(AmplitudeSpec {
        a,
        theta_a: theta_of(a),
        good_proj,
        bad_proj,
    })
}

/// Coefficients `(g, b)` with `Qʲ A|0⟩ = g|Ψ₁⟩ + b|Ψ₀⟩`:
/// `g = sin((2j+1)θ_a)/√a`, `b = cos((2j+1)θ_a)/√(1−a)`.
///
/// At `a = 0` or `a = 1` the plane collapses to a line; the missing
/// coefficient is reported as 0.
pub fn amplitude_after(j: u64, spec: &AmplitudeSpec) -> (f64, f64) {
    let angle = (2 * j + 1) as f64 * spec.theta_a;
    let g = if spec.a > 0.0 {
        angle.sin() / spec.a.sqrt()
    } else {
        0.0
    };
    let b = if spec.a < 1.0 {
        angle.cos() / (1.0 - spec.a).sqrt()
    } else {
        0.0
    };
    (g, b)
}

/// `sin²((2j+1)θ_a)`
pub fn success_probability_after(j: u64, a: f64) -> f64 {
    ((2 * j + 1) as f64 * theta_of(a)).sin().powi(2)
}

/// Result of one amplified measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplifyOutcome {
    /// Measured index.
    pub z: usize,
    /// `χ(z)`, as checked by the final query.
    pub good: bool,
    pub iterations: u64,
    /// Probability the measurement was good (from the simulator).
    pub success_probability: f64,
    pub queries: u64,
}

/// `m = ⌊π/(4θ_a)⌋` for known `a > 0`.
pub fn iterations_for_known_a(a: f64) -> Result<u64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid(format!(
            "known-a amplification needs 0 < a ≤ 1, got {a}"
        )));
    }
    Ok((PI / (4.0 * theta_of(a))).floor() as u64)
}

/// Measure `Qᵐ A|0⟩` with `m = ⌊π/(4θ_a)⌋`, then check the outcome.
///
/// Succeeds with probability at least `max(1−a, a)` and bills `m + 1` queries.
pub fn amplify_known_a(
    prep: &Preparation,
    chi: &Oracle,
    a: f64,
    rng: &mut Rng,
    engine: Engine,
) -> Result<AmplifyOutcome> {
    let m = iterations_for_known_a(a)?;
    let start = chi.queries();
    let (z, p) = match engine {
        Engine::Exact => {
            let q = grover_iterate(prep, chi)?;
            let s = q.apply_power(prep.initial_state()?, m)?;
            let table = chi.truth_table();
            let p = s
                .amps()
                .iter()
                .zip(table.iter())
                .filter(|(_, &g)| g)
                .map(|(x, _)| x.norm_sqr())
                .sum();
            (measure(&s, rng), p)
        }
        Engine::Analytic => {
            let model = AmplitudeModel::new(prep, chi)?;
            chi.charge(m);
            (model.measure_after(m, rng), model.success_probability(m))
        }
    };
    let good = chi.evaluate(z)?;
    Ok(AmplifyOutcome {
        z,
        good,
        iterations: m,
        success_probability: p,
        queries: chi.queries() - start,
    })
}
