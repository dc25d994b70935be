//! Amplification that ends in a good state with certainty when `a` is known.
//!
//! Write `m̃ = π/(4θ_a) − 1/2`. When `m̃` is an integer, `m̃` plain iterations
//! already land on `|Ψ₁⟩`. Otherwise either shrink `a` to `ā` with
//! `θ̄ = π/(4m̄+2)`, `m̄ = ⌈m̃⌉` (rescale), or run `⌊m̃⌋` plain iterations and
//! finish with one `Q(A, χ, φ, φ')` whose phases cancel the bad component
//! (phase).

use std::f64::consts::PI;

use super::{build_q, clamp_probability, grover_iterate, theta_of, AmplitudeModel, Preparation};
use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::sim::{measure, phase, Engine, Rng, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerandomizeMethod {
    /// `m̃` is an integer: `m̃` plain iterations suffice.
    Plain,
    /// Auxiliary qubit `√(1−ā/a)|0⟩ + √(ā/a)|1⟩`, then `m̄` iterations.
    Rescale { a_bar: f64, theta_bar: f64 },
    /// `⌊m̃⌋` plain iterations, then one `Q(A, χ, φ, φ')`.
    Phase {
        phi: f64,
        phi_prime: f64,
        residual: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerandomizePlan {
    pub a: f64,
    pub theta_a: f64,
    pub m_tilde: f64,
    pub m_bar: u64,
    pub method: DerandomizeMethod,
}

impl DerandomizePlan {
    /// Applications of `Q` (of either kind) the plan performs.
    pub fn iterations(&self) -> u64 {
        match self.method {
            DerandomizeMethod::Plain => self.m_tilde.round() as u64,
            DerandomizeMethod::Rescale { .. } => self.m_bar,
            DerandomizeMethod::Phase { .. } => self.m_tilde.floor() as u64 + 1,
        }
    }

    /// Success probability predicted from the plan, assuming the true `a`
    /// equals the planned one.
    pub fn predicted_success(&self) -> f64 {
        match self.method {
            DerandomizeMethod::Plain => ((2.0 * self.m_tilde.round() + 1.0) * self.theta_a)
                .sin()
                .powi(2),
            DerandomizeMethod::Rescale { theta_bar, .. } => {
                ((2 * self.m_bar + 1) as f64 * theta_bar).sin().powi(2)
            }
            DerandomizeMethod::Phase { phi, phi_prime, .. } => {
                let (_, b) =
                    final_phase_coefficients(self.a, self.m_tilde.floor() as u64, phi, phi_prime);
                1.0 - b.norm_sqr() * (1.0 - self.a)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerandomizeOutcome {
    pub plan: DerandomizePlan,
    /// Measured index in the original domain.
    pub z: usize,
    /// Result of the final check.
    pub good: bool,
    /// Good probability of the state just before measurement.
    pub success_probability: f64,
    /// Norm of the bad component just before measurement.
    pub bad_amplitude: f64,
    pub queries: u64,
}

fn check_known_a(a: f64) -> Result<f64> {
    let a = clamp_probability(a);
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid(format!(
            "known a must satisfy 0 < a < 1, got {a}"
        )));
    }
    Ok(a)
}

fn m_tilde_of(theta: f64) -> f64 {
    PI / (4.0 * theta) - 0.5
}

fn integral(x: f64) -> Option<u64> {
    let r = x.round();
    ((x - r).abs() <= TOLERANCES.integrality).then_some(r as u64)
}

/// Plan for the rescale method.
pub fn plan_rescale(a: f64) -> Result<DerandomizePlan> {
    let a = check_known_a(a)?;
    let theta_a = theta_of(a);
    let m_tilde = m_tilde_of(theta_a);
    if let Some(m) = integral(m_tilde) {
        return Ok(DerandomizePlan {
            a,
            theta_a,
            m_tilde,
            m_bar: m,
            method: DerandomizeMethod::Plain,
        });
    }
    let m_bar = m_tilde.ceil() as u64;
    let theta_bar = PI / (4 * m_bar + 2) as f64;
    let a_bar = theta_bar.sin().powi(2).min(a);
    Ok(DerandomizePlan {
        a,
        theta_a,
        m_tilde,
        m_bar,
        method: DerandomizeMethod::Rescale { a_bar, theta_bar },
    })
}

/// Plan for the phase method.
pub fn plan_phase(a: f64) -> Result<DerandomizePlan> {
    let a = check_known_a(a)?;
    let theta_a = theta_of(a);
    let m_tilde = m_tilde_of(theta_a);
    let m_bar = m_tilde.ceil() as u64;
    if let Some(m) = integral(m_tilde) {
        return Ok(DerandomizePlan {
            a,
            theta_a,
            m_tilde,
            m_bar: m,
            method: DerandomizeMethod::Plain,
        });
    }
    let k0 = m_tilde.floor() as u64;
    let (phi, phi_prime, residual) = solve_final_phases(theta_a, k0)?;
    Ok(DerandomizePlan {
        a,
        theta_a,
        m_tilde,
        m_bar,
        method: DerandomizeMethod::Phase {
            phi,
            phi_prime,
            residual,
        },
    })
}

/// Phases `(φ, φ')` for a final `Q(A, χ, φ, φ')` that maps
/// `Q^{k₀} A|0⟩` into the good subspace, with the residual bad coefficient.
///
/// With `x = (2k₀+1)θ` the requirement reduces to
/// `cot x = sin 2θ / √(cos² 2θ + cot²(φ/2))`, monotone in `φ ∈ (0, π)`, and
/// `φ' = arg(−cos 2θ + i cot(φ/2))`.
pub fn solve_final_phases(theta: f64, k0: u64) -> Result<(f64, f64, f64)> {
    let x = (2 * k0 + 1) as f64 * theta;
    if !(theta > 0.0 && x < PI / 2.0) {
        return Err(Error::invalid(format!(
            "no final phase step for θ = {theta}, k₀ = {k0}"
        )));
    }
    let target = 1.0 / x.tan();
    let (s2, c2) = ((2.0 * theta).sin(), (2.0 * theta).cos());
    let rhs = |phi: f64| {
        let cot = 1.0 / (phi / 2.0).tan();
        s2 / (c2 * c2 + cot * cot).sqrt()
    };
    let (mut lo, mut hi) = (0.0f64, PI);
    while hi - lo > TOLERANCES.phase_solver {
        let mid = 0.5 * (lo + hi);
        if rhs(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = 0.5 * (lo + hi);
    let mut phi_prime = C64::new(-c2, 1.0 / (phi / 2.0).tan()).arg();
    if phi_prime < 0.0 {
        phi_prime += 2.0 * PI;
    }
    if phi_prime >= 2.0 * PI {
        phi_prime = 0.0;
    }
    let a = theta.sin().powi(2);
    let (_, b) = final_phase_coefficients(a, k0, phi, phi_prime);
    let residual = b.norm() * (1.0 - a).sqrt();
    if residual.is_nan() || residual > TOLERANCES.phase_residual {
        return Err(Error::PhaseSolve { residual });
    }
    Ok((phi, phi_prime, residual))
}

/// Coefficients on `(|Ψ₁⟩, |Ψ₀⟩)` after `k₀` plain iterations and one
/// `Q(A, χ, φ, φ')`.
fn final_phase_coefficients(a: f64, k0: u64, phi: f64, phi_prime: f64) -> (C64, C64) {
    let x = (2 * k0 + 1) as f64 * theta_of(a);
    let g = C64::new(x.sin() / a.sqrt(), 0.0);
    let b = C64::new(x.cos() / (1.0 - a).sqrt(), 0.0);
    let e_phi = phase(phi);
    let gp = g * phase(phi_prime);
    let overlap = gp * a + b * (1.0 - a);
    let good = -(gp + (e_phi - 1.0) * overlap);
    let bad = -(b + (e_phi - 1.0) * overlap);
    (good, bad)
}

/// `(good, bad)` probability mass of `s`.
fn split_mass(s: &StateVector, table: &[bool]) -> (f64, f64) {
    let (mut good, mut bad) = (0.0, 0.0);
    for (x, &g) in s.amps().iter().zip(table) {
        if g {
            good += x.norm_sqr();
        } else {
            bad += x.norm_sqr();
        }
    }
    (good, bad)
}

/// Rescale method: measure after `m̄` iterations on `A ⊗ B`, where the good
/// set becomes `χ(x) = 1` and auxiliary bit 1. The composite index is
/// `2x + b`; the outcome reports `x`.
pub fn derandomize_rescale(
    prep: &Preparation,
    chi: &Oracle,
    a: f64,
    rng: &mut Rng,
    engine: Engine,
) -> Result<DerandomizeOutcome> {
    prep.check_oracle(chi)?;
    let plan = plan_rescale(a)?;
    let a_bar = match plan.method {
        DerandomizeMethod::Plain => return run_plain(prep, chi, plan, rng, engine),
        DerandomizeMethod::Rescale { a_bar, .. } => a_bar,
        DerandomizeMethod::Phase { .. } => unreachable!(),
    };
    let ratio = (a_bar / plan.a).min(1.0);
    let start = chi.queries();
    let inner = chi.clone();
    let composite_chi = chi.derive(2 * prep.dim(), move |i| i % 2 == 1 && inner.peek(i / 2));
    let (index, (p, bad_mass)) = match engine {
        Engine::Exact => {
            let b = StateVector::new(vec![
                C64::new((1.0 - ratio).sqrt(), 0.0),
                C64::new(ratio.sqrt(), 0.0),
            ])?;
            let composite = Preparation::product(prep, &Preparation::from_state(&b)?)?;
            let q = grover_iterate(&composite, &composite_chi)?;
            let s = q.apply_power(composite.initial_state()?, plan.m_bar)?;
            (
                measure(&s, rng),
                split_mass(&s, &composite_chi.truth_table()),
            )
        }
        Engine::Analytic => {
            let model = AmplitudeModel::new(prep, chi)?;
            let a_true = model.a();
            let a_c = clamp_probability(a_true * ratio);
            let angle = (2 * plan.m_bar + 1) as f64 * theta_of(a_c);
            let p = angle.sin().powi(2);
            chi.charge(plan.m_bar);
            let good = rng.uniform() < p;
            let index = if good {
                2 * model
                    .sample_good(rng)
                    .expect("good set non-empty when p > 0")
                    + 1
            } else {
                // bad composite states: (x bad, either bit) or (x good, bit 0)
                let bad_weight = 1.0 - a_true;
                let total = bad_weight + a_true * (1.0 - ratio);
                let pick_bad_x = rng.uniform() * total < bad_weight;
                match (pick_bad_x, model.sample_bad(rng), model.sample_good(rng)) {
                    (true, Some(x), _) | (false, Some(x), None) => {
                        2 * x + usize::from(rng.uniform() < ratio)
                    }
                    (_, _, Some(x)) => 2 * x,
                    (_, None, None) => unreachable!("preparation has empty support"),
                }
            };
            (index, (clamp_probability(p), angle.cos().powi(2)))
        }
    };
    let good = composite_chi.evaluate(index)?;
    Ok(DerandomizeOutcome {
        plan,
        z: index / 2,
        good,
        success_probability: p,
        bad_amplitude: bad_mass.max(0.0).sqrt(),
        queries: chi.queries() - start,
    })
}

/// Phase method: `⌊m̃⌋` plain iterations, one tuned `Q(A, χ, φ, φ')`, measure.
pub fn derandomize_phase(
    prep: &Preparation,
    chi: &Oracle,
    a: f64,
    rng: &mut Rng,
    engine: Engine,
) -> Result<DerandomizeOutcome> {
    prep.check_oracle(chi)?;
    let plan = plan_phase(a)?;
    let (phi, phi_prime) = match plan.method {
        DerandomizeMethod::Plain => return run_plain(prep, chi, plan, rng, engine),
        DerandomizeMethod::Phase { phi, phi_prime, .. } => (phi, phi_prime),
        DerandomizeMethod::Rescale { .. } => unreachable!(),
    };
    let k0 = plan.m_tilde.floor() as u64;
    let start = chi.queries();
    let (z, (p, bad_mass)) = match engine {
        Engine::Exact => {
            let s = grover_iterate(prep, chi)?.apply_power(prep.initial_state()?, k0)?;
            let s = build_q(prep, chi, phi, phi_prime)?.apply(&s)?;
            (measure(&s, rng), split_mass(&s, &chi.truth_table()))
        }
        Engine::Analytic => {
            let model = AmplitudeModel::new(prep, chi)?;
            let a_true = model.a();
            let bad_mass = if a_true > 0.0 && a_true < 1.0 {
                let (_, b) = final_phase_coefficients(a_true, k0, phi, phi_prime);
                b.norm_sqr() * (1.0 - a_true)
            } else {
                1.0 - a_true
            };
            let p = clamp_probability((1.0 - bad_mass).clamp(0.0, 1.0));
            chi.charge(k0 + 1);
            (model.measure_with_probability(p, rng), (p, bad_mass))
        }
    };
    let good = chi.evaluate(z)?;
    Ok(DerandomizeOutcome {
        plan,
        z,
        good,
        success_probability: p,
        bad_amplitude: bad_mass.max(0.0).sqrt(),
        queries: chi.queries() - start,
    })
}

fn run_plain(
    prep: &Preparation,
    chi: &Oracle,
    plan: DerandomizePlan,
    rng: &mut Rng,
    engine: Engine,
) -> Result<DerandomizeOutcome> {
    let m = plan.iterations();
    let start = chi.queries();
    let (z, (p, bad_mass)) = match engine {
        Engine::Exact => {
            let s = grover_iterate(prep, chi)?.apply_power(prep.initial_state()?, m)?;
            (measure(&s, rng), split_mass(&s, &chi.truth_table()))
        }
        Engine::Analytic => {
            let model = AmplitudeModel::new(prep, chi)?;
            chi.charge(m);
            let angle = (2 * m + 1) as f64 * model.theta();
            let p = clamp_probability(angle.sin().powi(2));
            (
                model.measure_with_probability(p, rng),
                (p, angle.cos().powi(2)),
            )
        }
    };
    let good = chi.evaluate(z)?;
    Ok(DerandomizeOutcome {
        plan,
        z,
        good,
        success_probability: p,
        bad_amplitude: bad_mass.max(0.0).sqrt(),
        queries: chi.queries() - start,
    })
}
