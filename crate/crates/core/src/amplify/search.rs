use super::{grover_iterate, AmplitudeModel, Preparation};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::sim::{measure, Engine, Rng};

/// Parameters for [`qsearch`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSearchConfig {
    /// Growth factor `c ∈ (1, 2)` of the iteration bound `M = ⌈c^l⌉`.
    pub growth: f64,
    /// Give up once this many queries have been billed.
    pub max_total_queries: Option<u64>,
}

impl Default for QSearchConfig {
    fn default() -> Self {
        QSearchConfig {
            growth: 1.5,
            max_total_queries: None,
        }
    }
}

impl QSearchConfig {
    pub fn with_cap(cap: u64) -> Self {
        QSearchConfig {
            max_total_queries: Some(cap),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.growth > 1.0 && self.growth < 2.0) {
            return Err(Error::invalid(format!(
                "growth c must satisfy 1 < c < 2, got {}",
                self.growth
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QSearchOutcome {
    pub z: usize,
    pub queries: u64,
    /// Loop iterations started (`l` at termination).
    pub rounds: u32,
    /// `M` of the last round.
    pub final_m: u64,
}

/// Search for a good `z` without knowing `a`.
///
/// Each round raises `M = ⌈c^l⌉`, measures `A|0⟩` once and checks it, then
/// measures `Qʲ A|0⟩` for `j` uniform in `1..=M` and checks that. Queries
/// billed per round: `1 + j + 1`. With no good element the loop only stops at
/// the cap, reported as [`Error::BudgetExhausted`].
pub fn qsearch(
    prep: &Preparation,
    chi: &Oracle,
    config: &QSearchConfig,
    rng: &mut Rng,
    engine: Engine,
) -> Result<QSearchOutcome> {
    config.validate()?;
    prep.check_oracle(chi)?;
    let start = chi.queries();
    let spent = || chi.queries() - start;
    let over_cap = |q: u64| config.max_total_queries.is_some_and(|cap| q >= cap);

    enum Sim {
        Exact(super::QOperator),
        Analytic(AmplitudeModel),
    }
    let sim = match engine {
        Engine::Exact => Sim::Exact(grover_iterate(prep, chi)?),
        Engine::Analytic => Sim::Analytic(AmplitudeModel::new(prep, chi)?),
    };
    let draw = |j: u64, rng: &mut Rng| -> Result<usize> {
        match &sim {
            Sim::Exact(q) => {
                let s = q.apply_power(prep.initial_state()?, j)?;
                Ok(measure(&s, rng))
            }
            Sim::Analytic(model) => {
                chi.charge(j);
                Ok(model.measure_after(j, rng))
            }
        }
    };

    let mut l = 0u32;
    loop {
        if over_cap(spent()) {
            return Err(Error::BudgetExhausted { queries: spent() });
        }
        l += 1;
        let m = config.growth.powi(l as i32).ceil();
        if !m.is_finite() || m > (1u64 << 62) as f64 {
            return Err(Error::BudgetExhausted { queries: spent() });
        }
        let m = m as u64;

        let z = draw(0, rng)?;
        if chi.evaluate(z)? {
            return Ok(QSearchOutcome {
                z,
                queries: spent(),
                rounds: l,
                final_m: m,
            });
        }
        if over_cap(spent()) {
            return Err(Error::BudgetExhausted { queries: spent() });
        }
        let j = rng.between(1, m);
        let z = draw(j, rng)?;
        if chi.evaluate(z)? {
            return Ok(QSearchOutcome {
                z,
                queries: spent(),
                rounds: l,
                final_m: m,
            });
        }
    }
}
