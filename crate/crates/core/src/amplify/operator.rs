use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use super::Preparation;
use crate::error::{Error, Result};
use crate::oracle::{build_s_chi, Oracle};
use crate::sim::{phase, StateVector, Unitary, C64};

/// The iterate `Q(A, χ, φ, φ') = −A S₀(φ) A⁻¹ Sχ(φ')`.
///
/// `S₀(φ)` multiplies `|0⟩` by `e^{iφ}`; `Sχ(φ')` multiplies good basis states
/// by `e^{iφ'}`. With `φ = φ' = π` this is the amplitude-amplification
/// iterate, and with `A = W` it is Grover's iterate. Every call to
/// [`QOperator::apply`] bills one query to `χ`.
#[derive(Debug, Clone)]
pub struct QOperator {
    prep: Preparation,
    chi: Oracle,
    phi: f64,
    phi_prime: f64,
    good: Arc<[bool]>,
    matrix: OnceLock<Unitary>,
}

/// Build `Q(A, χ, φ, φ')`. Phases must lie in `[0, 2π)`.
pub fn build_q(prep: &Preparation, chi: &Oracle, phi: f64, phi_prime: f64) -> Result<QOperator> {
    for (name, p) in [("phi", phi), ("phi_prime", phi_prime)] {
        if !(0.0..2.0 * PI).contains(&p) {
            return Err(Error::invalid(format!("{name} = {p} outside [0, 2π)")));
        }
    }
    prep.check_oracle(chi)?;
    Ok(QOperator {
        prep: prep.clone(),
        chi: chi.clone(),
        phi,
        phi_prime,
        good: chi.truth_table(),
        matrix: OnceLock::new(),
    })
}

/// `Q(A, χ, π, π)`.
pub fn grover_iterate(prep: &Preparation, chi: &Oracle) -> Result<QOperator> {
    build_q(prep, chi, PI, PI)
}

impl QOperator {
    pub fn dim(&self) -> usize {
        self.prep.dim()
    }

    pub fn phases(&self) -> (f64, f64) {
        (self.phi, self.phi_prime)
    }

    pub fn preparation(&self) -> &Preparation {
        &self.prep
    }

    pub fn oracle(&self) -> &Oracle {
        &self.chi
    }

    /// `Q s`, billing one query.
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        let out = self.apply_uncharged(s)?;
        self.chi.charge(1);
        Ok(out)
    }

    /// `Q^j s`, billing `j` queries.
    pub fn apply_power(&self, s: &StateVector, j: u64) -> Result<StateVector> {
        let mut v = s.amps().to_vec();
        for _ in 0..j {
            self.step(&mut v)?;
        }
        self.chi.charge(j);
        Ok(StateVector::from_raw(v))
    }

    pub(crate) fn apply_uncharged(&self, s: &StateVector) -> Result<StateVector> {
        let mut v = s.amps().to_vec();
        self.step(&mut v)?;
        Ok(StateVector::from_raw(v))
    }

    pub(crate) fn step(&self, v: &mut [C64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let good_phase = phase(self.phi_prime);
        for (x, &g) in v.iter_mut().zip(self.good.iter()) {
            if g {
                *x *= good_phase;
            }
        }
        self.prep.apply_inverse_in_place(v)?;
        v[0] *= phase(self.phi);
        self.prep.apply_in_place(v)?;
        v.iter_mut().for_each(|x| *x = -*x);
        Ok(())
    }

    /// Dense `−A S₀(φ) A⁻¹ Sχ(φ')`, built from the factor matrices.
    pub fn matrix(&self) -> Result<&Unitary> {
        if let Some(m) = self.matrix.get() {
            return Ok(m);
        }
        let a = self.prep.unitary()?;
        let d = self.dim();
        let mut s0 = vec![C64::new(1.0, 0.0); d];
        s0[0] = phase(self.phi);
        let s0 = Unitary::diagonal(s0)?;
        let s_chi = build_s_chi(&self.chi, self.phi_prime)?;
        let q = a
            .mul(&s0)?
            .mul(&a.dagger())?
            .mul(&s_chi)?
            .scaled(C64::new(-1.0, 0.0));
        Ok(self.matrix.get_or_init(|| q))
    }
}
