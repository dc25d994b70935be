use super::{Rng, Unitary, C64};
use crate::config::TOLERANCES;
use crate::error::{Error, Result};

/// Amplitudes over the computational basis `{0, …, D−1}`.
///
/// Normalised on construction through [`StateVector::new`]; good/bad
/// projections of a state are carried as unnormalised vectors built with
/// [`StateVector::from_raw`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Normalised state; fails if `Σ|amps|²` is not 1 within the norm tolerance.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid("state vector must have positive dimension"));
        }
        let s = StateVector { amps };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > TOLERANCES.norm {
            return Err(Error::invalid(format!("state not normalised: Σ|a|² = {n}")));
        }
        Ok(s)
    }

    /// Any vector, normalised or not.
    pub fn from_raw(amps: Vec<C64>) -> Self {
        assert!(
            !amps.is_empty(),
            "state vector must have positive dimension"
        );
        StateVector { amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, size: dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { amps })
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_raw(vec![C64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(C64::norm_sqr).collect()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_dim(other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, c: C64) -> StateVector {
        StateVector {
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// `c₀·self + c₁·other`
    pub fn combine(&self, c0: C64, other: &StateVector, c1: C64) -> Result<StateVector> {
        self.check_dim(other.dim())?;
        Ok(StateVector {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| c0 * a + c1 * b)
                .collect(),
        })
    }

    /// Keep amplitudes where `keep(i)` holds, zero the rest.
    pub fn project(&self, mut keep: impl FnMut(usize) -> bool) -> StateVector {
        StateVector {
            amps: self
                .amps
                .iter()
                .enumerate()
                .map(|(i, &a)| if keep(i) { a } else { C64::new(0.0, 0.0) })
                .collect(),
        }
    }

    /// `self ⊗ other`, with `self` as the high-order register.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        StateVector { amps }
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// `U·s`
pub fn apply(u: &Unitary, s: &StateVector) -> Result<StateVector> {
    if u.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: s.dim(),
        });
    }
    Ok(StateVector::from_raw(u.mul_vec(s.amps())))
}

/// Measure `s` in the computational basis, consuming exactly one draw.
///
/// Panics if the state has lost its normalisation, which can only happen
/// through an internal fault.
pub fn measure(s: &StateVector, rng: &mut Rng) -> usize {
    sample_index(s.amps().iter().map(C64::norm_sqr), s.dim(), rng)
}

/// Inverse-CDF draw from non-negative weights that sum to ~1.
pub(crate) fn sample_index(weights: impl Iterator<Item = f64>, len: usize, rng: &mut Rng) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    let mut last_nonzero = None;
    for (i, w) in weights.enumerate() {
        acc += w;
        if w > 0.0 {
            last_nonzero = Some(i);
        }
        if u < acc {
            return i;
        }
    }
    assert!(
        acc > 1.0 - TOLERANCES.degenerate_norm,
        "measurement on a degenerate state (norm² = {acc})"
    );
    // u landed in the rounding gap above the accumulated mass
    last_nonzero.unwrap_or(len - 1)
}
