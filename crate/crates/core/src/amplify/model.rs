use super::{theta_of, Preparation};
use crate::error::Result;
use crate::oracle::Oracle;
use crate::sim::Rng;

/// Closed-form stand-in for the statevector of `Qʲ A|0⟩`.
///
/// `Qʲ A|0⟩` stays in the plane of `|Ψ₁⟩, |Ψ₀⟩` with good probability
/// `sin²((2j+1)θ_a)`, and a measurement that lands in the good (bad) subspace
/// is distributed like `|Ψ₁⟩` (`|Ψ₀⟩`). Sampling those two stages reproduces
/// the exact engine's outcome law at any `N`.
#[derive(Debug, Clone)]
pub struct AmplitudeModel {
    a: f64,
    theta: f64,
    good: IndexSampler,
    bad: IndexSampler,
}

#[derive(Debug, Clone)]
struct IndexSampler {
    indices: Vec<usize>,
    cumulative: Option<Vec<f64>>,
}

impl IndexSampler {
    fn new(indices: Vec<usize>, weights: Option<Vec<f64>>) -> Self {
        let cumulative = weights.map(|w| {
            let total: f64 = w.iter().sum();
            let mut acc = 0.0;
            w.iter()
                .map(|x| {
                    acc += x / total;
                    acc
                })
                .collect()
        });
        IndexSampler {
            indices,
            cumulative,
        }
    }

    fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        match &self.cumulative {
            None => self.indices[rng.below(self.indices.len())],
            Some(c) => {
                let u = rng.uniform();
                let k = c.partition_point(|&x| x <= u).min(self.indices.len() - 1);
                self.indices[k]
            }
        }
    }
}

impl AmplitudeModel {
    pub fn new(prep: &Preparation, chi: &Oracle) -> Result<Self> {
        let a = prep.good_probability(chi)?;
        let split = prep.split_support(chi)?;
        Ok(AmplitudeModel {
            a,
            theta: theta_of(a),
            good: IndexSampler::new(split.good, split.good_w),
            bad: IndexSampler::new(split.bad, split.bad_w),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `sin²((2j+1)θ_a)`
    pub fn success_probability(&self, j: u64) -> f64 {
        ((2 * j + 1) as f64 * self.theta).sin().powi(2)
    }

    /// Outcome of measuring `Qʲ A|0⟩`: a good/bad draw, then an index draw.
    pub fn measure_after(&self, j: u64, rng: &mut Rng) -> usize {
        self.measure_with_probability(self.success_probability(j), rng)
    }

    pub(crate) fn measure_with_probability(&self, p_good: f64, rng: &mut Rng) -> usize {
        let good = if self.good.is_empty() {
            rng.uniform();
            false
        } else if self.bad.is_empty() {
            rng.uniform();
            true
        } else {
            rng.uniform() < p_good
        };
        if good {
            self.good.sample(rng)
        } else {
            self.bad.sample(rng)
        }
    }

    pub(crate) fn sample_good(&self, rng: &mut Rng) -> Option<usize> {
        (!self.good.is_empty()).then(|| self.good.sample(rng))
    }

    pub(crate) fn sample_bad(&self, rng: &mut Rng) -> Option<usize> {
        (!self.bad.is_empty()).then(|| self.bad.sample(rng))
    }
}
