use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::config::{MAX_MATRIX_DIM, MAX_STATE_DIM};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::sim::{fourier, fwht, walsh_hadamard, StateVector, Unitary, C64};

/// A measurement-free state preparation `A`, with `|Ψ⟩ = A|0⟩`.
///
/// Cheap to clone. Operators are applied structurally (fast Walsh–Hadamard,
/// a Householder reflection, block products); the dense matrix is only built
/// when [`Preparation::unitary`] is asked for it.
#[derive(Clone)]
pub struct Preparation {
    inner: Arc<Inner>,
}

struct Inner {
    dim: usize,
    kind: Kind,
    support: Support,
    state: OnceLock<StateVector>,
    matrix: OnceLock<Unitary>,
}

enum Kind {
    Walsh {
        qubits: u32,
    },
    Fourier,
    /// `A = e^{iα}(I − 2vv†/v†v)`, mapping `|0⟩` to a prescribed state.
    Reflection {
        v: Vec<C64>,
        v_norm_sqr: f64,
        global: C64,
    },
    Dense(Unitary),
    /// `A ⊗ B`, `A` on the high-order register.
    Product(Preparation, Preparation),
}

/// Where `A|0⟩` puts its weight, when that is known combinatorially.
#[derive(Clone)]
enum Support {
    /// Uniform over the whole domain.
    All,
    /// Uniform over the listed indices.
    On(Arc<[usize]>),
    General,
}

impl fmt::Debug for Preparation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.inner.kind {
            Kind::Walsh { .. } => "walsh-hadamard",
            Kind::Fourier => "fourier",
            Kind::Reflection { .. } => "reflection",
            Kind::Dense(_) => "dense",
            Kind::Product(..) => "product",
        };
        f.debug_struct("Preparation")
            .field("dim", &self.inner.dim)
            .field("kind", &kind)
            .finish()
    }
}

impl Preparation {
    fn build(dim: usize, kind: Kind, support: Support) -> Self {
        Preparation {
            inner: Arc::new(Inner {
                dim,
                kind,
                support,
                state: OnceLock::new(),
                matrix: OnceLock::new(),
            }),
        }
    }

    /// `W` on `n` qubits.
    pub fn walsh_hadamard(qubits: u32) -> Result<Self> {
        if qubits == 0 || qubits >= usize::BITS - 1 {
            return Err(Error::invalid(
                "Walsh–Hadamard needs between 1 and 62 qubits",
            ));
        }
        Ok(Self::build(
            1 << qubits,
            Kind::Walsh { qubits },
            Support::All,
        ))
    }

    /// `F_n`.
    pub fn fourier(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Fourier modulus must be at least 1"));
        }
        Ok(Self::build(n, Kind::Fourier, Support::All))
    }

    /// The counting preparation: `W` when `n` is a power of two, `F_n` otherwise.
    pub fn uniform(n: usize) -> Result<Self> {
        if n >= 2 && n.is_power_of_two() {
            Self::walsh_hadamard(n.trailing_zeros())
        } else {
            Self::fourier(n)
        }
    }

    /// Any unitary whose first column is `state`.
    pub fn from_state(state: &StateVector) -> Result<Self> {
        let n = state.norm_sqr();
        if (n - 1.0).abs() > crate::config::TOLERANCES.norm {
            return Err(Error::invalid(format!(
                "target state not normalised: Σ|a|² = {n}"
            )));
        }
        Ok(Self::reflection(state.amps(), Support::General))
    }

    /// Preparation of the uniform superposition over `support` in dimension `dim`.
    pub fn uniform_over(dim: usize, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::invalid("support must be non-empty"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let s = 1.0 / (support.len() as f64).sqrt();
        for &i in support {
            if i >= dim {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: dim,
                });
            }
            if amps[i] != C64::new(0.0, 0.0) {
                return Err(Error::invalid(format!("support index {i} listed twice")));
            }
            amps[i] = C64::new(s, 0.0);
        }
        Ok(Self::reflection(&amps, Support::On(support.into())))
    }

    fn reflection(target: &[C64], support: Support) -> Self {
        let dim = target.len();
        let first = target[0];
        let global = if first.norm() > 0.0 {
            first / first.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut v: Vec<C64> = target.iter().map(|a| -(a * global.conj())).collect();
        v[0] += 1.0;
        let v_norm_sqr = v.iter().map(C64::norm_sqr).sum();
        Self::build(
            dim,
            Kind::Reflection {
                v,
                v_norm_sqr,
                global,
            },
            support,
        )
    }

    pub fn from_unitary(u: Unitary) -> Self {
        Self::build(u.dim(), Kind::Dense(u), Support::General)
    }

    /// `A ⊗ B`
    pub fn product(high: &Preparation, low: &Preparation) -> Result<Self> {
        let dim = high
            .dim()
            .checked_mul(low.dim())
            .ok_or(Error::DimensionOverflow {
                dim: usize::MAX,
                cap: MAX_STATE_DIM,
            })?;
        Ok(Self::build(
            dim,
            Kind::Product(high.clone(), low.clone()),
            Support::General,
        ))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    fn check_engine_dim(&self) -> Result<()> {
        if self.dim() > MAX_STATE_DIM {
            return Err(Error::DimensionOverflow {
                dim: self.dim(),
                cap: MAX_STATE_DIM,
            });
        }
        Ok(())
    }

    /// `|Ψ⟩ = A|0⟩`.
    pub fn initial_state(&self) -> Result<&StateVector> {
        if let Some(s) = self.inner.state.get() {
            return Ok(s);
        }
        self.check_engine_dim()?;
        let d = self.dim();
        let state = match &self.inner.kind {
            Kind::Walsh { .. } | Kind::Fourier => {
                StateVector::from_raw(vec![C64::new(1.0 / (d as f64).sqrt(), 0.0); d])
            }
            Kind::Dense(u) => StateVector::from_raw(u.column(0)),
            Kind::Reflection { .. } | Kind::Product(..) => {
                let mut v = StateVector::basis(d, 0)?.into_amps();
                self.apply_in_place(&mut v)?;
                StateVector::from_raw(v)
            }
        };
        Ok(self.inner.state.get_or_init(|| state))
    }

    /// Dense `A`.
    pub fn unitary(&self) -> Result<&Unitary> {
        if let Some(u) = self.inner.matrix.get() {
            return Ok(u);
        }
        let d = self.dim();
        if d > MAX_MATRIX_DIM {
            return Err(Error::DimensionOverflow {
                dim: d,
                cap: MAX_MATRIX_DIM,
            });
        }
        let u = match &self.inner.kind {
            Kind::Walsh { qubits } => walsh_hadamard(*qubits)?,
            Kind::Fourier => fourier(d)?,
            Kind::Dense(u) => u.clone(),
            Kind::Product(a, b) => a.unitary()?.kron(b.unitary()?)?,
            Kind::Reflection { .. } => {
                let mut cols = Vec::with_capacity(d);
                for c in 0..d {
                    let mut v = StateVector::basis(d, c)?.into_amps();
                    self.apply_in_place(&mut v)?;
                    cols.push(v);
                }
                Unitary::from_fn(d, |r, c| cols[c][r])?
            }
        };
        Ok(self.inner.matrix.get_or_init(|| u))
    }

    /// `v ← A v`
    pub fn apply_in_place(&self, v: &mut [C64]) -> Result<()> {
        self.transform(v, false)
    }

    /// `v ← A⁻¹ v`
    pub fn apply_inverse_in_place(&self, v: &mut [C64]) -> Result<()> {
        self.transform(v, true)
    }

    fn transform(&self, v: &mut [C64], inverse: bool) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        match &self.inner.kind {
            // real and symmetric, so self-inverse
            Kind::Walsh { .. } => fwht(v),
            Kind::Fourier => {
                let u = self.unitary()?;
                let out = if inverse {
                    u.mul_vec_dagger(v)
                } else {
                    u.mul_vec(v)
                };
                v.copy_from_slice(&out);
            }
            Kind::Dense(u) => {
                let out = if inverse {
                    u.mul_vec_dagger(v)
                } else {
                    u.mul_vec(v)
                };
                v.copy_from_slice(&out);
            }
            Kind::Reflection {
                v: h,
                v_norm_sqr,
                global,
            } => {
                let g = if inverse { global.conj() } else { *global };
                if *v_norm_sqr > 0.0 {
                    let proj: C64 = h.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                    let k = proj * (2.0 / v_norm_sqr);
                    for (x, a) in v.iter_mut().zip(h) {
                        *x -= a * k;
                    }
                }
                v.iter_mut().for_each(|x| *x *= g);
            }
            Kind::Product(a, b) => {
                let (da, db) = (a.dim(), b.dim());
                for block in v.chunks_exact_mut(db) {
                    b.transform(block, inverse)?;
                }
                let mut col = vec![C64::new(0.0, 0.0); da];
                for j in 0..db {
                    for (i, c) in col.iter_mut().enumerate() {
                        *c = v[i * db + j];
                    }
                    a.transform(&mut col, inverse)?;
                    for (i, c) in col.iter().enumerate() {
                        v[i * db + j] = *c;
                    }
                }
            }
        }
        Ok(())
    }

    /// `a = ⟨Ψ₁|Ψ₁⟩` for good-set `chi`, computed without charging queries.
    ///
    /// For uniform preparations this is the exact ratio `t/N`.
    pub fn good_probability(&self, chi: &Oracle) -> Result<f64> {
        self.check_oracle(chi)?;
        let table = chi.truth_table();
        let a = match &self.inner.support {
            Support::All => table.iter().filter(|&&g| g).count() as f64 / self.dim() as f64,
            Support::On(s) => s.iter().filter(|&&i| table[i]).count() as f64 / s.len() as f64,
            Support::General => {
                let psi = self.initial_state()?;
                psi.amps()
                    .iter()
                    .zip(table.iter())
                    .filter(|(_, &g)| g)
                    .map(|(a, _)| a.norm_sqr())
                    .sum()
            }
        };
        Ok(clamp_probability(a))
    }

    /// Indices and `|α_x|²` weights of `A|0⟩`, split by `chi`. `None` weights
    /// mean uniform.
    pub(crate) fn split_support(&self, chi: &Oracle) -> Result<SplitSupport> {
        self.check_oracle(chi)?;
        let table = chi.truth_table();
        let split = |idx: &mut dyn Iterator<Item = usize>| {
            let (mut good, mut bad) = (Vec::new(), Vec::new());
            for i in idx {
                if table[i] {
                    good.push(i)
                } else {
                    bad.push(i)
                }
            }
            (good, bad)
        };
        Ok(match &self.inner.support {
            Support::All => {
                let (good, bad) = split(&mut (0..self.dim()));
                SplitSupport {
                    good,
                    bad,
                    good_w: None,
                    bad_w: None,
                }
            }
            Support::On(s) => {
                let (good, bad) = split(&mut s.iter().copied());
                SplitSupport {
                    good,
                    bad,
                    good_w: None,
                    bad_w: None,
                }
            }
            Support::General => {
                let psi = self.initial_state()?;
                let (good, bad) =
                    split(&mut (0..self.dim()).filter(|&i| psi.amps()[i].norm_sqr() > 0.0));
                let w = |v: &[usize]| {
                    v.iter()
                        .map(|&i| psi.amps()[i].norm_sqr())
                        .collect::<Vec<_>>()
                };
                let (gw, bw) = (w(&good), w(&bad));
                SplitSupport {
                    good,
                    bad,
                    good_w: Some(gw),
                    bad_w: Some(bw),
                }
            }
        })
    }

    pub(crate) fn check_oracle(&self, chi: &Oracle) -> Result<()> {
        if chi.domain_size() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: chi.domain_size(),
            });
        }
        Ok(())
    }
}

pub(crate) struct SplitSupport {
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
    pub good_w: Option<Vec<f64>>,
    pub bad_w: Option<Vec<f64>>,
}

/// Snap probabilities within the endpoint tolerance of 0 or 1.
pub(crate) fn clamp_probability(a: f64) -> f64 {
    let eps = crate::config::TOLERANCES.endpoint_clamp;
    if a < eps {
        0.0
    } else if a > 1.0 - eps {
        1.0
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Rng;

    fn random_state(dim: usize, seed: u64) -> StateVector {
        let mut rng = Rng::new(seed);
        let raw: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5))
            .collect();
        let n = raw.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        StateVector::new(raw.into_iter().map(|a| a / n).collect()).unwrap()
    }

    #[test]
    fn reflection_prepares_target() {
        let target = random_state(12, 3);
        let p = Preparation::from_state(&target).unwrap();
        assert!(p.initial_state().unwrap().max_abs_diff(&target) < 1e-14);
        let u = p.unitary().unwrap();
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn structured_inverse_matches_dense() {
        let preps = vec![
            Preparation::walsh_hadamard(3).unwrap(),
            Preparation::fourier(6).unwrap(),
            Preparation::from_state(&random_state(5, 8)).unwrap(),
            Preparation::product(
                &Preparation::fourier(3).unwrap(),
                &Preparation::from_state(&random_state(2, 1)).unwrap(),
            )
            .unwrap(),
        ];
        for p in preps {
            let d = p.dim();
            let x = random_state(d, 99);
            let u = p.unitary().unwrap().clone();
            let mut fwd = x.amps().to_vec();
            p.apply_in_place(&mut fwd).unwrap();
            let dense = u.mul_vec(x.amps());
            let mut inv = x.amps().to_vec();
            p.apply_inverse_in_place(&mut inv).unwrap();
            let dense_inv = u.dagger().mul_vec(x.amps());
            for i in 0..d {
                assert!((fwd[i] - dense[i]).norm() < 1e-12, "{p:?}");
                assert!((inv[i] - dense_inv[i]).norm() < 1e-12, "{p:?}");
            }
        }
    }

    #[test]
    fn uniform_picks_walsh_for_powers_of_two() {
        assert!(format!("{:?}", Preparation::uniform(16).unwrap()).contains("walsh"));
        assert!(format!("{:?}", Preparation::uniform(12).unwrap()).contains("fourier"));
        assert!(format!("{:?}", Preparation::uniform(1).unwrap()).contains("fourier"));
    }

    #[test]
    fn good_probability_is_exact_ratio_for_uniform() {
        let o = Oracle::planted(100, 7, &mut Rng::new(1)).unwrap();
        assert_eq!(
            Preparation::uniform(100)
                .unwrap()
                .good_probability(&o)
                .unwrap(),
            0.07
        );
        let p = Preparation::uniform_over(10, &[1, 3, 5, 7]).unwrap();
        let o = Oracle::from_good_set(10, &[3, 4]).unwrap();
        assert_eq!(p.good_probability(&o).unwrap(), 0.25);
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn oracle_dimension_checked() {
        let p = Preparation::uniform(8).unwrap();
        assert!(p.good_probability(&Oracle::constant(4, true)).is_err());
    }
}
