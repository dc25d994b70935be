use super::C64;
use crate::config::{MAX_MATRIX_DIM, TOLERANCES};
use crate::error::{Error, Result};

/// Dense `D×D` complex matrix, row-major, unitary up to [`TOLERANCES`].
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    entries: Vec<C64>,
}

impl Unitary {
    /// Matrix from row-major entries. Unitarity is verified in debug and test
    /// builds.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("unitary must have positive dimension"));
        }
        if dim > MAX_MATRIX_DIM {
            return Err(Error::DimensionOverflow {
                dim,
                cap: MAX_MATRIX_DIM,
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let u = Unitary { dim, entries };
        if cfg!(debug_assertions) {
            let dev = u.unitarity_defect();
            if dev > TOLERANCES.unitary {
                return Err(Error::invalid(format!(
                    "matrix is not unitary (defect {dev:e})"
                )));
            }
        }
        Ok(u)
    }

    /// Build from an entry function `(row, col) ↦ value`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        if dim > MAX_MATRIX_DIM {
            return Err(Error::DimensionOverflow {
                dim,
                cap: MAX_MATRIX_DIM,
            });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(vec![C64::new(1.0, 0.0); dim]).expect("identity is unitary")
    }

    /// Diagonal matrix; every entry must have modulus one.
    pub fn diagonal(diag: Vec<C64>) -> Result<Self> {
        let dim = diag.len();
        Self::from_fn(
            dim,
            |r, c| if r == c { diag[r] } else { C64::new(0.0, 0.0) },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn column(&self, col: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self.entry(r, col)).collect()
    }

    /// `self · other`
    pub fn mul(&self, other: &Unitary) -> Result<Unitary> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.entries[k * d..(k + 1) * d];
                for (o, b) in out[r * d..(r + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Unitary {
            dim: d,
            entries: out,
        })
    }

    /// Conjugate transpose, which is also the inverse.
    pub fn dagger(&self) -> Unitary {
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                out[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Unitary {
            dim: d,
            entries: out,
        }
    }

    /// `self ⊗ other`, `self` acting on the high-order register.
    pub fn kron(&self, other: &Unitary) -> Result<Unitary> {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |r, c| {
            self.entry(r / b, c / b) * other.entry(r % b, c % b)
        })
    }

    pub fn scaled(&self, s: C64) -> Unitary {
        Unitary {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `U† v` without materialising `U†`.
    pub fn mul_vec_dagger(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (row, &x) in self.entries.chunks_exact(self.dim).zip(v) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * x;
            }
        }
        out
    }

    /// Entrywise max of `|U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..d {
                    s += self.entries[k * d + i].conj() * self.entries[k * d + j];
                }
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
