use super::{root_of_unity, Unitary, C64};
use crate::error::{Error, Result};

/// Quantum Fourier transform of modulus `m`:
/// `|x⟩ ↦ (1/√m) Σ_y e^{2πixy/m} |y⟩`, for any `m ≥ 1`.
pub fn fourier(m: usize) -> Result<Unitary> {
    if m == 0 {
        return Err(Error::invalid("Fourier modulus must be at least 1"));
    }
    let s = 1.0 / (m as f64).sqrt();
    Unitary::from_fn(m, |y, x| root_of_unity(x * y, m) * s)
}

/// Walsh–Hadamard transform on `n` qubits, `N = 2ⁿ`.
pub fn walsh_hadamard(n: u32) -> Result<Unitary> {
    if n == 0 {
        return Err(Error::invalid("Walsh–Hadamard needs at least one qubit"));
    }
    let dim = 1usize
        .checked_shl(n)
        .ok_or_else(|| Error::invalid("qubit count too large"))?;
    let s = 1.0 / (dim as f64).sqrt();
    Unitary::from_fn(dim, |r, c| {
        let sign = if (r & c).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        C64::new(sign * s, 0.0)
    })
}

/// In-place fast Walsh–Hadamard transform, normalised. `v.len()` must be a
/// power of two.
pub(crate) fn fwht(v: &mut [C64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let s = 1.0 / (n as f64).sqrt();
    v.iter_mut().for_each(|x| *x *= s);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{apply, StateVector};

    #[test]
    fn fourier_one_is_trivial() {
        let f = fourier(1).unwrap();
        assert_eq!(f.entry(0, 0), C64::new(1.0, 0.0));
    }

    #[test]
    fn fourier_two_is_hadamard() {
        let d = fourier(2)
            .unwrap()
            .max_abs_diff(&walsh_hadamard(1).unwrap());
        assert!(d < 1e-15);
    }

    #[test]
    fn fourier_four_on_zero_is_uniform() {
        let out = apply(&fourier(4).unwrap(), &StateVector::basis(4, 0).unwrap()).unwrap();
        for a in out.amps() {
            assert!((a - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_arguments_rejected() {
        assert!(fourier(0).is_err());
        assert!(walsh_hadamard(0).is_err());
    }

    #[test]
    fn fourier_is_unitary_up_to_64() {
        for m in 1..=64 {
            let f = fourier(m).unwrap();
            let p = f.dagger().mul(&f).unwrap();
            assert!(p.max_abs_diff(&Unitary::identity(m)) < 1e-9, "M = {m}");
        }
    }

    #[test]
    fn walsh_two_qubits_on_zero() {
        let out = apply(
            &walsh_hadamard(2).unwrap(),
            &StateVector::basis(4, 0).unwrap(),
        )
        .unwrap();
        for a in out.amps() {
            assert!((a - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn walsh_is_an_involution() {
        let w = walsh_hadamard(3).unwrap();
        let p = w.mul(&w).unwrap();
        assert!(p.max_abs_diff(&Unitary::identity(8)) < 1e-12);
    }

    #[test]
    fn fast_transform_matches_dense() {
        let w = walsh_hadamard(4).unwrap();
        let v: Vec<C64> = (0..16)
            .map(|i| C64::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        let dense = w.mul_vec(&v);
        let mut fast = v.clone();
        fwht(&mut fast);
        for (a, b) in dense.iter().zip(&fast) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
