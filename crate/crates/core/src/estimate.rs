//! Amplitude estimation.
//!
//! Phase estimation on `Q` returns `y` with `πy/M ≈ θ_a`, hence `ã = sin²(πy/M)`.
//! The first register is left in an equal mixture of `|S_M(θ_a/π)⟩` and
//! `|S_M(1 − θ_a/π)⟩`, so the outcome law is the average of two
//! [`qft_measure_pmf`]s. The analytic engine samples that law directly; the
//! exact engine builds `Σⱼ |j⟩ ⊗ Qʲ A|0⟩ / √M` and applies `F_M⁻¹`.

use std::f64::consts::PI;

use crate::amplify::{grover_iterate, theta_of, Preparation, QOperator};
use crate::config::{MAX_MATRIX_DIM, MAX_STATE_DIM, TOLERANCES};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::sim::{fwht, root_of_unity, sample_index, Engine, Rng, StateVector, Unitary, C64};

/// `|S_M(ω)⟩ = (1/√M) Σ_y e^{2πiωy} |y⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub m: usize,
    pub omega: f64,
}

impl PhaseState {
    pub fn new(m: usize, omega: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("phase state modulus must be at least 1"));
        }
        Ok(PhaseState {
            m,
            omega: omega.rem_euclid(1.0),
        })
    }

    pub fn vector(&self) -> StateVector {
        let s = 1.0 / (self.m as f64).sqrt();
        StateVector::from_raw(
            (0..self.m)
                .map(|y| C64::from_polar(s, 2.0 * PI * self.omega * y as f64))
                .collect(),
        )
    }
}

/// Length of the shortest arc between `e^{2πiω₀}` and `e^{2πiω₁}`, divided by `2π`.
pub fn arc_distance(omega0: f64, omega1: f64) -> f64 {
    let d = (omega1 - omega0).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `|⟨S_M(ω₀)|S_M(ω₁)⟩|² = sin²(MΔπ) / (M² sin²(Δπ))` with `Δ = d(ω₀, ω₁)`.
pub fn overlap_sq(omega0: f64, omega1: f64, m: usize) -> f64 {
    let delta = arc_distance(omega0, omega1);
    if delta < TOLERANCES.singular_arc || m == 1 {
        return 1.0;
    }
    let m = m as f64;
    let v = (m * delta * PI).sin().powi(2) / (m * m * (delta * PI).sin().powi(2));
    v.clamp(0.0, 1.0)
}

/// Exact integer `k` with `|Mω − k| ≤ 1e−12`, reduced mod `M`.
fn integral_position(omega: f64, m: usize) -> Option<usize> {
    let x = m as f64 * omega.rem_euclid(1.0);
    let r = x.round();
    ((x - r).abs() <= TOLERANCES.singular_arc).then(|| (r as usize) % m)
}

/// Law of `y` when `F_M⁻¹ |S_M(ω)⟩` is measured: `P(y) = overlap_sq(y/M, ω, M)`.
pub fn qft_measure_pmf(omega: f64, m: usize) -> Vec<f64> {
    assert!(m >= 1, "modulus must be positive");
    if let Some(k) = integral_position(omega, m) {
        let mut p = vec![0.0; m];
        p[k] = 1.0;
        return p;
    }
    (0..m)
        .map(|y| overlap_sq(y as f64 / m as f64, omega, m))
        .collect()
}

/// Outcome law of estimation at `θ_a`: `½ pmf(θ_a/π) + ½ pmf(1 − θ_a/π)`.
pub fn est_amp_pmf_analytic(theta_a: f64, m: usize) -> Vec<f64> {
    let omega = theta_a / PI;
    let p = qft_measure_pmf(omega, m);
    let q = qft_measure_pmf(1.0 - omega, m);
    p.iter().zip(&q).map(|(x, y)| 0.5 * (x + y)).collect()
}

/// One draw from `qft_measure_pmf(ω, M)`, walking outcomes outward from
/// `Mω` so that the cost tracks the spread of the law rather than `M`.
fn sample_phase(omega: f64, m: usize, u: f64) -> usize {
    if let Some(k) = integral_position(omega, m) {
        return k;
    }
    let centre = m as f64 * omega.rem_euclid(1.0);
    let lo0 = centre.floor() as i64;
    let (mut lo, mut hi) = (lo0, lo0 + 1);
    let wrap = |y: i64| y.rem_euclid(m as i64) as usize;
    let mut acc = 0.0;
    let mut last = wrap(lo);
    for _ in 0..m {
        // take whichever unvisited neighbour sits closer to Mω
        let y = if centre - lo as f64 <= hi as f64 - centre {
            lo -= 1;
            lo + 1
        } else {
            hi += 1;
            hi - 1
        };
        last = wrap(y);
        acc += overlap_sq(last as f64 / m as f64, omega, m);
        if u < acc {
            return last;
        }
    }
    last
}

/// Result of one run of [`est_amp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstAmpResult {
    pub y: usize,
    /// `sin²(πy/M)`
    pub a_tilde: f64,
    /// `πy/M`
    pub theta_tilde: f64,
    pub m: usize,
    pub queries: u64,
}

impl EstAmpResult {
    fn from_outcome(y: usize, m: usize, queries: u64) -> Self {
        let theta_tilde = PI * y as f64 / m as f64;
        EstAmpResult {
            y,
            a_tilde: theta_tilde.sin().powi(2),
            theta_tilde,
            m,
            queries,
        }
    }
}

/// How the exact engine prepares the uniform superposition on the first
/// register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstStage {
    #[default]
    Fourier,
    /// Walsh–Hadamard; only for `M` a power of two.
    Walsh,
}

/// Estimate `a` with modulus `M`. Bills exactly `M` queries.
pub fn est_amp(
    prep: &Preparation,
    chi: &Oracle,
    m: usize,
    rng: &mut Rng,
    engine: Engine,
) -> Result<EstAmpResult> {
    if m == 0 {
        return Err(Error::invalid("Est_Amp needs M ≥ 1"));
    }
    let start = chi.queries();
    let y = match engine {
        Engine::Analytic => {
            let theta = theta_of(prep.good_probability(chi)?);
            let u = rng.uniform();
            let (omega, u) = if u < 0.5 {
                (theta / PI, 2.0 * u)
            } else {
                (1.0 - theta / PI, 2.0 * u - 1.0)
            };
            sample_phase(omega, m, u)
        }
        Engine::Exact => {
            let stage = if m.is_power_of_two() {
                FirstStage::Walsh
            } else {
                FirstStage::Fourier
            };
            let pmf = est_amp_pmf_exact(prep, chi, m, stage)?;
            sample_index(pmf.iter().copied(), m, rng)
        }
    };
    chi.charge(m as u64);
    Ok(EstAmpResult::from_outcome(y, m, chi.queries() - start))
}

/// Outcome law of the estimation circuit, from the full statevector.
///
/// The composite register is `|j⟩ ⊗ |x⟩` at index `j·D + x`. No queries are
/// billed.
pub fn est_amp_pmf_exact(
    prep: &Preparation,
    chi: &Oracle,
    m: usize,
    stage: FirstStage,
) -> Result<Vec<f64>> {
    let d = prep.dim();
    let total = m.checked_mul(d).filter(|&n| n <= MAX_STATE_DIM);
    if m == 0 || total.is_none() {
        return Err(Error::DimensionOverflow {
            dim: m.saturating_mul(d),
            cap: MAX_STATE_DIM,
        });
    }
    let first = first_register(m, stage)?;
    let q = grover_iterate(prep, chi)?;
    let mut amps = vec![C64::new(0.0, 0.0); m * d];
    let mut block = prep.initial_state()?.clone();
    for j in 0..m {
        for (x, a) in block.amps().iter().enumerate() {
            amps[j * d + x] = first[j] * a;
        }
        if j + 1 < m {
            block = q.apply_uncharged(&block)?;
        }
    }
    // F_M⁻¹ on the first register, column by column
    let norm = 1.0 / (m as f64).sqrt();
    let roots: Vec<C64> = (0..m).map(|k| root_of_unity(k, m).conj()).collect();
    let mut pmf = vec![0.0; m];
    let mut column = vec![C64::new(0.0, 0.0); m];
    for x in 0..d {
        for j in 0..m {
            column[j] = amps[j * d + x];
        }
        for (y, p) in pmf.iter_mut().enumerate() {
            let v: C64 = column
                .iter()
                .enumerate()
                .map(|(j, c)| c * roots[(j * y) % m])
                .sum();
            *p += (v * norm).norm_sqr();
        }
    }
    Ok(pmf)
}

fn first_register(m: usize, stage: FirstStage) -> Result<Vec<C64>> {
    let mut v = vec![C64::new(0.0, 0.0); m];
    v[0] = C64::new(1.0, 0.0);
    match stage {
        FirstStage::Walsh => {
            if !m.is_power_of_two() {
                return Err(Error::invalid(format!(
                    "Walsh first stage needs M a power of two, got {m}"
                )));
            }
            fwht(&mut v);
        }
        // F_M|0⟩ is the uniform superposition
        FirstStage::Fourier => v.fill(C64::new(1.0 / (m as f64).sqrt(), 0.0)),
    }
    Ok(v)
}

/// `Λ_M(Q) = Σⱼ |j⟩⟨j| ⊗ Qʲ` as a dense matrix of dimension `M·D`.
pub fn controlled_powers(q: &QOperator, m: usize) -> Result<Unitary> {
    let d = q.dim();
    let dim = m.checked_mul(d).filter(|&n| m > 0 && n <= MAX_MATRIX_DIM);
    let Some(dim) = dim else {
        return Err(Error::DimensionOverflow {
            dim: m.saturating_mul(d),
            cap: MAX_MATRIX_DIM,
        });
    };
    let qm = q.matrix()?;
    let mut power = Unitary::identity(d);
    let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
    for j in 0..m {
        for r in 0..d {
            for c in 0..d {
                entries[(j * d + r) * dim + j * d + c] = power.entry(r, c);
            }
        }
        if j + 1 < m {
            power = qm.mul(&power)?;
        }
    }
    Unitary::new(dim, entries)
}

/// `2ε√(a(1−a)) + ε²`, a bound on `|sin²(θ_a ± ε) − a|`.
pub fn phase_error_to_amp_error(a: f64, eps: f64) -> f64 {
    2.0 * eps * (a * (1.0 - a)).max(0.0).sqrt() + eps * eps
}

/// `2πk√(a(1−a))/M + k²π²/M²`, the estimation error bound at confidence
/// parameter `k`.
pub fn est_amp_error_bound(a: f64, m: usize, k: u32) -> f64 {
    phase_error_to_amp_error(a, k as f64 * PI / m as f64)
}

/// Probability with which [`est_amp_error_bound`] is guaranteed to hold:
/// `8/π²` for `k = 1`, `1 − 1/(2(k−1))` for `k ≥ 2`.
pub fn est_amp_confidence(k: u32) -> f64 {
    match k {
        0 => 0.0,
        1 => 8.0 / (PI * PI),
        k => 1.0 - 1.0 / (2.0 * (k - 1) as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplify::build_q;
    use crate::sim::{apply, fourier};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn arc_distance_examples() {
        assert!(close(arc_distance(0.1, 0.9), 0.2, 1e-12));
        assert_eq!(arc_distance(0.3, 0.3), 0.0);
        // z ∈ {−1, 0, 1}: |−1 + 3/4 − 1/6| = 5/12, |7/12|, |1 + 7/12|
        let brute = [-1.0f64, 0.0, 1.0]
            .iter()
            .map(|z| (z + 0.75 - 1.0 / 6.0).abs())
            .fold(f64::MAX, f64::min);
        assert!(close(arc_distance(1.0 / 6.0, 0.75), brute, 1e-12));
        assert!(close(brute, 5.0 / 12.0, 1e-12));
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_sq(0.2, 0.2, 7), 1.0);
        assert!(overlap_sq(0.0, 0.5, 2) < 1e-30);
        assert_eq!(overlap_sq(0.1, 0.7, 1), 1.0);
    }

    #[test]
    fn overlap_matches_inner_product() {
        for m in [1usize, 2, 5, 8, 13] {
            for (w0, w1) in [(0.0, 0.3), (0.71, 0.12), (0.5, 0.5001), (0.9, 0.05)] {
                let a = PhaseState::new(m, w0).unwrap().vector();
                let b = PhaseState::new(m, w1).unwrap().vector();
                let direct = a.inner(&b).unwrap().norm_sqr();
                assert!(
                    close(direct, overlap_sq(w0, w1, m), 1e-12),
                    "M={m} ({w0},{w1})"
                );
            }
        }
    }

    #[test]
    fn phase_state_is_fourier_column() {
        // S_M(x/M) = F_M|x⟩
        let f = fourier(6).unwrap();
        for x in 0..6 {
            let s = PhaseState::new(6, x as f64 / 6.0).unwrap().vector();
            let col = StateVector::from_raw(f.column(x));
            assert!(s.max_abs_diff(&col) < 1e-12);
        }
    }

    #[test]
    fn pmf_point_mass() {
        let p = qft_measure_pmf(3.0 / 8.0, 8);
        assert_eq!(p[3], 1.0);
        assert_eq!(p.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn pmf_eighth_on_four() {
        let p = qft_measure_pmf(1.0 / 8.0, 4);
        let direct = |y: usize| {
            let d = (y as f64 / 4.0 - 0.125).abs();
            let d = d.min(1.0 - d);
            (4.0 * d * PI).sin().powi(2) / (16.0 * (d * PI).sin().powi(2))
        };
        for (y, &py) in p.iter().enumerate() {
            assert!(close(py, direct(y), 1e-14));
        }
        assert!(close(p[0], 0.42678, 1e-5) && close(p[1], 0.42678, 1e-5));
        assert!(close(p[2], 0.07322, 1e-5) && close(p[3], 0.07322, 1e-5));
        assert!(close(p.iter().sum(), 1.0, 1e-12));
    }

    #[test]
    fn pmf_sixth_on_four() {
        let p = qft_measure_pmf(1.0 / 6.0, 4);
        assert!(close(p[1], 0.6997, 1e-4));
        assert!(close(p[0], 0.1875, 1e-12));
        assert!(close(p[2], 0.0625, 1e-12));
        assert!(close(p[3], 0.05024, 1e-5));
    }

    #[test]
    fn pmf_matches_inverse_fourier_of_phase_state() {
        for m in [3usize, 5, 8] {
            for w in [0.05, 0.37, 0.8] {
                let s = PhaseState::new(m, w).unwrap().vector();
                let out = apply(&fourier(m).unwrap().dagger(), &s).unwrap();
                let p = qft_measure_pmf(w, m);
                for (amp, &py) in out.amps().iter().zip(&p) {
                    assert!(close(amp.norm_sqr(), py, 1e-12));
                }
            }
        }
    }

    #[test]
    fn outward_sampler_reproduces_pmf() {
        let (w, m) = (0.3141, 17);
        let p = qft_measure_pmf(w, m);
        // inverting on a fine grid of u recovers each outcome's mass
        let steps = 200_000;
        let mut counts = vec![0usize; m];
        for i in 0..steps {
            counts[sample_phase(w, m, (i as f64 + 0.5) / steps as f64)] += 1;
        }
        for y in 0..m {
            assert!(close(counts[y] as f64 / steps as f64, p[y], 1e-4), "y={y}");
        }
    }

    #[test]
    fn controlled_powers_trivial_cases() {
        let p = Preparation::uniform(4).unwrap();
        let o = Oracle::singleton(4, 3).unwrap();
        let q = grover_iterate(&p, &o).unwrap();
        let id = controlled_powers(&q, 1).unwrap();
        assert!(id.max_abs_diff(&Unitary::identity(4)) < 1e-12);
    }

    #[test]
    fn controlled_z_structure() {
        // A = I, φ = 0, good = {0}, φ' = π: Q = −S_χ(π) = diag(1, −1)
        let p = Preparation::from_unitary(Unitary::identity(2));
        let o = Oracle::singleton(2, 0).unwrap();
        let q = build_q(&p, &o, 0.0, PI).unwrap();
        let diag = Unitary::diagonal(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
        assert!(q.matrix().unwrap().max_abs_diff(&diag) < 1e-12);
        let lam = controlled_powers(&q, 2).unwrap();
        let expect = Unitary::diagonal(vec![
            1.0.into(),
            1.0.into(),
            1.0.into(),
            C64::new(-1.0, 0.0),
        ])
        .unwrap();
        assert!(lam.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn dense_circuit_matches_exact_pmf() {
        // (F_M⁻¹ ⊗ I) Λ_M(Q) (F_M ⊗ A) |0⟩|0⟩ for N = 4 Grover, M = 8
        let p = Preparation::uniform(4).unwrap();
        let o = Oracle::singleton(4, 2).unwrap();
        let q = grover_iterate(&p, &o).unwrap();
        let m = 8;
        let lam = controlled_powers(&q, m).unwrap();
        let f = fourier(m).unwrap();
        let a = p.unitary().unwrap();
        let pre = f.kron(a).unwrap();
        let post = f.dagger().kron(&Unitary::identity(4)).unwrap();
        let circuit = post.mul(&lam).unwrap().mul(&pre).unwrap();
        let out = apply(&circuit, &StateVector::basis(m * 4, 0).unwrap()).unwrap();
        let mut dense = vec![0.0; m];
        for (i, c) in out.amps().iter().enumerate() {
            dense[i / 4] += c.norm_sqr();
        }
        let analytic = est_amp_pmf_analytic(PI / 6.0, m);
        for stage in [FirstStage::Fourier, FirstStage::Walsh] {
            let exact = est_amp_pmf_exact(&p, &o, m, stage).unwrap();
            for y in 0..m {
                assert!(close(exact[y], dense[y], 1e-10));
                assert!(close(exact[y], analytic[y], 1e-10));
            }
        }
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn eigenphase_kick() {
        // |j⟩|Ψ±⟩ ↦ e^{±2iθj}|j⟩|Ψ±⟩ with θ = π/6 on N = 4
        let p = Preparation::uniform(4).unwrap();
        let o = Oracle::singleton(4, 1).unwrap();
        let q = grover_iterate(&p, &o).unwrap();
        let spec = crate::amplify::decompose(&p, &o).unwrap();
        let (plus, minus) = spec.eigenvectors().unwrap();
        let lam = controlled_powers(&q, 8).unwrap();
        for (v, sign) in [(plus, 1.0), (minus, -1.0)] {
            for j in 0..8 {
                let input = StateVector::basis(8, j).unwrap().kron(&v);
                let out = apply(&lam, &input).unwrap();
                let kicked = input.scaled(C64::from_polar(1.0, sign * 2.0 * (PI / 6.0) * j as f64));
                assert!(out.max_abs_diff(&kicked) < 1e-10);
            }
        }
    }

    #[test]
    fn a_zero_estimates_zero() {
        let p = Preparation::uniform(8).unwrap();
        let o = Oracle::constant(8, false);
        for engine in [Engine::Exact, Engine::Analytic] {
            for m in [1usize, 3, 8, 13] {
                let r = est_amp(&p, &o.detached(), m, &mut Rng::new(m as u64), engine).unwrap();
                assert_eq!((r.y, r.a_tilde), (0, 0.0));
                assert_eq!(r.queries, m as u64);
            }
        }
    }

    #[test]
    fn half_on_four_is_exact() {
        let p = Preparation::uniform(2).unwrap();
        let o = Oracle::singleton(2, 1).unwrap();
        let pmf = est_amp_pmf_analytic(PI / 4.0, 4);
        assert_eq!(pmf, vec![0.0, 0.5, 0.0, 0.5]);
        let exact = est_amp_pmf_exact(&p, &o, 4, FirstStage::Fourier).unwrap();
        assert!(close(exact[1], 0.5, 1e-12) && close(exact[3], 0.5, 1e-12));
        for s in 0..20 {
            let r = est_amp(&p, &o, 4, &mut Rng::new(s), Engine::Analytic).unwrap();
            assert!(r.y == 1 || r.y == 3);
            assert!(close(r.a_tilde, 0.5, 1e-15));
        }
    }

    #[test]
    fn a_one_even_m_estimates_one() {
        let p = Preparation::uniform(4).unwrap();
        let o = Oracle::constant(4, true);
        for engine in [Engine::Exact, Engine::Analytic] {
            for m in [2usize, 4, 6, 10] {
                let r = est_amp(&p, &o, m, &mut Rng::new(7), engine).unwrap();
                assert_eq!(r.y, m / 2);
                assert!(close(r.a_tilde, 1.0, 1e-15));
            }
        }
    }

    #[test]
    fn error_bound_helpers() {
        assert_eq!(phase_error_to_amp_error(0.3, 0.0), 0.0);
        assert!(close(phase_error_to_amp_error(0.0, 0.2), 0.04, 1e-15));
        assert!(close(phase_error_to_amp_error(0.5, 0.1), 0.11, 1e-15));
        let direct = ((PI / 4.0 + 0.1).sin().powi(2) - 0.5).abs();
        assert!(close(direct, 0.0993, 1e-4) && direct <= 0.11);
        assert!(close(est_amp_confidence(1), 0.8106, 1e-4));
        assert!(close(est_amp_confidence(3), 0.75, 1e-15));
    }

    #[test]
    fn exact_engine_refuses_oversized_register() {
        let p = Preparation::uniform(1024).unwrap();
        let o = Oracle::singleton(1024, 0).unwrap();
        let err = est_amp_pmf_exact(&p, &o, 64, FirstStage::Fourier).unwrap_err();
        assert!(matches!(err, Error::DimensionOverflow { .. }));
    }
}
