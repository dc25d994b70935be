//! Counting the good set of `f : {0..N−1} → {0,1}` with amplitude estimation.
//!
//! Everything here is built on [`count`], which runs estimation with
//! `A = W` (when `N` is a power of two) or `A = F_N` and scales the estimate
//! by `N`. Wherever a guarantee at `t = N` needs an even modulus, the
//! prescribed modulus is rounded up to the next even integer.

use std::f64::consts::PI;

use crate::amplify::{derandomize_rescale, qsearch, Preparation, QSearchConfig};
use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::estimate::est_amp;
use crate::oracle::Oracle;
use crate::sim::{Engine, Rng};

/// Probe modulus in [`exact_count`]: `⌈14π√N⌉`.
pub const EXACT_PROBE_FACTOR: f64 = 14.0 * PI;
/// Final modulus factor in [`exact_count`]: `⌈30√((t′+1)(N−t′+1))⌉`.
pub const EXACT_FINAL_FACTOR: f64 = 30.0;
/// Final modulus factor in [`approx_count`]: `⌈20π²/ε · 2^ℓ⌉`.
pub const APPROX_FINAL_FACTOR: f64 = 20.0 * PI * PI;
/// `L₁ = ⌈9π · 2^ℓ⌉` in [`opt_approx_count`].
pub const OPT_L1_FACTOR: f64 = 9.0 * PI;
/// Confidence parameter behind `L₂` in [`opt_approx_count`].
pub const OPT_K: u32 = 21;
/// `c = 8πk`, the `L₂` probe modulus is `⌈c/√ε⌉`.
pub const OPT_C: f64 = 8.0 * PI * OPT_K as f64;
/// Final modulus in [`opt_approx_count`] is `⌈10πM⌉`.
pub const OPT_FINAL_FACTOR: f64 = 10.0 * PI;
/// `M₂ = ⌈2√((t′+1)(N−t′+1))⌉` from the smaller of two `⌈14π√N⌉` probes.
pub const OPT_M2_FACTOR: f64 = 2.0;

/// Outcome of a counting run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountResult {
    /// Real-valued estimate `t′ = N·ã` of the final estimation.
    pub t_prime: f64,
    /// `t′` rounded to an integer.
    pub t_tilde: u64,
    /// Modulus of the final estimation.
    pub m: u64,
    /// Confidence parameter the final modulus was chosen for.
    pub k: u32,
    pub queries: u64,
}

/// `t′` rounded to the nearest integer, ties down: `|t̃ − t′| ≤ 1/2`.
pub fn round_count(t_prime: f64) -> u64 {
    let f = t_prime.floor();
    if t_prime - f > 0.5 {
        f as u64 + 1
    } else {
        f as u64
    }
}

/// `⌈√n⌉` in integer arithmetic.
pub fn ceil_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while r * r < n {
        r += 1;
    }
    r
}

/// Round up to the next even integer.
pub fn evenize(m: u64) -> u64 {
    m + (m & 1)
}

/// `2πk√(t(N−t))/M + π²k²N/M²`
pub fn count_error_bound(n: u64, t: u64, m: u64, k: u32) -> f64 {
    let (n, t, m, k) = (n as f64, t as f64, m as f64, k as f64);
    2.0 * PI * k * (t * (n - t)).max(0.0).sqrt() / m + PI * PI * k * k * n / (m * m)
}

/// `√(N/(⌊εt⌋+1)) + √(t(N−t))/(⌊εt⌋+1)`, the cost scale of
/// [`opt_approx_count`].
pub fn opt_cost_scale(n: u64, t: u64, eps: f64) -> f64 {
    let d = (eps * t as f64).floor() + 1.0;
    let (n, t) = (n as f64, t as f64);
    (n / d).sqrt() + (t * (n - t)).max(0.0).sqrt() / d
}

fn modulus(x: f64) -> Result<u64> {
    let m = x.ceil();
    if !(m.is_finite() && m >= 1.0 && m < (1u64 << 62) as f64) {
        return Err(Error::invalid(format!("modulus {x} out of range")));
    }
    Ok(m as u64)
}

fn counting_prep(o: &Oracle) -> Result<Preparation> {
    Preparation::uniform(o.domain_size())
}

/// `Count(f, M)` with the estimation outcome `y`.
fn count_raw(
    o: &Oracle,
    prep: &Preparation,
    m: u64,
    rng: &mut Rng,
    engine: Engine,
) -> Result<(f64, usize)> {
    let m = usize::try_from(m).map_err(|_| Error::invalid("modulus does not fit in usize"))?;
    let r = est_amp(prep, o, m, rng, engine)?;
    Ok((o.domain_size() as f64 * r.a_tilde, r.y))
}

/// `t′ = N · Est_Amp(A, f, M)`. Bills exactly `M` queries.
pub fn count(o: &Oracle, m: u64, rng: &mut Rng, engine: Engine) -> Result<CountResult> {
    let start = o.queries();
    let (t_prime, _) = count_raw(o, &counting_prep(o)?, m, rng, engine)?;
    Ok(CountResult {
        t_prime,
        t_tilde: round_count(t_prime),
        m,
        k: 1,
        queries: o.queries() - start,
    })
}

/// `Count(f, ⌈√N⌉)`; error below `2π√(t(N−t)/N) + 11` with probability `8/π²`.
pub fn count_std(o: &Oracle, rng: &mut Rng, engine: Engine) -> Result<CountResult> {
    count(o, ceil_sqrt(o.domain_size() as u64), rng, engine)
}

/// Options for [`approx_count_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ApproxCountOptions {
    /// Take the rough estimate of `√(N/t)` from the final `M` of a [`qsearch`]
    /// run instead of the doubling loop.
    pub seed_from_qsearch: bool,
    /// Query cap for that search; `20⌈√N⌉` when unset.
    pub qsearch_budget: Option<u64>,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!(
            "accuracy ε must satisfy 0 < ε ≤ 1, got {eps}"
        )));
    }
    Ok(())
}

/// Doubling loop: `Count(f, 2^ℓ)` for `ℓ = 1, 2, …` until the estimate is
/// nonzero or `2^ℓ ≥ 2√N`. Returns the final `2^ℓ`.
fn rough_scale(o: &Oracle, prep: &Preparation, rng: &mut Rng, engine: Engine) -> Result<u64> {
    let n = o.domain_size() as u128;
    let mut l = 0u32;
    loop {
        l += 1;
        if l >= 62 {
            return Err(Error::invalid("doubling loop overflowed"));
        }
        let (_, y) = count_raw(o, prep, 1u64 << l, rng, engine)?;
        // 2^ℓ < 2√N  ⇔  4^{ℓ−1} < N
        let below = 1u128 << (2 * (l - 1)) < n;
        if !(y == 0 && below) {
            return Ok(1 << l);
        }
    }
}

/// Estimate `t` to within `εt` with probability at least 2/3.
pub fn approx_count(o: &Oracle, eps: f64, rng: &mut Rng, engine: Engine) -> Result<CountResult> {
    approx_count_with(o, eps, &ApproxCountOptions::default(), rng, engine)
}

pub fn approx_count_with(
    o: &Oracle,
    eps: f64,
    opts: &ApproxCountOptions,
    rng: &mut Rng,
    engine: Engine,
) -> Result<CountResult> {
    check_eps(eps)?;
    let start = o.queries();
    let prep = counting_prep(o)?;
    let scale = if opts.seed_from_qsearch {
        let n = o.domain_size() as u64;
        let budget = opts.qsearch_budget.unwrap_or(20 * ceil_sqrt(n));
        let cfg = QSearchConfig::with_cap(budget);
        match qsearch(&prep, o, &cfg, rng, engine) {
            Ok(out) => out.final_m,
            Err(Error::BudgetExhausted { .. }) => 2 * ceil_sqrt(n),
            Err(e) => return Err(e),
        }
    } else {
        rough_scale(o, &prep, rng, engine)?
    };
    let m = evenize(modulus(APPROX_FINAL_FACTOR / eps * scale as f64)?);
    let (t_prime, _) = count_raw(o, &prep, m, rng, engine)?;
    Ok(CountResult {
        t_prime,
        t_tilde: round_count(t_prime),
        m,
        k: 1,
        queries: o.queries() - start,
    })
}

/// Count `t` exactly with probability at least 2/3.
///
/// Two probes `Count(f, ⌈14π√N⌉)` give rough estimates `t′ᵢ`; the final
/// modulus is `min ⌈30√((t′ᵢ+1)(N−t′ᵢ+1))⌉`.
pub fn exact_count(o: &Oracle, rng: &mut Rng, engine: Engine) -> Result<CountResult> {
    let start = o.queries();
    let prep = counting_prep(o)?;
    let n = o.domain_size() as f64;
    let probe = modulus(EXACT_PROBE_FACTOR * n.sqrt())?;
    let mut m = u64::MAX;
    for _ in 0..2 {
        let (t, _) = count_raw(o, &prep, probe, rng, engine)?;
        m = m.min(modulus(
            EXACT_FINAL_FACTOR * ((t + 1.0) * (n - t + 1.0)).sqrt(),
        )?);
    }
    let m = evenize(m);
    let (t_prime, _) = count_raw(o, &prep, m, rng, engine)?;
    Ok(CountResult {
        t_prime,
        t_tilde: round_count(t_prime),
        m,
        k: 7,
        queries: o.queries() - start,
    })
}

/// Intermediate quantities of [`opt_approx_count`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptCountPlan {
    /// `⌈9π·2^ℓ⌉`, tracks `√(N/(t+1))`.
    pub l1: u64,
    /// `⌈2r̃⌉ + 1`, tracks `√((N−t)/(εN))`.
    pub l2: u64,
    /// `L₁(1 + L₂)/√ε`
    pub m1: f64,
    /// Only computed when `M₁ > √N`; tracks `√((t+1)(N−t+1))`.
    pub m2: Option<u64>,
    /// `min(M₁, M₂)`
    pub m: f64,
    /// The cost scale `S` at the true `t` (read without queries).
    pub s: f64,
}

/// Estimate `t` to within `εt` with probability at least 2/3 using
/// `Θ(S)` queries, `S` as in [`opt_cost_scale`]. Needs `1/(3N) < ε ≤ 1`.
pub fn opt_approx_count(
    o: &Oracle,
    eps: f64,
    rng: &mut Rng,
    engine: Engine,
) -> Result<(CountResult, OptCountPlan)> {
    check_eps(eps)?;
    let n_int = o.domain_size() as u64;
    let n = n_int as f64;
    if eps * n <= 1.0 / 3.0 {
        return Err(Error::invalid(format!(
            "ε = {eps} needs εN > 1/3 (N = {n_int})"
        )));
    }
    let start = o.queries();
    let prep = counting_prep(o)?;

    let l1 = modulus(OPT_L1_FACTOR * rough_scale(o, &prep, rng, engine)? as f64)?;

    let not_f = o.negate();
    let probe = modulus(OPT_C / eps.sqrt())?;
    let mut r = f64::INFINITY;
    for _ in 0..2 {
        let (ri, _) = count_raw(&not_f, &prep, probe, rng, engine)?;
        r = r.min((ri / (eps * n)).sqrt());
    }
    let l2 = modulus(2.0 * r).unwrap_or(0) + 1;

    let m1 = l1 as f64 * (1.0 + l2 as f64) / eps.sqrt();
    let m2 = if m1 > n.sqrt() {
        let probe = modulus(EXACT_PROBE_FACTOR * n.sqrt())?;
        let mut m2 = u64::MAX;
        for _ in 0..2 {
            let (t, _) = count_raw(o, &prep, probe, rng, engine)?;
            m2 = m2.min(modulus(OPT_M2_FACTOR * ((t + 1.0) * (n - t + 1.0)).sqrt())?);
        }
        Some(m2)
    } else {
        None
    };
    let m = m2.map_or(m1, |m2| m1.min(m2 as f64));
    let final_m = evenize(modulus(OPT_FINAL_FACTOR * m)?);
    let (t_prime, _) = count_raw(o, &prep, final_m, rng, engine)?;
    let result = CountResult {
        t_prime,
        t_tilde: round_count(t_prime),
        m: final_m,
        k: 1,
        queries: o.queries() - start,
    };
    let plan = OptCountPlan {
        l1,
        l2,
        m1,
        m2,
        m,
        s: opt_cost_scale(n_int, o.good_count() as u64, eps),
    };
    Ok((result, plan))
}

/// Answer of [`decide_zero_or_t0`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Zero,
    /// `t = t₀`, with a uniformly random good element.
    T0 {
        witness: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionOutcome {
    pub decision: Decision,
    /// Good probability of the final measured state.
    pub success_probability: f64,
    pub queries: u64,
}

/// Decide with certainty whether `t = 0` or `t = t₀`, given that one holds.
///
/// Runs rescaled amplification planned for `a = t₀/N`, which ends in the good
/// subspace with certainty when `t = t₀` and never reaches it when `t = 0`.
/// A final good probability strictly between the two is reported as
/// [`Error::PromiseViolated`].
pub fn decide_zero_or_t0(
    o: &Oracle,
    t0: u64,
    rng: &mut Rng,
    engine: Engine,
) -> Result<DecisionOutcome> {
    let n = o.domain_size() as u64;
    if t0 == 0 || t0 > n {
        return Err(Error::invalid(format!(
            "t0 must satisfy 1 ≤ t0 ≤ N, got {t0} with N = {n}"
        )));
    }
    let prep = counting_prep(o)?;
    let start = o.queries();
    let (z, good, p) = if t0 == n {
        let p = prep.good_probability(o)?;
        let model = crate::amplify::AmplitudeModel::new(&prep, o)?;
        let z = match engine {
            Engine::Exact => crate::sim::measure(prep.initial_state()?, rng),
            Engine::Analytic => model.measure_after(0, rng),
        };
        (z, o.evaluate(z)?, p)
    } else {
        let out = derandomize_rescale(&prep, o, t0 as f64 / n as f64, rng, engine)?;
        (out.z, out.good, out.success_probability)
    };
    let tol = TOLERANCES.phase_residual;
    let decision = if p >= 1.0 - tol && good {
        Decision::T0 { witness: z }
    } else if p <= tol && !good {
        Decision::Zero
    } else {
        return Err(Error::PromiseViolated { probability: p });
    };
    Ok(DecisionOutcome {
        decision,
        success_probability: p,
        queries: o.queries() - start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_count(0.0), 0);
        assert_eq!(round_count(1.9), 2);
        assert_eq!(round_count(2.5), 2);
        assert_eq!(round_count(2.5000001), 3);
    }

    #[test]
    fn integer_helpers() {
        assert_eq!(ceil_sqrt(100), 10);
        assert_eq!(ceil_sqrt(101), 11);
        assert_eq!(ceil_sqrt(64), 8);
        assert_eq!(ceil_sqrt(1024), 32);
        assert_eq!(ceil_sqrt(0), 0);
        assert_eq!((evenize(351), evenize(352)), (352, 352));
    }

    #[test]
    fn zero_count_is_certain() {
        let o = Oracle::constant(16, false);
        for engine in [Engine::Exact, Engine::Analytic] {
            for m in [1u64, 3, 7, 16] {
                let r = count(&o.detached(), m, &mut Rng::new(m), engine).unwrap();
                assert_eq!((r.t_prime, r.queries), (0.0, m));
            }
        }
    }

    #[test]
    fn half_on_four_is_exact() {
        let o = Oracle::from_good_set(4, &[0, 3]).unwrap();
        for s in 0..10 {
            let r = count(&o, 4, &mut Rng::new(s), Engine::Exact).unwrap();
            assert!((r.t_prime - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_on_four_law() {
        // t′ = 4·sin²(π/4) = 2 when y ∈ {1, 3}; y = 1 carries 0.6997 under
        // ω = 1/6, y = 3 the same under ω = 5/6, and each mode leaks 0.0502 to
        // the other
        let o = Oracle::singleton(4, 2).unwrap();
        let trials = 20_000;
        let hits = (0..trials)
            .filter(|&s| {
                let r = count(
                    &o.detached(),
                    4,
                    &mut Rng::for_trial(3, s),
                    Engine::Analytic,
                )
                .unwrap();
                (r.t_prime - 2.0).abs() < 1e-9
            })
            .count();
        let pmf = crate::estimate::qft_measure_pmf(1.0 / 6.0, 4);
        let p = pmf[1] + pmf[3];
        assert!((hits as f64 / trials as f64 - p).abs() < 0.015, "{hits}");
    }

    #[test]
    fn count_std_uses_ceil_sqrt() {
        let o = Oracle::constant(1024, false);
        let r = count_std(&o, &mut Rng::new(0), Engine::Analytic).unwrap();
        assert_eq!((r.t_tilde, r.queries, r.m), (0, 32, 32));
        let o = Oracle::constant(100, false);
        assert_eq!(
            count_std(&o, &mut Rng::new(0), Engine::Analytic).unwrap().m,
            10
        );
    }

    #[test]
    fn approx_count_at_zero_runs_full_loop() {
        // N = 256: ℓ = 1..5 (2⁵ = 32 ≥ 2·16), then ⌈20π²·32⌉ evenized
        let o = Oracle::constant(256, false);
        let r = approx_count(&o, 1.0, &mut Rng::new(1), Engine::Analytic).unwrap();
        let m = evenize((APPROX_FINAL_FACTOR * 32.0).ceil() as u64);
        assert_eq!(r.t_tilde, 0);
        assert_eq!(r.m, m);
        assert_eq!(r.queries, 2 + 4 + 8 + 16 + 32 + m);
    }

    #[test]
    fn approx_count_all_good() {
        let o = Oracle::constant(64, true);
        for s in 0..20 {
            let r = approx_count(&o.detached(), 1.0, &mut Rng::new(s), Engine::Analytic).unwrap();
            assert_eq!(r.t_tilde, 64);
        }
    }

    #[test]
    fn approx_count_qsearch_seed() {
        let o = Oracle::adversarial(256, 16).unwrap();
        let opts = ApproxCountOptions {
            seed_from_qsearch: true,
            qsearch_budget: None,
        };
        let ok = (0..100)
            .filter(|&s| {
                let r =
                    approx_count_with(&o, 0.5, &opts, &mut Rng::for_trial(2, s), Engine::Analytic)
                        .unwrap();
                (r.t_tilde as f64 - 16.0).abs() <= 8.0
            })
            .count();
        assert!(ok >= 67, "{ok}");
        let zero = Oracle::constant(256, false);
        let r = approx_count_with(&zero, 0.5, &opts, &mut Rng::new(0), Engine::Analytic).unwrap();
        assert_eq!(r.t_tilde, 0);
    }

    #[test]
    fn exact_count_traces() {
        let o = Oracle::constant(64, false);
        let r = exact_count(&o, &mut Rng::new(0), Engine::Analytic).unwrap();
        // probes ⌈14π·8⌉ = 352 each, final ⌈30√65⌉ = 242
        assert_eq!((r.t_tilde, r.m, r.queries), (0, 242, 352 * 2 + 242));
        let o = Oracle::constant(64, true);
        for s in 0..20 {
            let r = exact_count(&o.detached(), &mut Rng::new(s), Engine::Analytic).unwrap();
            assert_eq!(r.t_tilde, 64);
        }
    }

    #[test]
    fn opt_count_certainty_and_range() {
        for (t, n) in [(0usize, 64usize), (64, 64)] {
            let o = Oracle::adversarial(n, t).unwrap();
            for s in 0..10 {
                let (r, plan) =
                    opt_approx_count(&o.detached(), 0.5, &mut Rng::new(s), Engine::Analytic)
                        .unwrap();
                assert_eq!(r.t_tilde, t as u64);
                assert!(plan.m <= plan.m1);
            }
        }
        let o = Oracle::singleton(8, 0).unwrap();
        assert!(opt_approx_count(&o, 1.0 / 24.0, &mut Rng::new(0), Engine::Analytic).is_err());
        assert!(opt_approx_count(&o, 1.0 / 23.0, &mut Rng::new(0), Engine::Analytic).is_ok());
    }

    #[test]
    fn opt_cost_scale_example() {
        // t = 1, ε = 1, N = 64: √(64/2) + √63/2
        assert!((opt_cost_scale(64, 1, 1.0) - (32f64.sqrt() + 63f64.sqrt() / 2.0)).abs() < 1e-12);
        assert!((opt_cost_scale(64, 0, 0.5) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn decide_examples() {
        let o = Oracle::singleton(4, 2).unwrap();
        for engine in [Engine::Exact, Engine::Analytic] {
            let d = decide_zero_or_t0(&o, 1, &mut Rng::new(0), engine).unwrap();
            assert_eq!(d.decision, Decision::T0 { witness: 2 });
        }
        let o = Oracle::constant(16, false);
        for engine in [Engine::Exact, Engine::Analytic] {
            let d = decide_zero_or_t0(&o, 4, &mut Rng::new(0), engine).unwrap();
            assert_eq!(d.decision, Decision::Zero);
        }
        let o = Oracle::constant(8, true);
        let d = decide_zero_or_t0(&o, 8, &mut Rng::new(0), Engine::Analytic).unwrap();
        assert!(matches!(d.decision, Decision::T0 { .. }));
        assert_eq!(d.queries, 1);
    }

    #[test]
    fn decide_detects_broken_promise() {
        let o = Oracle::from_good_set(16, &[1, 2, 3]).unwrap();
        let err = decide_zero_or_t0(&o, 1, &mut Rng::new(0), Engine::Exact).unwrap_err();
        assert!(matches!(err, Error::PromiseViolated { .. }));
    }

    #[test]
    fn queries_reconcile_with_counter() {
        let o = Oracle::adversarial(32, 5).unwrap();
        let mut rng = Rng::new(4);
        let before = o.queries();
        let a = approx_count(&o, 0.5, &mut rng, Engine::Analytic).unwrap();
        let e = exact_count(&o, &mut rng, Engine::Analytic).unwrap();
        let (p, _) = opt_approx_count(&o, 0.5, &mut rng, Engine::Analytic).unwrap();
        assert_eq!(o.queries() - before, a.queries + e.queries + p.queries);
    }
}
