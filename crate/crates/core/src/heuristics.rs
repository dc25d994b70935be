//! Amplitude amplification over the seed space of a classical heuristic.
//!
//! A heuristic maps a seed `r ∈ R` to a candidate `x = G(r)`. Searching seeds
//! with `χ(r) = f(G(r))` finds a solution after `Θ(√(|R|/h))` expected
//! queries when `h` seeds are good, against `Θ(|R|/h)` for classical
//! guessing.

use std::fmt;
use std::sync::Arc;

use crate::amplify::{qsearch, Preparation, QSearchConfig};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::sim::{Engine, Rng};

/// A guessing function `G : R → X` for one problem instance.
#[derive(Clone)]
pub struct Heuristic {
    seeds: usize,
    guess: Arc<dyn Fn(usize) -> usize + Send + Sync>,
}

impl fmt::Debug for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Heuristic")
            .field("seeds", &self.seeds)
            .finish_non_exhaustive()
    }
}

impl Heuristic {
    pub fn from_fn(
        seeds: usize,
        guess: impl Fn(usize) -> usize + Send + Sync + 'static,
    ) -> Result<Self> {
        if seeds == 0 {
            return Err(Error::invalid("seed space must be non-empty"));
        }
        Ok(Heuristic {
            seeds,
            guess: Arc::new(guess),
        })
    }

    pub fn from_table(table: Vec<usize>) -> Result<Self> {
        let table: Arc<[usize]> = table.into();
        Self::from_fn(table.len(), move |r| table[r])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |r| r)
    }

    pub fn constant(seeds: usize, x: usize) -> Result<Self> {
        Self::from_fn(seeds, move |_| x)
    }

    pub fn seed_space(&self) -> usize {
        self.seeds
    }

    pub fn guess(&self, r: usize) -> usize {
        (self.guess)(r)
    }

    fn check_range(&self, o: &Oracle) -> Result<()> {
        for r in 0..self.seeds {
            let x = self.guess(r);
            if x >= o.domain_size() {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    size: o.domain_size(),
                });
            }
        }
        Ok(())
    }
}

/// `χ(r) = f(G(r))` on the seed space. Shares `o`'s counter, so each
/// evaluation costs one `f`-query.
pub fn lift(h: &Heuristic, o: &Oracle) -> Result<Oracle> {
    h.check_range(o)?;
    let (f, g) = (o.clone(), h.clone());
    Ok(o.derive(h.seed_space(), move |r| f.peek(g.guess(r))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicOutcome {
    pub seed: usize,
    pub x: usize,
    pub queries: u64,
}

/// Run [`qsearch`] over seeds and return `x = G(r)`, checked with one more
/// query to `f`.
pub fn heuristic_search(
    h: &Heuristic,
    o: &Oracle,
    config: &QSearchConfig,
    rng: &mut Rng,
    engine: Engine,
) -> Result<HeuristicOutcome> {
    let start = o.queries();
    let chi = lift(h, o)?;
    let prep = Preparation::uniform(h.seed_space())?;
    let found = qsearch(&prep, &chi, config, rng, engine)?;
    let x = h.guess(found.z);
    finish(o, found.z, x, start)
}

/// The same search with `G` folded into the preparation: `A` prepares
/// `Σ_r |r⟩|G(r)⟩/√|R|` on `R × X` (index `r·N + x`) and `χ(r, x) = f(x)`.
pub fn heuristic_search_embedded(
    h: &Heuristic,
    o: &Oracle,
    config: &QSearchConfig,
    rng: &mut Rng,
    engine: Engine,
) -> Result<HeuristicOutcome> {
    h.check_range(o)?;
    let start = o.queries();
    let n = o.domain_size();
    let dim = h
        .seed_space()
        .checked_mul(n)
        .ok_or(Error::DimensionOverflow {
            dim: usize::MAX,
            cap: crate::config::MAX_STATE_DIM,
        })?;
    let support: Vec<usize> = (0..h.seed_space()).map(|r| r * n + h.guess(r)).collect();
    let prep = Preparation::uniform_over(dim, &support)?;
    let f = o.clone();
    let chi = o.derive(dim, move |i| f.peek(i % n));
    let found = qsearch(&prep, &chi, config, rng, engine)?;
    finish(o, found.z / n, found.z % n, start)
}

fn finish(o: &Oracle, seed: usize, x: usize, start: u64) -> Result<HeuristicOutcome> {
    if !o.evaluate(x)? {
        return Err(Error::invalid(format!(
            "search returned x = {x} with f(x) = 0"
        )));
    }
    Ok(HeuristicOutcome {
        seed,
        x,
        queries: o.queries() - start,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicStats {
    /// Good seeds.
    pub h_f: usize,
    /// Good inputs.
    pub t_f: usize,
    pub seeds: usize,
    pub domain: usize,
}

impl HeuristicStats {
    /// `h_f/|R| > t_f/|X|`: a random seed beats a random input.
    pub fn efficient(&self) -> bool {
        (self.h_f as u128) * (self.domain as u128) > (self.t_f as u128) * (self.seeds as u128)
    }

    /// `√(|R|/h_f)`, infinite when no seed is good.
    pub fn quantum_scale(&self) -> f64 {
        (self.seeds as f64 / self.h_f as f64).sqrt()
    }
}

/// Exhaustive `h_f` and `t_f`, billed to a detached counter.
pub fn stats(h: &Heuristic, o: &Oracle) -> Result<HeuristicStats> {
    h.check_range(o)?;
    let probe = o.detached();
    let mut h_f = 0;
    for r in 0..h.seed_space() {
        h_f += usize::from(probe.evaluate(h.guess(r))?);
    }
    let mut t_f = 0;
    for x in 0..o.domain_size() {
        t_f += usize::from(probe.evaluate(x)?);
    }
    Ok(HeuristicStats {
        h_f,
        t_f,
        seeds: h.seed_space(),
        domain: o.domain_size(),
    })
}

/// One problem instance with its heuristic and its weight in the family.
#[derive(Debug, Clone)]
pub struct Instance {
    pub oracle: Oracle,
    pub heuristic: Heuristic,
    pub weight: f64,
    /// Good seeds, known by construction.
    pub h_f: usize,
}

/// `Σ_f P_f √(|R|/h_f)`, the expected-cost scale of heuristic search over a
/// weighted family.
pub fn family_bound(family: &[Instance]) -> f64 {
    let total: f64 = family.iter().map(|i| i.weight).sum();
    family
        .iter()
        .map(|i| i.weight / total * (i.heuristic.seed_space() as f64 / i.h_f as f64).sqrt())
        .sum()
}

/// An instance on `{0..n−1}` with `t` planted solutions and a table
/// heuristic over `seeds` seeds of which exactly `h` land on solutions.
pub fn planted_instance(
    n: usize,
    t: usize,
    seeds: usize,
    h: usize,
    rng: &mut Rng,
) -> Result<Instance> {
    if h > seeds || (h > 0 && t == 0) || (h < seeds && t == n) {
        return Err(Error::invalid(format!(
            "cannot plant h = {h} good seeds of {seeds} with t = {t}, N = {n}"
        )));
    }
    let oracle = Oracle::planted(n, t, rng)?;
    let table = oracle.truth_table();
    let good: Vec<usize> = (0..n).filter(|&x| table[x]).collect();
    let bad: Vec<usize> = (0..n).filter(|&x| !table[x]).collect();
    let good_seeds = rng.sample_distinct(seeds, h);
    let mut guesses = Vec::with_capacity(seeds);
    let mut next = good_seeds.iter().peekable();
    for r in 0..seeds {
        if next.peek() == Some(&&r) {
            next.next();
            guesses.push(good[rng.below(good.len())]);
        } else {
            guesses.push(bad[rng.below(bad.len())]);
        }
    }
    Ok(Instance {
        oracle,
        heuristic: Heuristic::from_table(guesses)?,
        weight: 1.0,
        h_f: h,
    })
}

/// Equal-weight family of `count` planted instances whose good-seed counts
/// follow a geometric law: `h = |R|/2^k` with `P(k) ∝ 2^{−k}`, `k ≤ log₂|R|`.
pub fn planted_family(
    n: usize,
    t: usize,
    seeds: usize,
    count: usize,
    rng: &mut Rng,
) -> Result<Vec<Instance>> {
    if !seeds.is_power_of_two() {
        return Err(Error::invalid(format!(
            "seed space must be a power of two, got {seeds}"
        )));
    }
    let max_k = seeds.trailing_zeros();
    (0..count)
        .map(|_| {
            let mut k = 0;
            while k < max_k && rng.uniform() < 0.5 {
                k += 1;
            }
            planted_instance(n, t, seeds, seeds >> k, rng)
        })
        .collect()
}

/// Families the CLI can build by name.
pub const FAMILIES: &[&str] = &["planted", "identity"];

/// Build a named family.
///
/// - `planted`: [`planted_family`] on `n` inputs with `t` solutions and `n`
///   seeds.
/// - `identity`: `G(r) = r` on a planted `f` with `t` solutions, `R = X`.
pub fn family(
    name: &str,
    n: usize,
    t: usize,
    count: usize,
    rng: &mut Rng,
) -> Result<Vec<Instance>> {
    match name {
        "planted" => planted_family(n, t, n, count, rng),
        "identity" => (0..count)
            .map(|_| {
                let oracle = Oracle::planted(n, t, rng)?;
                Ok(Instance {
                    oracle,
                    heuristic: Heuristic::identity(n)?,
                    weight: 1.0,
                    h_f: t,
                })
            })
            .collect(),
        other => Err(Error::invalid(format!(
            "unknown heuristic family `{other}` (known: {})",
            FAMILIES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_count;

    #[test]
    fn identity_lift_is_f() {
        let o = Oracle::planted(32, 5, &mut Rng::new(1)).unwrap();
        let lifted = lift(&Heuristic::identity(32).unwrap(), &o).unwrap();
        assert_eq!(lifted.truth_table(), o.truth_table());
        assert!(lifted.shares_counter_with(&o));
    }

    #[test]
    fn constant_good_lift_is_all_good() {
        let o = Oracle::singleton(16, 9).unwrap();
        let lifted = lift(&Heuristic::constant(8, 9).unwrap(), &o).unwrap();
        assert_eq!(lifted.good_count(), 8);
    }

    #[test]
    fn lift_rejects_out_of_range_guess() {
        let o = Oracle::singleton(4, 0).unwrap();
        let err = lift(&Heuristic::constant(4, 4).unwrap(), &o).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 4, size: 4 }));
    }

    #[test]
    fn lift_bills_one_query_per_evaluation() {
        let o = Oracle::planted(16, 3, &mut Rng::new(2)).unwrap();
        let lifted = lift(&Heuristic::identity(16).unwrap(), &o).unwrap();
        for r in 0..7 {
            lifted.evaluate(r).unwrap();
        }
        assert_eq!(o.queries(), 7);
    }

    #[test]
    fn planted_instance_has_requested_good_seeds() {
        let inst = planted_instance(64, 8, 64, 16, &mut Rng::new(3)).unwrap();
        let lifted = lift(&inst.heuristic, &inst.oracle).unwrap();
        assert_eq!(brute_count(&lifted).unwrap().t, 16);
        let s = stats(&inst.heuristic, &inst.oracle).unwrap();
        assert_eq!((s.h_f, s.t_f), (16, 8));
        assert!(s.efficient());
        // the exhaustive count over seeds is billed, the stats probe is not
        assert_eq!(inst.oracle.queries(), 64);
    }

    #[test]
    fn stats_edge_cases() {
        let o = Oracle::planted(16, 4, &mut Rng::new(4)).unwrap();
        let s = stats(&Heuristic::identity(16).unwrap(), &o).unwrap();
        assert_eq!(s.h_f, s.t_f);
        let bad = o.truth_table().iter().position(|&g| !g).unwrap();
        let s = stats(&Heuristic::constant(16, bad).unwrap(), &o).unwrap();
        assert_eq!(s.h_f, 0);
    }

    #[test]
    fn search_returns_a_solution_and_distinct_seeds_map_injectively() {
        let inst = planted_instance(64, 4, 64, 8, &mut Rng::new(5)).unwrap();
        for s in 0..50 {
            let out = heuristic_search(
                &inst.heuristic,
                &inst.oracle,
                &QSearchConfig::default(),
                &mut Rng::new(s),
                Engine::Analytic,
            )
            .unwrap();
            assert!(inst.oracle.truth_table()[out.x]);
            assert_eq!(inst.heuristic.guess(out.seed), out.x);
        }
    }

    #[test]
    fn all_good_seeds_need_two_queries() {
        let o = Oracle::singleton(8, 3).unwrap();
        let h = Heuristic::constant(8, 3).unwrap();
        let out = heuristic_search(
            &h,
            &o,
            &QSearchConfig::default(),
            &mut Rng::new(0),
            Engine::Analytic,
        )
        .unwrap();
        // one classical sample, one check of the returned x
        assert_eq!(out.queries, 2);
    }

    #[test]
    fn embedded_search_is_query_equivalent() {
        let inst = planted_instance(32, 3, 32, 4, &mut Rng::new(6)).unwrap();
        for s in 0..40 {
            let a = heuristic_search(
                &inst.heuristic,
                &inst.oracle.detached(),
                &QSearchConfig::default(),
                &mut Rng::new(s),
                Engine::Analytic,
            )
            .unwrap();
            let b = heuristic_search_embedded(
                &inst.heuristic,
                &inst.oracle.detached(),
                &QSearchConfig::default(),
                &mut Rng::new(s),
                Engine::Analytic,
            )
            .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn empty_heuristic_exhausts_budget() {
        let o = Oracle::singleton(8, 0).unwrap();
        let h = Heuristic::constant(8, 5).unwrap();
        let err = heuristic_search(
            &h,
            &o,
            &QSearchConfig::with_cap(500),
            &mut Rng::new(0),
            Engine::Analytic,
        );
        assert!(matches!(err, Err(Error::BudgetExhausted { .. })));
    }

    #[test]
    fn family_registry() {
        let fam = family("planted", 64, 8, 20, &mut Rng::new(7)).unwrap();
        assert_eq!(fam.len(), 20);
        for inst in &fam {
            assert!(inst.h_f >= 1 && inst.h_f <= 64 && inst.h_f.is_power_of_two());
            assert_eq!(stats(&inst.heuristic, &inst.oracle).unwrap().h_f, inst.h_f);
        }
        assert!(family_bound(&fam) >= 1.0);
        assert!(family("nope", 8, 1, 1, &mut Rng::new(0)).is_err());
        let id = family("identity", 16, 2, 3, &mut Rng::new(0)).unwrap();
        assert!((family_bound(&id) - 8f64.sqrt()).abs() < 1e-12);
    }
}
