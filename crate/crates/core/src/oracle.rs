//! Boolean black boxes with query accounting.
//!
//! An [`Oracle`] is a handle: cloning it shares both the predicate and the
//! query counter. Derived oracles ([`Oracle::negate`], lifted heuristics,
//! composite good-sets) share the counter of the oracle they wrap, so every
//! evaluation is billed to the underlying `f`. Independent trials take
//! [`Oracle::detached`] copies with their own counters.
//!
//! Simulated operators are billed by the operator, not by matrix entry: one
//! application of `Sχ` (one Grover iterate) costs one query. Building the
//! diagonal itself reads the truth table through an uncharged path, which is
//! the simulator looking at its own ground truth.

use std::fmt;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::sim::{phase, Rng, Unitary, C64};

type Predicate = dyn Fn(usize) -> bool + Send + Sync;

#[derive(Clone)]
pub struct Oracle {
    domain: usize,
    predicate: Arc<Predicate>,
    table: Arc<OnceLock<Arc<[bool]>>>,
    queries: Arc<AtomicU64>,
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("domain", &self.domain)
            .field("queries", &self.queries())
            .finish_non_exhaustive()
    }
}

/// Ground-truth size of the good set. Test-side only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoodSetSummary {
    pub t: usize,
    pub n: usize,
}

impl Oracle {
    /// Oracle over `{0, …, domain−1}` from an arbitrary pure predicate.
    pub fn from_fn(domain: usize, f: impl Fn(usize) -> bool + Send + Sync + 'static) -> Self {
        assert!(domain > 0, "oracle domain must be non-empty");
        Oracle {
            domain,
            predicate: Arc::new(f),
            table: Arc::new(OnceLock::new()),
            queries: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn from_table(table: Vec<bool>) -> Self {
        let table: Arc<[bool]> = table.into();
        let lookup = Arc::clone(&table);
        let o = Self::from_fn(table.len(), move |x| lookup[x]);
        o.table.set(table).expect("fresh cache");
        o
    }

    pub fn from_good_set(domain: usize, good: &[usize]) -> Result<Self> {
        let mut table = vec![false; domain];
        for &x in good {
            if x >= domain {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    size: domain,
                });
            }
            table[x] = true;
        }
        Ok(Self::from_table(table))
    }

    pub fn constant(domain: usize, value: bool) -> Self {
        Self::from_table(vec![value; domain])
    }

    pub fn singleton(domain: usize, x: usize) -> Result<Self> {
        Self::from_good_set(domain, &[x])
    }

    /// `t` good elements placed uniformly at random.
    pub fn planted(domain: usize, t: usize, rng: &mut Rng) -> Result<Self> {
        if t > domain {
            return Err(Error::invalid(format!(
                "cannot plant {t} good elements in a domain of {domain}"
            )));
        }
        Self::from_good_set(domain, &rng.sample_distinct(domain, t))
    }

    /// `t` good elements packed at the top of the domain.
    pub fn adversarial(domain: usize, t: usize) -> Result<Self> {
        if t > domain {
            return Err(Error::invalid(format!(
                "cannot plant {t} good elements in a domain of {domain}"
            )));
        }
        Self::from_good_set(domain, &(domain - t..domain).collect::<Vec<_>>())
    }

    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// One query: `f(x)`.
    pub fn evaluate(&self, x: usize) -> Result<bool> {
        if x >= self.domain {
            return Err(Error::IndexOutOfRange {
                index: x,
                size: self.domain,
            });
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.peek(x))
    }

    /// Bill `k` queries for a simulated operator that used `f` `k` times.
    pub fn charge(&self, k: u64) {
        self.queries.fetch_add(k, Ordering::Relaxed);
    }

    /// Same predicate, fresh counter starting at zero.
    pub fn detached(&self) -> Oracle {
        Oracle {
            domain: self.domain,
            predicate: Arc::clone(&self.predicate),
            table: Arc::clone(&self.table),
            queries: Arc::new(AtomicU64::new(0)),
        }
    }

    /// `¬f = 1 − f`, billed to the same counter.
    pub fn negate(&self) -> Oracle {
        let inner = self.clone();
        self.derive(self.domain, move |x| !inner.peek(x))
    }

    /// New predicate on `domain` that shares this oracle's counter.
    pub fn derive(
        &self,
        domain: usize,
        f: impl Fn(usize) -> bool + Send + Sync + 'static,
    ) -> Oracle {
        Oracle {
            domain,
            predicate: Arc::new(f),
            table: Arc::new(OnceLock::new()),
            queries: Arc::clone(&self.queries),
        }
    }

    /// Whether two handles bill the same counter.
    pub fn shares_counter_with(&self, other: &Oracle) -> bool {
        Arc::ptr_eq(&self.queries, &other.queries)
    }

    /// Full truth table, computed once without charging queries.
    pub fn truth_table(&self) -> Arc<[bool]> {
        Arc::clone(
            self.table
                .get_or_init(|| (0..self.domain).map(|x| (self.predicate)(x)).collect()),
        )
    }

    /// Uncharged evaluation, for the simulator's own bookkeeping.
    pub(crate) fn peek(&self, x: usize) -> bool {
        match self.table.get() {
            Some(t) => t[x],
            None => (self.predicate)(x),
        }
    }

    pub fn good_indices(&self) -> Vec<usize> {
        self.truth_table()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    /// Uncharged good count.
    pub fn good_count(&self) -> usize {
        self.truth_table().iter().filter(|&&b| b).count()
    }

    /// Truth-table text: first line `N`, second line `N` characters in `{0,1}`.
    pub fn to_truth_table_string(&self) -> String {
        let bits: String = self
            .truth_table()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        format!("{}\n{}\n", self.domain, bits)
    }

    pub fn parse_truth_table(text: &str) -> Result<Oracle> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::TruthTable("missing size line".into()))?
            .parse()
            .map_err(|e| Error::TruthTable(format!("bad size line: {e}")))?;
        if n == 0 {
            return Err(Error::TruthTable("domain size must be positive".into()));
        }
        let bits = lines
            .next()
            .ok_or_else(|| Error::TruthTable("missing table line".into()))?;
        if lines.next().is_some() {
            return Err(Error::TruthTable(
                "trailing content after table line".into(),
            ));
        }
        if bits.chars().count() != n {
            return Err(Error::TruthTable(format!(
                "expected {n} bits, found {}",
                bits.chars().count()
            )));
        }
        let table = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::TruthTable(format!("invalid character `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Oracle::from_table(table))
    }

    pub fn load_truth_table(path: impl AsRef<Path>) -> Result<Oracle> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::TruthTable(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse_truth_table(&text)
    }
}

/// Exhaustive count. Costs `N` queries.
pub fn brute_count(o: &Oracle) -> Result<GoodSetSummary> {
    let mut t = 0;
    for x in 0..o.domain_size() {
        t += usize::from(o.evaluate(x)?);
    }
    Ok(GoodSetSummary {
        t,
        n: o.domain_size(),
    })
}

/// `Sχ(φ')`: `|x⟩ ↦ e^{iφ'}|x⟩` when `χ(x) = 1`, identity otherwise.
///
/// Building the matrix is free; each application inside an iterate is billed
/// by the caller.
pub fn build_s_chi(o: &Oracle, phase_prime: f64) -> Result<Unitary> {
    let p = phase(phase_prime);
    let one = C64::new(1.0, 0.0);
    Unitary::diagonal(
        o.truth_table()
            .iter()
            .map(|&g| if g { p } else { one })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_zero_evaluates_to_zero() {
        let o = Oracle::constant(8, false);
        assert!((0..8).all(|x| !o.evaluate(x).unwrap()));
    }

    #[test]
    fn singleton_hits() {
        let o = Oracle::singleton(8, 3).unwrap();
        assert!(o.evaluate(3).unwrap());
        assert!(!o.evaluate(2).unwrap());
    }

    #[test]
    fn counter_counts_calls() {
        let o = Oracle::constant(4, true);
        for i in 0..7 {
            o.evaluate(i % 4).unwrap();
        }
        assert_eq!(o.queries(), 7);
    }

    #[test]
    fn out_of_range_is_an_error_and_free() {
        let o = Oracle::constant(4, true);
        assert_eq!(
            o.evaluate(4).unwrap_err(),
            Error::IndexOutOfRange { index: 4, size: 4 }
        );
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn negate_shares_counter() {
        let o = Oracle::constant(4, false);
        let n = o.negate();
        assert!(n.evaluate(0).unwrap());
        assert!(!o.evaluate(0).unwrap());
        assert_eq!(o.queries(), 2);
        assert_eq!(n.queries(), 2);
        assert!(n.shares_counter_with(&o));
    }

    #[test]
    fn double_negation_is_pointwise_identity() {
        let o = Oracle::planted(32, 9, &mut Rng::new(11)).unwrap();
        let nn = o.negate().negate();
        assert!((0..32).all(|x| nn.peek(x) == o.peek(x)));
    }

    #[test]
    fn negation_complements_count() {
        let mut rng = Rng::new(5);
        let o = Oracle::planted(16, 6, &mut rng).unwrap();
        let t = brute_count(&o).unwrap().t;
        let tn = brute_count(&o.negate()).unwrap().t;
        assert_eq!(t + tn, 16);
        assert_eq!(o.queries(), 32);
    }

    #[test]
    fn brute_count_examples() {
        assert_eq!(
            brute_count(&Oracle::constant(8, true)).unwrap(),
            GoodSetSummary { t: 8, n: 8 }
        );
        let s = Oracle::singleton(1024, 17).unwrap();
        assert_eq!(brute_count(&s).unwrap().t, 1);
        assert_eq!(s.queries(), 1024);
        let p = Oracle::planted(64, 23, &mut Rng::new(9)).unwrap();
        assert_eq!(brute_count(&p).unwrap().t, 23);
    }

    #[test]
    fn adversarial_packs_the_top() {
        let o = Oracle::adversarial(16, 3).unwrap();
        assert_eq!(o.good_indices(), vec![13, 14, 15]);
    }

    #[test]
    fn detached_has_its_own_counter() {
        let o = Oracle::constant(4, true);
        o.evaluate(0).unwrap();
        let d = o.detached();
        assert_eq!(d.queries(), 0);
        d.evaluate(1).unwrap();
        assert_eq!(o.queries(), 1);
    }

    #[test]
    fn s_chi_sign_flip() {
        let u = build_s_chi(&Oracle::singleton(2, 1).unwrap(), PI).unwrap();
        assert!((u.entry(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((u.entry(1, 1) - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn s_chi_zero_phase_is_identity() {
        let o = Oracle::planted(8, 3, &mut Rng::new(1)).unwrap();
        assert_eq!(build_s_chi(&o, 0.0).unwrap(), Unitary::identity(8));
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn s_chi_quarter_phase() {
        let u = build_s_chi(&Oracle::singleton(2, 0).unwrap(), PI / 2.0).unwrap();
        assert!((u.entry(0, 0) - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((u.entry(1, 1) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn s_chi_pi_squares_to_identity() {
        let o = Oracle::planted(16, 5, &mut Rng::new(2)).unwrap();
        let s = build_s_chi(&o, PI).unwrap();
        assert!(s.mul(&s).unwrap().max_abs_diff(&Unitary::identity(16)) < 1e-12);
    }

    #[test]
    fn truth_table_round_trip() {
        let o = Oracle::planted(20, 7, &mut Rng::new(4)).unwrap();
        let text = o.to_truth_table_string();
        let back = Oracle::parse_truth_table(&text).unwrap();
        assert_eq!(back.truth_table(), o.truth_table());
    }

    #[test]
    fn truth_table_validates() {
        assert!(Oracle::parse_truth_table("4\n010\n").is_err());
        assert!(Oracle::parse_truth_table("4\n01a0\n").is_err());
        assert!(Oracle::parse_truth_table("x\n0101\n").is_err());
        assert!(Oracle::parse_truth_table("0\n\n").is_err());
        assert!(Oracle::parse_truth_table("2\n01\n11\n").is_err());
        assert_eq!(
            Oracle::parse_truth_table("4\n0110\n")
                .unwrap()
                .good_indices(),
            vec![1, 2]
        );
    }
}
