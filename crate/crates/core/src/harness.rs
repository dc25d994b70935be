//! Small statistics helpers for seeded trial runs.

use crate::sim::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

/// Mean, median and range; `None` for an empty sample.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Some(Summary {
        count: n,
        mean: sorted.iter().sum::<f64>() / n as f64,
        median,
        min: sorted[0],
        max: sorted[n - 1],
    })
}

pub fn mean(values: &[f64]) -> f64 {
    summarize(values).map_or(f64::NAN, |s| s.mean)
}

/// Fraction of `true` values; `NaN` for an empty sample.
pub fn frequency(flags: impl IntoIterator<Item = bool>) -> f64 {
    let (mut hits, mut n) = (0usize, 0usize);
    for f in flags {
        hits += usize::from(f);
        n += 1;
    }
    if n == 0 {
        f64::NAN
    } else {
        hits as f64 / n as f64
    }
}

/// Run `trials` independent trials; trial `i` gets `Rng::for_trial(seed, i)`.
pub fn run_trials<T>(seed: u64, trials: u64, mut f: impl FnMut(u64, &mut Rng) -> T) -> Vec<T> {
    (0..trials)
        .map(|i| f(i, &mut Rng::for_trial(seed, i)))
        .collect()
}

/// Total-variation distance `½ Σ |p − q|` between two laws on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "laws on different supports");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_small_samples() {
        let s = summarize(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.median, s.min, s.max), (2.0, 2.0, 1.0, 3.0));
        assert_eq!(summarize(&[1.0, 4.0]).unwrap().median, 2.5);
        assert!(summarize(&[]).is_none());
        assert!(mean(&[]).is_nan());
    }

    #[test]
    fn frequency_counts() {
        assert_eq!(frequency([true, false, true, true]), 0.75);
        assert!(frequency(std::iter::empty()).is_nan());
    }

    #[test]
    fn trials_are_reproducible() {
        let a = run_trials(5, 4, |_, r| r.uniform());
        let b = run_trials(5, 4, |_, r| r.uniform());
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn tv_distance() {
        assert_eq!(total_variation(&[0.5, 0.5], &[1.0, 0.0]), 0.5);
        assert_eq!(total_variation(&[0.2, 0.8], &[0.2, 0.8]), 0.0);
    }
}
