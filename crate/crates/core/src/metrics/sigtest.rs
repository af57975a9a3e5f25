use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricsError;

pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Per-sentence statistics that sum to corpus statistics.
pub trait Additive: Clone + Default + Send + Sync {
    fn add_assign(&mut self, other: &Self);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigTestResult {
    pub metric_a: f64,
    pub metric_b: f64,
    /// `metric_a - metric_b` on the unshuffled systems.
    pub observed_diff: f64,
    pub p_value: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SigTestResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

fn sum<S: Additive>(items: impl Iterator<Item = S>) -> S {
    items.fold(S::default(), |mut acc, s| {
        acc.add_assign(&s);
        acc
    })
}

/// Paired approximate randomization. In each trial every sentence's
/// statistics are swapped between the two systems with probability 1/2 and
/// `metric` is recomputed on the summed statistics.
/// `p = (#{|diff| >= |observed|} + 1) / (trials + 1)`.
///
/// Trial `i` draws from its own ChaCha stream, so the result does not depend
/// on how trials are scheduled across threads.
pub fn paired_approx_randomization<S, F>(
    a: &[S],
    b: &[S],
    metric: F,
    trials: usize,
    seed: u64,
) -> Result<SigTestResult, MetricsError>
where
    S: Additive,
    F: Fn(&S) -> f64 + Sync,
{
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            what: "significance test",
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    if trials == 0 {
        return Err(MetricsError::NoTrials);
    }
    let metric_a = metric(&sum(a.iter().cloned()));
    let metric_b = metric(&sum(b.iter().cloned()));
    let observed = (metric_a - metric_b).abs();
    let at_least = (0..trials)
        .into_par_iter()
        .filter(|&trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut sa = S::default();
            let mut sb = S::default();
            for (x, y) in a.iter().zip(b) {
                if rng.gen::<bool>() {
                    sa.add_assign(y);
                    sb.add_assign(x);
                } else {
                    sa.add_assign(x);
                    sb.add_assign(y);
                }
            }
            (metric(&sa) - metric(&sb)).abs() >= observed
        })
        .count();
    Ok(SigTestResult {
        metric_a,
        metric_b,
        observed_diff: metric_a - metric_b,
        p_value: (at_least + 1) as f64 / (trials + 1) as f64,
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::EditStats;

    #[test]
    fn identical_systems_tie_every_trial() {
        let a = vec![
            EditStats { errors: 1, ref_len: 4 },
            EditStats { errors: 0, ref_len: 3 },
        ];
        let r = paired_approx_randomization(&a, &a, EditStats::rate, 500, 3).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.observed_diff, 0.0);
    }

    #[test]
    fn errors() {
        let a = vec![EditStats::default()];
        assert!(paired_approx_randomization(&a, &[], EditStats::rate, 10, 0).is_err());
        assert!(paired_approx_randomization(&a, &a, EditStats::rate, 0, 0).is_err());
    }

    #[test]
    fn p_value_bounds() {
        let a: Vec<_> = (0..20).map(|i| EditStats { errors: i % 3, ref_len: 5 }).collect();
        let b: Vec<_> = (0..20).map(|_| EditStats { errors: 4, ref_len: 5 }).collect();
        let r = paired_approx_randomization(&a, &b, EditStats::rate, 200, 9).unwrap();
        assert!(r.p_value >= 1.0 / 201.0 && r.p_value <= 1.0);
        assert!(r.significant(DEFAULT_ALPHA));
    }
}
