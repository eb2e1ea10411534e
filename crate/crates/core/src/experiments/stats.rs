//! Small statistics helpers shared by the experiments.

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959964;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Median of a sample (mean of the two middle values for even sizes).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    })
}

/// Empirical quantile by linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

/// Streaming mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    /// Approximate standard error of the variance estimate, assuming
    /// near-normal data: `s²·√(2/(n−1))`.
    pub fn variance_std_error(&self) -> f64 {
        self.variance() * (2.0 / (self.count.saturating_sub(1)) as f64).sqrt()
    }
}

impl FromIterator<f64> for RunningMoments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Self::new();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// Fraction of trials not yet hit after each distinct hitting time, starting
/// with `(0, 1.0)`. Censored trials never leave the curve.
pub fn survival_curve(hit_evals: &[u64], trials: u64) -> Vec<(u64, f64)> {
    let mut sorted = hit_evals.to_vec();
    sorted.sort_unstable();
    let mut curve = vec![(0, 1.0)];
    let n = trials as f64;
    let mut k = 0;
    while k < sorted.len() {
        let e = sorted[k];
        while k < sorted.len() && sorted[k] == e {
            k += 1;
        }
        curve.push((e, (trials - k as u64) as f64 / n));
    }
    curve
}

/// Standard deviation of a binomial frequency estimate.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z);
        assert!(lo < 0.5 && 0.5 < hi);
        assert_relative_eq!(lo, 0.403831, epsilon = 1e-5);
        assert_relative_eq!(hi, 0.596169, epsilon = 1e-5);
        let (lo, hi) = wilson_interval(0, 100, WILSON_Z);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100, WILSON_Z);
        assert!(lo > 0.95 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn median_and_quantile() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), Some(2.0));
        assert_eq!(quantile(&[1.0, 2.0], 0.5), Some(1.5));
    }

    #[test]
    fn moments_match_two_pass() {
        let data: Vec<f64> = (0..1000)
            .map(|i| ((i * 37) % 101) as f64 * 0.1 + 1e6)
            .collect();
        let m: RunningMoments = data.iter().copied().collect();
        let mean = data.iter().sum::<f64>() / data.len() as f64;
        let var =
            data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (data.len() - 1) as f64;
        assert_relative_eq!(m.mean(), mean, max_relative = 1e-14);
        assert_relative_eq!(m.variance(), var, max_relative = 1e-9);
    }

    #[test]
    fn survival_examples() {
        let c = survival_curve(&[5, 3, 3, 9], 5);
        assert_eq!(c, vec![(0, 1.0), (3, 0.6), (5, 0.4), (9, 0.2)]);
        assert_eq!(survival_curve(&[], 3), vec![(0, 1.0)]);
    }

    proptest::proptest! {
        #[test]
        fn merge_equals_sequential(data in proptest::collection::vec(-1e3f64..1e3, 2..200), split in 0usize..200) {
            let split = split.min(data.len());
            let whole: RunningMoments = data.iter().copied().collect();
            let mut a: RunningMoments = data[..split].iter().copied().collect();
            let b: RunningMoments = data[split..].iter().copied().collect();
            a.merge(&b);
            proptest::prop_assert_eq!(a.count(), whole.count());
            proptest::prop_assert!((a.mean() - whole.mean()).abs() <= 1e-9 * (1.0 + whole.mean().abs()));
            proptest::prop_assert!((a.variance() - whole.variance()).abs() <= 1e-7 * (1.0 + whole.variance()));
        }

        #[test]
        fn wilson_contains_estimate(s in 0u64..500, extra in 0u64..500) {
            let n = s + extra;
            proptest::prop_assume!(n > 0);
            let (lo, hi) = wilson_interval(s, n, WILSON_Z);
            let p = s as f64 / n as f64;
            proptest::prop_assert!(lo <= p + 1e-15 && p <= hi + 1e-15);
        }

        #[test]
        fn survival_is_non_increasing(hits in proptest::collection::vec(1u64..1000, 0..50), extra in 0u64..20) {
            let trials = hits.len() as u64 + extra;
            proptest::prop_assume!(trials > 0);
            let c = survival_curve(&hits, trials);
            for w in c.windows(2) {
                proptest::prop_assert!(w[1].0 > w[0].0 && w[1].1 <= w[0].1);
            }
        }
    }
}
