//! Violation-rate statistics.

use serde::{Deserialize, Serialize};

/// Standard normal 0.99 quantile.
pub const WILSON_Z_99: f64 = 2.3263478740408408;

/// One-sided Wilson score upper bound for a binomial proportion.
pub fn wilson_upper(successes: usize, trials: usize, z: f64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre + spread) / (1.0 + z2 / n)).clamp(p, 1.0)
}

/// Violation counts with their rate and 99% one-sided Wilson upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub trials: usize,
    pub violations: usize,
    pub rate: f64,
    pub wilson_upper_99: f64,
}

impl RateSummary {
    pub fn new(violations: usize, trials: usize) -> Self {
        Self {
            trials,
            violations,
            rate: if trials == 0 {
                0.0
            } else {
                violations as f64 / trials as f64
            },
            wilson_upper_99: wilson_upper(violations, trials, WILSON_Z_99),
        }
    }

    pub fn from_flags(flags: impl IntoIterator<Item = bool>) -> Self {
        let (mut v, mut t) = (0, 0);
        for f in flags {
            t += 1;
            v += usize::from(f);
        }
        Self::new(v, t)
    }

    /// Whether the upper bound stays at or below `delta`.
    pub fn within(&self, delta: f64) -> bool {
        self.wilson_upper_99 <= delta
    }
}

/// Median of the values (mean of the middle pair for even lengths); NaN when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
