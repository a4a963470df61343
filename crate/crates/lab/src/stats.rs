//! Binomial proportion estimates.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`, clamped to `[0, 1]`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let mid = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // keep the point estimate inside despite rounding at the ends
    ((mid - half).clamp(0.0, 1.0).min(p), (mid + half).clamp(0.0, 1.0).max(p))
}

/// Fixed six-digit rendering used in every CSV column that is not exact.
pub fn dec6(x: f64) -> String {
    format!("{x:.6}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        let (lo, hi) = wilson(0, 10, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_532).abs() < 1e-5);
        let (lo, hi) = wilson(5, 10, Z95);
        assert!((lo - 0.236_593).abs() < 1e-5 && (hi - 0.763_407).abs() < 1e-5);
        let (lo, hi) = wilson(10, 10, Z95);
        assert!((lo - 0.722_467).abs() < 1e-5 && hi == 1.0);
    }

    #[test]
    fn width_shrinks_like_inverse_root() {
        let w = |t: u64| {
            let (lo, hi) = wilson(t / 2, t, Z95);
            hi - lo
        };
        let ratio = w(100) / w(10_000);
        assert!((ratio - 10.0).abs() < 0.2, "{ratio}");
    }

    proptest! {
        #[test]
        fn interval_contains_estimate(t in 1u64..5000, s in 0u64..5000) {
            let s = s % (t + 1);
            let (lo, hi) = wilson(s, t, Z95);
            let p = s as f64 / t as f64;
            prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
    }
}
