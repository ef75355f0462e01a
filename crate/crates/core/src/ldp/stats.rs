//! Interval estimates and goodness-of-fit distances.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let hi = if hits == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    (lo, hi)
}

/// Kolmogorov–Smirnov distance between the empirical law of a sample and
/// the unit-rate exponential, over `[0, u_max]`.
///
/// `sorted` holds the observed values (ascending, all `<= u_max`); `total`
/// also counts the censored observations known only to exceed `u_max`, so
/// the empirical CDF is `#{U_i <= u} / total`.
pub fn ks_distance_exponential(sorted: &[f64], total: usize, u_max: f64) -> f64 {
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let cdf = |u: f64| -(-u).exp_m1();
    let n = total as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let u = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == u {
            j += 1;
        }
        let f = cdf(u);
        d = d.max((i as f64 / n - f).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    d.max((sorted.len() as f64 / n - cdf(u_max)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        // 10/100: center (0.1 + 0.0192)/1.0384
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!((lo - 0.05523).abs() < 1e-4, "{lo}");
        assert!((hi - 0.17437).abs() < 1e-4, "{hi}");
        let (lo, hi) = wilson_interval(0, 1000, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.004);
        assert_eq!(wilson_interval(5, 5, Z95).1, 1.0);
    }

    #[test]
    fn ks_on_quantiles_is_small() {
        let n = 1000;
        let sample: Vec<f64> = (0..n).map(|i| -(1.0 - (i as f64 + 0.5) / n as f64).ln()).collect();
        let d = ks_distance_exponential(&sample, n, f64::INFINITY);
        assert!((d - 0.0005).abs() < 1e-9, "{d}");
    }

    #[test]
    fn ks_sees_a_gap_below_the_first_atom() {
        // all mass at 1.0: sup is max(F(1), 1 - F(1))
        let d = ks_distance_exponential(&[1.0; 10], 10, 20.0);
        let f1 = 1.0 - (-1.0f64).exp();
        assert!((d - f1.max(1.0 - f1)).abs() < 1e-12);
    }

    #[test]
    fn ks_counts_censored_mass() {
        // nothing observed below u_max = 1: distance F(1)
        let d = ks_distance_exponential(&[], 10, 1.0);
        assert!((d - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }
}
