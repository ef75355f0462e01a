//! Cramér rate function of `Y = -ln p(X)` for an i.i.d. source.
//!
//! `Λ(λ) = ln Σ p_i^{1-λ}` and `I(a) = sup_λ [λa - Λ(λ)]`, in nats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bracket for the maximizing `λ`.
pub const LAMBDA_BRACKET: f64 = 50.0;
/// Bisection stops when the bracket is narrower than this.
pub const LAMBDA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CramerRate {
    /// The level `a`, in nats.
    pub level: f64,
    /// `I(a)`, infinite outside `[min y, max y]`.
    pub rate: f64,
    pub argmax_lambda: f64,
}

struct Tilt<'a> {
    ln_p: &'a [f64],
}

impl Tilt<'_> {
    /// `(Λ(λ), Λ'(λ))` by log-sum-exp.
    fn eval(&self, lambda: f64) -> (f64, f64) {
        let exps: Vec<f64> = self.ln_p.iter().map(|&l| (1.0 - lambda) * l).collect();
        let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = exps.iter().map(|&e| (e - top).exp()).collect();
        let z: f64 = weights.iter().sum();
        let mean = weights.iter().zip(self.ln_p).map(|(w, l)| w * -l).sum::<f64>() / z;
        (top + z.ln(), mean)
    }
}

/// `Λ(λ) = ln Σ p_i^{1-λ}`.
pub fn log_mgf(pmf: &[f64], lambda: f64) -> f64 {
    let ln_p: Vec<f64> = pmf.iter().map(|p| p.ln()).collect();
    Tilt { ln_p: &ln_p }.eval(lambda).0
}

/// `I(a)` for the i.i.d. source with the given pmf.
pub fn cramer_rate_iid(pmf: &[f64], level: f64) -> Result<CramerRate> {
    if pmf.is_empty() || pmf.iter().any(|&p| !(p > 0.0) || p > 1.0) {
        return Err(Error::InvalidModel("pmf entries must lie in (0, 1]".into()));
    }
    let ln_p: Vec<f64> = pmf.iter().map(|p| p.ln()).collect();
    let y_min = ln_p.iter().map(|l| -l).fold(f64::INFINITY, f64::min);
    let y_max = ln_p.iter().map(|l| -l).fold(f64::NEG_INFINITY, f64::max);
    if y_max - y_min <= 1e-12 * y_max.abs().max(1.0) {
        return Err(Error::DegenerateRate { constant_level: y_min });
    }
    if level < y_min || level > y_max {
        let lambda = if level > y_max { f64::INFINITY } else { f64::NEG_INFINITY };
        return Ok(CramerRate { level, rate: f64::INFINITY, argmax_lambda: lambda });
    }
    let tilt = Tilt { ln_p: &ln_p };
    let (mut lo, mut hi) = (-LAMBDA_BRACKET, LAMBDA_BRACKET);
    let lambda = if level <= tilt.eval(lo).1 {
        lo
    } else if level >= tilt.eval(hi).1 {
        hi
    } else {
        while hi - lo > LAMBDA_TOL {
            let mid = 0.5 * (lo + hi);
            if tilt.eval(mid).1 < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let rate = (lambda * level - tilt.eval(lambda).0).max(0.0);
    Ok(CramerRate { level, rate, argmax_lambda: lambda })
}

/// Rates of the two AEP deviation events at `δ` bits, converted to the
/// nat levels `H ± δ ln 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AepRates {
    pub above: CramerRate,
    pub below: CramerRate,
}

impl AepRates {
    /// Decay rate of the two-sided event.
    pub fn min_rate(&self) -> f64 {
        self.above.rate.min(self.below.rate)
    }
}

pub fn aep_rates_iid(pmf: &[f64], delta_bits: f64) -> Result<AepRates> {
    let h_nats: f64 = pmf.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    let shift = delta_bits * std::f64::consts::LN_2;
    Ok(AepRates { above: cramer_rate_iid(pmf, h_nats + shift)?, below: cramer_rate_iid(pmf, h_nats - shift)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kl_binary(p: [f64; 2], a: f64) -> f64 {
        let y = [-p[0].ln(), -p[1].ln()];
        let q1 = (a - y[0]) / (y[1] - y[0]);
        let q = [1.0 - q1, q1];
        q.iter().zip(p).filter(|(q, _)| **q > 0.0).map(|(q, p)| q * (q / p).ln()).sum()
    }

    #[test]
    fn binary_rate_is_tilted_divergence() {
        let p: [f64; 2] = [0.7, 0.3];
        let y = [-p[0].ln(), -p[1].ln()];
        for frac in [0.05, 0.2, 0.5, 0.8, 0.95] {
            let a = y[0] + frac * (y[1] - y[0]);
            let r = cramer_rate_iid(&p, a).unwrap();
            assert!((r.rate - kl_binary(p, a)).abs() < 1e-8, "a={a}: {} vs {}", r.rate, kl_binary(p, a));
        }
    }

    #[test]
    fn zero_at_the_mean_and_infinite_outside() {
        let p: [f64; 3] = [0.5, 0.25, 0.25];
        let h: f64 = p.iter().map(|p| -p * p.ln()).sum();
        let r = cramer_rate_iid(&p, h).unwrap();
        assert!(r.rate.abs() < 1e-9 && r.argmax_lambda.abs() < 1e-6);
        assert_eq!(cramer_rate_iid(&p, 2.0).unwrap().rate, f64::INFINITY);
        assert_eq!(cramer_rate_iid(&p, 0.5).unwrap().rate, f64::INFINITY);
    }

    #[test]
    fn uniform_is_degenerate() {
        assert!(matches!(
            cramer_rate_iid(&[0.25; 4], 1.0),
            Err(Error::DegenerateRate { constant_level }) if (constant_level - 4f64.ln()).abs() < 1e-12
        ));
    }

    #[test]
    fn log_mgf_endpoints() {
        let p = [0.7, 0.3];
        assert!(log_mgf(&p, 0.0).abs() < 1e-15);
        assert!((log_mgf(&p, 1.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn aep_rates_for_bernoulli() {
        let r = aep_rates_iid(&[0.7, 0.3], 0.2).unwrap();
        assert!((r.above.rate - 0.058_997).abs() < 1e-5, "{}", r.above.rate);
        assert!((r.below.rate - 0.073_89).abs() < 1e-4, "{}", r.below.rate);
        assert!((r.above.argmax_lambda - 0.828).abs() < 1e-3);
        assert_eq!(r.min_rate(), r.above.rate);
    }
}
