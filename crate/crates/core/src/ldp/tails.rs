//! Monte Carlo tail probabilities for recurrence times, match lengths and
//! the empirical log-likelihood.
//!
//! Every trial draws from its own generator `rng_for(master_seed, trial)`
//! and hit counts are summed as integers, so results do not depend on the
//! thread count.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{wilson_interval, Z95};
use crate::error::{Error, Result};
use crate::recurrence::{first_return_streaming, match_length_within, Boundary, MatchLength};
use crate::rng::{rng_for, SimRng};
use crate::sources::{sample_block_with_past, SourceModel};

/// Largest threshold `t` a tail trial may scan up to.
pub const THRESHOLD_GUARD: f64 = (1u64 << 30) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSide {
    /// `R_n > 2^{n(H+ε)}`
    Upper,
    /// `R_n < 2^{n(H-ε)}`
    Lower,
    /// `|-log2 P(X_1^n)/n - H| > ε`
    Aep,
    /// `L_m < log2(m)/(H+ε)`
    MatchUpper,
    /// `L_m > log2(m)/(H-ε)`
    MatchLower,
}

impl TailSide {
    pub fn as_str(self) -> &'static str {
        match self {
            TailSide::Upper => "upper",
            TailSide::Lower => "lower",
            TailSide::Aep => "aep",
            TailSide::MatchUpper => "match_upper",
            TailSide::MatchLower => "match_lower",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Upper, Self::Lower, Self::Aep, Self::MatchUpper, Self::MatchLower]
            .into_iter()
            .find(|side| side.as_str() == s)
    }
}

impl std::fmt::Display for TailSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One estimated tail probability with its Wilson 95% interval.
///
/// For the match sides `n` holds `m` and `threshold_t` the length threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub n: usize,
    pub epsilon: f64,
    pub side: TailSide,
    pub trials: u64,
    pub hit_count: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub threshold_t: f64,
    pub master_seed: u64,
}

impl TailEstimate {
    fn from_hits(n: usize, epsilon: f64, side: TailSide, trials: u64, hits: u64, t: f64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, trials, Z95);
        let p_hat = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        Self {
            n,
            epsilon,
            side,
            trials,
            hit_count: hits,
            p_hat,
            ci_low,
            ci_high,
            threshold_t: t,
            master_seed: seed,
        }
    }
}

/// Number of trials in `0..trials` for which `hit` returns true.
pub fn count_hits<F>(trials: u64, master_seed: u64, hit: F) -> u64
where
    F: Fn(&mut SimRng) -> bool + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| hit(&mut rng_for(master_seed, i)) as u64)
        .sum()
}

fn check_common(n: usize, epsilon: f64, trials: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be finite")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

fn check_threshold(t: f64) -> Result<()> {
    if t > THRESHOLD_GUARD {
        return Err(Error::ThresholdTooLarge { threshold: t, guard: THRESHOLD_GUARD });
    }
    Ok(())
}

/// One upper-tail trial: is there no return within `limit`?
pub fn upper_trial<R: RngCore + ?Sized>(model: &SourceModel, n: usize, limit: usize, rng: &mut R) -> bool {
    let (block, mut past) = sample_block_with_past(model, n, rng);
    first_return_streaming(&block, model.alphabet(), limit, || past.next_symbol(rng)).is_none()
}

/// One lower-tail trial: is there a return within `limit`?
pub fn lower_trial<R: RngCore + ?Sized>(model: &SourceModel, n: usize, limit: usize, rng: &mut R) -> bool {
    let (block, mut past) = sample_block_with_past(model, n, rng);
    first_return_streaming(&block, model.alphabet(), limit, || past.next_symbol(rng)).is_some()
}

/// `P(R_n > 2^{n(H+ε)})`.
pub fn mc_tail_upper(model: &SourceModel, n: usize, epsilon: f64, trials: u64, seed: u64) -> Result<TailEstimate> {
    mc_tail_upper_with(model, n, epsilon, trials, seed, Boundary::Strict)
}

pub fn mc_tail_upper_with(
    model: &SourceModel,
    n: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
    boundary: Boundary,
) -> Result<TailEstimate> {
    check_common(n, epsilon, trials)?;
    let h = model.entropy_rate().bits();
    let t = (n as f64 * (h + epsilon)).exp2();
    check_threshold(t)?;
    let limit = boundary.upper_limit(t);
    let hits = count_hits(trials, seed, |rng| upper_trial(model, n, limit, rng));
    Ok(TailEstimate::from_hits(n, epsilon, TailSide::Upper, trials, hits, t, seed))
}

/// `P(R_n < 2^{n(H-ε)})`; requires `ε <= H`.
pub fn mc_tail_lower(model: &SourceModel, n: usize, epsilon: f64, trials: u64, seed: u64) -> Result<TailEstimate> {
    mc_tail_lower_with(model, n, epsilon, trials, seed, Boundary::Strict)
}

pub fn mc_tail_lower_with(
    model: &SourceModel,
    n: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
    boundary: Boundary,
) -> Result<TailEstimate> {
    check_common(n, epsilon, trials)?;
    let h = model.entropy_rate().bits();
    if epsilon > h {
        return Err(Error::EpsilonExceedsEntropy { epsilon, entropy: h });
    }
    let t = (n as f64 * (h - epsilon)).exp2();
    check_threshold(t)?;
    let limit = boundary.lower_limit(t);
    let hits = count_hits(trials, seed, |rng| lower_trial(model, n, limit, rng));
    Ok(TailEstimate::from_hits(n, epsilon, TailSide::Lower, trials, hits, t, seed))
}

/// `P(|-log2 P(X_1^n)/n - H| > ε)` by simulation.
pub fn mc_tail_aep(model: &SourceModel, n: usize, epsilon: f64, trials: u64, seed: u64) -> Result<TailEstimate> {
    check_common(n, epsilon, trials)?;
    let h = model.entropy_rate().bits();
    let hits = count_hits(trials, seed, |rng| {
        let (block, _) = sample_block_with_past(model, n, rng);
        let log2 = model.block_probability(&block).expect("sampled block has positive probability").log2;
        (-log2 / n as f64 - h).abs() > epsilon
    });
    Ok(TailEstimate::from_hits(n, epsilon, TailSide::Aep, trials, hits, epsilon, seed))
}

/// Match-length tails at window `m`.
///
/// Each trial draws `x_1^F` and the past `x_{-m+1}^0`, with the horizon
/// `F = ⌈log2(m)/(H-ε)⌉ + 1` (or with `H+ε` when `ε >= H`), which is enough
/// to decide either event.
pub fn mc_tail_match(
    model: &SourceModel,
    m: usize,
    epsilon: f64,
    side: TailSide,
    trials: u64,
    seed: u64,
) -> Result<TailEstimate> {
    check_common(m, epsilon, trials)?;
    let h = model.entropy_rate().bits();
    let log_m = (m as f64).log2();
    let threshold = match side {
        TailSide::MatchUpper => {
            if h + epsilon <= 0.0 {
                return Err(Error::InvalidParameter(format!("H + epsilon = {} must be positive", h + epsilon)));
            }
            log_m / (h + epsilon)
        }
        TailSide::MatchLower => {
            if epsilon >= h {
                return Err(Error::EpsilonExceedsEntropy { epsilon, entropy: h });
            }
            log_m / (h - epsilon)
        }
        other => {
            return Err(Error::InvalidParameter(format!("side {other} is not a match-length side")));
        }
    };
    check_threshold(m as f64)?;
    let rate = if epsilon < h { h - epsilon } else { h + epsilon };
    let horizon = (log_m / rate).ceil() as usize + 1;
    check_threshold(horizon as f64)?;
    let hits = count_hits(trials, seed, |rng| {
        let (block, mut past) = sample_block_with_past(model, horizon, rng);
        let mut data = vec![0u8; m + horizon];
        for slot in data[..m].iter_mut().rev() {
            *slot = past.next_symbol(rng);
        }
        data[m..].copy_from_slice(&block);
        let len = match match_length_within(&data, m, m, horizon) {
            MatchLength::Exact(l) | MatchLength::FutureLimited(l) => l as f64,
        };
        match side {
            TailSide::MatchUpper => len < threshold,
            _ => len > threshold,
        }
    });
    Ok(TailEstimate::from_hits(m, epsilon, side, trials, hits, threshold, seed))
}
