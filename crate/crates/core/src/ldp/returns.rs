//! Return times of a fixed block: the exponential law of `P(x_1^n)·R_n`
//! and the Kac mean `E[R_n | x_1^n] = 1/P(x_1^n)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::ks_distance_exponential;
use super::tails::THRESHOLD_GUARD;
use crate::error::{Error, Result};
use crate::recurrence::first_return_streaming;
use crate::rng::rng_for;
use crate::sources::{PastSampler, SourceModel};

/// Default scan window, in units of `1/P(x_1^n)`.
pub const DEFAULT_U_MAX: f64 = 10.0;
/// Censored samples should stay below this fraction.
pub const MAX_CENSORED_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnConfig {
    pub samples: u64,
    pub master_seed: u64,
    pub u_max: f64,
}

impl ReturnConfig {
    pub fn new(samples: u64, master_seed: u64) -> Self {
        Self { samples, master_seed, u_max: DEFAULT_U_MAX }
    }
}

/// Conditional past given `x_1^n = block`, for every source kind.
fn past_for<'a, R: Rng + ?Sized>(model: &'a SourceModel, block: &[u8], rng: &mut R) -> Result<PastSampler<'a>> {
    match model {
        SourceModel::Iid(_) | SourceModel::Markov(_) => PastSampler::after_block(model, block),
        SourceModel::Constant { .. } => {
            model.block_probability(block)?;
            Ok(PastSampler::after_first_symbol(model, block[0], 0))
        }
        SourceModel::Periodic { pattern } => {
            let phases: Vec<usize> = (0..pattern.len())
                .filter(|&p| block.iter().enumerate().all(|(i, &s)| pattern[(p + i) % pattern.len()] == s))
                .collect();
            if phases.is_empty() {
                return Err(Error::ZeroProbability { position: 0 });
            }
            let phase = phases[rng.random_range(0..phases.len())];
            Ok(PastSampler::after_first_symbol(model, block[0], phase))
        }
    }
}

struct Returns {
    probability: f64,
    limit: usize,
    /// `R_n` per sample in sample order, `None` if censored.
    values: Vec<Option<usize>>,
}

fn sample_returns(model: &SourceModel, block: &[u8], config: &ReturnConfig) -> Result<Returns> {
    if block.is_empty() {
        return Err(Error::InvalidParameter("block must be nonempty".into()));
    }
    if config.samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    if !(config.u_max > 0.0) {
        return Err(Error::InvalidParameter(format!("u_max {} must be positive", config.u_max)));
    }
    let probability = model.block_probability(block)?.probability;
    let w = (config.u_max / probability).ceil();
    if w > THRESHOLD_GUARD {
        return Err(Error::ThresholdTooLarge { threshold: w, guard: THRESHOLD_GUARD });
    }
    let limit = w as usize;
    // fail fast on unsupported blocks before spawning work
    past_for(model, block, &mut rng_for(config.master_seed, 0))?;
    let alphabet = model.alphabet();
    let values = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(config.master_seed, i);
            let mut past = past_for(model, block, &mut rng).expect("checked above");
            first_return_streaming(block, alphabet, limit, || past.next_symbol(&mut rng))
        })
        .collect();
    Ok(Returns { probability, limit, values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KimReport {
    pub n: usize,
    pub block_probability: f64,
    pub samples: u64,
    pub window: usize,
    /// KS distance of `U = P·R_n` from Exp(1) on `[0, u_max]`.
    pub ks_distance: f64,
    /// Mean of the uncensored `U`.
    pub mean_u: f64,
    pub censored: u64,
}

impl KimReport {
    pub fn censoring_ok(&self) -> bool {
        (self.censored as f64) < MAX_CENSORED_FRACTION * self.samples as f64
    }
}

pub fn kim_check(model: &SourceModel, block: &[u8], config: &ReturnConfig) -> Result<KimReport> {
    let r = sample_returns(model, block, config)?;
    let mut u: Vec<f64> = r.values.iter().flatten().map(|&j| j as f64 * r.probability).collect();
    u.sort_by(f64::total_cmp);
    let censored = r.values.len() - u.len();
    let mean_u = if u.is_empty() { f64::NAN } else { u.iter().sum::<f64>() / u.len() as f64 };
    Ok(KimReport {
        n: block.len(),
        block_probability: r.probability,
        samples: config.samples,
        window: r.limit,
        ks_distance: ks_distance_exponential(&u, r.values.len(), config.u_max),
        mean_u,
        censored: censored as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KacReport {
    pub n: usize,
    pub samples: u64,
    pub mean_rn: f64,
    /// `1/P(x_1^n)`.
    pub target: f64,
    pub rel_err: f64,
    pub censored: u64,
}

pub fn kac_check(model: &SourceModel, block: &[u8], config: &ReturnConfig) -> Result<KacReport> {
    let r = sample_returns(model, block, config)?;
    let found: Vec<usize> = r.values.iter().flatten().copied().collect();
    let censored = (r.values.len() - found.len()) as u64;
    let mean_rn = if found.is_empty() {
        f64::NAN
    } else {
        found.iter().map(|&j| j as f64).sum::<f64>() / found.len() as f64
    };
    let target = 1.0 / r.probability;
    Ok(KacReport {
        n: block.len(),
        samples: config.samples,
        mean_rn,
        target,
        rel_err: (mean_rn - target).abs() / target,
        censored,
    })
}
