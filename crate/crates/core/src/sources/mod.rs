//! Finite-alphabet stationary source models.
//!
//! A [`SourceModel`] knows its exact block probabilities and entropy rate
//! and can generate realizations. Markov sources start from their
//! stationary vector, so every generated array is a stretch of the
//! stationary process.

mod markov;
mod spec;

pub use markov::{
    classify_chain, left_multiply, power_iteration, reversed_kernel, stationary_distribution,
    stationary_residual, validate_stochastic, ChainClassification, DIRECT_SOLVE_MAX,
    STATIONARY_RESIDUAL_TOL, STOCHASTIC_TOL,
};
pub use spec::ModelSpec;

use rand::{Rng, RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::Realization;
use crate::rng::{derive_seed, Categorical, SimRng};

/// Number of symbols; symbols are `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet(u16);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);

    pub fn new(size: usize) -> Result<Self> {
        if !(1..=256).contains(&size) {
            return Err(Error::InvalidModel(format!("alphabet size {size} outside 1..=256")));
        }
        Ok(Alphabet(size as u16))
    }

    pub fn size(self) -> usize {
        self.0 as usize
    }

    /// Bits needed to pack one symbol.
    pub fn bits_per_symbol(self) -> u32 {
        let s = self.size().max(2) as u32;
        32 - (s - 1).leading_zeros()
    }

    pub fn contains(self, symbol: u8) -> bool {
        (symbol as usize) < self.size()
    }
}

/// Entropy rate in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EntropyRate(pub f64);

impl EntropyRate {
    pub fn bits(self) -> f64 {
        self.0
    }

    pub fn nats(self) -> f64 {
        self.0 * std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockProbability {
    pub probability: f64,
    /// Authoritative value; `probability` underflows for long blocks.
    pub log2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IidSource {
    pmf: Vec<f64>,
    log2_pmf: Vec<f64>,
    sampler: Categorical,
}

impl IidSource {
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    reversed: Vec<Vec<f64>>,
    initial: Categorical,
    forward_rows: Vec<Categorical>,
    backward_rows: Vec<Categorical>,
}

impl MarkovSource {
    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn reversed(&self) -> &[Vec<f64>] {
        &self.reversed
    }

    pub fn classification(&self) -> ChainClassification {
        classify_chain(&self.transition)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceModel {
    Iid(IidSource),
    Markov(MarkovSource),
    /// Degenerate single-symbol source.
    Constant { symbol: u8 },
    /// Deterministic cyclic pattern with a uniformly random phase.
    Periodic { pattern: Vec<u8> },
}

impl SourceModel {
    pub fn iid(pmf: Vec<f64>) -> Result<Self> {
        if !(2..=256).contains(&pmf.len()) {
            return Err(Error::InvalidModel(format!("pmf has {} entries, expected 2..=256", pmf.len())));
        }
        for (i, &p) in pmf.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidModel(format!("pmf entry {i} = {p} is not a probability")));
            }
            if p == 0.0 {
                return Err(Error::InvalidModel(format!(
                    "pmf entry {i} is zero; drop zero-probability symbols from the alphabet"
                )));
            }
        }
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidModel(format!("pmf sums to {sum}, expected 1")));
        }
        let sampler = Categorical::new(&pmf);
        let log2_pmf = pmf.iter().map(|p| p.log2()).collect();
        Ok(SourceModel::Iid(IidSource { pmf, log2_pmf, sampler }))
    }

    pub fn markov(transition: Vec<Vec<f64>>) -> Result<Self> {
        if !(2..=256).contains(&transition.len()) {
            return Err(Error::InvalidModel(format!(
                "transition matrix has {} rows, expected 2..=256",
                transition.len()
            )));
        }
        let stationary = stationary_distribution(&transition)?;
        let reversed = reversed_kernel(&transition, &stationary);
        Ok(SourceModel::Markov(MarkovSource {
            initial: Categorical::new(&stationary),
            forward_rows: transition.iter().map(|r| Categorical::new(r)).collect(),
            backward_rows: reversed.iter().map(|r| Categorical::new(r)).collect(),
            transition,
            stationary,
            reversed,
        }))
    }

    pub fn constant(symbol: u8) -> Self {
        SourceModel::Constant { symbol }
    }

    pub fn periodic(pattern: Vec<u8>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidModel("periodic pattern is empty".into()));
        }
        Ok(SourceModel::Periodic { pattern })
    }

    /// Bernoulli source emitting symbol 1 with probability `p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::iid(vec![1.0 - p, p])
    }

    /// Symmetric binary chain that switches state with probability `q`.
    pub fn symmetric_flip(q: f64) -> Result<Self> {
        Self::markov(vec![vec![1.0 - q, q], vec![q, 1.0 - q]])
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Self::iid(vec![1.0 / size as f64; size])
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SourceModel::Iid(_) => "iid",
            SourceModel::Markov(_) => "markov",
            SourceModel::Constant { .. } => "constant",
            SourceModel::Periodic { .. } => "periodic",
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        let size = match self {
            SourceModel::Iid(s) => s.pmf.len(),
            SourceModel::Markov(m) => m.transition.len(),
            SourceModel::Constant { symbol } => *symbol as usize + 1,
            SourceModel::Periodic { pattern } => (*pattern.iter().max().unwrap() as usize + 1).max(2),
        };
        Alphabet(size as u16)
    }

    pub fn entropy_rate(&self) -> EntropyRate {
        EntropyRate(match self {
            SourceModel::Iid(s) => shannon_bits(&s.pmf),
            SourceModel::Markov(m) => m
                .stationary
                .iter()
                .zip(&m.transition)
                .map(|(&pi, row)| pi * shannon_bits(row))
                .sum(),
            SourceModel::Constant { .. } | SourceModel::Periodic { .. } => 0.0,
        })
    }

    /// Exact `P(x_1^n = block)` under the stationary law.
    pub fn block_probability(&self, block: &[u8]) -> Result<BlockProbability> {
        if block.is_empty() {
            return Err(Error::InvalidParameter("block is empty".into()));
        }
        let log2 = match self {
            SourceModel::Iid(s) => {
                let mut acc = 0.0;
                for (i, &b) in block.iter().enumerate() {
                    match s.log2_pmf.get(b as usize) {
                        Some(l) => acc += l,
                        None => return Err(Error::ZeroProbability { position: i }),
                    }
                }
                acc
            }
            SourceModel::Markov(m) => {
                let k = m.transition.len();
                if block.iter().any(|&b| b as usize >= k) {
                    let position = block.iter().position(|&b| b as usize >= k).unwrap();
                    return Err(Error::ZeroProbability { position });
                }
                let first = m.stationary[block[0] as usize];
                if first <= 0.0 {
                    return Err(Error::ZeroProbability { position: 0 });
                }
                let mut acc = first.log2();
                for (i, w) in block.windows(2).enumerate() {
                    let p = m.transition[w[0] as usize][w[1] as usize];
                    if p <= 0.0 {
                        return Err(Error::ZeroProbability { position: i + 1 });
                    }
                    acc += p.log2();
                }
                acc
            }
            SourceModel::Constant { symbol } => match block.iter().position(|b| b != symbol) {
                Some(position) => return Err(Error::ZeroProbability { position }),
                None => 0.0,
            },
            SourceModel::Periodic { pattern } => {
                let period = pattern.len();
                let phases = (0..period)
                    .filter(|&phase| block.iter().enumerate().all(|(i, &b)| pattern[(phase + i) % period] == b))
                    .count();
                if phases == 0 {
                    return Err(Error::ZeroProbability { position: 0 });
                }
                (phases as f64 / period as f64).log2()
            }
        };
        Ok(BlockProbability { probability: log2.exp2(), log2 })
    }

    /// `length` symbols of the stationary process, deterministic in `seed`.
    pub fn generate(&self, length: usize, seed: u64) -> Vec<u8> {
        let mut rng = SimRng::seed_from_u64(seed);
        let mut forward = ForwardSampler::start(self, &mut rng);
        (0..length).map(|_| forward.next_symbol(&mut rng)).collect()
    }

    /// A past of `past_length` symbols drawn from the stationary law
    /// conditioned on `x_1^n = block`, returned in array order
    /// (`x_{-past_length+1}, …, x_0`).
    pub fn generate_past_given_block(&self, block: &[u8], past_length: usize, seed: u64) -> Result<Vec<u8>> {
        let mut sampler = PastSampler::after_block(self, block)?;
        let mut rng = SimRng::seed_from_u64(seed);
        let mut past: Vec<u8> = (0..past_length).map(|_| sampler.next_symbol(&mut rng)).collect();
        past.reverse();
        Ok(past)
    }

    /// A realization with `past_len` past symbols and `future_len` symbols
    /// from `x_1` on. The present runs forward from the stationary law on
    /// stream 0 of `seed`; the past runs backward from `x_1` on stream 1, so
    /// regenerating with a longer past only prepends symbols.
    pub fn generate_two_sided(&self, past_len: usize, future_len: usize, seed: u64) -> Realization {
        GrowingRealization::new(self, future_len, seed, past_len).into_realization()
    }
}

fn shannon_bits(pmf: &[f64]) -> f64 {
    pmf.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Forward generator: draws `x_1` from the stationary law, then steps on.
#[derive(Debug, Clone)]
pub struct ForwardSampler<'a> {
    model: &'a SourceModel,
    state: Option<u8>,
    phase: usize,
}

impl<'a> ForwardSampler<'a> {
    pub fn start<R: RngCore + ?Sized>(model: &'a SourceModel, rng: &mut R) -> Self {
        let phase = match model {
            SourceModel::Periodic { pattern } => rng.random_range(0..pattern.len()),
            _ => 0,
        };
        Self { model, state: None, phase }
    }

    /// Index into the periodic pattern of the next symbol.
    pub fn phase(&self) -> usize {
        self.phase
    }

    #[inline]
    pub fn next_symbol<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> u8 {
        let s = match self.model {
            SourceModel::Iid(src) => src.sampler.sample(rng),
            SourceModel::Markov(m) => match self.state {
                None => m.initial.sample(rng),
                Some(prev) => m.forward_rows[prev as usize].sample(rng),
            },
            SourceModel::Constant { symbol } => *symbol,
            SourceModel::Periodic { pattern } => {
                let s = pattern[self.phase];
                self.phase = (self.phase + 1) % pattern.len();
                s
            }
        };
        self.state = Some(s);
        s
    }
}

/// Backward generator: yields `x_0, x_{-1}, …` given the present block.
#[derive(Debug, Clone)]
pub struct PastSampler<'a> {
    kind: PastKind<'a>,
}

#[derive(Debug, Clone)]
enum PastKind<'a> {
    Iid(&'a Categorical),
    Markov { rows: &'a [Categorical], state: u8 },
    Constant(u8),
    Periodic { pattern: &'a [u8], phase: usize },
}

impl<'a> PastSampler<'a> {
    /// Conditional past sampler for a block of an i.i.d. or Markov source.
    pub fn after_block(model: &'a SourceModel, block: &[u8]) -> Result<Self> {
        match model {
            SourceModel::Constant { .. } | SourceModel::Periodic { .. } => {
                Err(Error::ModelUnsupported { kind: model.kind() })
            }
            _ => {
                model.block_probability(block)?;
                Ok(Self::after_first_symbol(model, block[0], 0))
            }
        }
    }

    /// Past sampler given `x_1 = first`; `phase` is the pattern index of `x_1`
    /// for periodic sources and ignored otherwise.
    pub(crate) fn after_first_symbol(model: &'a SourceModel, first: u8, phase: usize) -> Self {
        let kind = match model {
            SourceModel::Iid(src) => PastKind::Iid(&src.sampler),
            SourceModel::Markov(m) => PastKind::Markov { rows: &m.backward_rows, state: first },
            SourceModel::Constant { symbol } => PastKind::Constant(*symbol),
            SourceModel::Periodic { pattern } => PastKind::Periodic { pattern, phase },
        };
        Self { kind }
    }

    #[inline]
    pub fn next_symbol<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> u8 {
        match &mut self.kind {
            PastKind::Iid(c) => c.sample(rng),
            PastKind::Markov { rows, state } => {
                *state = rows[*state as usize].sample(rng);
                *state
            }
            PastKind::Constant(s) => *s,
            PastKind::Periodic { pattern, phase } => {
                *phase = (*phase + pattern.len() - 1) % pattern.len();
                pattern[*phase]
            }
        }
    }
}

/// Draws a stationary block `x_1^n` and returns it with the matching past
/// sampler; both consume the same stream.
pub fn sample_block_with_past<'a, R: RngCore + ?Sized>(
    model: &'a SourceModel,
    n: usize,
    rng: &mut R,
) -> (Vec<u8>, PastSampler<'a>) {
    let mut forward = ForwardSampler::start(model, rng);
    let phase = forward.phase();
    let block: Vec<u8> = (0..n).map(|_| forward.next_symbol(rng)).collect();
    let past = PastSampler::after_first_symbol(model, block[0], phase);
    (block, past)
}

/// A two-sided realization whose past can be extended backward on demand
/// without changing any symbol already generated.
pub struct GrowingRealization<'a> {
    real: Realization,
    sampler: PastSampler<'a>,
    rng: SimRng,
}

impl<'a> GrowingRealization<'a> {
    pub fn new(model: &'a SourceModel, future_len: usize, seed: u64, initial_past: usize) -> Self {
        assert!(future_len >= 1, "need at least x_1");
        let mut fwd_rng = SimRng::seed_from_u64(derive_seed(seed, 0));
        let mut forward = ForwardSampler::start(model, &mut fwd_rng);
        let phase = forward.phase();
        let future: Vec<u8> = (0..future_len).map(|_| forward.next_symbol(&mut fwd_rng)).collect();
        let mut sampler = PastSampler::after_first_symbol(model, future[0], phase);
        let mut rng = SimRng::seed_from_u64(derive_seed(seed, 1));
        let mut data: Vec<u8> = (0..initial_past.max(1)).map(|_| sampler.next_symbol(&mut rng)).collect();
        data.reverse();
        let origin = data.len() - 1;
        data.extend_from_slice(&future);
        let real = Realization::new(data, origin, model.alphabet()).expect("generated data is valid");
        Self { real, sampler, rng }
    }

    pub fn past_len(&self) -> usize {
        self.real.past_len()
    }

    /// Extends the past to at least `past_len` symbols.
    pub fn grow_to(&mut self, past_len: usize) {
        let have = self.real.past_len();
        if past_len <= have {
            return;
        }
        let mut chunk: Vec<u8> = (0..past_len - have).map(|_| self.sampler.next_symbol(&mut self.rng)).collect();
        chunk.reverse();
        self.real.prepend(&chunk);
    }

    pub fn realization(&self) -> &Realization {
        &self.real
    }

    pub fn into_realization(self) -> Realization {
        self.real
    }
}
