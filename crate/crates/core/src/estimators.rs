//! Recurrence-time entropy estimation.
//!
//! `J_n = (1/Q) Σ_{i=1}^{Q} log2 R_{n,i} / n`, where `R_{n,i}` is the
//! recurrence time of the block `x_{i+1}^{i+n}` on the shifted sequence,
//! so window `i` sees everything up to `x_i` as its past. All windows share
//! one realization.
//!
//! Recurrences longer than `w_max` are censored and imputed at
//! `log2(w_max)/n`; the report then carries [`EstimateFlag::LowerBound`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::{batch_recurrence, match_length_within, MatchLength, Realization, WindowHit};
use crate::sources::{GrowingRealization, SourceModel};

/// Hard cap on the automatic past window.
pub const W_MAX_CAP: usize = 1 << 26;

/// `Q(n) = max(1, ⌈c·n^k⌉)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QSchedule {
    pub c: f64,
    pub k: f64,
}

impl Default for QSchedule {
    fn default() -> Self {
        Self { c: 1.0, k: 2.0 }
    }
}

impl QSchedule {
    pub fn new(c: f64, k: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("schedule needs finite c > 0, k >= 0 (got c={c}, k={k})")));
        }
        Ok(Self { c, k })
    }

    pub fn constant(q: usize) -> Self {
        Self { c: q.max(1) as f64, k: 0.0 }
    }

    pub fn q(&self, n: usize) -> usize {
        ((self.c * (n as f64).powf(self.k)).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateFlag {
    Exact,
    /// Some recurrence windows were censored and imputed at `w_max`.
    LowerBound,
    /// Some match lengths were future-limited (or zero) and imputed.
    Biased,
}

impl EstimateFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateFlag::Exact => "exact",
            EstimateFlag::LowerBound => "lower_bound",
            EstimateFlag::Biased => "biased",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// Block length `n` (or window size `m` for the match-length dual).
    pub n: usize,
    pub q: usize,
    /// Bits per symbol.
    pub estimate: f64,
    pub censored_count: usize,
    pub flag: EstimateFlag,
}

/// `⌈2^{n(H+1)}⌉ + n`, capped at [`W_MAX_CAP`].
///
/// Without a known entropy rate the bound `log2 |A|` is used in place of `H`.
pub fn default_w_max(n: usize, entropy_bits: f64) -> usize {
    let exponent = n as f64 * (entropy_bits + 1.0);
    if exponent >= (W_MAX_CAP as f64).log2() {
        return W_MAX_CAP;
    }
    (exponent.exp2().ceil() as usize + n).min(W_MAX_CAP)
}

fn reduce_windows(n: usize, q: usize, w_max: usize, hits: &[WindowHit]) -> EstimateReport {
    let mut sum = 0.0;
    let mut censored = 0;
    for hit in hits {
        sum += match *hit {
            WindowHit::Found(r) => (r as f64).log2(),
            WindowHit::Censored => {
                censored += 1;
                (w_max as f64).log2()
            }
            WindowHit::Unresolved => unreachable!("unresolved windows are grown away"),
        };
    }
    EstimateReport {
        n,
        q,
        estimate: sum / (q as f64 * n as f64),
        censored_count: censored,
        flag: if censored == 0 { EstimateFlag::Exact } else { EstimateFlag::LowerBound },
    }
}

/// `J_n` on a materialized realization.
pub fn estimate_jn(real: &Realization, n: usize, schedule: QSchedule, w_max: usize) -> Result<EstimateReport> {
    if n == 0 || w_max == 0 {
        return Err(Error::InvalidParameter("n and w_max must be positive".into()));
    }
    let q = schedule.q(n);
    if real.past_len() < w_max {
        return Err(Error::InsufficientData(format!(
            "past has {} symbols, w_max = {w_max} needs that many",
            real.past_len()
        )));
    }
    if real.future_len() < q + n {
        return Err(Error::InsufficientData(format!(
            "future has {} symbols, Q(n) + n = {} needed",
            real.future_len(),
            q + n
        )));
    }
    let first = real.origin() + 2;
    let hits = batch_recurrence(real.data(), real.alphabet(), first, q, n, w_max);
    Ok(reduce_windows(n, q, w_max, &hits))
}

/// `J_n` on a realization whose past is generated only as far back as the
/// windows need. Identical to [`estimate_jn`] on the same realization with
/// the full `w_max` past.
pub fn estimate_jn_growing(
    grow: &mut GrowingRealization<'_>,
    n: usize,
    schedule: QSchedule,
    w_max: usize,
) -> Result<EstimateReport> {
    if n == 0 || w_max == 0 {
        return Err(Error::InvalidParameter("n and w_max must be positive".into()));
    }
    let q = schedule.q(n);
    let future = grow.realization().future_len();
    if future < q + n {
        return Err(Error::InsufficientData(format!("future has {future} symbols, Q(n) + n = {} needed", q + n)));
    }
    loop {
        let real = grow.realization();
        let first = real.origin() + 2;
        let hits = batch_recurrence(real.data(), real.alphabet(), first, q, n, w_max);
        if !hits.contains(&WindowHit::Unresolved) {
            return Ok(reduce_windows(n, q, w_max, &hits));
        }
        let next = (grow.past_len() * 2).max(1024).min(w_max);
        grow.grow_to(next);
    }
}

/// Match-length dual `(1/Q) Σ log2(m) / L_{m,i}` over the windows
/// `i = 1..=Q`, each allowed `horizon` symbols of future.
///
/// Future-limited windows use the attained length and windows with
/// `L = 0` are counted as `L = 1`; either makes the report
/// [`EstimateFlag::Biased`].
pub fn estimate_match_dual(real: &Realization, m: usize, q: usize, horizon: usize) -> Result<EstimateReport> {
    if m == 0 || q == 0 || horizon == 0 {
        return Err(Error::InvalidParameter("m, Q and horizon must be positive".into()));
    }
    if real.past_len() < m {
        return Err(Error::InsufficientData(format!("past has {} symbols, m = {m} needed", real.past_len())));
    }
    if real.future_len() < q + horizon {
        return Err(Error::InsufficientData(format!(
            "future has {} symbols, Q + horizon = {} needed",
            real.future_len(),
            q + horizon
        )));
    }
    let log_m = (m as f64).log2();
    let mut sum = 0.0;
    let mut biased = 0;
    for i in 1..=q {
        let start = real.origin() + 1 + i;
        let len = match match_length_within(real.data(), start, m, horizon) {
            MatchLength::Exact(0) => {
                biased += 1;
                1
            }
            MatchLength::Exact(l) => l,
            MatchLength::FutureLimited(l) => {
                biased += 1;
                l
            }
        };
        sum += log_m / len as f64;
    }
    Ok(EstimateReport {
        n: m,
        q,
        estimate: sum / q as f64,
        censored_count: biased,
        flag: if biased == 0 { EstimateFlag::Exact } else { EstimateFlag::Biased },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub schedule: QSchedule,
    pub seeds: Vec<u64>,
    /// Fixed past window; `None` uses [`default_w_max`] with the model's rate.
    pub w_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub w_max: usize,
    pub report: EstimateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    pub q: usize,
    pub runs: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// Mean over seeds of `|J_n − H|`.
    pub mean_abs_error: f64,
    pub censored_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub entropy_bits: f64,
    /// Seed-major: all `n` for the first seed, then the next seed.
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummary>,
}

/// `J_n` for every `(n, seed)`. Each seed drives one two-sided realization
/// shared by all `n`, as for an almost-sure limit along a single path.
pub fn convergence_sweep(model: &SourceModel, config: &SweepConfig) -> Result<SweepTable> {
    if config.n_list.is_empty() || config.seeds.is_empty() {
        return Err(Error::InvalidParameter("n_list and seeds must be nonempty".into()));
    }
    if config.n_list.contains(&0) {
        return Err(Error::InvalidParameter("block lengths must be positive".into()));
    }
    let h = model.entropy_rate().bits();
    let w_for = |n: usize| config.w_max.unwrap_or_else(|| default_w_max(n, h));
    let future = config.n_list.iter().map(|&n| config.schedule.q(n) + n).max().unwrap();

    let per_seed: Vec<Result<Vec<SweepRow>>> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let mut grow = GrowingRealization::new(model, future, seed, 1);
            config
                .n_list
                .iter()
                .map(|&n| {
                    let w_max = w_for(n);
                    let report = estimate_jn_growing(&mut grow, n, config.schedule, w_max)?;
                    Ok(SweepRow { seed, w_max, report })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(config.seeds.len() * config.n_list.len());
    for r in per_seed {
        rows.extend(r?);
    }

    let summary = config
        .n_list
        .iter()
        .map(|&n| {
            let values: Vec<&SweepRow> = rows.iter().filter(|r| r.report.n == n).collect();
            let runs = values.len();
            let mean = values.iter().map(|r| r.report.estimate).sum::<f64>() / runs as f64;
            let var = if runs > 1 {
                values.iter().map(|r| (r.report.estimate - mean).powi(2)).sum::<f64>() / (runs - 1) as f64
            } else {
                0.0
            };
            SweepSummary {
                n,
                q: config.schedule.q(n),
                runs,
                mean,
                std_dev: var.sqrt(),
                mean_abs_error: values.iter().map(|r| (r.report.estimate - h).abs()).sum::<f64>() / runs as f64,
                censored_total: values.iter().map(|r| r.report.censored_count).sum(),
            }
        })
        .collect();
    Ok(SweepTable { entropy_bits: h, rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::recurrence_naive;
    use crate::sources::Alphabet;

    #[test]
    fn schedule_values() {
        let s = QSchedule::default();
        assert_eq!(s.q(20), 400);
        assert_eq!(QSchedule::new(0.5, 1.5).unwrap().q(3), 3); // ⌈2.598⌉
        assert_eq!(QSchedule::new(0.001, 1.0).unwrap().q(5), 1);
        assert!(QSchedule::new(0.0, 1.0).is_err());
    }

    #[test]
    fn constant_source_estimates_zero() {
        let model = SourceModel::constant(0);
        let real = model.generate_two_sided(64, 200, 1);
        let r = estimate_jn(&real, 8, QSchedule::default(), 64).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.flag, EstimateFlag::Exact);
    }

    #[test]
    fn periodic_source_gives_quarter_bit_at_n4() {
        let model = SourceModel::periodic(vec![0, 1]).unwrap();
        for seed in 0..4 {
            let real = model.generate_two_sided(32, 64, seed);
            for q in [1, 3, 16] {
                let sched = QSchedule::new(q as f64, 0.0).unwrap();
                let r = estimate_jn(&real, 4, sched, 32).unwrap();
                assert_eq!(r.estimate, 0.25);
            }
        }
    }

    #[test]
    fn single_window_matches_direct_recurrence() {
        let model = SourceModel::bernoulli(0.3).unwrap();
        let real = model.generate_two_sided(5000, 40, 9);
        let n = 6;
        let sched = QSchedule::new(1.0, 0.0).unwrap();
        assert_eq!(sched.q(n), 1);
        let r = estimate_jn(&real, n, sched, 4000).unwrap();
        // window 1 is the realization shifted by one symbol
        let shifted = Realization::new(real.data().to_vec(), real.origin() + 1, real.alphabet()).unwrap();
        let direct = recurrence_naive(&shifted, n, 4000).unwrap().found().unwrap();
        assert_eq!(r.estimate, (direct as f64).log2() / n as f64);
    }

    #[test]
    fn censoring_is_imputed_and_flagged() {
        let past = vec![0u8; 50];
        let mut present = vec![0u8; 10];
        present.extend([1, 1, 1, 1, 1, 1]);
        let real = Realization::from_parts(&past, &present, Alphabet::BINARY).unwrap();
        let sched = QSchedule::new(12.0, 0.0).unwrap();
        let r = estimate_jn(&real, 4, sched, 16).unwrap();
        assert!(r.censored_count > 0);
        assert_eq!(r.flag, EstimateFlag::LowerBound);
        let wider = estimate_jn(&real, 4, sched, 40).unwrap();
        assert!(wider.estimate >= r.estimate);
    }

    #[test]
    fn insufficient_data() {
        let real = SourceModel::uniform(2).unwrap().generate_two_sided(100, 20, 0);
        assert!(matches!(
            estimate_jn(&real, 5, QSchedule::default(), 100),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            estimate_jn(&real, 2, QSchedule::default(), 101),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn growing_matches_materialized() {
        let model = SourceModel::symmetric_flip(0.2).unwrap();
        let sched = QSchedule::default();
        for n in [4, 7, 10] {
            let w = default_w_max(n, model.entropy_rate().bits());
            let full = model.generate_two_sided(w, sched.q(n) + n, 77);
            let mut grow = GrowingRealization::new(&model, sched.q(n) + n, 77, 1);
            assert_eq!(
                estimate_jn_growing(&mut grow, n, sched, w).unwrap(),
                estimate_jn(&full, n, sched, w).unwrap()
            );
        }
    }

    #[test]
    fn match_dual_examples() {
        let constant = SourceModel::constant(0).generate_two_sided(16, 200, 0);
        let r = estimate_match_dual(&constant, 8, 10, 100).unwrap();
        assert!((r.estimate - 3.0 / 100.0).abs() < 1e-15);
        assert_eq!(r.flag, EstimateFlag::Biased);
        let periodic = SourceModel::periodic(vec![0, 1]).unwrap().generate_two_sided(16, 200, 3);
        let r = estimate_match_dual(&periodic, 4, 5, 64).unwrap();
        assert_eq!(r.estimate, 0.03125);
        assert_eq!(r.flag, EstimateFlag::Biased);
    }

    #[test]
    fn default_window_policy() {
        assert_eq!(default_w_max(8, 1.0), (1 << 16) + 8);
        assert_eq!(default_w_max(20, 0.88), W_MAX_CAP);
        assert_eq!(default_w_max(4, 0.0), 16 + 4);
    }

    #[test]
    fn sweep_is_deterministic_and_zero_for_constant() {
        let cfg = SweepConfig { n_list: vec![4, 6], schedule: QSchedule::default(), seeds: vec![1, 2, 3], w_max: None };
        let c = convergence_sweep(&SourceModel::constant(0), &cfg).unwrap();
        assert!(c.rows.iter().all(|r| r.report.estimate == 0.0));
        let b = SourceModel::bernoulli(0.3).unwrap();
        assert_eq!(convergence_sweep(&b, &cfg).unwrap(), convergence_sweep(&b, &cfg).unwrap());
    }
}
