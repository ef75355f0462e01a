//! Recurrence times `R_n` and match lengths `L_m` on finite realizations.
//!
//! `R_n` is the smallest backward shift `j ≥ 1` with
//! `x_1^n = x_{-j+1}^{-j+n}`; shifts `j < n` overlap the present block and
//! are allowed. `L_m` is the longest prefix of the present that starts
//! again at one of the `m` positions `x_0, x_{-1}, …, x_{-m+1}`.
//!
//! Finite data censors both: a recurrence beyond the searched window is
//! reported as [`Recurrence::Censored`], and a match still running at the
//! end of the data as [`MatchLength::FutureLimited`].

mod index;
mod key;
mod realization;

pub use index::first_return_streaming;
pub(crate) use index::{batch_recurrence, WindowHit};
pub use realization::Realization;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recurrence {
    Found(usize),
    /// No recurrence at any shift up to `window`.
    Censored { window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceOutcome {
    pub n: usize,
    pub value: Recurrence,
}

impl RecurrenceOutcome {
    pub fn found(&self) -> Option<usize> {
        match self.value {
            Recurrence::Found(r) => Some(r),
            Recurrence::Censored { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchLength {
    Exact(usize),
    /// The longest match reached the last available symbol; the true
    /// `L_m` is at least this.
    FutureLimited(usize),
}

impl MatchLength {
    /// Attained length (a lower bound when future-limited).
    pub fn length(self) -> usize {
        match self {
            MatchLength::Exact(l) | MatchLength::FutureLimited(l) => l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchLengthOutcome {
    pub m: usize,
    pub value: MatchLength,
}

/// How the threshold event `R_n > t` (or `R_n < t`) treats equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// `R_n > t` for the upper event and `R_n < t` for the lower one.
    #[default]
    Strict,
    /// `R_n ≥ t` and `R_n ≤ t`.
    Weak,
}

impl Boundary {
    /// The upper event holds iff no shift `j <= limit` matches.
    pub fn upper_limit(self, t: f64) -> usize {
        match self {
            Boundary::Strict => t.max(0.0).floor() as usize,
            Boundary::Weak => (t.ceil() - 1.0).max(0.0) as usize,
        }
    }

    /// The lower event holds iff some shift `j <= limit` matches.
    pub fn lower_limit(self, t: f64) -> usize {
        match self {
            Boundary::Strict => (t.ceil() - 1.0).max(0.0) as usize,
            Boundary::Weak => t.max(0.0).floor() as usize,
        }
    }
}

fn check_query(real: &Realization, n: usize, j_max: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("block length n must be at least 1".into()));
    }
    if real.future_len() < n {
        return Err(Error::InsufficientFuture { needed: n, available: real.future_len() });
    }
    if real.past_len() < j_max {
        return Err(Error::InsufficientPast { needed: j_max, available: real.past_len() });
    }
    Ok(())
}

fn outcome(n: usize, j_max: usize, hit: Option<usize>) -> RecurrenceOutcome {
    let value = match hit {
        Some(r) => Recurrence::Found(r),
        None => Recurrence::Censored { window: j_max },
    };
    RecurrenceOutcome { n, value }
}

/// Reference backward scan over `j = 1, …, j_max`.
pub fn recurrence_naive(real: &Realization, n: usize, j_max: usize) -> Result<RecurrenceOutcome> {
    check_query(real, n, j_max)?;
    Ok(outcome(n, j_max, index::scan_naive(real.data(), real.present_start(), n, j_max)))
}

/// Rolling-key scan with the same result as [`recurrence_naive`].
pub fn recurrence_indexed(real: &Realization, n: usize, j_max: usize) -> Result<RecurrenceOutcome> {
    check_query(real, n, j_max)?;
    let hit = index::scan_rolling(real.data(), real.alphabet(), real.present_start(), n, j_max);
    Ok(outcome(n, j_max, hit))
}

/// Whether `R_n > t`, decided without resolving `R_n` itself.
pub fn exceeds_threshold(real: &Realization, n: usize, t: f64) -> Result<bool> {
    exceeds_threshold_with(real, n, t, Boundary::Strict)
}

pub fn exceeds_threshold_with(real: &Realization, n: usize, t: f64, boundary: Boundary) -> Result<bool> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold {t} must be finite and nonnegative")));
    }
    let needed = t.ceil() as usize + n;
    if real.past_len() < needed {
        return Err(Error::InsufficientPast { needed, available: real.past_len() });
    }
    check_query(real, n, 0)?;
    let limit = boundary.upper_limit(t);
    Ok(index::scan_rolling(real.data(), real.alphabet(), real.present_start(), n, limit).is_none())
}

/// `L_m` over the starts `x_0, …, x_{-m+1}`, using all available future.
pub fn match_length(real: &Realization, m: usize) -> Result<MatchLengthOutcome> {
    if real.past_len() < m {
        return Err(Error::InsufficientPast { needed: m, available: real.past_len() });
    }
    let value = match_length_within(real.data(), real.present_start(), m, real.future_len());
    Ok(MatchLengthOutcome { m, value })
}

/// Longest common prefix of `data[start..start+horizon]` with a copy
/// starting `k = 1..=m` positions earlier.
pub(crate) fn match_length_within(data: &[u8], start: usize, m: usize, horizon: usize) -> MatchLength {
    let present = &data[start..start + horizon];
    let mut best = 0;
    for k in 1..=m {
        let copy = &data[start - k..start - k + horizon];
        let len = present.iter().zip(copy).take_while(|(a, b)| a == b).count();
        if len > best {
            best = len;
            if best == horizon {
                return MatchLength::FutureLimited(best);
            }
        }
    }
    MatchLength::Exact(best)
}

/// Checks `R_n > m ⇔ L_m < n` on one realization.
pub fn duality_holds(real: &Realization, n: usize, m: usize) -> Result<bool> {
    if real.past_len() < m {
        return Err(Error::Undecidable(format!("past {} shorter than m = {m}", real.past_len())));
    }
    if real.future_len() < n || n == 0 {
        return Err(Error::Undecidable(format!("future {} shorter than n = {n}", real.future_len())));
    }
    let recurrence_exceeds = recurrence_naive(real, n, m)?.found().is_none();
    let match_short = match match_length(real, m)?.value {
        MatchLength::Exact(l) => l < n,
        // attained length is at least F ≥ n
        MatchLength::FutureLimited(_) => false,
    };
    Ok(recurrence_exceeds == match_short)
}
