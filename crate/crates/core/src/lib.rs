//! Recurrence times, match lengths and their large deviations for
//! finite-alphabet stationary sources.
//!
//! - [`sources`]: exact i.i.d. and Markov models, stationary analysis,
//!   generation and block probabilities.
//! - [`recurrence`]: `R_n` and `L_m` on finite realizations, with a naive
//!   reference scan and exact accelerated paths.
//! - [`estimators`]: the shifted-window recurrence estimator `J_n` and a
//!   match-length counterpart.
//! - [`ldp`]: Monte Carlo tail probabilities, exponential rate fits, exact
//!   typical-set tails, Cramér rates and the return-time law checks.

pub mod error;
pub mod estimators;
pub mod ldp;
pub mod recurrence;
pub mod rng;
pub mod sources;

pub use error::{Error, Result};
pub use estimators::{EstimateFlag, EstimateReport, QSchedule};
pub use recurrence::{MatchLength, Realization, Recurrence, RecurrenceOutcome};
pub use sources::{Alphabet, EntropyRate, ModelSpec, SourceModel};
