//! Large-deviation experiments: tail probabilities, decay-rate fits, exact
//! references and return-time checks.

pub mod aep;
pub mod bounds;
pub mod cramer;
pub mod fit;
pub mod returns;
pub mod stats;
pub mod tails;

pub use aep::aep_tail_exact;
pub use cramer::{aep_rates_iid, cramer_rate_iid, AepRates, CramerRate};
pub use fit::{fit_rate, FitPoint, RateFit};
pub use returns::{kac_check, kim_check, KacReport, KimReport, ReturnConfig};
pub use stats::wilson_interval;
pub use tails::{
    mc_tail_aep, mc_tail_lower, mc_tail_lower_with, mc_tail_match, mc_tail_upper, mc_tail_upper_with, TailEstimate,
    TailSide,
};
