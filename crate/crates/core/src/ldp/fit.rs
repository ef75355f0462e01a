//! Least-squares decay rates from tail estimates.

use serde::{Deserialize, Serialize};

use super::tails::{TailEstimate, TailSide};
use crate::error::{Error, Result};

/// Points with fewer hits than this are left out of the fit.
pub const MIN_HITS: u64 = 5;
/// Distinct usable `n` values needed for a fit.
pub const MIN_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub n: usize,
    pub p_hat: f64,
    pub hit_count: u64,
}

impl From<&TailEstimate> for FitPoint {
    fn from(e: &TailEstimate) -> Self {
        Self { n: e.n, p_hat: e.p_hat, hit_count: e.hit_count }
    }
}

/// Fit of `ln p̂ ≈ intercept - slope_nats · n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub epsilon: f64,
    pub side: TailSide,
    pub slope_nats: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points_used: usize,
    /// Points with `p̂ = 0`.
    pub excluded_zero_points: usize,
    /// Points with `0 < hits < MIN_HITS`.
    pub excluded_low_count: usize,
}

pub fn fit_rate(points: &[FitPoint], epsilon: f64, side: TailSide) -> Result<RateFit> {
    let excluded_zero_points = points.iter().filter(|p| p.hit_count == 0).count();
    let excluded_low_count = points.iter().filter(|p| p.hit_count > 0 && p.hit_count < MIN_HITS).count();
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.hit_count >= MIN_HITS && p.p_hat > 0.0)
        .map(|p| (p.n as f64, p.p_hat.ln()))
        .collect();
    let distinct = {
        let mut ns: Vec<usize> = points.iter().filter(|p| p.hit_count >= MIN_HITS).map(|p| p.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.len()
    };
    if distinct < MIN_POINTS {
        return Err(Error::InsufficientPoints { needed: MIN_POINTS, usable: distinct });
    }
    let k = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / k;
    let my = used.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = used.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(RateFit {
        epsilon,
        side,
        slope_nats: -slope,
        intercept,
        r2,
        points_used: used.len(),
        excluded_zero_points,
        excluded_low_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: usize, p: f64, hits: u64) -> FitPoint {
        FitPoint { n, p_hat: p, hit_count: hits }
    }

    #[test]
    fn exact_exponential_is_recovered() {
        let pts: Vec<FitPoint> = [8, 10, 12, 14].iter().map(|&n| pt(n, 0.8 * (-0.3 * n as f64).exp(), 100)).collect();
        let fit = fit_rate(&pts, 0.1, TailSide::Upper).unwrap();
        assert!((fit.slope_nats - 0.3).abs() < 1e-12);
        assert!((fit.intercept - 0.8f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert_eq!(fit.points_used, 4);
    }

    #[test]
    fn sparse_points_are_excluded_and_counted() {
        let pts = vec![pt(6, 0.2, 2000), pt(8, 0.1, 1000), pt(10, 0.05, 500), pt(12, 0.0, 0), pt(14, 0.00003, 3)];
        let fit = fit_rate(&pts, 0.1, TailSide::Lower).unwrap();
        assert_eq!((fit.points_used, fit.excluded_zero_points, fit.excluded_low_count), (3, 1, 1));
        assert!(matches!(
            fit_rate(&pts[1..], 0.1, TailSide::Lower),
            Err(Error::InsufficientPoints { needed: 3, usable: 2 })
        ));
        assert!(matches!(fit_rate(&pts[3..], 0.1, TailSide::Lower), Err(Error::InsufficientPoints { usable: 0, .. })));
    }
}
