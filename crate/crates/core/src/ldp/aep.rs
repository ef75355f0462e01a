//! Exact probability of the AEP deviation event
//! `|-log2 P(X_1^n)/n - H| > δ`.

use crate::error::{Error, Result};
use crate::sources::SourceModel;

/// Largest number of blocks enumerated directly.
pub const ENUMERATION_LIMIT: f64 = (1u64 << 22) as f64;
/// Largest `n` for the binomial route.
pub const BINOMIAL_MAX_N: usize = 10_000;

/// Exact `P(|-log2 P(X_1^n)/n - H| > δ)`.
///
/// Binary i.i.d. sources sum over the number of ones; everything else
/// enumerates all `|A|^n` blocks.
pub fn aep_tail_exact(model: &SourceModel, n: usize, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta {delta} must be finite and nonnegative")));
    }
    if let SourceModel::Iid(src) = model {
        if src.pmf().len() == 2 {
            if n > BINOMIAL_MAX_N {
                return Err(Error::TooLargeToEnumerate { blocks: n as f64, limit: BINOMIAL_MAX_N as f64 });
            }
            return Ok(binomial_tail(src.pmf(), n, delta, model.entropy_rate().bits()));
        }
    }
    aep_tail_enumerated(model, n, delta)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

fn binomial_tail(pmf: &[f64], n: usize, delta: f64, h: f64) -> f64 {
    let lf = ln_factorials(n);
    let (l0, l1) = (pmf[0].log2(), pmf[1].log2());
    let (ln0, ln1) = (pmf[0].ln(), pmf[1].ln());
    (0..=n)
        .filter(|&k| {
            let log2 = k as f64 * l1 + (n - k) as f64 * l0;
            (-log2 / n as f64 - h).abs() > delta
        })
        .map(|k| (lf[n] - lf[k] - lf[n - k] + k as f64 * ln1 + (n - k) as f64 * ln0).exp())
        .sum()
}

/// Enumeration over all blocks; available for every source kind.
pub fn aep_tail_enumerated(model: &SourceModel, n: usize, delta: f64) -> Result<f64> {
    let size = model.alphabet().size();
    let blocks = (size as f64).powi(n as i32);
    if blocks > ENUMERATION_LIMIT {
        return Err(Error::TooLargeToEnumerate { blocks, limit: ENUMERATION_LIMIT });
    }
    let h = model.entropy_rate().bits();
    let mut block = vec![0u8; n];
    let mut total = 0.0;
    loop {
        if let Ok(p) = model.block_probability(&block) {
            if (-p.log2 / n as f64 - h).abs() > delta {
                total += p.probability;
            }
        }
        // odometer increment, last symbol fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(total);
            }
            i -= 1;
            block[i] += 1;
            if (block[i] as usize) < size {
                break;
            }
            block[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_and_enumeration_agree() {
        let model = SourceModel::bernoulli(0.3).unwrap();
        for n in [1, 5, 10, 16] {
            for delta in [0.05, 0.2, 0.5] {
                let a = aep_tail_exact(&model, n, delta).unwrap();
                let b = aep_tail_enumerated(&model, n, delta).unwrap();
                assert!((a - b).abs() < 1e-12, "n={n} δ={delta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn bernoulli_n10_reference() {
        // deviations for k = 2, 3, 4 ones stay within 0.2 bits
        let model = SourceModel::bernoulli(0.3).unwrap();
        let p = aep_tail_exact(&model, 10, 0.2).unwrap();
        let binom = |k: i32| {
            let c = (1..=k).fold(1.0, |acc, i| acc * (10 - k + i) as f64 / i as f64);
            c * 0.3f64.powi(k) * 0.7f64.powi(10 - k)
        };
        assert!((p - (1.0 - binom(2) - binom(3) - binom(4))).abs() < 1e-12, "{p}");
        assert!((p - 0.299_576_678_5).abs() < 1e-9);
    }

    #[test]
    fn uniform_has_no_deviation() {
        let model = SourceModel::uniform(2).unwrap();
        assert_eq!(aep_tail_exact(&model, 30, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn markov_tail_decreases_in_delta() {
        let model = SourceModel::markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let ps: Vec<f64> = [0.0, 0.1, 0.2, 0.4].iter().map(|&d| aep_tail_exact(&model, 12, d).unwrap()).collect();
        assert!(ps[0] <= 1.0 + 1e-12 && ps[3] >= 0.0);
        assert!(ps.windows(2).all(|w| w[0] >= w[1]), "{ps:?}");
    }

    #[test]
    fn enumeration_limit() {
        let model = SourceModel::uniform(4).unwrap();
        assert!(matches!(aep_tail_exact(&model, 12, 0.1), Err(Error::TooLargeToEnumerate { .. })));
        let model = SourceModel::bernoulli(0.3).unwrap();
        assert!(aep_tail_exact(&model, 400, 0.2).unwrap() > 0.0);
        assert!(aep_tail_exact(&model, 10_001, 0.2).is_err());
    }
}
