//! Elementary bounds used when combining exponential tail estimates.

/// Lower bound on `P(A ∩ B)` from `P(Aᶜ) <= p1 e^{-p2 n}` and
/// `P(Bᶜ) <= q1 e^{-q2 n}`, kept term by term.
pub fn intersection_bound_pairwise(p1: f64, p2: f64, q1: f64, q2: f64, n: f64) -> f64 {
    (1.0 - p1 * (-p2 * n).exp()) + (1.0 - q1 * (-q2 * n).exp()) - 1.0
}

/// The same bound with a single constant and the slower rate.
pub fn intersection_bound_combined(p1: f64, p2: f64, q1: f64, q2: f64, n: f64) -> f64 {
    1.0 - (p1 + q1) * (-p2.min(q2) * n).exp()
}

/// `P(∪ A_i) <= min(1, Σ P(A_i))`.
pub fn union_bound(probabilities: &[f64]) -> f64 {
    probabilities.iter().sum::<f64>().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_dominates_combined() {
        for &(p1, p2, q1, q2) in &[(1.0, 0.1, 2.0, 0.3), (0.5, 0.4, 0.5, 0.4), (3.0, 0.01, 0.1, 1.0)] {
            for n in [0.0, 1.0, 10.0, 100.0] {
                let a = intersection_bound_pairwise(p1, p2, q1, q2, n);
                let b = intersection_bound_combined(p1, p2, q1, q2, n);
                assert!(a >= b - 1e-12, "{a} < {b}");
            }
        }
    }

    #[test]
    fn union_is_capped() {
        assert_eq!(union_bound(&[0.2, 0.3]), 0.5);
        assert_eq!(union_bound(&[0.7, 0.6]), 1.0);
    }
}
