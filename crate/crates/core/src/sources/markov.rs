//! Stationary analysis of finite Markov chains.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row sums and the probability vector must hit 1 within this tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Residual bound ‖πP − π‖∞ accepted for a stationary vector.
pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;
/// Chains up to this size are solved directly; larger ones by power iteration.
pub const DIRECT_SOLVE_MAX: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainClassification {
    pub irreducible: bool,
    pub aperiodic: bool,
    /// Period of the chain when irreducible; otherwise the period of the
    /// lowest-indexed closed class.
    pub period: usize,
}

impl ChainClassification {
    /// Irreducible and aperiodic, hence exponentially φ-mixing with
    /// exponential rates for entropy.
    pub fn is_mixing(&self) -> bool {
        self.irreducible && self.aperiodic
    }
}

/// Checks shape and row sums, naming the first offending row or entry.
pub fn validate_stochastic(transition: &[Vec<f64>]) -> Result<()> {
    let k = transition.len();
    if k == 0 {
        return Err(Error::InvalidModel("transition matrix is empty".into()));
    }
    for (i, row) in transition.iter().enumerate() {
        if row.len() != k {
            return Err(Error::InvalidModel(format!(
                "transition row {i} has {} entries, expected {k}",
                row.len()
            )));
        }
        for (j, &p) in row.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "transition entry [{i}][{j}] = {p} is not a probability"
                )));
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidModel(format!("transition row {i} sums to {sum}, expected 1")));
        }
    }
    Ok(())
}

fn successors(transition: &[Vec<f64>]) -> Vec<Vec<usize>> {
    transition
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(j, _)| j).collect())
        .collect()
}

fn reachable_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Closed communicating classes, each sorted, ordered by smallest member.
fn closed_classes(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let k = adj.len();
    let reach: Vec<Vec<bool>> = (0..k).map(|i| reachable_from(adj, i)).collect();
    let mut assigned = vec![false; k];
    let mut classes = Vec::new();
    for i in 0..k {
        if assigned[i] {
            continue;
        }
        let class: Vec<usize> = (0..k).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &class {
            assigned[j] = true;
        }
        // closed: everything reachable from i reaches back
        if (0..k).all(|j| !reach[i][j] || reach[j][i]) {
            classes.push(class);
        }
    }
    classes
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period of the class containing `members` via BFS levels: the gcd of
/// `level[u] + 1 - level[v]` over all edges inside the class.
fn class_period(adj: &[Vec<usize>], members: &[usize]) -> usize {
    let k = adj.len();
    let mut inside = vec![false; k];
    for &m in members {
        inside[m] = true;
    }
    let mut level = vec![usize::MAX; k];
    let root = members[0];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if inside[v] && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0;
    for &u in members {
        for &v in adj[u].iter().filter(|&&v| inside[v]) {
            let diff = (level[u] + 1) as i64 - level[v] as i64;
            g = gcd(g, diff.unsigned_abs() as usize);
        }
    }
    g.max(1)
}

/// Irreducibility (strong connectivity of the positive-entry digraph) and
/// period (gcd of cycle lengths).
pub fn classify_chain(transition: &[Vec<f64>]) -> ChainClassification {
    let adj = successors(transition);
    let k = adj.len();
    let forward = reachable_from(&adj, 0);
    let irreducible = forward.iter().all(|&b| b) && (0..k).all(|i| reachable_from(&adj, i)[0]);
    let period = if irreducible {
        class_period(&adj, &(0..k).collect::<Vec<_>>())
    } else {
        match closed_classes(&adj).first() {
            Some(c) => class_period(&adj, c),
            None => 1,
        }
    };
    ChainClassification { irreducible, aperiodic: period == 1, period }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..k {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for c in col..k {
                    a[row][c] -= factor * a[col][c];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let tail: f64 = (row + 1..k).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// `π ↦ πP`.
pub fn left_multiply(pi: &[f64], transition: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; pi.len()];
    for (i, row) in transition.iter().enumerate() {
        let w = pi[i];
        if w == 0.0 {
            continue;
        }
        for (o, &p) in out.iter_mut().zip(row) {
            *o += w * p;
        }
    }
    out
}

pub fn stationary_residual(pi: &[f64], transition: &[Vec<f64>]) -> f64 {
    left_multiply(pi, transition)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn normalize(v: &mut [f64]) {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
}

/// Power iteration on the lazy chain `(I + P)/2`, which has the same
/// stationary vector and converges even for periodic chains.
pub fn power_iteration(transition: &[Vec<f64>], tol: f64, max_iter: usize) -> Vec<f64> {
    let k = transition.len();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..max_iter {
        let moved = left_multiply(&pi, transition);
        let mut next: Vec<f64> = pi.iter().zip(&moved).map(|(a, b)| 0.5 * (a + b)).collect();
        normalize(&mut next);
        let delta = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if delta < tol {
            break;
        }
    }
    pi
}

/// The unique stationary vector of a chain with a single closed class.
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    validate_stochastic(transition)?;
    let adj = successors(transition);
    let closed = closed_classes(&adj).len();
    if closed != 1 {
        return Err(Error::NotIrreducible { closed_classes: closed });
    }
    let k = transition.len();
    let mut pi = if k <= DIRECT_SOLVE_MAX {
        // (Pᵀ − I) π = 0 with the last equation replaced by Σπ = 1.
        let mut a = vec![vec![0.0; k]; k];
        for (i, row) in a.iter_mut().enumerate().take(k - 1) {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = transition[j][i] - if i == j { 1.0 } else { 0.0 };
            }
        }
        a[k - 1] = vec![1.0; k];
        let mut b = vec![0.0; k];
        b[k - 1] = 1.0;
        solve_dense(a, b).ok_or(Error::NotIrreducible { closed_classes: closed })?
    } else {
        power_iteration(transition, 1e-12, 1_000_000)
    };
    normalize(&mut pi);
    // polish with a few lazy steps if round-off left a visible residual
    let mut steps = 0;
    while stationary_residual(&pi, transition) > STATIONARY_RESIDUAL_TOL && steps < 10_000 {
        let moved = left_multiply(&pi, transition);
        pi = pi.iter().zip(&moved).map(|(a, b)| 0.5 * (a + b)).collect();
        normalize(&mut pi);
        steps += 1;
    }
    Ok(pi)
}

/// Time-reversed kernel `P̃_ij = π_j P_ji / π_i`. Rows of states with zero
/// stationary mass are left as the forward row; they are never visited.
pub fn reversed_kernel(transition: &[Vec<f64>], pi: &[f64]) -> Vec<Vec<f64>> {
    let k = transition.len();
    (0..k)
        .map(|i| {
            if pi[i] <= 0.0 {
                return transition[i].clone();
            }
            let mut row: Vec<f64> = (0..k).map(|j| pi[j] * transition[j][i] / pi[i]).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn two_state_stationary() {
        // 0.1·π0 = 0.5·π1, π0 + π1 = 1  ⇒  π = (5/6, 1/6)
        let p = vec![vec![0.9, 0.1], vec![0.5, 0.5]];
        let pi = stationary_distribution(&p).unwrap();
        assert!(close(pi[0], 5.0 / 6.0, 1e-12));
        assert!(close(pi[1], 1.0 / 6.0, 1e-12));
        assert!(stationary_residual(&pi, &p) <= STATIONARY_RESIDUAL_TOL);
    }

    #[test]
    fn doubly_stochastic_is_uniform() {
        let p = vec![vec![0.2, 0.5, 0.3], vec![0.3, 0.2, 0.5], vec![0.5, 0.3, 0.2]];
        let pi = stationary_distribution(&p).unwrap();
        for x in pi {
            assert!(close(x, 1.0 / 3.0, 1e-12));
        }
    }

    #[test]
    fn identity_has_two_closed_classes() {
        let p = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(stationary_distribution(&p), Err(Error::NotIrreducible { closed_classes: 2 }));
    }

    #[test]
    fn transient_state_still_has_unique_stationary() {
        let p = vec![vec![1.0, 0.0], vec![0.5, 0.5]];
        let pi = stationary_distribution(&p).unwrap();
        assert!(close(pi[0], 1.0, 1e-12) && close(pi[1], 0.0, 1e-12));
    }

    #[test]
    fn classification_examples() {
        let flip = classify_chain(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(flip, ChainClassification { irreducible: true, aperiodic: false, period: 2 });
        let positive = classify_chain(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(positive.irreducible && positive.aperiodic && positive.period == 1);
        let absorbing = classify_chain(&[vec![1.0, 0.0], vec![0.5, 0.5]]);
        assert!(!absorbing.irreducible);
    }

    #[test]
    fn three_cycle_with_chord_is_aperiodic() {
        // cycles of length 3 and 2 ⇒ gcd 1
        let p = vec![vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5], vec![1.0, 0.0, 0.0]];
        let c = classify_chain(&p);
        assert!(c.irreducible && c.aperiodic);
        let cyc = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        assert_eq!(classify_chain(&cyc).period, 3);
    }

    #[test]
    fn power_iteration_agrees_with_direct_solve() {
        let p = vec![vec![0.9, 0.1, 0.0], vec![0.2, 0.5, 0.3], vec![0.0, 0.6, 0.4]];
        let direct = stationary_distribution(&p).unwrap();
        let power = power_iteration(&p, 1e-14, 1_000_000);
        for (a, b) in direct.iter().zip(&power) {
            assert!(close(*a, *b, 1e-8));
        }
    }

    #[test]
    fn large_chain_uses_power_iteration() {
        let k = 80;
        let p: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut row = vec![0.0; k];
                row[i] = 0.5;
                row[(i + 1) % k] = 0.3;
                row[(i + 7) % k] = 0.2;
                row
            })
            .collect();
        let pi = stationary_distribution(&p).unwrap();
        assert!(stationary_residual(&pi, &p) <= STATIONARY_RESIDUAL_TOL);
        assert!(close(pi.iter().sum::<f64>(), 1.0, 1e-12));
    }

    #[test]
    fn reversed_kernel_example() {
        let p = vec![vec![0.9, 0.1], vec![0.5, 0.5]];
        let pi = stationary_distribution(&p).unwrap();
        let r = reversed_kernel(&p, &pi);
        assert!(close(r[1][0], 0.5, 1e-12) && close(r[1][1], 0.5, 1e-12));
        let sym = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
        let rs = reversed_kernel(&sym, &[0.5, 0.5]);
        assert!(close(rs[1][1], 0.9, 1e-15));
    }

    #[test]
    fn validation_names_offending_row() {
        let err = validate_stochastic(&[vec![0.5, 0.5], vec![0.5, 0.4]]).unwrap_err();
        assert!(err.to_string().contains("row 1"));
        let err = validate_stochastic(&[vec![0.5, 0.5], vec![-0.5, 1.5]]).unwrap_err();
        assert!(err.to_string().contains("[1][0]"));
    }
}
