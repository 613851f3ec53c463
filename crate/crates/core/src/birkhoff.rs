//! Birkhoff decomposition of square doubly stochastic matrices into convex
//! combinations of permutation matrices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;


use crate::{Error, Result};

/// Entries at or below this are treated as absent when matching.
const ENTRY_EPS: f64 = 1e-13;

/// Largest row/column mass allowed to remain after extraction.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// One term `p · P_σ` with `P_σ[i][σ(i)] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationTerm {
    pub weight: f64,
    pub perm: Vec<usize>,
}

/// Splits `d` into `Σ_x p_x P_x` by repeatedly finding a perfect matching on
/// the positive entries and peeling off its smallest entry. Each step zeroes
/// at least one entry, so at most `d² − 2d + 2` terms are produced.
///
/// Weights are renormalized to sum to 1. Fails with
/// [`Error::BirkhoffResidual`] if the entries left once no perfect matching
/// remains carry more than [`RESIDUAL_TOL`] of row mass.
pub fn decompose(d: &[Vec<f64>]) -> Result<Vec<PermutationTerm>> {
    let n = d.len();
    if d.iter().any(|r| r.len() != n) {
        return Err(Error::dim(format!("matrix is not square ({n} rows)")));
    }
    let mut m: Vec<Vec<f64>> = d.to_vec();
    let mut terms = Vec::new();
    for _ in 0..n * n + 1 {
        let Some(perm) = perfect_matching(&m) else { break };
        let weight = (0..n).map(|i| m[i][perm[i]]).fold(f64::INFINITY, f64::min);
        for i in 0..n {
            m[i][perm[i]] -= weight;
        }
        terms.push(PermutationTerm { weight, perm });
    }
    let residual = m.iter().map(|r| r.iter().map(|x| x.max(0.0)).sum::<f64>()).fold(0.0, f64::max);
    if residual > RESIDUAL_TOL {
        return Err(Error::BirkhoffResidual(residual));
    }
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    if !(total > 0.0) {
        return Err(Error::BirkhoffResidual(residual));
    }
    for t in &mut terms {
        t.weight /= total;
    }
    Ok(terms)
}

/// Rebuilds `Σ_x p_x P_x`.
pub fn recompose(terms: &[PermutationTerm], n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for t in terms {
        for (i, &j) in t.perm.iter().enumerate() {
            m[i][j] += t.weight;
        }
    }
    m
}

/// Perfect matching of rows to columns through entries above
/// [`ENTRY_EPS`], by augmenting paths. Rows are tried in order and columns
/// in increasing index, so the result is deterministic.
fn perfect_matching(m: &[Vec<f64>]) -> Option<Vec<usize>> {
    let n = m.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(m, row, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (j, owner) in col_owner.iter().enumerate() {
        perm[owner.expect("every column matched")] = j;
    }
    Some(perm)
}

fn augment(m: &[Vec<f64>], row: usize, seen: &mut [bool], col_owner: &mut [Option<usize>]) -> bool {
    for j in 0..m.len() {
        if m[row][j] <= ENTRY_EPS || seen[j] {
            continue;
        }
        seen[j] = true;
        let free = match col_owner[j] {
            None => true,
            Some(other) => augment(m, other, seen, col_owner),
        };
        if free {
            col_owner[j] = Some(row);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{doubly_stochastic, rng_from_seed};

    #[test]
    fn identity_is_one_term() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let terms = decompose(&id).unwrap();
        assert_eq!(terms, vec![PermutationTerm { weight: 1.0, perm: vec![0, 1] }]);
    }

    #[test]
    fn uniform_two_by_two() {
        let terms = decompose(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(terms.len(), 2);
        assert!(terms.iter().all(|t| (t.weight - 0.5).abs() < 1e-15));
    }

    #[test]
    fn random_matrices_recompose() {
        let mut rng = rng_from_seed(7);
        for d in 2..7 {
            let m = doubly_stochastic(d, 5, &mut rng);
            let terms = decompose(&m).unwrap();
            assert!(terms.len() <= d * d - 2 * d + 2);
            let back = recompose(&terms, d);
            for (a, b) in back.iter().flatten().zip(m.iter().flatten()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn non_stochastic_leaves_residual() {
        let m = vec![vec![1.0, 0.5], vec![0.0, 0.5]];
        assert!(matches!(decompose(&m), Err(Error::BirkhoffResidual(_))));
    }
}
