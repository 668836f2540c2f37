//! Exhaustive reference checkers.
//!
//! Everything here follows the definitions literally: each odd size
//! `1, 3, ..., 2m-1` is tried on every path (and, for the burning number, also
//! left unused). There is no memoization and no bound beyond skipping a path
//! whose residual would go negative, so the only thing to trust is the
//! recursion itself. These functions exist to cross-check the solver and the
//! enumerator and are never used by them.

use thiserror::Error;

use crate::enumerate::{ForestList, ListKind, Partitions};
use crate::forest::{ForestError, Order, PathForest};
use crate::solver::{BurnCertificate, BurnMode};

/// Largest search tree (`branches^depth`) an oracle call will accept.
pub const MAX_ORACLE_ASSIGNMENTS: u128 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("instance too large for the oracle: {branches}^{depth} assignments exceed {limit}")]
    TooLarge { branches: usize, depth: u32, limit: u128 },
    #[error("{0}")]
    List(String),
}

fn guard(branches: usize, depth: u32) -> Result<(), OracleError> {
    let size = (branches as u128).checked_pow(depth).unwrap_or(u128::MAX);
    if size > MAX_ORACLE_ASSIGNMENTS {
        return Err(OracleError::TooLarge { branches, depth, limit: MAX_ORACLE_ASSIGNMENTS });
    }
    Ok(())
}

/// Tries every assignment of the `m` odd sizes to the `n` paths of a
/// square-order forest.
pub fn oracle_decide_exact(forest: &PathForest) -> Result<Option<BurnCertificate>, OracleError> {
    let m = forest.square_side()?.get();
    guard(forest.n(), m)?;
    let mut residual: Vec<i64> = forest.orders().iter().map(|&l| i64::from(l)).collect();
    let mut owner = vec![None; m as usize];
    let found = assign(&mut residual, &mut owner, 0, m, false);
    Ok(found.then(|| certificate(m, forest.n(), &owner, BurnMode::Exact)))
}

/// Least `m` such that some assignment (with unused sizes allowed) gives each
/// path at least its order.
pub fn oracle_burning_number(forest: &PathForest) -> Result<u32, OracleError> {
    let mut m = 1;
    loop {
        guard(forest.n() + 1, m)?;
        let mut residual: Vec<i64> = forest.orders().iter().map(|&l| i64::from(l)).collect();
        let mut owner = vec![None; m as usize];
        if assign(&mut residual, &mut owner, 0, m, true) {
            return Ok(m);
        }
        m += 1;
    }
}

/// All n-path forests of order `m²` accepted by [`oracle_decide_exact`].
pub fn oracle_enumerate_well(n: usize, m: u32) -> Result<ForestList, OracleError> {
    guard(n, m)?;
    let mut items = Vec::new();
    for parts in Partitions::new(u64::from(m) * u64::from(m), n) {
        let forest = PathForest::canonicalize(&parts)?;
        if oracle_decide_exact(&forest)?.is_some() {
            items.push(parts);
        }
    }
    ForestList::from_rows(n, m, ListKind::Well, Default::default(), items)
        .map_err(|e| OracleError::List(e.to_string()))
}

/// Size `2j+1` for `j = next..m` goes to some path (or nowhere, when
/// `covering`). Exact mode succeeds when every residual is zero; covering
/// mode when every residual is at most zero.
fn assign(
    residual: &mut [i64],
    owner: &mut [Option<usize>],
    next: u32,
    m: u32,
    covering: bool,
) -> bool {
    if next == m {
        return if covering {
            residual.iter().all(|&r| r <= 0)
        } else {
            residual.iter().all(|&r| r == 0)
        };
    }
    let v = i64::from(2 * next + 1);
    for i in 0..residual.len() {
        if !covering && residual[i] < v {
            continue;
        }
        residual[i] -= v;
        owner[next as usize] = Some(i);
        if assign(residual, owner, next + 1, m, covering) {
            return true;
        }
        residual[i] += v;
    }
    owner[next as usize] = None;
    covering && assign(residual, owner, next + 1, m, covering)
}

fn certificate(m: u32, n: usize, owner: &[Option<usize>], mode: BurnMode) -> BurnCertificate {
    let mut blocks: Vec<Vec<Order>> = vec![Vec::new(); n];
    for j in (0..m as usize).rev() {
        if let Some(i) = owner[j] {
            blocks[i].push(2 * j as u32 + 1);
        }
    }
    BurnCertificate { m, blocks, mode }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::verify_certificate;

    fn forest(s: &str) -> PathForest {
        s.parse().unwrap()
    }

    #[test]
    fn exact_examples() {
        assert_eq!(oracle_decide_exact(&forest("8,13,15")).unwrap(), None);
        let c = oracle_decide_exact(&forest("1,3,5,7")).unwrap().unwrap();
        assert_eq!(c.blocks, vec![vec![1], vec![3], vec![5], vec![7]]);
        let f = forest("6,10");
        let c = oracle_decide_exact(&f).unwrap().unwrap();
        verify_certificate(&f, &c).unwrap();
        let mut blocks = c.blocks.clone();
        blocks.sort();
        assert!(blocks == vec![vec![5, 1], vec![7, 3]] || blocks == vec![vec![7, 3], vec![5, 1]]);
    }

    #[test]
    fn burning_number_examples() {
        assert_eq!(oracle_burning_number(&forest("2,7,7")).unwrap(), 5);
        assert_eq!(oracle_burning_number(&forest("1")).unwrap(), 1);
        assert_eq!(oracle_burning_number(&forest("3,3,3")).unwrap(), 4);
    }

    #[test]
    fn enumerate_examples() {
        let l = oracle_enumerate_well(3, 3).unwrap();
        assert_eq!(l.rows().collect::<Vec<_>>(), vec![vec![1, 3, 5]]);
        let l = oracle_enumerate_well(1, 4).unwrap();
        assert_eq!(l.rows().collect::<Vec<_>>(), vec![vec![16]]);
        let l = oracle_enumerate_well(2, 4).unwrap();
        assert!(l.contains(&[7, 9]));
        assert!(!l.contains(&[2, 14]));
    }

    #[test]
    fn two_path_deficiency() {
        for m in 2..=10u32 {
            let f = PathForest::canonicalize(&[2, m * m - 2]).unwrap();
            assert_eq!(oracle_decide_exact(&f).unwrap(), None, "m={m}");
        }
    }

    #[test]
    fn guard_rejects_large_instances() {
        let f = PathForest::canonicalize(&[13; 13]).unwrap();
        assert!(matches!(oracle_decide_exact(&f), Err(OracleError::TooLarge { .. })));
    }
}
