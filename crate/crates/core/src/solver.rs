//! Decision procedures for burning path forests.
//!
//! Burning an n-path forest in `m` rounds is modelled as handing out the odd
//! source sizes `{1, 3, ..., 2m-1}` to the paths. In *exact* mode (square
//! order `m²`) every size is used and each path receives sizes summing to its
//! order. In *covering* mode sizes may be left unused and each path only needs
//! sizes summing to at least its order; a forest is `m`-burnable iff such a
//! covering assignment exists, which is the same as saying that some way of
//! padding its paths up to total order `m²` admits an exact assignment.
//!
//! Both searches place sizes largest first. At every node the remaining sizes
//! are `{1, 3, ..., 2k-1}` and each unfinished path needs at least
//! `B_k(residual)` of them (exact) or enough to cover its residual (covering);
//! if the total need exceeds `k` the node is pruned. Failed residual
//! multisets are memoized per call.

use std::fmt;

use rustc_hash::FxHashSet;
use serde::Serialize;
use thiserror::Error;

use crate::forest::{b_required_unchecked, cover_required, ForestError, Order, PathForest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BurnMode {
    Exact,
    Covering,
}

impl fmt::Display for BurnMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BurnMode::Exact => "exact",
            BurnMode::Covering => "covering",
        })
    }
}

/// Source sizes handed to each path. `blocks[i]` belongs to the `i`th path
/// of the canonical forest and is listed in descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BurnCertificate {
    pub m: u32,
    pub blocks: Vec<Vec<u32>>,
    pub mode: BurnMode,
}

/// Why a certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateDefect {
    #[error("certificate has {got} blocks for a {expected}-path forest")]
    BlockCount { expected: usize, got: usize },
    #[error("source size {0} is not an odd value in [1, 2m-1]")]
    BadValue(u32),
    #[error("source size {0} is used more than once")]
    Reused(u32),
    #[error("block {path} sums to {sum}, path order is {order}")]
    SumMismatch { path: usize, sum: u64, order: Order },
    #[error("block {path} sums to {sum}, short of path order {order}")]
    SumTooSmall { path: usize, sum: u64, order: Order },
    #[error("exact certificate leaves source size {0} unused")]
    Unused(u32),
    #[error("exact certificate with m = {m} for a forest of order {total}")]
    OrderMismatch { m: u32, total: u64 },
}

/// Checks every certificate invariant against `forest`, independently of the
/// search that produced it.
pub fn verify_certificate(
    forest: &PathForest,
    cert: &BurnCertificate,
) -> Result<(), CertificateDefect> {
    if cert.blocks.len() != forest.n() {
        return Err(CertificateDefect::BlockCount { expected: forest.n(), got: cert.blocks.len() });
    }
    let m = cert.m as usize;
    let mut used = vec![false; m];
    for (path, (block, &order)) in cert.blocks.iter().zip(forest.orders()).enumerate() {
        let mut sum = 0u64;
        for &v in block {
            if v % 2 == 0 || v as usize >= 2 * m {
                return Err(CertificateDefect::BadValue(v));
            }
            let slot = (v / 2) as usize;
            if used[slot] {
                return Err(CertificateDefect::Reused(v));
            }
            used[slot] = true;
            sum += u64::from(v);
        }
        match cert.mode {
            BurnMode::Exact if sum != u64::from(order) => {
                return Err(CertificateDefect::SumMismatch { path, sum, order })
            }
            BurnMode::Covering if sum < u64::from(order) => {
                return Err(CertificateDefect::SumTooSmall { path, sum, order })
            }
            _ => {}
        }
    }
    if cert.mode == BurnMode::Exact {
        if let Some(slot) = used.iter().position(|&u| !u) {
            return Err(CertificateDefect::Unused(2 * slot as u32 + 1));
        }
        if (cert.m as u64).pow(2) != forest.total() {
            return Err(CertificateDefect::OrderMismatch { m: cert.m, total: forest.total() });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
}

/// Exact m-round burnability of a square-order forest. Returns a certificate
/// iff `{1, 3, ..., 2m-1}` partitions into blocks with sums `l_1, ..., l_n`.
pub fn decide_exact(forest: &PathForest) -> Result<Option<BurnCertificate>, ForestError> {
    match decide_exact_budgeted(forest, None) {
        Ok(c) => Ok(c),
        Err(SolveError::Forest(e)) => Err(e),
        Err(SolveError::BudgetExhausted(_)) => unreachable!("unbounded search"),
    }
}

/// [`decide_exact`] that gives up after `max_nodes` search nodes.
pub fn decide_exact_budgeted(
    forest: &PathForest,
    max_nodes: Option<u64>,
) -> Result<Option<BurnCertificate>, SolveError> {
    let m = forest.square_side()?.get();
    let mut search = Search::new(m, forest.orders(), BurnMode::Exact, max_nodes);
    Ok(search.run()?.then(|| search.certificate()))
}

/// Exact burnability of a sorted tuple of order `m²`, without a certificate.
#[cfg(test)]
pub(crate) fn exact_burnable(m: u32, orders: &[Order]) -> bool {
    let mut search = Search::new(m, orders, BurnMode::Exact, None);
    search.run().unwrap_or(false)
}

/// Covering burnability in `m` rounds: disjoint subsets of
/// `{1, 3, ..., 2m-1}` with block `i` summing to at least `l_i`.
pub fn decide_burnable(forest: &PathForest, m: u32) -> Option<BurnCertificate> {
    if (m as usize) < forest.n() {
        return None;
    }
    let mut search = Search::new(m, forest.orders(), BurnMode::Covering, None);
    search.run().unwrap_or(false).then(|| search.certificate())
}

/// Least `m` for which the forest is `m`-burnable, with a covering
/// certificate.
pub fn burning_number(forest: &PathForest) -> (u32, BurnCertificate) {
    let mut m = (forest.n() as u32).max(forest.ceil_sqrt_total());
    loop {
        if let Some(cert) = decide_burnable(forest, m) {
            return (m, cert);
        }
        m += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WellBurnability {
    /// `⌈√N⌉`.
    pub m: u32,
    pub well_burnable: bool,
    pub certificate: Option<BurnCertificate>,
}

/// Whether the burning number is at most `⌈√N⌉`. For square orders this is
/// the exact decision, since capacity then equals demand.
pub fn is_well_burnable(forest: &PathForest) -> WellBurnability {
    let m = forest.ceil_sqrt_total();
    let certificate = if u64::from(m) * u64::from(m) == forest.total() {
        decide_exact(forest).expect("square order")
    } else {
        decide_burnable(forest, m)
    };
    WellBurnability { m, well_burnable: certificate.is_some(), certificate }
}

/// Largest-first assignment search shared by both modes.
struct Search {
    m: u32,
    mode: BurnMode,
    residual: Vec<u32>,
    /// `owner[j]` is the path that received size `2j+1`.
    owner: Vec<Option<u16>>,
    failed_packed: FxHashSet<u128>,
    failed_wide: FxHashSet<Vec<u32>>,
    pack_bits: Option<u32>,
    nodes: u64,
    max_nodes: Option<u64>,
    scratch: Vec<Vec<u32>>,
}

struct Exhausted;

impl Search {
    fn new(m: u32, orders: &[Order], mode: BurnMode, max_nodes: Option<u64>) -> Self {
        let max_val = orders.iter().copied().max().unwrap_or(0).max(1);
        let bits = 32 - max_val.leading_zeros();
        // covering keys carry the round count in an extra slot
        let slots = orders.len() as u32 + u32::from(mode == BurnMode::Covering);
        let bits = bits.max(32 - m.leading_zeros());
        Self {
            m,
            mode,
            residual: orders.to_vec(),
            owner: vec![None; m as usize],
            failed_packed: FxHashSet::default(),
            failed_wide: FxHashSet::default(),
            pack_bits: (slots * bits <= 128).then_some(bits),
            nodes: 0,
            max_nodes,
            scratch: Vec::new(),
        }
    }

    fn run(&mut self) -> Result<bool, SolveError> {
        let total: u64 = self.residual.iter().map(|&r| u64::from(r)).sum();
        if self.residual.len() > self.m as usize || self.residual.len() > u16::MAX as usize {
            return Ok(false);
        }
        let found = match self.mode {
            BurnMode::Exact => {
                if total != u64::from(self.m) * u64::from(self.m) {
                    return Ok(false);
                }
                self.exact(self.m)
            }
            BurnMode::Covering => self.cover(self.m),
        };
        found.map_err(|Exhausted| SolveError::BudgetExhausted(self.nodes))
    }

    fn tick(&mut self) -> Result<(), Exhausted> {
        self.nodes += 1;
        match self.max_nodes {
            Some(cap) if self.nodes > cap => Err(Exhausted),
            _ => Ok(()),
        }
    }

    fn has_failed(&self, key: &[u32]) -> bool {
        match self.pack_bits {
            Some(bits) => self.failed_packed.contains(&pack(key, bits)),
            None => self.failed_wide.contains(key),
        }
    }

    fn mark_failed(&mut self, key: Vec<u32>) {
        match self.pack_bits {
            Some(bits) => {
                self.failed_packed.insert(pack(&key, bits));
                self.recycle(key);
            }
            None => {
                self.failed_wide.insert(key);
            }
        }
    }

    fn key(&mut self, k: Option<u32>) -> Vec<u32> {
        let mut key = self.scratch.pop().unwrap_or_default();
        key.clear();
        key.extend_from_slice(&self.residual);
        key.sort_unstable();
        if let Some(k) = k {
            key.push(k);
        }
        key
    }

    fn recycle(&mut self, key: Vec<u32>) {
        self.scratch.push(key);
    }

    /// Paths that may take size `v`, by descending residual, one per
    /// distinct residual value.
    fn branches(&self, v: u32) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.residual.len())
            .filter(|&i| self.residual[i] > 0 && (self.mode == BurnMode::Covering || self.residual[i] >= v))
            .collect();
        idx.sort_by(|&a, &b| self.residual[b].cmp(&self.residual[a]).then(a.cmp(&b)));
        idx.dedup_by(|a, b| self.residual[*a] == self.residual[*b]);
        idx
    }

    /// Sizes `{1, ..., 2k-1}` remain and sum to exactly the total residual.
    fn exact(&mut self, k: u32) -> Result<bool, Exhausted> {
        if k == 0 {
            return Ok(true);
        }
        self.tick()?;
        let mut need = 0u32;
        for &r in &self.residual {
            if r > 0 {
                need += b_required_unchecked(k, u64::from(r));
            }
        }
        if need > k {
            return Ok(false);
        }
        let key = self.key(None);
        if self.has_failed(&key) {
            self.recycle(key);
            return Ok(false);
        }
        let v = 2 * k - 1;
        for i in self.branches(v) {
            self.residual[i] -= v;
            self.owner[(k - 1) as usize] = Some(i as u16);
            let found = self.exact(k - 1)?;
            if found {
                self.recycle(key);
                return Ok(true);
            }
            self.residual[i] += v;
        }
        self.owner[(k - 1) as usize] = None;
        self.mark_failed(key);
        Ok(false)
    }

    fn cover(&mut self, k: u32) -> Result<bool, Exhausted> {
        let mut need = 0u32;
        let cap = u64::from(k) * u64::from(k);
        for &r in &self.residual {
            if r > 0 {
                if u64::from(r) > cap {
                    return Ok(false);
                }
                need += cover_required(k, u64::from(r));
            }
        }
        if need == 0 {
            return Ok(true);
        }
        if need > k {
            return Ok(false);
        }
        self.tick()?;
        let key = self.key(Some(k));
        if self.has_failed(&key) {
            self.recycle(key);
            return Ok(false);
        }
        let v = 2 * k - 1;
        for i in self.branches(v) {
            let before = self.residual[i];
            self.residual[i] = before.saturating_sub(v);
            self.owner[(k - 1) as usize] = Some(i as u16);
            let found = self.cover(k - 1)?;
            if found {
                self.recycle(key);
                return Ok(true);
            }
            self.residual[i] = before;
        }
        self.owner[(k - 1) as usize] = None;
        if self.cover(k - 1)? {
            self.recycle(key);
            return Ok(true);
        }
        self.mark_failed(key);
        Ok(false)
    }

    fn certificate(&self) -> BurnCertificate {
        let mut blocks = vec![Vec::new(); self.residual.len()];
        for j in (0..self.m as usize).rev() {
            if let Some(path) = self.owner[j] {
                blocks[path as usize].push(2 * j as u32 + 1);
            }
        }
        BurnCertificate { m: self.m, blocks, mode: self.mode }
    }
}

fn pack(key: &[u32], bits: u32) -> u128 {
    key.iter().fold(0u128, |acc, &x| (acc << bits) | u128::from(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forest(s: &str) -> PathForest {
        s.parse().unwrap()
    }

    fn cert(m: u32, mode: BurnMode, blocks: &[&[u32]]) -> BurnCertificate {
        BurnCertificate { m, mode, blocks: blocks.iter().map(|b| b.to_vec()).collect() }
    }

    #[test]
    fn exact_examples() {
        let c = decide_exact(&forest("1,3,5")).unwrap().unwrap();
        assert_eq!(c.blocks, vec![vec![1], vec![3], vec![5]]);
        assert_eq!(decide_exact(&forest("8,13,15")).unwrap(), None);
        let c = decide_exact(&forest("7,9")).unwrap().unwrap();
        assert_eq!(c.blocks, vec![vec![7], vec![5, 3, 1]]);
        assert_eq!(decide_exact(&forest("2,7,8")), Err(ForestError::NotSquare(17)));
    }

    #[test]
    fn covering_examples() {
        let f = forest("2,7,7");
        assert_eq!(decide_burnable(&f, 4), None);
        let c = decide_burnable(&f, 5).unwrap();
        verify_certificate(&f, &c).unwrap();
        let f = forest("10");
        let c = decide_burnable(&f, 4).unwrap();
        verify_certificate(&f, &c).unwrap();
        assert_eq!(decide_burnable(&f, 3), None);
        assert_eq!(decide_burnable(&forest("1,1,1"), 2), None);
    }

    #[test]
    fn burning_number_examples() {
        assert_eq!(burning_number(&forest("1,3,5")).0, 3);
        assert_eq!(burning_number(&forest("2,7,7")).0, 5);
        assert_eq!(burning_number(&forest("3,3,3")).0, 4);
        assert_eq!(burning_number(&forest("1")).0, 1);
    }

    #[test]
    fn well_burnable_examples() {
        assert!(!is_well_burnable(&forest("17,17,30")).well_burnable);
        assert!(!is_well_burnable(&forest("10,13,13")).well_burnable);
        let w = is_well_burnable(&forest("7,9"));
        assert!(w.well_burnable);
        assert_eq!(w.certificate.unwrap().mode, BurnMode::Exact);
        // order 17, ⌈√17⌉ = 5
        assert!(is_well_burnable(&forest("2,7,8")).well_burnable);
        assert!(!is_well_burnable(&forest("1,1,1")).well_burnable);
    }

    #[test]
    fn verify_examples() {
        let f = forest("1,3,5");
        assert_eq!(verify_certificate(&f, &cert(3, BurnMode::Exact, &[&[1], &[3], &[5]])), Ok(()));
        assert!(matches!(
            verify_certificate(&f, &cert(3, BurnMode::Exact, &[&[3], &[1], &[5]])),
            Err(CertificateDefect::SumMismatch { path: 0, .. })
        ));
        assert_eq!(
            verify_certificate(&forest("7,9"), &cert(4, BurnMode::Exact, &[&[7], &[5, 3, 1]])),
            Ok(())
        );
        assert_eq!(
            verify_certificate(&f, &cert(3, BurnMode::Exact, &[&[1], &[3], &[5, 1]])),
            Err(CertificateDefect::Reused(1))
        );
        assert_eq!(
            verify_certificate(&f, &cert(3, BurnMode::Exact, &[&[1], &[3], &[4]])),
            Err(CertificateDefect::BadValue(4))
        );
        assert_eq!(
            verify_certificate(&forest("1,3"), &cert(3, BurnMode::Exact, &[&[1], &[3]])),
            Err(CertificateDefect::Unused(5))
        );
        assert_eq!(
            verify_certificate(&forest("1,3"), &cert(3, BurnMode::Covering, &[&[1], &[3]])),
            Ok(())
        );
        assert!(matches!(
            verify_certificate(&f, &cert(3, BurnMode::Exact, &[&[1], &[3]])),
            Err(CertificateDefect::BlockCount { .. })
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let f = forest("8,13,15");
        assert_eq!(decide_exact_budgeted(&f, Some(0)), Err(SolveError::BudgetExhausted(1)));
        assert_eq!(decide_exact_budgeted(&f, Some(10_000)), Ok(None));
    }

    #[test]
    fn single_paths() {
        for k in 1..=400u32 {
            let f = PathForest::canonicalize(&[k]).unwrap();
            let (m, c) = burning_number(&f);
            assert_eq!(u64::from(m), crate::forest::ceil_sqrt(u64::from(k)), "k={k}");
            verify_certificate(&f, &c).unwrap();
        }
    }
}
