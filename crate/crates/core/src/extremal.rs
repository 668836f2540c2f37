//! The largest shortest-path order of an impossibly burnable n-path forest:
//! closed form, explicit extremal forest and an independent search.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::forest::{ceil_sqrt, ForestError, ImpossibilityReport, Order, PathForest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtremalError {
    #[error("n = {n} is below the minimum {min}")]
    TooFewPaths { n: usize, min: usize },
    #[error("witness {forest} is not impossibly burnable")]
    NotImpossible { forest: String },
    #[error("witness {forest} has shortest path {l1}, expected {expected}")]
    WrongShortest { forest: String, l1: Order, expected: u64 },
    #[error(transparent)]
    Forest(#[from] ForestError),
}

/// Largest odd integer `M` with `M ≤ 12n − 6 − 2√(18n − 12)`, and 2 for
/// `n = 2`. Integer only: `2√(18n−12) = √(72n−48)`, so the bound is
/// `12n − 6 − d` with `d = ⌈√(72n−48)⌉`.
pub fn m_n_closed_form(n: usize) -> Result<u64, ExtremalError> {
    if n < 2 {
        return Err(ExtremalError::TooFewPaths { n, min: 2 });
    }
    if n == 2 {
        return Ok(2);
    }
    let n = n as u64;
    let d = ceil_sqrt(72 * n - 48);
    let bound = 12 * n - 6 - d;
    let m = if bound % 2 == 1 { bound } else { bound - 1 };
    debug_assert!(m % 2 == 1);
    Ok(m)
}

/// `f(x) = 3x − (6n−4)/(n−x)` at one candidate `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Objective {
    pub x: u64,
    pub value: f64,
}

/// Parameters of the extremal construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalParams {
    pub n: usize,
    pub x0: u64,
    pub m: u32,
    /// Order `4m − 2` of each of the `x0` long paths.
    pub long_order: Order,
    pub long_count: usize,
    pub odd_count: usize,
    pub odd_total: u64,
    /// The odd paths have order `base` or `base + 2`.
    pub base: Order,
    pub plus_two: usize,
    pub at_floor: Objective,
    pub at_ceil: Objective,
}

impl ExtremalParams {
    pub fn new(n: usize) -> Result<Self, ExtremalError> {
        if n < 3 {
            return Err(ExtremalError::TooFewPaths { n, min: 3 });
        }
        let nn = n as u64;
        let c = 6 * nn - 4;
        // r = √(c/3): 3k² ≤ c ⇔ k ≤ r
        let mut r_floor = (c / 3).isqrt();
        while 3 * (r_floor + 1) * (r_floor + 1) <= c {
            r_floor += 1;
        }
        while 3 * r_floor * r_floor > c {
            r_floor -= 1;
        }
        let r_ceil = if 3 * r_floor * r_floor == c { r_floor } else { r_floor + 1 };
        let (lo, hi) = (nn - r_ceil, nn - r_floor);
        // f(a) ≥ f(b) ⇔ (3a(n−a) − c)(n−b) ≥ (3b(n−b) − c)(n−a)
        let scaled = |x: u64| 3 * x as i128 * (nn - x) as i128 - c as i128;
        let lhs = scaled(lo) * (nn - hi) as i128;
        let rhs = scaled(hi) * (nn - lo) as i128;
        let x0 = if rhs > lhs { hi } else { lo };

        let m = 3 * nn + x0 - 2;
        let long_order = 4 * m - 2;
        let odd_count = nn - x0;
        let odd_total = m * m - x0 * long_order;
        debug_assert_eq!(odd_total as i128, (9 * nn - 6 + 3 * x0) as i128 * odd_count as i128 - c as i128);
        let mut base = odd_total / odd_count;
        if base.is_multiple_of(2) {
            base -= 1;
        }
        let rest = odd_total - base * odd_count;
        debug_assert!(rest.is_multiple_of(2) && rest / 2 < odd_count);
        let objective = |x: u64| Objective { x, value: 3.0 * x as f64 - c as f64 / (nn - x) as f64 };
        Ok(Self {
            n,
            x0,
            m: m as u32,
            long_order: long_order as Order,
            long_count: x0 as usize,
            odd_count: odd_count as usize,
            odd_total,
            base: base as Order,
            plus_two: (rest / 2) as usize,
            at_floor: objective(lo),
            at_ceil: objective(hi),
        })
    }

    /// Shortest path order of the constructed forest.
    pub fn shortest(&self) -> Order {
        self.base
    }

    pub fn forest(&self) -> PathForest {
        let mut orders = Vec::with_capacity(self.n);
        orders.extend(std::iter::repeat_n(self.base, self.odd_count - self.plus_two));
        orders.extend(std::iter::repeat_n(self.base + 2, self.plus_two));
        orders.extend(std::iter::repeat_n(self.long_order, self.long_count));
        PathForest::from_sorted_unchecked(orders)
    }
}

/// The extremal impossibly burnable forest with `n ≥ 3` paths.
pub fn extremal_forest(n: usize) -> Result<(ExtremalParams, PathForest), ExtremalError> {
    let params = ExtremalParams::new(n)?;
    let forest = params.forest();
    Ok((params, forest))
}

/// Result of [`m_n_bruteforce`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteForceResult {
    pub value: u64,
    pub witness: PathForest,
}

/// Searches every `m ∈ [n, m_max]` for the largest floor `λ` such that some
/// impossibly burnable n-path forest of order `m²` has all paths `≥ λ`.
///
/// A path of order `l` has requirement `t` exactly when `l ≡ t (mod 2)` and
/// `up(t−2) < l ≤ up(t)` with `up(t) = 2mt − t²`. Since `up(t) ≥ mt`, any
/// choice with `Σt ≥ m+2` has `Σ up(t) > m²`, so a requirement vector is
/// realizable iff `Σ t ≥ m+2`, `Σ t ≡ m (mod 2)` and the smallest admissible
/// orders sum to at most `m²`. A knapsack over the clipped sum of `t` finds
/// the least such sum.
pub fn m_n_bruteforce(n: usize, m_max: Option<u32>) -> Result<BruteForceResult, ExtremalError> {
    if n < 2 {
        return Err(ExtremalError::TooFewPaths { n, min: 2 });
    }
    let m_max = m_max.unwrap_or(4 * n as u32 - 2);
    let best = (n as u32..=m_max)
        .into_par_iter()
        .filter_map(|m| best_floor(n, m).map(|(lambda, t)| (lambda, m, t)))
        // larger floor first, then smaller m
        .max_by_key(|&(lambda, m, _)| (lambda, std::cmp::Reverse(m)));
    let Some((lambda, m, t)) = best else {
        return Err(ExtremalError::TooFewPaths { n, min: 2 });
    };
    let witness = realize(m, lambda, &t);
    debug_assert!(ImpossibilityReport::new(&witness).is_ok_and(|r| r.impossibly_burnable));
    Ok(BruteForceResult { value: u64::from(witness.shortest()), witness })
}

fn up(m: u32, t: i64) -> u64 {
    if t <= 0 {
        0
    } else {
        let (m, t) = (u64::from(m), t as u64);
        2 * m * t - t * t
    }
}

/// Least order with requirement `t` that is at least `lambda`.
fn low(m: u32, t: u32, lambda: u64) -> Option<u64> {
    let mut l = (up(m, i64::from(t) - 2) + 1).max(lambda);
    if l % 2 != u64::from(t % 2) {
        l += 1;
    }
    (l <= up(m, i64::from(t))).then_some(l)
}

/// Minimal total order of an impossibly burnable forest at level `m` with
/// every path `≥ lambda`, with its requirement vector.
fn min_total(n: usize, m: u32, lambda: u64) -> Option<(u64, Vec<u32>)> {
    // state s: exact Σt up to m+1, then m+2 (Σt ≥ m+2, Σt ≡ m) or m+3
    let width = m as usize + 4;
    let clip = |s: usize| -> usize {
        let m = m as usize;
        if s <= m + 1 {
            s
        } else if (s - m).is_multiple_of(2) {
            m + 2
        } else {
            m + 3
        }
    };
    let lows: Vec<(u32, u64)> = (1..=m).filter_map(|t| low(m, t, lambda).map(|l| (t, l))).collect();
    if lows.is_empty() {
        return None;
    }
    const INF: u64 = u64::MAX;
    let mut dp = vec![vec![INF; width]; n + 1];
    let mut choice = vec![vec![(0u32, 0usize); width]; n + 1];
    dp[0][0] = 0;
    for i in 0..n {
        for s in 0..width {
            let cur = dp[i][s];
            if cur == INF {
                continue;
            }
            for &(t, l) in &lows {
                let ns = clip(s + t as usize);
                let v = cur + l;
                if v < dp[i + 1][ns] {
                    dp[i + 1][ns] = v;
                    choice[i + 1][ns] = (t, s);
                }
            }
        }
    }
    let total = dp[n][m as usize + 2];
    if total > u64::from(m) * u64::from(m) {
        return None;
    }
    let mut t = Vec::with_capacity(n);
    let mut s = m as usize + 2;
    for i in (1..=n).rev() {
        let (ti, prev) = choice[i][s];
        t.push(ti);
        s = prev;
    }
    Some((total, t))
}

/// Largest feasible floor at level `m`. Feasibility is monotone in the floor.
fn best_floor(n: usize, m: u32) -> Option<(u64, Vec<u32>)> {
    let mut lo = 1u64;
    let (_, mut t) = min_total(n, m, lo)?;
    let mut hi = u64::from(m) * u64::from(m) + 1;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match min_total(n, m, mid) {
            Some((_, tt)) => {
                lo = mid;
                t = tt;
            }
            None => hi = mid,
        }
    }
    Some((lo, t))
}

fn realize(m: u32, lambda: u64, t: &[u32]) -> PathForest {
    let mut orders: Vec<u64> = t.iter().map(|&ti| low(m, ti, lambda).expect("feasible")).collect();
    let mut slack = u64::from(m) * u64::from(m) - orders.iter().sum::<u64>();
    for (o, &ti) in orders.iter_mut().zip(t) {
        let room = up(m, i64::from(ti)) - *o;
        let add = room.min(slack) & !1;
        *o += add;
        slack -= add;
    }
    assert_eq!(slack, 0, "upper bounds always absorb the slack");
    let orders: Vec<Order> = orders.into_iter().map(|o| o as Order).collect();
    PathForest::canonicalize(&orders).expect("positive orders")
}

/// Whether an extremal witness has the requirement pattern of the optimal
/// structure: `t_i = 3` on the short side and `t_i = 4` on the long side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub m: u32,
    pub t: Vec<u32>,
    pub set_a: Vec<usize>,
    pub set_b: Vec<usize>,
    pub b_side_all_three: bool,
    pub a_side_all_four: bool,
    /// The long-side pattern is only forced for `n ≥ 8`.
    pub a_side_binding: bool,
    pub passed: bool,
}

pub fn optimal_structure_check(n: usize, witness: &PathForest) -> Result<StructureReport, ExtremalError> {
    let expected = m_n_closed_form(n)?;
    let report = ImpossibilityReport::new(witness)?;
    if !report.impossibly_burnable {
        return Err(ExtremalError::NotImpossible { forest: witness.to_string() });
    }
    if u64::from(witness.shortest()) != expected || witness.n() != n {
        return Err(ExtremalError::WrongShortest {
            forest: witness.to_string(),
            l1: witness.shortest(),
            expected,
        });
    }
    let b_side_all_three = report.set_b.iter().all(|&i| report.t[i] == 3);
    let a_side_all_four = report.set_a.iter().all(|&i| report.t[i] == 4);
    let a_side_binding = n >= 8;
    Ok(StructureReport {
        n,
        m: report.m.get(),
        passed: b_side_all_three && (a_side_all_four || !a_side_binding),
        t: report.t,
        set_a: report.set_a,
        set_b: report.set_b,
        b_side_all_three,
        a_side_all_four,
        a_side_binding,
    })
}
