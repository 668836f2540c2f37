//! Canonical path forests, the per-path source bound `B_m(l)`, and the
//! extension/reduction operators that move a forest between orders `m²` and
//! `(m+1)²`.
//!
//! A path forest is identified with the multiset of its path orders. The
//! canonical representative is the nondecreasing tuple, so two forests built
//! from permutations of the same orders compare equal.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Path order, in vertices.
pub type Order = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("a path forest needs at least one path")]
    Empty,
    #[error("path orders must be positive (got {0})")]
    NonPositive(i64),
    #[error("could not parse path order {0:?}")]
    Parse(String),
    #[error("total order {0} is not a perfect square")]
    NotSquare(u64),
    #[error("path order {l} is outside [1, {m}²]")]
    OrderOutOfRange { m: u32, l: u64 },
    #[error("path index {index} out of range for a {n}-path forest")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("path {index} has order {order} < {needed}, cannot be reduced")]
    NotReducible { index: usize, order: Order, needed: u64 },
}

/// An n-path forest in canonical (nondecreasing) form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PathForest {
    orders: Vec<Order>,
    #[serde(skip)]
    total: u64,
}

impl PathForest {
    /// Sorts `raw` into canonical form. Rejects empty input and zero orders.
    pub fn canonicalize(raw: &[Order]) -> Result<Self, ForestError> {
        if raw.is_empty() {
            return Err(ForestError::Empty);
        }
        if raw.contains(&0) {
            return Err(ForestError::NonPositive(0));
        }
        let mut orders = raw.to_vec();
        orders.sort_unstable();
        Ok(Self::from_sorted_unchecked(orders))
    }

    /// Builds a forest from signed input, as read from user text.
    pub fn from_signed(raw: &[i64]) -> Result<Self, ForestError> {
        let mut orders = Vec::with_capacity(raw.len());
        for &l in raw {
            if l <= 0 {
                return Err(ForestError::NonPositive(l));
            }
            orders.push(Order::try_from(l).map_err(|_| ForestError::Parse(l.to_string()))?);
        }
        Self::canonicalize(&orders)
    }

    pub(crate) fn from_sorted_unchecked(orders: Vec<Order>) -> Self {
        debug_assert!(!orders.is_empty());
        debug_assert!(orders.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(orders[0] > 0);
        let total = orders.iter().map(|&l| u64::from(l)).sum();
        Self { orders, total }
    }

    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    /// Number of paths.
    pub fn n(&self) -> usize {
        self.orders.len()
    }

    /// Total order `N`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Order of the shortest path.
    pub fn shortest(&self) -> Order {
        self.orders[0]
    }

    pub fn longest(&self) -> Order {
        self.orders[self.orders.len() - 1]
    }

    pub fn into_orders(self) -> Vec<Order> {
        self.orders
    }

    /// `m` with `m² = N`, if the total order is a perfect square.
    pub fn square_side(&self) -> Result<SquareSide, ForestError> {
        SquareSide::of_total(self.total)
    }

    /// `⌈√N⌉`, the round budget of the burning number conjecture.
    pub fn ceil_sqrt_total(&self) -> u32 {
        ceil_sqrt(self.total) as u32
    }

    /// Lengthens path `index` by `2m+1`, moving the forest from order `m²`
    /// to `(m+1)²`. Indices are 0-based into the canonical tuple.
    pub fn extend(&self, index: usize) -> Result<Self, ForestError> {
        let m = self.square_side()?.get();
        self.check_index(index)?;
        let mut orders = self.orders.clone();
        orders[index] += 2 * m + 1;
        resort_up(&mut orders, index);
        Ok(Self::from_sorted_unchecked(orders))
    }

    /// Inverse of [`extend`](Self::extend). The forest must have order
    /// `(m+1)²`; path `index` loses `2m+1` vertices, and is deleted when its
    /// order is exactly `2m+1`.
    pub fn reduce(&self, index: usize) -> Result<Self, ForestError> {
        let side = self.square_side()?.get();
        self.check_index(index)?;
        let step = u64::from(2 * side - 1);
        let l = self.orders[index];
        if side < 2 || u64::from(l) < step {
            return Err(ForestError::NotReducible { index, order: l, needed: step });
        }
        let mut orders = self.orders.clone();
        if u64::from(l) == step {
            orders.remove(index);
            if orders.is_empty() {
                return Err(ForestError::NotReducible { index, order: l, needed: step + 1 });
            }
        } else {
            orders[index] = l - step as Order;
            resort_down(&mut orders, index);
        }
        Ok(Self::from_sorted_unchecked(orders))
    }

    /// Removes path `index` without changing any other order.
    pub fn without_path(&self, index: usize) -> Result<Self, ForestError> {
        self.check_index(index)?;
        let mut orders = self.orders.clone();
        orders.remove(index);
        if orders.is_empty() {
            return Err(ForestError::Empty);
        }
        Ok(Self::from_sorted_unchecked(orders))
    }

    /// Σ B_m(l_i) report against the square side of this forest.
    pub fn impossibility_report(&self) -> Result<ImpossibilityReport, ForestError> {
        ImpossibilityReport::new(self)
    }

    fn check_index(&self, index: usize) -> Result<(), ForestError> {
        if index >= self.orders.len() {
            return Err(ForestError::IndexOutOfRange { index, n: self.orders.len() });
        }
        Ok(())
    }
}

/// Moves `orders[i]` right after it grew, restoring nondecreasing order.
pub(crate) fn resort_up(orders: &mut [Order], mut i: usize) {
    while i + 1 < orders.len() && orders[i] > orders[i + 1] {
        orders.swap(i, i + 1);
        i += 1;
    }
}

/// Moves `orders[i]` left after it shrank.
pub(crate) fn resort_down(orders: &mut [Order], mut i: usize) {
    while i > 0 && orders[i] < orders[i - 1] {
        orders.swap(i, i - 1);
        i -= 1;
    }
}

impl fmt::Display for PathForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_orders(f, &self.orders)
    }
}

pub(crate) fn write_orders<W: fmt::Write>(w: &mut W, orders: &[Order]) -> fmt::Result {
    for (i, l) in orders.iter().enumerate() {
        if i > 0 {
            w.write_char(',')?;
        }
        write!(w, "{l}")?;
    }
    Ok(())
}

impl FromStr for PathForest {
    type Err = ForestError;

    /// Parses the comma form `8,13,15` (no spaces) and canonicalizes it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(ForestError::Empty);
        }
        let raw = s
            .split(',')
            .map(|part| {
                if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit() || b == b'-') {
                    return Err(ForestError::Parse(part.to_string()));
                }
                part.parse::<i64>().map_err(|_| ForestError::Parse(part.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_signed(&raw)
    }
}

/// Square side `m` of a forest of order `m²`, i.e. the number of rounds and
/// of burning sources in an exact burn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SquareSide(u32);

impl SquareSide {
    pub fn new(m: u32) -> Option<Self> {
        (m > 0).then_some(Self(m))
    }

    pub fn of_total(total: u64) -> Result<Self, ForestError> {
        let m = total.isqrt();
        if m * m != total || m == 0 {
            return Err(ForestError::NotSquare(total));
        }
        Ok(Self(m as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn squared(self) -> u64 {
        u64::from(self.0) * u64::from(self.0)
    }
}

impl fmt::Display for SquareSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub(crate) fn ceil_sqrt(x: u64) -> u64 {
    let r = x.isqrt();
    if r * r == x {
        r
    } else {
        r + 1
    }
}

/// Sum of the `t` largest odd integers below `2m`: `2mt - t²`.
pub fn top_odd_sum(m: u32, t: u32) -> u64 {
    let (m, t) = (u64::from(m), u64::from(t));
    2 * m * t - t * t
}

/// `B_m(l)`: the least `t ≡ l (mod 2)` with `l ≤ 2mt - t²`.
///
/// Uses the exact integer form of `t ≥ m - √(m² - l)`, so no rounding is
/// involved; the result is checked against the definition in debug builds.
pub fn b_required(m: u32, l: u64) -> Result<u32, ForestError> {
    let m2 = u64::from(m) * u64::from(m);
    if l == 0 || l > m2 {
        return Err(ForestError::OrderOutOfRange { m, l });
    }
    Ok(b_required_unchecked(m, l))
}

#[inline]
pub(crate) fn b_required_unchecked(m: u32, l: u64) -> u32 {
    let m2 = u64::from(m) * u64::from(m);
    // least t with (m - t)² ≤ m² - l
    let mut t = m - (m2 - l).isqrt() as u32;
    if u64::from(t) % 2 != l % 2 {
        t += 1;
    }
    debug_assert!(l <= top_odd_sum(m, t));
    debug_assert!(t < 3 || l > top_odd_sum(m, t - 2));
    t
}

/// Least number of sources, of any parity, whose sizes from
/// `{2m-1, 2m-3, ...}` can sum to at least `l`.
#[inline]
pub(crate) fn cover_required(m: u32, l: u64) -> u32 {
    let m2 = u64::from(m) * u64::from(m);
    debug_assert!(l <= m2);
    if l == 0 {
        return 0;
    }
    m - (m2 - l).isqrt() as u32
}

/// Per-path `B_m` values of a square-order forest and the impossibility
/// verdict `Σ B_m(l_i) > m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpossibilityReport {
    pub m: SquareSide,
    /// `t_i = B_m(l_i)`, aligned with the canonical path order.
    pub t: Vec<u32>,
    pub sum_t: u64,
    /// Indices with `t_i ≥ 4`.
    pub set_a: Vec<usize>,
    /// Indices with `t_i ≤ 3`.
    pub set_b: Vec<usize>,
    /// `s_i = t_i - 2` for `i` in `set_a`.
    pub s_values: Vec<u32>,
    pub s: u64,
    pub impossibly_burnable: bool,
}

impl ImpossibilityReport {
    pub fn new(forest: &PathForest) -> Result<Self, ForestError> {
        let m = forest.square_side()?;
        let t: Vec<u32> = forest
            .orders()
            .iter()
            .map(|&l| b_required_unchecked(m.get(), u64::from(l)))
            .collect();
        let sum_t = t.iter().map(|&x| u64::from(x)).sum();
        let (set_a, set_b): (Vec<usize>, Vec<usize>) = (0..t.len()).partition(|&i| t[i] >= 4);
        let s_values: Vec<u32> = set_a.iter().map(|&i| t[i] - 2).collect();
        let s = s_values.iter().map(|&x| u64::from(x)).sum();
        Ok(Self {
            m,
            impossibly_burnable: sum_t > u64::from(m.get()),
            t,
            sum_t,
            set_a,
            set_b,
            s_values,
            s,
        })
    }
}

/// `Σ B_m(l_i) > m` for a sorted tuple of known square side, without
/// allocating.
pub(crate) fn is_impossibly_burnable(m: u32, orders: &[Order]) -> bool {
    let mut sum = 0u64;
    for &l in orders {
        sum += u64::from(b_required_unchecked(m, u64::from(l)));
    }
    sum > u64::from(m)
}
