use std::fmt;

use serde::Serialize;

use super::EnumError;
use crate::forest::{Order, PathForest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ListKind {
    Well,
    Deficient,
    Candidates,
}

impl ListKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ListKind::Well => "well",
            ListKind::Deficient => "deficient",
            ListKind::Candidates => "candidates",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "well" => Some(ListKind::Well),
            "deficient" => Some(ListKind::Deficient),
            "candidates" => Some(ListKind::Candidates),
            _ => None,
        }
    }
}

impl fmt::Display for ListKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// At most `max_below` parts are smaller than `value`; in the sorted tuple,
/// `l[max_below] ≥ value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Floor {
    pub value: Order,
    pub max_below: usize,
}

/// Which tuples a list covers: `l_1 ≥ l1_min` plus an optional [`Floor`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ListFilter {
    pub l1_min: Order,
    pub floor: Option<Floor>,
}

impl ListFilter {
    pub fn l1_at_least(l1_min: Order) -> Self {
        Self { l1_min, floor: None }
    }

    /// `l_1 ≥ l1_min` and `l_2, ..., l_n ≥ floor`.
    pub fn band(l1_min: Order, floor: Order) -> Self {
        Self { l1_min, floor: Some(Floor { value: floor, max_below: 1 }) }
    }

    pub fn at_most_below(floor: Order, max_below: usize) -> Self {
        Self { l1_min: 0, floor: Some(Floor { value: floor, max_below }) }
    }

    pub fn accepts(&self, row: &[Order]) -> bool {
        if row[0] < self.l1_min {
            return false;
        }
        match self.floor {
            Some(f) if f.max_below < row.len() => row[f.max_below] >= f.value,
            _ => true,
        }
    }

    /// Lower bound for part `i` (0-based) of an accepted `n`-tuple.
    pub fn lower_bound(&self, i: usize, n: usize) -> Order {
        let mut lb = if i == 0 { self.l1_min.max(1) } else { 1 };
        if let Some(f) = self.floor {
            if f.max_below < n && i >= f.max_below {
                lb = lb.max(f.value);
            }
        }
        lb
    }

    /// Every `n`-tuple accepted by `narrower` is accepted by `self`.
    pub fn covers(&self, narrower: &ListFilter, n: usize) -> bool {
        let lb_self: Vec<Order> = (0..n).map(|i| self.lower_bound(i, n)).collect();
        // sorted tuples: position i of a narrower-accepted row is at least the
        // running max of narrower's bounds
        let mut running = 0;
        (0..n).all(|i| {
            running = running.max(narrower.lower_bound(i, n));
            running >= lb_self[i]
        })
    }

    /// True when the filter only has an `l_1` bound, as persisted lists do.
    pub fn is_plain(&self, n: usize) -> bool {
        match self.floor {
            None => true,
            Some(f) => f.max_below >= n || f.value <= self.l1_min,
        }
    }
}

/// Fixed-width big-endian packing of a tuple into a `u128`. Numeric order of
/// packed keys is lexicographic order of the tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Packing {
    pub n: usize,
    pub bits: u32,
}

pub(crate) const MAX_PARTS: usize = 128;

impl Packing {
    pub fn for_level(n: usize, m: u32) -> Result<Self, EnumError> {
        let max = u64::from(m) * u64::from(m);
        let bits = (64 - max.leading_zeros()).max(1);
        if n == 0 || n as u64 * u64::from(bits) > 128 {
            return Err(EnumError::TooWide { n, m });
        }
        Ok(Self { n, bits })
    }

    #[inline]
    pub fn pack(&self, row: &[Order]) -> u128 {
        debug_assert_eq!(row.len(), self.n);
        row.iter().fold(0u128, |acc, &x| (acc << self.bits) | u128::from(x))
    }

    #[inline]
    pub fn unpack(&self, mut key: u128, out: &mut [Order]) {
        let mask = (1u128 << self.bits) - 1;
        for slot in out[..self.n].iter_mut().rev() {
            *slot = (key & mask) as Order;
            key >>= self.bits;
        }
    }
}

/// A sorted, duplicate-free list of canonical n-path forests of order `m²`.
#[derive(Clone, PartialEq, Eq)]
pub struct ForestList {
    n: usize,
    m: u32,
    kind: ListKind,
    filter: ListFilter,
    packing: Packing,
    keys: Vec<u128>,
}

impl fmt::Debug for ForestList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForestList")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("kind", &self.kind)
            .field("filter", &self.filter)
            .field("len", &self.keys.len())
            .finish()
    }
}

impl ForestList {
    pub fn empty(n: usize, m: u32, kind: ListKind, filter: ListFilter) -> Result<Self, EnumError> {
        Ok(Self { n, m, kind, filter, packing: Packing::for_level(n, m)?, keys: Vec::new() })
    }

    /// Validates, sorts and deduplicates `rows`.
    pub fn from_rows(
        n: usize,
        m: u32,
        kind: ListKind,
        filter: ListFilter,
        rows: impl IntoIterator<Item = Vec<Order>>,
    ) -> Result<Self, EnumError> {
        let mut list = Self::empty(n, m, kind, filter)?;
        for row in rows {
            list.check_row(&row)?;
            list.keys.push(list.packing.pack(&row));
        }
        list.keys.sort_unstable();
        list.keys.dedup();
        Ok(list)
    }

    pub(crate) fn from_sorted_keys(
        n: usize,
        m: u32,
        kind: ListKind,
        filter: ListFilter,
        keys: Vec<u128>,
    ) -> Result<Self, EnumError> {
        debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        Ok(Self { n, m, kind, filter, packing: Packing::for_level(n, m)?, keys })
    }

    pub(crate) fn check_row(&self, row: &[Order]) -> Result<(), EnumError> {
        let bad = |why: &str| {
            let mut s = String::new();
            crate::forest::write_orders(&mut s, row).ok();
            Err(EnumError::InvalidRow(format!("{s}: {why}")))
        };
        if row.len() != self.n {
            return bad(&format!("expected {} parts", self.n));
        }
        if row[0] == 0 || row.windows(2).any(|w| w[0] > w[1]) {
            return bad("not a canonical nondecreasing tuple of positive orders");
        }
        let total: u64 = row.iter().map(|&x| u64::from(x)).sum();
        if total != u64::from(self.m) * u64::from(self.m) {
            return bad(&format!("total {total} is not {}²", self.m));
        }
        if !self.filter.accepts(row) {
            return bad("rejected by the list filter");
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn kind(&self) -> ListKind {
        self.kind
    }

    pub fn filter(&self) -> ListFilter {
        self.filter
    }

    pub fn l1_min(&self) -> Order {
        self.filter.l1_min
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub(crate) fn packing(&self) -> Packing {
        self.packing
    }

    pub(crate) fn keys(&self) -> &[u128] {
        &self.keys
    }

    pub(crate) fn into_keys(self) -> Vec<u128> {
        self.keys
    }

    pub fn row(&self, index: usize) -> Vec<Order> {
        let mut out = vec![0; self.n];
        self.packing.unpack(self.keys[index], &mut out);
        out
    }

    /// Rows in lexicographic order.
    pub fn rows(&self) -> impl ExactSizeIterator<Item = Vec<Order>> + '_ {
        (0..self.keys.len()).map(|i| self.row(i))
    }

    pub fn forests(&self) -> impl Iterator<Item = PathForest> + '_ {
        self.rows().map(PathForest::from_sorted_unchecked)
    }

    /// Calls `f` on every row without allocating per row.
    pub fn for_each_row(&self, mut f: impl FnMut(&[Order])) {
        let mut buf = [0; MAX_PARTS];
        for &k in &self.keys {
            self.packing.unpack(k, &mut buf);
            f(&buf[..self.n]);
        }
    }

    /// Membership by binary search. Rows of the wrong shape are absent.
    pub fn contains(&self, row: &[Order]) -> bool {
        if row.len() != self.n || row.iter().any(|&x| u64::from(x) >> self.packing.bits != 0) {
            return false;
        }
        self.keys.binary_search(&self.packing.pack(row)).is_ok()
    }

    pub fn contains_forest(&self, forest: &PathForest) -> bool {
        self.contains(forest.orders())
    }

    /// Rows accepted by `filter`, which must be narrower than the list's own.
    pub fn view(&self, filter: ListFilter) -> Result<Self, EnumError> {
        if !self.filter.covers(&filter, self.n) {
            return Err(EnumError::Inconsistent(format!(
                "filter {filter:?} is not within list filter {:?}",
                self.filter
            )));
        }
        let mut buf = [0; MAX_PARTS];
        let keys = self
            .keys
            .iter()
            .copied()
            .filter(|&k| {
                self.packing.unpack(k, &mut buf);
                filter.accepts(&buf[..self.n])
            })
            .collect();
        Ok(Self { filter, keys, ..self.clone_meta() })
    }

    /// Rows satisfying `pred`, keeping the list metadata.
    pub fn retain_rows(&self, kind: ListKind, mut pred: impl FnMut(&[Order]) -> bool) -> Self {
        let mut buf = [0; MAX_PARTS];
        let keys = self
            .keys
            .iter()
            .copied()
            .filter(|&k| {
                self.packing.unpack(k, &mut buf);
                pred(&buf[..self.n])
            })
            .collect();
        Self { kind, keys, ..self.clone_meta() }
    }

    fn clone_meta(&self) -> Self {
        Self {
            n: self.n,
            m: self.m,
            kind: self.kind,
            filter: self.filter,
            packing: self.packing,
            keys: Vec::new(),
        }
    }
}
