//! Integer partitions with exactly `n` parts, generated as nondecreasing
//! tuples in lexicographic order.

use super::list::ListFilter;
use crate::forest::Order;

/// Odometer over nondecreasing `n`-tuples summing to `total`, with per
/// position lower bounds taken from a [`ListFilter`].
#[derive(Debug, Clone)]
pub struct Partitions {
    total: u64,
    lower: Vec<Order>,
    parts: Vec<Order>,
    started: bool,
    done: bool,
}

impl Partitions {
    pub fn new(total: u64, n: usize) -> Self {
        Self::with_filter(total, n, &ListFilter::default())
    }

    pub fn with_filter(total: u64, n: usize, filter: &ListFilter) -> Self {
        let lower = (0..n).map(|i| filter.lower_bound(i, n)).collect();
        Self { total, lower, parts: vec![0; n], started: false, done: n == 0 }
    }

    /// Fills positions `from..n` minimally and gives the rest to the last
    /// part. Returns false when even the minimal fill overshoots.
    fn fill_from(&mut self, from: usize) -> bool {
        let n = self.parts.len();
        let mut used: u64 = self.parts[..from].iter().map(|&x| u64::from(x)).sum();
        for j in from..n - 1 {
            let prev = if j == 0 { 0 } else { self.parts[j - 1] };
            self.parts[j] = self.lower[j].max(prev);
            used += u64::from(self.parts[j]);
        }
        if used > self.total {
            return false;
        }
        let last = self.total - used;
        let prev = if n >= 2 { self.parts[n - 2] } else { 0 };
        if last < u64::from(self.lower[n - 1].max(prev)) || last > u64::from(Order::MAX) {
            return false;
        }
        self.parts[n - 1] = last as Order;
        true
    }

    /// Advances to the next tuple and returns it, without allocating.
    pub fn next_row(&mut self) -> Option<&[Order]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.fill_from(0) {
                self.done = true;
                return None;
            }
            return Some(&self.parts);
        }
        let n = self.parts.len();
        // bump the rightmost position that still admits a valid completion;
        // raising a position only raises the minimal completion, so once it
        // fails we move left
        for i in (0..n.saturating_sub(1)).rev() {
            self.parts[i] += 1;
            if self.fill_from(i + 1) {
                return Some(&self.parts);
            }
        }
        self.done = true;
        None
    }
}

impl Iterator for Partitions {
    type Item = Vec<Order>;

    fn next(&mut self) -> Option<Vec<Order>> {
        self.next_row().map(<[Order]>::to_vec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force reference: all nondecreasing tuples by recursion.
    fn reference(total: u64, n: usize, filter: &ListFilter) -> Vec<Vec<Order>> {
        fn go(rest: u64, n: usize, prefix: &mut Vec<Order>, out: &mut Vec<Vec<Order>>) {
            if prefix.len() == n {
                if rest == 0 {
                    out.push(prefix.clone());
                }
                return;
            }
            let lo = prefix.last().copied().unwrap_or(1);
            for x in lo..=rest as Order {
                prefix.push(x);
                go(rest - u64::from(x), n, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(total, n, &mut Vec::new(), &mut out);
        out.retain(|r| filter.accepts(r));
        out
    }

    #[test]
    fn small_cases() {
        let all: Vec<_> = Partitions::new(9, 3).collect();
        assert_eq!(all.len(), 7);
        assert_eq!(all[0], vec![1, 1, 7]);
        assert_eq!(all[6], vec![3, 3, 3]);
        assert_eq!(Partitions::new(4, 1).collect::<Vec<_>>(), vec![vec![4]]);
        assert_eq!(Partitions::new(2, 3).count(), 0);
        assert_eq!(Partitions::new(5, 0).count(), 0);
    }

    #[test]
    fn matches_reference_with_filters() {
        let filters = [
            ListFilter::default(),
            ListFilter::l1_at_least(3),
            ListFilter::band(2, 6),
            ListFilter::at_most_below(5, 2),
            ListFilter { l1_min: 2, ..ListFilter::at_most_below(7, 1) },
        ];
        for total in 1..=30u64 {
            for n in 1..=5 {
                for f in &filters {
                    let got: Vec<_> = Partitions::with_filter(total, n, f).collect();
                    assert_eq!(got, reference(total, n, f), "total={total} n={n} {f:?}");
                }
            }
        }
    }
}
