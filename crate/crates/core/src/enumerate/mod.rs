//! Complete lists of well-burnable n-path forests, built level by level.
//!
//! A well-burnable n-path forest of order `(m+1)²` has an exact certificate
//! in which the size `2m+1` sits in some block. Removing that size leaves a
//! well-burnable forest of order `m²`: either an (n-1)-path forest, when the
//! block was `{2m+1}` alone, or an n-path forest with one path shorter by
//! `2m+1`. So every level is the union of
//!
//! 1. each well (n-1)-path forest of order `m²` plus a new path `2m+1`, and
//! 2. each well n-path forest of order `m²` with one path lengthened by
//!    `2m+1`,
//!
//! starting from `(1, 3, ..., 2n-1)`, the only well n-path forest of order
//! `n²`.
//!
//! When only forests with `l_1 ≥ F` are wanted at the top, parents are
//! restricted to those that can still reach that region: a forest with at
//! most `j` parts below `F` at order `(m+1)²` has parents with at most `j+1`
//! such parts (rule 2) or, when `2m+1 < F`, an (n-1)-path parent with at most
//! `j-1` (rule 1). [`FamilyPlan`] propagates those bounds backwards from the
//! requested lists.

mod list;
mod partitions;

use std::collections::BTreeMap;

use log::{debug, info};
use rayon::prelude::*;
use thiserror::Error;

pub use list::{Floor, ForestList, ListFilter, ListKind};
pub(crate) use list::{Packing, MAX_PARTS};
pub use partitions::Partitions;

use crate::forest::{resort_up, ForestError, Order};
use crate::store::merge_sorted;

#[derive(Debug, Error)]
pub enum EnumError {
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("{n}-path forests of order {m}² do not fit the packed row format")]
    TooWide { n: usize, m: u32 },
    #[error("inconsistent list shapes: {0}")]
    Inconsistent(String),
    #[error("invalid row {0}")]
    InvalidRow(String),
    #[error("level (n={n}, m={m}) has {items} items, over the budget of {limit}")]
    BudgetExceeded { n: usize, m: u32, items: usize, limit: usize },
    #[error("level sink failed: {0}")]
    Sink(String),
}

/// Resource knobs for level generation.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Candidate children held in memory by one generation pass. Levels whose
    /// children exceed this are generated in several hash-sharded passes that
    /// are merged afterwards.
    pub pass_items: usize,
    /// Hard cap on the size of any single level.
    pub max_level_items: usize,
    /// Keep every intermediate list in the returned family instead of only
    /// the requested ones.
    pub keep_intermediate: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { pass_items: 50_000_000, max_level_items: 200_000_000, keep_intermediate: false }
    }
}

/// The well list for `m = n`: exactly `(1, 3, ..., 2n-1)`.
pub fn seed_list(n: usize) -> Result<ForestList, EnumError> {
    let row: Vec<Order> = (0..n as Order).map(|i| 2 * i + 1).collect();
    ForestList::from_rows(n, n as u32, ListKind::Well, ListFilter::default(), [row])
}

/// Well n-path forests of order `(m+1)²` from the well (n-1)- and n-path
/// lists of order `m²`.
pub fn extend_level(
    prev_n_minus_1: Option<&ForestList>,
    prev_n: &ForestList,
) -> Result<ForestList, EnumError> {
    extend_level_filtered(prev_n_minus_1, prev_n, ListFilter::default(), &BuildOptions::default())
}

/// [`extend_level`] keeping only children accepted by `filter`. The parents
/// must cover every parent of an accepted child.
pub fn extend_level_filtered(
    prev_n_minus_1: Option<&ForestList>,
    prev_n: &ForestList,
    filter: ListFilter,
    opts: &BuildOptions,
) -> Result<ForestList, EnumError> {
    let n = prev_n.n();
    let m = prev_n.m();
    if prev_n.kind() != ListKind::Well {
        return Err(EnumError::Inconsistent("parents must be well lists".into()));
    }
    if let Some(p) = prev_n_minus_1 {
        if p.n() + 1 != n || p.m() != m || p.kind() != ListKind::Well {
            return Err(EnumError::Inconsistent(format!(
                "rule-1 parents are ({}, {}), expected ({}, {m})",
                p.n(),
                p.m(),
                n - 1
            )));
        }
    }
    let child = Packing::for_level(n, m + 1)?;
    let step = 2 * m + 1;
    let small = prev_n_minus_1.map_or(0, ForestList::len);
    let estimate = prev_n.len() * n + small;
    let passes = estimate.div_ceil(opts.pass_items.max(1)).max(1);
    if passes > 1 {
        debug!("level (n={n}, m={}): {estimate} candidate children in {passes} passes", m + 1);
    }

    let mut shards = Vec::with_capacity(passes);
    let mut held = 0usize;
    for pass in 0..passes {
        let keep = |key: u128| passes == 1 || shard_of(key, passes) == pass;
        let mut keys: Vec<u128> = prev_n
            .keys()
            .par_chunks(4096)
            .flat_map_iter(|chunk| {
                let parent = prev_n.packing();
                let mut out = Vec::new();
                let mut buf = [0; MAX_PARTS];
                for &k in chunk {
                    parent.unpack(k, &mut buf);
                    let row = &buf[..n];
                    for i in 0..n {
                        // equal parts give the same child; extend the last one
                        if i + 1 < n && row[i] == row[i + 1] {
                            continue;
                        }
                        let mut c = [0; MAX_PARTS];
                        c[..n].copy_from_slice(row);
                        c[i] += step;
                        resort_up(&mut c[..n], i);
                        if filter.accepts(&c[..n]) {
                            let key = child.pack(&c[..n]);
                            if keep(key) {
                                out.push(key);
                            }
                        }
                    }
                }
                out
            })
            .collect();
        if let Some(p) = prev_n_minus_1 {
            let parent = p.packing();
            keys.par_extend(p.keys().par_iter().filter_map(|&k| {
                let mut buf = [0; MAX_PARTS];
                parent.unpack(k, &mut buf);
                let pos = buf[..n - 1].partition_point(|&x| x <= step);
                buf.copy_within(pos..n - 1, pos + 1);
                buf[pos] = step;
                if !filter.accepts(&buf[..n]) {
                    return None;
                }
                let key = child.pack(&buf[..n]);
                keep(key).then_some(key)
            }));
        }
        keys.par_sort_unstable();
        keys.dedup();
        held += keys.len();
        if held > opts.max_level_items {
            return Err(EnumError::BudgetExceeded {
                n,
                m: m + 1,
                items: held,
                limit: opts.max_level_items,
            });
        }
        shards.push(keys);
    }

    let keys = if shards.len() == 1 {
        shards.pop().unwrap_or_default()
    } else {
        let mut merged = Vec::with_capacity(held);
        for item in merge_sorted(shards.into_iter().map(Vec::into_iter).collect()) {
            merged.push(item.map_err(|e| EnumError::Inconsistent(e.to_string()))?);
        }
        merged
    };
    ForestList::from_sorted_keys(n, m + 1, ListKind::Well, filter, keys)
}

fn shard_of(key: u128, passes: usize) -> usize {
    let folded = (key as u64) ^ ((key >> 64) as u64);
    let mixed = folded.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ((u128::from(mixed) * passes as u128) >> 64) as usize
}

/// Which lists to build and how much each may be pruned.
///
/// `needs[(k, m)] = j` means the (k, m) list must contain every well forest
/// with at most `j` parts below the floor; `j ≥ k` means unfiltered.
#[derive(Debug, Clone)]
pub struct FamilyPlan {
    n: usize,
    m_max: u32,
    floor: Option<Order>,
    needs: BTreeMap<(usize, u32), usize>,
    targets: Vec<(usize, u32, usize)>,
}

impl FamilyPlan {
    /// Well n-path lists for every `m ≤ m_max`; with a floor `F`, the target
    /// lists are those with `l_1 ≥ F`.
    pub fn new(n: usize, m_max: u32, floor: Option<Order>) -> Self {
        let j = if floor.is_some() { 0 } else { n };
        let targets = (1..=m_max).map(|m| (n, m, j)).collect();
        let mut plan = Self { n, m_max, floor, needs: BTreeMap::new(), targets };
        plan.propagate();
        plan
    }

    /// Also build the (k, m) list with at most `max_below` parts below the
    /// floor.
    pub fn with_target(mut self, k: usize, m: u32, max_below: usize) -> Self {
        self.targets.push((k, m, max_below));
        self.m_max = self.m_max.max(m);
        self.propagate();
        self
    }

    fn propagate(&mut self) {
        self.needs.clear();
        for &(k, m, j) in &self.targets {
            bump(&mut self.needs, k, m, j.min(k));
        }
        let floor = self.floor;
        for m in (2..=self.m_max).rev() {
            let at_level: Vec<(usize, usize)> = self
                .needs
                .range((0, m)..)
                .filter(|((_, mm), _)| *mm == m)
                .map(|(&(k, _), &j)| (k, j))
                .collect();
            for (k, j) in at_level {
                if k > m as usize {
                    continue;
                }
                let parent_m = m - 1;
                // rule 2
                if k <= parent_m as usize {
                    bump(&mut self.needs, k, parent_m, (j + 1).min(k));
                }
                // rule 1
                if k >= 2 && k - 1 <= parent_m as usize {
                    let new_path_small = floor.is_some_and(|f| 2 * parent_m + 1 < f);
                    let jj = if new_path_small { j.checked_sub(1) } else { Some(j) };
                    if let Some(jj) = jj {
                        bump(&mut self.needs, k - 1, parent_m, jj.min(k - 1));
                    }
                }
            }
        }
    }

    pub fn filter_for(&self, k: usize, m: u32) -> Option<ListFilter> {
        let &j = self.needs.get(&(k, m))?;
        Some(match self.floor {
            Some(f) if j < k => ListFilter::at_most_below(f, j),
            _ => ListFilter::default(),
        })
    }

    fn target_filter(&self, k: usize, j: usize) -> ListFilter {
        match self.floor {
            Some(f) if j == 0 => ListFilter::l1_at_least(f),
            Some(f) if j < k => ListFilter::at_most_below(f, j),
            _ => ListFilter::default(),
        }
    }
}

fn bump(needs: &mut BTreeMap<(usize, u32), usize>, k: usize, m: u32, j: usize) {
    let e = needs.entry((k, m)).or_insert(j);
    *e = (*e).max(j);
}

/// Lists produced by [`build_lists`], keyed by `(paths, m)`.
#[derive(Debug, Clone, Default)]
pub struct ListFamily {
    n: usize,
    floor: Option<Order>,
    lists: BTreeMap<(usize, u32), ForestList>,
    targets: BTreeMap<(usize, u32, usize), ForestList>,
}

impl ListFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn floor(&self) -> Option<Order> {
        self.floor
    }

    /// The requested well list of n-path forests of order `m²` (filtered to
    /// `l_1 ≥ F` when the family has a floor).
    pub fn well(&self, m: u32) -> Option<&ForestList> {
        let j = if self.floor.is_some() { 0 } else { self.n };
        self.targets.get(&(self.n, m, j))
    }

    /// A requested list registered through [`FamilyPlan::with_target`].
    pub fn target(&self, k: usize, m: u32, max_below: usize) -> Option<&ForestList> {
        self.targets.get(&(k, m, max_below))
    }

    /// An intermediate list, when kept.
    pub fn get(&self, k: usize, m: u32) -> Option<&ForestList> {
        self.lists.get(&(k, m))
    }

    pub fn levels(&self) -> impl Iterator<Item = &ForestList> {
        let j = if self.floor.is_some() { 0 } else { self.n };
        self.targets.iter().filter(move |((k, _, jj), _)| *k == self.n && *jj == j).map(|(_, l)| l)
    }
}

/// Builds every well list of `plan`, level by level. `on_target` sees each
/// requested list as soon as it is complete, so a later budget abort leaves
/// the earlier levels with the caller.
pub fn build_family(
    plan: &FamilyPlan,
    opts: &BuildOptions,
    mut on_target: impl FnMut(&ForestList) -> Result<(), EnumError>,
) -> Result<ListFamily, EnumError> {
    let mut family = ListFamily { n: plan.n, floor: plan.floor, ..Default::default() };
    let mut prev: BTreeMap<usize, ForestList> = BTreeMap::new();
    for m in 1..=plan.m_max {
        let mut cur: BTreeMap<usize, ForestList> = BTreeMap::new();
        for k in 1..=plan.n {
            let Some(filter) = plan.filter_for(k, m) else { continue };
            let list = if (m as usize) < k {
                ForestList::empty(k, m, ListKind::Well, filter)?
            } else if m as usize == k {
                let seed = seed_list(k)?;
                seed.retain_rows(ListKind::Well, |r| filter.accepts(r)).with_filter(filter)
            } else {
                let parent = prev.get(&k).ok_or_else(|| {
                    EnumError::Inconsistent(format!("missing parent list ({k}, {})", m - 1))
                })?;
                extend_level_filtered(prev.get(&(k - 1)), parent, filter, opts)?
            };
            debug!("built (n={k}, m={m}) with {} items", list.len());
            cur.insert(k, list);
        }
        for &(k, tm, j) in &plan.targets {
            if tm != m {
                continue;
            }
            let tf = plan.target_filter(k, j);
            let list = cur.get(&k).expect("target level is always planned").view(tf)?;
            if k == plan.n {
                info!("well list n={k} m={m}: {} forests", list.len());
            }
            on_target(&list)?;
            family.targets.insert((k, m, j), list);
        }
        if opts.keep_intermediate {
            for (k, l) in &prev {
                family.lists.insert((*k, m - 1), l.clone());
            }
        }
        prev = cur;
    }
    if opts.keep_intermediate {
        for (k, l) in prev {
            family.lists.insert((k, plan.m_max), l);
        }
    }
    Ok(family)
}

/// Well lists for all `k ≤ n` and `m ≤ m_max`. With `l1_filter = Some(F)`
/// the n-path lists are the views with `l_1 ≥ F` and only the parents those
/// views need are generated.
pub fn build_lists(
    n: usize,
    m_max: u32,
    l1_filter: Option<Order>,
    opts: &BuildOptions,
) -> Result<ListFamily, EnumError> {
    let mut opts = opts.clone();
    if l1_filter.is_none() {
        opts.keep_intermediate = true;
    }
    build_family(&FamilyPlan::new(n, m_max, l1_filter), &opts, |_| Ok(()))
}

/// Every n-tuple of total `m²` accepted by `filter` that is missing from
/// `well`.
pub fn deficient_complement(well: &ForestList, filter: ListFilter) -> Result<ForestList, EnumError> {
    if well.kind() != ListKind::Well {
        return Err(EnumError::Inconsistent("complement needs a well list".into()));
    }
    if !well.filter().covers(&filter, well.n()) {
        return Err(EnumError::Inconsistent(format!(
            "well list filter {:?} does not cover {filter:?}",
            well.filter()
        )));
    }
    let n = well.n();
    let m = well.m();
    let packing = well.packing();
    let wk = well.keys();
    let mut at = 0;
    let mut out = Vec::new();
    let mut parts = Partitions::with_filter(u64::from(m) * u64::from(m), n, &filter);
    while let Some(row) = parts.next_row() {
        let key = packing.pack(row);
        while at < wk.len() && wk[at] < key {
            at += 1;
        }
        if at == wk.len() || wk[at] != key {
            out.push(key);
        }
    }
    ForestList::from_sorted_keys(n, m, ListKind::Deficient, filter, out)
}

impl ForestList {
    pub(crate) fn with_filter(self, filter: ListFilter) -> Self {
        let n = self.n();
        let m = self.m();
        let kind = self.kind();
        ForestList::from_sorted_keys(n, m, kind, filter, self.into_keys())
            .expect("packing already validated")
    }
}
