//! Verification workflows built on the enumerator: the shortest-path bound
//! `L_n` with its induction closure, the search for deficient forests that
//! are not impossibly burnable, per-level counts, and candidate generation
//! and certification for levels too large to enumerate.

use std::collections::BTreeMap;
use std::path::PathBuf;

use log::info;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{
    build_family, deficient_complement, BuildOptions, EnumError, FamilyPlan, ForestList,
    ListFilter, ListKind,
};
use crate::forest::{is_impossibly_burnable, resort_down, resort_up, ForestError, Order, PathForest};
use crate::solver::{decide_exact_budgeted, SolveError};
use crate::store::{ListDir, StoreError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(
        "missing {kind} list for n={n}, m={m}, l1 >= {l1_min} (looked for {stem}); \
         build it with `burnlab enumerate -n {n} -m {m} --l1-min {l1_min} --lists-dir <dir>`"
    )]
    MissingList { n: usize, m: u32, kind: ListKind, l1_min: Order, stem: PathBuf },
    #[error("invalid request: {0}")]
    Invalid(String),
}

/// Proven values of `L_k` for small `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnownL {
    values: BTreeMap<usize, Order>,
}

impl KnownL {
    pub fn empty() -> Self {
        Self { values: BTreeMap::new() }
    }

    /// `L_1, ..., L_7`.
    pub fn standard() -> Self {
        let values = [(1, 1), (2, 3), (3, 18), (4, 26), (5, 36), (6, 46), (7, 56)].into_iter().collect();
        Self { values }
    }

    pub fn with(mut self, k: usize, l: Order) -> Self {
        self.values.insert(k, l);
        self
    }

    pub fn get(&self, k: usize) -> Option<Order> {
        self.values.get(&k).copied()
    }
}

impl Default for KnownL {
    fn default() -> Self {
        Self::standard()
    }
}

/// Deficient n-path lists of order `m²` with `l_1 ≥ floor` for every
/// `m ≤ m_max`, passed to `on_level` as `(well, deficient)`.
pub fn scan_levels(
    n: usize,
    floor: Order,
    m_max: u32,
    opts: &BuildOptions,
    mut on_level: impl FnMut(&ForestList, &ForestList) -> Result<(), PipelineError>,
) -> Result<(), PipelineError> {
    let floor = floor.max(1);
    let plan = FamilyPlan::new(n, m_max, Some(floor));
    let mut failure = None;
    let res = build_family(&plan, opts, |well| {
        let deficient = deficient_complement(well, ListFilter::l1_at_least(floor))?;
        on_level(well, &deficient).map_err(|e| {
            let msg = e.to_string();
            failure = Some(e);
            EnumError::Sink(msg)
        })
    });
    match (res, failure) {
        (_, Some(e)) => Err(e),
        (Err(e), None) => Err(e.into()),
        (Ok(_), None) => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LnStatus {
    ProvedAtDeskScale,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSummary {
    pub m: u32,
    /// Deficient forests with `l_1 ≥ L`.
    pub deficient_at_least_l: usize,
    /// Deficient forests with `l_1 = L − 1`.
    pub deficient_at_l_minus_1: usize,
}

/// A level above the enumerated range where forests whose longest-path
/// reduction falls below the bound were decided one by one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeLevel {
    pub m: u32,
    pub decided: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LnVerification {
    pub n: usize,
    pub candidate_l: Order,
    pub m_verified_up_to: u32,
    pub levels: Vec<LevelSummary>,
    pub exceptional_deficient: Vec<PathForest>,
    pub minimality_witness: Option<PathForest>,
    pub bridged: Vec<BridgeLevel>,
    /// Last level checked directly; every later level follows by reducing
    /// the longest path.
    pub closure_m: Option<u32>,
    pub status: LnStatus,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub build: BuildOptions,
    /// Most forests decided directly on one bridged level.
    pub bridge_limit: usize,
    /// Search-node budget per direct decision.
    pub solve_budget: Option<u64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { build: BuildOptions::default(), bridge_limit: 5_000_000, solve_budget: Some(50_000_000) }
    }
}

/// Every n-path forest of order `m²` has `l_n ≥ ⌈m²/n⌉`; once that minus the
/// reduction step `2m − 1` is at least `l`, reducing the longest path keeps
/// `l_1 ≥ l`. For `m ≥ n` the left side is nondecreasing in `m`.
fn reduction_keeps_floor(n: usize, m: u32, l: Order) -> bool {
    let sq = u64::from(m) * u64::from(m);
    let longest = sq.div_ceil(n as u64);
    longest >= u64::from(2 * m - 1) + u64::from(l)
}

/// Calls `f` on every nondecreasing n-tuple with parts in `[lo, hi]` summing
/// to `total`.
fn for_each_bounded(total: u64, n: usize, lo: Order, hi: Order, f: &mut impl FnMut(&[Order])) {
    fn go(rest: u64, k: usize, lo: Order, hi: Order, row: &mut Vec<Order>, f: &mut impl FnMut(&[Order])) {
        if k == 0 {
            if rest == 0 {
                f(row);
            }
            return;
        }
        let k64 = k as u64;
        if rest < k64 * u64::from(lo) || rest > k64 * u64::from(hi) {
            return;
        }
        let top = u64::from(hi).min(rest / k64) as Order;
        for x in lo..=top {
            row.push(x);
            go(rest - u64::from(x), k - 1, x, hi, row, f);
            row.pop();
        }
    }
    if n > 0 && lo <= hi {
        go(total, n, lo.max(1), hi, &mut Vec::with_capacity(n), f);
    }
}

/// Checks that `candidate_l` is the least bound making every n-path forest
/// with `l_1 ≥ candidate_l` well-burnable.
///
/// Levels `m ≤ m_max` are enumerated. Above that, a forest whose longest
/// path exceeds `2m − 1 + L` reduces to a forest of the previous level with
/// the same bound, so only the remaining forests are decided directly, level
/// by level, until the arithmetic alone guarantees the reduction.
/// Minimality needs a deficient forest with `l_1 = L − 1` among the
/// enumerated levels.
pub fn verify_l(
    n: usize,
    candidate_l: Order,
    m_max: u32,
    opts: &VerifyOptions,
) -> Result<LnVerification, PipelineError> {
    if n < 2 || candidate_l < 1 || m_max < 1 {
        return Err(PipelineError::Invalid(format!(
            "verify_l needs n ≥ 2, L ≥ 1 and m_max ≥ 1 (got n={n}, L={candidate_l}, m_max={m_max})"
        )));
    }
    let l = candidate_l;
    let floor = l.saturating_sub(1).max(1);
    let mut levels = Vec::new();
    let mut exceptional = Vec::new();
    let mut witness: Option<PathForest> = None;
    scan_levels(n, floor, m_max, &opts.build, |well, deficient| {
        let mut at_least = 0;
        let mut below = 0;
        deficient.for_each_row(|row| {
            if row[0] >= l {
                at_least += 1;
                exceptional.push(PathForest::from_sorted_unchecked(row.to_vec()));
            } else if row[0] + 1 == l {
                below += 1;
                if witness.is_none() {
                    witness = Some(PathForest::from_sorted_unchecked(row.to_vec()));
                }
            }
        });
        info!("n={n} m={}: {at_least} deficient with l1 >= {l}, {below} with l1 = {}", well.m(), l - 1);
        levels.push(LevelSummary {
            m: well.m(),
            deficient_at_least_l: at_least,
            deficient_at_l_minus_1: below,
        });
        Ok(())
    })?;

    let mut result = LnVerification {
        n,
        candidate_l: l,
        m_verified_up_to: m_max,
        levels,
        exceptional_deficient: exceptional,
        minimality_witness: witness,
        bridged: Vec::new(),
        closure_m: None,
        status: LnStatus::Inconclusive,
        reason: String::new(),
    };
    if let Some(f) = result.exceptional_deficient.first() {
        result.status = LnStatus::Refuted;
        result.reason = format!("{f} is deficient with l1 >= {l}");
        return Ok(result);
    }

    let mut m = m_max + 1;
    while !(m as usize >= n && reduction_keeps_floor(n, m, l)) {
        let mut todo = Vec::new();
        let hi = l + 2 * m - 2;
        let mut over = false;
        for_each_bounded(u64::from(m) * u64::from(m), n, l, hi, &mut |row| {
            if todo.len() < opts.bridge_limit {
                todo.push(row.to_vec());
            } else {
                over = true;
            }
        });
        if over {
            result.reason = format!("level {m} needs more than {} direct decisions", opts.bridge_limit);
            return Ok(result);
        }
        info!("bridging level {m}: {} forests to decide", todo.len());
        let outcomes: Vec<(Vec<Order>, Result<bool, SolveError>)> = todo
            .into_par_iter()
            .map(|row| {
                let f = PathForest::from_sorted_unchecked(row.clone());
                let r = decide_exact_budgeted(&f, opts.solve_budget).map(|c| c.is_some());
                (row, r)
            })
            .collect();
        let decided = outcomes.len();
        for (row, r) in outcomes {
            match r {
                Ok(true) => {}
                Ok(false) => result.exceptional_deficient.push(PathForest::from_sorted_unchecked(row)),
                Err(SolveError::BudgetExhausted(_)) => {
                    let f = PathForest::from_sorted_unchecked(row);
                    result.reason = format!("could not decide {f} within the search budget");
                    return Ok(result);
                }
                Err(SolveError::Forest(e)) => return Err(e.into()),
            }
        }
        result.bridged.push(BridgeLevel { m, decided });
        if let Some(f) = result.exceptional_deficient.first() {
            result.status = LnStatus::Refuted;
            result.reason = format!("{f} is deficient with l1 >= {l}");
            return Ok(result);
        }
        m += 1;
    }
    result.closure_m = Some(m - 1);

    if l >= 2 && result.minimality_witness.is_none() {
        result.reason = format!("no deficient forest with l1 = {} found up to m = {m_max}", l - 1);
        return Ok(result);
    }
    result.status = LnStatus::ProvedAtDeskScale;
    result.reason = format!(
        "no deficient forest with l1 >= {l} up to m = {}; later levels follow by reduction",
        m - 1
    );
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaLevel {
    pub m: u32,
    pub deficient: usize,
    pub impossibly_burnable: usize,
    pub not_impossible: Vec<PathForest>,
}

/// Deficient forests that escape the impossibility test, level by level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaSearch {
    pub n: usize,
    pub l1_floor: Order,
    pub m_max: u32,
    pub levels: Vec<DeltaLevel>,
}

impl DeltaSearch {
    pub fn total_deficient(&self) -> usize {
        self.levels.iter().map(|l| l.deficient).sum()
    }

    pub fn forests(&self) -> impl Iterator<Item = &PathForest> {
        self.levels.iter().flat_map(|l| &l.not_impossible)
    }
}

/// Deficient n-path forests with `l_1 ≥ l1_floor` and order at most
/// `m_max²` that are not impossibly burnable. An empty result supports
/// `Δ_n ≤ l1_floor` at desk scale; it proves nothing about larger levels.
pub fn delta_search(
    n: usize,
    l1_floor: Order,
    m_max: u32,
    opts: &BuildOptions,
) -> Result<DeltaSearch, PipelineError> {
    if n < 3 {
        return Err(PipelineError::Invalid(format!("delta_search needs n ≥ 3 (got {n})")));
    }
    let mut levels = Vec::new();
    scan_levels(n, l1_floor, m_max, opts, |well, deficient| {
        let m = well.m();
        let mut not_impossible = Vec::new();
        deficient.for_each_row(|row| {
            if !is_impossibly_burnable(m, row) {
                not_impossible.push(PathForest::from_sorted_unchecked(row.to_vec()));
            }
        });
        levels.push(DeltaLevel {
            m,
            deficient: deficient.len(),
            impossibly_burnable: deficient.len() - not_impossible.len(),
            not_impossible,
        });
        Ok(())
    })?;
    Ok(DeltaSearch { n, l1_floor, m_max, levels })
}

/// Path count and shortest-path floor of the seven-path table.
pub const TABLE1_N: usize = 7;
pub const TABLE1_FLOOR: Order = 46;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub m: u32,
    pub well: usize,
    pub deficient: usize,
}

/// Counts for one level of the seven-path table from a stored well list.
pub fn table1_row(lists: &ListDir, m: u32) -> Result<Table1Row, PipelineError> {
    let (n, f) = (TABLE1_N, TABLE1_FLOOR);
    if !lists.exists(n, m, ListKind::Well, f) {
        return Err(PipelineError::MissingList {
            n,
            m,
            kind: ListKind::Well,
            l1_min: f,
            stem: lists.stem(n, m, ListKind::Well, f),
        });
    }
    let well = lists.load(n, m, ListKind::Well, f)?;
    let deficient = deficient_complement(&well, ListFilter::l1_at_least(f))?;
    Ok(Table1Row { m, well: well.len(), deficient: deficient.len() })
}

/// Builds the seven-path table for every `m ≤ m_max`, optionally saving each
/// well list.
pub fn build_table1(
    m_max: u32,
    opts: &BuildOptions,
    save: Option<&ListDir>,
) -> Result<Vec<Table1Row>, PipelineError> {
    let mut rows = Vec::new();
    scan_levels(TABLE1_N, TABLE1_FLOOR, m_max, opts, |well, deficient| {
        if let Some(dir) = save {
            dir.save(well, crate::store::DEFAULT_CHUNK_ROWS)?;
        }
        rows.push(Table1Row { m: well.m(), well: well.len(), deficient: deficient.len() });
        Ok(())
    })?;
    Ok(rows)
}

/// Least possible first-path order after reducing the longest path of an
/// n-path forest of order `(m+1)²`: `⌈(m+1)²/n⌉ − (2m+1)`. `None` when the
/// longest path might be consumed entirely.
pub fn band_lower(n: usize, m: u32) -> Option<Order> {
    let sq = u64::from(m + 1) * u64::from(m + 1);
    let longest = sq.div_ceil(n as u64);
    let step = u64::from(2 * m + 1);
    (longest > step).then(|| (longest - step) as Order)
}

/// Deficient lists at one level feeding [`potentially_deficient_candidates`].
#[derive(Debug, Clone)]
pub struct CandidateInputs {
    pub n: usize,
    pub m: u32,
    pub floor: Order,
    pub band_lo: Order,
    /// Deficient with `l_1 ≥ floor`.
    pub deficient: ForestList,
    /// Deficient with `l_1 ≥ band_lo` and `l_2 ≥ floor`.
    pub band: ForestList,
}

/// Enumerates the deficient lists at level `m` needed to bound the
/// deficient forests of level `m + 1` with `l_1 ≥ floor`.
pub fn candidate_inputs(
    n: usize,
    m: u32,
    floor: Order,
    opts: &BuildOptions,
) -> Result<CandidateInputs, PipelineError> {
    let band_lo = band_lower(n, m)
        .ok_or_else(|| PipelineError::Invalid(format!("level {m} is too small for n = {n}")))?
        .min(floor)
        .max(1);
    let plan = FamilyPlan::new(n, m, Some(floor)).with_target(n, m, 1);
    let family = build_family(&plan, opts, |_| Ok(()))?;
    let missing = || PipelineError::Invalid(format!("planned list (n={n}, m={m}) was not built"));
    let well = family.well(m).ok_or_else(missing)?;
    let wide = family.target(n, m, 1).ok_or_else(missing)?;
    let deficient = deficient_complement(well, ListFilter::l1_at_least(floor))?;
    let band_filter = ListFilter::band(band_lo, floor);
    let band = deficient_complement(&wide.view(band_filter)?, band_filter)?;
    Ok(CandidateInputs { n, m, floor, band_lo, deficient, band })
}

/// Every forest of order `(m+1)²` with `l_1 ≥ bound` that could be deficient:
/// extensions at every component of `deficient_prev`, and extensions at the
/// first component of the members of `low_band` below the bound.
pub fn potentially_deficient_candidates(
    deficient_prev: &ForestList,
    low_band: Option<&ForestList>,
    bound: Order,
) -> Result<ForestList, PipelineError> {
    let (n, m) = (deficient_prev.n(), deficient_prev.m());
    for l in std::iter::once(deficient_prev).chain(low_band) {
        if l.n() != n || l.m() != m || l.kind() != ListKind::Deficient {
            return Err(EnumError::Inconsistent(format!(
                "expected deficient lists at (n={n}, m={m}), got {:?} at (n={}, m={})",
                l.kind(),
                l.n(),
                l.m()
            ))
            .into());
        }
    }
    let step = 2 * m + 1;
    let mut out: Vec<Vec<Order>> = Vec::new();
    let mut extend = |row: &[Order], all: bool| {
        let last = if all { row.len() } else { 1 };
        for i in 0..last {
            if i + 1 < row.len() && row[i] == row[i + 1] && all {
                continue;
            }
            let mut c = row.to_vec();
            c[i] += step;
            resort_up(&mut c, i);
            if c[0] >= bound {
                out.push(c);
            }
        }
    };
    deficient_prev.for_each_row(|row| extend(row, row[0] >= bound));
    if let Some(band) = low_band {
        band.for_each_row(|row| extend(row, row[0] >= bound));
    }
    Ok(ForestList::from_rows(n, m + 1, ListKind::Candidates, ListFilter::l1_at_least(bound), out)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum WellReason {
    /// The `q` largest sizes burn some paths completely (and possibly part
    /// of others); what is left is a forest with fewer paths whose shortest
    /// path meets the known bound.
    KnownBoundPeel { q: u32, remaining_paths: usize },
    /// Reducing `component` gives a forest covered by a complete deficient
    /// list that does not contain it.
    ReductionNotDeficient { component: usize },
    DirectDecision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum Classification {
    ImpossiblyBurnable,
    WellBurnable(WellReason),
    /// Not impossibly burnable, yet the exact search found no burning.
    Deficient,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifiedCandidate {
    pub forest: PathForest,
    pub class: Classification,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CertificationCounts {
    pub candidates: usize,
    pub impossibly_burnable: usize,
    pub well_by_peel: usize,
    pub well_by_reduction: usize,
    pub well_by_decision: usize,
    pub deficient: usize,
    pub undecided: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub n: usize,
    pub m: u32,
    pub counts: CertificationCounts,
    pub items: Vec<CertifiedCandidate>,
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Largest number of top sizes tried by the peel rule.
    pub max_peel: u32,
    pub solve_budget: Option<u64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { max_peel: 3, solve_budget: Some(50_000_000) }
    }
}

/// Classifies each candidate, trying cheap arguments before the exact
/// search. `references` are complete deficient lists one level below.
pub fn certify_candidates(
    candidates: &ForestList,
    known: &KnownL,
    references: &[&ForestList],
    opts: &CertifyOptions,
) -> Result<Certification, PipelineError> {
    let (n, m) = (candidates.n(), candidates.m());
    let refs: Vec<&ForestList> = references
        .iter()
        .copied()
        .filter(|r| r.n() == n && r.m() + 1 == m && r.kind() == ListKind::Deficient)
        .collect();
    if refs.len() != references.len() {
        return Err(PipelineError::Invalid(format!(
            "reference lists must be deficient {n}-path lists at m = {}",
            m.saturating_sub(1)
        )));
    }
    let rows: Vec<Vec<Order>> = candidates.rows().collect();
    let items: Vec<CertifiedCandidate> = rows
        .into_par_iter()
        .map(|row| {
            let class = classify(m, &row, known, &refs, opts);
            CertifiedCandidate { forest: PathForest::from_sorted_unchecked(row), class }
        })
        .collect();
    let mut counts = CertificationCounts { candidates: items.len(), ..Default::default() };
    for it in &items {
        match &it.class {
            Classification::ImpossiblyBurnable => counts.impossibly_burnable += 1,
            Classification::WellBurnable(WellReason::KnownBoundPeel { .. }) => counts.well_by_peel += 1,
            Classification::WellBurnable(WellReason::ReductionNotDeficient { .. }) => {
                counts.well_by_reduction += 1
            }
            Classification::WellBurnable(WellReason::DirectDecision) => counts.well_by_decision += 1,
            Classification::Deficient => counts.deficient += 1,
            Classification::Undecided => counts.undecided += 1,
        }
    }
    Ok(Certification { n, m, counts, items })
}

fn classify(m: u32, row: &[Order], known: &KnownL, refs: &[&ForestList], opts: &CertifyOptions) -> Classification {
    if is_impossibly_burnable(m, row) {
        return Classification::ImpossiblyBurnable;
    }
    for q in 1..=opts.max_peel.min(m.saturating_sub(1)) {
        let mut residual = row.to_vec();
        if let Some(left) = peel(m, q, 0, &mut residual, known) {
            return Classification::WellBurnable(WellReason::KnownBoundPeel { q, remaining_paths: left });
        }
    }
    let step = 2 * m - 1;
    for i in 0..row.len() {
        if row[i] <= step || (i + 1 < row.len() && row[i] == row[i + 1]) {
            continue;
        }
        let mut reduced = row.to_vec();
        reduced[i] -= step;
        resort_down(&mut reduced, i);
        if refs.iter().any(|r| r.filter().accepts(&reduced) && !r.contains(&reduced)) {
            return Classification::WellBurnable(WellReason::ReductionNotDeficient { component: i });
        }
    }
    let forest = PathForest::from_sorted_unchecked(row.to_vec());
    match decide_exact_budgeted(&forest, opts.solve_budget) {
        Ok(Some(_)) => Classification::WellBurnable(WellReason::DirectDecision),
        Ok(None) => Classification::Deficient,
        Err(_) => Classification::Undecided,
    }
}

/// Assigns the sizes `2m−1−2j` for `j = next..q` to paths. At the end, if
/// some path was used up and the rest is a forest of order `(m−q)²` whose
/// shortest path meets the known bound for its path count, returns that
/// path count.
fn peel(m: u32, q: u32, next: u32, residual: &mut [Order], known: &KnownL) -> Option<usize> {
    if next == q {
        let left: Vec<Order> = residual.iter().copied().filter(|&x| x > 0).collect();
        if left.len() == residual.len() || left.is_empty() {
            return None;
        }
        let l1 = *left.iter().min().expect("nonempty");
        return (known.get(left.len())? <= l1).then_some(left.len());
    }
    let v = 2 * m - 1 - 2 * next;
    for i in 0..residual.len() {
        if residual[i] < v || (i > 0 && residual[i] == residual[i - 1]) {
            continue;
        }
        residual[i] -= v;
        let found = peel(m, q, next + 1, residual, known);
        residual[i] += v;
        if found.is_some() {
            return found;
        }
    }
    None
}
