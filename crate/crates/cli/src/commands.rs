use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use log::info;
use serde::Serialize;

use burnlab_core::enumerate::{build_family, FamilyPlan};
use burnlab_core::extremal::StructureReport;
use burnlab_core::pipeline::{CertifyOptions, DeltaSearch, TABLE1_FLOOR, TABLE1_N};
use burnlab_core::store::DEFAULT_CHUNK_ROWS;
use burnlab_core::{
    build_table1, burning_number, candidate_inputs, certify_candidates, decide_burnable, decide_exact,
    deficient_complement, delta_search, extremal_forest, m_n_bruteforce, m_n_closed_form,
    optimal_structure_check, oracle_burning_number, oracle_decide_exact, oracle_enumerate_well,
    potentially_deficient_candidates, table1_row, verify_l, BuildOptions, BurnCertificate, BurnMode,
    Classification, ExtremalParams, ForestList, ImpossibilityReport, KnownL, ListDir, ListFilter,
    ListKind, LnStatus, LnVerification, Order, PathForest, Table1Row, VerifyOptions,
};

use crate::output::{Outcome, EXIT_REFUTED};
use crate::{Command, RunConfig};

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Decide { forest, m } => decide(forest, *m, cfg),
        Command::Bn { forest } => bn(forest, cfg),
        Command::Impossible { forest } => impossible(forest),
        Command::Enumerate { n, m, l1_min, rows } => enumerate(*n, *m, *l1_min, *rows, cfg),
        Command::Deficient { n, m, l1_min } => deficient(*n, *m, *l1_min, cfg),
        Command::Mn { n, construct } => mn(*n, *construct, cfg),
        Command::VerifyL { n, l, m_max } => verify(*n, *l, *m_max, cfg),
        Command::Delta { n, floor, m_max } => delta(*n, *floor, *m_max, cfg),
        Command::Table1 { m, all } => table1(*m, *all, cfg),
        Command::Candidates { n, m, floor } => candidates(*n, *m, *floor, cfg),
    }
}

fn build_options(cfg: &RunConfig) -> BuildOptions {
    let pass_items = cfg.memory_budget as usize;
    let defaults = BuildOptions::default();
    BuildOptions { pass_items, max_level_items: defaults.max_level_items.max(pass_items), ..defaults }
}

fn lists_dir(cfg: &RunConfig) -> Option<ListDir> {
    cfg.lists_dir.as_ref().map(ListDir::new)
}

fn blocks_text(out: &mut String, forest: &PathForest, cert: &BurnCertificate) {
    for (l, block) in forest.orders().iter().zip(&cert.blocks) {
        let parts: Vec<String> = block.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "  {l} <= {}", parts.join("+"));
    }
}

#[derive(Serialize)]
struct DecideJson<'a> {
    forest: &'a PathForest,
    m: u32,
    burnable: bool,
    mode: BurnMode,
    certificate: Option<&'a Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agrees: Option<bool>,
}

fn decide(forest: &PathForest, m: Option<u32>, cfg: &RunConfig) -> Result<Outcome> {
    let default_m = forest.ceil_sqrt_total();
    let m = m.unwrap_or(default_m);
    let exact = u64::from(m) * u64::from(m) == forest.total();
    let (mode, cert) = if exact {
        (BurnMode::Exact, decide_exact(forest)?)
    } else {
        (BurnMode::Covering, decide_burnable(forest, m))
    };
    let burnable = cert.is_some();
    let oracle_agrees = if cfg.oracle {
        let oracle = if exact {
            oracle_decide_exact(forest)?.is_some()
        } else {
            oracle_burning_number(forest)? <= m
        };
        Some(oracle == burnable)
    } else {
        None
    };

    let mut text = String::new();
    let verdict = match (burnable, m == default_m) {
        (true, true) => "well-burnable".to_string(),
        (false, true) => "deficient".to_string(),
        (true, false) => format!("burnable in {m} rounds"),
        (false, false) => format!("not burnable in {m} rounds"),
    };
    let _ = writeln!(text, "{forest}: {verdict} (m={m}, {mode})");
    if let Some(c) = &cert {
        blocks_text(&mut text, forest, c);
    }
    if let Some(a) = oracle_agrees {
        let _ = writeln!(text, "oracle: {}", if a { "agrees" } else { "DISAGREES" });
    }
    let json = DecideJson {
        forest,
        m,
        burnable,
        mode,
        certificate: cert.as_ref().map(|c| &c.blocks),
        oracle_agrees,
    };
    let out = Outcome::new(&json, text)?;
    Ok(if oracle_agrees == Some(false) { out.with_code(EXIT_REFUTED) } else { out })
}

#[derive(Serialize)]
struct BnJson<'a> {
    forest: &'a PathForest,
    burning_number: u32,
    ceil_sqrt: u32,
    well_burnable: bool,
    certificate: &'a Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agrees: Option<bool>,
}

fn bn(forest: &PathForest, cfg: &RunConfig) -> Result<Outcome> {
    let (b, cert) = burning_number(forest);
    let ceil = forest.ceil_sqrt_total();
    let oracle_agrees = if cfg.oracle { Some(oracle_burning_number(forest)? == b) } else { None };
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{forest}: burning number {b} (ceil sqrt {ceil}, {})",
        if b <= ceil { "well-burnable" } else { "deficient" }
    );
    blocks_text(&mut text, forest, &cert);
    if let Some(a) = oracle_agrees {
        let _ = writeln!(text, "oracle: {}", if a { "agrees" } else { "DISAGREES" });
    }
    let json = BnJson {
        forest,
        burning_number: b,
        ceil_sqrt: ceil,
        well_burnable: b <= ceil,
        certificate: &cert.blocks,
        oracle_agrees,
    };
    let out = Outcome::new(&json, text)?;
    Ok(if oracle_agrees == Some(false) { out.with_code(EXIT_REFUTED) } else { out })
}

#[derive(Serialize)]
struct ImpossibleJson<'a> {
    forest: &'a PathForest,
    #[serde(flatten)]
    report: &'a ImpossibilityReport,
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(",")
    }
}

fn impossible(forest: &PathForest) -> Result<Outcome> {
    let report = forest.impossibility_report()?;
    let o = forest.orders();
    let mut text = String::new();
    let _ = writeln!(text, "{forest} (m={})", report.m);
    let _ = writeln!(text, "t = {} (sum {})", join(&report.t), report.sum_t);
    let _ = writeln!(text, "paths with t >= 4: {}", join(report.set_a.iter().map(|&i| o[i])));
    let _ = writeln!(text, "paths with t <= 3: {}", join(report.set_b.iter().map(|&i| o[i])));
    let _ = writeln!(text, "impossibly burnable: {}", if report.impossibly_burnable { "yes" } else { "no" });
    Outcome::new(&ImpossibleJson { forest, report: &report }, text)
}

/// The well n-path list of order m² with `l_1 ≥ l1_min`, loaded when stored
/// and built (then stored) otherwise.
fn well_list(n: usize, m: u32, l1_min: Order, cfg: &RunConfig) -> Result<ForestList> {
    let dir = lists_dir(cfg);
    if let Some(d) = &dir {
        if d.exists(n, m, ListKind::Well, l1_min) {
            info!("loading {}", d.stem(n, m, ListKind::Well, l1_min).display());
            return Ok(d.load(n, m, ListKind::Well, l1_min)?);
        }
    }
    let floor = (l1_min > 0).then_some(l1_min);
    let plan = FamilyPlan::new(n, m, floor);
    let family = build_family(&plan, &build_options(cfg), |_| Ok(()))?;
    let list = family.well(m).cloned().ok_or_else(|| anyhow!("level {m} was not built"))?;
    if let Some(d) = &dir {
        let files = d.save(&list, DEFAULT_CHUNK_ROWS)?;
        info!("saved {} chunk(s) under {}", files.len(), d.root().display());
    }
    Ok(list)
}

fn oracle_check(list: &ForestList, l1_min: Order) -> Result<bool> {
    let oracle = oracle_enumerate_well(list.n(), list.m())?;
    let expected: Vec<Vec<Order>> = oracle.rows().filter(|r| r[0] >= l1_min).collect();
    Ok(expected == list.rows().collect::<Vec<_>>())
}

#[derive(Serialize)]
struct ListJson {
    n: usize,
    m: u32,
    kind: ListKind,
    l1_min: Order,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<Vec<Vec<Order>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agrees: Option<bool>,
}

fn enumerate(n: usize, m: u32, l1_min: Order, rows: bool, cfg: &RunConfig) -> Result<Outcome> {
    let list = well_list(n, m, l1_min, cfg)?;
    let oracle_agrees = if cfg.oracle { Some(oracle_check(&list, l1_min)?) } else { None };
    let mut text = format!("n={n} m={m} l1>={l1_min}: {} well-burnable forests\n", list.len());
    if rows {
        for f in list.forests() {
            let _ = writeln!(text, "{f}");
        }
    }
    if let Some(a) = oracle_agrees {
        let _ = writeln!(text, "oracle: {}", if a { "agrees" } else { "DISAGREES" });
    }
    let json = ListJson {
        n,
        m,
        kind: ListKind::Well,
        l1_min,
        count: list.len(),
        rows: rows.then(|| list.rows().collect()),
        oracle_agrees,
    };
    let out = Outcome::new(&json, text)?;
    Ok(if oracle_agrees == Some(false) { out.with_code(EXIT_REFUTED) } else { out })
}

#[derive(Serialize)]
struct DeficientRow {
    forest: PathForest,
    impossibly_burnable: bool,
}

#[derive(Serialize)]
struct DeficientJson {
    n: usize,
    m: u32,
    l1_min: Order,
    count: usize,
    rows: Vec<DeficientRow>,
}

fn deficient(n: usize, m: u32, l1_min: Order, cfg: &RunConfig) -> Result<Outcome> {
    let well = well_list(n, m, l1_min, cfg)?;
    let list = deficient_complement(&well, ListFilter::l1_at_least(l1_min))?;
    if let Some(d) = lists_dir(cfg) {
        d.save(&list, DEFAULT_CHUNK_ROWS)?;
    }
    let rows: Vec<DeficientRow> = list
        .forests()
        .map(|f| {
            let impossibly_burnable = f.impossibility_report().map(|r| r.impossibly_burnable).unwrap_or(false);
            DeficientRow { forest: f, impossibly_burnable }
        })
        .collect();
    let mut text = format!("n={n} m={m} l1>={l1_min}: {} deficient forests\n", rows.len());
    for r in &rows {
        let tag = if r.impossibly_burnable { "impossibly burnable" } else { "not impossibly burnable" };
        let _ = writeln!(text, "{}  {tag}", r.forest);
    }
    Outcome::new(&DeficientJson { n, m, l1_min, count: rows.len(), rows }, text)
}

#[derive(Serialize)]
struct Construction {
    params: ExtremalParams,
    forest: PathForest,
    structure: StructureReport,
}

#[derive(Serialize)]
struct OracleMn {
    value: u64,
    witness: PathForest,
    agrees: bool,
}

#[derive(Serialize)]
struct MnJson {
    n: usize,
    m_n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    construction: Option<Construction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleMn>,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn mn(n: usize, construct: bool, cfg: &RunConfig) -> Result<Outcome> {
    let value = m_n_closed_form(n)?;
    let mut text = format!("M_{n} = {value}\n");
    let construction = if construct {
        let (params, forest) = extremal_forest(n)?;
        let structure = optimal_structure_check(n, &forest)?;
        let _ = writeln!(text, "x0 = {}, m = {}", params.x0, params.m);
        let _ = writeln!(text, "forest {forest}");
        let _ = writeln!(text, "t = {}", join(&structure.t));
        let _ = writeln!(text, "short side all t=3: {}", yes_no(structure.b_side_all_three));
        let _ = writeln!(
            text,
            "long side all t=4: {}{}",
            yes_no(structure.a_side_all_four),
            if structure.a_side_binding { "" } else { " (informational below 8 paths)" }
        );
        let _ = writeln!(text, "structure check: {}", if structure.passed { "pass" } else { "FAIL" });
        Some(Construction { params, forest, structure })
    } else {
        None
    };
    let oracle = if cfg.oracle {
        let r = m_n_bruteforce(n, None)?;
        let agrees = r.value == value;
        let _ = writeln!(
            text,
            "search: {} (witness {}), {}",
            r.value,
            r.witness,
            if agrees { "agrees" } else { "DISAGREES" }
        );
        Some(OracleMn { value: r.value, witness: r.witness, agrees })
    } else {
        None
    };
    let refuted = oracle.as_ref().is_some_and(|o| !o.agrees)
        || construction.as_ref().is_some_and(|c| !c.structure.passed);
    let out = Outcome::new(&MnJson { n, m_n: value, construction, oracle }, text)?;
    Ok(if refuted { out.with_code(EXIT_REFUTED) } else { out })
}

fn status_str(s: LnStatus) -> &'static str {
    match s {
        LnStatus::ProvedAtDeskScale => "proved-at-desk-scale",
        LnStatus::Refuted => "refuted",
        LnStatus::Inconclusive => "inconclusive",
    }
}

fn verify(n: usize, l: Order, m_max: u32, cfg: &RunConfig) -> Result<Outcome> {
    let opts = VerifyOptions { build: build_options(cfg), ..VerifyOptions::default() };
    let r: LnVerification = verify_l(n, l, m_max, &opts)?;
    let mut text = format!("n={n} L={l} m_max={m_max}: {}\n", status_str(r.status));
    let _ = writeln!(text, "{:>4} {:>14} {:>14}", "m", format!("l1>={l}"), format!("l1={}", l.saturating_sub(1)));
    for lv in &r.levels {
        if lv.deficient_at_least_l + lv.deficient_at_l_minus_1 > 0 {
            let _ = writeln!(text, "{:>4} {:>14} {:>14}", lv.m, lv.deficient_at_least_l, lv.deficient_at_l_minus_1);
        }
    }
    if let Some(w) = &r.minimality_witness {
        let _ = writeln!(text, "minimality witness: {w}");
    }
    for b in &r.bridged {
        let _ = writeln!(text, "bridged level {}: {} forests decided directly", b.m, b.decided);
    }
    if let Some(c) = r.closure_m {
        let _ = writeln!(text, "closure: m = {c}");
    }
    for f in r.exceptional_deficient.iter().take(20) {
        let _ = writeln!(text, "deficient: {f}");
    }
    let _ = writeln!(text, "{}", r.reason);
    let code = if r.status == LnStatus::Refuted { EXIT_REFUTED } else { 0 };
    Ok(Outcome::new(&r, text)?.with_code(code))
}

#[derive(Serialize)]
struct DeltaJson<'a> {
    #[serde(flatten)]
    search: &'a DeltaSearch,
    total_deficient: usize,
    not_impossible: usize,
}

fn delta(n: usize, floor: Order, m_max: u32, cfg: &RunConfig) -> Result<Outcome> {
    let d = delta_search(n, floor, m_max, &build_options(cfg))?;
    let mut text = format!("n={n} l1>={floor} m<={m_max}\n");
    let _ = writeln!(text, "{:>4} {:>10} {:>12}", "m", "deficient", "impossible");
    for lv in d.levels.iter().filter(|lv| lv.deficient > 0) {
        let _ = writeln!(text, "{:>4} {:>10} {:>12}", lv.m, lv.deficient, lv.impossibly_burnable);
    }
    let escaped: Vec<&PathForest> = d.forests().collect();
    let _ = writeln!(text, "total deficient: {}", d.total_deficient());
    if escaped.is_empty() {
        let _ = writeln!(text, "every deficient forest is impossibly burnable");
    } else {
        for f in &escaped {
            let _ = writeln!(text, "not impossibly burnable: {f}");
        }
    }
    let json = DeltaJson { search: &d, total_deficient: d.total_deficient(), not_impossible: escaped.len() };
    Outcome::new(&json, text)
}

#[derive(Serialize)]
struct Table1Json {
    n: usize,
    l1_min: Order,
    rows: Vec<Table1Row>,
}

fn table1(m: u32, all: bool, cfg: &RunConfig) -> Result<Outcome> {
    let dir = lists_dir(cfg);
    let wanted: Vec<u32> = if all { (1..=m).collect() } else { vec![m] };
    let stored = dir.as_ref().is_some_and(|d| {
        wanted.iter().all(|&k| d.exists(TABLE1_N, k, ListKind::Well, TABLE1_FLOOR))
    });
    let rows: Vec<Table1Row> = if let (true, Some(d)) = (stored, &dir) {
        wanted.iter().map(|&k| table1_row(d, k)).collect::<Result<_, _>>()?
    } else {
        let built = build_table1(m, &build_options(cfg), dir.as_ref())?;
        built.into_iter().filter(|r| wanted.contains(&r.m)).collect()
    };
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(text, "m={} well={} deficient={}", r.m, r.well, r.deficient);
    }
    Outcome::new(&Table1Json { n: TABLE1_N, l1_min: TABLE1_FLOOR, rows }, text)
}

#[derive(Serialize)]
struct CandidatesJson {
    n: usize,
    m: u32,
    floor: Order,
    source_m: u32,
    source_deficient: usize,
    source_band: usize,
    band_lo: Order,
    counts: burnlab_core::pipeline::CertificationCounts,
    deficient: Vec<PathForest>,
    undecided: Vec<PathForest>,
}

fn candidates(n: usize, m: u32, floor: Option<Order>, cfg: &RunConfig) -> Result<Outcome> {
    let known = KnownL::standard();
    let floor = match floor {
        Some(f) => f,
        None => known
            .get(n.saturating_sub(1))
            .with_context(|| format!("no known bound for {} paths; pass --floor", n.saturating_sub(1)))?,
    };
    if m < 2 {
        bail!("candidates need m ≥ 2");
    }
    let opts = build_options(cfg);
    let inputs = candidate_inputs(n, m - 1, floor, &opts)?;
    let cand = potentially_deficient_candidates(&inputs.deficient, Some(&inputs.band), floor)?;
    let cert = certify_candidates(
        &cand,
        &known,
        &[&inputs.deficient, &inputs.band],
        &CertifyOptions::default(),
    )?;
    let pick = |want: fn(&Classification) -> bool| -> Vec<PathForest> {
        cert.items.iter().filter(|c| want(&c.class)).map(|c| c.forest.clone()).collect()
    };
    let deficient = pick(|c| matches!(c, Classification::Deficient));
    let undecided = pick(|c| matches!(c, Classification::Undecided));
    let c = &cert.counts;
    let mut text = format!(
        "n={n} m={m} l1>={floor}: {} candidates from level {} ({} deficient, {} in band l1>={})\n",
        c.candidates,
        m - 1,
        inputs.deficient.len(),
        inputs.band.len(),
        inputs.band_lo
    );
    let _ = writeln!(text, "impossibly burnable: {}", c.impossibly_burnable);
    let _ = writeln!(text, "well (peel): {}", c.well_by_peel);
    let _ = writeln!(text, "well (reduction): {}", c.well_by_reduction);
    let _ = writeln!(text, "well (direct): {}", c.well_by_decision);
    let _ = writeln!(text, "deficient: {}", c.deficient);
    let _ = writeln!(text, "undecided: {}", c.undecided);
    for f in &deficient {
        let _ = writeln!(text, "deficient: {f}");
    }
    for f in &undecided {
        let _ = writeln!(text, "undecided: {f}");
    }
    let json = CandidatesJson {
        n,
        m,
        floor,
        source_m: m - 1,
        source_deficient: inputs.deficient.len(),
        source_band: inputs.band.len(),
        band_lo: inputs.band_lo,
        counts: cert.counts.clone(),
        deficient,
        undecided,
    };
    Outcome::new(&json, text)
}
