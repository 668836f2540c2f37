//! Well-burnability of path forests: a sumset solver, exhaustive oracles,
//! list enumeration, the extremal family and the bound-verification pipeline.

pub mod enumerate;
pub mod extremal;
pub mod forest;
pub mod oracle;
pub mod pipeline;
pub mod solver;
pub mod store;

pub use enumerate::{
    build_family, build_lists, deficient_complement, extend_level, seed_list, BuildOptions,
    EnumError, FamilyPlan, Floor, ForestList, ListFamily, ListFilter, ListKind, Partitions,
};
pub use forest::{b_required, top_odd_sum, ForestError, ImpossibilityReport, Order, PathForest, SquareSide};
pub use oracle::{oracle_burning_number, oracle_decide_exact, oracle_enumerate_well, OracleError};
pub use solver::{
    burning_number, decide_burnable, decide_exact, decide_exact_budgeted, is_well_burnable,
    verify_certificate, BurnCertificate, BurnMode, CertificateDefect, SolveError, WellBurnability,
};
pub use store::{merge_chunks, read_list, write_list, ListDir, StoreError};
pub use extremal::{
    extremal_forest, m_n_bruteforce, m_n_closed_form, optimal_structure_check, BruteForceResult,
    ExtremalError, ExtremalParams, StructureReport,
};
pub use pipeline::{
    build_table1, candidate_inputs, certify_candidates, delta_search, potentially_deficient_candidates,
    table1_row, verify_l, Certification, Classification, DeltaSearch, KnownL, LnStatus, LnVerification,
    PipelineError, Table1Row, VerifyOptions,
};
