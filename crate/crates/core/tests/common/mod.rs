//! Strategies and property bodies shared by the property tests and the
//! acceptance run.
#![allow(dead_code)]

use burnlab_core::store::{read_list, write_list};
use burnlab_core::{
    b_required, decide_exact, verify_certificate, BurnMode, ForestList, ListFilter, ListKind,
    Partitions, PathForest,
};
use proptest::prelude::*;
use proptest::sample::{subsequence, Index};
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

/// A forest of order `m²` with at most `n_max` paths, as cut points of
/// `[0, m²]`.
pub fn square_forest(m_max: u32, n_max: usize) -> impl Strategy<Value = (u32, PathForest)> {
    (2..=m_max, 1..=n_max)
        .prop_flat_map(|(m, n)| {
            let n = n.min(m as usize);
            (Just(m), subsequence((1..m * m).collect::<Vec<_>>(), n - 1))
        })
        .prop_map(|(m, cuts)| {
            let mut last = 0;
            let mut parts = Vec::new();
            for c in cuts.into_iter().chain([m * m]) {
                parts.push(c - last);
                last = c;
            }
            (m, PathForest::canonicalize(&parts).unwrap())
        })
}

/// `B_m(l_i) ≡ l_i` for every path and `Σ B_m(l_i) ≡ m`, both mod 2.
pub fn parity((m, f): &(u32, PathForest)) -> Check {
    let report = f.impossibility_report().unwrap();
    for (&t, &l) in report.t.iter().zip(f.orders()) {
        prop_assert_eq!(t % 2, l % 2);
        prop_assert_eq!(t, b_required(*m, u64::from(l)).unwrap());
    }
    prop_assert_eq!(report.sum_t % 2, u64::from(*m % 2));
    Ok(())
}

/// Extending any path and reducing the grown path gives the forest back.
pub fn extend_reduce(((m, f), pick): &((u32, PathForest), Index)) -> Check {
    let i = pick.index(f.n());
    let grown = f.extend(i).unwrap();
    prop_assert_eq!(grown.total(), u64::from(m + 1).pow(2));
    let target = f.orders()[i] + 2 * m + 1;
    let j = grown.orders().iter().position(|&l| l == target).unwrap();
    prop_assert_eq!(&grown.reduce(j).unwrap(), f);
    Ok(())
}

/// Every certificate passes the independent checker, blocks share the parity
/// of their path, and no block is shorter than its `B_m` requirement.
pub fn certificate_sound((m, f): &(u32, PathForest)) -> Check {
    if let Some(cert) = decide_exact(f).unwrap() {
        prop_assert_eq!(cert.mode, BurnMode::Exact);
        prop_assert_eq!(cert.m, *m);
        prop_assert_eq!(verify_certificate(f, &cert), Ok(()));
        for (block, &l) in cert.blocks.iter().zip(f.orders()) {
            prop_assert_eq!(block.len() % 2, l as usize % 2);
            prop_assert!(block.len() as u32 >= b_required(*m, u64::from(l)).unwrap());
        }
    }
    Ok(())
}

pub type StoreCase = ((usize, u32), Vec<bool>, usize, u32);

pub fn store_case() -> impl Strategy<Value = StoreCase> {
    (
        (2usize..=4, 4u32..=9),
        proptest::collection::vec(any::<bool>(), 200),
        1usize..40,
        0u32..4,
    )
}

/// A random subset of a level, written in chunks, reads back identically.
pub fn store_round_trip(((n, m), keep, chunk_rows, l1_min): &StoreCase) -> Check {
    let filter = ListFilter::l1_at_least(*l1_min);
    let rows: Vec<Vec<u32>> = Partitions::with_filter(u64::from(m * m), *n, &filter)
        .zip(keep.iter().cycle())
        .filter(|(_, &k)| k)
        .map(|(r, _)| r)
        .collect();
    let list = ForestList::from_rows(*n, *m, ListKind::Deficient, filter, rows).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("list");
    write_list(&list, &stem, *chunk_rows).unwrap();
    prop_assert_eq!(read_list(&stem).unwrap(), list);
    Ok(())
}
