//! Shared fixtures for the criterion benches in `benches/`.

use burnlab_core::PathForest;

/// Forests with known answers, from easy to the hardest exact decisions
/// the benches time.
pub fn decision_fixtures() -> Vec<(&'static str, PathForest)> {
    [
        ("well_3", "1,3,5"),
        ("deficient_3", "8,13,15"),
        ("well_5", "20,20,20,30,31"),
        ("deficient_7", "45,45,45,45,72,74,74"),
        ("well_7_m20", "46,46,46,46,50,80,86"),
        ("extremal_6", "45,47,47,74,74,74"),
    ]
    .into_iter()
    .map(|(name, s)| (name, s.parse().expect("fixture parses")))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_square() {
        for (name, f) in decision_fixtures() {
            assert!(f.square_side().is_ok(), "{name}");
        }
    }
}
