//! Property tests of the encoders and drivers against brute-force oracles.

mod common;

use proptest::prelude::*;

use common::synth::{exhaustive_case, label_count_case, miter_case, symmetry_case};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn label_count_matches_brute_force(seed in any::<u64>()) {
        label_count_case(seed)?;
    }

    #[test]
    fn miter_is_valid_iff_labeling_is_equivalent(seed in any::<u64>()) {
        miter_case(seed)?;
    }

    #[test]
    fn symmetry_breaking_only_removes_commuted_copies(seed in any::<u64>()) {
        symmetry_case(seed)?;
    }

    #[test]
    fn exhaustive_search_agrees_with_synthesis(seed in any::<u64>()) {
        exhaustive_case(seed)?;
    }
}
