//! Randomized structural properties, 1000 cases each.

mod support;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_is_a_congruence_invariant(seed in any::<u64>()) {
        prop_assert_eq!(support::check_canonical_congruence(seed), Ok(()));
    }

    #[test]
    fn balls_compose(seed in any::<u64>()) {
        prop_assert_eq!(support::check_ball_semigroup(seed), Ok(()));
    }

    #[test]
    fn local_stats_marginals_agree(seed in any::<u64>()) {
        prop_assert_eq!(support::check_marginals(seed), Ok(()));
    }

    #[test]
    fn matching_counts_sum_to_factorial(seed in any::<u64>()) {
        prop_assert_eq!(support::check_matching_total(seed), Ok(()));
    }
}
