mod common;

use proptest::prelude::*;

use common::{cut_chain_holds, exhaustive_partition_holds};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cut_chains(seed in any::<u64>()) {
        if let Err(e) = cut_chain_holds(seed) {
            prop_assert!(false, "{}", e);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exhaustive_partitions(seed in any::<u64>()) {
        if let Err(e) = exhaustive_partition_holds(seed) {
            prop_assert!(false, "{}", e);
        }
    }
}
