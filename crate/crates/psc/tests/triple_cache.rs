use proptest::prelude::*;
use psc::formats::{parse_triple_cache, triple_cache_text};
use psc_core::coupling::{canonical_key, TripleProductTable};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cache_round_trip_is_bit_exact(values in prop::collection::vec(-1e3..1e3f64, 1..40), l_max in 1usize..6) {
        let mut entries = Vec::new();
        for (i, v) in values.iter().enumerate() {
            let l = |k: usize| (i / (k + 1)) % (l_max + 1);
            let key = canonical_key([(l(0), 0), (l(1), 0), (l(2), 0)]);
            entries.push((key, *v));
        }
        let t = TripleProductTable::from_entries(l_max, entries);
        let back = parse_triple_cache(&triple_cache_text(&t), l_max).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn built_table_round_trips() {
    let t = TripleProductTable::build(4);
    assert_eq!(parse_triple_cache(&triple_cache_text(&t), 4).unwrap(), t);
}
