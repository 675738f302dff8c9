use op3m_core::audit::audit;
use op3m_core::measures::itemset_periods;
use op3m_core::opplist::{build_item_order, list_for_itemset};
use op3m_core::oracle::{diff, enumerate, DEFAULT_ITEM_CAP};
use op3m_core::synth::{fuzz_database, FuzzLimits};
use op3m_core::{mine, Database, ItemSet, MiningParams, OpppResult, ProfitScope, TransactionRecord};
use proptest::prelude::*;

fn thresholds() -> impl Strategy<Value = MiningParams> {
    (
        prop::sample::select(vec!["0", "0.2", "0.5", "1"]),
        prop::sample::select(vec!["0", "0.1", "0.3", "0.6"]),
        prop::bool::ANY,
    )
        .prop_map(|(f, p, per_period)| {
            let scope = if per_period { ProfitScope::PerPeriod } else { ProfitScope::Global };
            MiningParams::parse(f, p).unwrap().with_scope(scope)
        })
}

fn db() -> impl Strategy<Value = Database> {
    any::<u64>().prop_map(|seed| fuzz_database(seed, FuzzLimits::default()))
}

fn relabel(db: &Database, map: impl Fn(u32) -> u32) -> Database {
    let records = db
        .records()
        .into_iter()
        .map(|mut r| {
            for e in &mut r.items {
                e.item = map(e.item);
            }
            r
        })
        .collect();
    Database::from_records(records).unwrap()
}

fn relabel_results(results: &[OpppResult], map: impl Fn(u32) -> u32) -> Vec<OpppResult> {
    let mut out: Vec<OpppResult> = results
        .iter()
        .map(|r| OpppResult { items: ItemSet::new(r.items.iter().map(&map)), ..r.clone() })
        .collect();
    out.sort_by(|a, b| a.items.cmp(&b.items));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn miner_matches_oracle(db in db(), params in thresholds()) {
        let mined = mine(&db, &params).patterns;
        let expected = enumerate(&db, &params, DEFAULT_ITEM_CAP).unwrap().patterns;
        let d = diff(&mined, &expected);
        prop_assert!(d.is_empty(), "{}", d);
    }

    #[test]
    fn pruning_is_output_neutral(db in db(), params in thresholds()) {
        let full = mine(&db, &params);
        let variants = [
            MiningParams { prune_pairs: false, ..params.clone() },
            MiningParams { prune_rpp: false, ..params.clone() },
            MiningParams { prune_freq: false, ..params.clone() },
            params.clone().without_pruning(),
        ];
        for variant in &variants {
            let out = mine(&db, variant);
            prop_assert_eq!(&out.patterns, &full.patterns);
            prop_assert!(full.stats.visited_nodes <= out.stats.visited_nodes);
        }
    }

    #[test]
    fn bounds_hold_for_small_itemsets(db in db()) {
        let report = audit(&db, 4);
        prop_assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn list_periods_match_definition(db in db()) {
        let order = build_item_order(&db);
        for x in op3m_core::audit::itemsets_up_to(db.items(), 3) {
            let os = itemset_periods(&x, &db);
            match list_for_itemset(&db, &order, &x) {
                Some(list) => prop_assert_eq!(list.periods(), &os),
                None => prop_assert!(os.is_empty()),
            }
        }
    }

    #[test]
    fn thread_count_is_invisible(db in db(), params in thresholds(), threads in 2usize..6) {
        let one = mine(&db, &params);
        let many = mine(&db, &params.clone().with_threads(threads));
        prop_assert_eq!(one.patterns, many.patterns);
    }

    #[test]
    fn oracle_ignores_item_names(db in db(), params in thresholds(), shift in 1u32..1000) {
        let n = db.items().iter().copied().max().unwrap_or(0) + 1;
        // Reverses the id order and shifts it.
        let map = move |i: u32| (n - i) + shift;
        let base = enumerate(&db, &params, DEFAULT_ITEM_CAP).unwrap().patterns;
        let renamed = enumerate(&relabel(&db, map), &params, DEFAULT_ITEM_CAP).unwrap().patterns;
        prop_assert_eq!(renamed, relabel_results(&base, map));
        let mined = mine(&relabel(&db, map), &params).patterns;
        prop_assert_eq!(mined, relabel_results(&base, map));
    }

    #[test]
    fn oracle_ignores_record_order(db in db(), params in thresholds()) {
        let mut records: Vec<TransactionRecord> = db.records();
        records.reverse();
        let shuffled = Database::from_records(records).unwrap();
        let a = enumerate(&db, &params, DEFAULT_ITEM_CAP).unwrap().patterns;
        let b = enumerate(&shuffled, &params, DEFAULT_ITEM_CAP).unwrap().patterns;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn frequency_is_anti_monotone_on_results(db in db(), params in thresholds()) {
        let out = mine(&db, &params).patterns;
        for r in &out {
            prop_assert!(!r.qualifying_periods.is_empty());
            prop_assert!(r.qualifying_periods.iter().all(|h| r.periods.contains(h)));
            prop_assert_eq!(r.periods.len(), r.per_period_support.len());
        }
    }
}

#[test]
fn corrupted_results_are_caught() {
    let db = fuzz_database(11, FuzzLimits::default());
    let params = MiningParams::parse("0", "0").unwrap();
    let mut mined = mine(&db, &params).patterns;
    assert!(!mined.is_empty());
    mined[0].qualifying_periods.clear();
    let expected = enumerate(&db, &params, DEFAULT_ITEM_CAP).unwrap().patterns;
    let d = diff(&mined, &expected);
    assert_eq!(d.mismatched.len(), 1);
    assert_eq!(d.mismatched[0].fields, vec!["qualifying_periods"]);
}
