//! The two-scan, depth-first OPPP miner.
//!
//! Scan one collects singleton RTWU values per period, filters the items that
//! can never reach `minpro`, and fixes the mining order. Scan two builds the
//! initial OPP-lists (and, within a memory budget, the per-period pair RTWU
//! table). The search then walks the set-enumeration tree, joining lists and
//! pruning with three checks:
//!
//! * frequency: no period of `os(X)` reaches `minfre`, so no extension can;
//! * `pp + rpp`: per period, the profit any ≺-extension can still collect;
//! * pair RTWU: per period, an upper bound for every superset of `{x, y}`.
//!
//! Profit bounds compare `bound(h) / top(h)` per period and take the best
//! period. When every `top(h)` is positive, a ratio of summed bounds to
//! summed period profits over any subset of periods never exceeds the best
//! single-period ratio, so the check is valid for supersets whose `os` has
//! shrunk. A period with `top(h) <= 0` defeats that argument and disables the
//! bound (except that a zero-profit period can never qualify on its own in
//! per-period scope).

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{Database, ItemId, ItemSet, MiningParams, PeriodId, ProfitScope, Transaction};
use crate::money::Money;
use crate::opplist::{construct, InitialListBuilder, ItemOrder, OppList};
use crate::period::PeriodSet;
use crate::ratio::{Ratio, Threshold};

/// One discovered pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpppResult {
    pub items: ItemSet,
    /// `p(X)`.
    pub profit: Money,
    /// `top(X)`.
    pub total_period_profit: Money,
    /// `p(X) / top(X)`; `None` only when `top(X)` is zero, which can happen
    /// under per-period scope.
    pub relative_profit: Option<Ratio>,
    /// `os(X)` as period ids.
    pub periods: Vec<PeriodId>,
    /// Periods with `rf(X,h) >= minfre` (and, in per-period scope,
    /// `rp(X,h) >= minpro`).
    pub qualifying_periods: Vec<PeriodId>,
    pub per_period_support: Vec<(PeriodId, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MiningStats {
    pub database_scans: usize,
    pub items: usize,
    pub promising_items: usize,
    pub pair_table_enabled: bool,
    pub pair_table_pairs: usize,
    pub visited_nodes: u64,
    pub constructed_lists: u64,
    pub pruned_by_freq: u64,
    pub pruned_by_rpp: u64,
    pub pruned_by_pairs: u64,
    /// Candidates whose relative profit had a zero denominator.
    pub skipped_zero_top: u64,
    pub peak_resident_lists: u64,
    pub peak_resident_entries: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl MiningStats {
    /// Rough upper estimate of list memory at the high-water mark.
    pub fn peak_memory_bytes(&self) -> u64 {
        self.peak_resident_entries * std::mem::size_of::<crate::opplist::OppEntry>() as u64
    }

    fn absorb(&mut self, other: &MiningStats) {
        self.visited_nodes += other.visited_nodes;
        self.constructed_lists += other.constructed_lists;
        self.pruned_by_freq += other.pruned_by_freq;
        self.pruned_by_rpp += other.pruned_by_rpp;
        self.pruned_by_pairs += other.pruned_by_pairs;
        self.skipped_zero_top += other.skipped_zero_top;
        self.peak_resident_lists = self.peak_resident_lists.max(other.peak_resident_lists);
        self.peak_resident_entries = self.peak_resident_entries.max(other.peak_resident_entries);
    }
}

#[derive(Clone, Debug)]
pub struct MiningOutcome {
    /// Sorted by item ids.
    pub patterns: Vec<OpppResult>,
    pub stats: MiningStats,
}

/// `RTWU({x, y}, h)` for co-occurring pairs of promising items, keyed by
/// their local ranks with the earlier item first.
#[derive(Clone, Debug, Default)]
pub struct PairRtwuTable {
    period_count: usize,
    values: HashMap<(u32, u32), Box<[Money]>>,
}

impl PairRtwuTable {
    pub fn new(period_count: usize) -> Self {
        PairRtwuTable { period_count, values: HashMap::new() }
    }

    /// `row` is a transaction's promising items as `(rank, _)` in rank order.
    pub fn add_transaction(&mut self, row: &[(u32, Money)], period: usize, rtp: Money) {
        for (pos, &(x, _)) in row.iter().enumerate() {
            for &(y, _) in &row[pos + 1..] {
                let slot = self
                    .values
                    .entry((x, y))
                    .or_insert_with(|| vec![Money::ZERO; self.period_count].into_boxed_slice());
                slot[period] += rtp;
            }
        }
    }

    pub fn get(&self, x: u32, y: u32, period: usize) -> Money {
        let key = if x <= y { (x, y) } else { (y, x) };
        self.values.get(&key).map_or(Money::ZERO, |v| v[period])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Singleton statistics from the first database pass, indexed like
/// `db.items()`.
struct ItemScan {
    rtwu: Vec<Money>,
    rtwu_by_period: Vec<Money>,
    periods: Vec<PeriodSet>,
    negative: Vec<bool>,
}

fn scan_items<'a>(db: &Database, transactions: impl Iterator<Item = &'a Transaction>) -> ItemScan {
    let n = db.items().len();
    let p = db.period_count();
    let mut scan = ItemScan {
        rtwu: vec![Money::ZERO; n],
        rtwu_by_period: vec![Money::ZERO; n * p],
        periods: vec![PeriodSet::empty(p); n],
        negative: vec![true; n],
    };
    for t in transactions {
        let h = t.period_index();
        for e in t.items() {
            let idx = db.items().binary_search(&e.item).expect("item of a loaded transaction");
            scan.rtwu[idx] += t.rtp();
            scan.rtwu_by_period[idx * p + h] += t.rtp();
            scan.periods[idx].insert(h);
            scan.negative[idx] &= e.profit.is_negative();
        }
    }
    scan
}

/// Whether any superset could still reach `minpro`, given per-period profit
/// ceilings `(period, bound)`. `frequent` restricts the periods considered in
/// per-period scope.
fn profit_bound_allows(
    db: &Database,
    scope: ProfitScope,
    minpro: Threshold,
    bounds: impl Iterator<Item = (usize, Money)>,
    frequent: Option<&PeriodSet>,
) -> bool {
    for (h, bound) in bounds {
        let top = db.top_at(h);
        match scope {
            ProfitScope::Global => {
                if top <= Money::ZERO {
                    return true;
                }
            }
            ProfitScope::PerPeriod => {
                if frequent.is_some_and(|f| !f.contains(h)) || top == Money::ZERO {
                    continue;
                }
                if top < Money::ZERO {
                    return true;
                }
            }
        }
        if Ratio::new(bound.minor(), top.minor()).expect("positive top").at_least(minpro) {
            return true;
        }
    }
    false
}

fn promising_items(db: &Database, scan: &ItemScan, params: &MiningParams) -> Vec<ItemId> {
    let p = db.period_count();
    db.items()
        .iter()
        .enumerate()
        .filter(|&(idx, _)| {
            let bounds = scan.periods[idx].iter().map(|h| (h, scan.rtwu_by_period[idx * p + h]));
            profit_bound_allows(db, params.scope, params.minpro, bounds, None)
        })
        .map(|(_, &item)| item)
        .collect()
}

/// `I*`: items for which some period of `os({i})` has
/// `RTWU({i},h) / top(h) >= minpro` (or whose periods make the ratio
/// unusable as a bound). Runs its own uncounted pass over `db`.
pub fn filter_singletons(db: &Database, params: &MiningParams) -> Vec<ItemId> {
    let scan = scan_items(db, db.transactions().iter());
    promising_items(db, &scan, params)
}

/// Per-period `(pp + rpp)(X,h) / top(h)` of a list: the ceiling on the
/// relative profit any ≺-extension can reach in that period.
pub fn extension_bounds(list: &OppList, db: &Database) -> Vec<(PeriodId, Option<Ratio>)> {
    list.periods()
        .iter()
        .map(|h| {
            let bound = list.table().at(h).extension_bound();
            (db.period_id(h), Ratio::new(bound.minor(), db.top_at(h).minor()))
        })
        .collect()
}

struct Worker<'a> {
    db: &'a Database,
    params: &'a MiningParams,
    pairs: Option<&'a PairRtwuTable>,
    found: Vec<OpppResult>,
    stats: MiningStats,
    resident_lists: u64,
    resident_entries: u64,
}

impl<'a> Worker<'a> {
    fn new(db: &'a Database, params: &'a MiningParams, pairs: Option<&'a PairRtwuTable>) -> Self {
        Worker {
            db,
            params,
            pairs,
            found: Vec::new(),
            stats: MiningStats::default(),
            resident_lists: 0,
            resident_entries: 0,
        }
    }

    /// Emits the list's itemset if it is an OPPP and returns its frequent
    /// periods.
    fn evaluate(&mut self, list: &OppList) -> PeriodSet {
        let db = self.db;
        let table = list.table();
        let mut frequent = PeriodSet::empty(db.period_count());
        for h in list.periods().iter() {
            let rf = Ratio::new(i64::from(table.at(h).sup), db.sup_at(h) as i64).expect("non-empty period");
            if rf.at_least(self.params.minfre) {
                frequent.insert(h);
            }
        }
        if frequent.is_empty() {
            return frequent;
        }

        let top: Money = list.periods().iter().map(|h| db.top_at(h)).sum();
        let relative_profit = Ratio::new(table.profit().minor(), top.minor());
        let qualifying: Vec<usize> = match self.params.scope {
            ProfitScope::Global => match relative_profit {
                None => {
                    self.stats.skipped_zero_top += 1;
                    Vec::new()
                }
                Some(rp) if rp.at_least(self.params.minpro) => frequent.iter().collect(),
                Some(_) => Vec::new(),
            },
            ProfitScope::PerPeriod => frequent
                .iter()
                .filter(|&h| match Ratio::new(table.at(h).profit().minor(), db.top_at(h).minor()) {
                    None => {
                        self.stats.skipped_zero_top += 1;
                        false
                    }
                    Some(rp) => rp.at_least(self.params.minpro),
                })
                .collect(),
        };
        if !qualifying.is_empty() {
            self.found.push(OpppResult {
                items: list.label(),
                profit: table.profit(),
                total_period_profit: top,
                relative_profit,
                periods: list.periods().iter().map(|h| db.period_id(h)).collect(),
                qualifying_periods: qualifying.into_iter().map(|h| db.period_id(h)).collect(),
                per_period_support: list
                    .periods()
                    .iter()
                    .map(|h| (db.period_id(h), table.at(h).sup as usize))
                    .collect(),
            });
        }
        frequent
    }

    fn extension_allowed(&self, list: &OppList, frequent: &PeriodSet) -> bool {
        let bounds = list.periods().iter().map(|h| (h, list.table().at(h).extension_bound()));
        let coupled = self.params.prune_freq.then_some(frequent);
        profit_bound_allows(self.db, self.params.scope, self.params.minpro, bounds, coupled)
    }

    fn pair_allowed(&self, pairs: &PairRtwuTable, px: &OppList, py: &OppList) -> bool {
        let (x, y) = (px.last_rank() as u32, py.last_rank() as u32);
        let bounds =
            px.periods().iter().filter(|&h| py.periods().contains(h)).map(|h| (h, pairs.get(x, y, h)));
        profit_bound_allows(self.db, self.params.scope, self.params.minpro, bounds, None)
    }

    fn visit(&mut self, prefix: Option<&OppList>, exts: &[OppList], idx: usize) {
        let px = &exts[idx];
        self.stats.visited_nodes += 1;
        let frequent = self.evaluate(px);
        if idx + 1 == exts.len() {
            return;
        }
        if self.params.prune_freq && frequent.is_empty() {
            self.stats.pruned_by_freq += 1;
            return;
        }
        if self.params.prune_rpp && !self.extension_allowed(px, &frequent) {
            self.stats.pruned_by_rpp += 1;
            return;
        }

        let mut children = Vec::new();
        for py in &exts[idx + 1..] {
            if let Some(pairs) = self.pairs {
                if !self.pair_allowed(pairs, px, py) {
                    self.stats.pruned_by_pairs += 1;
                    continue;
                }
            }
            let pxy = construct(prefix, px, py);
            self.stats.constructed_lists += 1;
            if !pxy.is_empty() {
                children.push(pxy);
            }
        }

        let entries: u64 = children.iter().map(|c| c.len() as u64).sum();
        self.resident_lists += children.len() as u64;
        self.resident_entries += entries;
        self.stats.peak_resident_lists = self.stats.peak_resident_lists.max(self.resident_lists);
        self.stats.peak_resident_entries = self.stats.peak_resident_entries.max(self.resident_entries);
        for child in 0..children.len() {
            self.visit(Some(px), &children, child);
        }
        self.resident_lists -= children.len() as u64;
        self.resident_entries -= entries;
    }
}

/// Mines every OPPP of `db` under `params`. The database is scanned exactly
/// twice; the result is sorted by item ids and independent of
/// `params.threads`.
pub fn mine(db: &Database, params: &MiningParams) -> MiningOutcome {
    let started = Instant::now();
    let scans_before = db.scan_count();
    let p = db.period_count();

    let scan = scan_items(db, db.scan());
    let promising = promising_items(db, &scan, params);
    let order = ItemOrder::from_rtwu(promising.iter().map(|&item| {
        let idx = db.items().binary_search(&item).expect("known item");
        (item, scan.rtwu[idx], scan.negative[idx])
    }));
    drop(scan);

    let n = order.len() as u64;
    let pair_table_enabled =
        params.prune_pairs && n.saturating_mul(n).saturating_mul(p as u64) <= params.pair_budget;
    let mut pairs = pair_table_enabled.then(|| PairRtwuTable::new(p));
    let mut builder = InitialListBuilder::new(order.items(), p);
    for (pos, t) in db.scan().enumerate() {
        let row = builder.add(pos as u32, t);
        if let Some(table) = pairs.as_mut() {
            table.add_transaction(row, t.period_index(), t.rtp());
        }
    }
    let lists = builder.finish();

    let mut stats = MiningStats {
        database_scans: db.scan_count() - scans_before,
        items: db.items().len(),
        promising_items: lists.len(),
        pair_table_enabled,
        pair_table_pairs: pairs.as_ref().map_or(0, PairRtwuTable::len),
        ..MiningStats::default()
    };

    let run = |idx: usize| {
        let mut worker = Worker::new(db, params, pairs.as_ref());
        worker.visit(None, &lists, idx);
        (worker.found, worker.stats)
    };
    let parts: Vec<(Vec<OpppResult>, MiningStats)> = if params.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(params.threads).build().expect("thread pool");
        pool.install(|| (0..lists.len()).into_par_iter().map(run).collect())
    } else {
        (0..lists.len()).map(run).collect()
    };

    let mut patterns = Vec::new();
    for (found, part) in parts {
        patterns.extend(found);
        stats.absorb(&part);
    }
    let initial_entries: u64 = lists.iter().map(|l| l.len() as u64).sum();
    stats.peak_resident_lists += lists.len() as u64;
    stats.peak_resident_entries += initial_entries;
    patterns.sort_by(|a, b| a.items.cmp(&b.items));
    stats.wall_time = started.elapsed();
    MiningOutcome { patterns, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::opplist::{build_initial_lists, build_item_order};

    fn params(minfre: &str, minpro: &str) -> MiningParams {
        MiningParams::parse(minfre, minpro).unwrap()
    }

    fn find<'a>(out: &'a MiningOutcome, items: &[ItemId]) -> Option<&'a OpppResult> {
        let key = ItemSet::new(items.iter().copied());
        out.patterns.iter().find(|r| r.items == key)
    }

    #[test]
    fn running_example_contains_e() {
        let db = running_example();
        let out = mine(&db, &params("0.5", "0.4"));
        let e = find(&out, &[E]).expect("{e} is an OPPP");
        assert_eq!(e.profit, Money::units(56));
        assert_eq!(e.total_period_profit, Money::units(117));
        assert_eq!(e.relative_profit, Ratio::new(56, 117));
        assert_eq!(e.periods, vec![1, 2, 3]);
        assert_eq!(e.qualifying_periods, vec![1, 2, 3]);
        assert_eq!(e.per_period_support, vec![(1, 1), (2, 2), (3, 1)]);
        assert!((e.relative_profit.unwrap().as_f64() - 0.479).abs() < 5e-4);
    }

    #[test]
    fn minpro_above_one_yields_nothing() {
        let db = running_example();
        assert!(mine(&db, &params("0", "1.01")).patterns.is_empty());
        assert!(mine(&db, &params("0", "2.0")).patterns.is_empty());
    }

    #[test]
    fn zero_thresholds_keep_every_non_negative_itemset() {
        let db = running_example();
        let out = mine(&db, &params("0", "0"));
        assert!(find(&out, &[B]).is_none());
        assert!(find(&out, &[C, E]).is_some());
        for r in &out.patterns {
            assert!(r.profit >= Money::ZERO, "{} has negative profit", r.items);
        }
        let mut sorted = out.patterns.clone();
        sorted.sort_by(|a, b| a.items.cmp(&b.items));
        assert_eq!(sorted, out.patterns);
    }

    #[test]
    fn singleton_filter() {
        let db = running_example();
        assert_eq!(filter_singletons(&db, &params("0", "0")).len(), 6);
        // RTWU can exceed top because rtp drops negative items; every item
        // reaches 31/31 or more somewhere.
        assert_eq!(filter_singletons(&db, &params("0", "0.99")).len(), 6);
        // Best ratios: a, f 31/31; b 41/35; c, d, e 63/51.
        assert_eq!(filter_singletons(&db, &params("0", "1.2")), vec![C, D, E]);
        assert!(filter_singletons(&db, &params("0", "1.24")).is_empty());
    }

    #[test]
    fn item_in_all_negative_transactions_is_filtered() {
        let pt = running_example_profits();
        let db =
            crate::io::load_transactions("1\t1\t1:1 3:1\n2\t1\t2:3\n".as_bytes(), &pt, Default::default())
                .unwrap();
        let kept = filter_singletons(&db, &params("0", "0.01"));
        assert!(!kept.contains(&B));
        assert!(kept.contains(&A));
    }

    #[test]
    fn extension_bounds_for_c() {
        let db = running_example();
        let order = build_item_order(&db);
        let c =
            build_initial_lists(&db, &order, order.items()).into_iter().find(|l| l.last_item() == C).unwrap();
        assert_eq!(extension_bounds(&c, &db), vec![(1, Ratio::new(33, 35)), (2, Ratio::new(42, 51))]);
        // With minpro 0.95 nothing below {c} survives the rpp bound.
        let p = params("0", "0.95");
        let worker = Worker::new(&db, &p, None);
        let frequent = PeriodSet::full(db.period_count());
        assert!(!worker.extension_allowed(&c, &frequent));
        let p = params("0", "0.9");
        let worker = Worker::new(&db, &p, None);
        assert!(worker.extension_allowed(&c, &frequent));
    }

    #[test]
    fn infrequent_nodes_are_not_expanded() {
        let db = running_example();
        // rf of every item pair stays below 1 in period 1 except {b,c}.
        let out = mine(&db, &params("1", "0"));
        assert!(out.stats.pruned_by_freq > 0);
        for r in &out.patterns {
            assert!(!r.qualifying_periods.is_empty());
        }
    }

    #[test]
    fn two_scans_per_run() {
        let db = running_example();
        let before = db.scan_count();
        let out = mine(&db, &params("0.5", "0.4"));
        assert_eq!(db.scan_count() - before, 2);
        assert_eq!(out.stats.database_scans, 2);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let db = running_example();
        let one = mine(&db, &params("0", "0"));
        let many = mine(&db, &params("0", "0").with_threads(4));
        assert_eq!(one.patterns, many.patterns);
        assert_eq!(one.stats.visited_nodes, many.stats.visited_nodes);
    }

    #[test]
    fn pair_budget_disables_table() {
        let db = running_example();
        let mut p = params("0", "0.1");
        p.pair_budget = 10;
        let out = mine(&db, &p);
        assert!(!out.stats.pair_table_enabled);
        let full = mine(&db, &params("0", "0.1"));
        assert!(full.stats.pair_table_enabled);
        assert_eq!(out.patterns, full.patterns);
    }

    #[test]
    fn pair_table_matches_measures() {
        let db = running_example();
        let order = build_item_order(&db);
        let mut table = PairRtwuTable::new(db.period_count());
        let mut builder = InitialListBuilder::new(order.items(), db.period_count());
        for (pos, t) in db.transactions().iter().enumerate() {
            let row = builder.add(pos as u32, t);
            table.add_transaction(row, t.period_index(), t.rtp());
        }
        let rank = |i| order.rank(i).unwrap() as u32;
        for (x, y) in [(C, E), (A, C), (B, D), (A, F)] {
            for &h in db.period_ids() {
                let expected = crate::measures::rtwu_in_period(&ItemSet::new([x, y]), h, &db);
                let idx = db.period_index(h).unwrap();
                assert_eq!(table.get(rank(x), rank(y), idx), expected);
                assert_eq!(table.get(rank(y), rank(x), idx), expected);
            }
        }
    }

    #[test]
    fn empty_database() {
        let db = Database::from_records(Vec::new()).unwrap();
        let out = mine(&db, &params("0", "0"));
        assert!(out.patterns.is_empty());
        assert_eq!(out.stats.database_scans, 2);
    }
}
