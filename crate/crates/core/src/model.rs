//! Transactions, the profit table, and per-period aggregates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{DataError, ParamError};
use crate::money::Money;
use crate::ratio::Threshold;

pub type ItemId = u32;
pub type Tid = u64;
pub type PeriodId = u32;

/// Unit profit per item. Profits may be negative (loss leaders) or zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProfitTable {
    entries: BTreeMap<ItemId, Money>,
}

impl ProfitTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous value if `item` was already present.
    pub fn insert(&mut self, item: ItemId, unit_profit: Money) -> Option<Money> {
        self.entries.insert(item, unit_profit)
    }

    pub fn get(&self, item: ItemId) -> Option<Money> {
        self.entries.get(&item).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, Money)> + '_ {
        self.entries.iter().map(|(&i, &p)| (i, p))
    }
}

impl FromIterator<(ItemId, Money)> for ProfitTable {
    fn from_iter<T: IntoIterator<Item = (ItemId, Money)>>(iter: T) -> Self {
        ProfitTable { entries: iter.into_iter().collect() }
    }
}

/// An item occurrence inside a transaction. `profit` is `up(item) * quantity`
/// for profit-table input, or the verbatim per-transaction value for the
/// SPMF-style format (where `quantity` is 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TxItem {
    pub item: ItemId,
    pub quantity: u32,
    pub profit: Money,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransactionRecord {
    pub tid: Tid,
    pub period: PeriodId,
    pub items: Vec<TxItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    tid: Tid,
    period: PeriodId,
    period_idx: usize,
    /// Sorted by item id.
    items: Vec<TxItem>,
    tp: Money,
    rtp: Money,
}

impl Transaction {
    pub fn tid(&self) -> Tid {
        self.tid
    }

    pub fn period(&self) -> PeriodId {
        self.period
    }

    /// Dense index of this transaction's period.
    pub fn period_index(&self) -> usize {
        self.period_idx
    }

    pub fn items(&self) -> &[TxItem] {
        &self.items
    }

    /// Transaction profit: the sum of every item's profit.
    pub fn tp(&self) -> Money {
        self.tp
    }

    /// Redefined transaction profit: the sum of the non-negative item profits.
    pub fn rtp(&self) -> Money {
        self.rtp
    }

    pub fn get(&self, item: ItemId) -> Option<&TxItem> {
        self.items.binary_search_by_key(&item, |e| e.item).ok().map(|idx| &self.items[idx])
    }

    pub fn contains_item(&self, item: ItemId) -> bool {
        self.get(item).is_some()
    }

    pub fn contains(&self, itemset: &ItemSet) -> bool {
        itemset.iter().all(|i| self.contains_item(i))
    }
}

/// An immutable quantitative transaction database with precomputed
/// per-transaction and per-period aggregates.
///
/// Period ids are mapped to dense indices `0..period_count()` in ascending id
/// order; per-period vectors and [`PeriodSet`](crate::PeriodSet)s use those
/// indices.
#[derive(Debug)]
pub struct Database {
    transactions: Vec<Transaction>,
    tid_index: HashMap<Tid, usize>,
    period_ids: Vec<PeriodId>,
    period_index: HashMap<PeriodId, usize>,
    top: Vec<Money>,
    sup: Vec<usize>,
    items: Vec<ItemId>,
    scans: AtomicUsize,
}

impl Database {
    /// Validates the records and computes tp, rtp, top and sup. Transactions
    /// are stored in ascending tid order.
    pub fn from_records(records: Vec<TransactionRecord>) -> Result<Database, DataError> {
        let mut period_ids: Vec<PeriodId> = records.iter().map(|r| r.period).collect();
        period_ids.sort_unstable();
        period_ids.dedup();
        let period_index: HashMap<PeriodId, usize> =
            period_ids.iter().enumerate().map(|(idx, &id)| (id, idx)).collect();

        let mut transactions = Vec::with_capacity(records.len());
        let mut top = vec![Money::ZERO; period_ids.len()];
        let mut sup = vec![0usize; period_ids.len()];
        let mut items: Vec<ItemId> = Vec::new();

        for record in records {
            let TransactionRecord { tid, period, items: mut tx_items } = record;
            tx_items.sort_unstable_by_key(|e| e.item);
            let mut tp = Money::ZERO;
            let mut rtp = Money::ZERO;
            for (pos, entry) in tx_items.iter().enumerate() {
                if pos > 0 && tx_items[pos - 1].item == entry.item {
                    return Err(DataError::DuplicateItem { tid, item: entry.item });
                }
                if entry.quantity == 0 {
                    return Err(DataError::ZeroQuantity { tid, item: entry.item });
                }
                tp = tp.checked_add(entry.profit).ok_or(DataError::Overflow { tid })?;
                if !entry.profit.is_negative() {
                    rtp = rtp.checked_add(entry.profit).ok_or(DataError::Overflow { tid })?;
                }
                items.push(entry.item);
            }
            let period_idx = period_index[&period];
            top[period_idx] = top[period_idx].checked_add(tp).ok_or(DataError::Overflow { tid })?;
            sup[period_idx] += 1;
            transactions.push(Transaction { tid, period, period_idx, items: tx_items, tp, rtp });
        }

        transactions.sort_by_key(|t| t.tid);
        let mut tid_index = HashMap::with_capacity(transactions.len());
        for (idx, t) in transactions.iter().enumerate() {
            if tid_index.insert(t.tid, idx).is_some() {
                return Err(DataError::DuplicateTid(t.tid));
            }
        }
        items.sort_unstable();
        items.dedup();

        Ok(Database {
            transactions,
            tid_index,
            period_ids,
            period_index,
            top,
            sup,
            items,
            scans: AtomicUsize::new(0),
        })
    }

    /// Full pass over the transactions that is counted by [`scan_count`](Self::scan_count).
    pub fn scan(&self) -> std::slice::Iter<'_, Transaction> {
        self.scans.fetch_add(1, Ordering::Relaxed);
        self.transactions.iter()
    }

    pub fn scan_count(&self) -> usize {
        self.scans.load(Ordering::Relaxed)
    }

    /// Uncounted access, for measures and tests.
    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn transaction(&self, tid: Tid) -> Option<&Transaction> {
        self.tid_index.get(&tid).map(|&idx| &self.transactions[idx])
    }

    pub fn tp(&self, tid: Tid) -> Option<Money> {
        self.transaction(tid).map(Transaction::tp)
    }

    pub fn rtp(&self, tid: Tid) -> Option<Money> {
        self.transaction(tid).map(Transaction::rtp)
    }

    /// Distinct item ids appearing in any transaction, ascending.
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn period_count(&self) -> usize {
        self.period_ids.len()
    }

    /// Period ids in dense-index order.
    pub fn period_ids(&self) -> &[PeriodId] {
        &self.period_ids
    }

    pub fn period_index(&self, id: PeriodId) -> Option<usize> {
        self.period_index.get(&id).copied()
    }

    pub fn period_id(&self, idx: usize) -> PeriodId {
        self.period_ids[idx]
    }

    /// `top(h)` by dense index.
    pub fn top_at(&self, idx: usize) -> Money {
        self.top[idx]
    }

    /// `sup(h)` by dense index.
    pub fn sup_at(&self, idx: usize) -> usize {
        self.sup[idx]
    }

    /// Total profit of period `h`; zero for a period id with no transactions.
    pub fn period_profit(&self, h: PeriodId) -> Money {
        self.period_index(h).map_or(Money::ZERO, |idx| self.top[idx])
    }

    /// Number of transactions in period `h`.
    pub fn period_support(&self, h: PeriodId) -> usize {
        self.period_index(h).map_or(0, |idx| self.sup[idx])
    }

    pub fn records(&self) -> Vec<TransactionRecord> {
        self.transactions
            .iter()
            .map(|t| TransactionRecord { tid: t.tid, period: t.period, items: t.items.clone() })
            .collect()
    }
}

impl Clone for Database {
    fn clone(&self) -> Self {
        Database {
            transactions: self.transactions.clone(),
            tid_index: self.tid_index.clone(),
            period_ids: self.period_ids.clone(),
            period_index: self.period_index.clone(),
            top: self.top.clone(),
            sup: self.sup.clone(),
            items: self.items.clone(),
            scans: AtomicUsize::new(0),
        }
    }
}

impl PartialEq for Database {
    fn eq(&self, other: &Database) -> bool {
        self.transactions == other.transactions
    }
}

impl Eq for Database {}

/// A duplicate-free set of items kept in ascending id order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemSet(Vec<ItemId>);

impl ItemSet {
    pub fn new(items: impl IntoIterator<Item = ItemId>) -> Self {
        let mut items: Vec<ItemId> = items.into_iter().collect();
        items.sort_unstable();
        items.dedup();
        ItemSet(items)
    }

    pub fn as_slice(&self) -> &[ItemId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_subset_of(&self, other: &ItemSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }
}

impl FromIterator<ItemId> for ItemSet {
    fn from_iter<T: IntoIterator<Item = ItemId>>(iter: T) -> Self {
        ItemSet::new(iter)
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, item) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

/// Which relative profit an OPPP has to clear.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProfitScope {
    /// `rp(X) = p(X) / top(X)` over all of `os(X)`, plus some period where
    /// `rf(X,h) >= minfre`.
    #[default]
    Global,
    /// Some single period must satisfy both `rf(X,h) >= minfre` and
    /// `rp(X,h) >= minpro`.
    PerPeriod,
}

pub const DEFAULT_PAIR_BUDGET: u64 = 64 * 1024 * 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiningParams {
    pub minfre: Threshold,
    pub minpro: Threshold,
    pub scope: ProfitScope,
    /// Pairwise per-period RTWU check before joining two lists.
    pub prune_pairs: bool,
    /// Skip extensions whose `pp + rpp` bound cannot reach `minpro`.
    pub prune_rpp: bool,
    /// Stop expanding nodes that are frequent in no period.
    pub prune_freq: bool,
    /// The pair table is skipped when `items^2 * periods` exceeds this.
    pub pair_budget: u64,
    pub threads: usize,
}

impl MiningParams {
    pub fn new(minfre: Threshold, minpro: Threshold) -> Result<Self, ParamError> {
        let params = MiningParams {
            minfre,
            minpro,
            scope: ProfitScope::Global,
            prune_pairs: true,
            prune_rpp: true,
            prune_freq: true,
            pair_budget: DEFAULT_PAIR_BUDGET,
            threads: 1,
        };
        params.validate()?;
        Ok(params)
    }

    /// Convenience for decimal spellings, e.g. `MiningParams::parse("0.5", "0.4")`.
    pub fn parse(minfre: &str, minpro: &str) -> Result<Self, ParamError> {
        MiningParams::new(minfre.parse()?, minpro.parse()?)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !self.minfre.is_within_unit_interval() {
            return Err(ParamError::MinfreOutOfRange(self.minfre.to_string()));
        }
        if self.threads == 0 {
            return Err(ParamError::NoThreads);
        }
        Ok(())
    }

    pub fn with_scope(mut self, scope: ProfitScope) -> Self {
        self.scope = scope;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn without_pruning(mut self) -> Self {
        self.prune_pairs = false;
        self.prune_rpp = false;
        self.prune_freq = false;
        self
    }
}
