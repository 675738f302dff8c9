//! OPP-lists and OFU±-tables.
//!
//! An OPP-list holds one `(tid, pp, np, rpp, period)` entry per transaction
//! containing its itemset, and its OFU±-table keeps the support and column
//! sums of those entries globally and per period. Lists of longer itemsets
//! are joined from shorter ones without touching the database.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::model::{Database, ItemId, ItemSet, Transaction};
use crate::money::Money;
use crate::period::PeriodSet;

/// The mining order: items with non-negative profit first, then items that
/// only ever have negative profit; within each class ascending RTWU, ties
/// broken by ascending item id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ItemOrder {
    items: Vec<ItemId>,
    rank: HashMap<ItemId, usize>,
}

impl ItemOrder {
    /// Builds the order from `(item, rtwu, is_negative)` triples.
    pub fn from_rtwu(entries: impl IntoIterator<Item = (ItemId, Money, bool)>) -> Self {
        let mut keyed: Vec<(bool, Money, ItemId)> =
            entries.into_iter().map(|(item, rtwu, negative)| (negative, rtwu, item)).collect();
        keyed.sort_unstable();
        let items: Vec<ItemId> = keyed.into_iter().map(|(_, _, item)| item).collect();
        let rank = items.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        ItemOrder { items, rank }
    }

    pub fn rank(&self, item: ItemId) -> Option<usize> {
        self.rank.get(&item).copied()
    }

    /// Items from first to last.
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sorts `items` by this order; unranked items go last by id.
    pub fn sort(&self, items: &mut [ItemId]) {
        items.sort_unstable_by_key(|&i| (self.rank(i).unwrap_or(usize::MAX), i));
    }
}

/// Computes singleton RTWU values and the negative class with its own pass
/// over the database. An item is negative when every occurrence of it has a
/// negative profit; zero-profit items count as positive.
pub fn build_item_order(db: &Database) -> ItemOrder {
    let mut stats: HashMap<ItemId, (Money, bool)> = HashMap::new();
    for t in db.transactions() {
        for e in t.items() {
            let slot = stats.entry(e.item).or_insert((Money::ZERO, true));
            slot.0 += t.rtp();
            slot.1 &= e.profit.is_negative();
        }
    }
    ItemOrder::from_rtwu(stats.into_iter().map(|(item, (rtwu, neg))| (item, rtwu, neg)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OppEntry {
    /// Position of the transaction in the database (ascending tid order).
    pub tx: u32,
    pub pp: Money,
    pub np: Money,
    pub rpp: Money,
    /// Dense period index.
    pub period: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PeriodAggregate {
    pub sup: u32,
    pub pp: Money,
    pub np: Money,
    pub rpp: Money,
}

impl PeriodAggregate {
    pub fn profit(&self) -> Money {
        self.pp + self.np
    }

    /// `pp + rpp`, the profit ceiling for ≺-extensions.
    pub fn extension_bound(&self) -> Money {
        self.pp + self.rpp
    }
}

/// Support and column sums of an OPP-list, in total and per period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OfuTable {
    pub sup: u32,
    pub pp: Money,
    pub np: Money,
    pub rpp: Money,
    pub by_period: Vec<PeriodAggregate>,
}

impl OfuTable {
    pub fn new(period_count: usize) -> Self {
        OfuTable {
            sup: 0,
            pp: Money::ZERO,
            np: Money::ZERO,
            rpp: Money::ZERO,
            by_period: vec![PeriodAggregate::default(); period_count],
        }
    }

    fn add(&mut self, e: &OppEntry) {
        self.sup += 1;
        self.pp += e.pp;
        self.np += e.np;
        self.rpp += e.rpp;
        let slot = &mut self.by_period[e.period as usize];
        slot.sup += 1;
        slot.pp += e.pp;
        slot.np += e.np;
        slot.rpp += e.rpp;
    }

    pub fn profit(&self) -> Money {
        self.pp + self.np
    }

    pub fn at(&self, period: usize) -> &PeriodAggregate {
        &self.by_period[period]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OppList {
    /// Members in mining order; the last one is the most recent extension.
    items: Vec<ItemId>,
    /// Builder-local rank of the last item, used for pair lookups.
    last_rank: u32,
    entries: Vec<OppEntry>,
    table: OfuTable,
    periods: PeriodSet,
}

impl OppList {
    fn empty(items: Vec<ItemId>, last_rank: u32, period_count: usize) -> Self {
        OppList {
            items,
            last_rank,
            entries: Vec::new(),
            table: OfuTable::new(period_count),
            periods: PeriodSet::empty(period_count),
        }
    }

    fn push(&mut self, entry: OppEntry) {
        self.table.add(&entry);
        self.periods.insert(entry.period as usize);
        self.entries.push(entry);
    }

    pub fn label(&self) -> ItemSet {
        ItemSet::new(self.items.iter().copied())
    }

    /// Members in mining order.
    pub fn ordered_items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn last_item(&self) -> ItemId {
        *self.items.last().expect("lists are never unlabeled")
    }

    pub(crate) fn last_rank(&self) -> usize {
        self.last_rank as usize
    }

    pub fn entries(&self) -> &[OppEntry] {
        &self.entries
    }

    pub fn table(&self) -> &OfuTable {
        &self.table
    }

    /// `os` of the label: the periods with at least one entry.
    pub fn periods(&self) -> &PeriodSet {
        &self.periods
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Entries resolved to `(tid, pp, np, rpp, period id)`.
    pub fn rows(&self, db: &Database) -> Vec<(u64, Money, Money, Money, u32)> {
        self.entries
            .iter()
            .map(|e| {
                let t = &db.transactions()[e.tx as usize];
                (t.tid(), e.pp, e.np, e.rpp, t.period())
            })
            .collect()
    }

    /// Tab-separated dump with a `tid pp np rpp period` header.
    pub fn write_tsv<W: Write>(&self, db: &Database, mut out: W) -> io::Result<()> {
        writeln!(out, "tid\tpp\tnp\trpp\tperiod")?;
        for (tid, pp, np, rpp, period) in self.rows(db) {
            writeln!(out, "{tid}\t{pp}\t{np}\t{rpp}\t{period}")?;
        }
        Ok(())
    }
}

/// Builds the 1-item lists of an eligible item set from a stream of
/// transactions, one transaction at a time.
pub struct InitialListBuilder {
    slot: HashMap<ItemId, u32>,
    lists: Vec<OppList>,
    row: Vec<(u32, Money)>,
}

impl InitialListBuilder {
    /// `eligible` must already be sorted by the mining order; list `k` of the
    /// result belongs to `eligible[k]`.
    pub fn new(eligible: &[ItemId], period_count: usize) -> Self {
        InitialListBuilder {
            slot: eligible.iter().enumerate().map(|(k, &i)| (i, k as u32)).collect(),
            lists: eligible
                .iter()
                .enumerate()
                .map(|(k, &i)| OppList::empty(vec![i], k as u32, period_count))
                .collect(),
            row: Vec::new(),
        }
    }

    /// Appends the entries of `t` (at database position `tx`) and returns its
    /// eligible items as `(local rank, profit)` in mining order.
    pub fn add(&mut self, tx: u32, t: &Transaction) -> &[(u32, Money)] {
        self.row.clear();
        self.row.extend(t.items().iter().filter_map(|e| self.slot.get(&e.item).map(|&k| (k, e.profit))));
        self.row.sort_unstable_by_key(|&(k, _)| k);
        let mut remaining = Money::ZERO;
        for &(k, profit) in self.row.iter().rev() {
            self.lists[k as usize].push(OppEntry {
                tx,
                pp: profit.positive_part(),
                np: profit.negative_part(),
                rpp: remaining,
                period: t.period_index() as u32,
            });
            remaining += profit.positive_part();
        }
        &self.row
    }

    pub fn finish(self) -> Vec<OppList> {
        self.lists
    }
}

/// One OPP-list per eligible item, in mining order. `rpp` only counts
/// eligible items.
pub fn build_initial_lists(db: &Database, order: &ItemOrder, eligible: &[ItemId]) -> Vec<OppList> {
    let mut sorted = eligible.to_vec();
    order.sort(&mut sorted);
    let mut builder = InitialListBuilder::new(&sorted, db.period_count());
    for (pos, t) in db.transactions().iter().enumerate() {
        builder.add(pos as u32, t);
    }
    builder.finish()
}

/// Joins the lists of `P ∪ {x}` and `P ∪ {y}` (with `x` before `y`) into the
/// list of `P ∪ {x, y}`. `prefix` is the list of `P`, or `None` when `P` is
/// empty.
pub fn construct(prefix: Option<&OppList>, pa: &OppList, pb: &OppList) -> OppList {
    debug_assert!(is_sorted(pa) && is_sorted(pb), "OPP-list entries must be tid-sorted");
    let period_count = pa.table.by_period.len();
    let mut items = pa.items.clone();
    items.push(pb.last_item());
    let mut out = OppList::empty(items, pb.last_rank, period_count);

    let (a, b) = (&pa.entries, &pb.entries);
    let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        let (ea, eb) = (&a[i], &b[j]);
        if ea.tx < eb.tx {
            i += 1;
        } else if ea.tx > eb.tx {
            j += 1;
        } else {
            let (pp, np) = match prefix {
                Some(p) => {
                    let pe = &p.entries;
                    while k < pe.len() && pe[k].tx < ea.tx {
                        k += 1;
                    }
                    let e = pe.get(k).filter(|e| e.tx == ea.tx).expect("prefix entry for a joined tid");
                    (ea.pp + eb.pp - e.pp, ea.np + eb.np - e.np)
                }
                None => (ea.pp + eb.pp, ea.np + eb.np),
            };
            out.push(OppEntry { tx: ea.tx, pp, np, rpp: eb.rpp, period: ea.period });
            i += 1;
            j += 1;
        }
    }
    out
}

fn is_sorted(list: &OppList) -> bool {
    list.entries.windows(2).all(|w| w[0].tx < w[1].tx)
}

/// Builds the list of an arbitrary itemset by successive joins, with `rpp`
/// taken over every item of the database.
pub fn list_for_itemset(db: &Database, order: &ItemOrder, itemset: &ItemSet) -> Option<OppList> {
    if itemset.is_empty() || itemset.iter().any(|i| order.rank(i).is_none()) {
        return None;
    }
    let mut wanted = itemset.as_slice().to_vec();
    order.sort(&mut wanted);
    let all = build_initial_lists(db, order, order.items());
    let mut exts: Vec<OppList> = all.into_iter().filter(|l| itemset.contains(l.last_item())).collect();
    let mut prefix: Option<OppList> = None;
    while exts.len() > 1 {
        let head = exts.remove(0);
        exts = exts.iter().map(|e| construct(prefix.as_ref(), &head, e)).collect();
        prefix = Some(head);
    }
    exts.pop()
}
