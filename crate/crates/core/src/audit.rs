//! Exhaustive checks of the profit bounds the miner relies on, evaluated
//! with [`measures`](crate::measures) over every itemset up to a given size.

use std::fmt;

use crate::measures::{
    itemset_periods, itemset_profit, itemset_profit_in_period, itemset_profit_in_tx, negative_profit,
    negative_profit_in_period, negative_profit_in_tx, positive_profit, positive_profit_in_period,
    positive_profit_in_tx, remaining_positive_profit, rtwu, rtwu_in_period, support_in_period,
};
use crate::model::{Database, ItemId, ItemSet};
use crate::money::Money;
use crate::opplist::{build_item_order, ItemOrder};
use crate::period::PeriodSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    /// `np <= p <= pp` per transaction, period and database.
    Sandwich,
    /// `RTWU(X,h) >= p(X,h)` and `RTWU(X) >= p(X)`.
    RtwuBound,
    /// `X ⊂ Y` implies `RTWU(X,h) >= RTWU(Y,h)` and `RTWU(X) >= RTWU(Y)`.
    RtwuAntiMonotone,
    /// `X ⊂ Y` implies `sup(X,h) >= sup(Y,h)`.
    SupportAntiMonotone,
    /// `os(X)` is contained in the intersection of its members' periods.
    PeriodSubset,
    /// For every ≺-extension `Y` of `X` and every transaction containing
    /// `Y`: `p(Y,T) <= pp(X,T) + rpp(X,T)`.
    RppBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub check: Check,
    pub itemset: ItemSet,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on {{{}}}: {}", self.check, self.itemset, self.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct AuditReport {
    pub itemsets_checked: usize,
    pub violations: Vec<Violation>,
}

/// All itemsets over `items` with between 1 and `max_len` members.
pub fn itemsets_up_to(items: &[ItemId], max_len: usize) -> Vec<ItemSet> {
    fn extend(
        items: &[ItemId],
        start: usize,
        max_len: usize,
        current: &mut Vec<ItemId>,
        out: &mut Vec<ItemSet>,
    ) {
        for i in start..items.len() {
            current.push(items[i]);
            out.push(ItemSet::new(current.iter().copied()));
            if current.len() < max_len {
                extend(items, i + 1, max_len, current, out);
            }
            current.pop();
        }
    }
    let mut out = Vec::new();
    extend(items, 0, max_len, &mut Vec::new(), &mut out);
    out
}

struct Auditor<'a> {
    db: &'a Database,
    order: ItemOrder,
    violations: Vec<Violation>,
}

impl Auditor<'_> {
    fn fail(&mut self, check: Check, x: &ItemSet, detail: String) {
        self.violations.push(Violation { check, itemset: x.clone(), detail });
    }

    fn sandwich(&mut self, x: &ItemSet) {
        let db = self.db;
        for t in db.transactions().iter().filter(|t| t.contains(x)) {
            let p = itemset_profit_in_tx(x, t).expect("contained");
            let pp = positive_profit_in_tx(x, t).expect("contained");
            let np = negative_profit_in_tx(x, t).expect("contained");
            if !(np <= p && p <= pp) {
                self.fail(Check::Sandwich, x, format!("tid {}: {np} <= {p} <= {pp}", t.tid()));
            }
        }
        for h in itemset_periods(x, db).iter().map(|h| db.period_id(h)) {
            let p = itemset_profit_in_period(x, h, db).expect("period in os");
            let (pp, np) = (positive_profit_in_period(x, h, db), negative_profit_in_period(x, h, db));
            if !(np <= p && p <= pp) {
                self.fail(Check::Sandwich, x, format!("period {h}: {np} <= {p} <= {pp}"));
            }
            let bound = rtwu_in_period(x, h, db);
            if bound < p {
                self.fail(Check::RtwuBound, x, format!("period {h}: RTWU {bound} < p {p}"));
            }
        }
        let (p, pp, np) = (itemset_profit(x, db), positive_profit(x, db), negative_profit(x, db));
        if !(np <= p && p <= pp) {
            self.fail(Check::Sandwich, x, format!("database: {np} <= {p} <= {pp}"));
        }
        if rtwu(x, db) < p {
            self.fail(Check::RtwuBound, x, format!("RTWU {} < p {p}", rtwu(x, db)));
        }
    }

    fn periods(&mut self, x: &ItemSet) {
        let db = self.db;
        let mut members = PeriodSet::full(db.period_count());
        for item in x.iter() {
            members = members.intersection(&itemset_periods(&ItemSet::new([item]), db));
        }
        let os = itemset_periods(x, db);
        if os.iter().any(|h| !members.contains(h)) {
            self.fail(Check::PeriodSubset, x, format!("os {os:?} not within {members:?}"));
        }
    }

    fn superset(&mut self, x: &ItemSet, y: &ItemSet) {
        let db = self.db;
        if rtwu(x, db) < rtwu(y, db) {
            self.fail(Check::RtwuAntiMonotone, x, format!("RTWU below superset {{{y}}}"));
        }
        for &h in db.period_ids() {
            if rtwu_in_period(x, h, db) < rtwu_in_period(y, h, db) {
                self.fail(Check::RtwuAntiMonotone, x, format!("period {h}: RTWU below superset {{{y}}}"));
            }
            if support_in_period(x, h, db) < support_in_period(y, h, db) {
                self.fail(
                    Check::SupportAntiMonotone,
                    x,
                    format!("period {h}: support below superset {{{y}}}"),
                );
            }
        }
    }

    fn rpp(&mut self, x: &ItemSet, y: &ItemSet) {
        let db = self.db;
        for t in db.transactions().iter().filter(|t| t.contains(y)) {
            let p = itemset_profit_in_tx(y, t).expect("contained");
            let bound = positive_profit_in_tx(x, t).expect("contained")
                + remaining_positive_profit(x, t, &self.order).expect("contained");
            if p > bound {
                self.fail(Check::RppBound, x, format!("tid {}: p({{{y}}}) {p} > pp + rpp {bound}", t.tid()));
            }
        }
    }

    fn is_extension(&self, x: &ItemSet, y: &ItemSet) -> bool {
        let last = x.iter().filter_map(|i| self.order.rank(i)).max();
        y.iter()
            .filter(|&i| !x.contains(i))
            .all(|i| matches!((self.order.rank(i), last), (Some(r), Some(l)) if r > l))
    }
}

/// Runs every [`Check`] over all itemsets of up to `max_len` items. Superset
/// relations are checked between sizes `k` and `k + 1`; the rpp bound is
/// checked for every ≺-extension within the size limit.
pub fn audit(db: &Database, max_len: usize) -> AuditReport {
    let mut auditor = Auditor { db, order: build_item_order(db), violations: Vec::new() };
    let sets = itemsets_up_to(db.items(), max_len);
    for x in &sets {
        auditor.sandwich(x);
        auditor.periods(x);
    }
    for x in &sets {
        for y in &sets {
            if y.len() <= x.len() || !x.is_subset_of(y) {
                continue;
            }
            if y.len() == x.len() + 1 {
                auditor.superset(x, y);
            }
            if auditor.is_extension(x, y) {
                auditor.rpp(x, y);
            }
        }
    }
    AuditReport { itemsets_checked: sets.len(), violations: auditor.violations }
}

/// Money-valued helper for callers that want the bound directly.
pub fn extension_ceiling(x: &ItemSet, db: &Database) -> Money {
    let order = build_item_order(db);
    db.transactions()
        .iter()
        .filter(|t| t.contains(x))
        .map(|t| {
            positive_profit_in_tx(x, t).expect("contained")
                + remaining_positive_profit(x, t, &order).expect("contained")
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn subset_enumeration_sizes() {
        let items = [1, 2, 3, 4, 5, 6];
        assert_eq!(itemsets_up_to(&items, 1).len(), 6);
        assert_eq!(itemsets_up_to(&items, 2).len(), 6 + 15);
        assert_eq!(itemsets_up_to(&items, 6).len(), 63);
    }

    #[test]
    fn running_example_is_clean() {
        let report = audit(&running_example(), 4);
        assert_eq!(report.itemsets_checked, 6 + 15 + 20 + 15);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn ceiling_of_c() {
        // pp(c) + rpp(c) = 40 + 35.
        assert_eq!(extension_ceiling(&ItemSet::new([C]), &running_example()), Money::units(75));
    }
}
