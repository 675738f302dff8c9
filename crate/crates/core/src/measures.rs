//! Definition-level profit and frequency measures.
//!
//! Every function here evaluates its formula by scanning the database
//! directly. Nothing is cached or derived from the miner's list structures;
//! these are the reference values the miner and its bounds are tested
//! against, and the only arithmetic the oracle uses.

use crate::error::MeasureError;
use crate::model::{Database, ItemSet, PeriodId, Transaction};
use crate::money::Money;
use crate::opplist::ItemOrder;
use crate::period::PeriodSet;
use crate::ratio::Ratio;

fn require_nonempty(x: &ItemSet) -> Result<(), MeasureError> {
    if x.is_empty() {
        Err(MeasureError::EmptyItemset)
    } else {
        Ok(())
    }
}

fn containing<'a>(x: &'a ItemSet, db: &'a Database) -> impl Iterator<Item = &'a Transaction> + 'a {
    db.transactions().iter().filter(move |t| t.contains(x))
}

fn in_period<'a>(
    x: &'a ItemSet,
    h: PeriodId,
    db: &'a Database,
) -> impl Iterator<Item = &'a Transaction> + 'a {
    containing(x, db).filter(move |t| t.period() == h)
}

/// Sum of the item profits of `x` in `tx`, split by sign: `(pp, np)`.
fn signed_parts(x: &ItemSet, tx: &Transaction) -> Result<(Money, Money), MeasureError> {
    require_nonempty(x)?;
    let mut pp = Money::ZERO;
    let mut np = Money::ZERO;
    for item in x.iter() {
        let entry = tx.get(item).ok_or(MeasureError::NotContained(tx.tid()))?;
        pp += entry.profit.positive_part();
        np += entry.profit.negative_part();
    }
    Ok((pp, np))
}

/// `p(X, Tc)`: the summed profit of the members of `x` in `tx`.
pub fn itemset_profit_in_tx(x: &ItemSet, tx: &Transaction) -> Result<Money, MeasureError> {
    signed_parts(x, tx).map(|(pp, np)| pp + np)
}

pub fn positive_profit_in_tx(x: &ItemSet, tx: &Transaction) -> Result<Money, MeasureError> {
    signed_parts(x, tx).map(|(pp, _)| pp)
}

pub fn negative_profit_in_tx(x: &ItemSet, tx: &Transaction) -> Result<Money, MeasureError> {
    signed_parts(x, tx).map(|(_, np)| np)
}

/// `os(X)`: the periods of the transactions containing `x`.
pub fn itemset_periods(x: &ItemSet, db: &Database) -> PeriodSet {
    let mut set = PeriodSet::empty(db.period_count());
    for t in containing(x, db) {
        set.insert(t.period_index());
    }
    set
}

/// Same as [`itemset_periods`] but as sorted period ids.
pub fn itemset_period_ids(x: &ItemSet, db: &Database) -> Vec<PeriodId> {
    itemset_periods(x, db).iter().map(|idx| db.period_id(idx)).collect()
}

fn require_in_os(x: &ItemSet, h: PeriodId, db: &Database) -> Result<(), MeasureError> {
    require_nonempty(x)?;
    if in_period(x, h, db).next().is_none() {
        Err(MeasureError::PeriodNotInOs(h))
    } else {
        Ok(())
    }
}

/// `p(X, h)`; `h` must belong to `os(X)`.
pub fn itemset_profit_in_period(x: &ItemSet, h: PeriodId, db: &Database) -> Result<Money, MeasureError> {
    require_in_os(x, h, db)?;
    in_period(x, h, db).map(|t| itemset_profit_in_tx(x, t)).sum()
}

/// `p(X)` over all periods; zero when `x` never occurs.
pub fn itemset_profit(x: &ItemSet, db: &Database) -> Money {
    containing(x, db).map(|t| itemset_profit_in_tx(x, t).unwrap_or(Money::ZERO)).sum()
}

pub fn positive_profit(x: &ItemSet, db: &Database) -> Money {
    containing(x, db).map(|t| positive_profit_in_tx(x, t).unwrap_or(Money::ZERO)).sum()
}

pub fn negative_profit(x: &ItemSet, db: &Database) -> Money {
    containing(x, db).map(|t| negative_profit_in_tx(x, t).unwrap_or(Money::ZERO)).sum()
}

pub fn positive_profit_in_period(x: &ItemSet, h: PeriodId, db: &Database) -> Money {
    in_period(x, h, db).map(|t| positive_profit_in_tx(x, t).unwrap_or(Money::ZERO)).sum()
}

pub fn negative_profit_in_period(x: &ItemSet, h: PeriodId, db: &Database) -> Money {
    in_period(x, h, db).map(|t| negative_profit_in_tx(x, t).unwrap_or(Money::ZERO)).sum()
}

/// `top(X)`: the summed `tp` of every transaction whose period lies in
/// `os(X)`, whether or not it contains `x`.
pub fn total_period_profit(x: &ItemSet, db: &Database) -> Result<Money, MeasureError> {
    require_nonempty(x)?;
    let os = itemset_periods(x, db);
    if os.is_empty() {
        return Err(MeasureError::EmptyOs);
    }
    Ok(db.transactions().iter().filter(|t| os.contains(t.period_index())).map(Transaction::tp).sum())
}

/// `rp(X) = p(X) / top(X)`, unclamped.
pub fn relative_profit(x: &ItemSet, db: &Database) -> Result<Ratio, MeasureError> {
    let top = total_period_profit(x, db)?;
    Ratio::new(itemset_profit(x, db).minor(), top.minor()).ok_or(MeasureError::ZeroTotalProfit)
}

/// `sup(X, h)`: transactions of period `h` containing `x`.
pub fn support_in_period(x: &ItemSet, h: PeriodId, db: &Database) -> usize {
    in_period(x, h, db).count()
}

/// `rf(X, h) = sup(X, h) / sup(h)`.
pub fn relative_frequency(x: &ItemSet, h: PeriodId, db: &Database) -> Result<Ratio, MeasureError> {
    let period_size = db.transactions().iter().filter(|t| t.period() == h).count();
    Ratio::new(support_in_period(x, h, db) as i64, period_size as i64).ok_or(MeasureError::EmptyPeriod(h))
}

/// `rp(X, h) = p(X, h) / top(h)`.
pub fn relative_profit_in_period(x: &ItemSet, h: PeriodId, db: &Database) -> Result<Ratio, MeasureError> {
    let profit = itemset_profit_in_period(x, h, db)?;
    let top: Money = db.transactions().iter().filter(|t| t.period() == h).map(Transaction::tp).sum();
    Ratio::new(profit.minor(), top.minor()).ok_or(MeasureError::ZeroTotalProfit)
}

/// `RTWU(X)`: summed `rtp` of the transactions containing `x`.
pub fn rtwu(x: &ItemSet, db: &Database) -> Money {
    containing(x, db).map(Transaction::rtp).sum()
}

/// `RTWU(X, h)`.
pub fn rtwu_in_period(x: &ItemSet, h: PeriodId, db: &Database) -> Money {
    in_period(x, h, db).map(Transaction::rtp).sum()
}

/// `rpp(X, Tc)`: non-negative profits of the items of `tx` that are not in
/// `x` and come after every member of `x` under `order`.
pub fn remaining_positive_profit(
    x: &ItemSet,
    tx: &Transaction,
    order: &ItemOrder,
) -> Result<Money, MeasureError> {
    require_nonempty(x)?;
    if !tx.contains(x) {
        return Err(MeasureError::NotContained(tx.tid()));
    }
    let last = x.iter().filter_map(|i| order.rank(i)).max();
    Ok(tx
        .items()
        .iter()
        .filter(|e| !x.contains(e.item) && !e.profit.is_negative())
        .filter(|e| match (order.rank(e.item), last) {
            (Some(r), Some(l)) => r > l,
            _ => false,
        })
        .map(|e| e.profit)
        .sum())
}

/// Everything the OPPP definition needs about one itemset, gathered from a
/// single pass over the database.
#[derive(Clone, Debug)]
pub struct ItemsetProfile {
    pub periods: PeriodSet,
    /// Per dense period index.
    pub support: Vec<usize>,
    pub profit: Vec<Money>,
}

impl ItemsetProfile {
    pub fn compute(x: &ItemSet, db: &Database) -> Self {
        let n = db.period_count();
        let mut profile = ItemsetProfile {
            periods: PeriodSet::empty(n),
            support: vec![0; n],
            profit: vec![Money::ZERO; n],
        };
        for t in containing(x, db) {
            let h = t.period_index();
            profile.periods.insert(h);
            profile.support[h] += 1;
            profile.profit[h] += itemset_profit_in_tx(x, t).unwrap_or(Money::ZERO);
        }
        profile
    }

    pub fn total_profit(&self) -> Money {
        self.profit.iter().sum()
    }

    pub fn top(&self, db: &Database) -> Money {
        self.periods.iter().map(|h| db.top_at(h)).sum()
    }

    pub fn relative_frequency(&self, h: usize, db: &Database) -> Ratio {
        Ratio::new(self.support[h] as i64, db.sup_at(h) as i64).expect("period in os has transactions")
    }

    pub fn relative_profit(&self, db: &Database) -> Option<Ratio> {
        Ratio::new(self.total_profit().minor(), self.top(db).minor())
    }

    pub fn relative_profit_in_period(&self, h: usize, db: &Database) -> Option<Ratio> {
        Ratio::new(self.profit[h].minor(), db.top_at(h).minor())
    }
}
