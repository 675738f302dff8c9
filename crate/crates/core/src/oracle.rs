//! Exhaustive reference miner for small databases.
//!
//! Every non-empty subset of the item universe is evaluated straight from the
//! OPPP definition through [`ItemsetProfile`]. No OPP-lists, orders, bounds or
//! RTWU values are involved, so the output can be used to check the miner.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::OracleError;
use crate::measures::ItemsetProfile;
use crate::miner::OpppResult;
use crate::model::{Database, ItemSet, MiningParams, ProfitScope};
use crate::ratio::{Ratio, Threshold};

pub const DEFAULT_ITEM_CAP: usize = 20;

#[derive(Clone, Debug)]
pub struct OracleReport {
    /// Sorted by item ids.
    pub patterns: Vec<OpppResult>,
    /// Subsets evaluated, occurring or not.
    pub enumerated_count: u64,
}

fn check_cap(db: &Database, cap: usize) -> Result<(), OracleError> {
    let items = db.items().len();
    if items > cap || items >= 63 {
        return Err(OracleError::TooManyItems { items, cap });
    }
    Ok(())
}

fn subset(db: &Database, mask: u64) -> ItemSet {
    ItemSet::new(
        db.items().iter().enumerate().filter(|&(bit, _)| mask & (1 << bit) != 0).map(|(_, &item)| item),
    )
}

/// `None` for `minpro` means frequency alone decides.
fn judge(
    items: &ItemSet,
    profile: &ItemsetProfile,
    db: &Database,
    minfre: Threshold,
    minpro: Option<(Threshold, ProfitScope)>,
) -> Option<OpppResult> {
    let frequent: Vec<usize> =
        profile.periods.iter().filter(|&h| profile.relative_frequency(h, db).at_least(minfre)).collect();
    if frequent.is_empty() {
        return None;
    }
    let relative_profit = profile.relative_profit(db);
    let qualifying: Vec<usize> = match minpro {
        None => frequent,
        Some((minpro, ProfitScope::Global)) => match relative_profit {
            Some(rp) if rp.at_least(minpro) => frequent,
            _ => return None,
        },
        Some((minpro, ProfitScope::PerPeriod)) => frequent
            .into_iter()
            .filter(|&h| profile.relative_profit_in_period(h, db).is_some_and(|rp| rp.at_least(minpro)))
            .collect(),
    };
    if qualifying.is_empty() {
        return None;
    }
    Some(OpppResult {
        items: items.clone(),
        profit: profile.total_profit(),
        total_period_profit: profile.top(db),
        relative_profit,
        periods: profile.periods.iter().map(|h| db.period_id(h)).collect(),
        qualifying_periods: qualifying.into_iter().map(|h| db.period_id(h)).collect(),
        per_period_support: profile.periods.iter().map(|h| (db.period_id(h), profile.support[h])).collect(),
    })
}

/// Profiles of every occurring subset, computed once so that many threshold
/// pairs can be evaluated cheaply.
pub struct SubsetTable {
    entries: Vec<(ItemSet, ItemsetProfile)>,
    enumerated: u64,
}

impl SubsetTable {
    pub fn build(db: &Database, cap: usize) -> Result<Self, OracleError> {
        check_cap(db, cap)?;
        let n = db.items().len();
        let mut entries = Vec::new();
        for mask in 1..(1u64 << n) {
            let items = subset(db, mask);
            let profile = ItemsetProfile::compute(&items, db);
            if !profile.periods.is_empty() {
                entries.push((items, profile));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(SubsetTable { entries, enumerated: (1u64 << n) - 1 })
    }

    /// Subsets contained in at least one transaction.
    pub fn occurring(&self) -> usize {
        self.entries.len()
    }

    pub fn select(&self, db: &Database, params: &MiningParams) -> OracleReport {
        self.collect(db, params.minfre, Some((params.minpro, params.scope)))
    }

    /// Itemsets with some period of relative frequency at least `minfre`,
    /// ignoring profit.
    pub fn select_frequent(&self, db: &Database, minfre: Threshold) -> OracleReport {
        self.collect(db, minfre, None)
    }

    fn collect(
        &self,
        db: &Database,
        minfre: Threshold,
        minpro: Option<(Threshold, ProfitScope)>,
    ) -> OracleReport {
        let patterns = self
            .entries
            .iter()
            .filter_map(|(items, profile)| judge(items, profile, db, minfre, minpro))
            .collect();
        OracleReport { patterns, enumerated_count: self.enumerated }
    }
}

/// All OPPPs of `db` by brute force. Fails when `db` has more than `cap`
/// distinct items.
pub fn enumerate(db: &Database, params: &MiningParams, cap: usize) -> Result<OracleReport, OracleError> {
    check_cap(db, cap)?;
    let n = db.items().len();
    let mut patterns = Vec::new();
    for mask in 1..(1u64 << n) {
        let items = subset(db, mask);
        let profile = ItemsetProfile::compute(&items, db);
        if let Some(r) = judge(&items, &profile, db, params.minfre, Some((params.minpro, params.scope))) {
            patterns.push(r);
        }
    }
    patterns.sort_by(|a, b| a.items.cmp(&b.items));
    Ok(OracleReport { patterns, enumerated_count: (1u64 << n) - 1 })
}

/// Frequency-only variant of [`enumerate`].
pub fn enumerate_frequent(db: &Database, minfre: Threshold, cap: usize) -> Result<OracleReport, OracleError> {
    Ok(SubsetTable::build(db, cap)?.select_frequent(db, minfre))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMismatch {
    pub items: ItemSet,
    pub fields: Vec<&'static str>,
}

/// Differences between two pattern sets, keyed by itemset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternDiff {
    pub only_left: Vec<ItemSet>,
    pub only_right: Vec<ItemSet>,
    pub mismatched: Vec<FieldMismatch>,
}

impl PatternDiff {
    pub fn is_empty(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty() && self.mismatched.is_empty()
    }
}

impl fmt::Display for PatternDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "identical");
        }
        for x in &self.only_left {
            writeln!(f, "only in left: {{{x}}}")?;
        }
        for x in &self.only_right {
            writeln!(f, "only in right: {{{x}}}")?;
        }
        for m in &self.mismatched {
            writeln!(f, "mismatch in {{{}}}: {}", m.items, m.fields.join(", "))?;
        }
        Ok(())
    }
}

fn same_ratio(a: Option<Ratio>, b: Option<Ratio>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a == b,
        (None, None) => true,
        _ => false,
    }
}

pub fn diff(left: &[OpppResult], right: &[OpppResult]) -> PatternDiff {
    let l: BTreeMap<&ItemSet, &OpppResult> = left.iter().map(|r| (&r.items, r)).collect();
    let r: BTreeMap<&ItemSet, &OpppResult> = right.iter().map(|r| (&r.items, r)).collect();
    let mut out = PatternDiff::default();
    for (items, a) in &l {
        let Some(b) = r.get(items) else {
            out.only_left.push((*items).clone());
            continue;
        };
        let mut fields = Vec::new();
        if a.profit != b.profit {
            fields.push("profit");
        }
        if a.total_period_profit != b.total_period_profit {
            fields.push("total_period_profit");
        }
        if !same_ratio(a.relative_profit, b.relative_profit) {
            fields.push("relative_profit");
        }
        if a.periods != b.periods {
            fields.push("periods");
        }
        if a.qualifying_periods != b.qualifying_periods {
            fields.push("qualifying_periods");
        }
        if a.per_period_support != b.per_period_support {
            fields.push("per_period_support");
        }
        if !fields.is_empty() {
            out.mismatched.push(FieldMismatch { items: (*items).clone(), fields });
        }
    }
    out.only_right = r.keys().filter(|k| !l.contains_key(*k)).map(|k| (*k).clone()).collect();
    out
}
