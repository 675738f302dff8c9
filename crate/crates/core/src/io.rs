//! Text formats: profit tables, transaction files, and pattern output.
//!
//! Native transaction lines are `<tid>\t<period>\t<item>:<qty> <item>:<qty>...`.
//! The SPMF-style alternative is `i1 i2 ... ik:TU:u1 u2 ... uk:period`, where
//! each `u` is the item's total profit in that transaction and tids are the
//! 1-based data-line numbers.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use crate::error::{LineError, LoadError};
use crate::miner::OpppResult;
use crate::model::{Database, ItemId, PeriodId, ProfitTable, Tid, TransactionRecord, TxItem};
use crate::money::Money;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Sum quantities (or profits) of an item repeated within one
    /// transaction instead of rejecting the line.
    pub merge_duplicates: bool,
}

/// Yields `(line_number, content)` for non-blank, non-comment lines with any
/// trailing CR removed.
fn data_lines<R: BufRead>(
    reader: R,
    comment_prefixes: &'static [char],
) -> impl Iterator<Item = io::Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(move |(idx, line)| match line {
        Err(e) => Some(Err(e)),
        Ok(mut text) => {
            if text.ends_with('\r') {
                text.pop();
            }
            let trimmed = text.trim();
            if trimmed.is_empty() || trimmed.starts_with(comment_prefixes) {
                None
            } else {
                Some(Ok((idx + 1, text)))
            }
        }
    })
}

fn parse_field<T: std::str::FromStr>(text: &str, what: &str) -> Result<T, LineError> {
    text.trim().parse().map_err(|_| LineError::Malformed(format!("bad {what} `{}`", text.trim())))
}

pub fn load_profit_table<R: BufRead>(reader: R) -> Result<ProfitTable, LoadError> {
    let mut table = ProfitTable::new();
    for line in data_lines(reader, &['#']) {
        let (line_no, text) = line?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [item, profit] = fields[..] else {
            return Err(LoadError::line(
                line_no,
                LineError::Malformed("expected `<item-id><TAB><unit-profit>`".into()),
            ));
        };
        let item: ItemId = parse_field(item, "item id").map_err(|e| LoadError::line(line_no, e))?;
        let profit: Money =
            profit.parse().map_err(|e: crate::money::MoneyParseError| LoadError::line(line_no, e))?;
        if table.insert(item, profit).is_some() {
            return Err(LoadError::line(line_no, LineError::DuplicateItem(item)));
        }
    }
    Ok(table)
}

fn push_item(
    items: &mut BTreeMap<ItemId, TxItem>,
    entry: TxItem,
    options: LoadOptions,
) -> Result<(), LineError> {
    match items.entry(entry.item) {
        Entry::Vacant(slot) => {
            slot.insert(entry);
        }
        Entry::Occupied(mut slot) => {
            if !options.merge_duplicates {
                return Err(LineError::DuplicateItem(entry.item));
            }
            let merged = slot.get_mut();
            merged.quantity = merged.quantity.checked_add(entry.quantity).ok_or(LineError::Overflow)?;
            merged.profit = merged.profit.checked_add(entry.profit).ok_or(LineError::Overflow)?;
        }
    }
    Ok(())
}

fn parse_native_line(
    text: &str,
    profits: &ProfitTable,
    options: LoadOptions,
) -> Result<TransactionRecord, LineError> {
    let mut fields = text.splitn(3, '\t');
    let tid: Tid = parse_field(fields.next().unwrap_or(""), "tid")?;
    let period: PeriodId = match fields.next() {
        Some(p) => parse_field(p, "period")?,
        None => return Err(LineError::Malformed("expected `<tid><TAB><period><TAB><items>`".into())),
    };
    let mut items = BTreeMap::new();
    for token in fields.next().unwrap_or("").split_whitespace() {
        let (item, qty) = token
            .split_once(':')
            .ok_or_else(|| LineError::Malformed(format!("expected `<item>:<qty>`, got `{token}`")))?;
        let item: ItemId = parse_field(item, "item id")?;
        let quantity: u32 = qty.parse().map_err(|_| LineError::BadQuantity(item))?;
        if quantity == 0 {
            return Err(LineError::BadQuantity(item));
        }
        let unit = profits.get(item).ok_or(LineError::UnknownItem(item))?;
        let profit = unit.checked_mul_qty(quantity).ok_or(LineError::Overflow)?;
        push_item(&mut items, TxItem { item, quantity, profit }, options)?;
    }
    Ok(TransactionRecord { tid, period, items: items.into_values().collect() })
}

/// Loads the native tab-separated transaction format, resolving each item's
/// profit through `profits`.
pub fn load_transactions<R: BufRead>(
    reader: R,
    profits: &ProfitTable,
    options: LoadOptions,
) -> Result<Database, LoadError> {
    let mut records = Vec::new();
    for line in data_lines(reader, &['#']) {
        let (line_no, text) = line?;
        records.push(parse_native_line(&text, profits, options).map_err(|e| LoadError::line(line_no, e))?);
    }
    Ok(Database::from_records(records)?)
}

fn parse_spmf_line(text: &str, tid: Tid, options: LoadOptions) -> Result<TransactionRecord, LineError> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [items, _total, utilities, period] = parts[..] else {
        return Err(LineError::Malformed("expected `items:TU:utilities:period`".into()));
    };
    let period: PeriodId = parse_field(period, "period")?;
    let ids: Vec<&str> = items.split_whitespace().collect();
    let utils: Vec<&str> = utilities.split_whitespace().collect();
    if ids.len() != utils.len() {
        return Err(LineError::Malformed(format!("{} items but {} utility values", ids.len(), utils.len())));
    }
    let mut entries = BTreeMap::new();
    for (id, util) in ids.into_iter().zip(utils) {
        let item: ItemId = parse_field(id, "item id")?;
        let profit: Money = util.parse()?;
        push_item(&mut entries, TxItem { item, quantity: 1, profit }, options)?;
    }
    Ok(TransactionRecord { tid, period, items: entries.into_values().collect() })
}

/// Loads the SPMF-style format with per-transaction item profits. The `TU`
/// column is not validated; tp and rtp are recomputed from the item values.
pub fn load_spmf_period<R: BufRead>(reader: R, options: LoadOptions) -> Result<Database, LoadError> {
    let mut records = Vec::new();
    for line in data_lines(reader, &['#', '%', '@']) {
        let (line_no, text) = line?;
        let tid = records.len() as Tid + 1;
        records.push(parse_spmf_line(&text, tid, options).map_err(|e| LoadError::line(line_no, e))?);
    }
    Ok(Database::from_records(records)?)
}

pub fn write_profit_table<W: Write>(table: &ProfitTable, mut out: W) -> io::Result<()> {
    for (item, profit) in table.iter() {
        writeln!(out, "{item}\t{profit}")?;
    }
    Ok(())
}

/// Writes the native format; items appear in ascending id order.
pub fn write_transactions<W: Write>(db: &Database, mut out: W) -> io::Result<()> {
    for t in db.transactions() {
        write!(out, "{}\t{}\t", t.tid(), t.period())?;
        for (pos, e) in t.items().iter().enumerate() {
            if pos > 0 {
                out.write_all(b" ")?;
            }
            write!(out, "{}:{}", e.item, e.quantity)?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_spmf_period<W: Write>(db: &Database, mut out: W) -> io::Result<()> {
    for t in db.transactions() {
        let ids: Vec<String> = t.items().iter().map(|e| e.item.to_string()).collect();
        let utils: Vec<String> = t.items().iter().map(|e| e.profit.to_string()).collect();
        writeln!(out, "{}:{}:{}:{}", ids.join(" "), t.tp(), utils.join(" "), t.period())?;
    }
    Ok(())
}

fn join_periods(periods: &[PeriodId]) -> String {
    periods.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

pub fn format_pattern(result: &OpppResult) -> String {
    let rp = match result.relative_profit {
        Some(r) => format!("{:.6}", r.as_f64()),
        None => "undefined".to_string(),
    };
    format!(
        "{}\t{}\t{}\t{}\t{}",
        result.items,
        result.profit,
        rp,
        join_periods(&result.periods),
        join_periods(&result.qualifying_periods)
    )
}

/// One line per pattern: items, `p(X)`, `rp(X)` to six places, `os(X)`, and
/// the qualifying periods.
pub fn write_patterns<W: Write>(results: &[OpppResult], mut out: W) -> io::Result<()> {
    for r in results {
        writeln!(out, "{}", format_pattern(r))?;
    }
    Ok(())
}
