use std::io;

use thiserror::Error;

use crate::money::MoneyParseError;
use crate::ratio::ThresholdParseError;
use crate::{ItemId, PeriodId, Tid};

/// Structural problems found while assembling a [`Database`](crate::Database).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DataError {
    #[error("duplicate transaction id {0}")]
    DuplicateTid(Tid),
    #[error("transaction {tid}: item {item} appears more than once")]
    DuplicateItem { tid: Tid, item: ItemId },
    #[error("transaction {tid}: item {item} has quantity 0")]
    ZeroQuantity { tid: Tid, item: ItemId },
    #[error("transaction {tid}: profit overflows")]
    Overflow { tid: Tid },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LineError {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("duplicate item {0}")]
    DuplicateItem(ItemId),
    #[error("unknown item {0} (not in the profit table)")]
    UnknownItem(ItemId),
    #[error("item {0}: quantity must be a positive integer")]
    BadQuantity(ItemId),
    #[error("bad profit: {0}")]
    BadProfit(#[from] MoneyParseError),
    #[error("profit overflows")]
    Overflow,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {kind}")]
    Line { line: usize, kind: LineError },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl LoadError {
    pub(crate) fn line(line: usize, kind: impl Into<LineError>) -> Self {
        LoadError::Line { line, kind: kind.into() }
    }
}

/// Domain errors of the definition-level measures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("itemset is not contained in transaction {0}")]
    NotContained(Tid),
    #[error("itemset does not occur in period {0}")]
    PeriodNotInOs(PeriodId),
    #[error("itemset occurs in no period")]
    EmptyOs,
    #[error("period {0} has no transactions")]
    EmptyPeriod(PeriodId),
    #[error("relative profit undefined: total period profit is zero")]
    ZeroTotalProfit,
    #[error("itemset is empty")]
    EmptyItemset,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("minfre must lie in [0, 1], got {0}")]
    MinfreOutOfRange(String),
    #[error("thread count must be at least 1")]
    NoThreads,
    #[error(transparent)]
    Threshold(#[from] ThresholdParseError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle refuses {items} items (cap is {cap}); 2^{items} subsets would be enumerated")]
    TooManyItems { items: usize, cap: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    Invalid(String),
}
