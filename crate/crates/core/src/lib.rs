//! Mining on-shelf popular and profitable itemsets from transaction data
//! with signed unit profits and time periods.
//!
//! Load a [`ProfitTable`] and a [`Database`] with [`io`], then call
//! [`mine`]. The [`oracle`] module enumerates every itemset for small inputs
//! and is the reference the miner is tested against.

pub mod audit;
pub mod bench;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod measures;
pub mod miner;
pub mod model;
pub mod money;
pub mod opplist;
pub mod oracle;
pub mod period;
pub mod ratio;
pub mod synth;

pub use error::{DataError, GenError, LineError, LoadError, MeasureError, OracleError, ParamError};
pub use miner::{mine, MiningOutcome, MiningStats, OpppResult};
pub use model::{
    Database, ItemId, ItemSet, MiningParams, PeriodId, ProfitScope, ProfitTable, Tid, Transaction,
    TransactionRecord, TxItem,
};
pub use money::Money;
pub use period::PeriodSet;
pub use ratio::{Ratio, Threshold};
