//! The five-transaction, six-product worked example used throughout the
//! tests, with products `a..f` mapped to item ids `1..6`.

use crate::io::{load_profit_table, load_transactions, LoadOptions};
use crate::model::{Database, ItemId, ProfitTable};

pub const A: ItemId = 1;
pub const B: ItemId = 2;
pub const C: ItemId = 3;
pub const D: ItemId = 4;
pub const E: ItemId = 5;
pub const F: ItemId = 6;

pub const RUNNING_EXAMPLE_PROFITS: &str = "\
# item\tunit profit
1\t3
2\t-2
3\t4
4\t1
5\t7
6\t5
";

/// Tid 4 sells one unit of d, so its transaction profit is 20.
pub const RUNNING_EXAMPLE_TX: &str = "\
# tid\tperiod\titems
1\t1\t2:2 3:1 5:3
2\t1\t1:1 2:1 3:2 6:1
3\t2\t1:3 2:6 3:4 4:1 5:1 6:2
4\t2\t3:3 4:1 5:1
5\t3\t1:1 4:2 5:3 6:1
";

pub fn running_example_profits() -> ProfitTable {
    load_profit_table(RUNNING_EXAMPLE_PROFITS.as_bytes()).expect("fixture profit table")
}

pub fn running_example() -> Database {
    load_transactions(RUNNING_EXAMPLE_TX.as_bytes(), &running_example_profits(), LoadOptions::default())
        .expect("fixture transactions")
}
