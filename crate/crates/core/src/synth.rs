//! Seeded synthetic databases: skewed item popularity, seasonal items that
//! are only on the shelf for part of the periods, negative unit profits, and
//! period regrouping.

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Poisson, Zipf};

use crate::error::GenError;
use crate::model::{Database, ItemId, PeriodId, ProfitTable, Tid, TransactionRecord, TxItem};
use crate::money::Money;

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub n_transactions: usize,
    pub n_items: u32,
    pub avg_len: f64,
    pub min_quantity: u32,
    pub max_quantity: u32,
    /// Magnitude range of unit profits; the sign is drawn separately.
    pub min_profit: Money,
    pub max_profit: Money,
    pub negative_fraction: f64,
    pub n_periods: u32,
    /// Period `h` (0-based) gets weight `1 / (h + 1)^period_skew`.
    pub period_skew: f64,
    /// Zipf exponent of item popularity; 0 is uniform.
    pub item_skew: f64,
    /// Share of items sold only during a random window of periods.
    pub seasonal_fraction: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_transactions: 10_000,
            n_items: 1_000,
            avg_len: 8.0,
            min_quantity: 1,
            max_quantity: 5,
            min_profit: Money::units(1),
            max_profit: Money::units(100),
            negative_fraction: 0.1,
            n_periods: 5,
            period_skew: 0.0,
            item_skew: 1.0,
            seasonal_fraction: 0.2,
            seed: 42,
        }
    }
}

impl GenConfig {
    /// Many transactions over a large catalogue, short baskets.
    pub fn sparse(n_transactions: usize, seed: u64) -> Self {
        GenConfig { n_transactions, n_items: 20_000, avg_len: 8.0, seed, ..GenConfig::default() }
    }

    /// Long baskets over a small catalogue.
    pub fn dense(n_transactions: usize, seed: u64) -> Self {
        GenConfig {
            n_transactions,
            n_items: 75,
            avg_len: 20.0,
            item_skew: 0.3,
            seasonal_fraction: 0.1,
            seed,
            ..GenConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let fail = |msg: &str| Err(GenError::Invalid(msg.to_string()));
        if self.n_transactions == 0 || self.n_items == 0 || self.n_periods == 0 {
            return fail("transaction, item and period counts must be positive");
        }
        if !(self.avg_len.is_finite() && self.avg_len >= 1.0) {
            return fail("average transaction length must be at least 1");
        }
        if self.min_quantity == 0 || self.min_quantity > self.max_quantity {
            return fail("quantity range must satisfy 1 <= min <= max");
        }
        if self.min_profit <= Money::ZERO || self.min_profit > self.max_profit {
            return fail("unit profit range must satisfy 0 < min <= max");
        }
        for (name, v) in
            [("negative fraction", self.negative_fraction), ("seasonal fraction", self.seasonal_fraction)]
        {
            if !(0.0..=1.0).contains(&v) {
                return Err(GenError::Invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        for (name, v) in [("period skew", self.period_skew), ("item skew", self.item_skew)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(GenError::Invalid(format!("{name} must be a non-negative number")));
            }
        }
        Ok(())
    }
}

/// Builds the profit table and the database described by `cfg`. Output is a
/// pure function of `cfg`.
pub fn generate(cfg: &GenConfig) -> Result<(ProfitTable, Database), GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_items;
    let periods = cfg.n_periods;

    let mut profits = ProfitTable::new();
    for item in 1..=n {
        let magnitude = Money::from_minor(rng.random_range(cfg.min_profit.minor()..=cfg.max_profit.minor()));
        let unit = if rng.random_bool(cfg.negative_fraction) { -magnitude } else { magnitude };
        profits.insert(item, unit);
    }

    // Inclusive window of 0-based periods during which each item is sold.
    let windows: Vec<(u32, u32)> = (0..n)
        .map(|_| {
            if periods > 1 && rng.random_bool(cfg.seasonal_fraction) {
                let len = rng.random_range(1..=periods.div_ceil(2));
                let start = rng.random_range(0..=periods - len);
                (start, start + len - 1)
            } else {
                (0, periods - 1)
            }
        })
        .collect();

    let period_weights: Vec<f64> =
        (0..periods).map(|h| (f64::from(h) + 1.0).powf(-cfg.period_skew)).collect();
    let period_dist = WeightedIndex::new(&period_weights).map_err(|e| GenError::Invalid(e.to_string()))?;
    let popularity = Zipf::new(f64::from(n), cfg.item_skew).map_err(|e| GenError::Invalid(e.to_string()))?;
    let length = Poisson::new(cfg.avg_len).map_err(|e| GenError::Invalid(e.to_string()))?;

    let mut records = Vec::with_capacity(cfg.n_transactions);
    let mut chosen: Vec<ItemId> = Vec::new();
    for tid in 1..=cfg.n_transactions as Tid {
        let period = period_dist.sample(&mut rng) as u32;
        let target = (length.sample(&mut rng) as u32).clamp(1, n) as usize;
        chosen.clear();
        let mut attempts = 0;
        while chosen.len() < target && attempts < target * 20 {
            attempts += 1;
            let item = popularity.sample(&mut rng) as ItemId;
            let (lo, hi) = windows[item as usize - 1];
            if period < lo || period > hi || chosen.contains(&item) {
                continue;
            }
            chosen.push(item);
        }
        if chosen.is_empty() {
            // Fall back to any item on the shelf; always-available items exist
            // unless every item is seasonal.
            if let Some(item) = (1..=n).find(|&i| {
                let (lo, hi) = windows[i as usize - 1];
                lo <= period && period <= hi
            }) {
                chosen.push(item);
            } else {
                continue;
            }
        }
        let items = chosen
            .iter()
            .map(|&item| {
                let quantity = rng.random_range(cfg.min_quantity..=cfg.max_quantity);
                let unit = profits.get(item).expect("generated item");
                TxItem { item, quantity, profit: unit * quantity }
            })
            .collect();
        records.push(TransactionRecord { tid, period: period + 1, items });
    }

    let db = Database::from_records(records).map_err(|e| GenError::Invalid(e.to_string()))?;
    Ok((profits, db))
}

/// Reassigns every transaction to a period drawn uniformly from
/// `1..=n_periods`. Everything else is preserved; the assignment depends only
/// on `seed` and the tid order.
pub fn regroup(db: &Database, n_periods: u32, seed: u64) -> Result<Database, GenError> {
    if n_periods == 0 {
        return Err(GenError::Invalid("period count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = db
        .records()
        .into_iter()
        .map(|mut r| {
            r.period = rng.random_range(1..=n_periods) as PeriodId;
            r
        })
        .collect();
    Database::from_records(records).map_err(|e| GenError::Invalid(e.to_string()))
}

/// The first `n` transactions in tid order.
pub fn prefix(db: &Database, n: usize) -> Database {
    let records = db.records().into_iter().take(n).collect();
    Database::from_records(records).expect("subset of a valid database")
}

/// Bounds for the small random databases used in equivalence testing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FuzzLimits {
    pub max_items: u32,
    pub max_transactions: usize,
    pub max_periods: u32,
    pub negative_fraction: f64,
}

impl Default for FuzzLimits {
    fn default() -> Self {
        FuzzLimits { max_items: 12, max_transactions: 40, max_periods: 4, negative_fraction: 0.2 }
    }
}

/// A small random database for cross-checking against the oracle. Unit
/// profits are whole numbers in `-9..=9`, occasionally zero.
pub fn fuzz_database(seed: u64, limits: FuzzLimits) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_items = rng.random_range(1..=limits.max_items.max(1));
    let n_tx = rng.random_range(1..=limits.max_transactions.max(1));
    let n_periods = rng.random_range(1..=limits.max_periods.max(1));
    let avg = rng.random_range(1..=n_items.min(6)) as usize;

    let unit: Vec<Money> = (0..n_items)
        .map(|_| {
            let magnitude = if rng.random_bool(0.05) { 0 } else { rng.random_range(1..=9) };
            if rng.random_bool(limits.negative_fraction) {
                Money::units(-magnitude.max(1))
            } else {
                Money::units(magnitude)
            }
        })
        .collect();

    let records = (1..=n_tx as Tid)
        .map(|tid| {
            let len = rng.random_range(1..=(2 * avg).min(n_items as usize));
            let mut pool: Vec<ItemId> = (1..=n_items).collect();
            pool.shuffle(&mut rng);
            let items = pool[..len]
                .iter()
                .map(|&item| {
                    let quantity = rng.random_range(1..=5);
                    TxItem { item, quantity, profit: unit[item as usize - 1] * quantity }
                })
                .collect();
            TransactionRecord { tid, period: rng.random_range(1..=n_periods), items }
        })
        .collect();
    Database::from_records(records).expect("fuzz records are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GenConfig {
        GenConfig { n_transactions: 500, n_items: 60, seed: 42, ..GenConfig::default() }
    }

    #[test]
    fn same_seed_same_data() {
        let (pa, a) = generate(&small()).unwrap();
        let (pb, b) = generate(&small()).unwrap();
        assert_eq!(pa, pb);
        assert_eq!(a, b);
        let (_, c) = generate(&GenConfig { seed: 43, ..small() }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn shape_follows_config() {
        let (pt, db) = generate(&small()).unwrap();
        assert_eq!(db.len(), 500);
        assert_eq!(pt.len(), 60);
        assert!(db.period_count() <= 5);
        assert!(db.items().iter().all(|&i| (1..=60).contains(&i)));
        for t in db.transactions() {
            assert!(!t.items().is_empty());
            for e in t.items() {
                assert_eq!(e.profit, pt.get(e.item).unwrap() * e.quantity);
            }
        }
    }

    #[test]
    fn no_negative_items_when_fraction_is_zero() {
        let (pt, _) = generate(&GenConfig { negative_fraction: 0.0, ..small() }).unwrap();
        assert!(pt.iter().all(|(_, up)| up > Money::ZERO));
        let (pt, _) = generate(&GenConfig { negative_fraction: 1.0, ..small() }).unwrap();
        assert!(pt.iter().all(|(_, up)| up < Money::ZERO));
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            GenConfig { n_items: 0, ..small() },
            GenConfig { n_transactions: 0, ..small() },
            GenConfig { negative_fraction: 1.5, ..small() },
            GenConfig { min_quantity: 3, max_quantity: 2, ..small() },
            GenConfig { min_profit: Money::ZERO, ..small() },
            GenConfig { avg_len: 0.5, ..small() },
        ] {
            assert!(generate(&cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn regroup_keeps_transactions() {
        let (_, db) = generate(&small()).unwrap();
        let regrouped = regroup(&db, 50, 7).unwrap();
        assert_eq!(regrouped, regroup(&db, 50, 7).unwrap());
        assert_eq!(regroup(&regrouped, 50, 7).unwrap(), regrouped);
        assert!(regrouped.period_count() > 5);
        for (a, b) in db.transactions().iter().zip(regrouped.transactions()) {
            assert_eq!(a.tid(), b.tid());
            assert_eq!(a.items(), b.items());
            assert!((1..=50).contains(&b.period()));
        }
    }

    #[test]
    fn prefix_takes_leading_tids() {
        let (_, db) = generate(&small()).unwrap();
        let head = prefix(&db, 100);
        assert_eq!(head.len(), 100);
        assert_eq!(head.transactions(), &db.transactions()[..100]);
    }

    #[test]
    fn fuzz_databases_respect_limits() {
        let limits = FuzzLimits::default();
        for seed in 0..50 {
            let db = fuzz_database(seed, limits);
            assert!(db.items().len() <= 12);
            assert!(db.len() <= 40 && !db.is_empty());
            assert!(db.period_count() <= 4);
        }
        assert_eq!(fuzz_database(3, limits), fuzz_database(3, limits));
    }
}
