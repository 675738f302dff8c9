//! Benchmark sweeps over transaction prefixes, period counts and thresholds.

use std::time::Duration;

use serde::Serialize;

use crate::error::ParamError;
use crate::miner::{mine, MiningStats};
use crate::model::{Database, MiningParams, ProfitScope};
use crate::ratio::Threshold;
use crate::synth::{prefix, regroup};

/// One mining run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub transactions: usize,
    pub periods: usize,
    pub minfre: f64,
    pub minpro: f64,
    pub scope: &'static str,
    pub threads: usize,
    pub run: usize,
    pub patterns: usize,
    pub wall_ms: f64,
    pub peak_memory_bytes: u64,
    pub visited_nodes: u64,
    pub constructed_lists: u64,
    pub pruned_by_freq: u64,
    pub pruned_by_rpp: u64,
    pub pruned_by_pairs: u64,
}

impl BenchRecord {
    /// Column names in serialization order.
    pub const HEADER: [&'static str; 16] = [
        "dataset",
        "transactions",
        "periods",
        "minfre",
        "minpro",
        "scope",
        "threads",
        "run",
        "patterns",
        "wall_ms",
        "peak_memory_bytes",
        "visited_nodes",
        "constructed_lists",
        "pruned_by_freq",
        "pruned_by_rpp",
        "pruned_by_pairs",
    ];

    fn new(
        dataset: &str,
        db: &Database,
        params: &MiningParams,
        run: usize,
        patterns: usize,
        stats: &MiningStats,
    ) -> Self {
        BenchRecord {
            dataset: dataset.to_string(),
            transactions: db.len(),
            periods: db.period_count(),
            minfre: params.minfre.as_f64(),
            minpro: params.minpro.as_f64(),
            scope: match params.scope {
                ProfitScope::Global => "global",
                ProfitScope::PerPeriod => "per-period",
            },
            threads: params.threads,
            run,
            patterns,
            wall_ms: stats.wall_time.as_secs_f64() * 1e3,
            peak_memory_bytes: stats.peak_memory_bytes(),
            visited_nodes: stats.visited_nodes,
            constructed_lists: stats.constructed_lists,
            pruned_by_freq: stats.pruned_by_freq,
            pruned_by_rpp: stats.pruned_by_rpp,
            pruned_by_pairs: stats.pruned_by_pairs,
        }
    }
}

/// Cartesian sweep. An empty `prefixes` or `periods` list means "the
/// database as given"; an empty `thresholds` list means no runs at all.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub prefixes: Vec<usize>,
    pub periods: Vec<u32>,
    pub thresholds: Vec<(Threshold, Threshold)>,
    /// Scope, pruning toggles and threads; its thresholds are replaced.
    pub base: MiningParams,
    pub repeat: usize,
    pub regroup_seed: u64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            prefixes: Vec::new(),
            periods: Vec::new(),
            thresholds: Vec::new(),
            base: MiningParams::new(Threshold::ZERO, Threshold::ZERO).expect("zero thresholds are valid"),
            repeat: 1,
            regroup_seed: 7,
        }
    }
}

/// Runs every combination and hands each record to `sink` as soon as it is
/// measured.
pub fn run_sweep(
    dataset: &str,
    db: &Database,
    sweep: &Sweep,
    mut sink: impl FnMut(BenchRecord),
) -> Result<(), ParamError> {
    let params: Vec<MiningParams> = sweep
        .thresholds
        .iter()
        .map(|&(minfre, minpro)| {
            let p = MiningParams { minfre, minpro, ..sweep.base.clone() };
            p.validate().map(|_| p)
        })
        .collect::<Result<_, _>>()?;
    if params.is_empty() {
        return Ok(());
    }
    let prefixes: Vec<Option<usize>> = if sweep.prefixes.is_empty() {
        vec![None]
    } else {
        sweep.prefixes.iter().copied().map(Some).collect()
    };
    let periods: Vec<Option<u32>> =
        if sweep.periods.is_empty() { vec![None] } else { sweep.periods.iter().copied().map(Some).collect() };
    for n in &prefixes {
        let base = n.map(|n| prefix(db, n));
        let base = base.as_ref().unwrap_or(db);
        for p in &periods {
            let grouped = p.map(|p| regroup(base, p, sweep.regroup_seed).expect("positive period count"));
            let data = grouped.as_ref().unwrap_or(base);
            for params in &params {
                for run in 0..sweep.repeat.max(1) {
                    let out = mine(data, params);
                    sink(BenchRecord::new(dataset, data, params, run, out.patterns.len(), &out.stats));
                }
            }
        }
    }
    Ok(())
}

pub fn median(mut values: Vec<Duration>) -> Option<Duration> {
    if values.is_empty() {
        return None;
    }
    values.sort();
    Some(values[values.len() / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, GenConfig};

    #[test]
    fn empty_threshold_list_runs_nothing() {
        let (_, db) =
            generate(&GenConfig { n_transactions: 50, n_items: 20, ..GenConfig::default() }).unwrap();
        let mut rows = Vec::new();
        run_sweep("x", &db, &Sweep::default(), |r| rows.push(r)).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn prefix_sweep_rows() {
        let (_, db) =
            generate(&GenConfig { n_transactions: 900, n_items: 50, ..GenConfig::default() }).unwrap();
        let sweep = Sweep {
            prefixes: (1..=9).map(|k| k * 100).collect(),
            thresholds: vec![(Threshold::new(1, 10), Threshold::new(1, 10))],
            ..Sweep::default()
        };
        let mut rows = Vec::new();
        run_sweep("gen", &db, &sweep, |r| rows.push(r)).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.windows(2).all(|w| w[0].transactions <= w[1].transactions));
        assert_eq!(rows[8].transactions, 900);
    }

    #[test]
    fn period_sweep_regroups() {
        let (_, db) =
            generate(&GenConfig { n_transactions: 300, n_items: 30, ..GenConfig::default() }).unwrap();
        let sweep = Sweep {
            periods: vec![5, 25, 50],
            thresholds: vec![(Threshold::new(1, 5), Threshold::new(1, 5))],
            repeat: 2,
            ..Sweep::default()
        };
        let mut rows = Vec::new();
        run_sweep("gen", &db, &sweep, |r| rows.push(r)).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].periods, 5);
        assert_eq!(rows[2].periods, 25);
        assert!(rows[4].periods > 25);
    }

    #[test]
    fn median_of_three() {
        let ms = Duration::from_millis;
        assert_eq!(median(vec![ms(5), ms(1), ms(3)]), Some(ms(3)));
        assert_eq!(median(Vec::new()), None);
    }
}
