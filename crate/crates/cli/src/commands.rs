use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use op3m_core::bench::{run_sweep, BenchRecord, Sweep};
use op3m_core::io::{
    load_profit_table, load_spmf_period, load_transactions, write_patterns, write_profit_table,
    write_spmf_period, write_transactions, LoadOptions,
};
use op3m_core::opplist::{build_item_order, list_for_itemset};
use op3m_core::oracle::{diff, SubsetTable};
use op3m_core::synth::{fuzz_database, generate as gen_data, regroup as regroup_db, FuzzLimits, GenConfig};
use op3m_core::{mine as run_miner, Database, ItemSet, MiningParams, OracleError, ProfitScope, Threshold};

use crate::{BenchArgs, DumpArgs, Format, GenArgs, InputArgs, MineArgs, OracleArgs, Preset, RegroupArgs};

pub struct CliError {
    pub code: u8,
    pub message: String,
}

type Result<T> = std::result::Result<T, CliError>;

fn input_error(message: impl std::fmt::Display) -> CliError {
    CliError { code: 2, message: message.to_string() }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_failed(e: io::Error) -> CliError {
    input_error(format!("write failed: {e}"))
}

fn load(input: &InputArgs) -> Result<Database> {
    load_parts(&input.transactions, input.profits.as_deref(), input.format, input.merge_duplicates)
}

fn load_parts(transactions: &Path, profits: Option<&Path>, format: Format, merge: bool) -> Result<Database> {
    let options = LoadOptions { merge_duplicates: merge };
    let context = |e: op3m_core::LoadError| input_error(format!("{}: {e}", transactions.display()));
    match format {
        Format::Native => {
            let profits =
                profits.ok_or_else(|| input_error("profit table required for the native format (-p)"))?;
            let table = load_profit_table(open(profits)?)
                .map_err(|e| input_error(format!("{}: {e}", profits.display())))?;
            load_transactions(open(transactions)?, &table, options).map_err(context)
        }
        Format::SpmfPeriod => load_spmf_period(open(transactions)?, options).map_err(context),
    }
}

pub fn mine(args: MineArgs) -> Result<ExitCode> {
    let db = load(&args.input)?;
    let params = args.tuning.apply(MiningParams::new(args.minfre, args.minpro).map_err(input_error)?);
    params.validate().map_err(input_error)?;
    let started = Instant::now();
    let outcome = run_miner(&db, &params);
    let elapsed = started.elapsed();

    let mut out = output(args.output.as_deref())?;
    write_patterns(&outcome.patterns, &mut out).and_then(|_| out.flush()).map_err(write_failed)?;
    eprintln!(
        "{} patterns from {} transactions in {:.3}s",
        outcome.patterns.len(),
        db.len(),
        elapsed.as_secs_f64()
    );
    if args.stats {
        eprintln!("{:#?}", outcome.stats);
    }
    Ok(ExitCode::SUCCESS)
}

fn threshold_grid(args: &OracleArgs) -> Result<Vec<MiningParams>> {
    let parse = |s: &str| s.parse::<Threshold>().expect("literal threshold");
    let minfre = match args.minfre {
        Some(t) => vec![t],
        None => ["0", "0.2", "0.5"].map(parse).to_vec(),
    };
    let minpro = match args.minpro {
        Some(t) => vec![t],
        None => ["0", "0.1", "0.3"].map(parse).to_vec(),
    };
    let scopes = match args.scope {
        Some(s) => vec![s.into()],
        None => vec![ProfitScope::Global, ProfitScope::PerPeriod],
    };
    let mut grid = Vec::new();
    for &f in &minfre {
        for &p in &minpro {
            for &scope in &scopes {
                let params = MiningParams::new(f, p)
                    .map_err(input_error)?
                    .with_scope(scope)
                    .with_threads(args.threads);
                params.validate().map_err(input_error)?;
                grid.push(params);
            }
        }
    }
    Ok(grid)
}

/// Returns the number of disagreeing runs.
fn check_database(
    label: &str,
    db: &Database,
    grid: &[MiningParams],
    cap: usize,
    corrupt: bool,
) -> Result<usize> {
    let table = SubsetTable::build(db, cap).map_err(|e| match e {
        OracleError::TooManyItems { .. } => CliError { code: 3, message: format!("{label}: {e}") },
    })?;
    let mut failures = 0;
    for params in grid {
        let mut mined = run_miner(db, params).patterns;
        if corrupt && !mined.is_empty() {
            mined.pop();
        }
        let expected = table.select(db, params).patterns;
        let d = diff(&mined, &expected);
        if !d.is_empty() {
            failures += 1;
            println!(
                "{label} minfre={} minpro={} scope={:?}: miner (left) and oracle (right) differ",
                params.minfre, params.minpro, params.scope
            );
            print!("{d}");
        }
    }
    Ok(failures)
}

pub fn oracle_check(args: OracleArgs) -> Result<ExitCode> {
    let grid = threshold_grid(&args)?;
    let mut failures = 0;
    let mut checked = 0;
    if let Some(n) = args.fuzz {
        let limits = FuzzLimits {
            max_items: args.max_items,
            max_transactions: args.max_transactions,
            max_periods: args.max_periods,
            ..FuzzLimits::default()
        };
        for seed in args.seed..args.seed + n {
            let db = fuzz_database(seed, limits);
            failures += check_database(&format!("seed {seed}"), &db, &grid, args.cap, args.corrupt_miner)?;
            checked += grid.len();
        }
    } else {
        let path = args.transactions.as_deref().expect("required unless fuzzing");
        let db = load_parts(path, args.profits.as_deref(), args.format, args.merge_duplicates)?;
        failures += check_database(&path.display().to_string(), &db, &grid, args.cap, args.corrupt_miner)?;
        checked += grid.len();
    }
    if failures > 0 {
        eprintln!("{failures} of {checked} runs disagree");
        return Ok(ExitCode::from(1));
    }
    eprintln!("{checked} runs agree");
    Ok(ExitCode::SUCCESS)
}

pub fn generate(args: GenArgs) -> Result<ExitCode> {
    let mut cfg = match args.preset {
        Some(Preset::Sparse) => GenConfig::sparse(100_000, args.seed),
        Some(Preset::Dense) => GenConfig::dense(10_000, args.seed),
        None => GenConfig { seed: args.seed, ..GenConfig::default() },
    };
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = args.$field { cfg.$field = v; } )* };
    }
    set!(
        n_transactions,
        n_items,
        avg_len,
        min_quantity,
        max_quantity,
        min_profit,
        max_profit,
        negative_fraction,
        n_periods,
        period_skew,
        item_skew,
        seasonal_fraction
    );
    let (profits, db) = gen_data(&cfg).map_err(input_error)?;
    let mut out = create(&args.profits)?;
    write_profit_table(&profits, &mut out).and_then(|_| out.flush()).map_err(write_failed)?;
    let mut out = create(&args.transactions)?;
    write_transactions(&db, &mut out).and_then(|_| out.flush()).map_err(write_failed)?;
    eprintln!("{} transactions, {} items, {} periods", db.len(), db.items().len(), db.period_count());
    Ok(ExitCode::SUCCESS)
}

pub fn regroup(args: RegroupArgs) -> Result<ExitCode> {
    let db = load(&args.input)?;
    let grouped = regroup_db(&db, args.periods, args.seed).map_err(input_error)?;
    let mut out = create(&args.output)?;
    match args.input.format {
        Format::Native => write_transactions(&grouped, &mut out),
        Format::SpmfPeriod => write_spmf_period(&grouped, &mut out),
    }
    .and_then(|_| out.flush())
    .map_err(write_failed)?;
    Ok(ExitCode::SUCCESS)
}

pub fn bench(args: BenchArgs) -> Result<ExitCode> {
    let db = load(&args.input)?;
    let dataset = args.dataset.clone().unwrap_or_else(|| {
        args.input
            .transactions
            .file_stem()
            .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
    });
    let thresholds = args.minfre.iter().flat_map(|&f| args.minpro.iter().map(move |&p| (f, p))).collect();
    let base = args.tuning.apply(MiningParams::new(Threshold::ZERO, Threshold::ZERO).map_err(input_error)?);
    let sweep = Sweep {
        prefixes: args.prefixes.clone(),
        periods: args.periods.clone(),
        thresholds,
        base,
        repeat: args.repeat,
        regroup_seed: args.regroup_seed,
    };
    if sweep.periods.contains(&0) {
        return Err(input_error("period counts must be positive"));
    }

    let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(output(args.output.as_deref())?);
    csv.write_record(BenchRecord::HEADER).map_err(|e| input_error(e.to_string()))?;
    let mut failed = None;
    run_sweep(&dataset, &db, &sweep, |record| {
        if failed.is_none() {
            failed = csv.serialize(&record).and_then(|_| Ok(csv.flush()?)).err();
        }
    })
    .map_err(input_error)?;
    if let Some(e) = failed {
        return Err(input_error(e.to_string()));
    }
    csv.flush().map_err(write_failed)?;
    Ok(ExitCode::SUCCESS)
}

pub fn dump_list(args: DumpArgs) -> Result<ExitCode> {
    let db = load(&args.input)?;
    let items = args
        .items
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u32>().map_err(|_| input_error(format!("bad item id '{s}'"))))
        .collect::<Result<Vec<u32>>>()?;
    if items.is_empty() {
        return Err(input_error("no items given"));
    }
    let itemset = ItemSet::new(items);
    let order = build_item_order(&db);
    let mut out = output(args.output.as_deref())?;
    match list_for_itemset(&db, &order, &itemset) {
        Some(list) => list.write_tsv(&db, &mut out).and_then(|_| out.flush()).map_err(write_failed)?,
        None => return Err(input_error(format!("itemset {{{itemset}}} contains an unknown item"))),
    }
    Ok(ExitCode::SUCCESS)
}
