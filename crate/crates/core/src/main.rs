//! Command-line driver: BLER sweeps, latency reports, scheme comparisons
//! and tuple censuses.

use clap::{Args, Parser, Subcommand};
use polar_lscd::latency::total_latency;
use polar_lscd::polar::CodeSpec;
use polar_lscd::sim;
use polar_lscd::Result;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polar-lscd", version, about = "Polar list-decoding lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo BLER sweep over schemes, list sizes and Eb/N0 points.
    Sweep(SweepArgs),
    /// Cycle-count report for the decoder schedule.
    Latency(LatencyArgs),
    /// Paired-seed comparison of schemes against the first one configured.
    Compare(SweepArgs),
    /// Tuple census of a code spec under a merge setting.
    Census(CensusArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the worker count (0 = one per CPU).
    #[arg(long)]
    workers: Option<usize>,
    /// Override the output base path (writes <out>.csv and <out>.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LatencyArgs {
    /// Code spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Merge settings, e.g. 2,4,8.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 8])]
    merged_bits: Vec<usize>,
    /// Processing lanes per decoder core.
    #[arg(long, default_value_t = 64)]
    lanes: usize,
    /// Clock in MHz for the throughput estimate.
    #[arg(long)]
    freq_mhz: Option<f64>,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Verify the report against the shipped reference tables; nonzero exit
    /// on mismatch.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct CensusArgs {
    /// Code spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Merge settings to tabulate.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 8])]
    merged_bits: Vec<usize>,
    /// Verify against the shipped reference census; nonzero exit on
    /// mismatch.
    #[arg(long)]
    check: bool,
}

/// Reference tuple censuses of the shipped (1024, 512, 24) code set, in
/// `(merged_bits, len, [sp1, sp2, rate-1/T])` form.
const REFERENCE_CENSUS: &[(usize, usize, [usize; 3])] = &[
    (2, 1, [34, 0, 0]),
    (2, 2, [64, 377, 54]),
    (4, 1, [34, 0, 0]),
    (4, 2, [32, 3, 30]),
    (4, 4, [32, 159, 24]),
    (8, 1, [34, 0, 0]),
    (8, 2, [32, 3, 30]),
    (8, 4, [17, 5, 13]),
    (8, 8, [15, 64, 11]),
];

/// Reference totals of the shipped code set at 64 lanes: `(M, total)`.
const REFERENCE_TOTALS: &[(usize, u64)] = &[(2, 943), (4, 647), (8, 516)];

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => {
            let mut cfg = sim::SweepConfig::load(&args.config)?;
            apply_overrides(&mut cfg, &args);
            let points = sim::run_sweep(&cfg)?;
            println!("{}", sim::BlerPoint::CSV_HEADER);
            for p in &points {
                println!("{}", p.csv_row());
            }
            Ok(true)
        }
        Command::Compare(args) => {
            let mut cfg = sim::SweepConfig::load(&args.config)?;
            apply_overrides(&mut cfg, &args);
            let rows = sim::compare_schemes(&cfg)?;
            print!("{}", sim::render_compare(&rows));
            Ok(true)
        }
        Command::Latency(args) => {
            let spec = CodeSpec::load(&args.spec)?;
            print!("{}", sim::latency_table(&spec, args.lanes, &args.merged_bits)?);
            if let Some(f) = args.freq_mhz {
                for &m in &args.merged_bits {
                    let rep = total_latency(&spec, args.lanes, m)?;
                    println!(
                        "M={m}: {:.0} Mbps coded throughput at {f} MHz",
                        rep.throughput_mbps(f)
                    );
                }
            }
            if let Some(path) = &args.json {
                std::fs::write(path, sim::latency_json(&spec, args.lanes, &args.merged_bits)?)?;
            }
            if args.check {
                let mut ok = true;
                for &(m, want) in REFERENCE_TOTALS {
                    let rep = total_latency(&spec, 64, m)?;
                    let good = rep.total == want;
                    ok &= good;
                    println!(
                        "check M={m}: total {} (expected {want}) {}",
                        rep.total,
                        if good { "ok" } else { "MISMATCH" }
                    );
                }
                return Ok(ok);
            }
            Ok(true)
        }
        Command::Census(args) => {
            let spec = CodeSpec::load(&args.spec)?;
            let mut ok = true;
            for &m in &args.merged_bits {
                println!("merged_bits = {m}");
                print!("{}", sim::census_table(&spec, m));
                if args.check {
                    let tuples = polar_lscd::list::tuple_divide(&spec, m);
                    let census = polar_lscd::list::Census::of(&tuples);
                    for &(rm, len, want) in REFERENCE_CENSUS.iter().filter(|(rm, ..)| *rm == m) {
                        let got = census.counts(len);
                        let good = got == want;
                        ok &= good;
                        println!(
                            "check M={rm} len={len}: {got:?} (expected {want:?}) {}",
                            if good { "ok" } else { "MISMATCH" }
                        );
                    }
                }
                println!();
            }
            Ok(ok)
        }
    }
}

fn apply_overrides(cfg: &mut sim::SweepConfig, args: &SweepArgs) {
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
