//! `gsac` — design, search and batch-evaluate GSAC hybrid precoders.
//!
//! Subcommands:
//!
//! - `partitions <n>`: print every RF configuration for `n` chains
//! - `design`: design a precoder for a channel file and report its rate
//! - `sweep <spec>`: run a Monte-Carlo experiment spec, emit CSV
//! - `search`: exhaustive energy-efficiency search over RF configurations
//!
//! Exit codes: 0 on success, 1 on validation errors (bad flags, bad files,
//! constraint violations), 2 on runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gsac_core::channel::{channel_from_csv, ChannelProfile};
use gsac_core::codebook::{build_codebook, quantize_analog};
use gsac_core::experiment::{parse_spec, run_experiment, Scheme};
use gsac_core::metrics::{achievable_rate, total_power, LinkBudget, PowerModel};
use gsac_core::precoder::{
    design_fc_omp, design_sic_hybrid, design_unconstrained, grid_dictionary, precoder_to_csv,
};
use gsac_core::search::{search_best_config, search_report_csv, winner_summary};
use gsac_core::{
    enumerate_partitions, parse_partition_string, partition_string, Error, GsacConfig,
};

#[derive(Parser)]
#[command(
    name = "gsac",
    version,
    about = "Hybrid precoding toolkit for sub-array-connected mmWave transmitters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every RF configuration (integer partition) for n chains.
    Partitions {
        /// Total RF chain count, 1..=64.
        n: usize,
    },
    /// Design a precoder for a channel read from CSV.
    Design(DesignArgs),
    /// Run an experiment spec file and emit aggregate CSV.
    Sweep(SweepArgs),
    /// Exhaustively search RF configurations for the best energy efficiency.
    Search(SearchArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Channel CSV file (`# nr=<..> nt=<..>` header, re,im interleaved rows).
    #[arg(long)]
    channel: PathBuf,
    /// RF configuration string, e.g. "(2,2)".
    #[arg(long)]
    cfg: String,
    /// Scheme: gsac-sic, gsac-opt, gsac-codebook(b), sac-sic or fc-omp.
    #[arg(long)]
    scheme: String,
    /// Operating SNR in dB.
    #[arg(long, default_value_t = 0.0)]
    snr_db: f64,
    /// Output precoder CSV path.
    #[arg(long, default_value = "precoder.csv")]
    out: PathBuf,
    /// Grid dictionary size for fc-omp on file channels.
    #[arg(long, default_value_t = 128)]
    dict_grid: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment spec file (`key = value` lines).
    spec: PathBuf,
    /// Write aggregate CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write every raw trial record here.
    #[arg(long)]
    raw: Option<PathBuf>,
    /// Worker threads (default: GSAC_WORKERS or 1).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n_t: usize,
    #[arg(long)]
    n_r: usize,
    #[arg(long)]
    n_rf: usize,
    #[arg(long, default_value_t = 0.0)]
    snr_db: f64,
    /// Monte-Carlo channels per candidate.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    n_cl: usize,
    #[arg(long, default_value_t = 5)]
    n_ray: usize,
    #[arg(long, default_value_t = 7.5)]
    spread_deg: f64,
    #[arg(long, default_value_t = 10.0)]
    p_co: f64,
    #[arg(long, default_value_t = 0.1)]
    p_rf: f64,
    #[arg(long, default_value_t = 0.1)]
    p_pa: f64,
    #[arg(long, default_value_t = 0.01)]
    p_ps: f64,
    /// Write the per-candidate CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Validation failures exit 1, runtime failures exit 2.
fn classify(e: &Error) -> u8 {
    match e {
        Error::ConstraintViolation(_)
        | Error::IndivisibleAllocation { .. }
        | Error::OutOfRange(_)
        | Error::ShapeMismatch(_)
        | Error::MismatchedSearchSpace(_)
        | Error::DictionaryTooSmall { .. }
        | Error::Parse(_) => 1,
        Error::DecompositionFailure(_)
        | Error::SingularUpdate(_)
        | Error::RankDeficientAnalog(_)
        | Error::NonFinite(_)
        | Error::ZeroPower
        | Error::Io(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, anything else is a
            // usage/validation error.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Partitions { n } => {
            let set = enumerate_partitions(n)?;
            for parts in set.partitions() {
                println!("{}", partition_string(parts));
            }
            Ok(())
        }
        Command::Design(args) => design(args),
        Command::Sweep(args) => sweep(args),
        Command::Search(args) => search(args),
    }
}

fn design(args: DesignArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.channel)?;
    let h = channel_from_csv(&text)?;
    let parts = parse_partition_string(&args.cfg)?;
    let cfg = GsacConfig::proportional(h.cols(), &parts)?;
    let budget = LinkBudget::from_snr_db(args.snr_db, cfg.n_s());
    let snr = budget.snr;

    let scheme = Scheme::parse(&args.scheme)?;
    let (precoder, rate) = match scheme {
        Scheme::GsacSic | Scheme::SacSic | Scheme::GsacSicEqualRf => {
            let hp = design_sic_hybrid(&h, &cfg, snr)?;
            let rate = achievable_rate(&h, hp.f(), &budget)?;
            (hp, rate)
        }
        Scheme::GsacOpt => {
            // Report the unconstrained reference through its rate; the dump
            // format carries analog/digital factors, so phase-extract it.
            let unconstrained = design_unconstrained(&h, &cfg, snr)?;
            let rate = achievable_rate(&h, unconstrained.f_opt(), &budget)?;
            println!("rate = {rate} bits/s/Hz");
            let mut out = String::new();
            out.push_str(&format!("# cfg={}\n", cfg.rf_string()));
            out.push_str(&format!(
                "# f_opt rows={} cols={}\n",
                unconstrained.f_opt().rows(),
                unconstrained.f_opt().cols()
            ));
            for r in 0..unconstrained.f_opt().rows() {
                let mut fields = Vec::new();
                for c in 0..unconstrained.f_opt().cols() {
                    let z = unconstrained.f_opt()[(r, c)];
                    fields.push(format!("{}", z.re));
                    fields.push(format!("{}", z.im));
                }
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            std::fs::write(&args.out, out)?;
            return Ok(());
        }
        Scheme::GsacCodebook(bits) => {
            let b = bits.ok_or_else(|| {
                Error::Parse("gsac-codebook needs explicit bits, e.g. gsac-codebook(7)".into())
            })?;
            let unconstrained = design_unconstrained(&h, &cfg, snr)?;
            let codebook = build_codebook(&cfg, b)?;
            let hp = quantize_analog(&unconstrained, &codebook)?;
            let rate = achievable_rate(&h, hp.f(), &budget)?;
            (hp, rate)
        }
        Scheme::FcOmp => {
            // File channels carry no path ground truth, so OMP runs on a
            // sin-space grid dictionary.
            let dict = grid_dictionary(h.cols(), args.dict_grid);
            let hp = design_fc_omp(&h, cfg.n_rf_total(), &dict)?;
            let rate = achievable_rate(&h, hp.f(), &budget)?;
            (hp, rate)
        }
    };
    std::fs::write(&args.out, precoder_to_csv(&precoder))?;
    println!("rate = {rate} bits/s/Hz");
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.spec)?;
    let spec = parse_spec(&text)?;
    let workers = args
        .workers
        .or_else(|| {
            std::env::var("GSAC_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    let result = run_experiment(&spec, workers)?;
    let aggregate = result.aggregate_csv();
    match &args.out {
        Some(path) => std::fs::write(path, &aggregate)?,
        None => print!("{aggregate}"),
    }
    if let Some(path) = &args.raw {
        std::fs::write(path, result.raw_csv())?;
    }
    Ok(())
}

fn search(args: SearchArgs) -> Result<(), Error> {
    let profile = ChannelProfile {
        n_cl: args.n_cl,
        n_ray: args.n_ray,
        spread: args.spread_deg.to_radians(),
    };
    let pm = PowerModel {
        p_co: args.p_co,
        p_rf: args.p_rf,
        p_pa: args.p_pa,
        p_ps: args.p_ps,
    };
    let snr = 10f64.powf(args.snr_db / 10.0);
    let report = search_best_config(
        args.n_t,
        args.n_r,
        args.n_rf,
        &profile,
        snr,
        &pm,
        args.trials,
        args.seed,
    )?;
    let csv = search_report_csv(&report);
    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    println!("{}", winner_summary(&report));
    // Context for sanity checks against the boundary architectures.
    let fc = GsacConfig::fully_connected(args.n_t, args.n_rf)?;
    let sac = GsacConfig::sub_array_connected(args.n_t, args.n_rf)?;
    println!(
        "boundary powers: SAC {} W, FC {} W",
        total_power(&sac, &pm),
        total_power(&fc, &pm)
    );
    Ok(())
}
