//! Command-line entry point: layer preset, config file, and flags into a
//! session, run it, and map failures to exit codes (2 = invalid spec,
//! 3 = unsupported capability, 1 = runtime failure).

use std::path::PathBuf;
use std::str::FromStr;

use afstc::powerctl::SchemeId;
use clap::Parser;

use afstc_cli::presets::Preset;
use afstc_cli::{
    assemble, load_config_file, parse_snr_grid, run_session, summary_path, CliError, OutputKind,
    PartialSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "afstc-cli",
    version,
    about = "Sweeps SNR over simulated and analytic SER curves, emitting CSV plot data and a JSON summary"
)]
struct Cli {
    /// JSON config file with experiment fields (flags override it).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Built-in figure pipeline to run (config and flags override fields).
    #[arg(long, value_enum)]
    preset: Option<Preset>,

    /// Scheme: dstc, opp-relay, full-opp, or opp-source.
    #[arg(long, value_parser = SchemeId::from_str)]
    scheme: Option<SchemeId>,

    /// Comma-separated outputs: simulated, exact, asymptotic, upper_bound, mgf.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<OutputKind>>,

    /// SNR grid in dB as start:step:stop (inclusive).
    #[arg(long = "snr-db", value_name = "START:STEP:STOP")]
    snr_db: Option<String>,

    /// Per-point trial budget.
    #[arg(long, value_name = "N")]
    trials: Option<u64>,

    /// Per-point error target (at least 50).
    #[arg(long = "min-errors", value_name = "N")]
    min_errors: Option<u64>,

    /// Root seed for all random draws.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for CSVs and summary.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    let file = match &cli.config {
        Some(path) => Some(load_config_file(path)?),
        None => None,
    };
    let flags = PartialSpec {
        config: None,
        scheme: cli.scheme,
        modulation: None,
        snr_db_grid: cli.snr_db.as_deref().map(parse_snr_grid).transpose()?,
        min_errors: cli.min_errors,
        max_trials: cli.trials,
        seed: cli.seed,
        outputs: cli.outputs,
        out_path: cli.out,
    };
    let session = assemble(cli.preset, file, flags)?;
    run_session(&session)?;
    Ok(summary_path(&session))
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(summary) => {
            println!("{}", summary.display());
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    });
}
