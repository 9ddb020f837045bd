use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dispersive_lab::commands::{self, Suite, VerifyOptions, EXIT_OK, EXIT_VERIFY_FAILED};
use dispersive_lab::config::RunConfig;
use dispersive_lab::{Error, Result};

#[derive(Parser)]
#[command(name = "dispersive-lab", version, about = "Classify, simulate and check higher-order Schrödinger-type equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the equation's type, j*, sign and λ sequence as JSON.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print every coefficient sequence as JSON.
    Table {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evolve the initial data and write norms per requested time as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write `<out stem>_modes.csv` with every mode modulus.
        #[arg(long)]
        dump_modes: bool,
    },
    /// Run a verification suite and print a JSON report.
    Verify {
        #[arg(value_enum)]
        which: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        ablate_correction: bool,
        /// Equation order (maximum order for remark21).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        jstar: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write per-frequency growth rates as CSV.
    Growth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 64)]
        xi_max: usize,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn simulate(config: &Path, out: &Path, dump_modes: bool) -> Result<i32> {
    let cfg = RunConfig::load(config)?;
    if let Some((t, xi)) = commands::first_overflow(&cfg)? {
        eprintln!("error: overflow at t = {t}, xi = {xi}; nothing written");
    }
    commands::run_simulate(&cfg, out, dump_modes)?;
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Classify { config } => {
            print_json(&commands::classify_report(&RunConfig::load(config)?)?)?;
            Ok(EXIT_OK)
        }
        Command::Table { config } => {
            print_json(&commands::table_report(&RunConfig::load(config)?)?)?;
            Ok(EXIT_OK)
        }
        Command::Simulate { config, out, dump_modes } => simulate(&config, &out, dump_modes),
        Command::Verify {
            which,
            trials,
            seed,
            ablate_correction,
            m,
            jstar,
            config,
        } => {
            let mut opts = VerifyOptions::new(which);
            opts.trials = trials;
            opts.seed = seed;
            opts.ablate = ablate_correction;
            opts.m = m;
            opts.jstar = jstar;
            opts.config = config.map(RunConfig::load).transpose()?;
            let outcome = commands::verify(&opts)?;
            print_json(&outcome.summary_json())?;
            Ok(if outcome.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Growth { config, xi_max, out } => {
            let scan = commands::growth(&RunConfig::load(config)?, xi_max)?;
            match out {
                Some(p) => commands::write_growth_csv(&scan, std::fs::File::create(p)?)?,
                None => commands::write_growth_csv(&scan, io::stdout().lock())?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("DISPERSIVE_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("DISPERSIVE_LAB_THREADS={v:?} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Numeric(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = init_threads().and_then(|()| run(cli)).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        commands::exit_code(&e)
    });
    ExitCode::from(code as u8)
}
