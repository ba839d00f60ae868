use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use phonon_herald::run::{
    run_protocol, run_sensitivity, run_steady, run_sweep_q, run_validate, zero_contour, Format, ResultTable, RunConfig,
};
use phonon_herald::{Error, Result};

/// Heralded mechanical superposition states: sweeps, protocol runs and
/// steady-state reports.
///
/// Settings come from the defaults, then the `--config` file, then the
/// command-line flags, each overriding the previous.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Treat regime warnings as errors (exit code 3).
    #[arg(long, global = true)]
    strict: bool,
    /// Largest Fock dimension for dense computations.
    #[arg(long, global = true)]
    dim_cap: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Conditioned Mandel Q over a grid of r, phi, n_m, beta.
    SweepQ {
        /// Also write the Q = 0 crossings along the last axis.
        #[arg(long)]
        contour_out: Option<PathBuf>,
    },
    /// Write pulse, herald, readout and click statistics.
    Protocol,
    /// Continuous multi-tone steady state.
    Steady,
    /// Quadratic Q loss around the optimal settings vs finite differences.
    Sensitivity,
    /// Invariant suite.
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(j) = cli.jobs {
        cfg.parallelism = j;
    }
    if let Some(d) = cli.dim_cap {
        cfg.dim_cap = d;
    }
    cfg.strict |= cli.strict;
    cfg.validate()?;
    Ok(cfg)
}

fn emit(table: &ResultTable, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = load(&cli)?;
    let table = match &cli.command {
        Command::SweepQ { .. } => run_sweep_q(&cfg)?,
        Command::Protocol => run_protocol(&cfg)?,
        Command::Steady => run_steady(&cfg)?,
        Command::Sensitivity => run_sensitivity(&cfg)?,
        Command::Validate => run_validate(&cfg)?,
    };
    emit(&table, cfg.format, cli.out.as_deref())?;
    if let Command::SweepQ { contour_out: Some(path) } = &cli.command {
        let axes: Vec<&str> = cfg.sweep.axes.iter().map(|a| a.name.as_str()).collect();
        if axes.is_empty() {
            return Err(Error::Config("--contour-out needs at least one sweep axis".into()));
        }
        emit(&zero_contour(&table, &axes, "q_analytic")?, cfg.format, Some(path))?;
    }
    let failed = table.failed_rows();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed; see the status column", table.rows.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
