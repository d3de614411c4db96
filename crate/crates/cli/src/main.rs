use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use respq_cli::{emit, load, parse_config, render, run, run_oracle, sha256_hex, Format, RunError, RunOptions, RunRecord};

#[derive(Parser)]
#[command(name = "respq", version, about = "Variational quantum response spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the response sweep and write the spectrum.
    Run(RunArgs),
    /// Check a configuration and its operator files without running.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Dense sum-over-states spectrum only.
    Oracle(OutputArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the config's `output`, else stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    out: OutputArgs,
    /// Add sum-over-states reference columns.
    #[arg(long)]
    oracle: bool,
    /// Override the root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Sweep worker threads.
    #[arg(long, env = "RESPQ_THREADS")]
    threads: Option<usize>,
    /// Record wall-clock times in JSON output.
    #[arg(long)]
    timings: bool,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("respq: {msg}");
    ExitCode::from(code)
}

fn write_record(record: &RunRecord, out: &OutputArgs) -> Result<(), ExitCode> {
    let format = match &out.format {
        Some(f) => f.parse::<Format>().map_err(|e| fail(2, e))?,
        None => record.config.format,
    };
    let path = out.output.clone().or_else(|| record.config.output.clone());
    match path {
        Some(p) => emit(record, format, &p).map_err(|e| fail(1, format!("{e:#}")))?,
        None => {
            let text = render(record, format).map_err(|e| fail(1, format!("{e:#}")))?;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| fail(1, e))?;
        }
    }
    Ok(())
}

fn config_and_hash(path: &Path) -> Result<(respq_cli::RunConfig, String), ExitCode> {
    let bytes = std::fs::read(path).map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    let config = parse_config(path).map_err(|e| fail(2, e))?;
    Ok((config, sha256_hex(&bytes)))
}

fn finish(result: Result<RunRecord, RunError>, out: &OutputArgs) -> ExitCode {
    let record = match result {
        Ok(r) => r,
        Err(e) => return fail(e.exit_code() as u8, e),
    };
    if let Err(code) = write_record(&record, out) {
        return code;
    }
    if record.is_complete() {
        ExitCode::SUCCESS
    } else {
        fail(1, format!("{} frequency point(s) failed", record.failures.len()))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => {
            let (c, _) = match config_and_hash(&config) {
                Ok(x) => x,
                Err(code) => return code,
            };
            match load(&c) {
                Ok(inputs) => {
                    println!(
                        "ok: {} qubits, {} axis/axes, {} frequencies",
                        inputs.n(),
                        inputs.axes.len(),
                        c.omega_grid().len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(2, e),
            }
        }
        Command::Oracle(out) => {
            let (c, hash) = match config_and_hash(&out.config) {
                Ok(x) => x,
                Err(code) => return code,
            };
            finish(run_oracle(&c, &hash), &out)
        }
        Command::Run(args) => {
            let (mut c, hash) = match config_and_hash(&args.out.config) {
                Ok(x) => x,
                Err(code) => return code,
            };
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
            let opts = RunOptions { oracle: args.oracle, threads: args.threads, timings: args.timings };
            finish(run(&c, &hash, opts), &args.out)
        }
    }
}
