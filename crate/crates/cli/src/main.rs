use std::path::PathBuf;
use std::process::ExitCode;

use adiabat::validation::Level;
use adiabat_cli::config::{FileConfig, FlagConfig};
use adiabat_cli::{run, sweep, verify, CliError, CliResult, Format, Model, RunConfig, RunOptions, VerifyTarget};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Decoherence factors from adiabatic entanglement.
#[derive(Parser)]
#[command(name = "adiabat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one model on a time grid and write the trace.
    Run {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare closed forms against the exact-dynamics oracles.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        model: VerifyTarget,
        #[arg(long, value_enum, default_value = "fast")]
        level: LevelArg,
    },
    /// Repeat a run over a list of values of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to vary.
        #[arg(long)]
        key: String,
        /// Comma-separated values; may be empty.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        values: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// Model parameter as `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_end: Option<f64>,
    /// Number of time samples, endpoints included.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write `<out>.printed.csv` with the customarily printed form.
    #[arg(long)]
    show_paper_form: bool,
    /// Also write `<out>.summary.json` with derived quantities at `t_end`.
    #[arg(long)]
    summary: bool,
    /// Also write `<out>.density.csv` (localize only).
    #[arg(long)]
    density: bool,
}

impl RunArgs {
    fn resolve(&self) -> CliResult<(RunConfig, RunOptions)> {
        let file = self.config.as_deref().map(FileConfig::load).transpose()?;
        let flags = FlagConfig {
            model: self.model,
            params: self.params.clone(),
            t_start: self.t_start,
            t_end: self.t_end,
            steps: self.steps,
            out: self.out.clone(),
            format: self.format,
        };
        let options =
            RunOptions { show_paper_form: self.show_paper_form, summary: self.summary, density: self.density };
        Ok((RunConfig::resolve(&flags, file)?, options))
    }
}

fn parse_values(list: &str) -> CliResult<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| CliError::Config(format!("sweep value `{v}` is not a number"))))
        .collect()
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { run: args } => {
            let (config, options) = args.resolve()?;
            for f in run(&config, options)?.files {
                eprintln!("wrote {}", f.display());
            }
        }
        Command::Verify { model, level } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            verify(model, level)?;
        }
        Command::Sweep { run: args, key, values } => {
            let (config, options) = args.resolve()?;
            let values = parse_values(&values)?;
            let index = sweep(&config, &key, &values, options)?;
            eprintln!("wrote {}", index.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
