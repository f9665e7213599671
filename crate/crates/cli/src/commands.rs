//! The `run`, `verify` and `sweep` commands.

use std::path::{Path, PathBuf};

use adiabat::validation::{all_passed, criterion_name, run_criterion, CriterionReport, Level, CRITERIA};
use adiabat::DecoherenceTrace;
use rayon::prelude::*;

use crate::config::{Format, RunConfig};
use crate::models::{density_section, evaluate, summary, Model};
use crate::output::{sidecar, write_atomic, write_density, write_json, write_trace};
use crate::{CliError, CliResult};

/// Extra outputs of a run, each written next to `out`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// `<out>.printed.csv`: the form as customarily printed, where one exists.
    pub show_paper_form: bool,
    /// `<out>.summary.json`: derived scalars at `t_end`.
    pub summary: bool,
    /// `<out>.density.csv`: two-packet density section at `t_end`.
    pub density: bool,
}

#[derive(Debug)]
pub struct RunOutput {
    pub trace: DecoherenceTrace,
    pub files: Vec<PathBuf>,
}

pub fn run(config: &RunConfig, options: RunOptions) -> CliResult<RunOutput> {
    config.validate()?;
    let evaluation = evaluate(config)?;
    let mut files = Vec::new();
    if options.show_paper_form {
        let Some(printed) = &evaluation.printed else {
            return Err(CliError::Config(format!(
                "model {} has no separate printed form for these parameters",
                config.model.name()
            )));
        };
        let path = sidecar(&config.out, ".printed.csv");
        write_trace(&path, printed, Format::Csv)?;
        files.push(path);
    }
    if options.summary {
        let path = sidecar(&config.out, ".summary.json");
        write_json(&path, &summary(config, &evaluation)?)?;
        files.push(path);
    }
    if options.density {
        let path = sidecar(&config.out, ".density.csv");
        write_density(&path, &density_section(config)?)?;
        files.push(path);
    }
    write_trace(&config.out, &evaluation.main, config.format)?;
    files.insert(0, config.out.clone());
    Ok(RunOutput { trace: evaluation.main, files })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyTarget {
    Sg,
    Spin,
    Cavity,
    Localize,
    Semiclassic,
    All,
}

impl VerifyTarget {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            VerifyTarget::Spin => &[1, 2, 3],
            VerifyTarget::Sg => &[4, 5],
            VerifyTarget::Cavity => &[6, 7, 8],
            VerifyTarget::Localize => &[9, 10, 11],
            VerifyTarget::Semiclassic => &[12],
            VerifyTarget::All => &CRITERIA,
        }
    }
}

impl From<Model> for VerifyTarget {
    fn from(m: Model) -> Self {
        match m {
            Model::Sg => VerifyTarget::Sg,
            Model::Spin => VerifyTarget::Spin,
            Model::Cavity => VerifyTarget::Cavity,
            Model::Localize => VerifyTarget::Localize,
            Model::Semiclassic => VerifyTarget::Semiclassic,
        }
    }
}

pub fn format_report(rows: &[CriterionReport]) -> String {
    let mut s = format!("{:<4} {:<44} {:>12} {:>12}  {}\n", "id", "criterion", "measured", "tolerance", "result");
    for r in rows {
        let result = match (r.informational, r.passed) {
            (true, _) => "info",
            (false, true) => "pass",
            (false, false) => "FAIL",
        };
        s.push_str(&format!("{:<4} {:<44} {:>12.4e} {:>12.4e}  {result}", r.id, r.name, r.measured, r.tolerance));
        if !r.detail.is_empty() {
            s.push_str(&format!("  ({})", r.detail));
        }
        s.push('\n');
    }
    s
}

/// Runs the criteria belonging to `target` and prints the report table.
/// Returns the rows, or a verification error listing the failing ones.
pub fn verify(target: VerifyTarget, level: Level) -> CliResult<Vec<CriterionReport>> {
    let rows: Vec<CriterionReport> = target.criteria().iter().flat_map(|&id| run_criterion(id, level)).collect();
    print!("{}", format_report(&rows));
    if all_passed(&rows) {
        return Ok(rows);
    }
    let failing: Vec<String> = rows
        .iter()
        .filter(|r| !r.passed && !r.informational)
        .map(|r| format!("{} {} ({:.4e} vs {:.4e})", r.id, criterion_name(r.id), r.measured, r.tolerance))
        .collect();
    Err(CliError::Verification(failing.join("; ")))
}

fn sweep_path(out: &Path, key: &str, i: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.{key}-{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{key}-{i}"),
    };
    out.with_file_name(name)
}

/// Runs `config` once per value of `key`, in parallel. Writes one trace per
/// value and then the index `<out>` (`value,file`), so a present index
/// means every trace is complete.
pub fn sweep(config: &RunConfig, key: &str, values: &[f64], options: RunOptions) -> CliResult<PathBuf> {
    if !config.model.has_param(key) {
        return Err(CliError::Config(format!("unknown sweep key `{key}` for model {}", config.model.name())));
    }
    let runs = values
        .iter()
        .enumerate()
        .map(|(i, &v)| config.with_param(key, v, sweep_path(&config.out, key, i)))
        .collect::<CliResult<Vec<_>>>()?;
    runs.par_iter().map(|c| run(c, options).map(|_| ())).collect::<CliResult<Vec<()>>>()?;
    let mut index = String::from("value,file\n");
    for (c, v) in runs.iter().zip(values) {
        let file = c.out.file_name().expect("sweep paths have file names").to_string_lossy();
        index.push_str(&format!("{v:.16e},{file}\n"));
    }
    write_atomic(&config.out, index.as_bytes())?;
    Ok(config.out.clone())
}
