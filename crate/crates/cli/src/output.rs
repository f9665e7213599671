//! Trace and sidecar files. Every write goes to a temporary file in the
//! target directory and is renamed into place, so readers never see a
//! partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use adiabat::DecoherenceTrace;
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::{CliError, CliResult};

pub const CSV_HEADER: &str = "t,re_F,im_F,abs_F";

#[derive(Serialize)]
#[allow(non_snake_case)]
struct Row {
    t: f64,
    re_F: f64,
    im_F: f64,
    abs_F: f64,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(path, e));
    }
    Ok(())
}

pub fn render_trace(trace: &DecoherenceTrace, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::with_capacity(80 * (trace.len() + 1));
            s.push_str(CSV_HEADER);
            s.push('\n');
            for (t, f) in trace.iter() {
                s.push_str(&format!("{t:.16e},{:.16e},{:.16e},{:.16e}\n", f.re, f.im, f.norm()));
            }
            s
        }
        Format::Json => {
            let rows: Vec<Row> =
                trace.iter().map(|(t, f)| Row { t, re_F: f.re, im_F: f.im, abs_F: f.norm() }).collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
    }
}

pub fn write_trace(path: &Path, trace: &DecoherenceTrace, format: Format) -> CliResult<()> {
    write_atomic(path, render_trace(trace, format).as_bytes())
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn write_density(path: &Path, rows: &[[f64; 3]]) -> CliResult<()> {
    let mut s = String::from("x,x_prime,abs_rho\n");
    for [x, xp, r] in rows {
        s.push_str(&format!("{x:.16e},{xp:.16e},{r:.16e}\n"));
    }
    write_atomic(path, s.as_bytes())
}

/// `<out>` with `suffix` appended to the full file name.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    out.with_file_name(name)
}

/// Reads a CSV trace back into `(t, re, im, abs)` rows.
pub fn read_csv(path: &Path) -> CliResult<Vec<[f64; 4]>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(io_err(path, "unexpected header"));
    }
    lines
        .map(|line| {
            let cols: Vec<f64> =
                line.split(',').map(str::parse).collect::<Result<_, _>>().map_err(|e| io_err(path, e))?;
            <[f64; 4]>::try_from(cols).map_err(|_| io_err(path, "expected 4 columns"))
        })
        .collect()
}
