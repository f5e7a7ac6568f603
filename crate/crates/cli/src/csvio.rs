//! CSV input and output.
//!
//! Matrix files: one row per matrix row, comma-separated decimal floats, no
//! header. Lines starting with `#` are metadata or comments and are
//! skipped. Vector files are a single row or a single column.
//!
//! Trace files: header `n,step_gap,v_gap,residual,err_to_ref`, one row per
//! iteration, floats with 17 significant digits (exact round trip);
//! `err_to_ref` is empty when no reference point is attached.

use std::fs;
use std::path::Path;

use gippa_core::diagnostics::IterateTrace;
use gippa_core::linalg::{Mat, Vector};
use gippa_core::operators::KernelSpec;

use crate::fmt_float;

pub const TRACE_HEADER: &str = "n,step_gap,v_gap,residual,err_to_ref";

pub fn parse_matrix_text(text: &str) -> Result<Mat, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> =
            line.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(format!("line {}: non-finite entry", lineno + 1));
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(format!(
                    "line {}: expected {} columns, found {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no data rows".to_string());
    }
    Ok(Mat::from_rows(&rows))
}

pub fn read_matrix(path: &Path) -> Result<Mat, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_matrix_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Read a vector: a 1×n or n×1 CSV file.
pub fn read_vector(path: &Path) -> Result<Vector, String> {
    let m = read_matrix(path)?;
    if m.rows() == 1 {
        Ok(Vector::from_slice(m.row(0)))
    } else if m.cols() == 1 {
        Ok(Vector::new((0..m.rows()).map(|i| m[(i, 0)]).collect()))
    } else {
        Err(format!("{}: expected a vector, found {}x{}", path.display(), m.rows(), m.cols()))
    }
}

pub fn matrix_to_csv(m: &Mat) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| fmt_float(*x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: &Path, m: &Mat) -> Result<(), String> {
    fs::write(path, matrix_to_csv(m)).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Kernel CSV: a metadata comment line (provenance and the zero-replacement
/// threshold used, when any) followed by the matrix rows.
pub fn kernel_to_csv(kernel: &KernelSpec) -> String {
    let tau = match kernel.tau() {
        Some(t) => format!(" tau={}", fmt_float(t)),
        None => String::new(),
    };
    format!("# kernel provenance={}{}\n{}", kernel.provenance(), tau, matrix_to_csv(kernel.matrix()))
}

pub fn write_kernel(path: &Path, kernel: &KernelSpec) -> Result<(), String> {
    fs::write(path, kernel_to_csv(kernel))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

// ── Traces ──────────────────────────────────────────────────────────

/// The five trace columns, as written to and re-read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub step_gap: f64,
    pub v_gap: f64,
    pub residual: f64,
    pub err_to_ref: Option<f64>,
}

pub fn trace_rows(trace: &IterateTrace) -> Vec<TraceRow> {
    let errs = trace.errors_to_reference();
    trace
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| TraceRow {
            n: r.n,
            step_gap: r.step_gap,
            v_gap: r.v_gap,
            residual: r.residual,
            err_to_ref: errs.as_ref().map(|e| e[i]),
        })
        .collect()
}

pub fn trace_to_csv(trace: &IterateTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for row in trace_rows(trace) {
        let err = row.err_to_ref.map(fmt_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n,
            fmt_float(row.step_gap),
            fmt_float(row.v_gap),
            fmt_float(row.residual),
            err
        ));
    }
    out
}

pub fn write_trace(path: &Path, trace: &IterateTrace) -> Result<(), String> {
    fs::write(path, trace_to_csv(trace))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn parse_trace_text(text: &str) -> Result<Vec<TraceRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRACE_HEADER => {}
        other => return Err(format!("not a trace file (header {:?})", other)),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(format!("line {}: expected 5 fields", lineno + 2));
        }
        let parse =
            |s: &str| s.trim().parse::<f64>().map_err(|e| format!("line {}: {e}", lineno + 2));
        rows.push(TraceRow {
            n: fields[0]
                .trim()
                .parse::<usize>()
                .map_err(|e| format!("line {}: {e}", lineno + 2))?,
            step_gap: parse(fields[1])?,
            v_gap: parse(fields[2])?,
            residual: parse(fields[3])?,
            err_to_ref: if fields[4].trim().is_empty() { None } else { Some(parse(fields[4])?) },
        });
    }
    Ok(rows)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_trace_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// A bare series: one positive float per line, `#` comments allowed.
pub fn read_series(path: &Path) -> Result<Vec<f64>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(
            line.parse::<f64>()
                .map_err(|e| format!("{}: line {}: {e}", path.display(), lineno + 1))?,
        );
    }
    Ok(out)
}
