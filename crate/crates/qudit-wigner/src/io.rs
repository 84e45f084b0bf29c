//! Grid files, outcome tables and fidelity summaries.
//!
//! Grids are written in two sibling formats carrying the same content:
//!
//! - a diff-friendly text format — `key=value` header lines followed by one
//!   value per line in storage order, and
//! - a JSON document for programmatic use.
//!
//! Values are printed with Rust's shortest round-trip float formatting, so
//! write → read → write is byte-identical and outputs are reproducible
//! bit-for-bit across runs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::phase_space::PrimeDimension;
use crate::teleport::TeleportTrace;
use crate::wigner::WignerGrid;
use crate::Result;

/// Format tag written into every grid file.
pub const GRID_FORMAT: &str = "qudit-wigner-grid-v1";

/// Human-readable description of the storage order, written into headers.
pub const ORDER_DESC: &str = "party-major;per-party index p*N+q;q fastest";

/// The serializable form of a grid: header fields plus values in storage
/// order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDocument {
    /// Format tag, [`GRID_FORMAT`].
    pub format: String,
    /// Hilbert-space dimension N.
    pub dim: u64,
    /// Number of parties k; the grid holds N^(2k) values.
    pub parties: usize,
    /// Storage-order description, [`ORDER_DESC`].
    pub order: String,
    /// Sum of all values, for integrity checking (must be 1 within 1e-9).
    pub sum: f64,
    /// Grid values in storage order.
    pub values: Vec<f64>,
}

impl GridDocument {
    /// Snapshot of a grid ready for serialization.
    pub fn from_grid(grid: &WignerGrid) -> Self {
        Self {
            format: GRID_FORMAT.to_string(),
            dim: grid.dim().n(),
            parties: grid.parties(),
            order: ORDER_DESC.to_string(),
            sum: grid.sum(),
            values: grid.values().to_vec(),
        }
    }

    /// Validates the document and rebuilds the grid. `source` names the
    /// file in error messages.
    pub fn into_grid(self, source: &str) -> Result<WignerGrid> {
        let parse = |reason: String| Error::Parse {
            path: source.to_string(),
            reason,
        };
        if self.format != GRID_FORMAT {
            return Err(parse(format!(
                "unsupported format `{}`, expected `{GRID_FORMAT}`",
                self.format
            )));
        }
        let dim = PrimeDimension::new(self.dim)?;
        let expect = (dim.size() * dim.size()).pow(self.parties as u32);
        if self.parties == 0 || self.values.len() != expect {
            return Err(parse(format!(
                "expected {expect} values for {} parties of dimension {}, found {}",
                self.parties,
                self.dim,
                self.values.len()
            )));
        }
        let recomputed: f64 = self.values.iter().sum();
        if (recomputed - self.sum).abs() > 1e-9 {
            return Err(parse(format!(
                "header sum {} disagrees with recomputed sum {recomputed}",
                self.sum
            )));
        }
        WignerGrid::new(dim, self.parties, self.values)
    }
}

/// Renders a grid in the text format.
pub fn grid_to_text(grid: &WignerGrid) -> String {
    let mut out = String::new();
    out.push_str(&format!("format={GRID_FORMAT}\n"));
    out.push_str(&format!("dim={}\n", grid.dim().n()));
    out.push_str(&format!("parties={}\n", grid.parties()));
    out.push_str(&format!("order={ORDER_DESC}\n"));
    out.push_str(&format!("sum={}\n", grid.sum()));
    for v in grid.values() {
        out.push_str(&format!("{v}\n"));
    }
    out
}

/// Parses the text format; `source` names the input in error messages.
pub fn grid_from_text(text: &str, source: &str) -> Result<WignerGrid> {
    let parse = |reason: String| Error::Parse {
        path: source.to_string(),
        reason,
    };
    let mut format = None;
    let mut dim = None;
    let mut parties = None;
    let mut sum = None;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            match key.trim() {
                "format" => format = Some(value.trim().to_string()),
                "dim" => {
                    dim = Some(value.trim().parse::<u64>().map_err(|e| {
                        parse(format!("line {}: bad dim: {e}", lineno + 1))
                    })?)
                }
                "parties" => {
                    parties = Some(value.trim().parse::<usize>().map_err(|e| {
                        parse(format!("line {}: bad parties: {e}", lineno + 1))
                    })?)
                }
                "order" => {}
                "sum" => {
                    sum = Some(value.trim().parse::<f64>().map_err(|e| {
                        parse(format!("line {}: bad sum: {e}", lineno + 1))
                    })?)
                }
                other => {
                    return Err(parse(format!(
                        "line {}: unknown header key `{other}`",
                        lineno + 1
                    )))
                }
            }
        } else {
            values.push(line.parse::<f64>().map_err(|e| {
                parse(format!("line {}: bad value: {e}", lineno + 1))
            })?);
        }
    }
    let doc = GridDocument {
        format: format.ok_or_else(|| parse("missing `format` header".into()))?,
        dim: dim.ok_or_else(|| parse("missing `dim` header".into()))?,
        parties: parties.ok_or_else(|| parse("missing `parties` header".into()))?,
        order: ORDER_DESC.to_string(),
        sum: sum.ok_or_else(|| parse("missing `sum` header".into()))?,
        values,
    };
    doc.into_grid(source)
}

/// Writes the text format to `path`.
pub fn write_grid_text(path: &Path, grid: &WignerGrid) -> Result<()> {
    fs::write(path, grid_to_text(grid))?;
    Ok(())
}

/// Reads the text format from `path`.
pub fn read_grid_text(path: &Path) -> Result<WignerGrid> {
    let text = fs::read_to_string(path)?;
    grid_from_text(&text, &path.display().to_string())
}

/// Writes the JSON document to `path`.
pub fn write_grid_json(path: &Path, grid: &WignerGrid) -> Result<()> {
    let doc = GridDocument::from_grid(grid);
    fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

/// Reads the JSON document from `path`.
pub fn read_grid_json(path: &Path) -> Result<WignerGrid> {
    let text = fs::read_to_string(path)?;
    let doc: GridDocument = serde_json::from_str(&text)?;
    doc.into_grid(&path.display().to_string())
}

/// Reads a grid in either format, keyed on the `.json` extension.
pub fn read_grid(path: &Path) -> Result<WignerGrid> {
    if path.extension().is_some_and(|e| e == "json") {
        read_grid_json(path)
    } else {
        read_grid_text(path)
    }
}

/// Header line of the outcome table.
pub const OUTCOME_TABLE_HEADER: &str = "x2\tp1\tprobability\tfidelity";

/// Renders the per-outcome table: one tab-separated row per trace with the
/// fixed column order (x2, p1, probability, fidelity).
pub fn outcome_table(traces: &[TeleportTrace]) -> String {
    let mut out = String::from(OUTCOME_TABLE_HEADER);
    out.push('\n');
    for t in traces {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            t.outcome.x2, t.outcome.p1, t.outcome.probability, t.fidelity
        ));
    }
    out
}

/// Writes the outcome table to `path`.
pub fn write_outcome_table(path: &Path, traces: &[TeleportTrace]) -> Result<()> {
    fs::write(path, outcome_table(traces))?;
    Ok(())
}

/// Aggregate fidelity statistics of a protocol run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelitySummary {
    /// Hilbert-space dimension.
    pub dim: u64,
    /// Number of traces summarized.
    pub traces: usize,
    /// Mean fidelity over traces.
    pub mean_fidelity: f64,
    /// Smallest fidelity.
    pub min_fidelity: f64,
    /// Largest fidelity.
    pub max_fidelity: f64,
}

impl FidelitySummary {
    /// Summarizes a nonempty set of traces.
    pub fn from_traces(dim: PrimeDimension, traces: &[TeleportTrace]) -> Self {
        let fids: Vec<f64> = traces.iter().map(|t| t.fidelity).collect();
        let mean = fids.iter().sum::<f64>() / fids.len().max(1) as f64;
        Self {
            dim: dim.n(),
            traces: traces.len(),
            mean_fidelity: mean,
            min_fidelity: fids.iter().copied().fold(f64::INFINITY, f64::min),
            max_fidelity: fids.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Writes the summary as JSON.
    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// One row of a fidelity sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRow {
    /// Gaussian kernel width.
    pub width: f64,
    /// Mean fidelity over all outcomes and sampled inputs.
    pub mean_fidelity: f64,
}

/// Renders the sweep table: `width\tmean_fidelity`, one row per width.
pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut out = String::from("width\tmean_fidelity\n");
    for r in rows {
        out.push_str(&format!("{}\t{}\n", r.width, r.mean_fidelity));
    }
    out
}

/// Writes the sweep table to `path`.
pub fn write_sweep_table(path: &Path, rows: &[SweepRow]) -> Result<()> {
    fs::write(path, sweep_table(rows))?;
    Ok(())
}
