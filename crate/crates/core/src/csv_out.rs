//! Deterministic CSV emission.
//!
//! Reals are written with 10 significant digits (the shortest form, trailing
//! zeros dropped), rows end with a single `\n`, and column order is fixed by a
//! [`ColumnSpec`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Int,
    Real,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub name: &'static str,
    pub kind: ColumnKind,
}

const fn col(name: &'static str, kind: ColumnKind) -> Column {
    Column { name, kind }
}

use ColumnKind::{Int, Real, Text};

/// Ordered column names and kinds of one output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnSpec(pub &'static [Column]);

impl ColumnSpec {
    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.iter().map(|c| c.name)
    }
}

pub const MODERATION_TRACE: ColumnSpec = ColumnSpec(&[
    col("round", Int),
    col("user_type", Text),
    col("signal_count", Int),
    col("belief_post", Real),
    col("action", Text),
    col("m_payoff", Real),
    col("u_payoff", Real),
]);

pub const FREQUENCY_SERIES: ColumnSpec = ColumnSpec(&[
    col("round", Int),
    col("freq_refuse", Real),
    col("freq_filter", Real),
    col("freq_allow", Real),
]);

pub const COALITION_TABLE: ColumnSpec = ColumnSpec(&[
    col("subset_mask", Int),
    col("size", Int),
    col("v", Real),
    col("c", Real),
    col("v_tilde", Real),
]);

pub const ALLOCATION: ColumnSpec = ColumnSpec(&[col("agent", Int), col("shapley", Real)]);

pub const LEARNING_CURVE: ColumnSpec = ColumnSpec(&[
    col("episode", Int),
    col("reward_sum", Real),
    col("epsilon", Real),
]);

pub const GREEDY_POLICY: ColumnSpec = ColumnSpec(&[
    col("agent", Int),
    col("state", Int),
    col("action", Int),
    col("q_value", Real),
    col("greedy", Int),
]);

pub const STRATEGIES: ColumnSpec = ColumnSpec(&[
    col("player", Int),
    col("action", Int),
    col("probability", Real),
]);

pub const PURE_PROFILES: ColumnSpec = ColumnSpec(&[
    col("profile", Int),
    col("player", Int),
    col("action", Int),
    col("label", Text),
    col("payoff", Real),
    col("deviation_gain", Real),
    col("is_nash", Int),
]);

pub const PROFILE_ANALYSIS: ColumnSpec = ColumnSpec(&[
    col("player", Int),
    col("expected_utility", Real),
    col("best_response", Int),
    col("best_response_value", Real),
    col("deviation_gain", Real),
]);

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn kind(&self) -> ColumnKind {
        match self {
            Cell::Int(_) => Int,
            Cell::Real(_) => Real,
            Cell::Text(_) => Text,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Format a real with 10 significant digits, like C's `%.10g`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (9 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Write `records` under the header of `spec`. Every record must match the
/// spec's arity and column kinds.
pub fn emit_csv(records: &[Vec<Cell>], spec: &ColumnSpec, path: &Path) -> Result<(), RunError> {
    let csv_err = |message: String| RunError::Csv {
        path: path.to_path_buf(),
        message,
    };
    for (i, rec) in records.iter().enumerate() {
        if rec.len() != spec.0.len() {
            return Err(csv_err(format!(
                "record {i} has {} fields, spec has {}",
                rec.len(),
                spec.0.len()
            )));
        }
        for (cell, column) in rec.iter().zip(spec.0) {
            if cell.kind() != column.kind {
                return Err(csv_err(format!(
                    "record {i}: column `{}` expects {:?}, got {:?}",
                    column.name,
                    column.kind,
                    cell.kind()
                )));
            }
            if let Cell::Text(s) = cell {
                if !s.is_ascii() {
                    return Err(csv_err(format!("record {i}: non-ASCII text `{s}`")));
                }
            }
        }
    }
    let io_err = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    writer
        .write_record(spec.names())
        .map_err(|e| csv_err(e.to_string()))?;
    for rec in records {
        writer
            .write_record(rec.iter().map(Cell::render))
            .map_err(|e| csv_err(e.to_string()))?;
    }
    let mut inner = writer.into_inner().map_err(|e| csv_err(e.to_string()))?;
    inner.flush().map_err(io_err)
}
