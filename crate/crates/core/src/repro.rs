//! Reproduction of the reference tables, cell by cell.

use serde::Serialize;

use crate::error::{FqError, Result};
use crate::fixtures;
use crate::pattern::{count_pattern, PatternCountReport};
use crate::prime::OddPrime;
use crate::table::FermatQuotientTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableId {
    T1,
    A11,
    A12,
    A2,
}

impl TableId {
    pub const ALL: [TableId; 4] = [TableId::T1, TableId::A11, TableId::A12, TableId::A2];

    pub fn parse(text: &str) -> Result<Self> {
        match text.to_ascii_uppercase().as_str() {
            "T1" | "1" => Ok(TableId::T1),
            "A11" => Ok(TableId::A11),
            "A12" => Ok(TableId::A12),
            "A2" => Ok(TableId::A2),
            other => Err(FqError::InvalidArgument(format!("unknown table {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TableId::T1 => "T1",
            TableId::A11 => "A11",
            TableId::A12 => "A12",
            TableId::A2 => "A2",
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CellCheck {
    pub cell: String,
    pub expected: String,
    pub actual: String,
    pub matched: bool,
}

impl CellCheck {
    fn new(cell: String, expected: impl ToString, actual: impl ToString) -> Self {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let matched = expected == actual;
        CellCheck {
            cell,
            expected,
            actual,
            matched,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproRow {
    pub row: u32,
    pub listed_vectors: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub report: PatternCountReport,
    pub ratio_truncated: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub table: TableId,
    pub prime: OddPrime,
    pub all_match: bool,
    pub cells_checked: usize,
    pub mismatches: Vec<CellCheck>,
    pub rows: Vec<ReproRow>,
    pub cells: Vec<CellCheck>,
}

fn finish(table: TableId, prime: OddPrime, rows: Vec<ReproRow>, cells: Vec<CellCheck>) -> ReproReport {
    let mismatches: Vec<CellCheck> = cells.iter().filter(|c| !c.matched).cloned().collect();
    ReproReport {
        table,
        prime,
        all_match: mismatches.is_empty(),
        cells_checked: cells.len(),
        mismatches,
        rows,
        cells,
    }
}

/// Three-decimal truncation of `p^2 / (N! count)`, the form the ratio
/// columns are listed in.
pub fn format_ratio_milli(milli: Option<u128>) -> String {
    match milli {
        Some(m) => format!("{}.{:03}", m / 1000, m % 1000),
        None => "inf".to_string(),
    }
}

pub fn reproduce(id: TableId) -> Result<ReproReport> {
    match id {
        TableId::T1 => reproduce_table1(),
        _ => reproduce_pattern_table(id),
    }
}

fn reproduce_table1() -> Result<ReproReport> {
    let p = OddPrime::new(11)?;
    let t = FermatQuotientTable::build(p);
    let expected = fixtures::table1();
    let mut cells = Vec::new();
    for (i, &inv) in expected.inverses.iter().enumerate() {
        cells.push(CellCheck::new(format!("inv[{}]", i + 1), inv, t.inverse(i as u64 + 1)));
    }
    for (a, row) in expected.rows.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            let b = j as u64 + 1;
            cells.push(CellCheck::new(format!("A[{a}][{b}]"), want, t.entry_raw(a as u64, b)));
        }
    }
    Ok(finish(TableId::T1, p, Vec::new(), cells))
}

fn reproduce_pattern_table(id: TableId) -> Result<ReproReport> {
    let spec = fixtures::pattern_table(id.name())
        .ok_or_else(|| FqError::InvalidArgument(format!("no fixture for {}", id.name())))?;
    let p = OddPrime::new(spec.prime)?;
    let t = FermatQuotientTable::build(p);
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for row in &spec.rows {
        let report = count_pattern(&t, &row.pattern()?, &row.permutation()?)?;
        let ratio = format_ratio_milli(report.ratio_milli_truncated());
        let r = row.row;
        cells.push(CellCheck::new(
            format!("row {r} #G"),
            row.region_card,
            report.region_card,
        ));
        cells.push(CellCheck::new(format!("row {r} count"), row.count, report.count));
        cells.push(CellCheck::new(format!("row {r} ratio"), &row.ratio, &ratio));
        rows.push(ReproRow {
            row: r,
            listed_vectors: row.listed_vectors.clone(),
            note: row.note.clone(),
            report,
            ratio_truncated: ratio,
        });
    }
    Ok(finish(id, p, rows, cells))
}
