//! Reference tables, embedded from `fixtures/`.

use serde::Deserialize;

use crate::error::{FqError, Result};
use crate::pattern::{DisplacementPattern, Permutation};

pub const TABLE1_CSV: &str = include_str!("../fixtures/table1.csv");
pub const PATTERN_TABLES_JSON: &str = include_str!("../fixtures/pattern_tables.json");

/// The matrix for `p = 11` and its inverse row.
#[derive(Debug, Clone)]
pub struct Table1 {
    pub inverses: Vec<u64>,
    pub rows: Vec<Vec<u64>>,
}

pub fn table1() -> Table1 {
    let mut lines = TABLE1_CSV.lines().skip(1);
    let parse = |line: &str| -> Vec<u64> {
        line.split(',')
            .skip(1)
            .map(|x| x.parse().expect("fixture cell"))
            .collect()
    };
    let inverses = parse(lines.next().expect("inverse row"));
    let rows = lines.filter(|l| !l.is_empty()).map(parse).collect();
    Table1 { inverses, rows }
}

#[derive(Debug, Clone, Deserialize)]
pub struct PatternTableRow {
    pub row: u32,
    pub sigma: String,
    pub listed_vectors: String,
    pub region_card: u64,
    pub count: u64,
    pub ratio: String,
    #[serde(default)]
    pub vectors_override: Option<String>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PatternTable {
    pub id: String,
    pub prime: i64,
    pub rows: Vec<PatternTableRow>,
}

#[derive(Debug, Deserialize)]
struct PatternTableFile {
    tables: Vec<PatternTable>,
}

pub fn pattern_tables() -> Vec<PatternTable> {
    serde_json::from_str::<PatternTableFile>(PATTERN_TABLES_JSON)
        .expect("embedded pattern table fixture")
        .tables
}

pub fn pattern_table(id: &str) -> Option<PatternTable> {
    pattern_tables().into_iter().find(|t| t.id.eq_ignore_ascii_case(id))
}

fn integers(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| !(c.is_ascii_digit() || c == '-'))
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<i64>()
                .map_err(|_| FqError::InvalidArgument(format!("bad integer in {text:?}")))
        })
        .collect()
}

/// Parses `"(s1, t1), (s2, t2), ..."`.
pub fn parse_listed_vectors(text: &str) -> Result<DisplacementPattern> {
    let xs = integers(text)?;
    if xs.len() % 2 != 0 {
        return Err(FqError::InvalidArgument(format!(
            "odd number of components in {text:?}"
        )));
    }
    DisplacementPattern::new(xs.chunks(2).map(|c| (c[0], c[1])).collect())
}

/// Parses `"(2, 4, 1, 3)"`.
pub fn parse_listed_permutation(text: &str) -> Result<Permutation> {
    let xs = integers(text)?;
    let images: Vec<usize> = xs.iter().map(|&x| x.max(0) as usize).collect();
    Permutation::from_one_based(&images)
}

impl PatternTableRow {
    /// The vectors actually used: the override when the listed ones are
    /// inconsistent with the listed counts.
    pub fn pattern(&self) -> Result<DisplacementPattern> {
        parse_listed_vectors(self.vectors_override.as_deref().unwrap_or(&self.listed_vectors))
    }

    pub fn permutation(&self) -> Result<Permutation> {
        parse_listed_permutation(&self.sigma)
    }
}
