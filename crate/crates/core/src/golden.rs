//! Bundled reference tables and their parsers.

use crate::error::{Error, Result};

pub const TABLE1_CSV: &str = include_str!("../data/golden/table1.csv");
pub const TABLE2_CSV: &str = include_str!("../data/golden/table2.csv");
pub const FPF_TYPES_CSV: &str = include_str!("../data/golden/fpf_types.csv");
pub const NIELSEN_EXCEPTIONS_CSV: &str = include_str!("../data/golden/nielsen_exceptions.csv");
pub const TABLE4_CSV: &str = include_str!("../data/golden/table4.csv");

/// Data lines of a CSV file with a header, split on commas (no quoting is used).
pub fn records(src: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = src.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Schema("empty table".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut out = Vec::new();
    for (i, l) in lines.enumerate() {
        let cells: Vec<String> = l.split(',').map(|c| c.trim().to_string()).collect();
        if cells.len() != header.len() {
            return Err(Error::Schema(format!(
                "line {}: {} cells, header has {}",
                i + 2,
                cells.len(),
                header.len()
            )));
        }
        out.push(cells);
    }
    Ok((header, out))
}

pub fn parse_u64(s: &str) -> Result<u64> {
    s.parse().map_err(|_| Error::Schema(format!("expected an integer, got {:?}", s)))
}

/// Space separated integers; empty for `-` or an empty cell.
pub fn parse_list(s: &str) -> Result<Vec<u64>> {
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split_whitespace().map(parse_u64).collect()
}

pub fn format_list(v: &[u64]) -> String {
    if v.is_empty() {
        return "-".into();
    }
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}
