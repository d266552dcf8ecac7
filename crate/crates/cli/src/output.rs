//! Rendering of result tables as aligned text, CSV or JSON.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use kodaira_core::fibration::{format_rational, InvariantRow};

use crate::schema::canonical_json;
use crate::Failure;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

const MAX_SAFE: i64 = (1 << 53) - 1;

/// A JSON number when it is exactly representable as a double, else a string.
pub fn json_int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if (-MAX_SAFE..=MAX_SAFE).contains(&v) => json!(v),
        _ => json!(x.to_string()),
    }
}

pub fn row_json(r: &InvariantRow) -> Value {
    json!({
        "g_b1": json_int(&r.g_b1),
        "g_f1": json_int(&r.g_f1),
        "g_b2": json_int(&r.g_b2),
        "g_f2": json_int(&r.g_f2),
        "c2": json_int(&r.c2),
        "c1_sq": json_int(&r.c1_sq),
        "sigma": json_int(&r.sigma),
        "slope": format_rational(&r.slope),
    })
}

/// String cells for text and CSV output, plus a JSON record per row.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub records: Vec<Value>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Table {
        Table { header: header.into_iter().map(Into::into).collect(), ..Table::default() }
    }

    pub fn push(&mut self, cells: Vec<String>, record: Value) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().zip(&widths).map(|(c, &w)| format!("{}{}", c, " ".repeat(w - c.chars().count()))).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out += &line(&rule);
        for r in &self.rows {
            out += &line(r);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let esc = |c: &String| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        };
        let mut out = self.header.iter().map(esc).collect::<Vec<_>>().join(",") + "\n";
        for r in &self.rows {
            out += &(r.iter().map(esc).collect::<Vec<_>>().join(",") + "\n");
        }
        out
    }

    pub fn to_json(&self) -> String {
        canonical_json(&Value::Array(self.records.clone()))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_text(),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes `<name>.csv` and `<name>.json` into `dir`.
    pub fn write_files(&self, dir: &Path, name: &str) -> Result<(), Failure> {
        let io = |e: std::io::Error| Failure::Io(format!("{}: {}", dir.display(), e));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join(format!("{}.csv", name)), self.to_csv()).map_err(io)?;
        fs::write(dir.join(format!("{}.json", name)), self.to_json()).map_err(io)?;
        Ok(())
    }
}

/// `key: value` lines for text output of a single JSON object.
pub fn key_values(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(m) = v {
        write_object(&mut out, m, "");
    }
    out
}

fn write_object(out: &mut String, m: &Map<String, Value>, indent: &str) {
    for (k, v) in m {
        match v {
            Value::Object(inner) => {
                out.push_str(&format!("{}{}:\n", indent, k));
                write_object(out, inner, &format!("{}  ", indent));
            }
            Value::String(s) => out.push_str(&format!("{}{}: {}\n", indent, k, s)),
            other => out.push_str(&format!("{}{}: {}\n", indent, k, other)),
        }
    }
}
