//! Number formatting shared by the CSV and JSON writers.

use std::fmt::Write as _;

use serde::Serialize;

/// Shortest string that parses back to the same f64.
pub fn short(x: f64) -> String {
    format!("{x:?}")
}

/// 17 significant digits in scientific notation.
pub fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
