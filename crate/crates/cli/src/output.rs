//! Shared formatting for TSV and JSON output.

use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Four decimal places, `NA` when absent.
pub fn fmt4(value: Option<f64>) -> String {
    value.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"))
}

/// The value JSON output carries for a TSV cell written by [`fmt4`].
pub fn round4(value: Option<f64>) -> Option<f64> {
    value.map(|v| (v * 1e4).round() / 1e4)
}

/// Labels come from file names; keep them to a single TSV cell.
pub fn cell(text: &str) -> String {
    text.replace(['\t', '\n', '\r'], " ")
}

pub fn timestamp(deterministic: bool) -> Option<u64> {
    if deterministic {
        return None;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

pub fn write_stdout(content: &str) -> io::Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(content.as_bytes())?;
    out.flush()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt4(Some(3.219_56)), "3.2196");
        assert_eq!(fmt4(None), "NA");
        assert_eq!(round4(Some(1.320_886)), Some(1.3209));
        assert_eq!(cell("a\tb\nc"), "a b c");
        assert_eq!(timestamp(true), None);
    }
}
