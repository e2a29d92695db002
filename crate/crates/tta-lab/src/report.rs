//! Deterministic report serialization.
//!
//! Reports are JSON with struct-declaration key order and every `f64`
//! printed as a 17-significant-digit scientific literal, which round-trips
//! exactly and makes identical runs byte-identical — golden files and
//! cross-run diffs stay stable.

use std::io;

use serde::{Serialize, Serializer};
use serde_json::ser::Formatter;

use crate::error::Result;

/// Compact JSON formatter that pins `f64` output to 17 significant digits.
struct SigFigFormatter;

impl Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{:.16e}", value)
    }
}

/// Serialize a report to its canonical byte representation (trailing
/// newline included).
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buffer = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut buffer, SigFigFormatter);
    value.serialize(&mut serializer)?;
    buffer.push(b'\n');
    Ok(String::from_utf8(buffer).expect("JSON serializer emits UTF-8"))
}

/// JSON has no infinity literal; condition numbers use the string sentinel
/// `"inf"` instead of silently degrading to null.
pub fn serialize_f64_or_inf<S: Serializer>(
    value: &f64,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    if value.is_finite() {
        serializer.serialize_f64(*value)
    } else {
        serializer.serialize_str("inf")
    }
}
