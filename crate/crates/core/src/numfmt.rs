//! Fixed-width real formatting shared by every output file.
//!
//! All reals in output CSVs and encoder JSON documents are printed with 17
//! significant digits ('.' decimal separator, no grouping), which is enough
//! for exact f64 round-trips.

use serde::Serialize;

use crate::error::{Error, Result};

/// 17-significant-digit scientific form, e.g. `1.8700000000000001e0`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize to JSON with the 17-significant-digit float convention and a
/// trailing newline. Field order follows struct declaration order.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Serialization(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn from_json_str<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))
}
