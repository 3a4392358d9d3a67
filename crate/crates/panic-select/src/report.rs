//! JSON emission with lossless float formatting.
//!
//! Every float is printed with 17 significant digits, enough to round-trip
//! any f64 exactly, so downstream tools can reproduce results bit for bit.

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::Result;

struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value == value.trunc() && value.abs() < 1e15 {
            // Integral values print plainly; no precision is lost.
            write!(writer, "{value:.1}")
        } else {
            write!(writer, "{value:.16e}")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serialize with 17-significant-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut serializer)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
}
