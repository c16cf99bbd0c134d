//! Serializing generator output for other programs.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generators::RomuState;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EmitFormat {
    /// Each value little-endian at its natural width (1, 2, 4 or 8 bytes).
    #[default]
    RawLe,
    /// One zero-padded lowercase hex value per line.
    Hex,
    DecimalLines,
}

impl EmitFormat {
    pub fn name(self) -> &'static str {
        match self {
            EmitFormat::RawLe => "raw_le",
            EmitFormat::Hex => "hex",
            EmitFormat::DecimalLines => "decimal_lines",
        }
    }
}

impl fmt::Display for EmitFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw_le" | "raw" => Ok(EmitFormat::RawLe),
            "hex" => Ok(EmitFormat::Hex),
            "decimal_lines" | "decimal" => Ok(EmitFormat::DecimalLines),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

/// Writes the next `count` outputs of `state` to `out`.
pub fn emit<W: Write + ?Sized>(state: &mut RomuState, count: u64, format: EmitFormat, out: &mut W) -> Result<()> {
    let bytes = state.spec().output_bytes();
    let digits = state.spec().output_bits().div_ceil(4) as usize;
    let mut buf = Vec::with_capacity(1 << 16);
    for _ in 0..count {
        let v = state.next_value();
        match format {
            EmitFormat::RawLe => buf.extend_from_slice(&v.to_le_bytes()[..bytes]),
            EmitFormat::Hex => writeln!(buf, "{v:0digits$x}")?,
            EmitFormat::DecimalLines => writeln!(buf, "{v}")?,
        }
        if buf.len() >= (1 << 16) - 32 {
            out.write_all(&buf)?;
            buf.clear();
        }
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

/// [`emit`] into a vector.
pub fn emit_to_vec(state: &mut RomuState, count: u64, format: EmitFormat) -> Vec<u8> {
    let mut v = Vec::new();
    emit(state, count, format, &mut v).expect("writing to a Vec cannot fail");
    v
}
