//! Tensor file formats.
//!
//! `t3b`: the 4 magic bytes `T3B1`, then `m1, m2, m3` as little-endian `u32`,
//! then `m1 * m2 * m3` little-endian IEEE-754 doubles in row-major order.
//!
//! `csv`: a header line `m1,m2,m3` followed by one value per line in
//! row-major order.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

pub const T3B_MAGIC: &[u8; 4] = b"T3B1";
const T3B_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorFormat {
    T3b,
    Csv,
}

impl TensorFormat {
    /// Picks the format from the file extension, defaulting to t3b.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => TensorFormat::Csv,
            _ => TensorFormat::T3b,
        }
    }
}

impl FromStr for TensorFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t3b" => Ok(TensorFormat::T3b),
            "csv" => Ok(TensorFormat::Csv),
            other => Err(Error::Argument(format!("unknown tensor format '{other}'"))),
        }
    }
}

pub fn load_tensor(path: impl AsRef<Path>, format: TensorFormat) -> Result<Tensor3> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        TensorFormat::T3b => decode_t3b(&bytes),
        TensorFormat::Csv => decode_csv(&bytes),
    }
}

pub fn save_tensor(t: &Tensor3, path: impl AsRef<Path>, format: TensorFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        TensorFormat::T3b => encode_t3b(t)?,
        TensorFormat::Csv => encode_csv(t).into_bytes(),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn encode_t3b(t: &Tensor3) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(T3B_HEADER_LEN + 8 * t.data().len());
    out.extend_from_slice(T3B_MAGIC);
    for d in t.dims() {
        let d = u32::try_from(d).map_err(|_| Error::Argument(format!("dimension {d} does not fit in u32")))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_t3b(bytes: &[u8]) -> Result<Tensor3> {
    if bytes.len() < 4 || &bytes[..4] != T3B_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: "missing T3B1 magic".into(),
        });
    }
    if bytes.len() < T3B_HEADER_LEN {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: "truncated header".into(),
        });
    }
    let mut dims = [0usize; 3];
    for (a, d) in dims.iter_mut().enumerate() {
        let at = 4 + 4 * a;
        let raw = u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
        if raw == 0 {
            return Err(Error::Format {
                offset: at as u64,
                message: format!("dimension {} is zero", a + 1),
            });
        }
        *d = raw as usize;
    }
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format {
            offset: 4,
            message: "dimension product overflows".into(),
        })?;
    let payload = &bytes[T3B_HEADER_LEN..];
    if payload.len() != count * 8 {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: format!(
                "expected {count} values ({} payload bytes), found {} bytes",
                count * 8,
                payload.len()
            ),
        });
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Tensor3::from_vec(dims, data)
}

pub fn encode_csv(t: &Tensor3) -> String {
    let [m1, m2, m3] = t.dims();
    let mut out = format!("{m1},{m2},{m3}\n");
    for v in t.data() {
        // Display for f64 prints the shortest string that round-trips.
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn decode_csv(bytes: &[u8]) -> Result<Tensor3> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Format {
        offset: e.valid_up_to() as u64,
        message: "invalid UTF-8".into(),
    })?;
    let mut offset = 0u64;
    let mut lines = text.split_inclusive('\n').map(|raw| {
        let at = offset;
        offset += raw.len() as u64;
        (at, raw.trim())
    });

    let (_, header) = lines.next().ok_or_else(|| Error::Format {
        offset: 0,
        message: "empty file".into(),
    })?;
    let dims: Vec<usize> = header
        .split(',')
        .map(|f| f.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Format {
            offset: 0,
            message: format!("bad header '{header}': {e}"),
        })?;
    let dims: [usize; 3] = dims.try_into().map_err(|_| Error::Format {
        offset: 0,
        message: format!("header must list three dimensions, got '{header}'"),
    })?;
    if dims.contains(&0) {
        return Err(Error::Format {
            offset: 0,
            message: "zero dimension".into(),
        });
    }
    let count: usize = dims.iter().product();
    let mut data = Vec::with_capacity(count);
    for (at, line) in lines {
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Format {
            offset: at,
            message: format!("cannot parse value '{line}'"),
        })?;
        if data.len() == count {
            return Err(Error::Format {
                offset: at,
                message: format!("more than {count} values"),
            });
        }
        data.push(v);
    }
    if data.len() != count {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: format!("expected {count} values, found {}", data.len()),
        });
    }
    Tensor3::from_vec(dims, data)
}
