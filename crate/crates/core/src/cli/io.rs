//! Input ingestion and the on-disk BWT and suffix array formats.
//!
//! * BWT file: the transformed bytes, then a footer line `I=<row index>`,
//!   i.e. `<bytes>\nI=<decimal>\n`.
//! * Suffix array file: either a stream of little-endian `u64` entries or
//!   one decimal entry per line.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::text::{BwtResult, CharOrder, Text, TextError};

/// Read at most `max_bytes` raw bytes of `path` as the payload of a text.
pub fn ingest(path: &Path, max_bytes: Option<u64>, order: CharOrder) -> Result<Text> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut payload = Vec::new();
    match max_bytes {
        Some(limit) => file.take(limit).read_to_end(&mut payload),
        None => (&file).read_to_end(&mut payload),
    }
    .with_context(|| format!("cannot read {}", path.display()))?;
    Text::with_order(payload, order).map_err(|e| match e {
        TextError::SentinelInPayload { offset, byte } => anyhow::anyhow!(
            "{}: sentinel byte 0x{byte:02x} occurs in the input at offset {offset}",
            path.display()
        ),
    })
}

pub fn encode_bwt(result: &BwtResult) -> Vec<u8> {
    let mut out = Vec::with_capacity(result.transformed.len() + 24);
    out.extend_from_slice(&result.transformed);
    out.extend_from_slice(format!("\nI={}\n", result.row_index).as_bytes());
    out
}

pub fn decode_bwt(data: &[u8]) -> Result<BwtResult> {
    let Some(body) = data.strip_suffix(b"\n") else {
        bail!("BWT file does not end with a footer line");
    };
    let Some(split) = body.windows(3).rposition(|w| w == b"\nI=") else {
        bail!("BWT file has no `I=` footer");
    };
    let digits = std::str::from_utf8(&body[split + 3..]).context("footer is not UTF-8")?;
    let row_index = digits
        .parse()
        .with_context(|| format!("bad row index {digits:?}"))?;
    Ok(BwtResult {
        transformed: body[..split].to_vec(),
        row_index,
    })
}

pub fn write_bwt(path: &Path, result: &BwtResult) -> Result<()> {
    fs::write(path, encode_bwt(result)).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_bwt(path: &Path) -> Result<BwtResult> {
    let data = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    decode_bwt(&data).with_context(|| format!("malformed BWT file {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SaFormat {
    /// Little-endian 64-bit unsigned integers.
    Le64,
    /// One decimal entry per line.
    Text,
}

pub fn encode_sa(entries: &[usize], format: SaFormat) -> Vec<u8> {
    match format {
        SaFormat::Le64 => entries
            .iter()
            .flat_map(|&e| (e as u64).to_le_bytes())
            .collect(),
        SaFormat::Text => {
            let mut out = Vec::with_capacity(entries.len() * 8);
            for e in entries {
                writeln!(out, "{e}").expect("writing to a Vec cannot fail");
            }
            out
        }
    }
}

pub fn decode_sa(data: &[u8], format: SaFormat) -> Result<Vec<usize>> {
    match format {
        SaFormat::Le64 => {
            if data.len() % 8 != 0 {
                bail!("length {} is not a multiple of 8", data.len());
            }
            data.chunks_exact(8)
                .map(|c| {
                    let v = u64::from_le_bytes(c.try_into().expect("chunk of 8"));
                    usize::try_from(v).context("entry does not fit in usize")
                })
                .collect()
        }
        SaFormat::Text => std::str::from_utf8(data)
            .context("suffix array text is not UTF-8")?
            .lines()
            .enumerate()
            .map(|(i, line)| {
                line.trim()
                    .parse()
                    .with_context(|| format!("line {}: bad entry {line:?}", i + 1))
            })
            .collect(),
    }
}

pub fn write_sa(path: &Path, entries: &[usize], format: SaFormat) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_sa(entries, format))?;
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_sa(path: &Path, format: SaFormat) -> Result<Vec<usize>> {
    let data = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    decode_sa(&data, format).with_context(|| format!("malformed suffix array file {}", path.display()))
}
