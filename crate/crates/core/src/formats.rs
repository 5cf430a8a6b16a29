//! Code and vector files.
//!
//! Both start with a text header line, `BPV-CODES v1 <c> <N>` or
//! `BPV-VECS v1 <d> <N>`, followed by `N` records of a `u16` little-endian
//! id length, the UTF-8 id, and the payload: `ceil(c/8)` code bytes, or `d`
//! little-endian `f32`s.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::BinaryCode;

pub type CodeRecord = (String, BinaryCode);
pub type VectorRecord = (String, Vec<f32>);

const CODES_TAG: &str = "BPV-CODES";
const VECS_TAG: &str = "BPV-VECS";

fn write_id<W: Write>(out: &mut W, id: &str) -> Result<()> {
    let len = u16::try_from(id.len())
        .map_err(|_| Error::format(format!("document {id:.40?}"), "id longer than 65535 bytes"))?;
    out.write_all(&len.to_le_bytes())?;
    out.write_all(id.as_bytes())?;
    Ok(())
}

fn read_id<R: Read>(input: &mut R, source: &str, record: usize) -> Result<String> {
    let loc = || format!("{source}: record {record}");
    let mut len = [0u8; 2];
    input.read_exact(&mut len).map_err(|_| Error::format(loc(), "truncated record"))?;
    let mut id = vec![0u8; u16::from_le_bytes(len) as usize];
    input.read_exact(&mut id).map_err(|_| Error::format(loc(), "truncated id"))?;
    String::from_utf8(id).map_err(|_| Error::format(loc(), "id is not valid UTF-8"))
}

fn read_header<R: BufRead>(input: &mut R, tag: &str, source: &str) -> Result<(usize, usize)> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let fields: Vec<&str> = line.trim_end_matches('\n').split(' ').collect();
    match fields[..] {
        [t, "v1", width, n] if t == tag => {
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::format(format!("{source}: header"), format!("bad number {s:?}")))
            };
            Ok((parse(width)?, parse(n)?))
        }
        _ => Err(Error::format(
            format!("{source}: header"),
            format!("expected \"{tag} v1 <width> <count>\", got {:?}", line.trim_end()),
        )),
    }
}

fn expect_eof<R: Read>(input: &mut R, source: &str) -> Result<()> {
    let mut probe = [0u8; 1];
    if input.read(&mut probe)? != 0 {
        return Err(Error::format(source.to_owned(), "trailing bytes after the last record"));
    }
    Ok(())
}

pub fn write_codes<W: Write>(mut out: W, bits: usize, records: &[CodeRecord]) -> Result<()> {
    writeln!(out, "{CODES_TAG} v1 {bits} {}", records.len())?;
    for (id, code) in records {
        if code.width() != bits {
            return Err(Error::WidthMismatch(bits, code.width()));
        }
        write_id(&mut out, id)?;
        out.write_all(&code.to_bytes())?;
    }
    Ok(())
}

/// Returns the code width and the records in file order.
pub fn read_codes<R: BufRead>(mut input: R, source: &str) -> Result<(usize, Vec<CodeRecord>)> {
    let (bits, n) = read_header(&mut input, CODES_TAG, source)?;
    let mut bytes = vec![0u8; bits.div_ceil(8)];
    let mut records = Vec::with_capacity(n.min(1 << 20));
    for i in 0..n {
        let id = read_id(&mut input, source, i)?;
        input
            .read_exact(&mut bytes)
            .map_err(|_| Error::format(format!("{source}: record {i}"), "truncated code"))?;
        let code = BinaryCode::from_bytes(&bytes, bits)
            .map_err(|e| Error::format(format!("{source}: record {i}"), e.to_string()))?;
        records.push((id, code));
    }
    expect_eof(&mut input, source)?;
    Ok((bits, records))
}

pub fn write_vectors<W: Write>(mut out: W, dim: usize, records: &[VectorRecord]) -> Result<()> {
    writeln!(out, "{VECS_TAG} v1 {dim} {}", records.len())?;
    for (id, v) in records {
        if v.len() != dim {
            return Err(Error::shape(dim, v.len()));
        }
        write_id(&mut out, id)?;
        for x in v {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_vectors<R: BufRead>(mut input: R, source: &str) -> Result<(usize, Vec<VectorRecord>)> {
    let (dim, n) = read_header(&mut input, VECS_TAG, source)?;
    let mut bytes = vec![0u8; dim * 4];
    let mut records = Vec::with_capacity(n.min(1 << 20));
    for i in 0..n {
        let id = read_id(&mut input, source, i)?;
        input
            .read_exact(&mut bytes)
            .map_err(|_| Error::format(format!("{source}: record {i}"), "truncated vector"))?;
        let v = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        records.push((id, v));
    }
    expect_eof(&mut input, source)?;
    Ok((dim, records))
}

pub fn save_codes(path: &Path, bits: usize, records: &[CodeRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_codes(&mut out, bits, records)?;
    out.flush()?;
    Ok(())
}

pub fn load_codes(path: &Path) -> Result<(usize, Vec<CodeRecord>)> {
    read_codes(BufReader::new(File::open(path)?), &path.display().to_string())
}

pub fn save_vectors(path: &Path, dim: usize, records: &[VectorRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_vectors(&mut out, dim, records)?;
    out.flush()?;
    Ok(())
}

pub fn load_vectors(path: &Path) -> Result<(usize, Vec<VectorRecord>)> {
    read_vectors(BufReader::new(File::open(path)?), &path.display().to_string())
}
