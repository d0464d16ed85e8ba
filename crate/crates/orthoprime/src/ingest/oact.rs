//! `OACT1` activation files.
//!
//! Layout (all integers little-endian):
//! `"OACT1"`, `count: u32`, `dim: u32`, then `count` records of
//! `name_len: u16`, `name: [u8; name_len]` (UTF-8), `values: [f32; dim]`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::{io_err, IngestError};

pub const MAGIC: &[u8; 5] = b"OACT1";

#[derive(Clone, Debug, PartialEq)]
pub struct ActivationVector {
    pub stimulus_id: String,
    pub values: Vec<f32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActivationSet {
    pub model: String,
    pub layer: String,
    pub dim: usize,
    pub vectors: Vec<ActivationVector>,
}

impl ActivationSet {
    pub fn get(&self, stimulus_id: &str) -> Option<&ActivationVector> {
        self.vectors.iter().find(|v| v.stimulus_id == stimulus_id)
    }

    pub fn index(&self) -> std::collections::HashMap<&str, &[f32]> {
        self.vectors.iter().map(|v| (v.stimulus_id.as_str(), v.values.as_slice())).collect()
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], IngestError> {
        if self.buf.len() - self.pos < n {
            return Err(IngestError::Truncated { offset: self.pos, needed: n - (self.buf.len() - self.pos), what });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, IngestError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, IngestError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }
}

pub fn decode(buf: &[u8]) -> Result<(usize, Vec<ActivationVector>), IngestError> {
    if buf.len() < MAGIC.len() || &buf[..MAGIC.len()] != MAGIC {
        return Err(IngestError::BadMagic { found: buf[..buf.len().min(5)].to_vec() });
    }
    let mut c = Cursor { buf, pos: MAGIC.len() };
    let count = c.u32("record count")? as usize;
    let dim = c.u32("dimension")? as usize;
    let mut seen = HashSet::with_capacity(count);
    let mut vectors = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let name_len = c.u16("name length")? as usize;
        let at = c.pos;
        let name = std::str::from_utf8(c.take(name_len, "name")?).map_err(|_| IngestError::BadName { offset: at })?;
        let raw = c.take(dim * 4, "vector payload")?;
        let values: Vec<f32> = raw.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect();
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(IngestError::NonFinite { name: name.to_string(), index });
        }
        if !seen.insert(name.to_string()) {
            return Err(IngestError::DuplicateName { name: name.to_string() });
        }
        vectors.push(ActivationVector { stimulus_id: name.to_string(), values });
    }
    if c.pos != buf.len() {
        return Err(IngestError::TrailingBytes { offset: c.pos, extra: buf.len() - c.pos });
    }
    Ok((dim, vectors))
}

pub fn encode(vectors: &[ActivationVector]) -> Result<Vec<u8>, IngestError> {
    let dim = vectors.first().map_or(0, |v| v.values.len());
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(13 + vectors.len() * (dim * 4 + 16));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&u32::try_from(vectors.len()).map_err(|_| IngestError::Format("too many records".into()))?.to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for v in vectors {
        if v.values.len() != dim {
            return Err(IngestError::Dimension { name: v.stimulus_id.clone(), expected: dim, found: v.values.len() });
        }
        if let Some(index) = v.values.iter().position(|x| !x.is_finite()) {
            return Err(IngestError::NonFinite { name: v.stimulus_id.clone(), index });
        }
        if !seen.insert(v.stimulus_id.as_str()) {
            return Err(IngestError::DuplicateName { name: v.stimulus_id.clone() });
        }
        let name = v.stimulus_id.as_bytes();
        let len = u16::try_from(name.len()).map_err(|_| IngestError::Format(format!("name too long: {}", v.stimulus_id)))?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(name);
        for x in &v.values {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Ok(out)
}

/// Reads an `OACT1` file. The model label is the file stem.
pub fn read_activations(path: &Path) -> Result<ActivationSet, IngestError> {
    let buf = fs::read(path).map_err(|e| io_err(path, e))?;
    let (dim, vectors) = decode(&buf)?;
    let model = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    Ok(ActivationSet { model, layer: "penultimate".into(), dim, vectors })
}

pub fn write_activations(path: &Path, vectors: &[ActivationVector]) -> Result<(), IngestError> {
    let buf = encode(vectors)?;
    fs::write(path, buf).map_err(|e| io_err(path, e))
}

/// Hand-written vectors: one `name,v1,v2,...` line per stimulus.
pub fn parse_activation_csv(text: &str) -> Result<Vec<ActivationVector>, IngestError> {
    let mut out: Vec<ActivationVector> = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut cells = line.split(',');
        let name = cells.next().unwrap_or_default().trim().to_string();
        let values = cells
            .map(|c| c.trim().parse::<f32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IngestError::Format(format!("line {}: {e}", i + 1)))?;
        out.push(ActivationVector { stimulus_id: name, values });
    }
    decode(&encode(&out)?).map(|(_, v)| v)
}
