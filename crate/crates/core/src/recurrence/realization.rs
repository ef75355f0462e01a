use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sources::Alphabet;

/// A finite stretch `x_{-W+1}, …, x_0, x_1, …, x_F` of a realization.
///
/// `origin` is the array index of `x_0`; everything at or before it is the
/// past, everything after it is the present block and its continuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    data: Vec<u8>,
    origin: usize,
    alphabet: Alphabet,
}

#[derive(Debug, Serialize, Deserialize)]
struct DumpHeader {
    origin: usize,
    alphabet_size: usize,
}

impl Realization {
    pub fn new(data: Vec<u8>, origin: usize, alphabet: Alphabet) -> Result<Self> {
        if origin >= data.len() {
            return Err(Error::InvalidParameter(format!(
                "origin {origin} outside realization of length {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|&s| !alphabet.contains(s)) {
            return Err(Error::InvalidParameter(format!(
                "symbol {} at index {i} outside alphabet of size {}",
                data[i],
                alphabet.size()
            )));
        }
        Ok(Self { data, origin, alphabet })
    }

    /// Builds `past ++ present` with the origin on the last past symbol.
    pub fn from_parts(past: &[u8], present: &[u8], alphabet: Alphabet) -> Result<Self> {
        if past.is_empty() {
            return Err(Error::InsufficientPast { needed: 1, available: 0 });
        }
        let mut data = past.to_vec();
        data.extend_from_slice(present);
        Self::new(data, past.len() - 1, alphabet)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// `W`, the number of symbols at or before `x_0`.
    pub fn past_len(&self) -> usize {
        self.origin + 1
    }

    /// `F`, the number of symbols from `x_1` on.
    pub fn future_len(&self) -> usize {
        self.data.len() - self.origin - 1
    }

    /// `x_1^n`, if available.
    pub fn present(&self, n: usize) -> Option<&[u8]> {
        self.data.get(self.origin + 1..self.origin + 1 + n)
    }

    /// Array index of `x_1`.
    pub(crate) fn present_start(&self) -> usize {
        self.origin + 1
    }

    pub(crate) fn prepend(&mut self, chunk: &[u8]) {
        let mut data = Vec::with_capacity(chunk.len() + self.data.len());
        data.extend_from_slice(chunk);
        data.extend_from_slice(&self.data);
        self.data = data;
        self.origin += chunk.len();
    }

    /// One JSON header line `{"origin":…,"alphabet_size":…}` followed by the
    /// raw symbol bytes.
    pub fn dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header = DumpHeader { origin: self.origin, alphabet_size: self.alphabet.size() };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        out.write_all(&self.data)
    }

    pub fn load<R: BufRead>(mut input: R) -> Result<Self> {
        let mut line = String::new();
        input
            .read_line(&mut line)
            .map_err(|e| Error::InvalidParameter(format!("realization header: {e}")))?;
        let header: DumpHeader = serde_json::from_str(line.trim_end())
            .map_err(|e| Error::InvalidParameter(format!("realization header: {e}")))?;
        let mut data = Vec::new();
        input
            .read_to_end(&mut data)
            .map_err(|e| Error::InvalidParameter(format!("realization body: {e}")))?;
        Self::new(data, header.origin, Alphabet::new(header.alphabet_size)?)
    }
}
