//! Lossless bytestream backends applied to serialized range images.

mod lz77;
mod rle;

pub use lz77::{lz77_decode, lz77_encode, Lz77Params};
pub use rle::{rle_decode, rle_encode};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Bytestream codec, stored as one byte in the stream header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodecId {
    Rle = 0,
    #[default]
    Lz77 = 1,
}

impl CodecId {
    pub const ALL: [CodecId; 2] = [CodecId::Lz77, CodecId::Rle];

    pub fn to_byte(self) -> u8 {
        self as u8
    }

    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(CodecId::Rle),
            1 => Ok(CodecId::Lz77),
            other => Err(Error::param("codec", format!("unknown codec id {other}"))),
        }
    }

    pub fn encode(self, data: &[u8], params: &Lz77Params) -> Result<Vec<u8>> {
        match self {
            CodecId::Rle => Ok(rle_encode(data)),
            CodecId::Lz77 => lz77_encode(data, params),
        }
    }

    pub fn decode(self, data: &[u8], params: &Lz77Params) -> Result<Vec<u8>> {
        match self {
            CodecId::Rle => rle_decode(data),
            CodecId::Lz77 => lz77_decode(data, params),
        }
    }
}

impl fmt::Display for CodecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecId::Rle => "rle",
            CodecId::Lz77 => "lz77",
        })
    }
}

impl FromStr for CodecId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rle" => Ok(CodecId::Rle),
            "lz77" => Ok(CodecId::Lz77),
            _ => Err(Error::param("codec", format!("unknown codec `{s}` (expected rle or lz77)"))),
        }
    }
}
