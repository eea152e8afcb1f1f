//! `.flicr` stream layout. All multi-byte fields are little-endian.
//!
//! ```text
//! offset size field
//!      0    4 magic "FLCR"
//!      4    1 version (1)
//!      5    1 codec id (0 = RLE, 1 = LZ77)
//!      6    1 bits per point (2..=16, or 32 for raw f32 ranges)
//!      7    2 rows
//!      9    2 cols
//!     11    4 max range, millimeters (u32)
//!     15    4 horizontal FoV start, millidegrees (i32)
//!     19    4 horizontal FoV end, millidegrees (i32)
//!     23    4 vertical FoV top, millidegrees (i32)
//!     27    4 vertical FoV bottom, millidegrees (i32)
//!     31    4 payload length (u32)
//!     35    - payload
//! ```

use crate::codec::CodecId;
use crate::error::{Error, Result};
use crate::range_image::SensorModel;

pub const MAGIC: [u8; 4] = *b"FLCR";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 35;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamHeader {
    pub codec: CodecId,
    pub bpp: u8,
    pub rows: u16,
    pub cols: u16,
    pub max_range_mm: u32,
    pub h_fov_mdeg: (i32, i32),
    pub v_fov_mdeg: (i32, i32),
    pub payload_len: u32,
}

fn mdeg(v: f64, name: &'static str) -> Result<i32> {
    let m = (v * 1000.0).round();
    if m.abs() > i32::MAX as f64 {
        return Err(Error::param(name, format!("{v} degrees does not fit the header")));
    }
    Ok(m as i32)
}

impl StreamHeader {
    /// Header fields for `model`. Values are rounded to whole millimeters and
    /// millidegrees; see [`StreamHeader::model`] for the model they describe.
    pub fn for_model(model: &SensorModel, codec: CodecId, bpp: u8, payload_len: usize) -> Result<Self> {
        let rows = u16::try_from(model.rows).map_err(|_| Error::param("rows", "must be <= 65535"))?;
        let cols = u16::try_from(model.cols).map_err(|_| Error::param("cols", "must be <= 65535"))?;
        let mm = (model.max_range_m * 1000.0).round();
        if !(mm >= 1.0 && mm <= u32::MAX as f64) {
            return Err(Error::param("max_range", format!("{} m does not fit the header", model.max_range_m)));
        }
        let payload_len =
            u32::try_from(payload_len).map_err(|_| Error::param("payload", "longer than 4 GiB"))?;
        Ok(Self {
            codec,
            bpp,
            rows,
            cols,
            max_range_mm: mm as u32,
            h_fov_mdeg: (mdeg(model.h_fov_deg.0, "h_fov")?, mdeg(model.h_fov_deg.1, "h_fov")?),
            v_fov_mdeg: (mdeg(model.v_fov_deg.0, "v_fov")?, mdeg(model.v_fov_deg.1, "v_fov")?),
            payload_len,
        })
    }

    pub fn model(&self) -> SensorModel {
        SensorModel {
            h_fov_deg: (self.h_fov_mdeg.0 as f64 / 1000.0, self.h_fov_mdeg.1 as f64 / 1000.0),
            v_fov_deg: (self.v_fov_mdeg.0 as f64 / 1000.0, self.v_fov_mdeg.1 as f64 / 1000.0),
            cols: self.cols as usize,
            rows: self.rows as usize,
            max_range_m: self.max_range_mm as f64 / 1000.0,
        }
    }

    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.codec.to_byte());
        out.push(self.bpp);
        out.extend_from_slice(&self.rows.to_le_bytes());
        out.extend_from_slice(&self.cols.to_le_bytes());
        out.extend_from_slice(&self.max_range_mm.to_le_bytes());
        for v in [self.h_fov_mdeg.0, self.h_fov_mdeg.1, self.v_fov_mdeg.0, self.v_fov_mdeg.1] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.payload_len.to_le_bytes());
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() {
            return Err(Error::Truncated { what: "magic", needed: MAGIC.len() - bytes.len() });
        }
        let found: [u8; 4] = bytes[..4].try_into().unwrap();
        if found != MAGIC {
            return Err(Error::BadMagic { expected: MAGIC, found });
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated { what: "header", needed: HEADER_LEN - bytes.len() });
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let i32_at = |o: usize| i32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let codec = CodecId::from_byte(bytes[5]).map_err(|e| Error::stream(5, e.to_string()))?;
        let header = Self {
            codec,
            bpp: bytes[6],
            rows: u16_at(7),
            cols: u16_at(9),
            max_range_mm: u32_at(11),
            h_fov_mdeg: (i32_at(15), i32_at(19)),
            v_fov_mdeg: (i32_at(23), i32_at(27)),
            payload_len: u32_at(31),
        };
        header
            .model()
            .validate()
            .map_err(|e| Error::stream(7, format!("invalid sensor model: {e}")))?;
        Ok(header)
    }
}

/// Header plus compressed payload.
#[derive(Debug, Clone, PartialEq)]
pub struct FlicrStream {
    pub header: StreamHeader,
    pub payload: Vec<u8>,
}

impl FlicrStream {
    pub fn total_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.total_len());
        self.header.write(&mut out);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = StreamHeader::parse(bytes)?;
        let body = &bytes[HEADER_LEN..];
        let len = header.payload_len as usize;
        if body.len() < len {
            return Err(Error::Truncated { what: "payload", needed: len - body.len() });
        }
        if body.len() > len {
            return Err(Error::stream(
                HEADER_LEN + len,
                format!("{} trailing bytes after payload", body.len() - len),
            ));
        }
        Ok(Self { header, payload: body.to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FlicrStream {
        let model = SensorModel::hdl64e();
        FlicrStream {
            header: StreamHeader::for_model(&model, CodecId::Lz77, 8, 3).unwrap(),
            payload: vec![9, 8, 7],
        }
    }

    #[test]
    fn layout_is_fixed() {
        let bytes = sample().to_bytes();
        assert_eq!(bytes.len(), HEADER_LEN + 3);
        assert_eq!(&bytes[..4], b"FLCR");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 1);
        assert_eq!(bytes[6], 8);
        assert_eq!(&bytes[7..9], &64u16.to_le_bytes());
        assert_eq!(&bytes[9..11], &4500u16.to_le_bytes());
        assert_eq!(&bytes[11..15], &120_000u32.to_le_bytes());
        assert_eq!(&bytes[15..19], &(-180_000i32).to_le_bytes());
        assert_eq!(&bytes[19..23], &180_000i32.to_le_bytes());
        assert_eq!(&bytes[23..27], &2_000i32.to_le_bytes());
        assert_eq!(&bytes[27..31], &(-24_800i32).to_le_bytes());
        assert_eq!(&bytes[31..35], &3u32.to_le_bytes());
        assert_eq!(&bytes[35..], &[9, 8, 7]);
        assert_eq!(FlicrStream::from_bytes(&bytes).unwrap(), sample());
        assert_eq!(sample().header.model(), SensorModel::hdl64e());
    }

    #[test]
    fn rejects_bad_magic_version_and_lengths() {
        let good = sample().to_bytes();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(FlicrStream::from_bytes(&bad), Err(Error::BadMagic { .. })));
        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(FlicrStream::from_bytes(&bad), Err(Error::UnsupportedVersion(9))));
        let err = FlicrStream::from_bytes(&good[..good.len() - 2]).unwrap_err();
        assert!(matches!(err, Error::Truncated { what: "payload", needed: 2 }), "{err}");
        let err = FlicrStream::from_bytes(&good[..20]).unwrap_err();
        assert!(matches!(err, Error::Truncated { what: "header", needed: 15 }), "{err}");
        let mut long = good.clone();
        long.push(0);
        assert!(FlicrStream::from_bytes(&long).is_err());
        let mut bad = good;
        bad[5] = 7;
        assert!(FlicrStream::from_bytes(&bad).is_err());
    }

    #[test]
    fn oversized_grid_is_rejected() {
        let model = SensorModel::hdl64e().with_resolution(70_000, 64);
        assert!(StreamHeader::for_model(&model, CodecId::Rle, 8, 0).is_err());
    }
}
