//! End-to-end encoder and decoder: project, quantize, serialize, compress.

mod container;

pub use container::{FlicrStream, StreamHeader, HEADER_LEN, MAGIC, VERSION};

use std::time::Instant;

use serde::Serialize;

use crate::codec::{CodecId, Lz77Params};
use crate::error::{Error, Result};
use crate::pointcloud::PointCloud;
use crate::range_image::{
    dequantize, project, project_par, quantize, reconstruct, reconstruct_par, QuantizedRangeImage,
    RangeImage, SensorModel, BPP_RANGE,
};

/// `bpp` value selecting unquantized little-endian f32 ranges.
pub const FLOAT32_BPP: u8 = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlicrConfig {
    pub model: SensorModel,
    /// Bits per point in [`BPP_RANGE`], or [`FLOAT32_BPP`] to skip quantization.
    pub bpp: u8,
    pub codec: CodecId,
    pub lz77: Lz77Params,
    /// Use the data-parallel projection and reconstruction.
    pub parallel: bool,
}

impl Default for FlicrConfig {
    fn default() -> Self {
        Self {
            model: SensorModel::hdl64e(),
            bpp: 8,
            codec: CodecId::Lz77,
            lz77: Lz77Params::default(),
            parallel: false,
        }
    }
}

impl FlicrConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(BPP_RANGE.contains(&self.bpp) || self.bpp == FLOAT32_BPP) {
            return Err(Error::param("bpp", format!("{} outside {BPP_RANGE:?} (or 32 for f32)", self.bpp)));
        }
        self.lz77.validate()
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Per-stage wall-clock times of one encode, in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EncodeStats {
    pub t_project_ms: f64,
    pub t_quantize_ms: f64,
    pub t_serialize_ms: f64,
    pub t_compress_ms: f64,
    pub t_total_ms: f64,
    pub raw_bytes: usize,
    pub compressed_bytes: usize,
    pub dropped_points: usize,
}

impl EncodeStats {
    pub fn stage_sum_ms(&self) -> f64 {
        self.t_project_ms + self.t_quantize_ms + self.t_serialize_ms + self.t_compress_ms
    }
}

/// Per-stage wall-clock times of one decode, in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DecodeStats {
    pub t_decompress_ms: f64,
    pub t_deserialize_ms: f64,
    pub t_dequantize_ms: f64,
    pub t_reconstruct_ms: f64,
    pub t_total_ms: f64,
    pub points: usize,
}

/// Grid carried by a stream, before reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum DecodedGrid {
    Quantized(QuantizedRangeImage),
    Float(RangeImage),
}

/// The model actually encoded: `model` rounded to the header's integer units.
pub fn stream_model(model: &SensorModel) -> Result<SensorModel> {
    Ok(StreamHeader::for_model(model, CodecId::Lz77, 8, 0)?.model())
}

pub fn encode(pc: &PointCloud, cfg: &FlicrConfig) -> Result<(FlicrStream, EncodeStats)> {
    cfg.validate()?;
    let start = Instant::now();
    let model = stream_model(&cfg.model)?;
    model.validate()?;

    let t = Instant::now();
    let ri = if cfg.parallel { project_par(pc, &model) } else { project(pc, &model) };
    let t_project_ms = ms_since(t);

    let (bytes, t_quantize_ms, t_serialize_ms) = if cfg.bpp == FLOAT32_BPP {
        let t = Instant::now();
        let bytes = ri.to_f32_bytes();
        (bytes, 0.0, ms_since(t))
    } else {
        let t = Instant::now();
        let q = quantize(&ri, cfg.bpp)?;
        let t_q = ms_since(t);
        let t = Instant::now();
        let bytes = q.to_bytes();
        (bytes, t_q, ms_since(t))
    };

    let t = Instant::now();
    let payload = cfg.codec.encode(&bytes, &cfg.lz77)?;
    let t_compress_ms = ms_since(t);

    let header = StreamHeader::for_model(&model, cfg.codec, cfg.bpp, payload.len())?;
    let stream = FlicrStream { header, payload };
    let stats = EncodeStats {
        t_project_ms,
        t_quantize_ms,
        t_serialize_ms,
        t_compress_ms,
        t_total_ms: ms_since(start),
        raw_bytes: pc.raw_bytes(),
        compressed_bytes: stream.total_len(),
        dropped_points: ri.dropped_points,
    };
    Ok((stream, stats))
}

/// Decompresses and deserializes the grid without reconstructing points.
pub fn decode_grid(stream: &FlicrStream, lz77: &Lz77Params) -> Result<DecodedGrid> {
    let h = &stream.header;
    let model = h.model();
    let bytes = h.codec.decode(&stream.payload, lz77)?;
    grid_from_bytes(model, h.bpp, &bytes)
}

fn grid_from_bytes(model: SensorModel, bpp: u8, bytes: &[u8]) -> Result<DecodedGrid> {
    if bpp != FLOAT32_BPP {
        return QuantizedRangeImage::from_bytes(model, bpp, bytes).map(DecodedGrid::Quantized);
    }
    let expected = model.cells() * 4;
    if bytes.len() != expected {
        return Err(Error::stream(
            bytes.len().min(expected),
            format!("grid needs {expected} f32 bytes, payload decoded to {}", bytes.len()),
        ));
    }
    let mut ranges = Vec::with_capacity(model.cells());
    for (i, c) in bytes.chunks_exact(4).enumerate() {
        let r = f32::from_le_bytes(c.try_into().unwrap()) as f64;
        if !(r.is_finite() && r >= 0.0 && r <= model.max_range_m * (1.0 + 1e-6)) {
            return Err(Error::stream(i * 4, format!("range {r} outside [0, {}]", model.max_range_m)));
        }
        ranges.push(r.min(model.max_range_m));
    }
    Ok(DecodedGrid::Float(RangeImage { model, ranges, dropped_points: 0 }))
}

/// Decodes with default LZ77 match bounds.
pub fn decode(stream: &FlicrStream) -> Result<(PointCloud, DecodeStats)> {
    decode_with(stream, &Lz77Params::default(), false)
}

/// `lz77` must carry the match bounds the stream was encoded with.
pub fn decode_with(stream: &FlicrStream, lz77: &Lz77Params, parallel: bool) -> Result<(PointCloud, DecodeStats)> {
    let start = Instant::now();
    let h = &stream.header;
    if h.payload_len as usize != stream.payload.len() {
        return Err(Error::Truncated {
            what: "payload",
            needed: (h.payload_len as usize).saturating_sub(stream.payload.len()),
        });
    }

    let t = Instant::now();
    let bytes = h.codec.decode(&stream.payload, lz77)?;
    let t_decompress_ms = ms_since(t);

    let t = Instant::now();
    let grid = grid_from_bytes(h.model(), h.bpp, &bytes)?;
    let t_deserialize_ms = ms_since(t);

    let t = Instant::now();
    let ri = match grid {
        DecodedGrid::Quantized(q) => dequantize(&q),
        DecodedGrid::Float(ri) => ri,
    };
    let t_dequantize_ms = ms_since(t);

    let t = Instant::now();
    let pc = if parallel { reconstruct_par(&ri) } else { reconstruct(&ri) };
    let t_reconstruct_ms = ms_since(t);

    let stats = DecodeStats {
        t_decompress_ms,
        t_deserialize_ms,
        t_dequantize_ms,
        t_reconstruct_ms,
        t_total_ms: ms_since(start),
        points: pc.len(),
    };
    Ok((pc, stats))
}

/// Raw size of `pc` in its source encoding over the stream size.
pub fn compression_ratio(pc: &PointCloud, stream: &FlicrStream) -> f64 {
    pc.raw_bytes() as f64 / stream.total_len() as f64
}
