//! Range-image projection of spinning-LiDAR scans.
//!
//! A [`SensorModel`] fixes the angular grid: columns split the horizontal
//! field of view (azimuth), rows split the vertical one (pitch, top row
//! first). Lowering `cols` or `rows` below the sensor's native precision
//! subsamples the scan; [`quantize`] then reduces each range to a fixed
//! number of bits.

mod project;
mod quantize;

pub use project::{project, project_par, reconstruct, reconstruct_par};
pub use quantize::{dequantize, quantize, BPP_RANGE};

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::pointcloud::Point3;

/// Angular grid and range limits of a spinning LiDAR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    /// Horizontal field of view `(start, end)` in degrees, `start < end`.
    pub h_fov_deg: (f64, f64),
    /// Vertical field of view `(top, bottom)` as pitch above the horizon in
    /// degrees, `top > bottom`.
    pub v_fov_deg: (f64, f64),
    pub cols: usize,
    pub rows: usize,
    pub max_range_m: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self::hdl64e()
    }
}

impl SensorModel {
    pub const HDL64E_COLS: usize = 4500;
    pub const HDL64E_ROWS: usize = 64;

    /// Velodyne HDL-64E at native precision: 360 x 26.8 degrees on a 4500 x 64 grid, 120 m.
    pub const fn hdl64e() -> Self {
        Self {
            h_fov_deg: (-180.0, 180.0),
            v_fov_deg: (2.0, -24.8),
            cols: Self::HDL64E_COLS,
            rows: Self::HDL64E_ROWS,
            max_range_m: 120.0,
        }
    }

    /// Same field of view and range, different grid.
    pub fn with_resolution(self, cols: usize, rows: usize) -> Self {
        Self { cols, rows, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cols == 0 {
            return Err(Error::param("cols", "must be at least 1"));
        }
        if self.rows == 0 {
            return Err(Error::param("rows", "must be at least 1"));
        }
        let (h0, h1) = self.h_fov_deg;
        if !(h0.is_finite() && h1.is_finite() && h0 < h1) {
            return Err(Error::param("h_fov", format!("need start < end, got {h0}..{h1}")));
        }
        if h1 - h0 > 360.0 {
            return Err(Error::param("h_fov", format!("span {} exceeds 360 degrees", h1 - h0)));
        }
        let (top, bottom) = self.v_fov_deg;
        if !(top.is_finite() && bottom.is_finite() && top > bottom) {
            return Err(Error::param("v_fov", format!("need top > bottom, got {top}..{bottom}")));
        }
        if top > 90.0 || bottom < -90.0 {
            return Err(Error::param("v_fov", "pitch must lie within [-90, 90] degrees"));
        }
        if !(self.max_range_m.is_finite() && self.max_range_m > 0.0) {
            return Err(Error::param("max_range", format!("must be > 0, got {}", self.max_range_m)));
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    /// Horizontal bin width in radians.
    pub fn h_bin_rad(&self) -> f64 {
        self.h_span_rad() / self.cols as f64
    }

    /// Vertical bin height in radians.
    pub fn v_bin_rad(&self) -> f64 {
        self.v_span_rad() / self.rows as f64
    }

    fn h_span_rad(&self) -> f64 {
        (self.h_fov_deg.1 - self.h_fov_deg.0).to_radians()
    }

    fn v_span_rad(&self) -> f64 {
        (self.v_fov_deg.0 - self.v_fov_deg.1).to_radians()
    }

    fn wraps(&self) -> bool {
        self.h_fov_deg.1 - self.h_fov_deg.0 >= 360.0
    }

    /// Pixel `(row, col)` containing the direction of `s`, by floor of the
    /// fractional bin coordinate. `None` outside the field of view.
    pub fn pixel_of(&self, s: &SphericalPoint) -> Option<(usize, usize)> {
        PixelMap::new(self).pixel_of(s)
    }

    /// `(pitch, azimuth)` in radians at the center of a pixel.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        let pitch = self.v_fov_deg.0.to_radians() - (row as f64 + 0.5) * self.v_bin_rad();
        let phi = self.h_fov_deg.0.to_radians() + (col as f64 + 0.5) * self.h_bin_rad();
        (pitch, phi)
    }
}

/// Angle-to-pixel mapping with the per-model constants precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PixelMap {
    v_top: f64,
    v_scale: f64,
    h_start: f64,
    h_scale: f64,
    rows: f64,
    cols: usize,
    wraps: bool,
}

impl PixelMap {
    pub(crate) fn new(m: &SensorModel) -> Self {
        Self {
            v_top: m.v_fov_deg.0.to_radians(),
            v_scale: m.rows as f64 / m.v_span_rad(),
            h_start: m.h_fov_deg.0.to_radians(),
            h_scale: m.cols as f64 / m.h_span_rad(),
            rows: m.rows as f64,
            cols: m.cols,
            wraps: m.wraps(),
        }
    }

    #[inline]
    pub(crate) fn pixel_of(&self, s: &SphericalPoint) -> Option<(usize, usize)> {
        let pitch = FRAC_PI_2 - s.theta;
        let v = (self.v_top - pitch) * self.v_scale;
        if !(v >= 0.0 && v < self.rows) {
            return None;
        }
        let h = (s.phi - self.h_start) * self.h_scale;
        let col = if self.wraps {
            let cols = self.cols as i64;
            // Truncation, then one step down for negatives: floor without a libm call.
            let mut c = h as i64;
            if (c as f64) > h {
                c -= 1;
            }
            while c < 0 {
                c += cols;
            }
            while c >= cols {
                c -= cols;
            }
            c as usize
        } else if h >= 0.0 && h < self.cols as f64 {
            h as usize
        } else {
            return None;
        };
        Some((v as usize, col))
    }
}

/// Radial distance, polar angle from +z, and azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    /// In `[0, pi]`.
    pub theta: f64,
    /// In `(-pi, pi]`.
    pub phi: f64,
}

#[inline]
pub fn cartesian_to_spherical(p: Point3) -> SphericalPoint {
    let r = p.norm();
    let theta = if r > 0.0 { (p.z / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
    let mut phi = p.y.atan2(p.x);
    if phi == -PI {
        phi = PI;
    }
    SphericalPoint { r, theta, phi }
}

/// Cartesian point at distance `r` along `(pitch, azimuth)`.
#[inline]
pub fn spherical_to_cartesian(r: f64, pitch: f64, phi: f64) -> Point3 {
    let (sp, cp) = pitch.sin_cos();
    let (sa, ca) = phi.sin_cos();
    Point3::new(r * cp * ca, r * cp * sa, r * sp)
}

/// Row-major grid of ranges in meters; `0.0` marks an empty cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeImage {
    pub model: SensorModel,
    pub ranges: Vec<f64>,
    /// Input points lost to collisions, the field of view, or the range limit.
    pub dropped_points: usize,
}

impl RangeImage {
    pub fn empty(model: SensorModel) -> Self {
        Self {
            model,
            ranges: vec![0.0; model.cells()],
            dropped_points: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.model.rows
    }

    pub fn cols(&self) -> usize {
        self.model.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.ranges[row * self.model.cols + col]
    }

    pub fn non_empty(&self) -> usize {
        self.ranges.iter().filter(|&&r| r > 0.0).count()
    }

    /// Ranges as little-endian f32, row-major. This is the unquantized byte
    /// representation fed to the bytestream codecs.
    pub fn to_f32_bytes(&self) -> Vec<u8> {
        self.ranges.iter().flat_map(|&r| (r as f32).to_le_bytes()).collect()
    }
}

/// Range image with each range reduced to a `bpp`-bit code; code 0 is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedRangeImage {
    pub model: SensorModel,
    pub bpp: u8,
    pub codes: Vec<u16>,
}

impl QuantizedRangeImage {
    pub fn rows(&self) -> usize {
        self.model.rows
    }

    pub fn cols(&self) -> usize {
        self.model.cols
    }

    /// Largest code, `2^bpp - 1`.
    pub fn max_code(&self) -> u16 {
        max_code(self.bpp)
    }

    /// Row-major code bytes: one byte per code up to 8 bpp, two bytes
    /// little-endian above.
    pub fn to_bytes(&self) -> Vec<u8> {
        if self.bpp <= 8 {
            self.codes.iter().map(|&c| c as u8).collect()
        } else {
            self.codes.iter().flat_map(|c| c.to_le_bytes()).collect()
        }
    }

    /// Inverse of [`to_bytes`](Self::to_bytes). The byte count must match the
    /// grid and every code must fit in `bpp` bits.
    pub fn from_bytes(model: SensorModel, bpp: u8, bytes: &[u8]) -> Result<Self> {
        if !BPP_RANGE.contains(&bpp) {
            return Err(Error::param("bpp", format!("{bpp} outside {BPP_RANGE:?}")));
        }
        let width = if bpp <= 8 { 1 } else { 2 };
        let expected = model.cells() * width;
        if bytes.len() != expected {
            return Err(Error::stream(
                bytes.len().min(expected),
                format!("grid needs {expected} code bytes, payload decoded to {}", bytes.len()),
            ));
        }
        let codes: Vec<u16> = if width == 1 {
            bytes.iter().map(|&b| b as u16).collect()
        } else {
            bytes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect()
        };
        let max = max_code(bpp);
        if let Some(i) = codes.iter().position(|&c| c > max) {
            return Err(Error::stream(i * width, format!("code {} exceeds {max} for {bpp} bpp", codes[i])));
        }
        Ok(Self { model, bpp, codes })
    }
}

pub(crate) fn max_code(bpp: u8) -> u16 {
    ((1u32 << bpp) - 1) as u16
}
