//! Point cloud quality metrics: nearest-neighbor distance, MSE, Chamfer
//! distance, PSNR, sampling error and entropy-reflecting PSNR.
//!
//! MSE is asymmetric: `mse(a, b)` averages, over the points of `b`, the
//! squared distance to the nearest point of `a`.

mod index;
pub mod oracle;

pub use index::VoxelGrid;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointcloud::{Point3, PointCloud};

/// PSNR reported for a pair with zero MSE.
pub const PSNR_CAP_DB: f64 = 200.0;

/// Parameters of the entropy-loss estimate behind ePSNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsnrParams {
    /// Additive adjustment to the entropy factor.
    pub alpha: f64,
    /// Scale of the exponential distribution, `> 0`.
    pub beta: f64,
}

impl Default for EpsnrParams {
    fn default() -> Self {
        Self { alpha: -0.15, beta: 0.5 }
    }
}

/// Exact nearest-neighbor index over one cloud.
#[derive(Debug, Clone)]
pub struct NnIndex {
    grid: VoxelGrid,
}

impl NnIndex {
    pub fn new(cloud: &PointCloud) -> Result<Self> {
        Self::with_cell_size(cloud, VoxelGrid::DEFAULT_CELL_M)
    }

    pub fn with_cell_size(cloud: &PointCloud, cell_m: f64) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::Domain("nearest-neighbor search in an empty cloud"));
        }
        if !(cell_m > 0.0 && cell_m.is_finite()) {
            return Err(Error::param("cell_m", format!("must be > 0, got {cell_m}")));
        }
        Ok(Self { grid: VoxelGrid::build(cloud.points(), cell_m) })
    }

    pub fn nearest_sq(&self, p: &Point3) -> f64 {
        self.grid.nearest_sq(p).expect("index is never empty")
    }

    /// Mean of nearest squared distances of `queries`, summed in query order.
    pub fn mean_nearest_sq(&self, queries: &PointCloud) -> Result<f64> {
        if queries.is_empty() {
            return Err(Error::Domain("mse over an empty cloud"));
        }
        let dists: Vec<f64> = queries
            .points()
            .par_iter()
            .with_min_len(1024)
            .map(|q| self.nearest_sq(q))
            .collect();
        Ok(dists.iter().fold(0.0, |acc, &d| acc + d) / queries.len() as f64)
    }
}

/// Smallest squared distance from `p` to a point of `cloud`.
pub fn nn_sq_dist(p: &Point3, cloud: &PointCloud) -> Result<f64> {
    Ok(NnIndex::new(cloud)?.nearest_sq(p))
}

/// Mean over `c2` of the nearest squared distance into `c1`.
pub fn mse(c1: &PointCloud, c2: &PointCloud) -> Result<f64> {
    if c2.is_empty() {
        return Err(Error::Domain("mse over an empty cloud"));
    }
    NnIndex::new(c1)?.mean_nearest_sq(c2)
}

/// `mse(orig, comp) + mse(comp, orig)`, in square meters.
pub fn chamfer_distance(orig: &PointCloud, comp: &PointCloud) -> Result<f64> {
    Ok(mse(orig, comp)? + mse(comp, orig)?)
}

fn psnr_from_mse(mse: f64, peak_m: f64) -> f64 {
    if mse == 0.0 {
        PSNR_CAP_DB
    } else {
        10.0 * (peak_m * peak_m / mse).log10()
    }
}

/// `10 log10(peak^2 / mse(orig, comp))` in dB, capped at [`PSNR_CAP_DB`] when lossless.
pub fn psnr(orig: &PointCloud, comp: &PointCloud, peak_m: f64) -> Result<f64> {
    check_peak(peak_m)?;
    Ok(psnr_from_mse(mse(orig, comp)?, peak_m))
}

fn check_peak(peak_m: f64) -> Result<()> {
    if peak_m > 0.0 && peak_m.is_finite() {
        Ok(())
    } else {
        Err(Error::param("peak", format!("must be > 0, got {peak_m}")))
    }
}

/// Fraction of original points missing from `comp`, by count, in `[0, 1]`.
pub fn sampling_error(orig: &PointCloud, comp: &PointCloud) -> Result<f64> {
    sampling_error_counts(orig.len(), comp.len())
}

pub fn sampling_error_counts(n_orig: usize, n_comp: usize) -> Result<f64> {
    if n_orig == 0 {
        return Err(Error::Domain("sampling error of an empty original cloud"));
    }
    Ok((n_orig.saturating_sub(n_comp) as f64 / n_orig as f64).clamp(0.0, 1.0))
}

fn check_se(se: f64) -> Result<()> {
    if (0.0..=1.0).contains(&se) {
        Ok(())
    } else {
        Err(Error::Domain("sampling error outside [0, 1]"))
    }
}

/// Exponential survival probability `exp(-(1 - se) / beta)`.
pub fn entropy_factor(se: f64, beta: f64) -> Result<f64> {
    check_se(se)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("must be > 0, got {beta}")));
    }
    Ok((-(1.0 - se) / beta).exp())
}

/// `psnr * (1 - se * clamp(F(se) + alpha, 0, 1))`.
pub fn epsnr(psnr_db: f64, se: f64, params: &EpsnrParams) -> Result<f64> {
    let factor = (entropy_factor(se, params.beta)? + params.alpha).clamp(0.0, 1.0);
    Ok(psnr_db * (1.0 - se * factor))
}

/// Quality and size figures for one original/reconstructed pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityReport {
    pub psnr_db: f64,
    /// Chamfer distance in square meters.
    pub chamfer_m2: f64,
    /// `sqrt(chamfer_m2)` in centimeters.
    pub chamfer_rms_cm: f64,
    pub se: f64,
    pub epsnr_db: f64,
    pub n_orig: usize,
    pub n_comp: usize,
    pub raw_bytes: usize,
    pub compressed_bytes: usize,
    pub compression_ratio: f64,
}

pub fn full_report(
    orig: &PointCloud,
    comp: &PointCloud,
    raw_bytes: usize,
    compressed_bytes: usize,
    peak_m: f64,
    params: &EpsnrParams,
) -> Result<QualityReport> {
    check_peak(peak_m)?;
    if compressed_bytes == 0 {
        return Err(Error::Domain("compression ratio with zero compressed bytes"));
    }
    let orig_index = NnIndex::new(orig)?;
    let comp_index = NnIndex::new(comp)?;
    let mse_oc = orig_index.mean_nearest_sq(comp)?;
    let mse_co = comp_index.mean_nearest_sq(orig)?;
    let chamfer = mse_oc + mse_co;
    let psnr_db = psnr_from_mse(mse_oc, peak_m);
    let se = sampling_error(orig, comp)?;
    Ok(QualityReport {
        psnr_db,
        chamfer_m2: chamfer,
        chamfer_rms_cm: chamfer.sqrt() * 100.0,
        se,
        epsnr_db: epsnr(psnr_db, se, params)?,
        n_orig: orig.len(),
        n_comp: comp.len(),
        raw_bytes,
        compressed_bytes,
        compression_ratio: raw_bytes as f64 / compressed_bytes as f64,
    })
}
