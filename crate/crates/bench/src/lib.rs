//! Shared fixtures for the criterion benches.

use flicr_core::range_image::{project, quantize};
use flicr_core::{PointCloud, SensorModel};

/// Seed of the synthetic frame every bench runs on.
pub const FRAME_SEED: u64 = 1;

/// Resolutions swept by the pipeline benches, azimuth bins x 64 rows.
pub const RESOLUTIONS: [usize; 3] = [4500, 1024, 256];

pub fn frame() -> PointCloud {
    flicr_core::pointcloud::synthetic_frame(FRAME_SEED)
}

/// Serialized 8-bpp range image of [`frame`] at `cols` x 64.
pub fn grid_bytes(pc: &PointCloud, cols: usize) -> Vec<u8> {
    let model = SensorModel::hdl64e().with_resolution(cols, 64);
    quantize(&project(pc, &model), 8).expect("8 bpp is valid").to_bytes()
}
