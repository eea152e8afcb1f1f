//! Lossy LiDAR point cloud compression over range images.
//!
//! A scan is projected onto an azimuth x pitch grid ([`range_image`]),
//! subsampled by the grid resolution, quantized to a few bits per point,
//! serialized row-major and squeezed with a lossless bytestream codec
//! ([`codec`]). [`metrics`] scores reconstructions with PSNR, Chamfer
//! distance, sampling error and the entropy-reflecting ePSNR.
//!
//! ```
//! use flicr_core::{encode, decode, FlicrConfig, PointCloud, Point3};
//!
//! let pc = PointCloud::new(vec![Point3::new(10.0, 2.0, -1.0), Point3::new(-5.0, 3.0, -1.5)]);
//! let (stream, stats) = encode(&pc, &FlicrConfig::default()).unwrap();
//! let (back, _) = decode(&stream).unwrap();
//! assert_eq!(back.len(), pc.len() - stats.dropped_points);
//! ```

pub mod codec;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod pointcloud;
pub mod range_image;

pub use codec::{CodecId, Lz77Params};
pub use error::{Error, Result};
pub use metrics::{full_report, EpsnrParams, QualityReport};
pub use pipeline::{
    compression_ratio, decode, decode_with, encode, DecodeStats, EncodeStats, FlicrConfig, FlicrStream,
    FLOAT32_BPP,
};
pub use pointcloud::{read_kitti_bin, write_kitti_bin, Point3, PointCloud};
pub use range_image::{QuantizedRangeImage, RangeImage, SensorModel};
