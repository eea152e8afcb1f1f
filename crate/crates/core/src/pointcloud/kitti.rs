use std::path::Path;

use super::{Point3, PointCloud, KITTI_POINT_BYTES};
use crate::error::{Error, Result};

/// A decoded velodyne scan together with the count of records dropped for
/// holding a NaN or infinite coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct KittiScan {
    pub cloud: PointCloud,
    pub non_finite_dropped: usize,
}

/// Decodes little-endian `x, y, z, intensity` f32 records. Intensity is discarded.
pub fn decode_kitti_bytes(bytes: &[u8]) -> Result<KittiScan> {
    let rem = bytes.len() % KITTI_POINT_BYTES;
    if rem != 0 {
        return Err(Error::MalformedInput {
            offset: bytes.len() - rem,
            reason: format!(
                "length {} is not a multiple of {KITTI_POINT_BYTES}; trailing {rem} bytes",
                bytes.len()
            ),
        });
    }

    let mut points = Vec::with_capacity(bytes.len() / KITTI_POINT_BYTES);
    let mut non_finite_dropped = 0;
    for record in bytes.chunks_exact(KITTI_POINT_BYTES) {
        let f = |i: usize| f32::from_le_bytes(record[i * 4..i * 4 + 4].try_into().unwrap());
        let (x, y, z) = (f(0), f(1), f(2));
        if x.is_finite() && y.is_finite() && z.is_finite() {
            points.push(Point3::new(x as f64, y as f64, z as f64));
        } else {
            non_finite_dropped += 1;
        }
    }
    Ok(KittiScan {
        cloud: PointCloud::with_point_size(points, KITTI_POINT_BYTES),
        non_finite_dropped,
    })
}

/// Inverse of [`decode_kitti_bytes`]; coordinates narrowed to f32, intensity 0.0.
pub fn encode_kitti_bytes(pc: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(pc.len() * KITTI_POINT_BYTES);
    for p in pc {
        for v in [p.x as f32, p.y as f32, p.z as f32, 0.0f32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn read_kitti_scan(path: impl AsRef<Path>) -> Result<KittiScan> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_kitti_bytes(&bytes)
}

pub fn read_kitti_bin(path: impl AsRef<Path>) -> Result<PointCloud> {
    read_kitti_scan(path).map(|scan| scan.cloud)
}

pub fn write_kitti_bin(pc: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_kitti_bytes(pc)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(v: [f32; 4]) -> Vec<u8> {
        v.iter().flat_map(|f| f.to_le_bytes()).collect()
    }

    #[test]
    fn decodes_two_records() {
        let mut bytes = record([1.0, 2.0, 3.0, 0.5]);
        bytes.extend(record([4.0, 5.0, 6.0, 0.1]));
        assert_eq!(bytes.len(), 32);
        let scan = decode_kitti_bytes(&bytes).unwrap();
        assert_eq!(
            scan.cloud.points(),
            &[Point3::new(1.0, 2.0, 3.0), Point3::new(4.0, 5.0, 6.0)]
        );
        assert_eq!(scan.cloud.source_point_size_bytes(), 16);
    }

    #[test]
    fn empty_file_is_empty_cloud() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.bin");
        write_kitti_bin(&PointCloud::default(), &path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 0);
        assert!(read_kitti_bin(&path).unwrap().is_empty());
    }

    #[test]
    fn seventeen_bytes_is_malformed() {
        let err = decode_kitti_bytes(&[0u8; 17]).unwrap_err();
        match err {
            Error::MalformedInput { offset, .. } => assert_eq!(offset, 16),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_kitti_bin("/nonexistent/scan.bin").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn non_finite_records_are_counted() {
        let mut bytes = record([f32::NAN, 0.0, 0.0, 0.0]);
        bytes.extend(record([1.0, 1.0, 1.0, 0.0]));
        bytes.extend(record([0.0, f32::NEG_INFINITY, 0.0, 0.0]));
        let scan = decode_kitti_bytes(&bytes).unwrap();
        assert_eq!(scan.cloud.len(), 1);
        assert_eq!(scan.non_finite_dropped, 2);
    }

    #[test]
    fn two_point_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("two.bin");
        let pc = PointCloud::new(vec![Point3::new(1.5, -2.0, 0.25), Point3::new(4.0, 5.0, 6.0)]);
        write_kitti_bin(&pc, &path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 32);
        assert_eq!(read_kitti_bin(&path).unwrap(), pc);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn roundtrip_is_bit_exact(coords in proptest::collection::vec(
            (-1.0e6f32..1.0e6, -1.0e6f32..1.0e6, -1.0e6f32..1.0e6), 1000)) {
            let pc = PointCloud::new(coords.iter()
                .map(|&(x, y, z)| Point3::new(x as f64, y as f64, z as f64))
                .collect());
            let back = decode_kitti_bytes(&encode_kitti_bytes(&pc)).unwrap().cloud;
            prop_assert_eq!(back.len(), pc.len());
            for (a, b) in back.iter().zip(pc.iter()) {
                prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
                prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
                prop_assert_eq!(a.z.to_bits(), b.z.to_bits());
            }
        }
    }
}
