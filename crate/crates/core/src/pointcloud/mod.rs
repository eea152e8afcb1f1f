//! Point cloud types, KITTI velodyne scan I/O and synthetic scan generation.

mod kitti;
mod synth;

pub use kitti::{
    decode_kitti_bytes, encode_kitti_bytes, read_kitti_bin, read_kitti_scan, write_kitti_bin, KittiScan,
};
pub use synth::{
    hdl64e_laser_pitches_deg, ray_direction, synth_scan, synthetic_frame, urban_scene, Aabb, Axis, AxisPlane,
    ScanNoise, Scene, KITTI_FIRINGS_PER_REV,
};

/// Raw bytes per point in the KITTI velodyne layout (x, y, z, intensity as f32).
pub const KITTI_POINT_BYTES: usize = 16;

/// A point in the sensor's Cartesian frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Squared Euclidean distance. Every metric in the crate goes through this
    /// so indexed and exhaustive searches agree bit for bit.
    #[inline]
    pub fn dist_sq(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self { x, y, z }
    }
}

/// An ordered sequence of points plus the per-point size of the encoding it
/// came from, used as the raw-size basis for compression ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3>,
    source_point_size_bytes: usize,
}

impl Default for PointCloud {
    fn default() -> Self {
        Self::new(Vec::new())
    }
}

impl PointCloud {
    /// Builds a cloud with the KITTI raw-size basis of 16 bytes per point.
    /// Non-finite points are removed.
    pub fn new(points: Vec<Point3>) -> Self {
        Self::with_point_size(points, KITTI_POINT_BYTES)
    }

    /// `source_point_size_bytes` is raised to 12 (three f32) if smaller.
    pub fn with_point_size(mut points: Vec<Point3>, source_point_size_bytes: usize) -> Self {
        points.retain(Point3::is_finite);
        Self {
            points,
            source_point_size_bytes: source_point_size_bytes.max(12),
        }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn source_point_size_bytes(&self) -> usize {
        self.source_point_size_bytes
    }

    /// Size of the cloud in its source encoding.
    pub fn raw_bytes(&self) -> usize {
        self.points.len() * self.source_point_size_bytes
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point3> {
        self.points.iter()
    }
}

impl FromIterator<Point3> for PointCloud {
    fn from_iter<I: IntoIterator<Item = Point3>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Point3;
    type IntoIter = std::slice::Iter<'a, Point3>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
