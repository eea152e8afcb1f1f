//! Analytic ray casting against axis-aligned scenes, for dataset-free testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Point3, PointCloud};
use crate::range_image::{spherical_to_cartesian, SensorModel};

/// Rays closer than this to the origin never register a hit.
const MIN_HIT_M: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn of(self, p: &Point3) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
            Axis::Z => p.z,
        }
    }
}

/// Infinite plane `axis = offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisPlane {
    pub axis: Axis,
    pub offset: f64,
}

/// Axis-aligned box with `min < max` on every axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Self {
        Self { min: min.into(), max: max.into() }
    }

    /// Slab test. Returns the first positive hit distance along `dir`.
    fn hit(&self, dir: &Point3) -> Option<f64> {
        let mut t_near = f64::NEG_INFINITY;
        let mut t_far = f64::INFINITY;
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let d = axis.of(dir);
            let (lo, hi) = (axis.of(&self.min), axis.of(&self.max));
            if d == 0.0 {
                if lo > 0.0 || hi < 0.0 {
                    return None;
                }
                continue;
            }
            let (t0, t1) = {
                let a = lo / d;
                let b = hi / d;
                if a < b { (a, b) } else { (b, a) }
            };
            t_near = t_near.max(t0);
            t_far = t_far.min(t1);
        }
        if t_near > t_far {
            return None;
        }
        // Origin inside the box: the ray leaves through the far face.
        let t = if t_near > MIN_HIT_M { t_near } else { t_far };
        (t > MIN_HIT_M).then_some(t)
    }
}

/// Ground plane plus axis-aligned planes and boxes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scene {
    /// Height of an infinite horizontal ground plane.
    pub ground_z: Option<f64>,
    pub planes: Vec<AxisPlane>,
    pub boxes: Vec<Aabb>,
}

impl Scene {
    pub fn is_empty(&self) -> bool {
        self.ground_z.is_none() && self.planes.is_empty() && self.boxes.is_empty()
    }

    /// Nearest hit distance along the unit direction `dir`.
    pub fn cast(&self, dir: &Point3) -> Option<f64> {
        let plane_hit = |axis: Axis, offset: f64| {
            let d = axis.of(dir);
            let t = offset / d;
            (d != 0.0 && t > MIN_HIT_M).then_some(t)
        };
        self.ground_z
            .and_then(|z| plane_hit(Axis::Z, z))
            .into_iter()
            .chain(self.planes.iter().filter_map(|p| plane_hit(p.axis, p.offset)))
            .chain(self.boxes.iter().filter_map(|b| b.hit(dir)))
            .min_by(f64::total_cmp)
    }
}

/// Unit vector through the center of pixel `(row, col)`.
pub fn ray_direction(model: &SensorModel, row: usize, col: usize) -> Point3 {
    let (pitch, phi) = model.cell_center(row, col);
    spherical_to_cartesian(1.0, pitch, phi)
}

/// Casts one ray per pixel of `model` from the origin and keeps first hits
/// within `max_range_m`, row-major.
pub fn synth_scan(model: &SensorModel, scene: &Scene) -> PointCloud {
    if scene.is_empty() {
        return PointCloud::default();
    }
    let mut points = Vec::new();
    for row in 0..model.rows {
        for col in 0..model.cols {
            let dir = ray_direction(model, row, col);
            let Some(t) = scene.cast(&dir) else { continue };
            if t > model.max_range_m {
                continue;
            }
            let mut p = Point3::new(dir.x * t, dir.y * t, dir.z * t);
            if scene.ground_z.is_some_and(|g| g / dir.z == t) {
                p.z = scene.ground_z.unwrap();
            }
            points.push(p);
        }
    }
    PointCloud::new(points)
}

/// Sensor imperfections applied on top of an exact scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanNoise {
    /// Standard deviation of additive range noise, meters.
    pub range_sigma_m: f64,
    /// Probability that a return is lost.
    pub dropout: f64,
    pub seed: u64,
}

impl ScanNoise {
    /// Moves each point along its ray by Gaussian noise and drops returns at
    /// random. Points stay in their generating pixel.
    pub fn apply(&self, pc: &PointCloud) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.range_sigma_m.max(0.0)).expect("finite sigma");
        let points = pc
            .iter()
            .filter_map(|p| {
                let noise = normal.sample(&mut rng);
                if rng.random::<f64>() < self.dropout {
                    return None;
                }
                let r = p.norm();
                let scale = ((r + noise) / r).max(0.1);
                Some(Point3::new(p.x * scale, p.y * scale, p.z * scale))
            })
            .collect();
        PointCloud::with_point_size(points, pc.source_point_size_bytes())
    }
}

/// A random street scene: ground 1.73 m below the sensor, building walls
/// along both sides, parked cars, poles and clutter.
pub fn urban_scene(seed: u64) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground = -1.73;
    let mut boxes = Vec::new();

    for side in [-1.0f64, 1.0] {
        let setback = rng.random_range(7.0..14.0);
        let mut x = -80.0;
        while x < 80.0 {
            let len = rng.random_range(8.0..25.0);
            let depth = rng.random_range(6.0..15.0);
            let height = rng.random_range(4.0..20.0);
            let near = setback + rng.random_range(-1.5..1.5);
            let (y0, y1) = if side > 0.0 { (near, near + depth) } else { (-near - depth, -near) };
            if rng.random::<f64>() < 0.8 {
                boxes.push(Aabb::new([x, y0, ground], [x + len, y1, ground + height]));
            }
            x += len + rng.random_range(0.0..6.0);
        }

        let lane = rng.random_range(2.5..5.5);
        let mut x = -50.0;
        while x < 50.0 {
            let car_len = rng.random_range(3.8..4.8);
            let y = side * lane;
            let w = rng.random_range(1.6..1.9) / 2.0;
            boxes.push(Aabb::new(
                [x, y - w, ground],
                [x + car_len, y + w, ground + rng.random_range(1.4..1.7)],
            ));
            x += car_len + rng.random_range(1.0..15.0);
        }
    }

    for _ in 0..40 {
        let x = rng.random_range(-60.0..60.0);
        let y = rng.random_range(-30.0..30.0);
        if x * x + y * y < 9.0 {
            continue;
        }
        let s = rng.random_range(0.1..1.5);
        let h = rng.random_range(0.3..6.0);
        boxes.push(Aabb::new([x, y, ground], [x + s, y + s, ground + h]));
    }

    Scene {
        ground_z: Some(ground),
        planes: Vec::new(),
        boxes,
    }
}

/// Elevation of each of the 64 lasers of a KITTI-style HDL-64E, degrees.
/// The upper block is spaced 1/3 degree, the lower block 1/2 degree.
pub fn hdl64e_laser_pitches_deg() -> [f64; 64] {
    let mut out = [0.0; 64];
    for (i, v) in out.iter_mut().enumerate() {
        *v = if i < 32 {
            2.0 - i as f64 / 3.0
        } else {
            -8.83 - (i - 32) as f64 * 0.5
        };
    }
    out
}

/// Firings per laser per revolution of a KITTI-style scan at 10 Hz.
pub const KITTI_FIRINGS_PER_REV: usize = 2083;

/// A KITTI-like scan of [`urban_scene`]: 64 lasers at their real elevations,
/// [`KITTI_FIRINGS_PER_REV`] firings per laser with a per-laser azimuth
/// offset and per-firing timing jitter, 2 cm range noise, 5% dropout.
pub fn synthetic_frame(seed: u64) -> PointCloud {
    let scene = urban_scene(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_F1CE);
    let normal = Normal::new(0.0, 0.02).unwrap();
    let step = 360.0 / KITTI_FIRINGS_PER_REV as f64;
    let max_range = SensorModel::hdl64e().max_range_m;
    let mut points = Vec::with_capacity(64 * KITTI_FIRINGS_PER_REV);
    for pitch_deg in hdl64e_laser_pitches_deg() {
        let pitch = (pitch_deg + rng.random_range(-0.02..0.02f64)).to_radians();
        let offset = rng.random_range(0.0..step);
        for k in 0..KITTI_FIRINGS_PER_REV {
            let az = -180.0 + offset + k as f64 * step + rng.random_range(-0.1..0.1) * step;
            let dir = spherical_to_cartesian(1.0, pitch, az.to_radians());
            let Some(t) = scene.cast(&dir) else { continue };
            let r = t + normal.sample(&mut rng);
            if rng.random::<f64>() < 0.05 || r > max_range || r <= 0.0 {
                continue;
            }
            points.push(Point3::new(dir.x * r, dir.y * r, dir.z * r));
        }
    }
    PointCloud::new(points)
}
