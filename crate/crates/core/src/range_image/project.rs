use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::{cartesian_to_spherical, PixelMap, RangeImage, SensorModel};
use crate::pointcloud::{Point3, PointCloud};

/// Relative slack on the range limit. Reconstructed points at exactly
/// `max_range_m` can come back a few ulps long after the trigonometric round trip.
const RANGE_SLACK: f64 = 1e-9;

/// Cell index and range for one point, or `None` if the point is dropped.
#[inline]
fn locate(map: &PixelMap, model: &SensorModel, p: Point3) -> Option<(usize, f64)> {
    let s = cartesian_to_spherical(p);
    if !(s.r > 0.0) || s.r > model.max_range_m * (1.0 + RANGE_SLACK) {
        return None;
    }
    let (row, col) = map.pixel_of(&s)?;
    Some((row * model.cols + col, s.r.min(model.max_range_m)))
}

fn finish(model: SensorModel, ranges: Vec<f64>, input_len: usize) -> RangeImage {
    let filled = ranges.iter().filter(|&&r| r > 0.0).count();
    RangeImage {
        model,
        ranges,
        dropped_points: input_len - filled,
    }
}

/// Projects a cloud onto the model's grid. When several points fall in one
/// cell the smallest range is kept, so the result does not depend on input order.
pub fn project(pc: &PointCloud, model: &SensorModel) -> RangeImage {
    let map = PixelMap::new(model);
    let mut ranges = vec![0.0f64; model.cells()];
    for &p in pc {
        if let Some((cell, r)) = locate(&map, model, p) {
            let slot = &mut ranges[cell];
            if *slot == 0.0 || r < *slot {
                *slot = r;
            }
        }
    }
    finish(*model, ranges, pc.len())
}

/// Data-parallel [`project`]. Produces a bit-identical image.
pub fn project_par(pc: &PointCloud, model: &SensorModel) -> RangeImage {
    const EMPTY: u64 = u64::MAX;
    // Non-negative f64 values order the same as their bit patterns, so an
    // atomic integer min over the bits is a min over ranges.
    let map = PixelMap::new(model);
    let cells: Vec<AtomicU64> = (0..model.cells()).map(|_| AtomicU64::new(EMPTY)).collect();
    pc.points().par_iter().with_min_len(4096).for_each(|&p| {
        if let Some((cell, r)) = locate(&map, model, p) {
            cells[cell].fetch_min(r.to_bits(), Ordering::Relaxed);
        }
    });
    let ranges = cells
        .into_par_iter()
        .map(|c| match c.into_inner() {
            EMPTY => 0.0,
            bits => f64::from_bits(bits),
        })
        .collect();
    finish(*model, ranges, pc.len())
}

/// `(sin, cos)` of every row pitch and column azimuth at the cell centers.
struct CenterTables {
    rows: Vec<(f64, f64)>,
    cols: Vec<(f64, f64)>,
}

impl CenterTables {
    fn new(model: &SensorModel) -> Self {
        Self {
            rows: (0..model.rows).map(|r| model.cell_center(r, 0).0.sin_cos()).collect(),
            cols: (0..model.cols).map(|c| model.cell_center(0, c).1.sin_cos()).collect(),
        }
    }

    fn reconstruct_row(&self, ri: &RangeImage, row: usize, out: &mut Vec<Point3>) {
        let cols = ri.model.cols;
        let (sp, cp) = self.rows[row];
        for (&r, &(sa, ca)) in ri.ranges[row * cols..(row + 1) * cols].iter().zip(&self.cols) {
            if r > 0.0 {
                // Same expression as `spherical_to_cartesian`.
                out.push(Point3::new(r * cp * ca, r * cp * sa, r * sp));
            }
        }
    }
}

/// One point per non-empty cell, placed at the cell-center angles, row-major.
pub fn reconstruct(ri: &RangeImage) -> PointCloud {
    let tables = CenterTables::new(&ri.model);
    let mut points = Vec::with_capacity(ri.non_empty());
    for row in 0..ri.rows() {
        tables.reconstruct_row(ri, row, &mut points);
    }
    PointCloud::new(points)
}

/// Data-parallel [`reconstruct`] with the same output order.
pub fn reconstruct_par(ri: &RangeImage) -> PointCloud {
    let tables = CenterTables::new(&ri.model);
    let rows: Vec<Vec<Point3>> = (0..ri.rows())
        .into_par_iter()
        .map(|row| {
            let mut v = Vec::new();
            tables.reconstruct_row(ri, row, &mut v);
            v
        })
        .collect();
    PointCloud::new(rows.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::range_image::{spherical_to_cartesian, SphericalPoint};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn random_cloud(n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                Point3::new(
                    rng.random_range(-60.0..60.0),
                    rng.random_range(-60.0..60.0),
                    rng.random_range(-8.0..1.0),
                )
            })
            .collect()
    }

    fn angle_diff(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    }

    #[test]
    fn empty_cloud_gives_empty_image() {
        let m = SensorModel::hdl64e();
        let ri = project(&PointCloud::default(), &m);
        assert_eq!(ri.ranges.len(), 4500 * 64);
        assert_eq!(ri.non_empty(), 0);
        assert_eq!(ri.dropped_points, 0);
        assert!(reconstruct(&ri).is_empty());
    }

    #[test]
    fn cell_center_point_roundtrips() {
        let m = SensorModel::hdl64e().with_resolution(1024, 64);
        let (pitch, phi) = m.cell_center(40, 700);
        let p = spherical_to_cartesian(17.25, pitch, phi);
        let ri = project(&PointCloud::new(vec![p]), &m);
        assert_eq!(ri.non_empty(), 1);
        assert!(ri.get(40, 700) > 0.0);
        let q = reconstruct(&ri).points()[0];
        assert!(p.dist_sq(&q).sqrt() < 1e-9);
        assert_eq!(q, spherical_to_cartesian(ri.get(40, 700), pitch, phi));
    }

    #[test]
    fn collision_keeps_nearest() {
        let m = SensorModel::hdl64e().with_resolution(16, 4);
        let (pitch, phi) = m.cell_center(2, 3);
        let far = spherical_to_cartesian(30.0, pitch, phi);
        let near = spherical_to_cartesian(10.0, pitch + 1e-4, phi);
        for pts in [vec![far, near], vec![near, far]] {
            let ri = project(&PointCloud::new(pts), &m);
            assert!((ri.get(2, 3) - 10.0).abs() < 1e-12);
            assert_eq!(ri.dropped_points, 1);
        }
    }

    #[test]
    fn out_of_range_and_origin_points_are_dropped() {
        let m = SensorModel::hdl64e();
        let pc = PointCloud::new(vec![
            Point3::new(200.0, 0.0, -1.0),
            Point3::default(),
            Point3::new(0.0, 0.0, 10.0),
            Point3::new(10.0, 0.0, -1.0),
        ]);
        let ri = project(&pc, &m);
        assert_eq!(ri.non_empty(), 1);
        assert_eq!(ri.dropped_points, 3);
    }

    #[test]
    fn max_range_point_survives_reconstruction() {
        let m = SensorModel::hdl64e().with_resolution(360, 16);
        let mut ri = RangeImage::empty(m);
        for (i, r) in ri.ranges.iter_mut().enumerate() {
            if i % 7 == 0 {
                *r = m.max_range_m;
            }
        }
        let again = project(&reconstruct(&ri), &m);
        assert_eq!(again.non_empty(), ri.non_empty());
        assert_eq!(again.dropped_points, 0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let pc = random_cloud(50_000, 7);
        for m in [SensorModel::hdl64e(), SensorModel::hdl64e().with_resolution(256, 64)] {
            let a = project(&pc, &m);
            let b = project_par(&pc, &m);
            assert_eq!(a.dropped_points, b.dropped_points);
            assert!(a.ranges.iter().zip(&b.ranges).all(|(x, y)| x.to_bits() == y.to_bits()));
            assert_eq!(reconstruct(&a), reconstruct_par(&b));
        }
    }

    #[test]
    fn projection_is_permutation_invariant() {
        let pc = random_cloud(20_000, 3);
        let m = SensorModel::hdl64e().with_resolution(512, 64);
        let mut shuffled = pc.points().to_vec();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(11));
        let a = project(&pc, &m);
        let b = project(&PointCloud::new(shuffled), &m);
        assert_eq!(a, b);
    }

    #[test]
    fn coarser_grid_never_fills_more_cells() {
        let pc = random_cloud(30_000, 5);
        let base = SensorModel::hdl64e();
        let mut last = usize::MAX;
        for (cols, rows) in [(4500, 64), (2250, 32), (1125, 16), (375, 8)] {
            let n = project(&pc, &base.with_resolution(cols, rows)).non_empty();
            assert!(n <= last, "{cols}x{rows}: {n} > {last}");
            last = n;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn reconstruction_stays_within_half_a_bin(seed in any::<u64>(), cols in 16usize..2048, rows in 4usize..64) {
            let m = SensorModel::hdl64e().with_resolution(cols, rows);
            let pc = random_cloud(500, seed);
            let ri = project(&pc, &m);
            let inputs: Vec<SphericalPoint> = pc.iter().map(|&p| cartesian_to_spherical(p)).collect();
            let eps = 1e-9;
            for q in reconstruct(&ri).iter() {
                let s = cartesian_to_spherical(*q);
                let found = inputs.iter().any(|t| {
                    angle_diff(s.phi, t.phi) <= m.h_bin_rad() / 2.0 + eps
                        && ((FRAC_PI_2 - s.theta) - (FRAC_PI_2 - t.theta)).abs() <= m.v_bin_rad() / 2.0 + eps
                        && (s.r - t.r).abs() < 1e-9
                });
                prop_assert!(found);
            }
        }
    }
}
