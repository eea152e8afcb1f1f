//! Uniform voxel grid for exact nearest-neighbor queries.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::pointcloud::Point3;

/// Multiplicative hash for packed cell keys.
#[derive(Default)]
struct CellHasher(u64);

impl Hasher for CellHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(8) ^ b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = (v ^ (v >> 29)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        self.0 ^= self.0 >> 32;
    }
}

type CellMap = HashMap<u64, (u32, u32), BuildHasherDefault<CellHasher>>;

/// Immutable voxel grid over a point set. Only occupied cells are stored.
/// Queries expand cubic shells of cells around the query until no
/// unvisited cell can hold a closer point, so results equal an exhaustive scan.
/// A query whose cube outgrows the occupied cell count falls back to a
/// linear scan, bounding its cost by the brute-force one.
#[derive(Debug, Clone)]
pub struct VoxelGrid {
    origin: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    cells: CellMap,
    /// Points grouped by cell; `cells` maps a key to its `start..end` range.
    points: Vec<Point3>,
}

impl VoxelGrid {
    pub const DEFAULT_CELL_M: f64 = 0.25;

    /// Builds a grid with the given cell edge, coarsened if the bounding box
    /// would need more than 2^21 cells per axis. Empty input yields a grid
    /// that answers every query with `None`.
    pub fn build(points: &[Point3], cell_m: f64) -> Self {
        assert!(cell_m > 0.0 && cell_m.is_finite(), "cell size must be positive");
        if points.is_empty() {
            return Self { origin: [0.0; 3], cell: cell_m, dims: [0; 3], cells: CellMap::default(), points: Vec::new() };
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for (k, v) in [p.x, p.y, p.z].into_iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let mut cell = cell_m;
        let dims = loop {
            let d = [0, 1, 2].map(|k| ((hi[k] - lo[k]) / cell).floor() + 1.0);
            if d.iter().all(|&x| x <= (1u64 << 21) as f64) {
                break d.map(|x| x as usize);
            }
            cell *= 2.0;
        };

        let mut grid = Self { origin: lo, cell, dims, cells: CellMap::default(), points: Vec::new() };
        let mut keyed: Vec<(u64, Point3)> = points.iter().map(|p| (grid.key(grid.coords(p)), *p)).collect();
        keyed.sort_by_key(|&(k, _)| k);
        let mut cells = CellMap::default();
        let mut i = 0;
        while i < keyed.len() {
            let k = keyed[i].0;
            let mut j = i;
            while j < keyed.len() && keyed[j].0 == k {
                j += 1;
            }
            cells.insert(k, (i as u32, j as u32));
            i = j;
        }
        grid.cells = cells;
        grid.points = keyed.into_iter().map(|(_, p)| p).collect();
        grid
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cell edge actually used, which may exceed the requested one.
    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn axis_coord(&self, v: f64, k: usize) -> i64 {
        ((v - self.origin[k]) / self.cell).floor() as i64
    }

    fn coords(&self, p: &Point3) -> [i64; 3] {
        let c = [self.axis_coord(p.x, 0), self.axis_coord(p.y, 1), self.axis_coord(p.z, 2)];
        [0, 1, 2].map(|k| c[k].clamp(0, self.dims[k] as i64 - 1))
    }

    fn key(&self, c: [i64; 3]) -> u64 {
        (c[0] as u64) << 42 | (c[1] as u64) << 21 | c[2] as u64
    }

    #[inline]
    fn scan_cell(&self, c: [i64; 3], q: &Point3, best: &mut f64) {
        let Some(&(a, b)) = self.cells.get(&self.key(c)) else { return };
        for p in &self.points[a as usize..b as usize] {
            let d = q.dist_sq(p);
            if d < *best {
                *best = d;
            }
        }
    }

    /// Minimum squared distance from `q` to any indexed point.
    pub fn nearest_sq(&self, q: &Point3) -> Option<f64> {
        if self.points.is_empty() {
            return None;
        }
        let qv = [q.x, q.y, q.z];
        let center = [0, 1, 2].map(|k| self.axis_coord(qv[k], k));
        let dims = self.dims.map(|d| d as i64);
        let mut best = f64::INFINITY;
        // Absorbs rounding in the cell assignment of `q`.
        let slack = 1e-9 * (1.0 + q.x.abs() + q.y.abs() + q.z.abs());

        let mut k: i64 = 0;
        loop {
            // In sparse regions the shells are mostly empty cells; a linear
            // scan is cheaper by then and equally exact.
            let side = (2 * k + 1) as f64;
            if side * side * side > 4.0 * self.cells.len() as f64 {
                for p in &self.points {
                    let d = q.dist_sq(p);
                    if d < best {
                        best = d;
                    }
                }
                return Some(best);
            }
            let lo = [0, 1, 2].map(|a| (center[a] - k).max(0));
            let hi = [0, 1, 2].map(|a| (center[a] + k).min(dims[a] - 1));
            if (0..3).all(|a| lo[a] <= hi[a]) {
                for x in lo[0]..=hi[0] {
                    let x_edge = (x - center[0]).abs() == k;
                    for y in lo[1]..=hi[1] {
                        if x_edge || (y - center[1]).abs() == k {
                            for z in lo[2]..=hi[2] {
                                self.scan_cell([x, y, z], q, &mut best);
                            }
                        } else {
                            for z in [center[2] - k, center[2] + k] {
                                if z >= lo[2] && z <= hi[2] {
                                    self.scan_cell([x, y, z], q, &mut best);
                                }
                                if k == 0 {
                                    break;
                                }
                            }
                        }
                    }
                }
            }

            // Distance from q to the nearest face of the visited cube, over
            // axes where cells remain outside it.
            let mut bound = f64::INFINITY;
            let mut covered = true;
            for a in 0..3 {
                if center[a] - k > 0 {
                    covered = false;
                    let face = self.origin[a] + (center[a] - k) as f64 * self.cell;
                    bound = bound.min(qv[a] - face);
                }
                if center[a] + k < dims[a] - 1 {
                    covered = false;
                    let face = self.origin[a] + (center[a] + k + 1) as f64 * self.cell;
                    bound = bound.min(face - qv[a]);
                }
            }
            if covered {
                return Some(best);
            }
            let bound = (bound - slack).max(0.0);
            if best < bound * bound {
                return Some(best);
            }
            k += 1;
        }
    }
}
