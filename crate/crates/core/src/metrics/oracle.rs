//! Exhaustive reference implementations of the distance metrics.
//!
//! These scan every pair and sum in the same order as the indexed versions,
//! so results must agree exactly.

use crate::pointcloud::{Point3, PointCloud};

pub fn nn_sq_dist(p: &Point3, cloud: &PointCloud) -> f64 {
    let mut best = f64::INFINITY;
    for q in cloud {
        let d = p.dist_sq(q);
        if d < best {
            best = d;
        }
    }
    best
}

pub fn mse(c1: &PointCloud, c2: &PointCloud) -> f64 {
    let mut sum = 0.0;
    for p in c2 {
        sum += nn_sq_dist(p, c1);
    }
    sum / c2.len() as f64
}

pub fn chamfer_distance(orig: &PointCloud, comp: &PointCloud) -> f64 {
    mse(orig, comp) + mse(comp, orig)
}
