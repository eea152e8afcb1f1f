use flicr_core::pointcloud::{ray_direction, synth_scan, Aabb, Axis, AxisPlane, Scene};
use flicr_core::{Point3, SensorModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coord(p: &Point3, k: usize) -> f64 {
    [p.x, p.y, p.z][k]
}

/// Nearest hit over every face rectangle of every box and every plane.
fn brute_cast(scene: &Scene, dir: &Point3) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut take = |t: f64| {
        if t > 1e-6 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };
    if let Some(g) = scene.ground_z {
        if dir.z != 0.0 {
            take(g / dir.z);
        }
    }
    for p in &scene.planes {
        let k = match p.axis {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        };
        if coord(dir, k) != 0.0 {
            take(p.offset / coord(dir, k));
        }
    }
    for b in &scene.boxes {
        for k in 0..3 {
            let d = coord(dir, k);
            if d == 0.0 {
                continue;
            }
            for face in [coord(&b.min, k), coord(&b.max, k)] {
                let t = face / d;
                let inside = (0..3).filter(|&j| j != k).all(|j| {
                    let v = coord(dir, j) * t;
                    v >= coord(&b.min, j) && v <= coord(&b.max, j)
                });
                if inside {
                    take(t);
                }
            }
        }
    }
    best
}

fn random_scene(rng: &mut ChaCha8Rng) -> Scene {
    let boxes = (0..25)
        .map(|_| {
            let c = [rng.random_range(-40.0..40.0), rng.random_range(-40.0..40.0), rng.random_range(-1.7..3.0)];
            let h = [rng.random_range(0.2..6.0), rng.random_range(0.2..6.0), rng.random_range(0.2..4.0)];
            Aabb::new([c[0] - h[0], c[1] - h[1], c[2] - h[2]], [c[0] + h[0], c[1] + h[1], c[2] + h[2]])
        })
        .filter(|b| !(b.min.x < 0.0 && b.max.x > 0.0 && b.min.y < 0.0 && b.max.y > 0.0))
        .collect();
    Scene {
        ground_z: Some(-1.73),
        planes: vec![AxisPlane { axis: Axis::X, offset: 70.0 }],
        boxes,
    }
}

#[test]
fn scan_matches_face_by_face_ray_caster() {
    let model = SensorModel::hdl64e().with_resolution(600, 48);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..4 {
        let scene = random_scene(&mut rng);
        let mut expected = Vec::new();
        for row in 0..model.rows {
            for col in 0..model.cols {
                let dir = ray_direction(&model, row, col);
                if let Some(t) = brute_cast(&scene, &dir).filter(|&t| t <= model.max_range_m) {
                    expected.push(t);
                }
            }
        }
        let got: Vec<f64> = synth_scan(&model, &scene).iter().map(|p| p.norm()).collect();
        assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() <= 1e-9 * e.max(1.0), "{g} vs {e}");
        }
    }
}

#[test]
fn sensor_inside_a_box_sees_its_walls() {
    let model = SensorModel::hdl64e().with_resolution(360, 16);
    let scene = Scene { boxes: vec![Aabb::new([-5.0, -3.0, -2.0], [5.0, 3.0, 4.0])], ..Scene::default() };
    let pc = synth_scan(&model, &scene);
    assert_eq!(pc.len(), model.cells());
    for (i, p) in pc.iter().enumerate() {
        let dir = ray_direction(&model, i / model.cols, i % model.cols);
        let t = brute_cast(&scene, &dir).unwrap();
        assert!((p.norm() - t).abs() <= 1e-9 * t);
    }
}
