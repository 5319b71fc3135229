mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use shapereg::geometry::{convex_hull, hull_stats, point_in_polygon, Point, PointLocation};
use shapereg::metrics::{boundary_recall, undersegmentation_error, UeFormula};
use shapereg::{extract_superpixels, moments, ConnectivityPolicy};

#[test]
fn hull_stats_match_half_plane_oracle() {
    let mut r = rng(11);
    for _ in 0..200 {
        let pixels = random_blob(&mut r, 12, 60);
        let stats = hull_stats(&blob_shape(pixels.clone()));
        let (area, perimeter) = hull_stats_oracle(&pixels);
        assert_eq!((stats.hull_area_px, stats.hull_perimeter_px), (area, perimeter), "{pixels:?}");
    }
}

#[test]
fn hull_contains_random_disk_points() {
    let mut r = rng(5);
    let pts: Vec<Point> = (0..100)
        .map(|_| {
            let (a, d): (f64, f64) = (r.random_range(0.0..std::f64::consts::TAU), r.random());
            Point::new(10.0 * d.sqrt() * a.cos(), 10.0 * d.sqrt() * a.sin())
        })
        .collect();
    let hull = convex_hull(&pts).unwrap();
    for p in &pts {
        assert_ne!(point_in_polygon(*p, &hull).unwrap(), PointLocation::Outside);
    }
    // A point is a hull vertex iff some line through it leaves every other
    // point strictly on one side.
    let cross = |a: Point, b: Point, c: Point| (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let is_vertex = |i: usize| {
        pts.iter().enumerate().any(|(j, &b)| {
            j != i
                && pts
                    .iter()
                    .enumerate()
                    .all(|(k, &c)| k == i || k == j || cross(pts[i], b, c) > 0.0)
        })
    };
    let expected: Vec<Point> = (0..pts.len()).filter(|&i| is_vertex(i)).map(|i| pts[i]).collect();
    assert_eq!(hull.vertices().len(), expected.len());
    for v in hull.vertices() {
        assert!(expected.contains(v));
    }
}

#[test]
fn moments_match_two_pass() {
    let mut r = rng(3);
    for _ in 0..200 {
        let pixels = random_blob(&mut r, 40, 300);
        let m = moments(&pixels);
        let (b, sx, sy) = moments_oracle(&pixels);
        assert!((m.barycenter.0 - b.0).abs() < 1e-12);
        assert!((m.barycenter.1 - b.1).abs() < 1e-12);
        assert!((m.sigma_x - sx).abs() < 1e-12);
        assert!((m.sigma_y - sy).abs() < 1e-12);
    }
}

#[test]
fn ue_br_identities() {
    let mut r = rng(9);
    for _ in 0..50 {
        let map = random_partition(&mut r, 30, 6);
        let d = extract_superpixels(&map, ConnectivityPolicy::SplitDisconnected).unwrap();
        assert_eq!(undersegmentation_error(&d, &map).unwrap(), 0.0);
        assert_eq!(
            shapereg::metrics::undersegmentation_error_with(&d, &map, UeFormula::Leakage).unwrap(),
            0.0
        );
        for eps in [0, 2] {
            assert_eq!(boundary_recall(&d, &map, eps).unwrap(), 1.0);
        }
    }
}

proptest! {
    #[test]
    fn hull_oracle_prop(w in 1u32..=12, h in 1u32..=12, start in any::<u32>(),
                        choices in proptest::collection::vec(any::<u32>(), 0..50)) {
        let pixels = grow_blob(w, h, start, &choices);
        let stats = hull_stats(&blob_shape(pixels.clone()));
        prop_assert_eq!((stats.hull_area_px, stats.hull_perimeter_px), hull_stats_oracle(&pixels));
    }

    #[test]
    fn ue_is_bounded(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_partition(&mut r, 16, 4);
        let b = shapereg::LabelMap::from_fn(a.width(), a.height(), |x, y| (x * 7 + y * 3) % 5);
        let d = extract_superpixels(&a, ConnectivityPolicy::SplitDisconnected).unwrap();
        let ue = undersegmentation_error(&d, &b).unwrap();
        prop_assert!(ue >= 0.0);
        let leak = shapereg::metrics::undersegmentation_error_with(&d, &b, UeFormula::Leakage).unwrap();
        prop_assert!((0.0..=1.0).contains(&leak));
        let br = boundary_recall(&d, &b, 1).unwrap();
        prop_assert!((0.0..=1.0).contains(&br));
    }
}
