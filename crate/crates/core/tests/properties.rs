mod common;

use common::*;
use proptest::prelude::*;
use shapereg::geometry::hull_stats;
use shapereg::graph::{adjacency_graph, edge_stats};
use shapereg::io::{emit_plot, load_label_map, save_label_map, Axes, Series};
use shapereg::label::boundary_pixels;
use shapereg::metrics::{decomposition_metrics, shape_metrics, ShapeMetrics};
use shapereg::synth::*;
use shapereg::{extract_superpixels, ConnectivityPolicy, LabelMap, PixelCoord, Shape};

fn blob() -> impl Strategy<Value = Vec<PixelCoord>> {
    (1u32..=12, 1u32..=12, any::<u32>(), proptest::collection::vec(any::<u32>(), 0..80))
        .prop_map(|(w, h, s, c)| grow_blob(w, h, s, &c))
}

fn label_map() -> impl Strategy<Value = LabelMap> {
    any::<u64>().prop_map(|seed| random_partition(&mut rng(seed), 24, 5))
}

fn metrics_close(a: &ShapeMetrics, b: &ShapeMetrics) -> bool {
    let v = |m: &ShapeMetrics| [m.circularity, m.solidity, m.vxy, m.contour_smoothness, m.src_term];
    v(a).iter().zip(v(b)).all(|(x, y)| (x - y).abs() < 1e-12)
}

proptest! {
    #[test]
    fn metrics_in_unit_range(pixels in blob()) {
        let m = ShapeMetrics::of(&blob_shape(pixels));
        for v in [m.circularity, m.solidity, m.vxy, m.contour_smoothness, m.src_term] {
            prop_assert!((0.0..=1.0).contains(&v), "{m:?}");
        }
        prop_assert!((m.src_term - m.solidity * m.vxy * m.contour_smoothness).abs() < 1e-15);
    }

    #[test]
    fn translation_invariance(pixels in blob(), dx in 0u32..50, dy in 0u32..50) {
        let s = blob_shape(pixels);
        let t = translate(&s, dx, dy).unwrap();
        prop_assert!(metrics_close(&ShapeMetrics::of(&s), &ShapeMetrics::of(&t)));
    }

    #[test]
    fn rotation_invariance(pixels in blob()) {
        let s = blob_shape(pixels);
        let r = rotate90(&s).unwrap();
        prop_assert!(metrics_close(&ShapeMetrics::of(&s), &ShapeMetrics::of(&r)));
        prop_assert_eq!(hull_stats(&s), hull_stats(&r));
    }

    #[test]
    fn pixel_order_is_irrelevant(pixels in blob()) {
        let mut rev = pixels.clone();
        rev.reverse();
        prop_assert_eq!(blob_shape(pixels), blob_shape(rev));
    }

    #[test]
    fn hull_contains_shape(pixels in blob()) {
        let s = blob_shape(pixels);
        let hull = shapereg::geometry::hull_pixels(&s);
        prop_assert!(s.pixels().iter().all(|p| hull.binary_search(p).is_ok()));
    }

    #[test]
    fn hull_area_is_monotone(pixels in blob(), extra in any::<u32>()) {
        let s = blob_shape(pixels.clone());
        // Add one 4-neighbour so the blob stays connected.
        let p = pixels[extra as usize % pixels.len()];
        let mut more = pixels;
        more.push(PixelCoord::new(p.x + 1, p.y));
        let bigger = blob_shape(more);
        prop_assert!(hull_stats(&bigger).hull_area_px >= hull_stats(&s).hull_area_px);
    }

    #[test]
    fn boundary_is_minimal(pixels in blob()) {
        let s = blob_shape(pixels);
        let boundary = boundary_pixels(s.pixels());
        for p in s.pixels() {
            let (x, y) = (p.x as i64, p.y as i64);
            let exposed = [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)].iter().any(|&(nx, ny)| {
                nx < 0 || ny < 0 || !s.contains(PixelCoord::new(nx as u32, ny as u32))
            });
            prop_assert_eq!(exposed, boundary.binary_search(p).is_ok());
        }
    }

    #[test]
    fn partition_of_random_maps(map in label_map()) {
        assert_partition(&map);
        let d = extract_superpixels(&map, ConnectivityPolicy::SplitDisconnected).unwrap();
        let per = shape_metrics(&d);
        let weighted: f64 = d.shapes().iter().zip(&per)
            .map(|(s, m)| s.area() as f64 / d.image_area() as f64 * m.src_term).sum();
        prop_assert!((decomposition_metrics(&d).src - weighted).abs() < 1e-12);
    }

    #[test]
    fn generators_partition(w in 1u32..80, h in 1u32..80, k in 1u32..60) {
        assert_partition(&square_grid(w, h, k).unwrap());
        assert_partition(&hex_grid(w, h, k).unwrap());
    }

    #[test]
    fn quadtree_partitions(exp in 0u32..6, seed in any::<u64>(), threshold in 0.0f64..0.1) {
        let n = 1u32 << exp;
        let mut r = rng(seed);
        let img = GrayImage::from_fn(n, n, |_, _| rand::Rng::random::<f64>(&mut r));
        let params = QuadtreeParams { variance_threshold: threshold, min_block: 1, max_block: n };
        let map = quadtree(&img, &params).unwrap();
        assert_partition(&map);
        let d = extract_superpixels(&map, ConnectivityPolicy::Strict).unwrap();
        prop_assert_eq!(decomposition_metrics(&d).src, 1.0);
    }

    #[test]
    fn grid_edge_count(cols in 1u32..8, rows in 1u32..8, cell in 1u32..6) {
        let map = block_grid(cols * cell, rows * cell, cols, rows);
        let d = extract_superpixels(&map, ConnectivityPolicy::Strict).unwrap();
        let g = adjacency_graph(&d);
        prop_assert_eq!(g.nodes.len(), (cols * rows) as usize);
        prop_assert_eq!(g.edges.len(), (rows * (cols - 1) + cols * (rows - 1)) as usize);
        if let Ok(s) = edge_stats(&g) {
            prop_assert!(s.coefficient_of_variation.abs() < 1e-12);
        }
    }

    #[test]
    fn graph_ignores_relabeling(map in label_map(), shift in 1u32..1000) {
        let relabeled = LabelMap::new(map.width(), map.height(),
            map.labels().iter().map(|l| (l + shift) * 3).collect()).unwrap();
        let a = adjacency_graph(&extract_superpixels(&map, ConnectivityPolicy::SplitDisconnected).unwrap());
        let b = adjacency_graph(&extract_superpixels(&relabeled, ConnectivityPolicy::SplitDisconnected).unwrap());
        let pairs = |g: &shapereg::graph::AdjacencyGraph| -> Vec<(usize, usize, u64)> {
            g.edges.iter().map(|e| (e.a, e.b, e.length.to_bits())).collect()
        };
        prop_assert_eq!(pairs(&a), pairs(&b));
        prop_assert!(a.edges.iter().all(|e| e.a < e.b));
    }

    #[test]
    fn label_files_round_trip(map in label_map()) {
        let dir = tempfile::tempdir().unwrap();
        for ext in ["pgm", "png", "csv"] {
            let path = dir.path().join(format!("m.{ext}"));
            save_label_map(&map, &path).unwrap();
            prop_assert_eq!(&load_label_map(&path).unwrap(), &map);
        }
    }

    #[test]
    fn noise_is_deterministic(kind in 0usize..9, seed in any::<u64>(), amp in 0.0f64..0.6) {
        let s = make_shape(ShapeKind::ALL[kind], 24).unwrap();
        let spec = NoiseSpec::new(amp, 2, seed).unwrap();
        let a = perturb_boundary(&s, &spec).unwrap();
        let b = perturb_boundary(&s, &spec).unwrap();
        prop_assert_eq!(a.pixels(), b.pixels());
        prop_assert_eq!(extract_superpixels(&a.to_label_map(60, 60), ConnectivityPolicy::Strict)
            .unwrap().shapes().len(), 2);
    }

    #[test]
    fn plots_are_deterministic(ys in proptest::collection::vec(0.0f64..1.0, 1..20)) {
        let s = vec![Series::new("y", ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect())];
        let a = emit_plot(&s, &Axes::default()).unwrap();
        prop_assert_eq!(&a, &emit_plot(&s, &Axes::default()).unwrap());
        prop_assert_eq!(a.matches(r#"class="marker""#).count(), ys.len());
    }
}

#[test]
fn shape_from_unsorted_pixels() {
    let s = Shape::from_pixels(0, [PixelCoord::new(1, 0), PixelCoord::new(0, 0), PixelCoord::new(1, 0)])
        .unwrap();
    assert_eq!(s.area(), 2);
}
