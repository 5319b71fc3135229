//! Helpers shared by the integration suites: random blobs, random
//! partitions and brute-force reference implementations.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapereg::{LabelMap, PixelCoord, Shape};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Grows a 4-connected blob of up to `n` pixels inside `w × h` from a list
/// of choices; the same choices always give the same blob.
pub fn grow_blob(w: u32, h: u32, start: u32, choices: &[u32]) -> Vec<PixelCoord> {
    let idx = |p: PixelCoord| (p.y * w + p.x) as usize;
    let mut inside = vec![false; (w * h) as usize];
    let first = PixelCoord::new(start % w, (start / w) % h);
    inside[idx(first)] = true;
    let mut pixels = vec![first];
    for &c in choices {
        let mut frontier = Vec::new();
        for p in &pixels {
            let (x, y) = (p.x as i64, p.y as i64);
            for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
                if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                    let q = PixelCoord::new(nx as u32, ny as u32);
                    if !inside[idx(q)] {
                        frontier.push(q);
                    }
                }
            }
        }
        if frontier.is_empty() {
            break;
        }
        frontier.sort_unstable();
        frontier.dedup();
        let q = frontier[c as usize % frontier.len()];
        inside[idx(q)] = true;
        pixels.push(q);
    }
    pixels
}

pub fn random_blob(rng: &mut impl Rng, max_side: u32, max_pixels: usize) -> Vec<PixelCoord> {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    let n = rng.random_range(0..max_pixels);
    let choices: Vec<u32> = (0..n).map(|_| rng.random()).collect();
    grow_blob(w, h, rng.random(), &choices)
}

pub fn blob_shape(pixels: Vec<PixelCoord>) -> Shape {
    Shape::from_pixels(1, pixels).unwrap()
}

/// Random label map: a coarse grid of random labels refined with random
/// single-pixel changes, so labels are often disconnected.
pub fn random_partition(rng: &mut impl Rng, max_side: u32, max_label: u32) -> LabelMap {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    let cell = rng.random_range(1..=4u32);
    let cw = w.div_ceil(cell);
    let coarse: Vec<u32> = (0..cw * h.div_ceil(cell))
        .map(|_| rng.random_range(0..=max_label))
        .collect();
    let mut labels: Vec<u32> = (0..w * h)
        .map(|i| coarse[((i / w / cell) * cw + (i % w) / cell) as usize])
        .collect();
    for _ in 0..rng.random_range(0..(w * h) / 4 + 1) {
        let i = rng.random_range(0..labels.len());
        labels[i] = rng.random_range(0..=max_label);
    }
    LabelMap::new(w, h, labels).unwrap()
}

/// Reference `(hull_area_px, hull_perimeter_px)`: every pixel center in the
/// bounding region is tested against every supporting half-plane of the
/// corner point set, in doubled integer coordinates.
pub fn hull_stats_oracle(pixels: &[PixelCoord]) -> (usize, usize) {
    let mut corners: Vec<(i64, i64)> = pixels
        .iter()
        .flat_map(|p| {
            let (x, y) = (2 * p.x as i64, 2 * p.y as i64);
            [(x, y), (x + 2, y), (x, y + 2), (x + 2, y + 2)]
        })
        .collect();
    corners.sort_unstable();
    corners.dedup();
    let cross = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
        (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
    };
    let mut planes = Vec::new();
    for &a in &corners {
        for &b in &corners {
            if a != b && corners.iter().all(|&c| cross(a, b, c) >= 0) {
                planes.push((a, b));
            }
        }
    }
    let xmax = corners.iter().map(|c| c.0).max().unwrap() / 2;
    let ymax = corners.iter().map(|c| c.1).max().unwrap() / 2;
    let mut inside = std::collections::HashSet::new();
    for y in 0..ymax {
        for x in 0..xmax {
            let c = (2 * x + 1, 2 * y + 1);
            if planes.iter().all(|&(a, b)| cross(a, b, c) >= 0) {
                inside.insert((x, y));
            }
        }
    }
    let perimeter = inside
        .iter()
        .filter(|&&(x, y)| {
            [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)]
                .iter()
                .any(|q| !inside.contains(q))
        })
        .count();
    (inside.len(), perimeter)
}

/// Two-pass mean and population standard deviation of pixel coordinates.
pub fn moments_oracle(pixels: &[PixelCoord]) -> ((f64, f64), f64, f64) {
    let n = pixels.len() as f64;
    let mx = pixels.iter().map(|p| p.x as f64).sum::<f64>() / n;
    let my = pixels.iter().map(|p| p.y as f64).sum::<f64>() / n;
    let vx = pixels.iter().map(|p| (p.x as f64 - mx).powi(2)).sum::<f64>() / n;
    let vy = pixels.iter().map(|p| (p.y as f64 - my).powi(2)).sum::<f64>() / n;
    ((mx, my), vx.sqrt(), vy.sqrt())
}

/// Checks that a decomposition is a partition of its label map.
pub fn assert_partition(map: &LabelMap) {
    let d = shapereg::extract_superpixels(map, shapereg::ConnectivityPolicy::SplitDisconnected)
        .unwrap();
    let mut seen = vec![0u8; map.len()];
    for s in d.shapes() {
        for p in s.pixels() {
            seen[(p.y * map.width() + p.x) as usize] += 1;
            assert_eq!(map.get(p.x, p.y), map.get(s.pixels()[0].x, s.pixels()[0].y));
        }
    }
    assert!(seen.iter().all(|&c| c == 1), "not a partition");
    assert_eq!(d.shapes().iter().map(|s| s.area()).sum::<usize>(), map.len());
}
