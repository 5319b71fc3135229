//! Deterministic generators: the nine reference shapes, seeded boundary
//! noise, square and hexagonal grids, and variance-driven quadtrees.
//!
//! Every shape is rasterized by pixel-center inclusion: pixel `(x, y)`
//! belongs to the shape iff its center `(x + 0.5, y + 0.5)` satisfies the
//! kind's inequality. Coordinates below are relative to the shape center
//! `(u, v)`, with `v` pointing down, and `p` is the requested size.
//!
//! | kind | definition |
//! |---|---|
//! | Square | `|u| ≤ p/2` and `|v| ≤ p/2` (exactly `p²` pixels) |
//! | Circle | `u² + v² ≤ (p/2)²` |
//! | Hexagon | regular, pointy-top, circumradius `R = p/2`: `|u| ≤ R·√3/2` and `|u|/√3 + |v| ≤ R` |
//! | Ellipse | `(u / (p/2))² + (v / (p/4))² ≤ 1` (axes 2:1) |
//! | Cross | inside the `p × p` square and `|u| ≤ p/6` or `|v| ≤ p/6` (arm width `p/3`) |
//! | Bean | disk of radius `R = p/2` minus the disk of radius `0.55·R` centered at `(0, -0.65·R)` |
//! | W | points within `0.1·p` of the polyline `(-p/2, -p/2) → (-p/4, p/2) → (0, -0.4·p) → (p/4, p/2) → (p/2, -p/2)` |
//! | Split | two ellipses with semi-axes `(0.12·p, 0.42·p)` centered at `(±0.26·p, 0)`, joined by the one-pixel row `v ∈ [-0.5, 0.5)` |
//! | U | lower half (`v ≥ 0`) of the annulus `0.36·p ≤ r ≤ p/2` plus two bars `0.36·p ≤ |u| ≤ p/2`, `-p/2 ≤ v ≤ 0` |
//!
//! The generated shape keeps only its largest 4-connected component, so every
//! output is a single connected region.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{LabelMap, PixelCoord, Shape};
use crate::mask::Mask;

/// Smallest accepted shape size, in pixels.
pub const MIN_SHAPE_SIZE: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Square,
    Circle,
    Hexagon,
    Ellipse,
    Cross,
    Bean,
    W,
    Split,
    U,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeGroup {
    Regular,
    Standard,
    Irregular,
}

impl std::fmt::Display for ShapeGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ShapeGroup::Regular => "regular",
            ShapeGroup::Standard => "standard",
            ShapeGroup::Irregular => "irregular",
        })
    }
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 9] = [
        ShapeKind::Square,
        ShapeKind::Circle,
        ShapeKind::Hexagon,
        ShapeKind::Ellipse,
        ShapeKind::Cross,
        ShapeKind::Bean,
        ShapeKind::W,
        ShapeKind::Split,
        ShapeKind::U,
    ];

    pub fn group(self) -> ShapeGroup {
        match self {
            ShapeKind::Square | ShapeKind::Circle | ShapeKind::Hexagon => ShapeGroup::Regular,
            ShapeKind::Ellipse | ShapeKind::Cross | ShapeKind::Bean => ShapeGroup::Standard,
            ShapeKind::W | ShapeKind::Split | ShapeKind::U => ShapeGroup::Irregular,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Square => "square",
            ShapeKind::Circle => "circle",
            ShapeKind::Hexagon => "hexagon",
            ShapeKind::Ellipse => "ellipse",
            ShapeKind::Cross => "cross",
            ShapeKind::Bean => "bean",
            ShapeKind::W => "w",
            ShapeKind::Split => "split",
            ShapeKind::U => "u",
        }
    }

    fn contains(self, u: f64, v: f64, p: f64) -> bool {
        let r = p / 2.0;
        match self {
            ShapeKind::Square => u.abs() <= r && v.abs() <= r,
            ShapeKind::Circle => u * u + v * v <= r * r,
            ShapeKind::Hexagon => {
                let half_width = r * 3f64.sqrt() / 2.0;
                u.abs() <= half_width && u.abs() / 3f64.sqrt() + v.abs() <= r
            }
            ShapeKind::Ellipse => {
                let (a, b) = (p / 2.0, p / 4.0);
                (u / a).powi(2) + (v / b).powi(2) <= 1.0
            }
            ShapeKind::Cross => {
                u.abs() <= r && v.abs() <= r && (u.abs() <= p / 6.0 || v.abs() <= p / 6.0)
            }
            ShapeKind::Bean => {
                let bite_r = 0.55 * r;
                let bite_v = -0.65 * r;
                u * u + v * v <= r * r && u * u + (v - bite_v).powi(2) > bite_r * bite_r
            }
            ShapeKind::W => {
                let pts = [
                    (-r, -r),
                    (-p / 4.0, r),
                    (0.0, -0.4 * p),
                    (p / 4.0, r),
                    (r, -r),
                ];
                let half = 0.1 * p;
                pts.windows(2)
                    .any(|seg| dist_to_segment((u, v), seg[0], seg[1]) <= half)
            }
            ShapeKind::Split => {
                let (a, b, c) = (0.12 * p, 0.42 * p, 0.26 * p);
                let lobe = |cu: f64| ((u - cu) / a).powi(2) + (v / b).powi(2) <= 1.0;
                lobe(-c) || lobe(c) || (u.abs() <= c && (-0.5..0.5).contains(&v))
            }
            ShapeKind::U => {
                let inner = 0.36 * p;
                let rr = u * u + v * v;
                let ring = v >= 0.0 && rr <= r * r && rr >= inner * inner;
                let bars = u.abs() >= inner && u.abs() <= r && v <= 0.0 && v >= -r;
                ring || bars
            }
        }
    }
}

impl std::str::FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShapeKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown shape kind {s:?}")))
    }
}

impl std::fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn dist_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Empty border kept around generated shapes so that noise can grow them.
pub fn shape_margin(size: u32) -> u32 {
    8 + size / 8
}

/// Rasterizes one of the reference shapes inside a square canvas of side
/// `size + 2 * shape_margin(size)`.
pub fn make_shape(kind: ShapeKind, size: u32) -> Result<Shape> {
    if size < MIN_SHAPE_SIZE {
        return Err(Error::SizeTooSmall {
            size,
            min: MIN_SHAPE_SIZE,
        });
    }
    let p = size as f64;
    let m = shape_margin(size);
    let side = size + 2 * m;
    let c = m as f64 + p / 2.0;
    let mut mask = Mask::new(0, 0, side as usize, side as usize);
    for y in 0..side {
        for x in 0..side {
            let (u, v) = (x as f64 + 0.5 - c, y as f64 + 0.5 - c);
            if kind.contains(u, v, p) {
                mask.set(x as i64, y as i64, true);
            }
        }
    }
    mask.keep_largest_component();
    Shape::from_pixels(1, mask.to_pixels())
}

/// Digital disk of the given radius (pixel centers within `radius` of the
/// center), with the same margin convention as [`make_shape`].
pub fn make_disk(radius: f64) -> Result<Shape> {
    if radius <= 0.0 {
        return Err(Error::InvalidArgument(format!("disk radius {radius}")));
    }
    let m = 8.0;
    let side = (2.0 * radius + 2.0 * m).ceil() as u32;
    let c = side as f64 / 2.0;
    let mut mask = Mask::new(0, 0, side as usize, side as usize);
    for y in 0..side {
        for x in 0..side {
            let (u, v) = (x as f64 + 0.5 - c, y as f64 + 0.5 - c);
            if u * u + v * v <= radius * radius {
                mask.set(x as i64, y as i64, true);
            }
        }
    }
    Shape::from_pixels(1, mask.to_pixels())
}

/// Boundary flip noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Flip probability in `[0, 1]`.
    pub amplitude: f64,
    pub rounds: u32,
    pub seed: u64,
}

impl NoiseSpec {
    /// Rounds used when none are given explicitly.
    pub const DEFAULT_ROUNDS: u32 = 3;

    pub fn new(amplitude: f64, rounds: u32, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&amplitude) {
            return Err(Error::InvalidArgument(format!(
                "noise amplitude {amplitude} outside [0, 1]"
            )));
        }
        if rounds == 0 {
            return Err(Error::InvalidArgument("noise rounds must be >= 1".into()));
        }
        Ok(NoiseSpec {
            amplitude,
            rounds,
            seed,
        })
    }
}

/// Randomly erodes and dilates a shape's border.
///
/// Each round works on a snapshot of the previous state: every exterior
/// pixel 4-adjacent to the shape is added with probability `amplitude`, and
/// every boundary pixel is removed with the same probability. Candidates are
/// visited row-major and round `r` draws from ChaCha8 stream `r` of `seed`,
/// so the output depends only on the shape and the noise parameters. After
/// all rounds the largest 4-connected component is kept and enclosed holes
/// are filled.
/// Pixels never move to negative coordinates.
pub fn perturb_boundary(shape: &Shape, spec: &NoiseSpec) -> Result<Shape> {
    if spec.amplitude == 0.0 {
        return Ok(shape.clone());
    }
    let pad = spec.rounds as usize + 1;
    let mut mask = shape.to_mask(pad);
    let (x0, y0) = mask.origin();
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    for round in 0..spec.rounds {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(round as u64);
        let snapshot = mask.clone();
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                if snapshot.get(x, y) {
                    if snapshot.is_boundary(x, y) && rng.random::<f64>() < spec.amplitude {
                        mask.set(x, y, false);
                    }
                } else if [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|&(dx, dy)| snapshot.get(x + dx, y + dy))
                {
                    let flip = rng.random::<f64>() < spec.amplitude;
                    if flip && x >= 0 && y >= 0 {
                        mask.set(x, y, true);
                    }
                }
            }
        }
    }
    mask.keep_largest_component();
    mask.fill_holes();
    let pixels = mask.to_pixels();
    if pixels.is_empty() {
        return Err(Error::ShapeVanished);
    }
    Shape::from_pixels(shape.label, pixels)
}

/// Rectangular tiling with about `k` blocks.
///
/// The block side is `s = sqrt(width * height / k)`; the grid has
/// `round(width / s)` columns and `round(height / s)` rows (at least one
/// each), and column `c` spans `[c * width / cols, (c + 1) * width / cols)`,
/// so block widths (and heights) differ by at most one pixel. Labels run
/// row-major from 0.
pub fn square_grid(width: u32, height: u32, k: u32) -> Result<LabelMap> {
    if k == 0 {
        return Err(Error::InvalidArgument("superpixel count must be >= 1".into()));
    }
    let step = ((width as f64 * height as f64) / k as f64).sqrt();
    let cols = ((width as f64 / step).round() as u32).clamp(1, width.max(1));
    let rows = ((height as f64 / step).round() as u32).clamp(1, height.max(1));
    Ok(block_grid(width, height, cols, rows))
}

/// Exactly `cols x rows` near-uniform blocks.
pub fn block_grid(width: u32, height: u32, cols: u32, rows: u32) -> LabelMap {
    LabelMap::from_fn(width, height, |x, y| {
        let c = (x as u64 * cols as u64 / width as u64) as u32;
        let r = (y as u64 * rows as u64 / height as u64) as u32;
        r * cols + c
    })
}

/// Pointy-top hexagonal tiling with cells of area about `width * height / k`.
///
/// Each pixel goes to the nearest hexagon center (ties to the lower center
/// index), which tiles the plane with regular hexagons of side
/// `s = sqrt(2A / (3√3))`. Centers sit at `(√3·s·(i + 1/2 + (j mod 2)/2), s·(1 + 3j/2))`;
/// cells crossing the image border are clipped. Labels are renumbered from 0
/// in row-major order of first appearance.
pub fn hex_grid(width: u32, height: u32, k: u32) -> Result<LabelMap> {
    if k == 0 {
        return Err(Error::InvalidArgument("superpixel count must be >= 1".into()));
    }
    let area = width as f64 * height as f64 / k as f64;
    let side = (2.0 * area / (3.0 * 3f64.sqrt())).sqrt();
    let dx = 3f64.sqrt() * side;
    let dy = 1.5 * side;
    let n_cols = (width as f64 / dx).ceil() as i64 + 2;
    let center = |i: i64, j: i64| -> (f64, f64) {
        let shift = if j.rem_euclid(2) == 1 { dx / 2.0 } else { 0.0 };
        (dx * (i as f64 + 0.5) + shift, side * (1.0 + 1.5 * j as f64))
    };
    let index = |i: i64, j: i64| (j + 1) * (n_cols + 2) + (i + 1);

    let mut raw = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let j0 = ((py - side) / dy).round() as i64;
            let mut best: Option<(f64, i64)> = None;
            for j in j0 - 1..=j0 + 1 {
                let shift = if j.rem_euclid(2) == 1 { dx / 2.0 } else { 0.0 };
                let i0 = ((px - shift) / dx - 0.5).round() as i64;
                for i in i0 - 1..=i0 + 1 {
                    let (cx, cy) = center(i, j);
                    let d = (px - cx).powi(2) + (py - cy).powi(2);
                    let id = index(i, j);
                    let better = match best {
                        None => true,
                        Some((bd, bid)) => d < bd || (d == bd && id < bid),
                    };
                    if better {
                        best = Some((d, id));
                    }
                }
            }
            raw.push(best.map_or(0, |b| b.1));
        }
    }
    let mut remap = std::collections::HashMap::new();
    let labels = raw
        .into_iter()
        .map(|id| {
            let next = remap.len() as u32;
            *remap.entry(id).or_insert(next)
        })
        .collect();
    LabelMap::new(width, height, labels)
}

/// Single-channel intensity image.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub values: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, values: Vec<f64>) -> Result<Self> {
        if values.len() != width as usize * height as usize {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {width}x{height} image",
                values.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f64) -> Self {
        let mut values = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            values,
        }
    }

    fn block_variance(&self, x0: u32, y0: u32, side: u32) -> f64 {
        let n = (side as f64) * (side as f64);
        let (mut s, mut ss) = (0.0, 0.0);
        for y in y0..y0 + side {
            let row = &self.values[(y * self.width + x0) as usize..(y * self.width + x0 + side) as usize];
            for &v in row {
                s += v;
                ss += v * v;
            }
        }
        let mean = s / n;
        (ss / n - mean * mean).max(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadtreeParams {
    /// Blocks with population variance above this are split.
    pub variance_threshold: f64,
    /// Blocks of this side or smaller are never split.
    pub min_block: u32,
    /// Blocks larger than this are always split.
    pub max_block: u32,
}

/// Recursive 4-way split of a square power-of-two image.
///
/// A block is split while its side exceeds `max_block`, or while its
/// intensity variance exceeds the threshold and its side exceeds
/// `min_block`. Leaves are labeled in depth-first order (NW, NE, SW, SE).
pub fn quadtree(image: &GrayImage, params: &QuadtreeParams) -> Result<LabelMap> {
    if image.width != image.height {
        return Err(Error::NonSquareImage {
            width: image.width,
            height: image.height,
        });
    }
    if !image.width.is_power_of_two() {
        return Err(Error::NonPowerOfTwoSide(image.width));
    }
    let n = image.width;
    let mut labels = vec![0u32; n as usize * n as usize];
    let mut next = 0u32;
    let mut stack = vec![(0u32, 0u32, n)];
    while let Some((x0, y0, side)) = stack.pop() {
        let split = side > 1
            && (side > params.max_block
                || (side > params.min_block && image.block_variance(x0, y0, side) > params.variance_threshold));
        if split {
            let h = side / 2;
            // Pushed in reverse so NW is processed first.
            stack.push((x0 + h, y0 + h, h));
            stack.push((x0, y0 + h, h));
            stack.push((x0 + h, y0, h));
            stack.push((x0, y0, h));
        } else {
            for y in y0..y0 + side {
                for x in x0..x0 + side {
                    labels[(y * n + x) as usize] = next;
                }
            }
            next += 1;
        }
    }
    LabelMap::new(n, n, labels)
}

/// Pixels of a shape, translated so its bounding box starts at `(x0, y0)`.
pub fn translate(shape: &Shape, x0: u32, y0: u32) -> Result<Shape> {
    let (bx, by, _, _) = shape.bbox();
    Shape::from_pixels(
        shape.label,
        shape
            .pixels()
            .iter()
            .map(|p| PixelCoord::new(p.x - bx + x0, p.y - by + y0)),
    )
}

/// Shape rotated by 90 degrees, placed with its bounding box at the origin.
pub fn rotate90(shape: &Shape) -> Result<Shape> {
    let (bx, by, _, ymax) = shape.bbox();
    let span = ymax - by;
    Shape::from_pixels(
        shape.label,
        shape
            .pixels()
            .iter()
            .map(|p| PixelCoord::new(span - (p.y - by), p.x - bx)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_shape_has_exact_area() {
        let s = make_shape(ShapeKind::Square, 36).unwrap();
        assert_eq!(s.area(), 1296);
        assert_eq!(s.perimeter(), 140);
    }

    #[test]
    fn small_sizes_rejected() {
        assert!(matches!(
            make_shape(ShapeKind::Circle, 7),
            Err(Error::SizeTooSmall { size: 7, .. })
        ));
    }

    #[test]
    fn kind_names_parse() {
        for k in ShapeKind::ALL {
            assert_eq!(k.name().parse::<ShapeKind>().unwrap(), k);
        }
        assert!("blob".parse::<ShapeKind>().is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let s = make_shape(ShapeKind::Bean, 40).unwrap();
        let spec = NoiseSpec::new(0.0, 3, 9).unwrap();
        assert_eq!(perturb_boundary(&s, &spec).unwrap(), s);
    }

    #[test]
    fn noise_is_seeded() {
        let s = make_shape(ShapeKind::Circle, 40).unwrap();
        let a = perturb_boundary(&s, &NoiseSpec::new(0.3, 3, 5).unwrap()).unwrap();
        let b = perturb_boundary(&s, &NoiseSpec::new(0.3, 3, 5).unwrap()).unwrap();
        let c = perturb_boundary(&s, &NoiseSpec::new(0.3, 3, 6).unwrap()).unwrap();
        assert_eq!(a.pixels(), b.pixels());
        assert_ne!(a.pixels(), c.pixels());
    }

    #[test]
    fn noise_spec_validation() {
        assert!(NoiseSpec::new(1.5, 1, 0).is_err());
        assert!(NoiseSpec::new(0.5, 0, 0).is_err());
    }

    #[test]
    fn square_grid_examples() {
        let g = square_grid(320, 320, 400).unwrap();
        assert_eq!(g.distinct_labels(), 400);
        let g = square_grid(10, 10, 1).unwrap();
        assert_eq!(g.distinct_labels(), 1);
        let g = square_grid(321, 481, 200).unwrap();
        assert_eq!(g.len(), 321 * 481);
        // side ~ 27.8: 12 columns, 17 rows
        assert_eq!(g.distinct_labels(), 12 * 17);
    }

    #[test]
    fn quadtree_rejects_bad_images() {
        let params = QuadtreeParams {
            variance_threshold: 0.0,
            min_block: 1,
            max_block: 64,
        };
        let img = GrayImage::from_fn(8, 4, |_, _| 0.0);
        assert!(matches!(quadtree(&img, &params), Err(Error::NonSquareImage { .. })));
        let img = GrayImage::from_fn(6, 6, |_, _| 0.0);
        assert!(matches!(quadtree(&img, &params), Err(Error::NonPowerOfTwoSide(6))));
    }

    #[test]
    fn quadtree_constant_and_checkerboard() {
        let params = QuadtreeParams {
            variance_threshold: 0.0,
            min_block: 2,
            max_block: 64,
        };
        let flat = GrayImage::from_fn(64, 64, |_, _| 10.0);
        assert_eq!(quadtree(&flat, &params).unwrap().distinct_labels(), 1);
        let checker = GrayImage::from_fn(64, 64, |x, y| ((x + y) % 2) as f64);
        assert_eq!(quadtree(&checker, &params).unwrap().distinct_labels(), 32 * 32);
        let capped = QuadtreeParams {
            max_block: 16,
            ..params
        };
        assert_eq!(quadtree(&flat, &capped).unwrap().distinct_labels(), 16);
    }
}
