//! Label maps and their decomposition into connected superpixels.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::Mask;

/// Integer pixel position: `x` is the column, `y` the row.
///
/// Ordered row-major (by `y`, then `x`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelCoord {
    pub x: u32,
    pub y: u32,
}

impl PixelCoord {
    pub const fn new(x: u32, y: u32) -> Self {
        PixelCoord { x, y }
    }
}

impl Ord for PixelCoord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for PixelCoord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Row-major grid of superpixel labels. Labels need not be contiguous.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    width: u32,
    height: u32,
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn new(width: u32, height: u32, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width as usize * height as usize {
            return Err(Error::InvalidArgument(format!(
                "{} labels for a {width}x{height} grid",
                labels.len()
            )));
        }
        Ok(LabelMap {
            width,
            height,
            labels,
        })
    }

    pub fn filled(width: u32, height: u32, label: u32) -> Self {
        LabelMap {
            width,
            height,
            labels: vec![label; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u32) -> Self {
        let mut labels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                labels.push(f(x, y));
            }
        }
        LabelMap {
            width,
            height,
            labels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn max_label(&self) -> Option<u32> {
        self.labels.iter().copied().max()
    }

    /// Number of distinct label values.
    pub fn distinct_labels(&self) -> usize {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l.dedup();
        l.len()
    }
}

/// What to do with a label whose pixels form several 4-connected components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectivityPolicy {
    /// Disconnected labels are rejected with [`Error::DisconnectedLabel`].
    Strict,
    /// Every component becomes its own shape; the first component (row-major)
    /// keeps the original label, later ones get fresh labels above the map's
    /// maximum.
    #[default]
    SplitDisconnected,
}

/// Barycenter and population standard deviations of pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub barycenter: (f64, f64),
    pub sigma_x: f64,
    pub sigma_y: f64,
}

/// Barycenter and population (divide-by-N) standard deviations of the
/// integer pixel coordinates.
///
/// Sums are accumulated exactly in integers, so the result does not depend
/// on pixel order.
///
/// # Panics
/// If `pixels` is empty.
pub fn moments(pixels: &[PixelCoord]) -> Moments {
    assert!(!pixels.is_empty(), "moments of an empty pixel set");
    let n = pixels.len() as i128;
    let (mut sx, mut sy, mut sxx, mut syy) = (0i128, 0i128, 0i128, 0i128);
    for p in pixels {
        let (x, y) = (p.x as i128, p.y as i128);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
    }
    // n^2 var = n * sum(x^2) - sum(x)^2, exact and non-negative.
    let var = |s: i128, ss: i128| ((n * ss - s * s) as f64) / ((n * n) as f64);
    Moments {
        barycenter: (sx as f64 / n as f64, sy as f64 / n as f64),
        sigma_x: var(sx, sxx).sqrt(),
        sigma_y: var(sy, syy).sqrt(),
    }
}

/// Pixels of the set having at least one 4-neighbour outside the set.
///
/// Pixels beyond the image border are never in the set, so the image border
/// counts as exterior without needing the grid extent. The result is
/// row-major.
pub fn boundary_pixels(pixels: &[PixelCoord]) -> Vec<PixelCoord> {
    let mask = Mask::from_pixels(pixels, 1);
    let mut out: Vec<PixelCoord> = pixels
        .iter()
        .copied()
        .filter(|p| mask.is_boundary(p.x as i64, p.y as i64))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// One superpixel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub label: u32,
    pixels: Vec<PixelCoord>,
    boundary: Vec<PixelCoord>,
    moments: Moments,
}

impl Shape {
    /// Builds a shape from any collection of pixels; duplicates are dropped.
    ///
    /// Connectivity is not checked here; [`extract_superpixels`] and the
    /// generators only ever produce 4-connected sets.
    pub fn from_pixels(label: u32, pixels: impl IntoIterator<Item = PixelCoord>) -> Result<Self> {
        let mut pixels: Vec<PixelCoord> = pixels.into_iter().collect();
        if pixels.is_empty() {
            return Err(Error::EmptyInput);
        }
        pixels.sort_unstable();
        pixels.dedup();
        let boundary = boundary_pixels(&pixels);
        let moments = moments(&pixels);
        Ok(Shape {
            label,
            pixels,
            boundary,
            moments,
        })
    }

    /// Row-major, duplicate-free.
    pub fn pixels(&self) -> &[PixelCoord] {
        &self.pixels
    }

    pub fn boundary(&self) -> &[PixelCoord] {
        &self.boundary
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// `|P(S)|`: number of boundary pixels.
    pub fn perimeter(&self) -> usize {
        self.boundary.len()
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    pub fn barycenter(&self) -> (f64, f64) {
        self.moments.barycenter
    }

    pub fn sigma_x(&self) -> f64 {
        self.moments.sigma_x
    }

    pub fn sigma_y(&self) -> f64 {
        self.moments.sigma_y
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        self.pixels.binary_search(&p).is_ok()
    }

    /// Inclusive bounding box `(xmin, ymin, xmax, ymax)`.
    pub fn bbox(&self) -> (u32, u32, u32, u32) {
        let xmin = self.pixels.iter().map(|p| p.x).min().unwrap_or(0);
        let xmax = self.pixels.iter().map(|p| p.x).max().unwrap_or(0);
        let ymin = self.pixels.first().map_or(0, |p| p.y);
        let ymax = self.pixels.last().map_or(0, |p| p.y);
        (xmin, ymin, xmax, ymax)
    }

    pub fn to_mask(&self, pad: usize) -> Mask {
        Mask::from_pixels(&self.pixels, pad)
    }

    /// Rasterizes the shape into a binary label map of the given size
    /// (1 inside, 0 outside). Pixels beyond the map are dropped.
    pub fn to_label_map(&self, width: u32, height: u32) -> LabelMap {
        let mut labels = vec![0u32; width as usize * height as usize];
        for p in &self.pixels {
            if p.x < width && p.y < height {
                labels[p.y as usize * width as usize + p.x as usize] = 1;
            }
        }
        LabelMap {
            width,
            height,
            labels,
        }
    }
}

/// A label map split into 4-connected shapes.
#[derive(Clone, Debug)]
pub struct Decomposition {
    source: LabelMap,
    shapes: Vec<Shape>,
    shape_index: Vec<u32>,
}

impl Decomposition {
    pub fn source(&self) -> &LabelMap {
        &self.source
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn width(&self) -> u32 {
        self.source.width
    }

    pub fn height(&self) -> u32 {
        self.source.height
    }

    /// `|I|`.
    pub fn image_area(&self) -> usize {
        self.source.len()
    }

    /// Index into [`Decomposition::shapes`] of the shape owning pixel `(x, y)`.
    pub fn shape_at(&self, x: u32, y: u32) -> usize {
        self.shape_index[y as usize * self.source.width as usize + x as usize] as usize
    }

    /// Per-pixel shape index grid, row-major.
    pub fn shape_index(&self) -> &[u32] {
        &self.shape_index
    }

    /// Label map carrying the (possibly fresh) shape labels.
    pub fn shape_label_map(&self) -> LabelMap {
        LabelMap {
            width: self.source.width,
            height: self.source.height,
            labels: self
                .shape_index
                .iter()
                .map(|&i| self.shapes[i as usize].label)
                .collect(),
        }
    }
}

/// Splits a label map into one [`Shape`] per 4-connected component.
///
/// Shapes are ordered by their first pixel in row-major order.
pub fn extract_superpixels(map: &LabelMap, policy: ConnectivityPolicy) -> Result<Decomposition> {
    if map.is_empty() {
        return Err(Error::EmptyMap);
    }
    let (w, h) = (map.width as usize, map.height as usize);
    let mut comp = vec![u32::MAX; w * h];
    let mut members: Vec<Vec<PixelCoord>> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if comp[start] != u32::MAX {
            continue;
        }
        let id = members.len() as u32;
        let label = map.labels[start];
        let mut pixels = Vec::new();
        comp[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            pixels.push(PixelCoord::new(x as u32, y as u32));
            let mut visit = |j: usize| {
                if comp[j] == u32::MAX && map.labels[j] == label {
                    comp[j] = id;
                    stack.push(j);
                }
            };
            if x + 1 < w {
                visit(i + 1);
            }
            if x > 0 {
                visit(i - 1);
            }
            if y + 1 < h {
                visit(i + w);
            }
            if y > 0 {
                visit(i - w);
            }
        }
        members.push(pixels);
    }

    let mut seen: HashMap<u32, usize> = HashMap::new();
    let mut next_fresh = map.max_label().unwrap_or(0).saturating_add(1);
    let mut shape_labels = Vec::with_capacity(members.len());
    for pixels in &members {
        let first = pixels[0];
        let label = map.get(first.x, first.y);
        let count = seen.entry(label).or_insert(0);
        *count += 1;
        if *count == 1 {
            shape_labels.push(label);
        } else {
            match policy {
                ConnectivityPolicy::Strict => {
                    let components = members
                        .iter()
                        .filter(|m| map.get(m[0].x, m[0].y) == label)
                        .count();
                    return Err(Error::DisconnectedLabel { label, components });
                }
                ConnectivityPolicy::SplitDisconnected => {
                    shape_labels.push(next_fresh);
                    next_fresh = next_fresh.saturating_add(1);
                }
            }
        }
    }

    let shapes = members
        .into_par_iter()
        .zip(shape_labels.into_par_iter())
        .map(|(pixels, label)| Shape::from_pixels(label, pixels))
        .collect::<Result<Vec<_>>>()?;

    Ok(Decomposition {
        source: map.clone(),
        shapes,
        shape_index: comp,
    })
}
