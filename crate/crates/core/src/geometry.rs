//! Convex hulls of pixel shapes and their discrete area and perimeter.
//!
//! A shape's hull is taken over the four corners of every pixel (pixel
//! `(x, y)` is the unit square `[x, x+1] x [y, y+1]`), then rasterized back
//! onto the grid: a pixel belongs to the hull iff its center
//! `(x + 0.5, y + 0.5)` is inside or on the hull polygon.
//!
//! Corner coordinates are integers and centers half-integers, so after
//! doubling every coordinate all hull predicates are integer cross products.
//! Rasterization runs entirely in `i64`; no tolerance is involved. Hull
//! construction uses `f64`, which represents these integers and their cross
//! products exactly for any image below 2^25 pixels on a side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{boundary_pixels, PixelCoord, Shape};

/// Tolerance, in cross-product units, under which a point counts as lying on
/// a polygon edge.
pub const ON_EDGE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// Cross product of `(b - a) x (c - a)`; positive when `c` is left of `a -> b`.
fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Convex polygon with vertices ordered so the shoelace area is positive
/// (counter-clockwise in a y-up frame). No three retained vertices are
/// collinear. Fewer than three vertices means a degenerate hull: a point or
/// a segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let twice: f64 = (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.x * b.y - b.x * a.y
            })
            .sum();
        twice / 2.0
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Andrew's monotone chain. Collinear points on hull edges are dropped.
pub fn convex_hull(points: &[Point]) -> Result<Polygon> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(Polygon { vertices: pts });
    }

    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    if hull.len() < 3 {
        // All input points are collinear: keep the two extremes.
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        return Ok(Polygon {
            vertices: vec![first, last],
        });
    }
    Ok(Polygon { vertices: hull })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointLocation {
    Inside,
    OnBoundary,
    Outside,
}

/// Classifies `p` against a convex polygon.
///
/// A point within [`ON_EDGE_EPS`] of an edge line (in cross-product units)
/// and inside all other half-planes is [`PointLocation::OnBoundary`].
pub fn point_in_polygon(p: Point, poly: &Polygon) -> Result<PointLocation> {
    if poly.is_degenerate() {
        return Err(Error::DegeneratePolygon);
    }
    let mut on_edge = false;
    for (a, b) in poly.edges() {
        let c = cross(a, b, p);
        if c < -ON_EDGE_EPS {
            return Ok(PointLocation::Outside);
        }
        if c <= ON_EDGE_EPS {
            on_edge = true;
        }
    }
    Ok(if on_edge {
        PointLocation::OnBoundary
    } else {
        PointLocation::Inside
    })
}

/// `|CH|` and `|P(CH)|` for one shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullStats {
    /// Pixels whose centers lie inside or on the hull.
    pub hull_area_px: usize,
    /// Boundary pixels of the rasterized hull.
    pub hull_perimeter_px: usize,
}

/// Convex hull of the corner points of a shape's pixels.
///
/// Only the leftmost and rightmost pixel of each row can contribute hull
/// vertices, so only their corners are passed to the hull routine.
pub fn shape_hull(shape: &Shape) -> Polygon {
    let mut corners = Vec::new();
    let pixels = shape.pixels();
    let mut i = 0;
    while i < pixels.len() {
        let y = pixels[i].y;
        let mut j = i;
        while j + 1 < pixels.len() && pixels[j + 1].y == y {
            j += 1;
        }
        let (xl, xr) = (pixels[i].x as f64, pixels[j].x as f64 + 1.0);
        let (y0, y1) = (y as f64, y as f64 + 1.0);
        corners.extend([
            Point::new(xl, y0),
            Point::new(xl, y1),
            Point::new(xr, y0),
            Point::new(xr, y1),
        ]);
        i = j + 1;
    }
    convex_hull(&corners).expect("a shape has at least one pixel")
}

/// Pixels whose centers are inside or on `poly`, row-major.
///
/// `poly` must have integer vertex coordinates (as produced by
/// [`shape_hull`]); each row is solved exactly on doubled coordinates.
pub fn rasterize_hull(poly: &Polygon) -> Vec<PixelCoord> {
    debug_assert!(!poly.is_degenerate());
    let verts: Vec<(i64, i64)> = poly
        .vertices()
        .iter()
        .map(|v| (2 * v.x as i64, 2 * v.y as i64))
        .collect();
    let ymin = verts.iter().map(|v| v.1).min().unwrap_or(0);
    let ymax = verts.iter().map(|v| v.1).max().unwrap_or(0);
    let xmin = verts.iter().map(|v| v.0).min().unwrap_or(0);
    let xmax = verts.iter().map(|v| v.0).max().unwrap_or(0);
    let n = verts.len();
    let mut out = Vec::new();

    // Pixel row y has doubled center ordinate 2y + 1.
    let first_row = ceil_div(ymin - 1, 2).max(0);
    for row in first_row.. {
        let cy = 2 * row + 1;
        if cy > ymax {
            break;
        }
        let (mut lo, mut hi) = (xmin, xmax);
        let mut empty = false;
        for i in 0..n {
            let (x1, y1) = verts[i];
            let (x2, y2) = verts[(i + 1) % n];
            let (dx, dy) = (x2 - x1, y2 - y1);
            // Inside-or-on: dx * (cy - y1) - dy * (cx - x1) >= 0,
            // i.e. dy * cx <= dx * (cy - y1) + dy * x1.
            let r = dx * (cy - y1) + dy * x1;
            match dy.signum() {
                1 => hi = hi.min(floor_div(r, dy)),
                -1 => lo = lo.max(ceil_div(r, dy)),
                _ => {
                    if dx * (cy - y1) < 0 {
                        empty = true;
                    }
                }
            }
        }
        if empty || lo > hi {
            continue;
        }
        // Doubled center abscissa 2x + 1 must lie in [lo, hi].
        let x_first = ceil_div(lo - 1, 2);
        let x_last = floor_div(hi - 1, 2);
        for x in x_first.max(0)..=x_last {
            out.push(PixelCoord::new(x as u32, row as u32));
        }
    }
    out
}

fn floor_div(a: i64, b: i64) -> i64 {
    if b > 0 {
        a.div_euclid(b)
    } else {
        (-a).div_euclid(-b)
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}

/// Rasterized hull of a shape, row-major.
///
/// A degenerate hull (not reachable from pixel corners, which always span a
/// unit square) falls back to the shape's own pixels.
pub fn hull_pixels(shape: &Shape) -> Vec<PixelCoord> {
    let hull = shape_hull(shape);
    if hull.is_degenerate() {
        return shape.pixels().to_vec();
    }
    rasterize_hull(&hull)
}

pub fn hull_stats(shape: &Shape) -> HullStats {
    let pixels = hull_pixels(shape);
    HullStats {
        hull_area_px: pixels.len(),
        hull_perimeter_px: boundary_pixels(&pixels).len(),
    }
}
