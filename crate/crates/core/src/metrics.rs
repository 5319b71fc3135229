//! Regularity and segmentation-quality measures.
//!
//! Per shape `S` with `|S|` pixels, `|P(S)|` boundary pixels and a
//! rasterized convex hull `CH`:
//!
//! | measure | definition |
//! |---|---|
//! | circularity `C` | `min(1, 4π·|S| / |P(S)|²)` |
//! | solidity `SO` | `|S| / |CH|` |
//! | balanced repartition `V_xy` | `sqrt(min(σx, σy) / max(σx, σy))` |
//! | contour smoothness `CO` | `min(1, |P(CH)| / |P(S)|)` |
//!
//! The decomposition score is `SRC = Σ_k (|S_k| / |I|) · SO·V_xy·CO(S_k)`.
//!
//! Undersegmentation error uses the min(in, out) formulation
//!
//! ```text
//! UE = (1/|I|) · Σ_{G} Σ_{S : S∩G ≠ ∅} min(|S ∩ G|, |S \ G|)
//! ```
//!
//! which differs from the "leakage" form `(1/|I|) Σ_S (|S| - max_G |S ∩ G|)`
//! found elsewhere in the literature; both are available through
//! [`UeFormula`].

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hull_stats, HullStats};
use crate::label::{Decomposition, LabelMap, Shape};

/// Default boundary-recall tolerance, in pixels (Chebyshev distance).
pub const DEFAULT_BR_EPS: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeMetrics {
    pub circularity: f64,
    pub solidity: f64,
    pub vxy: f64,
    pub contour_smoothness: f64,
    /// `SO · V_xy · CO`.
    pub src_term: f64,
}

impl ShapeMetrics {
    pub fn of(shape: &Shape) -> Self {
        let hull = hull_stats(shape);
        Self::with_hull(shape, &hull)
    }

    pub fn with_hull(shape: &Shape, hull: &HullStats) -> Self {
        let solidity = solidity(shape, hull);
        let vxy = vxy(shape);
        let contour_smoothness = contour_smoothness(shape, hull);
        ShapeMetrics {
            circularity: circularity(shape),
            solidity,
            vxy,
            contour_smoothness,
            src_term: solidity * vxy * contour_smoothness,
        }
    }
}

/// `4π|S| / |P(S)|²`, thresholded at 1. Digital perimeters make the raw
/// ratio exceed 1 for small or round shapes.
pub fn circularity(shape: &Shape) -> f64 {
    circularity_raw(shape).min(1.0)
}

/// Circularity before thresholding.
pub fn circularity_raw(shape: &Shape) -> f64 {
    let p = shape.perimeter() as f64;
    4.0 * PI * shape.area() as f64 / (p * p)
}

pub fn solidity(shape: &Shape, hull: &HullStats) -> f64 {
    shape.area() as f64 / hull.hull_area_px as f64
}

/// `sqrt(min(σx, σy) / max(σx, σy))`; 1 when both deviations vanish, 0 when
/// exactly one does.
pub fn vxy(shape: &Shape) -> f64 {
    let (sx, sy) = (shape.sigma_x(), shape.sigma_y());
    let (lo, hi) = if sx <= sy { (sx, sy) } else { (sy, sx) };
    if hi == 0.0 {
        1.0
    } else {
        (lo / hi).sqrt()
    }
}

pub fn contour_smoothness(shape: &Shape, hull: &HullStats) -> f64 {
    (hull.hull_perimeter_px as f64 / shape.perimeter() as f64).min(1.0)
}

/// Decomposition-level scores. Means are area-weighted like SRC itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionMetrics {
    pub src: f64,
    pub circularity_mean: f64,
    pub solidity_mean: f64,
    pub vxy_mean: f64,
    pub contour_smoothness_mean: f64,
    pub n_superpixels: usize,
}

/// Per-shape metrics, in the decomposition's shape order.
pub fn shape_metrics(decomp: &Decomposition) -> Vec<ShapeMetrics> {
    decomp.shapes().par_iter().map(ShapeMetrics::of).collect()
}

/// Area-weighted aggregation. Sums of `|S_k| · term` are accumulated in
/// shape order and divided by `|I|` once, so all-ones terms give exactly 1.
pub fn aggregate(decomp: &Decomposition, per_shape: &[ShapeMetrics]) -> DecompositionMetrics {
    let total = decomp.image_area() as f64;
    let mut acc = [0.0f64; 5];
    for (shape, m) in decomp.shapes().iter().zip(per_shape) {
        let a = shape.area() as f64;
        acc[0] += a * m.src_term;
        acc[1] += a * m.circularity;
        acc[2] += a * m.solidity;
        acc[3] += a * m.vxy;
        acc[4] += a * m.contour_smoothness;
    }
    DecompositionMetrics {
        src: acc[0] / total,
        circularity_mean: acc[1] / total,
        solidity_mean: acc[2] / total,
        vxy_mean: acc[3] / total,
        contour_smoothness_mean: acc[4] / total,
        n_superpixels: decomp.shapes().len(),
    }
}

pub fn decomposition_metrics(decomp: &Decomposition) -> DecompositionMetrics {
    aggregate(decomp, &shape_metrics(decomp))
}

/// Shape regularity criteria of a whole decomposition.
pub fn src(decomp: &Decomposition) -> f64 {
    decomposition_metrics(decomp).src
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum UeFormula {
    /// `Σ_G Σ_S min(|S∩G|, |S\G|) / |I|`.
    #[default]
    MinInOut,
    /// `Σ_S (|S| - max_G |S∩G|) / |I|`, i.e. one minus achievable
    /// segmentation accuracy.
    Leakage,
}

fn check_dims(decomp: &Decomposition, gt: &LabelMap) -> Result<()> {
    let d = (decomp.width(), decomp.height());
    if d != gt.dims() {
        return Err(Error::DimensionMismatch {
            left: d,
            right: gt.dims(),
        });
    }
    Ok(())
}

/// Undersegmentation error with the [`UeFormula::MinInOut`] formulation.
pub fn undersegmentation_error(decomp: &Decomposition, gt: &LabelMap) -> Result<f64> {
    undersegmentation_error_with(decomp, gt, UeFormula::MinInOut)
}

pub fn undersegmentation_error_with(
    decomp: &Decomposition,
    gt: &LabelMap,
    formula: UeFormula,
) -> Result<f64> {
    check_dims(decomp, gt)?;
    // Overlap counts keyed by (shape index, GT label).
    let mut overlap: HashMap<(u32, u32), usize> = HashMap::new();
    for (&s, &g) in decomp.shape_index().iter().zip(gt.labels()) {
        *overlap.entry((s, g)).or_insert(0) += 1;
    }
    let mut entries: Vec<((u32, u32), usize)> = overlap.into_iter().collect();
    entries.sort_unstable();
    let shapes = decomp.shapes();
    let penalty: usize = match formula {
        UeFormula::MinInOut => entries
            .iter()
            .map(|&((s, _), inside)| {
                let outside = shapes[s as usize].area() - inside;
                inside.min(outside)
            })
            .sum(),
        UeFormula::Leakage => {
            let mut best = vec![0usize; shapes.len()];
            for &((s, _), n) in &entries {
                best[s as usize] = best[s as usize].max(n);
            }
            shapes
                .iter()
                .zip(best)
                .map(|(shape, b)| shape.area() - b)
                .sum()
        }
    };
    Ok(penalty as f64 / decomp.image_area() as f64)
}

/// Pixels whose left or upper neighbour carries a different label.
///
/// One-sided so that a label change between columns `x - 1` and `x` marks
/// only column `x`, giving one-pixel-thin contours.
pub fn contour_mask(labels: &[u32], width: u32, height: u32) -> Vec<bool> {
    let (w, h) = (width as usize, height as usize);
    let mut out = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            out[i] = (x > 0 && labels[i - 1] != labels[i]) || (y > 0 && labels[i - w] != labels[i]);
        }
    }
    out
}

/// Fraction of ground-truth contour pixels with a decomposition contour pixel
/// within Chebyshev distance `eps`. A ground truth without internal contours
/// scores 1.
pub fn boundary_recall(decomp: &Decomposition, gt: &LabelMap, eps: u32) -> Result<f64> {
    check_dims(decomp, gt)?;
    let (w, h) = gt.dims();
    let gt_contour = contour_mask(gt.labels(), w, h);
    let sp_contour = contour_mask(decomp.shape_index(), w, h);
    let near = dilate_chebyshev(&sp_contour, w as usize, h as usize, eps as usize);
    let total = gt_contour.iter().filter(|&&b| b).count();
    if total == 0 {
        return Ok(1.0);
    }
    let hit = gt_contour
        .iter()
        .zip(&near)
        .filter(|(&g, &n)| g && n)
        .count();
    Ok(hit as f64 / total as f64)
}

/// Separable square dilation with radius `r`.
fn dilate_chebyshev(mask: &[bool], w: usize, h: usize, r: usize) -> Vec<bool> {
    if r == 0 {
        return mask.to_vec();
    }
    let mut rows = vec![false; w * h];
    for y in 0..h {
        let row = &mask[y * w..(y + 1) * w];
        // Distance to the nearest set pixel, scanning both directions.
        let mut last: Option<usize> = None;
        for x in 0..w {
            if row[x] {
                last = Some(x);
            }
            if last.is_some_and(|l| x - l <= r) {
                rows[y * w + x] = true;
            }
        }
        last = None;
        for x in (0..w).rev() {
            if row[x] {
                last = Some(x);
            }
            if last.is_some_and(|l| l - x <= r) {
                rows[y * w + x] = true;
            }
        }
    }
    let mut out = vec![false; w * h];
    for x in 0..w {
        let mut last: Option<usize> = None;
        for y in 0..h {
            if rows[y * w + x] {
                last = Some(y);
            }
            if last.is_some_and(|l| y - l <= r) {
                out[y * w + x] = true;
            }
        }
        last = None;
        for y in (0..h).rev() {
            if rows[y * w + x] {
                last = Some(y);
            }
            if last.is_some_and(|l| l - y <= r) {
                out[y * w + x] = true;
            }
        }
    }
    out
}

/// UE and BR averaged over several ground-truth annotations.
pub fn averaged_against(
    decomp: &Decomposition,
    gts: &[LabelMap],
    eps: u32,
) -> Result<Option<(f64, f64)>> {
    if gts.is_empty() {
        return Ok(None);
    }
    let mut ue = 0.0;
    let mut br = 0.0;
    for gt in gts {
        ue += undersegmentation_error(decomp, gt)?;
        br += boundary_recall(decomp, gt, eps)?;
    }
    let n = gts.len() as f64;
    Ok(Some((ue / n, br / n)))
}
