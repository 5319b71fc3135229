//! Dense binary masks over a padded bounding box.
//!
//! Shapes are stored as sorted pixel lists; most neighbourhood operations
//! (boundary extraction, hole filling, connected components, noise) are
//! simpler on a dense grid, so they go through [`Mask`].

use std::collections::VecDeque;

use crate::label::PixelCoord;

/// Binary mask covering `[x0, x0 + width) x [y0, y0 + height)`.
///
/// Coordinates are signed so the frame can extend past the image origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

const NEIGHBORS4: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

impl Mask {
    pub fn new(x0: i64, y0: i64, width: usize, height: usize) -> Self {
        Mask {
            x0,
            y0,
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    /// Mask of `pixels` framed by their bounding box grown by `pad` on every side.
    pub fn from_pixels(pixels: &[PixelCoord], pad: usize) -> Self {
        if pixels.is_empty() {
            return Mask::new(0, 0, 0, 0);
        }
        let (mut xmin, mut ymin, mut xmax, mut ymax) = (u32::MAX, u32::MAX, 0u32, 0u32);
        for p in pixels {
            xmin = xmin.min(p.x);
            ymin = ymin.min(p.y);
            xmax = xmax.max(p.x);
            ymax = ymax.max(p.y);
        }
        let pad_i = pad as i64;
        let mut mask = Mask::new(
            xmin as i64 - pad_i,
            ymin as i64 - pad_i,
            (xmax - xmin) as usize + 1 + 2 * pad,
            (ymax - ymin) as usize + 1 + 2 * pad,
        );
        for p in pixels {
            mask.set(p.x as i64, p.y as i64, true);
        }
        mask
    }

    pub fn origin(&self) -> (i64, i64) {
        (self.x0, self.y0)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn index(&self, x: i64, y: i64) -> Option<usize> {
        let lx = x - self.x0;
        let ly = y - self.y0;
        if lx < 0 || ly < 0 || lx >= self.width as i64 || ly >= self.height as i64 {
            None
        } else {
            Some(ly as usize * self.width + lx as usize)
        }
    }

    /// Membership test; anything outside the frame is unset.
    pub fn get(&self, x: i64, y: i64) -> bool {
        self.index(x, y).is_some_and(|i| self.bits[i])
    }

    /// Sets a bit. Writes outside the frame are ignored.
    pub fn set(&mut self, x: i64, y: i64, value: bool) {
        if let Some(i) = self.index(x, y) {
            self.bits[i] = value;
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True if the pixel is set and has at least one unset 4-neighbour.
    pub fn is_boundary(&self, x: i64, y: i64) -> bool {
        self.get(x, y) && NEIGHBORS4.iter().any(|&(dx, dy)| !self.get(x + dx, y + dy))
    }

    /// Row-major iterator over set pixels in absolute coordinates.
    pub fn iter_set(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| {
            (
                self.x0 + (i % self.width) as i64,
                self.y0 + (i / self.width) as i64,
            )
        })
    }

    /// Set pixels with non-negative coordinates, row-major.
    pub fn to_pixels(&self) -> Vec<PixelCoord> {
        self.iter_set()
            .filter(|&(x, y)| x >= 0 && y >= 0 && x <= u32::MAX as i64 && y <= u32::MAX as i64)
            .map(|(x, y)| PixelCoord::new(x as u32, y as u32))
            .collect()
    }

    /// 4-connected components of the set pixels, each as a row-major list of
    /// absolute coordinates. Components are ordered by their first pixel in
    /// row-major order.
    pub fn components(&self) -> Vec<Vec<(i64, i64)>> {
        let mut seen = vec![false; self.bits.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(i) = queue.pop_front() {
                let x = (i % self.width) as i64;
                let y = (i / self.width) as i64;
                comp.push(i);
                for (dx, dy) in NEIGHBORS4 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
                        continue;
                    }
                    let j = ny as usize * self.width + nx as usize;
                    if self.bits[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(
                comp.into_iter()
                    .map(|i| {
                        (
                            self.x0 + (i % self.width) as i64,
                            self.y0 + (i / self.width) as i64,
                        )
                    })
                    .collect(),
            );
        }
        out
    }

    /// Keeps only the largest 4-connected component (ties go to the first in
    /// row-major order).
    pub fn keep_largest_component(&mut self) {
        let comps = self.components();
        let Some(best) = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(i, _)| i)
        else {
            return;
        };
        self.bits.iter_mut().for_each(|b| *b = false);
        for &(x, y) in &comps[best] {
            self.set(x, y, true);
        }
    }

    /// Fills every unset region that is not 4-connected to the frame border.
    pub fn fill_holes(&mut self) {
        let (w, h) = (self.width, self.height);
        let mut outside = vec![false; self.bits.len()];
        let mut queue = VecDeque::new();
        for y in 0..h {
            for x in 0..w {
                if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                    let i = y * w + x;
                    if !self.bits[i] && !outside[i] {
                        outside[i] = true;
                        queue.push_back(i);
                    }
                }
            }
        }
        while let Some(i) = queue.pop_front() {
            let x = (i % w) as i64;
            let y = (i / w) as i64;
            for (dx, dy) in NEIGHBORS4 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !self.bits[j] && !outside[j] {
                    outside[j] = true;
                    queue.push_back(j);
                }
            }
        }
        for (bit, out) in self.bits.iter_mut().zip(outside) {
            if !out {
                *bit = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_holes_closes_ring() {
        let mut m = Mask::new(0, 0, 5, 5);
        for y in 1..4 {
            for x in 1..4 {
                m.set(x, y, true);
            }
        }
        m.set(2, 2, false);
        m.fill_holes();
        assert!(m.get(2, 2));
        assert_eq!(m.count(), 9);
    }

    #[test]
    fn components_split_diagonal_touch() {
        let mut m = Mask::new(0, 0, 2, 2);
        m.set(0, 0, true);
        m.set(1, 1, true);
        assert_eq!(m.components().len(), 2);
        m.keep_largest_component();
        assert_eq!(m.count(), 1);
        assert!(m.get(0, 0));
    }

    #[test]
    fn out_of_frame_is_unset() {
        let m = Mask::from_pixels(&[PixelCoord::new(3, 3)], 1);
        assert!(m.get(3, 3));
        assert!(!m.get(-10, 3));
        assert!(m.is_boundary(3, 3));
    }
}
