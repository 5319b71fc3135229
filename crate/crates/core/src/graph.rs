//! Barycenter adjacency graph of a decomposition.
//!
//! Nodes are superpixel barycenters; two superpixels are linked when some
//! pixel of one is 4-adjacent to some pixel of the other. This is the region
//! adjacency graph drawn over barycenters, not a Delaunay triangulation of
//! them.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Decomposition;
use crate::metrics::contour_mask;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub label: u32,
    pub barycenter: (f64, f64),
}

/// Undirected edge between two node indices, `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

impl Edge {
    /// Zero-length edge between coincident barycenters.
    pub fn is_degenerate(&self) -> bool {
        self.length == 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    pub nodes: Vec<Node>,
    /// Sorted by `(a, b)`.
    pub edges: Vec<Edge>,
}

impl AdjacencyGraph {
    /// Edges as label pairs `(min, max)`, sorted.
    pub fn label_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|e| {
                let (la, lb) = (self.nodes[e.a].label, self.nodes[e.b].label);
                (la.min(lb), la.max(lb))
            })
            .collect();
        pairs.sort_unstable();
        pairs
    }

    /// One `label_a label_b length` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{} {} {}",
                self.nodes[e.a].label, self.nodes[e.b].label, e.length
            );
        }
        out
    }
}

/// Node `i` corresponds to `decomp.shapes()[i]`.
pub fn adjacency_graph(decomp: &Decomposition) -> AdjacencyGraph {
    let (w, h) = (decomp.width() as usize, decomp.height() as usize);
    let idx = decomp.shape_index();
    let mut pairs = BTreeSet::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let s = idx[i];
            if x + 1 < w && idx[i + 1] != s {
                pairs.insert((s.min(idx[i + 1]), s.max(idx[i + 1])));
            }
            if y + 1 < h && idx[i + w] != s {
                pairs.insert((s.min(idx[i + w]), s.max(idx[i + w])));
            }
        }
    }
    let nodes: Vec<Node> = decomp
        .shapes()
        .iter()
        .map(|s| Node {
            label: s.label,
            barycenter: s.barycenter(),
        })
        .collect();
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (a as usize, b as usize);
            let (pa, pb) = (nodes[a].barycenter, nodes[b].barycenter);
            Edge {
                a,
                b,
                length: (pa.0 - pb.0).hypot(pa.1 - pb.1),
            }
        })
        .collect();
    AdjacencyGraph { nodes, edges }
}

/// Edge-length dispersion. `stddev` is the population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeStats {
    pub n_edges: usize,
    pub mean_length: f64,
    pub stddev_length: f64,
    pub coefficient_of_variation: f64,
    pub min: f64,
    pub max: f64,
}

pub fn edge_stats(graph: &AdjacencyGraph) -> Result<EdgeStats> {
    let lengths: Vec<f64> = graph.edges.iter().map(|e| e.length).collect();
    length_stats(&lengths)
}

pub fn length_stats(lengths: &[f64]) -> Result<EdgeStats> {
    if lengths.is_empty() {
        return Err(Error::NoEdges);
    }
    let n = lengths.len() as f64;
    let mean = lengths.iter().sum::<f64>() / n;
    let var = lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
    let stddev = var.sqrt();
    Ok(EdgeStats {
        n_edges: lengths.len(),
        mean_length: mean,
        stddev_length: stddev,
        coefficient_of_variation: if mean > 0.0 { stddev / mean } else { 0.0 },
        min: lengths.iter().copied().fold(f64::INFINITY, f64::min),
        max: lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// SVG of the decomposition contours with the graph drawn on top.
///
/// Contour pixels are drawn as horizontal runs; one user unit is one pixel.
pub fn graph_svg(decomp: &Decomposition, graph: &AdjacencyGraph) -> String {
    let (w, h) = (decomp.width(), decomp.height());
    let contour = contour_mask(decomp.shape_index(), w, h);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r##"<g fill="#9a9a9a">"##);
    for y in 0..h as usize {
        let row = &contour[y * w as usize..(y + 1) * w as usize];
        let mut x = 0;
        while x < row.len() {
            if row[x] {
                let start = x;
                while x < row.len() && row[x] {
                    x += 1;
                }
                let _ = writeln!(
                    svg,
                    r#"<rect x="{start}" y="{y}" width="{}" height="1"/>"#,
                    x - start
                );
            } else {
                x += 1;
            }
        }
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r##"<g stroke="#d62728" stroke-width="0.8">"##);
    for e in &graph.edges {
        let (a, b) = (graph.nodes[e.a].barycenter, graph.nodes[e.b].barycenter);
        // Barycenters are in pixel-index units; pixel centers sit at +0.5.
        let _ = writeln!(
            svg,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            a.0 + 0.5,
            a.1 + 0.5,
            b.0 + 0.5,
            b.1 + 0.5
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r##"<g fill="#1f77b4">"##);
    for n in &graph.nodes {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.3}" cy="{:.3}" r="1.5"/>"#,
            n.barycenter.0 + 0.5,
            n.barycenter.1 + 0.5
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
