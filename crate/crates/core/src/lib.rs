//! Shape regularity of superpixel decompositions.
//!
//! The crate scores how regular the superpixels of a label map are. The main
//! score is SRC, which combines solidity, balanced pixel repartition and
//! contour smoothness. It also reports the classic circularity and the
//! segmentation-quality measures UE (undersegmentation error) and BR
//! (boundary recall). It ships generators for the synthetic shapes, grids
//! and quadtrees used to study these measures.
//!
//! ```
//! use shapereg::{extract_superpixels, metrics, synth, ConnectivityPolicy};
//!
//! let map = synth::square_grid(320, 320, 400).unwrap();
//! let decomp = extract_superpixels(&map, ConnectivityPolicy::Strict).unwrap();
//! assert_eq!(metrics::src(&decomp), 1.0);
//! ```

pub mod error;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod label;
pub mod mask;
pub mod metrics;
pub mod study;
pub mod synth;

pub use error::{Error, Result};
pub use label::{
    boundary_pixels, extract_superpixels, moments, ConnectivityPolicy, Decomposition, LabelMap,
    Moments, PixelCoord, Shape,
};
pub use metrics::{DecompositionMetrics, ShapeMetrics};
