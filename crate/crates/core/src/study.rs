//! Experiments over the synthetic shapes: per-shape tables across sizes and
//! noise levels, and noise sweeps averaged over seeds.
//!
//! Seeds run in parallel; results are collected in seed order before
//! averaging so the output does not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{format_number, Axes, Series, Tabular};
use crate::metrics::{circularity_raw, ShapeMetrics};
use crate::synth::{make_shape, perturb_boundary, NoiseSpec, ShapeKind};

/// Noise applied in a study: seeds `0..seeds` are averaged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSetting {
    pub amplitude: f64,
    pub rounds: u32,
    pub seeds: u32,
}

impl NoiseSetting {
    pub fn new(amplitude: f64, rounds: u32, seeds: u32) -> Result<Self> {
        NoiseSpec::new(amplitude, rounds, 0)?;
        if seeds == 0 {
            return Err(Error::InvalidArgument("at least one seed is required".into()));
        }
        Ok(NoiseSetting {
            amplitude,
            rounds,
            seeds,
        })
    }
}

/// Mean and population standard deviation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Summary::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Summary {
            mean,
            std: var.sqrt(),
        }
    }
}

/// Metrics of one shape, averaged over seeds when noisy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeRow {
    pub kind: ShapeKind,
    pub size: u32,
    pub noise_amplitude: f64,
    pub noise_rounds: u32,
    pub seeds: u32,
    pub circularity: f64,
    pub circularity_raw: f64,
    pub src: f64,
    pub src_std: f64,
    pub solidity: f64,
    pub vxy: f64,
    pub contour_smoothness: f64,
}

impl Tabular for ShapeRow {
    fn header() -> Vec<&'static str> {
        vec![
            "kind",
            "group",
            "size",
            "noise_amplitude",
            "noise_rounds",
            "seeds",
            "circularity",
            "circularity_raw",
            "src",
            "src_std",
            "solidity",
            "vxy",
            "contour_smoothness",
        ]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.kind.to_string(),
            self.kind.group().to_string(),
            self.size.to_string(),
            format_number(self.noise_amplitude),
            self.noise_rounds.to_string(),
            self.seeds.to_string(),
            format_number(self.circularity),
            format_number(self.circularity_raw),
            format_number(self.src),
            format_number(self.src_std),
            format_number(self.solidity),
            format_number(self.vxy),
            format_number(self.contour_smoothness),
        ]
    }
}

struct Sample {
    metrics: ShapeMetrics,
    c_raw: f64,
}

fn samples(kind: ShapeKind, size: u32, noise: Option<NoiseSetting>) -> Result<Vec<Sample>> {
    let shape = make_shape(kind, size)?;
    let eval = |s: &crate::label::Shape| Sample {
        metrics: ShapeMetrics::of(s),
        c_raw: circularity_raw(s),
    };
    match noise {
        None => Ok(vec![eval(&shape)]),
        Some(n) => (0..n.seeds as u64)
            .into_par_iter()
            .map(|seed| {
                let spec = NoiseSpec::new(n.amplitude, n.rounds, seed)?;
                Ok(eval(&perturb_boundary(&shape, &spec)?))
            })
            .collect(),
    }
}

/// Row for one kind at one size and noise setting.
pub fn shape_row(kind: ShapeKind, size: u32, noise: Option<NoiseSetting>) -> Result<ShapeRow> {
    let s = samples(kind, size, noise)?;
    let field = |f: fn(&Sample) -> f64| Summary::of(&s.iter().map(f).collect::<Vec<_>>());
    let src = field(|x| x.metrics.src_term);
    Ok(ShapeRow {
        kind,
        size,
        noise_amplitude: noise.map_or(0.0, |n| n.amplitude),
        noise_rounds: noise.map_or(0, |n| n.rounds),
        seeds: noise.map_or(0, |n| n.seeds),
        circularity: field(|x| x.metrics.circularity).mean,
        circularity_raw: field(|x| x.c_raw).mean,
        src: src.mean,
        src_std: src.std,
        solidity: field(|x| x.metrics.solidity).mean,
        vxy: field(|x| x.metrics.vxy).mean,
        contour_smoothness: field(|x| x.metrics.contour_smoothness).mean,
    })
}

/// The shape table for every size, smooth and (if given) noisy; rows are
/// ordered by noise setting, then size, then kind.
pub fn study_shapes(
    kinds: &[ShapeKind],
    sizes: &[u32],
    noise: &[NoiseSetting],
) -> Result<Vec<ShapeRow>> {
    if sizes.is_empty() || kinds.is_empty() {
        return Err(Error::InvalidArgument("no shapes or sizes to study".into()));
    }
    let settings: Vec<Option<NoiseSetting>> =
        std::iter::once(None).chain(noise.iter().copied().map(Some)).collect();
    let mut rows = Vec::new();
    for setting in settings {
        for &size in sizes {
            for &kind in kinds {
                rows.push(shape_row(kind, size, setting)?);
            }
        }
    }
    Ok(rows)
}

/// C and SRC against size, two curves per kind, for smooth rows.
pub fn size_sweep_series(rows: &[ShapeRow]) -> Vec<Series> {
    let mut kinds: Vec<ShapeKind> = Vec::new();
    for r in rows {
        if !kinds.contains(&r.kind) {
            kinds.push(r.kind);
        }
    }
    let mut out = Vec::new();
    for kind in kinds {
        let smooth: Vec<&ShapeRow> = rows
            .iter()
            .filter(|r| r.kind == kind && r.seeds == 0)
            .collect();
        out.push(Series::new(
            format!("{kind} C"),
            smooth.iter().map(|r| (r.size as f64, r.circularity)).collect(),
        ));
        out.push(Series::new(
            format!("{kind} SRC"),
            smooth.iter().map(|r| (r.size as f64, r.src)).collect(),
        ));
    }
    out
}

pub fn size_sweep_axes() -> Axes {
    Axes {
        title: "Regularity against shape size".into(),
        x_label: "size p (pixels)".into(),
        y_label: "value".into(),
    }
}

/// Seed-averaged metrics of one shape at one amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub kind: ShapeKind,
    pub size: u32,
    pub amplitude: f64,
    pub rounds: u32,
    pub seeds: u32,
    pub src_mean: f64,
    pub src_std: f64,
    pub circularity_mean: f64,
    pub circularity_std: f64,
    pub solidity_mean: f64,
    pub vxy_mean: f64,
    pub contour_smoothness_mean: f64,
}

impl Tabular for NoiseRow {
    fn header() -> Vec<&'static str> {
        vec![
            "kind",
            "size",
            "amplitude",
            "rounds",
            "seeds",
            "src_mean",
            "src_std",
            "circularity_mean",
            "circularity_std",
            "solidity_mean",
            "vxy_mean",
            "contour_smoothness_mean",
        ]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.kind.to_string(),
            self.size.to_string(),
            format_number(self.amplitude),
            self.rounds.to_string(),
            self.seeds.to_string(),
            format_number(self.src_mean),
            format_number(self.src_std),
            format_number(self.circularity_mean),
            format_number(self.circularity_std),
            format_number(self.solidity_mean),
            format_number(self.vxy_mean),
            format_number(self.contour_smoothness_mean),
        ]
    }
}

/// One row per amplitude, in the given order.
pub fn study_noise(
    kind: ShapeKind,
    size: u32,
    amplitudes: &[f64],
    seeds: u32,
    rounds: u32,
) -> Result<Vec<NoiseRow>> {
    if amplitudes.is_empty() {
        return Err(Error::InvalidArgument("no amplitudes given".into()));
    }
    amplitudes
        .iter()
        .map(|&amplitude| {
            let setting = NoiseSetting::new(amplitude, rounds, seeds)?;
            let s = samples(kind, size, Some(setting))?;
            let field = |f: fn(&Sample) -> f64| Summary::of(&s.iter().map(f).collect::<Vec<_>>());
            let src = field(|x| x.metrics.src_term);
            let c = field(|x| x.metrics.circularity);
            Ok(NoiseRow {
                kind,
                size,
                amplitude,
                rounds,
                seeds,
                src_mean: src.mean,
                src_std: src.std,
                circularity_mean: c.mean,
                circularity_std: c.std,
                solidity_mean: field(|x| x.metrics.solidity).mean,
                vxy_mean: field(|x| x.metrics.vxy).mean,
                contour_smoothness_mean: field(|x| x.metrics.contour_smoothness).mean,
            })
        })
        .collect()
}

pub fn noise_series(rows: &[NoiseRow]) -> Vec<Series> {
    vec![
        Series::new("C", rows.iter().map(|r| (r.amplitude, r.circularity_mean)).collect()),
        Series::new("SRC", rows.iter().map(|r| (r.amplitude, r.src_mean)).collect()),
    ]
}

pub fn noise_axes(kind: ShapeKind) -> Axes {
    Axes {
        title: format!("{kind} under boundary noise"),
        x_label: "noise amplitude".into(),
        y_label: "value".into(),
    }
}

/// Default setting for noisy studies: three rounds over twenty seeds.
pub fn default_noise(amplitude: f64) -> Result<NoiseSetting> {
    NoiseSetting::new(amplitude, NoiseSpec::DEFAULT_ROUNDS, 20)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_row_is_perfect() {
        let r = shape_row(ShapeKind::Square, 36, None).unwrap();
        assert_eq!((r.src, r.solidity, r.vxy, r.contour_smoothness), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(r.seeds, 0);
    }

    #[test]
    fn table_layout() {
        let noise = NoiseSetting::new(0.2, 1, 2).unwrap();
        let rows = study_shapes(&[ShapeKind::Square, ShapeKind::Circle], &[16, 32], &[noise]).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[4].seeds, 2);
        assert_eq!(size_sweep_series(&rows).len(), 4);
        assert!(size_sweep_series(&rows).iter().all(|s| s.points.len() == 2));
    }

    #[test]
    fn noise_rows_start_clean() {
        let rows = study_noise(ShapeKind::Square, 20, &[0.0, 0.3], 3, 2).unwrap();
        assert_eq!(rows[0].src_mean, 1.0);
        assert_eq!(rows[0].src_std, 0.0);
        assert!(rows[1].src_mean < 1.0);
        assert!(study_noise(ShapeKind::Square, 20, &[], 3, 2).is_err());
        assert!(NoiseSetting::new(0.1, 1, 0).is_err());
    }

    #[test]
    fn summary_is_population() {
        let s = Summary::of(&[1.0, 3.0]);
        assert_eq!((s.mean, s.std), (2.0, 1.0));
    }
}
