//! Label-map files, intensity images, reports and SVG plots.
//!
//! Label maps are stored verbatim (no rescaling) as 16-bit binary PGM
//! (`P5`, maxval 65535, big-endian), 16-bit grayscale PNG, or CSV with one
//! image row per line and no header. PGM input also accepts 8-bit and ASCII
//! (`P2`) files.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EdgeStats;
use crate::label::LabelMap;
use crate::synth::GrayImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelFormat {
    Pgm16,
    PngGray16,
    Csv,
}

impl LabelFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "pgm" => Ok(LabelFormat::Pgm16),
            "png" => Ok(LabelFormat::PngGray16),
            "csv" | "txt" => Ok(LabelFormat::Csv),
            _ => Err(Error::UnsupportedFormat(path.display().to_string())),
        }
    }
}

pub fn load_label_map(path: impl AsRef<Path>) -> Result<LabelMap> {
    let path = path.as_ref();
    load_label_map_as(path, LabelFormat::from_path(path)?)
}

pub fn load_label_map_as(path: impl AsRef<Path>, format: LabelFormat) -> Result<LabelMap> {
    let path = path.as_ref();
    let corrupt = |reason: String| Error::corrupt(path, reason);
    match format {
        LabelFormat::Pgm16 => {
            let (w, h, values) = decode_pgm(&fs::read(path)?).map_err(corrupt)?;
            LabelMap::new(w, h, values)
        }
        LabelFormat::PngGray16 => {
            let img = image::open(path).map_err(|e| corrupt(e.to_string()))?;
            match img {
                image::DynamicImage::ImageLuma16(buf) => {
                    let (w, h) = buf.dimensions();
                    LabelMap::new(w, h, buf.into_raw().into_iter().map(u32::from).collect())
                }
                image::DynamicImage::ImageLuma8(buf) => {
                    let (w, h) = buf.dimensions();
                    LabelMap::new(w, h, buf.into_raw().into_iter().map(u32::from).collect())
                }
                other => Err(corrupt(format!("expected a grayscale PNG, got {:?}", other.color()))),
            }
        }
        LabelFormat::Csv => read_label_csv(path),
    }
}

pub fn save_label_map(map: &LabelMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    save_label_map_as(map, path, LabelFormat::from_path(path)?)
}

pub fn save_label_map_as(map: &LabelMap, path: impl AsRef<Path>, format: LabelFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        LabelFormat::Pgm16 => {
            let values = to_u16(map)?;
            fs::write(path, encode_pgm16(map.width(), map.height(), &values))?;
        }
        LabelFormat::PngGray16 => {
            let values = to_u16(map)?;
            let buf = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(
                map.width(),
                map.height(),
                values,
            )
            .ok_or_else(|| Error::InvalidArgument("label buffer size".into()))?;
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        LabelFormat::Csv => {
            let mut out = BufWriter::new(fs::File::create(path)?);
            for row in map.labels().chunks(map.width().max(1) as usize) {
                let line: Vec<String> = row.iter().map(u32::to_string).collect();
                writeln!(out, "{}", line.join(","))?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn to_u16(map: &LabelMap) -> Result<Vec<u16>> {
    map.labels()
        .iter()
        .map(|&l| {
            u16::try_from(l).map_err(|_| Error::Overflow {
                label: l,
                max: u16::MAX as u32,
            })
        })
        .collect()
}

fn read_label_csv(path: &Path) -> Result<LabelMap> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::corrupt(path, e))?;
    let mut width = None;
    let mut height = 0u32;
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::corrupt(path, e))?;
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::corrupt(
                    path,
                    format!("row {} has {} values, expected {w}", row + 1, record.len()),
                ))
            }
            _ => {}
        }
        for field in record.iter() {
            labels.push(field.parse::<u32>().map_err(|e| {
                Error::corrupt(path, format!("row {}: {field:?}: {e}", row + 1))
            })?);
        }
        height += 1;
    }
    LabelMap::new(width.unwrap_or(0) as u32, height, labels)
}

pub fn encode_pgm16(width: u32, height: u32, values: &[u16]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    out.reserve(values.len() * 2);
    for v in values {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

/// Parses `P2` or `P5` data, returning raw sample values.
pub fn decode_pgm(data: &[u8]) -> std::result::Result<(u32, u32, Vec<u32>), String> {
    let mut pos = 0;
    let mut token = || -> std::result::Result<String, String> {
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };
    let magic = token()?;
    let num = |s: String| s.parse::<u32>().map_err(|e| format!("{s:?}: {e}"));
    let width = num(token()?)?;
    let height = num(token()?)?;
    let maxval = num(token()?)?;
    if maxval == 0 || maxval > 65535 {
        return Err(format!("maxval {maxval} out of range"));
    }
    let n = width as usize * height as usize;
    let values = match magic.as_str() {
        "P5" => {
            // Exactly one whitespace byte separates the header from the raster.
            let body = data.get(pos + 1..).unwrap_or(&[]);
            let bytes = if maxval > 255 { 2 } else { 1 };
            if body.len() < n * bytes {
                return Err(format!("expected {} raster bytes, found {}", n * bytes, body.len()));
            }
            if bytes == 2 {
                body[..2 * n]
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]) as u32)
                    .collect()
            } else {
                body[..n].iter().map(|&b| b as u32).collect()
            }
        }
        "P2" => {
            let text = std::str::from_utf8(&data[pos..]).map_err(|e| e.to_string())?;
            let values: Vec<u32> = text
                .split_ascii_whitespace()
                .map(|t| t.parse::<u32>().map_err(|e| format!("{t:?}: {e}")))
                .collect::<std::result::Result<_, _>>()?;
            if values.len() != n {
                return Err(format!("expected {n} samples, found {}", values.len()));
            }
            values
        }
        other => return Err(format!("unsupported PGM magic {other:?}")),
    };
    if let Some(&v) = values.iter().find(|&&v| v > maxval) {
        return Err(format!("sample {v} exceeds maxval {maxval}"));
    }
    Ok((width, height, values))
}

/// Loads an intensity image from PGM or PNG; values are raw samples (PNG
/// colour images are converted to 16-bit luma).
pub fn load_gray_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    match LabelFormat::from_path(path)? {
        LabelFormat::Pgm16 => {
            let (w, h, v) = decode_pgm(&fs::read(path)?).map_err(|e| Error::corrupt(path, e))?;
            GrayImage::new(w, h, v.into_iter().map(f64::from).collect())
        }
        LabelFormat::PngGray16 => {
            let img = image::open(path).map_err(|e| Error::corrupt(path, e))?;
            let (w, h) = (img.width(), img.height());
            let values = match img {
                image::DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(f64::from).collect(),
                other => other.to_luma16().into_raw().into_iter().map(f64::from).collect(),
            };
            GrayImage::new(w, h, values)
        }
        LabelFormat::Csv => Err(Error::UnsupportedFormat(path.display().to_string())),
    }
}

/// Formats a float with six decimals when that is lossless, otherwise with
/// the shortest representation that parses back exactly.
pub fn format_number(v: f64) -> String {
    let fixed = format!("{v:.6}");
    if fixed.parse::<f64>().ok() == Some(v) {
        fixed
    } else {
        format!("{v}")
    }
}

/// Rows that can be written as CSV with a header.
pub trait Tabular {
    fn header() -> Vec<&'static str>;
    fn row(&self) -> Vec<String>;
}

fn opt(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

/// One evaluated label map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub input: String,
    pub n_superpixels: usize,
    pub src: f64,
    pub circularity_mean: f64,
    pub solidity_mean: f64,
    pub vxy_mean: f64,
    pub contour_smoothness_mean: f64,
    pub ue: Option<f64>,
    pub br: Option<f64>,
    pub n_ground_truths: usize,
    pub eps: u32,
    pub noise_amplitude: Option<f64>,
    pub noise_rounds: Option<u32>,
    pub seed: Option<u64>,
}

impl Tabular for ReportRecord {
    fn header() -> Vec<&'static str> {
        vec![
            "input",
            "n_superpixels",
            "src",
            "circularity_mean",
            "solidity_mean",
            "vxy_mean",
            "contour_smoothness_mean",
            "ue",
            "br",
            "n_ground_truths",
            "eps",
            "noise_amplitude",
            "noise_rounds",
            "seed",
        ]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.input.clone(),
            self.n_superpixels.to_string(),
            format_number(self.src),
            format_number(self.circularity_mean),
            format_number(self.solidity_mean),
            format_number(self.vxy_mean),
            format_number(self.contour_smoothness_mean),
            opt(self.ue),
            opt(self.br),
            self.n_ground_truths.to_string(),
            self.eps.to_string(),
            opt(self.noise_amplitude),
            self.noise_rounds.map(|r| r.to_string()).unwrap_or_default(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }
}

impl Tabular for EdgeStats {
    fn header() -> Vec<&'static str> {
        vec![
            "n_edges",
            "mean_length",
            "stddev_length",
            "coefficient_of_variation",
            "min",
            "max",
        ]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.n_edges.to_string(),
            format_number(self.mean_length),
            format_number(self.stddev_length),
            format_number(self.coefficient_of_variation),
            format_number(self.min),
            format_number(self.max),
        ]
    }
}

pub fn csv_string<T: Tabular>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(T::header()).map_err(io)?;
    for r in rows {
        w.write_record(r.row()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv<T: Tabular>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, csv_string(rows)?)?;
    Ok(())
}

pub fn read_reports_csv(path: impl AsRef<Path>) -> Result<Vec<ReportRecord>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::corrupt(path, e))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| Error::corrupt(path, e)))
        .collect()
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.into()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_reports_json(path: impl AsRef<Path>) -> Result<Vec<ReportRecord>> {
    let path = path.as_ref();
    serde_json::from_slice(&fs::read(path)?).map_err(|e| Error::corrupt(path, e))
}

/// Writes reports as CSV or JSON depending on the extension.
pub fn write_reports(rows: &[ReportRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => write_csv(rows, path),
        Some("json") => write_json(rows, path),
        _ => Err(Error::UnsupportedFormat(path.display().to_string())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.into(),
            points,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line plot with one circle marker per point, labeled axes and a legend.
pub fn emit_plot(series: &[Series], axes: &Axes) -> Result<String> {
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if pts.is_empty() {
        return Err(Error::EmptySeries);
    }
    let range = |vals: Vec<f64>| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = range(pts.iter().map(|p| p.0).collect());
    let (y0, y1) = range(pts.iter().map(|p| p.1).collect());
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 60.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(&axes.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(xv),
            top + ph + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            sy(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 16.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        top + ph / 2.0,
        escape(&axes.y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<g class="series" stroke="{color}" fill="{color}">"#);
        if path.len() > 1 {
            let _ = writeln!(s, r#"<polyline fill="none" points="{}"/>"#, path.join(" "));
        }
        for &(x, y) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = top + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="12" height="3"/>"#,
            left + pw + 14.0,
            ly - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" stroke="none" fill="black">{}</text>"#,
            left + pw + 32.0,
            ly,
            escape(&ser.name)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    let t = format!("{v:.3}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.to_string() }
}

pub fn write_plot(series: &[Series], axes: &Axes, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, emit_plot(series, axes)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_map() -> LabelMap {
        LabelMap::from_fn(7, 5, |x, y| x * 300 + y * 7)
    }

    #[test]
    fn round_trip_all_formats() {
        let dir = tempfile::tempdir().unwrap();
        let map = sample_map();
        for name in ["m.pgm", "m.png", "m.csv"] {
            let p = dir.path().join(name);
            save_label_map(&map, &p).unwrap();
            assert_eq!(load_label_map(&p).unwrap(), map, "{name}");
        }
    }

    #[test]
    fn pgm_layout() {
        let bytes = encode_pgm16(2, 1, &[1, 258]);
        assert_eq!(bytes, b"P5\n2 1\n65535\n\x00\x01\x01\x02");
        let (w, h, v) = decode_pgm(b"P2\n# comment\n3 1\n9\n1 2 9\n").unwrap();
        assert_eq!((w, h, v), (3, 1, vec![1, 2, 9]));
        let (_, _, v) = decode_pgm(b"P5 2 1 255\n\x05\xff").unwrap();
        assert_eq!(v, vec![5, 255]);
        assert!(decode_pgm(b"P5\n2 2\n65535\n\x00").is_err());
        assert!(decode_pgm(b"P6\n1 1\n255\n\x00\x00\x00").is_err());
    }

    #[test]
    fn overflow_and_bad_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let big = LabelMap::filled(2, 2, 70000);
        assert!(matches!(
            save_label_map(&big, dir.path().join("b.pgm")),
            Err(Error::Overflow { label: 70000, .. })
        ));
        assert!(matches!(
            save_label_map(&big, dir.path().join("b.png")),
            Err(Error::Overflow { .. })
        ));
        save_label_map(&big, dir.path().join("b.csv")).unwrap();

        let ragged = dir.path().join("r.csv");
        fs::write(&ragged, "0,1,2\n3,4\n").unwrap();
        assert!(matches!(load_label_map(&ragged), Err(Error::CorruptFile { .. })));
        let text = dir.path().join("t.csv");
        fs::write(&text, "0,x\n").unwrap();
        assert!(matches!(load_label_map(&text), Err(Error::CorruptFile { .. })));
        assert!(matches!(
            load_label_map(dir.path().join("m.bmp")),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn numbers_keep_six_digits() {
        assert_eq!(format_number(1.0), "1.000000");
        assert_eq!(format_number(0.5), "0.500000");
        let v = 0.1234567891;
        assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn plot_markers_and_empty() {
        let s = Series::new("a", (0..5).map(|i| (i as f64, (i * i) as f64)).collect());
        let svg = emit_plot(&[s.clone()], &Axes::default()).unwrap();
        assert_eq!(svg.matches(r#"class="marker""#).count(), 5);
        assert_eq!(svg, emit_plot(&[s], &Axes::default()).unwrap());
        assert!(matches!(emit_plot(&[], &Axes::default()), Err(Error::EmptySeries)));
        let empty = Series::new("e", vec![]);
        assert!(matches!(emit_plot(&[empty], &Axes::default()), Err(Error::EmptySeries)));
    }
}
