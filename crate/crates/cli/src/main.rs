//! `shapereg` command-line tool.
//!
//! Exit codes: 0 on success, 2 for bad input (arguments, files, formats),
//! 3 when an internal invariant fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use shapereg::graph::{adjacency_graph, edge_stats, graph_svg};
use shapereg::io::{
    load_gray_image, load_label_map, save_label_map, write_csv, write_plot, write_reports,
    ReportRecord,
};
use shapereg::metrics::{averaged_against, decomposition_metrics, DEFAULT_BR_EPS};
use shapereg::study::{
    noise_axes, noise_series, size_sweep_axes, size_sweep_series, study_noise, study_shapes,
    NoiseSetting,
};
use shapereg::synth::{
    hex_grid, make_shape, perturb_boundary, quadtree, shape_margin, square_grid, NoiseSpec,
    QuadtreeParams, ShapeKind,
};
use shapereg::{extract_superpixels, ConnectivityPolicy, Error};

#[derive(Parser)]
#[command(name = "shapereg", version, about = "Shape regularity of superpixel decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score label maps, optionally against ground truths.
    Eval(EvalArgs),
    /// Generate shapes, grids and quadtrees.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Run the synthetic-shape experiments.
    #[command(subcommand)]
    Study(StudyCommand),
    /// Draw the barycenter adjacency graph of a label map.
    Graph(GraphArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Label map(s) to evaluate; one report row each, in the given order.
    #[arg(long, required = true, num_args = 1..)]
    labels: Vec<PathBuf>,
    /// Ground-truth label map(s); UE and BR are averaged over them.
    #[arg(long, num_args = 1..)]
    gt: Vec<PathBuf>,
    /// Boundary recall tolerance in pixels.
    #[arg(long, default_value_t = DEFAULT_BR_EPS)]
    eps: u32,
    /// Reject labels that cover several disconnected regions.
    #[arg(long)]
    strict: bool,
    /// Report path, `.csv` or `.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// One synthetic shape as a 0/1 label map.
    Shape(ShapeArgs),
    /// Square or hexagonal grid.
    Grid(GridArgs),
    /// Variance-driven quadtree of an intensity image.
    Quadtree(QuadtreeArgs),
}

#[derive(Args)]
struct ShapeArgs {
    #[arg(long)]
    kind: ShapeKind,
    #[arg(long)]
    size: u32,
    /// Flip probability of boundary pixels.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, default_value_t = NoiseSpec::DEFAULT_ROUNDS)]
    rounds: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridType {
    Square,
    Hex,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long = "type", value_enum)]
    grid_type: GridType,
    #[arg(long)]
    width: u32,
    #[arg(long)]
    height: u32,
    /// Target number of superpixels.
    #[arg(long)]
    k: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QuadtreeArgs {
    /// Square power-of-two intensity image (PGM or PNG).
    #[arg(long)]
    image: PathBuf,
    /// Blocks with intensity variance above this are split.
    #[arg(long)]
    threshold: f64,
    #[arg(long)]
    min_block: u32,
    /// Blocks larger than this are always split; defaults to the image side.
    #[arg(long)]
    max_block: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum StudyCommand {
    /// Per-shape table over sizes, smooth and noisy.
    Shapes(StudyShapesArgs),
    /// Seed-averaged scores against noise amplitude.
    Noise(StudyNoiseArgs),
}

#[derive(Args)]
struct StudyShapesArgs {
    #[arg(long, num_args = 1.., value_delimiter = ',', default_value = "100")]
    sizes: Vec<u32>,
    /// Noise amplitudes for additional noisy rows.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    noise: Vec<f64>,
    #[arg(long, default_value_t = NoiseSpec::DEFAULT_ROUNDS)]
    rounds: u32,
    #[arg(long, default_value_t = 20)]
    seeds: u32,
    /// Restrict to these kinds; all nine by default.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    kinds: Vec<ShapeKind>,
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG of C and SRC against size.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct StudyNoiseArgs {
    #[arg(long)]
    kind: ShapeKind,
    #[arg(long)]
    size: u32,
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    amplitudes: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    seeds: u32,
    #[arg(long, default_value_t = NoiseSpec::DEFAULT_ROUNDS)]
    rounds: u32,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    labels: PathBuf,
    /// SVG overlay path.
    #[arg(long)]
    out: PathBuf,
    /// Edge-length statistics as CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Edge list, one `label_a label_b length` line per edge.
    #[arg(long)]
    edges: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::EmptyInput | Error::DegeneratePolygon | Error::ShapeVanished | Error::EmptySeries => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shapereg: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Eval(a) => eval(a),
        Command::Synth(SynthCommand::Shape(a)) => synth_shape(a),
        Command::Synth(SynthCommand::Grid(a)) => {
            let map = match a.grid_type {
                GridType::Square => square_grid(a.width, a.height, a.k)?,
                GridType::Hex => hex_grid(a.width, a.height, a.k)?,
            };
            save_label_map(&map, &a.out)
        }
        Command::Synth(SynthCommand::Quadtree(a)) => {
            let image = load_gray_image(&a.image)?;
            let params = QuadtreeParams {
                variance_threshold: a.threshold,
                min_block: a.min_block,
                max_block: a.max_block.unwrap_or(image.width),
            };
            save_label_map(&quadtree(&image, &params)?, &a.out)
        }
        Command::Study(StudyCommand::Shapes(a)) => {
            let kinds = if a.kinds.is_empty() { ShapeKind::ALL.to_vec() } else { a.kinds };
            let noise = a
                .noise
                .iter()
                .map(|&amp| NoiseSetting::new(amp, a.rounds, a.seeds))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = study_shapes(&kinds, &a.sizes, &noise)?;
            write_csv(&rows, &a.out)?;
            if let Some(plot) = a.plot {
                write_plot(&size_sweep_series(&rows), &size_sweep_axes(), plot)?;
            }
            Ok(())
        }
        Command::Study(StudyCommand::Noise(a)) => {
            let rows = study_noise(a.kind, a.size, &a.amplitudes, a.seeds, a.rounds)?;
            write_csv(&rows, &a.out)?;
            if let Some(plot) = a.plot {
                write_plot(&noise_series(&rows), &noise_axes(a.kind), plot)?;
            }
            Ok(())
        }
        Command::Graph(a) => {
            let map = load_label_map(&a.labels)?;
            let decomp = extract_superpixels(&map, ConnectivityPolicy::SplitDisconnected)?;
            let graph = adjacency_graph(&decomp);
            fs::write(&a.out, graph_svg(&decomp, &graph))?;
            if let Some(edges) = a.edges {
                fs::write(edges, graph.to_edge_list())?;
            }
            if let Some(stats) = a.stats {
                write_csv(&[edge_stats(&graph)?], stats)?;
            }
            Ok(())
        }
    }
}

fn eval(a: EvalArgs) -> Result<(), Error> {
    let policy = if a.strict {
        ConnectivityPolicy::Strict
    } else {
        ConnectivityPolicy::SplitDisconnected
    };
    let gts = a.gt.iter().map(load_label_map).collect::<Result<Vec<_>, _>>()?;
    let rows = a
        .labels
        .par_iter()
        .map(|path| eval_one(path, &gts, a.eps, policy))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &rows {
        println!("{}: SRC = {:.6}, n = {}", r.input, r.src, r.n_superpixels);
    }
    write_reports(&rows, &a.out)
}

fn eval_one(
    path: &Path,
    gts: &[shapereg::LabelMap],
    eps: u32,
    policy: ConnectivityPolicy,
) -> Result<ReportRecord, Error> {
    let map = load_label_map(path)?;
    let decomp = extract_superpixels(&map, policy)?;
    let m = decomposition_metrics(&decomp);
    let ue_br = averaged_against(&decomp, gts, eps)?;
    Ok(ReportRecord {
        input: path.display().to_string(),
        n_superpixels: m.n_superpixels,
        src: m.src,
        circularity_mean: m.circularity_mean,
        solidity_mean: m.solidity_mean,
        vxy_mean: m.vxy_mean,
        contour_smoothness_mean: m.contour_smoothness_mean,
        ue: ue_br.map(|v| v.0),
        br: ue_br.map(|v| v.1),
        n_ground_truths: gts.len(),
        eps,
        noise_amplitude: None,
        noise_rounds: None,
        seed: None,
    })
}

fn synth_shape(a: ShapeArgs) -> Result<(), Error> {
    let mut shape = make_shape(a.kind, a.size)?;
    if let Some(amplitude) = a.noise {
        shape = perturb_boundary(&shape, &NoiseSpec::new(amplitude, a.rounds, a.seed)?)?;
    }
    let side = a.size + 2 * shape_margin(a.size);
    let map = shape.to_label_map(side, side);
    save_label_map(&map, &a.out)
}
