//! Command-line front end. Every subcommand is a thin wrapper over the library.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use holegraph::dataprep::{emit_training_objects, write_training_set, PrepInput, PrepMode};
use holegraph::detect::{
    analyze_regions, load_external, ExternalDetector, HoleDetector, ReferenceDetector,
    DEFAULT_CONFIDENCE, DEFAULT_MIN_AREA,
};
use holegraph::fdlayout::{Algo, EngineConfig};
use holegraph::holeid::identify_holes;
use holegraph::model::{parse_detections, parse_holes, write_detections, write_holes, Hole, Layout, NodeId, Topology};
use holegraph::netgen::{generate, GenParams, GroundTruth, NetKind};
use holegraph::pipeline::{
    match_holes, run_experiment, run_pipeline, summary_csv, write_timeseries, Clock, GridSpec,
    PipelineConfig, StopCriteria, DEFAULT_JACCARD,
};
use holegraph::raster::{make_transform, render_reduced, render_with, Raster, RenderStyle};

#[derive(Parser)]
#[command(name = "holegraph", version, about = "Coverage-hole discovery for location-free sensor networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a network: PREFIX.top, PREFIX.lay (true coordinates), PREFIX.gt
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        deg: f64,
        #[arg(long, default_value = "sparse")]
        kind: NetKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Run a layout engine and write numbered snapshots
    Layout {
        #[arg(long)]
        algo: Algo,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iters: u64,
        #[arg(long, default_value_t = 0, help = "0 writes only the final layout")]
        snapshot_every: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Rasterize a layout to PNG
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        top: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated boundary ids: redraw only that hole
        #[arg(long)]
        reduce: Option<String>,
    },
    /// Emit training images and label files for the holes of a layout
    Prep {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        top: PathBuf,
        /// Keep only holes matching a ground-truth hole
        #[arg(long)]
        gt: Option<PathBuf>,
        #[arg(long, default_value = "segmented")]
        mode: PrepMode,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Detect holes in a rendered layout
    Detect {
        #[arg(long)]
        img: PathBuf,
        #[arg(long)]
        lay: PathBuf,
        #[arg(long)]
        top: Option<PathBuf>,
        /// Import boxes from an external detector instead of the reference detector
        #[arg(long)]
        external: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fill detected holes and recover their boundary nodes
    Identify {
        #[arg(long)]
        img: PathBuf,
        #[arg(long)]
        boxes: PathBuf,
        #[arg(long)]
        lay: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full detection loop with stopping rules
    Run {
        #[arg(long)]
        top: PathBuf,
        #[arg(long)]
        gt: Option<PathBuf>,
        /// True coordinates; needed for evaluation and the identity engine
        #[arg(long)]
        coords: Option<PathBuf>,
        #[arg(long, default_value = "kkmsds")]
        algo: Algo,
        /// reference | external:FILE.det
        #[arg(long, default_value = "reference")]
        detector: String,
        #[arg(long, default_value_t = 600.0)]
        tmax: f64,
        #[arg(long, default_value_t = 10)]
        stable: u32,
        #[arg(long, default_value_t = 1)]
        detect_every: u32,
        #[arg(long)]
        max_iters: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// wall | virtual:DT
        #[arg(long, default_value = "wall")]
        clock: Clock,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Grid of generated networks run concurrently, with summary.csv
    Experiment {
        /// Terms such as n=200,500 d=6,8,10 kind=sparse,uniform
        #[arg(long, num_args = 1.., required = true)]
        grid: Vec<String>,
        #[arg(long, default_value = "kkmsds")]
        algo: Algo,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 600.0)]
        tmax: f64,
        #[arg(long, default_value_t = 10)]
        stable: u32,
        #[arg(long, default_value = "wall")]
        clock: Clock,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_topology(path: &Path) -> Result<Topology> {
    Topology::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_layout(path: &Path) -> Result<Layout> {
    Layout::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn parse_ids(s: &str) -> Result<Vec<NodeId>> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map(NodeId).with_context(|| format!("bad node id '{t}'")))
        .collect()
}

fn main() -> Result<()> {
    let style = RenderStyle::default();
    match Cli::parse().cmd {
        Cmd::Gen { n, deg, kind, seed, out_prefix } => {
            let net = generate(&GenParams { n, d: deg, kind, seed })?;
            write(&with_ext(&out_prefix, "top"), net.topology.to_text())?;
            write(&with_ext(&out_prefix, "lay"), net.truth.coords.to_text()?)?;
            write(&with_ext(&out_prefix, "gt"), write_holes(&net.truth.holes))?;
            println!(
                "{} nodes, {} edges, average degree {:.3}, radius {:.6}, {} holes",
                n,
                net.topology.edge_count(),
                net.topology.average_degree(),
                net.radius,
                net.truth.holes.len()
            );
        }
        Cmd::Layout { algo, input, seed, iters, snapshot_every, out_dir } => {
            let top = read_topology(&input)?;
            let mut engine = EngineConfig::default_for(algo)?.build(&top, seed)?;
            fs::create_dir_all(&out_dir)?;
            for _ in 0..iters {
                engine.iterate()?;
                let k = engine.iteration();
                if snapshot_every > 0 && k % snapshot_every == 0 {
                    write(&out_dir.join(format!("layout_{k:06}.lay")), engine.snapshot().to_text()?)?;
                }
            }
            write(&out_dir.join("final.lay"), engine.snapshot().to_text()?)?;
        }
        Cmd::Render { input, top, out, reduce } => {
            let layout = read_layout(&input)?;
            let top = read_topology(&top)?;
            let raster = match reduce {
                Some(ids) => {
                    let hole = Hole::new(parse_ids(&ids)?.into_iter().collect(), None, 0, None)?;
                    render_reduced(&layout, &top, &hole, &style)?.raster
                }
                None => render_with(&layout, &top, &style, &make_transform(&layout, &style))?,
            };
            raster.save_png(&out)?;
        }
        Cmd::Prep { input, top, gt, mode, out_dir } => {
            let layout = read_layout(&input)?;
            let top = read_topology(&top)?;
            let transform = make_transform(&layout, &style);
            let render = render_with(&layout, &top, &style, &transform)?;
            let analysis = analyze_regions(&render, &layout, &transform, &style, DEFAULT_MIN_AREA)?;
            let mut holes: Vec<Hole> = analysis.holes.into_iter().map(|h| h.hole).collect();
            if let Some(gt) = gt {
                let truth = parse_holes(&read(&gt)?)?;
                let m = match_holes(&holes, &truth, DEFAULT_JACCARD)?;
                let keep: Vec<usize> = m.pairs.iter().map(|p| p.detected).collect();
                holes = holes
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| keep.contains(i))
                    .map(|(_, h)| h)
                    .collect();
            }
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("layout");
            let input = PrepInput { render: &render, holes: &holes, layout: &layout, topology: &top, style: &style };
            let images = emit_training_objects(&input, mode, stem)?;
            write_training_set(&images, &out_dir)?;
            println!("{} images, {} labeled holes", images.len(), holes.len());
        }
        Cmd::Detect { img, lay, top, external, threshold, out } => {
            let raster = Raster::load_png(&img)?;
            let layout = read_layout(&lay)?;
            if let Some(top) = top {
                let top = read_topology(&top)?;
                if top.node_count() != layout.len() {
                    bail!("layout has {} nodes, topology {}", layout.len(), top.node_count());
                }
            }
            let s = style.with_canvas(raster.width(), raster.height());
            let transform = make_transform(&layout, &s);
            let boxes = match external {
                Some(det) => load_external(&read(&det)?, (raster.width(), raster.height()), threshold)?,
                None => ReferenceDetector::new(s).detect(&raster, &layout, &transform)?,
            };
            write(&out, write_detections(&boxes))?;
        }
        Cmd::Identify { img, boxes, lay, out } => {
            let raster = Raster::load_png(&img)?;
            let layout = read_layout(&lay)?;
            let boxes = parse_detections(&read(&boxes)?, Some((raster.width(), raster.height())))?;
            let s = style.with_canvas(raster.width(), raster.height());
            let transform = make_transform(&layout, &s);
            let found = identify_holes(&raster, &boxes, &layout, &transform, &s)?;
            write(&out, write_holes(&found.holes))?;
            println!("{} holes, {} detections skipped", found.holes.len(), found.skipped);
        }
        Cmd::Run { top, gt, coords, algo, detector, tmax, stable, detect_every, max_iters, seed, clock, out_dir } => {
            let topology = read_topology(&top)?;
            let coords = coords.as_deref().map(read_layout).transpose()?;
            let truth = match &coords {
                Some(c) => {
                    let mut t = GroundTruth::from_coords(&topology, c.clone(), &style, DEFAULT_MIN_AREA)?;
                    if let Some(gt) = &gt {
                        t.holes = parse_holes(&read(gt)?)?;
                    }
                    Some(t)
                }
                None if gt.is_some() => bail!("--gt needs --coords to define negative regions"),
                None => None,
            };
            let engine_cfg = match algo {
                Algo::Identity => EngineConfig::Identity(
                    coords.clone().context("identity layout needs --coords")?,
                ),
                other => EngineConfig::default_for(other)?,
            };
            let mut engine = engine_cfg.build(&topology, seed)?;
            let mut det: Box<dyn HoleDetector> = match detector.as_str() {
                "reference" => Box::new(ReferenceDetector::new(style.clone())),
                other => match other.strip_prefix("external:") {
                    Some(path) => Box::new(ExternalDetector::new(parse_detections(&read(Path::new(path))?, None)?)),
                    None => bail!("unknown detector '{other}'"),
                },
            };
            let stop = StopCriteria { t_max: tmax, stable_iters: stable };
            let config = PipelineConfig { detect_every, clock, max_iterations: max_iters, ..PipelineConfig::default() };
            let out = run_pipeline(&topology, engine.as_mut(), det.as_mut(), &stop, truth.as_ref(), &config)?;
            write(&out_dir.join("final.lay"), out.layout.to_text()?)?;
            write(&out_dir.join("final.holes"), write_holes(&out.holes))?;
            if truth.is_some() {
                write_timeseries(&out.log.eval_records(), &out_dir, "timeseries")?;
            }
            let c = out.final_confusion();
            println!(
                "stop={} final_iteration={} last_iteration={} holes={} sensitivity={} specificity={}",
                out.stop,
                out.final_iteration,
                out.last_iteration,
                out.holes.len(),
                fmt_opt(c.and_then(|c| c.sensitivity())),
                fmt_opt(c.and_then(|c| c.specificity())),
            );
        }
        Cmd::Experiment { grid, algo, seeds, tmax, stable, clock, out_dir } => {
            let grid = GridSpec::parse(&grid)?;
            let stop = StopCriteria { t_max: tmax, stable_iters: stable };
            let config = PipelineConfig { clock, ..PipelineConfig::default() };
            let rows = run_experiment(&grid, algo, &seeds, &stop, &config, Some(&out_dir))?;
            write(&out_dir.join("summary.csv"), summary_csv(&rows))?;
            let slowest = rows.iter().map(|r| r.first_pass_secs).fold(0.0, f64::max);
            println!("{} runs, slowest first detection pass {slowest:.2} s", rows.len());
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |x| format!("{x:.4}"))
}
