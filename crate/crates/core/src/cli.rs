//! The `dehaze` command-line tool: argument parsing and the four
//! subcommands. Every command prints one JSON document on stdout.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::airlight::{estimate_airlight_baseline, estimate_airlight_clustered, AirlightEstimate, AirlightMethod};
use crate::error::{Error, Result};
use crate::image::{dark_channel, decode_image, encode_gray_png, encode_png, read_image, Image};
use crate::metrics::{metrics_report, MetricsReport};
use crate::pipeline::{defog, PipelineConfig, RunReport};
use crate::synth::{distractor_scene, synth_scene, SceneSpec};

pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Process exit status for an error: argument problems, IO/codec failures
/// and solver non-convergence each get their own code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Degenerate(_) => EXIT_ARGUMENT,
        Error::Io { .. } | Error::Decode { .. } | Error::Encode(_) => EXIT_IO,
        Error::SolverDiverged { .. } => EXIT_SOLVER,
    }
}

#[derive(Debug, Parser)]
#[command(name = "dehaze", version, about = "Single-image fog removal with clustered atmospheric light estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Remove fog from an image and print a run report.
    Defog {
        input: PathBuf,
        output: PathBuf,
        /// Also write the refined transmission map as a grayscale PNG.
        #[arg(long)]
        dump_transmission: Option<PathBuf>,
        #[command(flatten)]
        config: PipelineConfig,
    },
    /// Estimate the atmospheric light.
    Airlight {
        input: PathBuf,
        /// Run both estimators and report the distance between them.
        #[arg(long)]
        compare: bool,
        /// Write a copy of the input with diamond markers at both estimates
        /// (red: baseline, blue: clustered).
        #[arg(long)]
        annotate: Option<PathBuf>,
        #[command(flatten)]
        config: PipelineConfig,
    },
    /// Score a restoration against its foggy original.
    Metrics {
        original: PathBuf,
        restored: PathBuf,
        #[command(flatten)]
        config: PipelineConfig,
    },
    /// Generate a synthetic foggy scene with ground truth.
    Synth {
        /// Output directory for hazy.png, truth.png, t.png and meta.json.
        out: PathBuf,
        /// JSON scene description; overrides the preset flags.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Preset::Distractor)]
        preset: Preset,
        #[arg(long, default_value_t = 240)]
        height: usize,
        #[arg(long, default_value_t = 320)]
        width: usize,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Sky, textured ground and a bright object wider than the dark-channel window.
    Distractor,
    /// Sky over textured ground.
    Plain,
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn cmd_defog(input: &Path, output: &Path, dump_transmission: Option<&Path>, config: &PipelineConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let bytes = read_file(input)?;
    let img = decode_image(&bytes)?;
    let decode = start.elapsed().as_secs_f64();

    let mut out = defog(&img, config)?;
    out.timings.decode = decode;

    let start = Instant::now();
    let png = encode_png(&out.restored)?;
    out.timings.encode = start.elapsed().as_secs_f64();
    write_file(output, &png)?;
    if let Some(path) = dump_transmission {
        write_file(path, &encode_gray_png(&out.transmission)?)?;
    }

    let metrics = metrics_report(&img, &out.restored, &config.metrics())?;
    Ok(RunReport { airlight: out.airlight, timings: out.timings, metrics, config: config.clone() })
}

/// Pixels covered by a diamond marker of the given radius, clipped to the image.
pub fn marker_footprint(height: usize, width: usize, location: [f64; 2], radius: isize) -> Vec<(usize, usize)> {
    let (cr, cc) = (location[0].round() as isize, location[1].round() as isize);
    let mut pts = Vec::new();
    for dr in -radius..=radius {
        for dc in -radius..=radius {
            let d = dr.abs() + dc.abs();
            if d < radius - 1 || d > radius {
                continue;
            }
            let (r, c) = (cr + dr, cc + dc);
            if r >= 0 && c >= 0 && (r as usize) < height && (c as usize) < width {
                pts.push((r as usize, c as usize));
            }
        }
    }
    pts
}

pub const MARKER_RADIUS: isize = 6;

/// Draws two-pixel-thick diamond outlines at each location.
pub fn annotate(img: &Image, markers: &[([f64; 2], [f64; 3])]) -> Image {
    let (h, w) = img.dims();
    let mut paint: Vec<Option<[f64; 3]>> = vec![None; h * w];
    for &(loc, color) in markers {
        for (r, c) in marker_footprint(h, w, loc, MARKER_RADIUS) {
            paint[r * w + c] = Some(color);
        }
    }
    Image::from_fn(h, w, |r, c| paint[r * w + c].unwrap_or_else(|| img.pixel(r, c)))
}

pub const BASELINE_MARKER: [f64; 3] = [1.0, 0.0, 0.0];
pub const CLUSTERED_MARKER: [f64; 3] = [0.0, 0.0, 1.0];

pub fn cmd_airlight(input: &Path, compare: bool, annotate_path: Option<&Path>, config: &PipelineConfig) -> Result<Value> {
    config.validate()?;
    let img = read_image(input)?;
    let dark = dark_channel(&img, config.window_radius);
    let clustered = || estimate_airlight_clustered(&img, &dark, config.fraction, config.k, config.seed);
    let baseline = || estimate_airlight_baseline(&img, &dark, config.fraction);

    let (report, estimates): (Value, Vec<AirlightEstimate>) = if compare {
        let (c, b) = (clustered()?, baseline()?);
        (json!({ "clustered": c, "baseline": b, "distance": c.distance_to(&b) }), vec![c, b])
    } else {
        let e = match config.airlight_method {
            AirlightMethod::Clustered => clustered()?,
            AirlightMethod::Baseline => baseline()?,
        };
        (to_json(&e), vec![e])
    };

    if let Some(path) = annotate_path {
        let markers: Vec<([f64; 2], [f64; 3])> = estimates
            .iter()
            .map(|e| {
                let color = match e.method {
                    AirlightMethod::Clustered => CLUSTERED_MARKER,
                    AirlightMethod::Baseline => BASELINE_MARKER,
                };
                (e.location, color)
            })
            .collect();
        write_file(path, &encode_png(&annotate(&img, &markers))?)?;
    }
    Ok(report)
}

pub fn cmd_metrics(original: &Path, restored: &Path, config: &PipelineConfig) -> Result<MetricsReport> {
    config.validate()?;
    let (a, b) = (read_image(original)?, read_image(restored)?);
    metrics_report(&a, &b, &config.metrics())
}

pub fn cmd_synth(spec: &SceneSpec, out: &Path) -> Result<Value> {
    let scene = synth_scene(spec)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let files = [
        ("hazy.png", encode_png(&scene.hazy)?),
        ("truth.png", encode_png(&scene.truth)?),
        ("t.png", encode_gray_png(&scene.transmission)?),
    ];
    for (name, bytes) in &files {
        write_file(&out.join(name), bytes)?;
    }
    let meta = json!({
        "airlight": spec.airlight,
        "beta": spec.beta,
        "seed": spec.seed,
        "geometry": {
            "height": spec.height,
            "width": spec.width,
            "sky_rows": spec.sky_rows,
            "distractor": spec.distractor.as_ref().map(|d| d.rect),
        },
        "spec": spec,
    });
    let text = serde_json::to_string_pretty(&meta).expect("serializable");
    write_file(&out.join("meta.json"), text.as_bytes())?;
    Ok(meta)
}

fn synth_spec(spec: Option<&Path>, preset: Preset, height: usize, width: usize, beta: Option<f64>, seed: u64) -> Result<SceneSpec> {
    if let Some(path) = spec {
        let text = read_file(path)?;
        return serde_json::from_slice(&text)
            .map_err(|e| Error::invalid(format!("scene spec {}: {e}", path.display())));
    }
    let mut spec = match preset {
        Preset::Distractor => distractor_scene(height, width, seed)?,
        Preset::Plain => SceneSpec { height, width, sky_rows: height * 3 / 10, seed, ..SceneSpec::default() },
    };
    if let Some(b) = beta {
        spec.beta = b;
    }
    Ok(spec)
}

/// Runs a parsed command and returns the JSON it prints.
pub fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Command::Defog { input, output, dump_transmission, config } => {
            cmd_defog(&input, &output, dump_transmission.as_deref(), &config).map(|r| to_json(&r))
        }
        Command::Airlight { input, compare, annotate, config } => cmd_airlight(&input, compare, annotate.as_deref(), &config),
        Command::Metrics { original, restored, config } => cmd_metrics(&original, &restored, &config).map(|r| to_json(&r)),
        Command::Synth { out, spec, preset, height, width, beta, seed } => {
            let spec = synth_spec(spec.as_deref(), preset, height, width, beta, seed)?;
            cmd_synth(&spec, &out)
        }
    }
}
